#pragma once

namespace raman {

/// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).
///
/// Arguments are half-integers passed as doubles (e.g. 0.5, 1.0, 1.5).
/// Evaluated through the Racah sum with exact big-integer rational
/// arithmetic; the conversion to double happens once at the end, so the
/// relative error stays at rounding level even for strongly cancelling
/// sums. Returns 0 when a triangle or projection selection rule fails.
///
/// Throws std::invalid_argument for non-half-integral input or |m| > j.
double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);

/// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; same evaluation strategy and
/// input conventions as wigner3j. Returns 0 when any triad violates the
/// triangle rule.
double wigner6j(double j1, double j2, double j3, double j4, double j5, double j6);

}  // namespace raman
