#include "raman/wigner.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace raman {
namespace {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Quantum numbers are carried as doubled integers so that half-integral
// arithmetic and parity checks stay exact.
int toTwice(double j, const char* what) {
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (!std::isfinite(twice) || std::abs(twice - rounded) > 1e-9) {
        throw std::invalid_argument(std::string(what) + " must be half-integral");
    }
    return static_cast<int>(rounded);
}

BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

bool triangleOk(int two_a, int two_b, int two_c) {
    if ((two_a + two_b + two_c) % 2 != 0) return false;
    return two_c >= std::abs(two_a - two_b) && two_c <= two_a + two_b;
}

// Delta(abc) = (a+b-c)! (a-b+c)! (-a+b+c)! / (a+b+c+1)!  as an exact rational.
BigRational triangleCoefficient(int two_a, int two_b, int two_c) {
    return BigRational(factorial((two_a + two_b - two_c) / 2) *
                           factorial((two_a - two_b + two_c) / 2) *
                           factorial((-two_a + two_b + two_c) / 2),
                       factorial((two_a + two_b + two_c) / 2 + 1));
}

double toDouble(const BigRational& r) {
    return r.convert_to<double>();
}

// value = sign * sqrt(radicand) * sum, all exact until the final conversion
double assemble(const BigRational& radicand, const BigRational& sum) {
    const double s = toDouble(sum);
    return std::sqrt(toDouble(radicand)) * s;
}

}  // namespace

double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3) {
    const int tj1 = toTwice(j1, "j1"), tj2 = toTwice(j2, "j2"), tj3 = toTwice(j3, "j3");
    const int tm1 = toTwice(m1, "m1"), tm2 = toTwice(m2, "m2"), tm3 = toTwice(m3, "m3");
    if (tj1 < 0 || tj2 < 0 || tj3 < 0) {
        throw std::invalid_argument("angular momenta must be non-negative");
    }
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) {
        throw std::invalid_argument("|m| must not exceed j");
    }
    if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0) {
        throw std::invalid_argument("m must differ from j by an integer");
    }
    if (tm1 + tm2 + tm3 != 0) return 0.0;
    if (!triangleOk(tj1, tj2, tj3)) return 0.0;

    // Racah sum: k runs over all terms with non-negative factorial arguments.
    const int a1 = (tj1 + tj2 - tj3) / 2;   // j1+j2-j3
    const int a2 = (tj1 - tm1) / 2;         // j1-m1
    const int a3 = (tj2 + tm2) / 2;         // j2+m2
    const int b1 = (tj3 - tj2 + tm1) / 2;   // j3-j2+m1
    const int b2 = (tj3 - tj1 - tm2) / 2;   // j3-j1-m2
    const int kmin = std::max({0, -b1, -b2});
    const int kmax = std::min({a1, a2, a3});

    BigRational sum = 0;
    for (int k = kmin; k <= kmax; ++k) {
        const BigInt denom = factorial(k) * factorial(a1 - k) * factorial(a2 - k) *
                             factorial(a3 - k) * factorial(b1 + k) * factorial(b2 + k);
        if (k % 2 == 0) {
            sum += BigRational(1, denom);
        } else {
            sum -= BigRational(1, denom);
        }
    }

    BigRational radicand = triangleCoefficient(tj1, tj2, tj3);
    radicand *= BigInt(factorial((tj1 + tm1) / 2) * factorial((tj1 - tm1) / 2) *
                       factorial((tj2 + tm2) / 2) * factorial((tj2 - tm2) / 2) *
                       factorial((tj3 + tm3) / 2) * factorial((tj3 - tm3) / 2));

    const int phase = (tj1 - tj2 - tm3) / 2;  // integer when selection rules hold
    const double sign = (phase % 2 == 0) ? 1.0 : -1.0;
    return sign * assemble(radicand, sum);
}

double wigner6j(double j1, double j2, double j3, double j4, double j5, double j6) {
    const int t1 = toTwice(j1, "j1"), t2 = toTwice(j2, "j2"), t3 = toTwice(j3, "j3");
    const int t4 = toTwice(j4, "j4"), t5 = toTwice(j5, "j5"), t6 = toTwice(j6, "j6");
    for (int t : {t1, t2, t3, t4, t5, t6}) {
        if (t < 0) throw std::invalid_argument("angular momenta must be non-negative");
    }
    if (!triangleOk(t1, t2, t3) || !triangleOk(t1, t5, t6) || !triangleOk(t4, t2, t6) ||
        !triangleOk(t4, t5, t3)) {
        return 0.0;
    }

    const int s1 = (t1 + t2 + t3) / 2;
    const int s2 = (t1 + t5 + t6) / 2;
    const int s3 = (t4 + t2 + t6) / 2;
    const int s4 = (t4 + t5 + t3) / 2;
    const int q1 = (t1 + t2 + t4 + t5) / 2;
    const int q2 = (t2 + t3 + t5 + t6) / 2;
    const int q3 = (t3 + t1 + t6 + t4) / 2;

    BigRational sum = 0;
    for (int k = std::max({s1, s2, s3, s4}); k <= std::min({q1, q2, q3}); ++k) {
        const BigInt denom = factorial(k - s1) * factorial(k - s2) * factorial(k - s3) *
                             factorial(k - s4) * factorial(q1 - k) * factorial(q2 - k) *
                             factorial(q3 - k);
        const BigRational term(factorial(k + 1), denom);
        if (k % 2 == 0) {
            sum += term;
        } else {
            sum -= term;
        }
    }

    const BigRational radicand = triangleCoefficient(t1, t2, t3) * triangleCoefficient(t1, t5, t6) *
                                 triangleCoefficient(t4, t2, t6) * triangleCoefficient(t4, t5, t3);
    return assemble(radicand, sum);
}

}  // namespace raman
