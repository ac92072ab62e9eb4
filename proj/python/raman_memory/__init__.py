"""Dressed-state susceptibility, slow-light transport and Raman quantum-memory
simulation for a multilevel alkali D1 medium. All frequencies are in units of
the excited-state natural linewidth gamma."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
