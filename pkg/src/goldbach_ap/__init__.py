"""Mean values of Goldbach representations in arithmetic progressions.

Numerical toolkit for the averaged representation function
sum_{n <= X} R(n, q1, a1, q2, a2) and its expansion over zeros of Dirichlet
L-functions, together with the circle-method integrals behind it.
"""

from .arith import MangoldtTable, psi, psi_mu, psi_progression, psi_twisted, sieve_mangoldt
from .characters import DirichletCharacter, build_group, character, conductor_and_primitive
from .goldbach import Classes, TheoremReport, representation_direct, representation_fft, theorem_report
from .lfun import ZeroSet, find_critical_zeros, l_value, scan_real_zeros, siegel_audit
from .special import W_kernel, gamma, log_gamma
from .zeros import ZeroCatalog

__version__ = "0.1.0"

__all__ = [
    "Classes",
    "DirichletCharacter",
    "MangoldtTable",
    "TheoremReport",
    "W_kernel",
    "ZeroCatalog",
    "ZeroSet",
    "build_group",
    "character",
    "conductor_and_primitive",
    "find_critical_zeros",
    "gamma",
    "l_value",
    "log_gamma",
    "psi",
    "psi_mu",
    "psi_progression",
    "psi_twisted",
    "representation_direct",
    "representation_fft",
    "scan_real_zeros",
    "siegel_audit",
    "sieve_mangoldt",
    "theorem_report",
]
