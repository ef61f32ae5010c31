"""Representation function R(n, q1, a1, q2, a2) and the mean-value formula.

The averaged representation function is compared with

    (X^2/2 - G(X,q1,a1) - G(X,q2,a2) + H(X)) / (phi(q1) phi(q2)),

where G sums the kernel W(X, rho, 1) over the zeros of every character modulo
q_i twisted by conj(chi)(a_i), and H collects the real-zero corrections. The
left side is evaluated at floor(X), the right side at X itself.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .arith import MangoldtTable, euler_phi
from .characters import DirichletCharacter, build_group
from .errors import ConfigurationError, InvalidArgumentError, OutOfRangeError
from .special import W_kernel, gamma
from .zeros import ZeroCatalog, zero_density_tail

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Classes:
    """The two progressions m1 = a1 (mod q1), m2 = a2 (mod q2)."""

    q1: int
    a1: int
    q2: int
    a2: int

    def __post_init__(self):
        for q, a in ((self.q1, self.a1), (self.q2, self.a2)):
            if q < 1:
                raise InvalidArgumentError(f"modulus must be positive, got {q}")
            if math.gcd(a, q) != 1:
                raise InvalidArgumentError(f"residue {a} not coprime to modulus {q}")

    @property
    def phi1(self) -> int:
        return euler_phi(self.q1)

    @property
    def phi2(self) -> int:
        return euler_phi(self.q2)

    def swapped(self) -> "Classes":
        return Classes(self.q2, self.a2, self.q1, self.a1)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.q1, self.a1, self.q2, self.a2)


@dataclass(frozen=True, eq=False)
class RepresentationTable:
    limit: int
    classes: Classes
    values: np.ndarray = field(repr=False)

    @cached_property
    def prefix(self) -> np.ndarray:
        return np.cumsum(self.values.astype(np.longdouble)).astype(np.float64)

    def mean_value(self, X: float) -> float:
        """sum_{n <= X} R(n)."""
        n = int(math.floor(X))
        if n > self.limit:
            raise OutOfRangeError(f"X={X} beyond tabulated limit {self.limit}")
        return float(self.prefix[n]) if n >= 0 else 0.0


def _check_limit(table: MangoldtTable, X: int) -> int:
    X = int(X)
    if X < 1:
        raise InvalidArgumentError(f"X must be positive, got {X}")
    if X > table.limit:
        raise OutOfRangeError(f"X={X} exceeds table limit {table.limit}")
    return X


def progression_sequence(table: MangoldtTable, X: int, q: int, a: int) -> np.ndarray:
    """Lambda(m) restricted to m = a (mod q), indices 0..X."""
    seq = np.zeros(X + 1)
    start = a % q
    seq[start::q] = table.values[start : X + 1 : q]
    return seq


def representation_direct(table: MangoldtTable, classes: Classes, X: int) -> RepresentationTable:
    """O(X^2)-style oracle: explicit double sum over the prime powers m1."""
    X = _check_limit(table, X)
    A = progression_sequence(table, X, classes.q1, classes.a1)
    B = progression_sequence(table, X, classes.q2, classes.a2)
    out = np.zeros(X + 1)
    for m1 in np.flatnonzero(A):
        if m1 >= X:
            break
        out[m1 + 1 :] += A[m1] * B[1 : X + 1 - m1]
    return RepresentationTable(X, classes, out)


def _fft_convolve(A: np.ndarray, B: np.ndarray, X: int) -> np.ndarray:
    size = 1 << (2 * X + 1).bit_length()
    if np.iscomplexobj(A) or np.iscomplexobj(B):
        return np.fft.ifft(np.fft.fft(A, size) * np.fft.fft(B, size))[: X + 1]
    return np.fft.irfft(np.fft.rfft(A, size) * np.fft.rfft(B, size), size)[: X + 1]


def representation_fft(table: MangoldtTable, classes: Classes, X: int) -> RepresentationTable:
    """R(n) for n <= X by a zero-padded FFT convolution of length >= 2X + 1."""
    X = _check_limit(table, X)
    A = progression_sequence(table, X, classes.q1, classes.a1)
    B = progression_sequence(table, X, classes.q2, classes.a2)
    vals = _fft_convolve(A, B, X)
    if not (A.any() and B.any()):
        vals = np.zeros(X + 1)
    vals[0] = 0.0
    # exact zeros forced by n = a1 + a2 (mod gcd(q1, q2)); clip round-off below 0
    g = math.gcd(classes.q1, classes.q2)
    if g > 1:
        vals[(np.arange(X + 1) - classes.a1 - classes.a2) % g != 0] = 0.0
    np.maximum(vals, 0.0, out=vals)
    return RepresentationTable(X, classes, vals)


def twisted_representation(
    table: MangoldtTable, chi1: DirichletCharacter, chi2: DirichletCharacter, X: int
) -> np.ndarray:
    """R(n, chi1, chi2) = sum_{k1 + k2 = n} chi1(k1) Lambda(k1) chi2(k2) Lambda(k2)."""
    X = _check_limit(table, X)
    n = np.arange(X + 1)
    lam = table.values[: X + 1]
    A = lam * chi1.values[n % chi1.modulus]
    B = lam * chi2.values[n % chi2.modulus]
    out = _fft_convolve(A, B, X)
    out[0] = 0
    return out


def _fsum_complex(terms: np.ndarray) -> complex:
    terms = np.asarray(terms, dtype=np.complex128).ravel()
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


@dataclass(frozen=True)
class GTerm:
    value: complex
    tail_bound: float


def g_character(X: float, chi: DirichletCharacter, catalog: ZeroCatalog, kappa: float = 1.0) -> complex:
    """G^kappa(X, chi) = sum_rho W(X, rho, kappa), truncated at height T."""
    rhos = catalog.rhos(chi)
    if rhos.size == 0:
        return 0j
    return _fsum_complex(W_kernel(X, rhos, kappa))


def g_term(
    X: float, q: int, a: int, catalog: ZeroCatalog | None, kappa: float = 1.0
) -> GTerm:
    """G^kappa(X, q, a) = sum_{chi mod q} conj(chi)(a) G^kappa(X, chi).

    Complex characters are grouped with their conjugates, so the imaginary
    part cancels up to rounding. The tail bound estimates the neglected zeros
    with |gamma| > T from |W(X, 1/2 + i gamma, kappa)| ~ Gamma(kappa)
    X^(1/2 + kappa) |gamma|^(-kappa-1).
    """
    if catalog is None:
        raise ConfigurationError("g_term needs a ZeroCatalog")
    if math.gcd(a, q) != 1:
        raise InvalidArgumentError(f"residue {a} not coprime to modulus {q}")
    terms = []
    tail = 0.0
    scale = float(gamma(kappa).real) * X ** (0.5 + kappa)
    for chi in build_group(q):
        g = g_character(X, chi, catalog, kappa)
        terms.append(np.conj(chi(a)) * g)
        tail += 2 * scale * zero_density_tail(chi.conductor, catalog.height, kappa)
    return GTerm(_fsum_complex(np.array(terms)), tail)


def h_parts(X: float, classes: Classes, catalog: ZeroCatalog) -> tuple[complex, complex, complex]:
    """The three pieces of H(X), each already weighted by conj(chi1)(a1) conj(chi2)(a2):

    sum_{beta2} G^{beta2}(X, chi1), sum_{beta1} G^{beta1}(X, chi2) and
    sum_{beta1, beta2} W(X, beta1, beta2).
    """
    chars1 = list(build_group(classes.q1))
    chars2 = list(build_group(classes.q2))
    betas1 = {c.label: catalog.real_zeros(c) for c in chars1}
    betas2 = {c.label: catalog.real_zeros(c) for c in chars2}
    parts: list[list[complex]] = [[], [], []]
    for c1 in chars1:
        b1 = betas1[c1.label]
        for c2 in chars2:
            b2 = betas2[c2.label]
            if not b1 and not b2:
                continue
            weight = np.conj(c1(classes.a1)) * np.conj(c2(classes.a2))
            for beta in b2:
                parts[0].append(weight * g_character(X, c1, catalog, beta))
            for beta in b1:
                parts[1].append(weight * g_character(X, c2, catalog, beta))
            for x in b1:
                for y in b2:
                    parts[2].append(weight * complex(W_kernel(X, x, y)))
    return tuple(_fsum_complex(np.array(p)) if p else 0j for p in parts)


def h_term(X: float, classes: Classes, catalog: ZeroCatalog) -> complex:
    """Real-zero correction H(X); exactly 0 when no real zeros are present."""
    p1, p2, p3 = h_parts(X, classes, catalog)
    return p1 + p2 - p3


@dataclass(frozen=True)
class TheoremReport:
    X: float
    classes: Classes
    lhs: float
    main_term: float
    g_term_1: float
    g_term_2: float
    h_term: float
    residual: float
    truncation_height: float
    truncation_bound: float
    bound_ratio: float
    g_imag: float = 0.0

    def identity_defect(self) -> float:
        """lhs - (main - g1 - g2 + h + residual); zero by construction."""
        return self.lhs - (self.main_term - self.g_term_1 - self.g_term_2 + self.h_term + self.residual)

    def row(self) -> dict:
        c = self.classes
        return {
            "X": self.X,
            "q1": c.q1,
            "a1": c.a1,
            "q2": c.q2,
            "a2": c.a2,
            "lhs": self.lhs,
            "main": self.main_term,
            "g1": self.g_term_1,
            "g2": self.g_term_2,
            "h": self.h_term,
            "residual": self.residual,
            "bound_ratio": self.bound_ratio,
            "T": self.truncation_height,
            "tail_bound": self.truncation_bound,
        }


CSV_FIELDS = ("X", "q1", "a1", "q2", "a2", "lhs", "main", "g1", "g2", "h", "residual",
              "bound_ratio", "T", "tail_bound")


def error_scale(X: float, q1: int, q2: int) -> float:
    """X (log X)(log q1 X)(log q2 X), the size of the admissible error."""
    return X * math.log(X) * math.log(q1 * X) * math.log(q2 * X)


def theorem_report(
    X: float, classes: Classes, catalog: ZeroCatalog, rep: RepresentationTable
) -> TheoremReport:
    """Assemble both sides of the mean-value formula at one X >= 2."""
    if X < 2:
        raise InvalidArgumentError(f"X must be at least 2, got {X}")
    if rep.classes != classes:
        raise ConfigurationError("representation table built for different classes")
    norm = classes.phi1 * classes.phi2
    lhs = rep.mean_value(X)
    main = X * X / (2.0 * norm)
    G1 = g_term(X, classes.q1, classes.a1, catalog)
    G2 = g_term(X, classes.q2, classes.a2, catalog)
    H = h_term(X, classes, catalog)
    g_imag = max(abs(G1.value.imag), abs(G2.value.imag), abs(H.imag)) / norm
    for name, val in (("G1", G1.value), ("G2", G2.value)):
        if abs(val.imag) > 1e-6 * max(abs(val), 1.0):
            log.warning("%s at X=%g has imaginary part %.3e", name, X, val.imag)
    g1 = G1.value.real / norm
    g2 = G2.value.real / norm
    h = H.real / norm
    residual = lhs - main + g1 + g2 - h
    return TheoremReport(
        X=float(X),
        classes=classes,
        lhs=lhs,
        main_term=main,
        g_term_1=g1,
        g_term_2=g2,
        h_term=h,
        residual=residual,
        truncation_height=catalog.height,
        truncation_bound=(G1.tail_bound + G2.tail_bound) / norm,
        bound_ratio=residual / error_scale(X, classes.q1, classes.q2),
        g_imag=g_imag,
    )


def theorem_reports(
    samples, classes: Classes, catalog: ZeroCatalog, table: MangoldtTable
) -> list[TheoremReport]:
    samples = [float(x) for x in samples]
    rep = representation_fft(table, classes, int(math.floor(max(samples))))
    return [theorem_report(x, classes, catalog, rep) for x in samples]


def geometric_samples(xmin: float, xmax: float, count: int = 50) -> np.ndarray:
    return np.geomspace(xmin, xmax, count)


@dataclass(frozen=True)
class RuppelReport:
    X: float
    q: int
    a: int
    b: int
    lhs: float
    delta: float
    ruppel_main: float
    ruppel_residual: float
    ruppel_scale: float
    true_ruppel_main: float
    true_ruppel_residual: float
    theorem_residual: float

    @property
    def improvement(self) -> float:
        """|ruppel residual| / |theorem residual|."""
        return abs(self.ruppel_residual) / max(abs(self.theorem_residual), 1e-300)


def ruppel_comparison(
    X: float, q: int, a: int, b: int, catalog: ZeroCatalog, rep: RepresentationTable
) -> RuppelReport:
    """Residuals of the bare main term, the real-zero-augmented expansion and
    the full expansion with the oscillating G-terms."""
    classes = Classes(q, a, q, b)
    thm = theorem_report(X, classes, catalog, rep)
    phi = euler_phi(q)
    chars = list(build_group(q))
    betas = {c.label: catalog.real_zeros(c) for c in chars}
    all_betas = [beta for v in betas.values() for beta in v]
    delta = max(all_betas) if all_betas else 0.5

    single = []
    for c in chars:
        w = np.conj(c(a)) + np.conj(c(b))
        for beta in betas[c.label]:
            single.append(w * X ** (beta + 1) / (beta * (beta + 1)))
    double = []
    for c in chars:
        for d in chars:
            w = np.conj(c(a)) * np.conj(d(b))
            for x in betas[c.label]:
                for y in betas[d.label]:
                    double.append(w * complex(W_kernel(X, x, y)))
    main = X * X / (2.0 * phi * phi)
    true_main = main - _fsum_complex(np.array(single)).real / phi**2 + _fsum_complex(
        np.array(double)
    ).real / phi**2
    return RuppelReport(
        X=float(X),
        q=q,
        a=a,
        b=b,
        lhs=thm.lhs,
        delta=delta,
        ruppel_main=main,
        ruppel_residual=thm.lhs - main,
        ruppel_scale=X ** (1 + delta) * max(math.log(q), 1.0) ** 2,
        true_ruppel_main=true_main,
        true_ruppel_residual=thm.lhs - true_main,
        theorem_residual=thm.residual,
    )
