"""Circle-method harness: damped exponential sums and the integral lemmas.

Every integral over alpha in [-1/2, 1/2] with z = 1/N - 2 pi i alpha is
evaluated numerically and compared with its asymptotic expansion. Two
integrators are used:

* ``hankel_integral`` integrates e(-n alpha) z^(-mu) with QUADPACK's
  Fourier-weighted rule (QAWO), which handles the oscillation exactly;
* the remaining integrals sample their integrand on a uniform grid
  alpha = k / M and apply composite Simpson. Sums over n come from a single
  FFT after folding the coefficients modulo M, which is exact at the grid
  points. M is chosen so that the highest non-negligible frequency and the
  peak of z^(-mu), of width about 1 / (2 pi N), are both resolved; the
  difference with the M / 2 result is reported as an error estimate.

All comparisons report ratios against a chosen normalisation and never
assert a hidden constant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .arith import MangoldtTable, cumulative_psi_mu, psi_mu
from .characters import DirichletCharacter, build_group, conductor_and_primitive, parse_label
from .errors import InvalidArgumentError, QuadratureError, TableTooSmallError
from .goldbach import g_character
from .lfun import log_derivative_at_one
from .special import gamma, log_gamma
from .zeros import ZeroCatalog

TWO_PI = 2.0 * math.pi
WEIGHT_FLOOR = 1e-18


def cutoff(N: int) -> int:
    """Index beyond which e^(-n/N) < 1e-18."""
    return math.ceil(N * math.log(1.0 / WEIGHT_FLOOR))


@dataclass(frozen=True)
class ThetaPoint:
    alpha: float
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise InvalidArgumentError(f"N must be positive, got {self.N}")
        if abs(self.alpha) > 0.5:
            raise InvalidArgumentError(f"alpha must lie in [-1/2, 1/2], got {self.alpha}")

    @property
    def z(self) -> complex:
        return complex(1.0 / self.N, -TWO_PI * self.alpha)


def z_of(alpha, N: int):
    return 1.0 / N - 1j * TWO_PI * np.asarray(alpha, dtype=np.float64)


def _coefficients(N: int, chi: DirichletCharacter | None, table: MangoldtTable) -> np.ndarray:
    """c_n = chi(n) Lambda(n) e^(-n/N) for n = 0..cutoff(N)."""
    L = cutoff(N)
    if table.limit < L:
        raise TableTooSmallError(f"damped sum at N={N} needs table limit {L}, have {table.limit}")
    n = np.arange(L + 1)
    c = table.values[: L + 1] * np.exp(-n / N)
    if chi is not None:
        c = c * chi.values[n % chi.modulus]
    return c


def _unit_phase(n: np.ndarray, alpha: float) -> np.ndarray:
    x = n * alpha
    x = x - np.round(x)
    t = TWO_PI * x
    c, s = np.cos(t), np.sin(t)
    # exact values at multiples of a quarter turn
    s[(2 * x) == np.round(2 * x)] = 0.0
    c[((4 * x) == np.round(4 * x)) & ((2 * x) != np.round(2 * x))] = 0.0
    return c + 1j * s


def s_tilde(point: ThetaPoint, chi: DirichletCharacter | None, table: MangoldtTable) -> complex:
    """sum_n chi(n) Lambda(n) e^(-n/N) e(n alpha), summed directly."""
    c = _coefficients(point.N, chi, table)
    nz = np.flatnonzero(c)
    terms = c[nz] * _unit_phase(nz.astype(np.float64), point.alpha)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def alpha_grid(M: int) -> np.ndarray:
    """alpha_k = k / M for k = -M/2 .. M/2 (M even)."""
    return np.arange(-M // 2, M // 2 + 1) / M


def s_tilde_grid(N: int, chi: DirichletCharacter | None, table: MangoldtTable, M: int) -> np.ndarray:
    """S~ at every point of ``alpha_grid(M)``, by folding coefficients mod M."""
    if M % 2:
        raise InvalidArgumentError("grid size must be even")
    c = _coefficients(N, chi, table)
    r = np.arange(c.size) % M
    folded = np.bincount(r, weights=c.real, minlength=M) + 1j * np.bincount(
        r, weights=c.imag, minlength=M
    )
    # sum_r C_r e(r k / M) = M * ifft(C)[k]
    full = np.fft.ifft(folded) * M
    k = np.arange(-M // 2, M // 2 + 1) % M
    return full[k]


def t_sum(y: float, alpha):
    """T(y, alpha) = sum_{1 <= m <= y} e(m alpha), in closed form."""
    if y < 0:
        raise InvalidArgumentError(f"y must be nonnegative, got {y}")
    K = math.floor(y)
    a = np.asarray(alpha, dtype=np.float64)
    frac = a - np.round(a)
    s = np.sin(math.pi * frac)
    safe = np.where(s == 0, 1.0, s)
    ratio = np.where(s == 0, float(K), np.sin(math.pi * K * frac) / safe)
    half = 0.5 * (K + 1) * frac
    half = half - np.round(half)
    out = (np.cos(TWO_PI * half) + 1j * np.sin(TWO_PI * half)) * ratio
    return complex(out) if out.ndim == 0 else out


def _pow2_at_least(n: float) -> int:
    return 1 << max(8, math.ceil(math.log2(max(n, 2))))


def _simpson(f: np.ndarray, h: float) -> complex:
    if (f.size - 1) % 2:
        raise ValueError("Simpson needs an even number of intervals")
    w = np.ones(f.size)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return complex(np.sum(w * f) * h / 3)


def _integrate(f: np.ndarray, M: int, lo: int, hi: int) -> tuple[complex, float]:
    """Simpson over grid indices lo..hi (offsets from -M/2) plus an error estimate."""
    seg = f[lo : hi + 1]
    fine = _simpson(seg, 1.0 / M)
    if (hi - lo) % 4 == 0:
        coarse = _simpson(seg[::2], 2.0 / M)
        err = abs(fine - coarse) / 15
    else:
        err = float("nan")
    return fine, err


@dataclass(frozen=True)
class Verification:
    """One row of the residual log."""

    job: str
    params: dict
    lhs: complex
    rhs: complex
    normalization: float
    quadrature_error: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def residual(self) -> complex:
        return self.lhs - self.rhs

    @property
    def ratio(self) -> float:
        return abs(self.residual) / self.normalization

    def row(self) -> dict:
        p = ";".join(f"{k}={v}" for k, v in self.params.items())
        return {
            "job": self.job,
            "params": p,
            "lhs_re": self.lhs.real,
            "lhs_im": self.lhs.imag,
            "rhs_re": self.rhs.real,
            "rhs_im": self.rhs.imag,
            "residual": abs(self.residual),
            "normalization": self.normalization,
            "ratio": self.ratio,
        }


RESIDUAL_FIELDS = ("job", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual",
                   "normalization", "ratio")


@dataclass(frozen=True)
class ExplicitFormulaResidual:
    point: ThetaPoint
    character_id: str
    lhs: complex
    rhs: complex
    height: float
    normalized: float
    normalized_strict: float

    @property
    def residual(self) -> complex:
        return self.lhs - self.rhs


def zero_sum_gamma(z: complex, rhos: np.ndarray) -> complex:
    """sum_rho z^(-rho) Gamma(rho) on the principal branch of log z."""
    if rhos.size == 0:
        return 0j
    terms = np.exp(log_gamma(rhos) - rhos * np.log(z))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def verify_explicit_formula(
    point: ThetaPoint,
    chi: DirichletCharacter,
    catalog: ZeroCatalog,
    table: MangoldtTable,
    height: float | None = None,
) -> ExplicitFormulaResidual:
    """Compare S~(alpha, chi) with its truncated zero expansion.

    For q = 1 the expansion is 1/z - sum_rho z^-rho Gamma(rho); for q >= 2 it
    is -sum_rho z^-rho Gamma(rho) + L'/L(1, conj chi). Real zeros are part of
    the sum over rho. ``height`` truncates below the catalog height; 0 drops
    every complex zero.
    """
    if not chi.is_primitive:
        raise InvalidArgumentError(f"{chi!r} is not primitive")
    z = point.z
    T = catalog.height if height is None else float(height)
    rhos = catalog.critical_rhos(chi)
    rhos = rhos[np.abs(rhos.imag) <= T]
    betas = np.asarray(catalog.real_zeros(chi), dtype=np.complex128)
    rhs = -zero_sum_gamma(z, np.concatenate([rhos, betas]))
    if chi.modulus == 1:
        rhs += 1.0 / z
    else:
        rhs += log_derivative_at_one(chi.conj())
    lhs = s_tilde(point, chi if chi.modulus > 1 else None, table)
    q, N = chi.modulus, point.N
    strict = math.log(q * N)
    res = abs(lhs - rhs)
    return ExplicitFormulaResidual(
        point=point,
        character_id=chi.label,
        lhs=lhs,
        rhs=rhs,
        height=T,
        normalized=res / (math.sqrt(N) * strict),
        normalized_strict=res / strict,
    )


@dataclass(frozen=True)
class HankelResult:
    n: int
    mu: float
    N: int
    value: complex
    predicted: float
    envelope: float
    error_estimate: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.predicted)

    @property
    def within_envelope(self) -> bool:
        return self.deviation <= self.envelope


def _quad(f, a, b, weight=None, wvar=None, epsabs=1e-12, limit=2000, accept=1e-10):
    """QUADPACK with warnings suppressed; fails only if the error estimate
    exceeds ``accept``."""
    kw = {"epsabs": epsabs, "epsrel": 1e-14, "limit": limit}
    if weight is not None:
        kw.update(weight=weight, wvar=wvar)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v, e = integrate.quad(f, a, b, **kw)
    if not (math.isfinite(v) and e <= accept):
        raise QuadratureError(f"quadrature on [{a}, {b}] reached error {e:.2e} > {accept:.0e}")
    return v, e


def hankel_integral(n: int, mu: float, N: int, epsabs: float = 1e-12) -> HankelResult:
    """int_{-1/2}^{1/2} e(-n alpha) z^(-mu) d alpha with its predicted value.

    Since z(-alpha) is the conjugate of z(alpha), the integral is real and
    equals 2 int_0^{1/2} (Re z^-mu cos 2 pi n a + Im z^-mu sin 2 pi n a) da.
    Predicted value: e^(-n/N) n^(mu-1) / Gamma(mu) for n > 0, and 0 otherwise;
    envelope 2^mu / |n| for n != 0 and log N for n = 0.
    """
    n = int(n)
    if not 0 < mu <= 2:
        raise InvalidArgumentError(f"mu must lie in (0, 2], got {mu}")
    if n == 0 and mu > 1:
        raise InvalidArgumentError("n = 0 requires 0 < mu <= 1")
    if N < 2:
        raise InvalidArgumentError(f"N must be at least 2, got {N}")

    def re(a):
        return (complex(1.0 / N, -TWO_PI * a) ** -mu).real

    def im(a):
        return (complex(1.0 / N, -TWO_PI * a) ** -mu).imag

    # split off the peak of width ~1/(2 pi N) at the origin
    edges = [0.0, 1.0 / N, 8.0 / N, 0.5] if N > 16 else [0.0, 0.5]
    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if n == 0:
            v, e = _quad(re, a, b, epsabs=epsabs)
            total += v
            err += e
        else:
            w = TWO_PI * n
            v1, e1 = _quad(re, a, b, weight="cos", wvar=w, epsabs=epsabs)
            v2, e2 = _quad(im, a, b, weight="sin", wvar=w, epsabs=epsabs)
            total += v1 + v2
            err += e1 + e2
    value = 2.0 * total
    if n > 0:
        predicted = math.exp(-n / N) * n ** (mu - 1) / math.gamma(mu)
    else:
        predicted = 0.0
    envelope = math.log(N) if n == 0 else 2.0**mu / abs(n)
    return HankelResult(n, mu, N, complex(value, 0.0), predicted, envelope, 2.0 * err)


def _grid_size(N: int, y: float, per_period: int = 128) -> int:
    return _pow2_at_least(per_period * max(N, y))


def verify_t_detect(y: float, mu: float, N: int, M: int | None = None) -> Verification:
    """int T(y,-alpha) z^-mu d alpha against (1/Gamma(mu)) sum_{m<=y} e^(-m/N) m^(mu-1).

    Normalisation: log y.
    """
    if not y > 2:
        raise InvalidArgumentError(f"y must exceed 2, got {y}")
    if not 0 < mu <= 2:
        raise InvalidArgumentError(f"mu must lie in (0, 2], got {mu}")
    if y > 20 * N:
        raise InvalidArgumentError(f"y={y} beyond the supported range 20 N")
    M = M or _grid_size(N, y)
    a = alpha_grid(M)
    f = t_sum(y, -a) * np.exp(-mu * np.log(z_of(a, N)))
    lhs, err = _integrate(f, M, 0, M)
    m = np.arange(1, math.floor(y) + 1, dtype=np.float64)
    rhs = math.fsum(np.exp(-m / N) * m ** (mu - 1)) / math.gamma(mu)
    return Verification("t_detect", {"y": y, "mu": mu, "N": N}, lhs, complex(rhs), math.log(y), err)


def verify_detect(
    y: float, mu: float, chi: DirichletCharacter | None, N: int, table: MangoldtTable,
    M: int | None = None,
) -> Verification:
    """int T(y,-alpha) S~(alpha,chi) z^-mu d alpha against
    (1/Gamma(mu)) sum_{m<=y} e^(-m/N) psi_mu(m, chi). Normalisation: N log(yN)."""
    if not y > 2:
        raise InvalidArgumentError(f"y must exceed 2, got {y}")
    if not 0 < mu <= 1:
        raise InvalidArgumentError(f"mu must lie in (0, 1], got {mu}")
    if y > N:
        raise InvalidArgumentError(f"y={y} must not exceed N={N}")
    chi = chi or build_group(1).principal
    M = M or _grid_size(N, y)
    a = alpha_grid(M)
    S = s_tilde_grid(N, chi, table, M)
    f = t_sum(y, -a) * S * np.exp(-mu * np.log(z_of(a, N)))
    lhs, err = _integrate(f, M, 0, M)
    terms = [math.exp(-m / N) * psi_mu(table, m, mu, chi) for m in range(1, math.floor(y) + 1)]
    terms = np.array(terms, dtype=np.complex128)
    rhs = complex(math.fsum(terms.real), math.fsum(terms.imag)) / math.gamma(mu)
    params = {"y": y, "mu": mu, "chi": chi.label, "N": N}
    return Verification("detect", params, lhs, rhs, N * math.log(y * N), err)


@dataclass(frozen=True)
class Panel:
    lo: float
    hi: float
    integral: float


@dataclass(frozen=True)
class MeanSquareResult:
    character_id: str
    N: int
    xi: float
    integral: float
    ratio: float
    error_estimate: float
    panels: tuple[Panel, ...]


def residual_sum(
    alpha: np.ndarray, N: int, chi: DirichletCharacter, S: np.ndarray, betas
) -> np.ndarray:
    """R~(alpha, chi) = S~ - E(chi)/z + sum_beta Gamma(beta) z^-beta."""
    z = z_of(alpha, N)
    R = S.copy()
    if chi.is_principal:
        R -= 1.0 / z
    for beta in betas:
        R += float(gamma(beta).real) * np.exp(-beta * np.log(z))
    return R


def mean_square(
    chi: DirichletCharacter,
    N: int,
    xi: float,
    catalog: ZeroCatalog | None,
    table: MangoldtTable,
    M: int | None = None,
) -> MeanSquareResult:
    """int_{-xi}^{xi} |R~(alpha, chi)|^2 d alpha over dyadic panels.

    Panels are [0, 1/N] and (2^k/N, 2^(k+1)/N] up to xi, mirrored to negative
    alpha; their endpoints are rounded to even grid indices, so ``xi`` in the
    result is the value actually integrated. The ratio is taken against
    N xi (log qN)^2.
    """
    if not 0 < xi <= 0.5:
        raise InvalidArgumentError(f"xi must lie in (0, 1/2], got {xi}")
    M = M or _grid_size(N, 1)
    a = alpha_grid(M)
    betas = catalog.real_zeros(chi) if catalog is not None else []
    R = residual_sum(a, N, chi, s_tilde_grid(N, chi, table, M), betas)
    f = np.abs(R) ** 2
    c = M // 2  # index of alpha = 0

    def idx(x: float) -> int:
        return max(2, 2 * round(x * M / 2))

    top = idx(xi)
    bounds = [0]
    edge = 1.0 / N
    while idx(edge) < top:
        if idx(edge) > bounds[-1]:
            bounds.append(idx(edge))
        edge *= 2
    bounds.append(top)
    panels = []
    total = 0.0
    err = 0.0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        right, e1 = _integrate(f, M, c + lo, c + hi)
        left, e2 = _integrate(f, M, c - hi, c - lo)
        v = right.real + left.real
        panels.append(Panel(lo / M, hi / M, v))
        total += v
        if not math.isnan(e1 + e2):
            err += e1 + e2
    xi_eff = top / M
    scale = N * xi_eff * math.log(chi.modulus * N) ** 2
    return MeanSquareResult(chi.label, N, xi_eff, total, total / scale, err, tuple(panels))


def verify_cal_osc(
    M: int, mu: float, chi: DirichletCharacter, catalog: ZeroCatalog, table: MangoldtTable
) -> Verification:
    """sum_{m<=M} psi_mu(m, chi) against
    E(chi) M^(mu+1)/(mu(mu+1)) - G^mu(M, chi) + (M^mu/mu) L'/L(1, conj chi*).

    The L'/L term enters only for nonprincipal chi. Normalisation:
    M log(2q) log M.
    """
    if M < 2:
        raise InvalidArgumentError(f"M must be at least 2, got {M}")
    if not 0.5 < mu <= 1:
        raise InvalidArgumentError(f"mu must lie in (1/2, 1], got {mu}")
    lhs = cumulative_psi_mu(table, M, mu, chi)
    rhs = -g_character(float(M), chi, catalog, mu)
    if chi.is_principal:
        rhs += M ** (mu + 1) / (mu * (mu + 1))
    else:
        prim = conductor_and_primitive(chi)[1]
        rhs += M**mu / mu * log_derivative_at_one(prim.conj())
    q = chi.modulus
    params = {"M": M, "mu": mu, "chi": chi.label, "T": catalog.height}
    return Verification("cal_osc", params, lhs, rhs, M * math.log(2 * q) * math.log(M))


HANKEL_GRID = {
    "n": (1, -1, 20, -20, 50, -50, 0),
    "mu": (0.5, 1.0, 1.5, 2.0),
    "N": (100, 1000),
}
T_DETECT_CASES = ((100, 1.0, 100), (5, 2.0, 100), (2.5, 1.0, 100))
DETECT_CASES = ((200, 1.0, "1.0", 200), (100, 0.5, "3.1", 200), (3, 1.0, "1.0", 200))
CAL_OSC_CASES = ((10_000, 1.0, "1.0"), (1000, 0.75, "4.1"), (2, 1.0, "1.0"))


def hankel_cases():
    """Every admissible (n, mu, N) of HANKEL_GRID; n = 0 needs mu <= 1."""
    for n in HANKEL_GRID["n"]:
        for mu in HANKEL_GRID["mu"]:
            if n == 0 and mu > 1:
                continue
            for N in HANKEL_GRID["N"]:
                yield n, mu, N


def hankel_verification(n: int, mu: float, N: int) -> Verification:
    h = hankel_integral(n, mu, N)
    return Verification("hankel", {"n": n, "mu": mu, "N": N}, h.value, complex(h.predicted),
                        h.envelope, h.error_estimate)


def lemma_suite(table: MangoldtTable, catalog: ZeroCatalog) -> list[Verification]:
    """Run the Hankel grid and the example grids of the three summation lemmas."""
    out = [hankel_verification(*case) for case in hankel_cases()]
    out += [verify_t_detect(y, mu, N) for y, mu, N in T_DETECT_CASES]
    out += [verify_detect(y, mu, parse_label(lab), N, table) for y, mu, lab, N in DETECT_CASES]
    out += [verify_cal_osc(M, mu, parse_label(lab), catalog, table) for M, mu, lab in CAL_OSC_CASES]
    return out
