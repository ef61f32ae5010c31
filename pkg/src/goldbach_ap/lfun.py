"""Dirichlet L-functions: evaluation, zeros on the critical line, real zeros.

L(s, chi) is evaluated as a finite Dirichlet sum over n <= N q plus the tail
q^-s sum_a chi(a) zeta(s, N + a/q), where each shifted Hurwitz tail is given
by Euler-Maclaurin summation with ``EM_TERMS`` Bernoulli corrections. N is
chosen so that 2 pi (N + a/q) >= 3 |s + 2 EM_TERMS|, which makes consecutive
correction terms shrink by at least a factor of 9.

Zeros are located through the rotated completed function
Z(t) = exp(i theta(t)) L(1/2 + it, chi), real for primitive chi, and the
number of zeros is certified by the argument principle applied to the
completed L-function along the path 1/2 -> 2 -> 2 + iT -> 1/2 + iT (the
functional equation supplies the mirror half of the rectangle).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import brentq
from scipy.special import bernoulli

from .characters import DirichletCharacter, build_group, conductor_and_primitive, root_number
from .errors import (
    CertificationError,
    IngestionError,
    InvalidArgumentError,
    PoleError,
    TheoremViolationError,
)
from .special import log_gamma

log = logging.getLogger(__name__)

EM_TERMS = 16
_B2K = bernoulli(2 * EM_TERMS)[2::2]
_EM_COEF = np.array([_B2K[k - 1] / math.factorial(2 * k) for k in range(1, EM_TERMS + 1)])
_CHUNK = 1 << 21
SIGMA_RIGHT = 2.0


def _em_tail(s: np.ndarray, b: np.ndarray, drop_pole: bool) -> np.ndarray:
    """sum_{k >= 0} (b + k)^-s by Euler-Maclaurin; b has shape (A, 1), s (1, S).

    With ``drop_pole`` the term b^(1-s)/(s-1) is replaced by (b^(1-s) - 1)/(s-1),
    which is regular at s = 1; the constant cancels whenever the tails are
    combined with weights summing to zero.
    """
    logb = np.log(b)
    bs = np.exp(-s * logb)  # b^-s
    w = (1.0 - s) * logb
    if drop_pole:
        # (exp(w) - 1)/(s - 1) = -log b * expm1(w)/w
        ratio = np.where(np.abs(w) < 1e-300, 1.0, np.expm1(w) / np.where(w == 0, 1.0, w))
        lead = -logb * ratio
    else:
        lead = b * bs / (s - 1.0)
    total = lead + 0.5 * bs
    poch = s
    bpow = bs / b
    inv_b2 = 1.0 / (b * b)
    for k in range(1, EM_TERMS + 1):
        total = total + _EM_COEF[k - 1] * poch * bpow
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        bpow = bpow * inv_b2
    return total


def _cutoff(smax: float) -> float:
    return max(12.0, 3.0 * (smax + 2 * EM_TERMS) / (2.0 * math.pi))


def hurwitz_zeta(s, a: float):
    """Hurwitz zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin summation."""
    if not 0 < a <= 1:
        raise InvalidArgumentError(f"a must lie in (0, 1], got {a}")
    z = np.asarray(s, dtype=np.complex128)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(z == 1):
        raise PoleError("Hurwitz zeta has a pole at s = 1", pole=1)
    out = np.empty_like(z)
    for sl in _chunks(z, 1):
        zs = z[sl]
        N = math.ceil(_cutoff(float(np.abs(zs).max())))
        n = np.arange(N, dtype=np.float64)[:, None] + a
        head = _dirichlet_sum(np.ones(N), np.log(n[:, 0]), zs)
        tail = _em_tail(zs[None, :], np.array([[N + a]]), drop_pole=False)[0]
        out[sl] = head + tail
    return out[0] if scalar else out


def _chunks(z: np.ndarray, width: int):
    # keep (terms x points) matrices bounded; sort-free slicing
    mags = np.abs(z)
    step = max(1, int(_CHUNK / max(width * _cutoff(float(mags.max())), 1)))
    for i in range(0, z.size, step):
        yield slice(i, min(i + step, z.size))


def _dirichlet_sum(coef: np.ndarray, logn: np.ndarray, s: np.ndarray) -> np.ndarray:
    if np.isrealobj(coef) and np.all(s.imag == 0):
        return coef @ np.exp(-np.outer(logn, s.real))
    return coef @ np.exp(-np.outer(logn, s))


class LFunction:
    """Evaluator for L(s, chi) attached to one character (any modulus)."""

    def __init__(self, chi: DirichletCharacter):
        self.chi = chi
        self.q = chi.modulus
        self.principal = chi.is_principal
        res = np.flatnonzero(chi.values != 0)
        res[res == 0] = self.q  # residue class 0 only occurs for q = 1
        self._res = res.astype(np.float64)
        self._res_vals = chi.values[res % self.q]
        self._real = chi.is_real
        if self._real:
            self._res_vals = self._res_vals.real.copy()

    def __call__(self, s):
        z = np.asarray(s, dtype=np.complex128)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        if self.principal and np.any(z == 1):
            raise PoleError(f"L(s, {self.chi.label}) has a pole at s = 1", pole=1)
        out = np.empty_like(z)
        for sl in _chunks(z, self.q):
            out[sl] = self._eval(z[sl])
        if self._real and np.all(z.imag == 0):
            out = out.real.astype(np.complex128)
        return out[0] if scalar else out

    def _eval(self, s: np.ndarray) -> np.ndarray:
        q = self.q
        N = math.ceil(_cutoff(float(np.abs(s).max())))
        k = np.arange(N, dtype=np.float64)
        n = (k[:, None] * q + self._res[None, :]).ravel()
        coef = np.tile(self._res_vals, N)
        head = _dirichlet_sum(coef, np.log(n), s)
        b = (N + self._res / q)[:, None]
        tails = _em_tail(s[None, :], b, drop_pole=not self.principal)
        tail = np.exp(-s * math.log(q)) * (self._res_vals @ tails)
        return head + tail


@lru_cache(maxsize=256)
def _lfunction(chi: DirichletCharacter) -> LFunction:
    return LFunction(chi)


def l_value(s, chi: DirichletCharacter):
    """L(s, chi) for a scalar or array argument."""
    return _lfunction(chi)(s)


class CompletedL:
    """Phase data of the completed L-function of a primitive character."""

    def __init__(self, chi: DirichletCharacter):
        if not chi.is_primitive:
            raise InvalidArgumentError(f"{chi!r} is not primitive")
        self.chi = chi
        self.L = _lfunction(chi)
        self.q = chi.modulus
        self.a = chi.parity
        self.epsilon = root_number(chi)
        self._half_arg_eps = 0.5 * math.atan2(self.epsilon.imag, self.epsilon.real)
        self._log_q_pi = math.log(self.q / math.pi)

    def gamma_phase(self, s) -> np.ndarray:
        """Im of log[(q/pi)^((s+a)/2) Gamma((s+a)/2)]."""
        w = (np.asarray(s, dtype=np.complex128) + self.a) / 2.0
        return (w * self._log_q_pi + log_gamma(w)).imag

    def theta(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return self.gamma_phase(0.5 + 1j * t) - self._half_arg_eps

    def rotated(self, t) -> np.ndarray:
        """exp(i theta(t)) L(1/2 + it) as a complex array (imaginary part ~ 0)."""
        t = np.asarray(t, dtype=np.float64)
        return np.exp(1j * self.theta(t)) * self.L(0.5 + 1j * t)

    def Z(self, t):
        return self.rotated(t).real

    def completed(self, s):
        """Lambda(s, chi) = (q/pi)^((s+a)/2) Gamma((s+a)/2) L(s, chi)."""
        s = np.asarray(s, dtype=np.complex128)
        w = (s + self.a) / 2.0
        return np.exp(w * self._log_q_pi + log_gamma(w)) * self.L(s)


def _track_phase(f, s0: complex, s1: complex, initial: int = 32, max_rounds: int = 40) -> float:
    """Continuous change of arg f along the segment s0 -> s1."""
    u = np.linspace(0.0, 1.0, initial + 1)
    vals = f(s0 + (s1 - s0) * u)
    for _ in range(max_rounds):
        d = np.angle(vals[1:] / vals[:-1])
        mag = np.abs(vals)
        jump = np.maximum(mag[1:], mag[:-1]) / np.maximum(np.minimum(mag[1:], mag[:-1]), 1e-300)
        bad = (np.abs(d) > math.pi / 4) | (jump > 4.0)
        if not bad.any():
            return float(d.sum())
        mids = 0.5 * (u[:-1][bad] + u[1:][bad])
        if np.min(u[1:][bad] - u[:-1][bad]) < 1e-12:
            raise CertificationError(f"phase tracking stalled between {s0} and {s1}")
        new = f(s0 + (s1 - s0) * mids)
        u = np.concatenate([u, mids])
        vals = np.concatenate([vals, new])
        order = np.argsort(u)
        u, vals = u[order], vals[order]
    raise CertificationError(f"phase tracking did not converge between {s0} and {s1}")


def zero_count(chi: DirichletCharacter, T: float) -> int:
    """Number of zeros with 0 < gamma <= T of L(s, chi*) by the argument principle."""
    chi = conductor_and_primitive(chi)[1]
    comp = CompletedL(chi)
    top = 0.5 + 1j * T
    if chi.modulus == 1:
        # xi(s) = s(s-1)/2 pi^(-s/2) Gamma(s/2) zeta(s) is positive on [1/2, 2]
        right = SIGMA_RIGHT + 1j * T
        delta = float(np.angle(comp.L(right)))
        delta += _track_phase(comp.L, right, top)
        delta += math.pi  # arg s(s-1) from 2 to 1/2 + iT
        delta += float(comp.gamma_phase(top)) - float(comp.gamma_phase(SIGMA_RIGHT))
    else:
        delta = _track_phase(comp.L, 0.5 + 0j, SIGMA_RIGHT + 0j)
        right0 = complex(comp.L(SIGMA_RIGHT))
        right1 = complex(comp.L(SIGMA_RIGHT + 1j * T))
        delta += math.atan2(right1.imag, right1.real) - math.atan2(right0.imag, right0.real)
        delta += _track_phase(comp.L, SIGMA_RIGHT + 1j * T, top)
        delta += float(comp.gamma_phase(top)) - float(comp.gamma_phase(0.5))
    count = delta / math.pi
    nearest = round(count)
    if abs(count - nearest) > 0.2:
        raise CertificationError(
            f"argument principle for {chi.label} at T={T} gave non-integer {count:.4f}"
        )
    return int(nearest)


@dataclass(frozen=True)
class Zero:
    character_id: str
    ordinate: float
    kind: str  # "critical-line" or "real"
    real_position: float = 0.5
    certified_accuracy: float = 0.0

    @property
    def rho(self) -> complex:
        if self.kind == "real":
            return complex(self.real_position, 0.0)
        return complex(0.5, self.ordinate)


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Critical-line zeros 0 < gamma <= T of one primitive L-function."""

    character_id: str
    height_bound: float
    ordinates: np.ndarray = field(repr=False)
    count_certificate: int
    source: str = "computed"
    certified_accuracy: float = 1e-10

    @property
    def zeros(self) -> list[Zero]:
        return [
            Zero(self.character_id, float(g), "critical-line", 0.5, self.certified_accuracy)
            for g in self.ordinates
        ]

    def __len__(self) -> int:
        return int(self.ordinates.size)

    def truncate(self, T: float) -> "ZeroSet":
        if T > self.height_bound:
            raise InvalidArgumentError(f"cannot extend zero set from {self.height_bound} to {T}")
        keep = self.ordinates[self.ordinates <= T]
        return ZeroSet(self.character_id, T, keep, int(keep.size), self.source, self.certified_accuracy)


def _grid_step(q: int, T: float) -> float:
    spacing = 2.0 * math.pi / max(math.log(q * max(T, 10.0) / (2.0 * math.pi)), 1.0)
    return spacing / 8.0


def _sign_brackets(t: np.ndarray, z: np.ndarray) -> list[tuple[float, float]]:
    idx = np.flatnonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)
    return [(float(t[i]), float(t[i + 1])) for i in idx]


def _refine_suspects(t: np.ndarray, z: np.ndarray, comp: CompletedL, fine: int = 16):
    """Densify around local minima of |Z| without a sign change."""
    a = np.abs(z)
    s = np.sign(z)
    inner = np.arange(1, z.size - 1)
    local_min = (a[inner] <= a[inner - 1]) & (a[inner] <= a[inner + 1])
    same = (s[inner - 1] == s[inner]) & (s[inner] == s[inner + 1])
    cand = inner[local_min & same]
    if cand.size == 0:
        return t, z, False
    new_t = np.concatenate(
        [np.linspace(t[i - 1], t[i + 1], fine + 2)[1:-1] for i in cand]
    )
    new_t = np.setdiff1d(new_t, t)
    new_z = comp.Z(new_t)
    t = np.concatenate([t, new_t])
    z = np.concatenate([z, new_z])
    order = np.argsort(t)
    return t[order], z[order], True


def find_critical_zeros(
    chi: DirichletCharacter,
    T: float,
    *,
    xtol: float = 1e-11,
    max_rounds: int = 8,
) -> ZeroSet:
    """All zeros 1/2 + i gamma with 0 < gamma <= T of L(s, chi*).

    Imprimitive characters delegate to their inducing primitive character;
    zeros of the finitely many Euler factors lie on Re s = 0 and are trivial.

    Raises:
        CertificationError: if the bracketed count cannot be matched with the
            argument-principle count within the refinement budget.
    """
    if T > 1e4:
        raise InvalidArgumentError(f"height {T} beyond the supported envelope 1e4")
    chi = conductor_and_primitive(chi)[1]
    comp = CompletedL(chi)
    if T <= 0:
        return ZeroSet(chi.label, 0.0, np.empty(0), 0)
    certificate = zero_count(chi, T)

    h = _grid_step(chi.modulus, T)
    t = np.linspace(0.0, T, max(int(math.ceil(T / h)), 2) + 1)
    z = comp.Z(t)
    brackets = _sign_brackets(t, z)
    rounds = 0
    while len(brackets) < certificate and rounds < max_rounds:
        t, z, changed = _refine_suspects(t, z, comp)
        brackets = _sign_brackets(t, z)
        rounds += 1
        if not changed:
            break
    if len(brackets) != certificate:
        raise CertificationError(
            f"{chi.label}: bracketed {len(brackets)} zeros up to T={T}, "
            f"argument principle counts {certificate}"
        )

    def Zs(x):
        return float(comp.Z(x))

    roots = np.empty(len(brackets))
    worst = xtol
    for i, (lo, hi) in enumerate(brackets):
        r = brentq(Zs, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
        delta = xtol
        while Zs(r - delta) * Zs(r + delta) > 0:
            delta *= 10
            if delta > 1e-9:
                raise CertificationError(f"{chi.label}: zero near {r} failed local sign check")
        worst = max(worst, delta)
        roots[i] = r
    return ZeroSet(chi.label, float(T), roots, certificate, "computed", worst)


def conjugate_ordinates(zs: ZeroSet) -> np.ndarray:
    return -zs.ordinates


def scan_real_zeros(
    chi: DirichletCharacter, grid: int = 10_000, *, include_lower: bool = False
) -> list[Zero]:
    """Real zeros beta in [1/2, 1) of L(s, chi) for a real character.

    Euler factors do not vanish for Re s > 0, so the scan runs on the inducing
    primitive character. Complex characters are not scanned. With
    ``include_lower`` zeros in (0, 1/2) are also located and logged.
    """
    if grid < 1000:
        raise InvalidArgumentError(f"grid must be at least 1000, got {grid}")
    if not chi.is_real:
        return []
    prim = conductor_and_primitive(chi)[1]
    found = _scan_primitive(prim, grid, 0.5, 1.0)
    if include_lower:
        lower = _scan_primitive(prim, grid, 1.0 / grid, 0.5)
        for beta in lower:
            log.info("real zero of L(s, %s) below 1/2 at %.12f", prim.label, beta)
    return [Zero(chi.label, 0.0, "real", b, 1e-12) for b in found]


@lru_cache(maxsize=None)
def _scan_primitive(chi: DirichletCharacter, grid: int, lo: float, hi: float) -> tuple[float, ...]:
    L = _lfunction(chi)
    sigma = lo + (hi - lo) * np.arange(grid) / grid
    vals = L(sigma).real
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    exact = np.flatnonzero(vals == 0)

    def f(x):
        return float(L(x).real)

    roots = [float(sigma[i]) for i in exact]
    for i in idx:
        roots.append(brentq(f, sigma[i], sigma[i + 1], xtol=1e-14))
    if roots:
        log.warning("L(s, %s) has real zeros %s in [%g, %g)", chi.label, roots, lo, hi)
    return tuple(sorted(roots))


@dataclass(frozen=True)
class SiegelReport:
    modulus: int
    landau_constant_c1: float
    offender: tuple[str, float] | None = None
    scanned: tuple[str, ...] = ()

    @property
    def threshold(self) -> float:
        return 1.0 - self.landau_constant_c1 / math.log(self.modulus) if self.modulus > 1 else 1.0


def siegel_audit(q: int, c1: float = 0.1, grid: int = 10_000) -> SiegelReport:
    """Flag real zeros above 1 - c1/log q among the real characters mod q.

    Raises:
        TheoremViolationError: if two characters (or two zeros of one
            character) exceed the threshold, which Landau's theorem forbids.
    """
    if c1 <= 0:
        raise InvalidArgumentError(f"c1 must be positive, got {c1}")
    if q < 1:
        raise InvalidArgumentError(f"modulus must be positive, got {q}")
    if q == 1:
        return SiegelReport(1, c1)
    threshold = 1.0 - c1 / math.log(q)
    offenders = []
    scanned = []
    for chi in build_group(q):
        if not chi.is_real:
            continue
        scanned.append(chi.label)
        siegel = [z.real_position for z in scan_real_zeros(chi, grid) if z.real_position > threshold]
        if len(siegel) > 1:
            raise TheoremViolationError(f"{chi.label} has {len(siegel)} Siegel zeros")
        if siegel:
            offenders.append((chi.label, siegel[0]))
    if len(offenders) > 1:
        raise TheoremViolationError(f"modulus {q} has two characters with Siegel zeros: {offenders}")
    return SiegelReport(q, c1, offenders[0] if offenders else None, tuple(scanned))


def log_derivative_at_one(chi: DirichletCharacter, h: float = 1.0 / 16) -> complex:
    """L'/L(1, chi) by Richardson-extrapolated central differences.

    Three step sizes h, h/2, h/4 are combined to cancel the h^2 and h^4 error
    terms; the residual truncation error is O(h^6).
    """
    if chi.is_principal:
        raise InvalidArgumentError("L'/L(1, chi) is undefined for principal characters")
    L = _lfunction(chi)
    steps = np.array([h, h / 2, h / 4])
    pts = np.concatenate([1 + steps, 1 - steps])
    vals = L(pts.astype(np.complex128))
    d = (vals[:3] - vals[3:]) / (2 * steps)
    d1 = (4 * d[1:] - d[:-1]) / 3
    d2 = (16 * d1[1] - d1[0]) / 15
    return complex(d2 / L(np.complex128(1.0)))


def _parse_ordinates(lines) -> np.ndarray:
    out = []
    prev = 0.0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            g = float(line)
        except ValueError:
            raise IngestionError(f"line {lineno}: cannot parse {line!r}", line=lineno) from None
        if not math.isfinite(g) or g <= prev:
            raise IngestionError(
                f"line {lineno}: ordinate {line} is not positive and increasing", line=lineno
            )
        out.append(g)
        prev = g
    return np.array(out, dtype=np.float64)


def ingest_zero_table(
    path, chi: DirichletCharacter, *, recertify: bool = False, delta: float = 1e-5
) -> ZeroSet:
    """Read a plain-text table of positive ordinates (one per line)."""
    prim = conductor_and_primitive(chi)[1]
    with open(path, encoding="utf-8") as fh:
        ords = _parse_ordinates(fh)
    if recertify and ords.size:
        comp = CompletedL(prim)
        left = comp.Z(ords - delta)
        right = comp.Z(ords + delta)
        bad = np.flatnonzero(left * right > 0)
        if bad.size:
            g = ords[bad[0]]
            raise IngestionError(f"ordinate {g} fails the local sign check for {prim.label}")
    height = float(ords[-1]) if ords.size else 0.0
    return ZeroSet(prim.label, height, ords, int(ords.size), "ingested", delta if recertify else 0.0)


def format_zero_table(zs: ZeroSet) -> str:
    """Plain-text zero table: '#' metadata lines then one ordinate per line."""
    lines = [
        f"# character {zs.character_id}",
        f"# height {zs.height_bound!r}",
        f"# count {zs.count_certificate}",
    ]
    lines += [f"{g:.12f}" for g in zs.ordinates]
    return "\n".join(lines) + "\n"


def write_zero_table(zs: ZeroSet, path) -> None:
    Path(path).write_text(format_zero_table(zs), encoding="utf-8")
