"""Exact arithmetic layer: von Mangoldt sieve and Chebyshev-type sums.

All sums over Lambda use the closed cutoff ``n <= x`` except :func:`psi_mu`,
which uses the strict cutoff ``n < x``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, InvalidResidueError, OutOfRangeError

SEGMENT_SIZE = 1 << 18


@dataclass(frozen=True, eq=False)
class MangoldtTable:
    """Values of the von Mangoldt function on ``0..limit``.

    ``values[0]`` is a zero pad so that ``values[n]`` is Lambda(n).
    """

    limit: int
    values: np.ndarray = field(repr=False)

    @cached_property
    def prefix(self) -> np.ndarray:
        # extended precision keeps psi(10^7) accurate to ~1e-12 relative
        acc = np.cumsum(self.values.astype(np.longdouble))
        return acc.astype(np.float64)

    def to_bytes(self) -> bytes:
        return struct.pack("<q", self.limit) + self.values.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "MangoldtTable":
        (limit,) = struct.unpack("<q", blob[:8])
        values = np.frombuffer(blob[8:], dtype="<f8").astype(np.float64)
        if values.size != limit + 1:
            raise InvalidArgumentError(
                f"corrupt table: header says {limit}, payload has {values.size - 1}"
            )
        return cls(limit, values)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "MangoldtTable":
        return cls.from_bytes(Path(path).read_bytes())


def _small_primes(n: int) -> np.ndarray:
    if n < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def sieve_mangoldt(limit: int, segment_size: int = SEGMENT_SIZE) -> MangoldtTable:
    """Tabulate Lambda(n) for ``1 <= n <= limit`` with a segmented sieve.

    Only the base primes up to sqrt(limit) are held in memory while marking
    composites; each segment is a boolean block of ``segment_size`` entries.
    """
    limit = int(limit)
    if limit < 2:
        raise InvalidArgumentError(f"limit must be >= 2, got {limit}")
    values = np.zeros(limit + 1, dtype=np.float64)
    base = _small_primes(math.isqrt(limit))

    for lo in range(2, limit + 1, segment_size):
        hi = min(lo + segment_size, limit + 1)
        is_prime = np.ones(hi - lo, dtype=bool)
        for p in base:
            if p * p >= hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            is_prime[start - lo :: p] = False
        idx = np.flatnonzero(is_prime) + lo
        values[idx] = np.log(idx.astype(np.float64))

    for p in base:
        logp = math.log(p)
        pk = p * p
        while pk <= limit:
            values[pk] = logp
            pk *= p
    return MangoldtTable(limit, values)


def _check_x(table: MangoldtTable, x: float) -> int:
    if x < 0:
        raise OutOfRangeError(f"x must be nonnegative, got {x}")
    if x > table.limit:
        raise OutOfRangeError(f"x={x} exceeds table limit {table.limit}")
    return int(math.floor(x))


def psi(table: MangoldtTable, x: float) -> float:
    """Chebyshev psi(x) = sum_{n <= x} Lambda(n)."""
    return float(table.prefix[_check_x(table, x)])


def psi_progression(table: MangoldtTable, x: float, q: int, a: int) -> float:
    """psi(x, q, a): the sum of Lambda(n) over n <= x with n = a (mod q)."""
    if q < 1:
        raise InvalidArgumentError(f"modulus must be positive, got {q}")
    if math.gcd(a, q) != 1:
        raise InvalidResidueError(f"gcd({a}, {q}) != 1")
    n = _check_x(table, x)
    start = a % q
    return math.fsum(table.values[start : n + 1 : q])


def _twisted_terms(table, n_max, chi):
    vals = table.values[1 : n_max + 1]
    n = np.arange(1, n_max + 1)
    return vals * chi.values[n % chi.modulus]


def _csum(terms: np.ndarray) -> complex:
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def psi_twisted(table: MangoldtTable, x: float, chi) -> complex:
    """psi(x, chi) = sum_{n <= x} chi(n) Lambda(n)."""
    n_max = _check_x(table, x)
    return _csum(_twisted_terms(table, n_max, chi))


def psi_mu(table: MangoldtTable, x: float, mu: float, chi) -> complex:
    """Fractional-power sum over n < x of chi(n) Lambda(n) (x - n)^(mu - 1)."""
    if not 0 < mu <= 1:
        raise InvalidArgumentError(f"mu must lie in (0, 1], got {mu}")
    _check_x(table, x)
    n_max = math.ceil(x) - 1
    if n_max < 1:
        return 0j
    terms = _twisted_terms(table, n_max, chi)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    return _csum(terms * (x - n) ** (mu - 1.0))


def cumulative_psi_mu(table: MangoldtTable, M: int, mu: float, chi) -> complex:
    """sum_{m=1}^{M} psi_mu(m, chi) in O(M) operations.

    Swapping the order of summation gives
    sum_{n<M} chi(n) Lambda(n) H(M - n) with H(j) = sum_{k<=j} k^(mu-1).
    """
    if not 0 < mu <= 1:
        raise InvalidArgumentError(f"mu must lie in (0, 1], got {mu}")
    M = int(M)
    _check_x(table, M)
    if M < 2:
        return 0j
    k = np.arange(1, M, dtype=np.float64)
    harmonic = np.cumsum((k ** (mu - 1.0)).astype(np.longdouble)).astype(np.float64)
    terms = _twisted_terms(table, M - 1, chi)
    # n = 1..M-1 pairs with H(M - n) = harmonic[M - n - 1]
    return _csum(terms * harmonic[::-1])


def euler_phi(q: int) -> int:
    if q < 1:
        raise InvalidArgumentError(f"phi undefined for {q}")
    result = q
    for p in prime_factors(q):
        result -= result // p
    return result


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; fine for moduli in the design envelope."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n: int) -> list[int]:
    return sorted(factorize(n))
