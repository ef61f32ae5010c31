"""Dirichlet character groups.

Generators are fixed so that character labels are reproducible:

* odd prime power p^k: the smallest primitive root modulo p^k;
* 4: the class of -1;
* 2^k with k >= 3: the classes of -1 and 5, in that order.

Components are ordered by increasing prime. A character is identified by its
exponent vector ``e`` (chi(g_j) = exp(2 pi i e_j / ord_j)) and labelled
``"q.index"`` where ``index`` is the lexicographic rank of ``e``. Index 0 is
always the principal character.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .arith import euler_phi, factorize
from .errors import InvalidArgumentError


@dataclass(frozen=True)
class _Component:
    prime: int
    power: int  # p^k
    generators: tuple[int, ...]  # generators modulo p^k
    orders: tuple[int, ...]
    logs: dict[int, tuple[int, ...]] = field(repr=False, compare=False)


def _primitive_root(p: int, pk: int) -> int:
    phi = pk // p * (p - 1)
    factors = list(factorize(phi))
    for g in range(2, pk):
        if g % p == 0:
            continue
        if all(pow(g, phi // r, pk) != 1 for r in factors):
            return g
    raise AssertionError(f"no primitive root mod {pk}")


def _component(p: int, k: int) -> _Component | None:
    pk = p**k
    if p == 2:
        if k == 1:
            return None
        if k == 2:
            return _Component(2, 4, (3,), (2,), {1: (0,), 3: (1,)})
        order5 = pk // 4
        logs = {}
        x = 1
        for b in range(order5):
            logs[x] = (0, b)
            logs[(-x) % pk] = (1, b)
            x = x * 5 % pk
        return _Component(2, pk, (pk - 1, 5), (2, order5), logs)
    g = _primitive_root(p, pk)
    phi = pk // p * (p - 1)
    logs = {}
    x = 1
    for j in range(phi):
        logs[x] = (j,)
        x = x * g % pk
    return _Component(p, pk, (g,), (phi,), logs)


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    """A Dirichlet character modulo ``modulus``.

    ``angles[n]`` holds the exact phase numerator: chi(n) = e(angles[n] / order)
    for units, and ``angles[n] = -1`` marks n not coprime to the modulus.
    """

    modulus: int
    index: int
    exponents: tuple[int, ...]
    order: int
    angles: np.ndarray = field(repr=False)
    conductor: int
    group: "CharacterGroup" = field(repr=False)

    @cached_property
    def values(self) -> np.ndarray:
        units = self.angles >= 0
        out = np.zeros(self.modulus, dtype=np.complex128)
        theta = 2.0 * np.pi * self.angles[units] / self.order
        out[units] = np.cos(theta) + 1j * np.sin(theta)
        # exact values for the real characters and the quarter turns
        quarter = (4 * self.angles[units]) % self.order == 0
        if quarter.any():
            k = (4 * self.angles[units][quarter] // self.order) % 4
            out_units = out[units]
            out_units[quarter] = np.array([1, 1j, -1, -1j])[k]
            out[units] = out_units
        return out

    @property
    def label(self) -> str:
        return f"{self.modulus}.{self.index}"

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_real(self) -> bool:
        return bool(np.all((2 * self.angles[self.angles >= 0]) % self.order == 0))

    @property
    def parity(self) -> int:
        if self.modulus <= 2:
            return 0
        a = self.angles[self.modulus - 1]
        return int((2 * a // self.order) % 2)

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    def __repr__(self) -> str:
        return f"DirichletCharacter({self.label}, conductor={self.conductor})"

    def conj(self) -> "DirichletCharacter":
        neg = tuple((-e) % o for e, o in zip(self.exponents, self.group.orders))
        return self.group.by_exponents(neg)

    def primitive(self) -> "DirichletCharacter":
        return conductor_and_primitive(self)[1]

    def angle_fraction(self, n: int) -> tuple[int, int] | None:
        a = int(self.angles[n % self.modulus])
        if a < 0:
            return None
        return a, self.order


class CharacterGroup:
    """All phi(q) characters modulo q, indexed lexicographically."""

    def __init__(self, q: int):
        if q < 1:
            raise InvalidArgumentError(f"modulus must be positive, got {q}")
        self.modulus = q
        self.phi = euler_phi(q)
        comps = [_component(p, k) for p, k in sorted(factorize(q).items())]
        self.components = [c for c in comps if c is not None]
        self.orders = tuple(o for c in self.components for o in c.orders)
        self.exponent = math.lcm(*self.orders) if self.orders else 1

        # discrete-log vector of every residue, or None for non-units
        self._logs: list[tuple[int, ...] | None] = []
        for n in range(q):
            if math.gcd(n, q) != 1:
                self._logs.append(None)
                continue
            vec: tuple[int, ...] = ()
            for c in self.components:
                vec += c.logs[n % c.power]
            self._logs.append(vec)

        self.characters = [
            self._make(i, e)
            for i, e in enumerate(itertools.product(*(range(o) for o in self.orders)))
        ]
        self._by_exp = {ch.exponents: ch for ch in self.characters}

    def _make(self, index: int, exps: tuple[int, ...]) -> DirichletCharacter:
        L = self.exponent
        weights = [L // o for o in self.orders]
        angles = np.full(self.modulus, -1, dtype=np.int64)
        for n, vec in enumerate(self._logs):
            if vec is None:
                continue
            angles[n] = sum(e * l * w for e, l, w in zip(exps, vec, weights)) % L
        if self.modulus == 1:
            angles[0] = 0
        return DirichletCharacter(
            modulus=self.modulus,
            index=index,
            exponents=exps,
            order=L,
            angles=angles,
            conductor=self._conductor(exps),
            group=self,
        )

    def _conductor(self, exps: tuple[int, ...]) -> int:
        cond = 1
        pos = 0
        for c in self.components:
            width = len(c.orders)
            e = exps[pos : pos + width]
            pos += width
            p, pk = c.prime, c.power
            k = round(math.log(pk, p))
            if p != 2:
                if e[0] == 0:
                    continue
                # trivial on 1 + p^j Z  <=>  e * p^(j-1) = 0 mod p^(k-1)
                j = 1
                while (e[0] * p ** (j - 1)) % p ** (k - 1):
                    j += 1
                cond *= p**j
            elif len(e) == 1:  # modulus 4
                cond *= 4 if e[0] else 1
            else:
                e_minus, e_five = e
                if e_five == 0:
                    cond *= 4 if e_minus else 1
                    continue
                j = 3
                while (e_five * 2 ** (j - 2)) % 2 ** (k - 2):
                    j += 1
                cond *= 2**j
        return cond

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def __getitem__(self, index: int) -> DirichletCharacter:
        return self.characters[index]

    def by_exponents(self, exps: tuple[int, ...]) -> DirichletCharacter:
        return self._by_exp[tuple(exps)]

    @property
    def principal(self) -> DirichletCharacter:
        return self.characters[0]

    def generator_residues(self) -> list[int]:
        """CRT lifts of the component generators to residues mod q."""
        out = []
        for c in self.components:
            rest = self.modulus // c.power
            for g in c.generators:
                # x = g mod p^k, x = 1 mod rest
                if rest == 1:
                    out.append(g % self.modulus)
                    continue
                inv = pow(rest, -1, c.power)
                x = (1 + rest * ((g - 1) * inv % c.power)) % self.modulus
                out.append(x)
        return out


@lru_cache(maxsize=None)
def build_group(q: int) -> CharacterGroup:
    """Construct the full character group modulo q."""
    if not isinstance(q, (int, np.integer)) or q < 1:
        raise InvalidArgumentError(f"modulus must be a positive integer, got {q!r}")
    return CharacterGroup(int(q))


def character(q: int, index: int) -> DirichletCharacter:
    group = build_group(q)
    if not 0 <= index < len(group):
        raise InvalidArgumentError(f"character index {index} out of range for modulus {q}")
    return group[index]


def parse_label(label: str) -> DirichletCharacter:
    q, _, idx = label.partition(".")
    return character(int(q), int(idx))


def conductor_and_primitive(chi: DirichletCharacter) -> tuple[int, DirichletCharacter]:
    """Return ``(q*, chi*)``, the conductor and the inducing primitive character."""
    qs = chi.conductor
    if qs == chi.modulus:
        return qs, chi
    target = build_group(qs)
    exps = []
    for g, o in zip(target.generator_residues(), target.orders):
        n = g
        while math.gcd(n, chi.modulus) != 1:
            n += qs
        num, den = chi.angle_fraction(n)
        e, rem = divmod(num * o, den)
        if rem:
            raise AssertionError(f"{chi!r} is not induced from modulus {qs}")
        exps.append(e % o)
    return qs, target.by_exponents(tuple(exps))


def principal_indicator(chi: DirichletCharacter) -> int:
    return 1 if chi.is_principal else 0


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{n mod q} chi(n) e(n/q); requires a primitive character."""
    if not chi.is_primitive:
        raise InvalidArgumentError(f"Gauss sum requested for imprimitive {chi!r}")
    q = chi.modulus
    n = np.arange(q)
    return complex(np.sum(chi.values * np.exp(2j * np.pi * n / q)))


def root_number(chi: DirichletCharacter) -> complex:
    """epsilon(chi) = tau(chi) / (i^a sqrt(q)) for primitive chi."""
    tau = gauss_sum(chi)
    return tau / (1j**chi.parity * math.sqrt(chi.modulus))


def real_characters(q: int) -> list[DirichletCharacter]:
    return [ch for ch in build_group(q) if ch.is_real]

