"""Zero bookkeeping shared by the oscillating-term assemblies.

A :class:`ZeroCatalog` hands out, for any character chi, the nontrivial zeros
of L(s, chi) up to a common height T: the critical-line zeros of the inducing
primitive character (positive ordinates from chi*, negative ones reflected
from the conjugate character) together with the real zeros beta >= 1/2.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from .characters import DirichletCharacter, conductor_and_primitive
from .lfun import ZeroSet, find_critical_zeros, ingest_zero_table, scan_real_zeros, write_zero_table

log = logging.getLogger(__name__)


class ZeroCatalog:
    """Lazily computed and cached zero sets at truncation height ``height``.

    Args:
        height: truncation height T of every zero sum.
        cache_dir: optional directory holding plain-text zero tables; a table
            whose recorded height is below ``height`` is recomputed.
        real_zeros: synthetic real zeros keyed by primitive character label
            (e.g. ``{"3.1": [0.75]}``); these replace the scanned ones for
            that character. Intended for exercising the real-zero algebra.
        scan_real: scan for real zeros of real characters when no synthetic
            entry is given.
        real_grid: resolution of that scan.
    """

    def __init__(
        self,
        height: float,
        cache_dir=None,
        real_zeros: dict[str, list[float]] | None = None,
        scan_real: bool = True,
        real_grid: int = 10_000,
    ):
        self.height = float(height)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.synthetic = {k: [float(b) for b in v] for k, v in (real_zeros or {}).items()}
        self.scan_real = scan_real
        self.real_grid = real_grid
        self._sets: dict[str, ZeroSet] = {}

    @property
    def has_synthetic(self) -> bool:
        return any(self.synthetic.values())

    def zero_set(self, chi: DirichletCharacter) -> ZeroSet:
        prim = conductor_and_primitive(chi)[1]
        if prim.label not in self._sets:
            self._sets[prim.label] = self._load_or_compute(prim)
        return self._sets[prim.label]

    def add(self, zs: ZeroSet) -> None:
        if zs.height_bound < self.height:
            raise ValueError(f"zero set {zs.character_id} only reaches {zs.height_bound}")
        self._sets[zs.character_id] = zs.truncate(self.height)

    def _path(self, prim: DirichletCharacter) -> Path:
        return self.cache_dir / f"zeros_{prim.modulus}_{prim.index}.txt"

    def _load_or_compute(self, prim: DirichletCharacter) -> ZeroSet:
        if self.cache_dir is not None:
            path = self._path(prim)
            if path.exists():
                cached = ingest_zero_table(path, prim)
                recorded = _recorded_height(path)
                if recorded is not None and recorded >= self.height:
                    zs = ZeroSet(prim.label, recorded, cached.ordinates, len(cached), "computed")
                    return zs.truncate(self.height)
                log.info("zero cache %s covers T=%s < %s; recomputing", path, recorded, self.height)
        zs = find_critical_zeros(prim, self.height)
        if self.cache_dir is not None:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            write_zero_table(zs, self._path(prim))
            # hand back exactly what a warm cache will, so reruns are bit-identical
            return self._load_or_compute(prim)
        return zs

    def real_zeros(self, chi: DirichletCharacter) -> list[float]:
        prim = conductor_and_primitive(chi)[1]
        if prim.label in self.synthetic:
            return list(self.synthetic[prim.label])
        if not self.scan_real or not prim.is_real:
            return []
        return [z.real_position for z in scan_real_zeros(prim, self.real_grid)]

    def critical_rhos(self, chi: DirichletCharacter) -> np.ndarray:
        """Complex zeros 1/2 + i gamma of L(s, chi) with 0 < |gamma| <= T."""
        pos = self.zero_set(chi).ordinates
        neg = self.zero_set(chi.conj()).ordinates
        gam = np.concatenate([pos, -neg])
        return 0.5 + 1j * gam

    def rhos(self, chi: DirichletCharacter) -> np.ndarray:
        """All nontrivial zeros up to height T, real zeros included."""
        betas = np.asarray(self.real_zeros(chi), dtype=np.complex128)
        return np.concatenate([self.critical_rhos(chi), betas])


def _recorded_height(path: Path) -> float | None:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# height "):
                return float(line.split()[-1])
            if not line.startswith("#"):
                break
    return None


def zero_density_tail(q: int, T: float, kappa: float) -> float:
    """Approximate sum over gamma > T of gamma^(-kappa-1) using
    dN(t) ~ log(q t / 2 pi) dt / (2 pi)."""
    return (math.log(max(q * T / (2 * math.pi), math.e)) + 1.0 / kappa) / (
        2 * math.pi * kappa * T**kappa
    )
