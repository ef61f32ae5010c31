"""Command-line front end.

Every command writes UTF-8 CSV: ``#`` metadata lines (tool version and the
configuration echo) followed by a header row and data rows. Floats are
written with 17 significant digits so identical runs give identical bytes.

Exit codes: 0 success, 2 invalid configuration, 3 certification failure or
a monitored bound exceeded, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .arith import MangoldtTable, psi, sieve_mangoldt
from .characters import build_group, character
from .circle import (
    RESIDUAL_FIELDS,
    ThetaPoint,
    cutoff,
    lemma_suite,
    mean_square,
    verify_explicit_formula,
)
from .errors import (
    CertificationError,
    ConfigurationError,
    GoldbachError,
    IngestionError,
    InvalidArgumentError,
    TheoremViolationError,
)
from .goldbach import (
    CSV_FIELDS,
    Classes,
    geometric_samples,
    representation_fft,
    ruppel_comparison,
    theorem_reports,
)
from .lfun import find_critical_zeros, format_zero_table, siegel_audit
from .zeros import ZeroCatalog

log = logging.getLogger("goldbach_ap")

EXIT_OK, EXIT_CONFIG, EXIT_CERT, EXIT_IO = 0, 2, 3, 4
MAX_HEIGHT = 1e4
MAX_X = 1e7
COMMANDS = ("sieve", "zeros", "theorem", "fujii", "ruppel", "explicit", "mean-square", "lemmas", "audit")


@dataclass
class JobConfig:
    command: str
    options: dict = field(default_factory=dict)
    output_path: str | None = None
    cache_dir: str | None = None

    def echo(self) -> list[str]:
        return [f"{k}={v}" for k, v in sorted(self.options.items())]


class Flagged(Exception):
    """Output was written but a monitored bound failed."""


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.16e}"
    return str(v)


def render_csv(config: JobConfig, fields, rows, notes=()) -> str:
    buf = io.StringIO()
    buf.write(f"# goldbach-ap {__version__}\n")
    buf.write(f"# command: {config.command}\n")
    for item in config.echo():
        buf.write(f"# {item}\n")
    for note in notes:
        buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_fmt(row[f]) for f in fields])
    return buf.getvalue()


def _emit(config: JobConfig, text: str) -> None:
    if config.output_path in (None, "-"):
        sys.stdout.write(text)
        return
    path = Path(config.output_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def resolve_cache_dir(flag: str | None) -> Path | None:
    env = os.environ.get("GOLDBACH_CACHE_DIR")
    chosen = env or flag
    return Path(chosen) if chosen else None


def load_table(limit: int, cache_dir: Path | None) -> MangoldtTable:
    """Sieve up to ``limit``, reusing any cached table that reaches it."""
    limit = int(limit)
    if cache_dir is None:
        return sieve_mangoldt(limit)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / "mangoldt.bin"
    if path.exists():
        table = MangoldtTable.load(path)
        if table.limit >= limit:
            return table
        log.info("cached sieve reaches %d < %d; recomputing", table.limit, limit)
    table = sieve_mangoldt(limit)
    table.save(path)
    return table


def _check_height(T: float) -> float:
    if not 0 < T <= MAX_HEIGHT:
        raise ConfigurationError(f"height must lie in (0, {MAX_HEIGHT:g}], got {T}")
    return float(T)


def _check_x(X: float) -> float:
    if not 2 <= X <= MAX_X:
        raise ConfigurationError(f"X must lie in [2, {MAX_X:g}], got {X}")
    return float(X)


def _samples(args) -> np.ndarray:
    xmax = _check_x(args.xmax)
    xmin = min(args.xmin, xmax)
    return geometric_samples(xmin, xmax, args.samples)


def _catalog(args, cache_dir) -> ZeroCatalog:
    return ZeroCatalog(_check_height(args.height), cache_dir=cache_dir and cache_dir / "zeros")


def cmd_sieve(args, config, cache_dir):
    limit = int(_check_x(args.limit))
    table = load_table(limit, cache_dir)
    xs = sorted({int(x) for x in geometric_samples(2, limit, args.samples)})
    rows = [{"x": x, "psi": psi(table, x), "psi_minus_x": psi(table, x) - x} for x in xs]
    return render_csv(config, ("x", "psi", "psi_minus_x"), rows)


def cmd_zeros(args, config, cache_dir):
    """Zero table in the plain ingestible format, preceded by the config echo."""
    chi = character(args.modulus, args.char_index)
    if not chi.is_primitive:
        raise ConfigurationError(f"{chi.label} is imprimitive; use its primitive character")
    zs = find_critical_zeros(chi, _check_height(args.height))
    head = [f"# goldbach-ap {__version__}", "# command: zeros"] + [f"# {e}" for e in config.echo()]
    return "\n".join(head) + "\n" + format_zero_table(zs)


def _theorem_rows(classes, args, cache_dir):
    samples = _samples(args)
    table = load_table(math.floor(samples.max()), cache_dir)
    reports = theorem_reports(samples, classes, _catalog(args, cache_dir), table)
    for r in reports:
        if r.h_term != 0:
            log.warning("nonzero H-term %.3e at X=%g", r.h_term, r.X)
    return reports


def _theorem_csv(args, config, cache_dir, classes):
    reports = _theorem_rows(classes, args, cache_dir)
    text = render_csv(config, CSV_FIELDS, [r.row() for r in reports])
    worst = max(abs(r.bound_ratio) for r in reports)
    if worst > args.ratio_limit:
        raise Flagged(text, f"bound_ratio {worst:.3g} exceeds {args.ratio_limit}")
    return text


def cmd_theorem(args, config, cache_dir):
    return _theorem_csv(args, config, cache_dir, Classes(args.q1, args.a1, args.q2, args.a2))


def cmd_fujii(args, config, cache_dir):
    return _theorem_csv(args, config, cache_dir, Classes(1, 1, 1, 1))


RUPPEL_FIELDS = ("X", "q", "a", "b", "lhs", "delta", "ruppel_main", "ruppel_residual",
                 "ruppel_scale", "true_ruppel_main", "true_ruppel_residual", "theorem_residual")


def cmd_ruppel(args, config, cache_dir):
    samples = _samples(args)
    table = load_table(math.floor(samples.max()), cache_dir)
    classes = Classes(args.q, args.a, args.q, args.b)
    rep = representation_fft(table, classes, math.floor(samples.max()))
    catalog = _catalog(args, cache_dir)
    rows = []
    for X in samples:
        r = ruppel_comparison(float(X), args.q, args.a, args.b, catalog, rep)
        rows.append({f: getattr(r, f) for f in RUPPEL_FIELDS})
    return render_csv(config, RUPPEL_FIELDS, rows)


EXPLICIT_FIELDS = ("alpha", "N", "chi", "T", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                   "residual", "normalized", "normalized_strict")


def cmd_explicit(args, config, cache_dir):
    chi = character(args.modulus, args.char_index)
    N = int(args.N)
    table = load_table(cutoff(N), cache_dir)
    catalog = _catalog(args, cache_dir)
    rows = []
    for a in args.alpha:
        r = verify_explicit_formula(ThetaPoint(a, N), chi, catalog, table)
        rows.append({
            "alpha": a, "N": N, "chi": chi.label, "T": r.height,
            "lhs_re": r.lhs.real, "lhs_im": r.lhs.imag, "rhs_re": r.rhs.real, "rhs_im": r.rhs.imag,
            "residual": abs(r.residual), "normalized": r.normalized,
            "normalized_strict": r.normalized_strict,
        })
    text = render_csv(config, EXPLICIT_FIELDS, rows)
    worst = max(r["normalized"] for r in rows)
    if worst > args.ratio_limit:
        raise Flagged(text, f"normalized residual {worst:.3g} exceeds {args.ratio_limit}")
    return text


MEAN_SQUARE_FIELDS = ("chi", "N", "xi", "integral", "ratio", "error_estimate")


def cmd_mean_square(args, config, cache_dir):
    N = int(args.N)
    table = load_table(cutoff(N), cache_dir)
    catalog = ZeroCatalog(1.0, scan_real=True)
    rows = []
    for chi in build_group(args.modulus):
        for xi in sorted(args.xi):
            r = mean_square(chi, N, xi, catalog, table)
            rows.append({"chi": chi.label, "N": N, "xi": r.xi, "integral": r.integral,
                         "ratio": r.ratio, "error_estimate": r.error_estimate})
    text = render_csv(config, MEAN_SQUARE_FIELDS, rows)
    worst = max(r["ratio"] for r in rows)
    if worst > args.ratio_limit:
        raise Flagged(text, f"mean-square ratio {worst:.3g} exceeds {args.ratio_limit}")
    return text


def cmd_lemmas(args, config, cache_dir):
    table = load_table(cutoff(1000), cache_dir)
    results = lemma_suite(table, _catalog(args, cache_dir))
    text = render_csv(config, RESIDUAL_FIELDS, [v.row() for v in results])
    bad = [v for v in results if v.ratio > (1.0 if v.job == "hankel" else args.ratio_limit)]
    if bad:
        raise Flagged(text, f"{len(bad)} lemma checks outside their envelopes")
    return text


def cmd_audit(args, config, cache_dir):
    rep = siegel_audit(args.q, args.c1, args.grid)
    label, beta = rep.offender if rep.offender else ("", float("nan"))
    row = {"q": rep.modulus, "c1": rep.landau_constant_c1, "threshold": rep.threshold,
           "real_characters": len(rep.scanned), "offender": label, "beta": beta}
    return render_csv(config, tuple(row), [row])


HANDLERS = {
    "sieve": cmd_sieve,
    "zeros": cmd_zeros,
    "theorem": cmd_theorem,
    "fujii": cmd_fujii,
    "ruppel": cmd_ruppel,
    "explicit": cmd_explicit,
    "mean-square": cmd_mean_square,
    "lemmas": cmd_lemmas,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="goldbach-ap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output CSV path (default stdout)")
    common.add_argument("--cache-dir", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    def height(sp, default=1000.0):
        sp.add_argument("--height", type=float, default=default)

    def sampling(sp, xmax=1e5):
        sp.add_argument("--xmax", type=float, default=xmax)
        sp.add_argument("--xmin", type=float, default=1e3)
        sp.add_argument("--samples", type=int, default=50)
        height(sp)
        sp.add_argument("--ratio-limit", type=float, default=2.0)

    sp = sub.add_parser("sieve", parents=[common])
    sp.add_argument("--limit", type=float, default=1e6)
    sp.add_argument("--samples", type=int, default=50)

    sp = sub.add_parser("zeros", parents=[common])
    sp.add_argument("--modulus", type=int, required=True)
    sp.add_argument("--char-index", type=int, required=True)
    height(sp, 100.0)

    sp = sub.add_parser("theorem", parents=[common])
    for name in ("--q1", "--a1", "--q2", "--a2"):
        sp.add_argument(name, type=int, required=True)
    sampling(sp)

    sp = sub.add_parser("fujii", parents=[common])
    sampling(sp, 1e6)

    sp = sub.add_parser("ruppel", parents=[common])
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sampling(sp, 1e4)

    sp = sub.add_parser("explicit", parents=[common])
    sp.add_argument("--modulus", type=int, default=1)
    sp.add_argument("--char-index", type=int, default=0)
    sp.add_argument("--N", type=int, default=500)
    sp.add_argument("--alpha", type=float, nargs="+", default=[0.0, 0.05, 0.17, -0.31, 0.5])
    height(sp)
    sp.add_argument("--ratio-limit", type=float, default=5.0)

    sp = sub.add_parser("mean-square", parents=[common])
    sp.add_argument("--modulus", type=int, default=1)
    sp.add_argument("--N", type=int, default=1000)
    sp.add_argument("--xi", type=float, nargs="+", default=[1 / 64, 1 / 8, 1 / 2])
    sp.add_argument("--ratio-limit", type=float, default=10.0)

    sp = sub.add_parser("lemmas", parents=[common])
    height(sp)
    sp.add_argument("--ratio-limit", type=float, default=5.0)

    sp = sub.add_parser("audit", parents=[common])
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--c1", type=float, default=0.1)
    sp.add_argument("--grid", type=int, default=10_000)
    return p


def run(config: JobConfig, args) -> int:
    cache_dir = resolve_cache_dir(config.cache_dir)
    try:
        text = HANDLERS[config.command](args, config, cache_dir)
    except Flagged as flag:
        text, reason = flag.args
        _emit(config, text)
        log.error("red flag: %s", reason)
        return EXIT_CERT
    _emit(config, text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "out", "cache_dir", "verbose")}
    config = JobConfig(args.command, opts, args.out, args.cache_dir)
    try:
        return run(config, args)
    except (CertificationError, TheoremViolationError) as exc:
        log.error("%s", exc)
        return EXIT_CERT
    except (IngestionError, OSError) as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    except (ConfigurationError, InvalidArgumentError, ValueError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except GoldbachError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
