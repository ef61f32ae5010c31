import math

import numpy as np
import pytest

from goldbach_ap.characters import build_group, character, root_number
from goldbach_ap.errors import IngestionError, InvalidArgumentError, PoleError
from goldbach_ap.lfun import (
    CompletedL,
    ZeroSet,
    find_critical_zeros,
    format_zero_table,
    hurwitz_zeta,
    ingest_zero_table,
    l_value,
    log_derivative_at_one,
    scan_real_zeros,
    siegel_audit,
    write_zero_table,
    zero_count,
)
from goldbach_ap.special import gamma

ZETA = build_group(1)[0]
CHI3 = character(3, 1)
CHI4 = character(4, 1)

# first 29 ordinates of zeta (mpmath.zetazero, rounded to 12 places)
ZETA_REFERENCE = """\
# zeta zeros, ordinates below 100
14.134725141735
21.022039638772
25.010857580146
30.424876125860
32.935061587739
37.586178158826
40.918719012147
43.327073280915
48.005150881167
49.773832477672
52.970321477715
56.446247697064
59.347044002602
60.831778524610
65.112544048082
67.079810529494
69.546401711174
72.067157674482
75.704690699083
77.144840068874
79.337375020250
82.910380854086
84.735492980518
87.425274613125
88.809111207634
92.491899270558
94.651344040520
95.870634228245
98.831194218194
"""


def test_hurwitz_examples():
    assert hurwitz_zeta(2, 1) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    ref = complex(0.558735594632740873, -1.09677251190441326)
    assert abs(hurwitz_zeta(complex(0.5, 100), 0.3) - ref) < 1e-10
    with pytest.raises(PoleError):
        hurwitz_zeta(1, 0.5)


@pytest.mark.parametrize("s", [2.5, complex(0.5, 14), complex(-1.5, 3), complex(0.7, 800)])
def test_hurwitz_half_identity(s):
    lhs = hurwitz_zeta(s, 0.5)
    rhs = (2**s - 1) * hurwitz_zeta(s, 1)
    assert abs(lhs - rhs) <= 1e-11 * max(1, abs(rhs))


def test_l_values():
    assert l_value(2, ZETA) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert l_value(1, CHI4) == pytest.approx(math.pi / 4, rel=1e-13)
    assert l_value(1, CHI3) == pytest.approx(math.pi / math.sqrt(27), rel=1e-13)
    for ch in build_group(7):
        s = complex(0.3, 5.5)
        assert l_value(s.conjugate(), ch.conj()) == pytest.approx(np.conj(l_value(s, ch)), rel=1e-12)


def test_l_value_imprimitive_euler_factor():
    # chi mod 6 induced from chi mod 3: L(s, chi6) = (1 - chi3(2) 2^-s) L(s, chi3)
    chi6 = [c for c in build_group(6) if not c.is_principal][0]
    s = complex(0.8, 3.0)
    assert l_value(s, chi6) == pytest.approx((1 - CHI3(2) * 2**-s) * l_value(s, CHI3), rel=1e-12)


@pytest.mark.parametrize("q", [1, 3, 4, 5, 7, 8, 12])
def test_functional_equation(q):
    rng = np.random.default_rng(q)
    for ch in build_group(q):
        if not ch.is_primitive:
            continue
        comp, dual = CompletedL(ch), CompletedL(ch.conj())
        eps = root_number(ch)
        assert abs(eps) == pytest.approx(1, rel=1e-12)
        s = rng.uniform(-1, 2, 15) + 1j * rng.uniform(-30, 30, 15)
        s = s[np.abs(s - 1) > 0.2]
        s = s[np.abs(s) > 0.2]
        lhs = comp.completed(s)
        rhs = eps * dual.completed(1 - s)
        assert np.all(np.abs(lhs - rhs) <= 1e-9 * np.maximum(np.abs(lhs), 1e-12))


def test_zeta_zero_examples():
    zs = find_critical_zeros(ZETA, 15)
    assert len(zs) == 1
    assert zs.ordinates[0] == pytest.approx(14.134725, abs=5e-7)
    zs = find_critical_zeros(ZETA, 25)
    assert zs.ordinates[1] == pytest.approx(21.022040, abs=5e-7)


def test_chi3_first_zero():
    zs = find_critical_zeros(CHI3, 10)
    assert len(zs) == zs.count_certificate == 1
    assert zs.ordinates[0] == pytest.approx(8.039737155681467, abs=1e-9)


def test_chi4_first_zero():
    zs = find_critical_zeros(CHI4, 7)
    assert zs.ordinates[0] == pytest.approx(6.020948904697597, abs=1e-9)


def test_zeta_zeros_match_reference(tmp_path):
    path = tmp_path / "zeta.txt"
    path.write_text(ZETA_REFERENCE)
    ref = ingest_zero_table(path, ZETA)
    zs = find_critical_zeros(ZETA, 100)
    assert len(zs) == len(ref) == 29
    assert np.max(np.abs(zs.ordinates - ref.ordinates)) < 1e-9


def test_zeros_vanish_on_reevaluation():
    for ch in (ZETA, CHI3, CHI4, character(5, 1), character(7, 2)):
        zs = find_critical_zeros(ch, 60)
        vals = np.abs(l_value(0.5 + 1j * zs.ordinates, ch))
        assert vals.max() <= 1e-8


def test_count_certificate_over_envelope():
    """q <= 12, T = 500: bracketed count equals the argument-principle count."""
    checked = 0
    for q in range(1, 13):
        for ch in build_group(q):
            if not ch.is_primitive:
                continue
            zs = find_critical_zeros(ch, 500)
            assert len(zs) == zs.count_certificate == zero_count(ch, 500)
            assert np.all(np.diff(zs.ordinates) > 0)
            checked += 1
    assert checked == 27


def test_complex_character_conjugate_zeros_differ():
    chi = character(5, 1)
    a = find_critical_zeros(chi, 40).ordinates
    b = find_critical_zeros(chi.conj(), 40).ordinates
    assert not np.allclose(a[: min(len(a), len(b))], b[: min(len(a), len(b))])
    # zeros of chi-bar are conjugates of zeros of chi below the axis
    vals = np.abs(l_value(0.5 - 1j * b, chi))
    assert vals.max() < 1e-8


@pytest.mark.parametrize("ch", [ZETA, CHI3, CHI4])
def test_no_real_zeros(ch):
    assert scan_real_zeros(ch, 10_000) == []


def test_siegel_audit_examples():
    for q in (1, 3, 4, 12):
        rep = siegel_audit(q, 0.1)
        assert rep.offender is None
    assert siegel_audit(4).scanned == ("4.0", "4.1")


def test_log_derivative():
    assert log_derivative_at_one(CHI4) == pytest.approx(0.24560958476625327, abs=1e-9)
    chi = character(7, 1)
    assert log_derivative_at_one(chi.conj()) == pytest.approx(np.conj(log_derivative_at_one(chi)), abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        log_derivative_at_one(build_group(5).principal)


def test_log_derivative_size():
    """|L'/L(1, chi)| <= log q for q <= 50 (no exceptional zeros present)."""
    worst = 0.0
    for q in range(3, 51):
        for ch in build_group(q):
            if not ch.is_principal:
                worst = max(worst, abs(log_derivative_at_one(ch)) / math.log(q))
    assert worst < 1.0


def test_ingest_contract(tmp_path):
    p = tmp_path / "two.txt"
    p.write_text("14.134725\n21.022040\n")
    zs = ingest_zero_table(p, ZETA)
    assert len(zs) == 2 and zs.source == "ingested"
    p.write_text("")
    zs = ingest_zero_table(p, ZETA)
    assert len(zs) == 0 and zs.height_bound == 0
    p.write_text("# header\n\n  14.134725  \n")
    assert len(ingest_zero_table(p, ZETA)) == 1


def test_ingest_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("14.134725\n21.0\n20.5\n")
    with pytest.raises(IngestionError) as info:
        ingest_zero_table(p, ZETA)
    assert info.value.line == 3
    p.write_text("14.1\nabc\n")
    with pytest.raises(IngestionError) as info:
        ingest_zero_table(p, ZETA)
    assert info.value.line == 2
    p.write_text("14.2\n21.022040\n")
    with pytest.raises(IngestionError, match="14.2"):
        ingest_zero_table(p, ZETA, recertify=True)
    p.write_text("14.134725\n21.022040\n")
    assert len(ingest_zero_table(p, ZETA, recertify=True)) == 2


def test_zero_table_roundtrip(tmp_path):
    zs = find_critical_zeros(CHI3, 30)
    path = tmp_path / "z.txt"
    write_zero_table(zs, path)
    back = ingest_zero_table(path, CHI3, recertify=True)
    assert np.allclose(back.ordinates, zs.ordinates, atol=1e-12)
    assert format_zero_table(zs).startswith("# character 3.1")


def test_zero_set_truncate():
    zs = find_critical_zeros(ZETA, 50)
    t = zs.truncate(30)
    assert isinstance(t, ZeroSet) and len(t) == 3 and t.height_bound == 30
    z = t.zeros[0]
    assert z.kind == "critical-line" and z.rho == pytest.approx(complex(0.5, 14.134725141734695))


def test_gamma_decay_matches_stirling():
    t = 14.134725
    assert abs(gamma(complex(0.5, t))) == pytest.approx(math.sqrt(2 * math.pi) * math.exp(-math.pi * t / 2), rel=1e-6)
