import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldbach_ap.arith import (
    MangoldtTable,
    cumulative_psi_mu,
    euler_phi,
    factorize,
    psi,
    psi_mu,
    psi_progression,
    psi_twisted,
    sieve_mangoldt,
)
from goldbach_ap.characters import build_group, character
from goldbach_ap.errors import InvalidArgumentError, InvalidResidueError, OutOfRangeError


def brute_lambda(n):
    if n < 2:
        return 0.0
    f = factorize(n)
    return math.log(next(iter(f))) if len(f) == 1 else 0.0


def test_small_values():
    t = sieve_mangoldt(10)
    assert t.values[4] == pytest.approx(math.log(2))
    assert t.values[6] == 0
    assert t.values[1] == 0
    assert math.fsum(t.values) == pytest.approx(7.83201418050546899, rel=1e-14)


def test_sieve_rejects_tiny_limit():
    with pytest.raises(InvalidArgumentError):
        sieve_mangoldt(1)


@pytest.mark.parametrize("segment", [7, 64, 1 << 12])
def test_segmentation_does_not_change_values(segment):
    a = sieve_mangoldt(5000, segment_size=segment).values
    b = sieve_mangoldt(5000).values
    assert np.array_equal(a, b)


def test_matches_trial_division(small_table):
    expected = np.array([brute_lambda(n) for n in range(2001)])
    assert np.allclose(small_table.values[:2001], expected, rtol=0, atol=1e-15)


def test_divisor_sum_identity(small_table):
    lam = small_table.values
    acc = np.zeros(10_001)
    for d in range(1, 10_001):
        if lam[d]:
            acc[d::d] += lam[d]
    n = np.arange(2, 10_001)
    assert np.allclose(acc[2:], np.log(n), rtol=1e-12, atol=0)


def test_psi_examples(small_table):
    assert psi(small_table, 1.5) == 0
    assert psi(small_table, 2) == pytest.approx(math.log(2))
    assert psi(small_table, 100) == pytest.approx(94.0453112293573922, rel=1e-13)
    with pytest.raises(OutOfRangeError):
        psi(small_table, 10_001)


def test_psi_progression_examples(small_table):
    assert psi_progression(small_table, 10, 4, 1) == pytest.approx(math.log(15))
    assert psi_progression(small_table, 2, 3, 1) == 0
    for x in (10, 97.5, 1000):
        assert psi_progression(small_table, x, 1, 1) == pytest.approx(psi(small_table, x))
    with pytest.raises(InvalidResidueError):
        psi_progression(small_table, 10, 4, 2)


@pytest.mark.parametrize("q", [3, 4, 10, 12, 30])
def test_progressions_partition_psi(small_table, q):
    x = 10_000
    total = sum(psi_progression(small_table, x, q, a) for a in range(q) if math.gcd(a, q) == 1)
    # prime powers of primes dividing q
    extra = sum(
        math.log(p) * int(math.log(x) / math.log(p) + 1e-12) for p in factorize(q)
    )
    assert total + extra == pytest.approx(psi(small_table, x), rel=1e-13)


def test_psi_twisted_examples(small_table):
    chi4 = character(4, 1)
    assert psi_twisted(small_table, 10, build_group(1).principal).real == pytest.approx(7.832014180505469)
    assert psi_twisted(small_table, 1.5, chi4) == 0
    assert psi_twisted(small_table, 10, chi4) == pytest.approx(math.log(5 / 7))


@pytest.mark.parametrize("q", [5, 6, 12])
def test_psi_twisted_principal_drops_divisor_primes(small_table, q):
    x = 5000
    chi0 = build_group(q).principal
    drop = sum(math.log(p) * int(math.log(x) / math.log(p) + 1e-12) for p in factorize(q))
    assert psi_twisted(small_table, x, chi0).real == pytest.approx(psi(small_table, x) - drop, rel=1e-13)


def test_psi_twisted_decomposes_into_progressions(small_table):
    for chi in build_group(7):
        direct = psi_twisted(small_table, 3000, chi)
        via = sum(chi(a) * psi_progression(small_table, 3000, 7, a) for a in range(1, 7))
        assert abs(direct - via) < 1e-10


def test_psi_mu_examples(small_table):
    one = build_group(1).principal
    expected = math.log(2) / math.sqrt(3) + math.log(3) / math.sqrt(2) + math.log(2)
    assert psi_mu(small_table, 5, 0.5, one).real == pytest.approx(expected, rel=1e-14)
    for mu in (0.25, 0.5, 1.0):
        assert psi_mu(small_table, 2, mu, one) == 0
    # strict cutoff: n = 6 is excluded
    assert psi_mu(small_table, 6, 1.0, one).real == pytest.approx(psi(small_table, 5))
    assert psi_mu(small_table, 6, 1.0, one).real == pytest.approx(2 * math.log(2) + math.log(3) + math.log(5), rel=1e-14)
    with pytest.raises(InvalidArgumentError):
        psi_mu(small_table, 5, 1.5, one)


@settings(max_examples=60, deadline=None)
@given(st.floats(2, 2000), st.floats(0.0, 50.0))
def test_psi_mu_monotone_at_mu_one(x, dx):
    one = build_group(1).principal
    assert psi_mu(_SMALL, x + dx, 1.0, one).real >= psi_mu(_SMALL, x, 1.0, one).real


def test_psi_mu_below_one_is_not_monotone():
    # weights (x - n)^(mu - 1) shrink as x grows, so monotonicity needs mu = 1
    one = build_group(1).principal
    assert psi_mu(_SMALL, 6.37, 0.5, one).real < psi_mu(_SMALL, 6.0, 0.5, one).real


_SMALL = sieve_mangoldt(3000)


@pytest.mark.parametrize("mu", [0.6, 0.75, 1.0])
@pytest.mark.parametrize("label", [(1, 0), (3, 1), (5, 2)])
def test_cumulative_psi_mu_matches_direct(small_table, mu, label):
    chi = character(*label)
    direct = sum(psi_mu(small_table, m, mu, chi) for m in range(1, 301))
    assert abs(cumulative_psi_mu(small_table, 300, mu, chi) - direct) < 1e-9 * max(1, abs(direct))


def test_table_roundtrip(tmp_path):
    t = sieve_mangoldt(1000)
    blob = t.to_bytes()
    assert int.from_bytes(blob[:8], "little") == 1000
    assert len(blob) == 8 + 8 * 1001
    t.save(tmp_path / "lam.bin")
    back = MangoldtTable.load(tmp_path / "lam.bin")
    assert back.limit == 1000 and np.array_equal(back.values, t.values)


def test_euler_phi():
    assert [euler_phi(q) for q in (1, 2, 3, 4, 5, 6, 12, 100)] == [1, 1, 2, 2, 4, 2, 4, 40]
