import itertools
import math
import warnings

import numpy as np
import pytest

from rsprimes import corrmeasure as cm
from rsprimes.corrmeasure import (ComplexityError, CorrelationQuery, correlation_measure,
                                  rs_sequence, v_sum)

from oracles import rs


def brute_c2(s):
    """Every (d1, d2, M) with M + d2 <= N, keeping the first maximiser in (D, M) order."""
    N = len(s)
    best, wit = -1, None
    for d1 in range(N):
        for d2 in range(d1 + 1, N):
            acc = 0
            for M in range(1, N - d2 + 1):
                acc += s[M - 1 + d1] * s[M - 1 + d2]
                if abs(acc) > best:
                    best, wit = abs(acc), ((d1, d2), M)
    return best, wit


def test_rs_sequence_prefix():
    assert rs_sequence(8).tolist() == [1, 1, 1, -1, 1, 1, -1, 1]
    assert rs_sequence(300, 1000).tolist() == [rs(n) for n in range(1000, 1300)]


def test_query_validation():
    CorrelationQuery(10, (0, 3), 7)
    with pytest.raises(ValueError):
        CorrelationQuery(10, (0, 3), 8)
    with pytest.raises(ValueError):
        CorrelationQuery(10, (2, 2), 3)
    with pytest.raises(ValueError):
        CorrelationQuery(10, (0,), 3)
    with pytest.raises(ValueError):
        CorrelationQuery(10, (0, 1), 0)


def test_v_sum():
    s = rs_sequence(16)
    q = CorrelationQuery(16, (0, 1), 4)
    assert v_sum(s, q) == sum(int(s[n]) * int(s[n + 1]) for n in range(4))


@pytest.mark.parametrize("N", [2, 3, 8, 33, 64])
def test_c2_matches_brute_force_on_rs(N):
    s = rs_sequence(N).tolist()
    rep = correlation_measure(s, 2)
    best, (D, M) = brute_c2(s)
    assert rep.value == best
    assert abs(v_sum(s, CorrelationQuery(N, rep.witness_D, rep.witness_M))) == best
    assert (rep.witness_D, rep.witness_M) == (D, M)


@pytest.mark.parametrize("seed", range(6))
def test_c2_matches_brute_force_random(seed):
    s = np.random.default_rng(seed).choice([-1, 1], size=40).tolist()
    assert correlation_measure(s, 2).value == brute_c2(s)[0]


def test_c3_matches_brute_force():
    s = rs_sequence(24).tolist()
    N = len(s)
    best = 0
    for D in itertools.combinations(range(N), 3):
        acc = 0
        for M in range(1, N - D[-1] + 1):
            n = M - 1
            acc += s[n + D[0]] * s[n + D[1]] * s[n + D[2]]
            best = max(best, abs(acc))
    assert correlation_measure(s, 3).value == best


def test_bounded_never_exceeds_exact():
    s = rs_sequence(256)
    exact = correlation_measure(s, 2).value
    for d in (1, 8, 64, 255):
        assert correlation_measure(s, 2, d_max=d, mode="bounded").value <= exact
    assert correlation_measure(s, 2, d_max=255, mode="bounded").value == exact


def test_bounded_higher_order():
    rep = correlation_measure(rs_sequence(128), 4, d_max=10, mode="bounded")
    assert rep.witness_D[-1] <= 10 and rep.value >= 1


def test_exact_mode_limits():
    with pytest.raises(ValueError):
        correlation_measure(rs_sequence(64), 4)
    with pytest.raises(ComplexityError):
        correlation_measure(rs_sequence(4096), 3, budget=10**6)


def test_random_envelope_and_band():
    assert cm.random_envelope(4096, 2) == pytest.approx(5 * math.sqrt(2 * 4096 * math.log(4096)))
    lo, hi = cm.akmmr_band(100, 2)
    assert lo < hi


@pytest.mark.parametrize("M", range(4, 13))
def test_consecutive_product_sum_matches_direct(M):
    s = rs_sequence((1 << M) + 3).astype(int)
    direct = int((s[:-3] * s[1:-2] * s[2:-1] * s[3:]).sum())
    assert cm.consecutive_product_sum(M) == direct


def test_consecutive_product_sum_range():
    with pytest.raises(ValueError):
        cm.consecutive_product_sum(3)


@pytest.mark.parametrize("M", range(3, 13))
def test_pair_correlations_vanish_for_short_shifts(M):
    assert all(cm.pair_correlation_sum(2**M, d) == 0 for d in range(1, 2 ** (M - 2) + 1))
    assert cm.pair_correlation_sum(2**M, 2 ** (M - 2) + 1) == 4 * (-1) ** (M + 1)
    assert cm.pair_correlation_sum(2**M, 0) == 2**M


def test_pair_correlation_direct():
    s = rs_sequence(1100).astype(int)
    for d in (1, 2, 5, 13):
        assert cm.pair_correlation_sum(1000, d) == int((s[:1000] * s[d:1000 + d]).sum())


def test_subword_complexity():
    assert cm.subword_complexity(1 << 12, 8) == 56
    with pytest.raises(ValueError):
        cm.subword_complexity(1 << 10, 8)


def test_subword_warns_on_short_window():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        cm.subword_complexity(1 << 6, 2)
    assert all(issubclass(w.category, cm.InsufficientWindowWarning) for w in rec)


@pytest.mark.parametrize("N", [16, 100, 256])
def test_sup_norm_grid_matches_direct(N):
    G = 4 * N
    direct = max(abs(cm.trig_poly_value(N, j / G)) for j in range(G))
    assert cm.sup_norm_grid(N, G) == pytest.approx(direct, rel=1e-9)


def test_sup_norm_grid_requires_dense_grid():
    with pytest.raises(ValueError):
        cm.sup_norm_grid(100, 399)


def test_sup_norm_at_zero_is_partial_sum():
    N = 1 << 10
    assert abs(cm.trig_poly_value(N, 0.0)) == pytest.approx(abs(rs_sequence(N).sum()))
