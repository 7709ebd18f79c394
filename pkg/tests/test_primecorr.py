import cmath
import math

import numpy as np
import pytest

from rsprimes import primecorr as pc
from rsprimes.digital import AlphaVector, r11, s2
from rsprimes.primes import mangoldt

from oracles import eratosthenes, rs

PRIMES = eratosthenes(20_000)


def loop_s(N, k):
    total = 0
    for p in PRIMES:
        if p > N:
            break
        prod = 1
        for i in range(k + 1):
            prod *= rs(p + i)
        total += prod
    return total


def loop_u(N, k):
    return sum(rs(p) * rs(p + k) for p in PRIMES if p <= N)


def loop_s_alpha(N, alpha):
    return sum(cmath.exp(2j * math.pi * sum(a * r11(p + i) for i, a in enumerate(alpha)))
               for p in PRIMES if p <= N)


@pytest.fixture(scope="module")
def table(table_1e6):
    return table_1e6


def test_e():
    assert pc.e(0.25) == pytest.approx(1j)
    assert pc.e(3.5) == pytest.approx(-1)


@pytest.mark.parametrize("N, k, expected", [(10, 1, -2), (2, 4, 1), (10, 0, 2), (1, 3, 0)])
def test_s_k_frozen(table, N, k, expected):
    assert pc.s_k_sum(table, N, k) == expected


@pytest.mark.parametrize("N, k, expected", [(10, 2, 2), (10, 0, 4), (10, 1, -2)])
def test_u_k_frozen(table, N, k, expected):
    assert pc.u_k_sum(table, N, k) == expected


@pytest.mark.parametrize("k", range(0, 7))
def test_s_and_u_match_loops(table, k):
    for N in (97, 1000, 20_000):
        assert pc.s_k_sum(table, N, k) == loop_s(N, k)
        assert pc.u_k_sum(table, N, k) == loop_u(N, k)


def test_workers_do_not_change_sums(table):
    assert pc.s_k_sum(table, 10**6, 3, workers=4) == pc.s_k_sum(table, 10**6, 3)
    alpha = [0.1, 0.37, 0.2]
    assert pc.s_alpha_sum(table, 10**5, alpha, workers=3) == pc.s_alpha_sum(table, 10**5, alpha)


def test_s_alpha_half_integral_is_exact(table):
    got = pc.s_alpha_sum(table, 10**4, [0.5, 0.5])
    assert isinstance(got, int)
    assert got == pc.s_k_sum(table, 10**4, 1)
    assert pc.s_alpha_sum(table, 10**4, [0.5, 0, 0.5]) == pc.u_k_sum(table, 10**4, 2)
    assert pc.s_alpha_sum(table, 10**4, [1.5, 1.0, -0.5]) == pc.u_k_sum(table, 10**4, 2)


@pytest.mark.parametrize("alpha", [[0.1, 0.2], [0.3, 0.0, 0.77], [0.25, 0.25, 0.25, 0.25]])
def test_s_alpha_matches_loop(table, alpha):
    want = loop_s_alpha(20_000, alpha)
    assert abs(pc.s_alpha_sum(table, 20_000, alpha) - want) < 1e-8
    assert abs(pc.s_alpha_sum(table, 20_000, alpha, route="decomposed") - want) < 1e-8


def test_psi_sum_matches_loop(table):
    alpha = [0.2, 0.4]
    want = sum(mangoldt(n) * cmath.exp(2j * math.pi * (0.2 * r11(n) + 0.4 * r11(n + 1)))
               for n in range(1, 5001))
    assert abs(pc.psi_sum(table, 5000, alpha) - want) < 1e-8
    assert pc.psi_running_max(table, 5000, alpha) >= abs(want) - 1e-9


def test_psi_trivial_alpha_is_chebyshev(table):
    assert pc.psi_sum(table, 10**6, [0, 0]).real / 10**6 == pytest.approx(1, abs=0.01)


def test_partial_summation_bound(table):
    # |S(N)| <= 2 max_{m<=N} |Psi(m)| / ln N + O(sqrt N): checked with the crude constant 1
    alpha = [0.5, 0.5]
    N = 10**4
    s = abs(pc.s_alpha_sum(table, N, alpha))
    bound = 2 * pc.psi_running_max(table, N, alpha) / math.log(N) + math.sqrt(N)
    assert s <= bound


@pytest.mark.parametrize("seed", range(4))
def test_s_alpha_via_v(table, seed):
    rng = np.random.default_rng(seed)
    a = rng.random(4)
    a[0] = -a[1:].sum()
    direct = pc.s_alpha_sum(table, 20_000, a)
    assert abs(pc.s_alpha_via_v(table, 20_000, a) - direct) < 1e-8


def test_s_alpha_via_v_requires_integer_total(table):
    with pytest.raises(ValueError):
        pc.s_alpha_via_v(table, 1000, [0.1, 0.2])


@pytest.mark.parametrize("kind", pc.KINDS)
def test_convergence_table_matches_pointwise(table, kind):
    grid = [10, 1000, 31_623, 10**5, 10**6]
    rows = pc.convergence_table(table, 3, kind, grid)
    func = pc.s_k_sum if kind == "consecutive" else pc.u_k_sum
    for row in rows:
        assert row.raw == func(table, row.N, 3)
        assert row.pi_N == table.pi(row.N)
        assert row.ratio == row.raw / row.pi_N


def test_convergence_table_rejects_bad_grid(table):
    with pytest.raises(ValueError):
        pc.convergence_table(table, 1, "pair", [100, 10])
    with pytest.raises(ValueError):
        pc.convergence_table(table, 1, "triple", [100])


def loop_odd(N, k, f):
    return sum((-1) ** sum(f(n + i) for i in range(k + 1)) for n in range(1, N + 1, 2))


@pytest.mark.parametrize("N, k, func, expected", [(9, 1, "s2", 3), (9, 1, "r11", 1)])
def test_odd_integer_sum_frozen(N, k, func, expected):
    assert pc.odd_integer_sum(N, k, func=func) == expected


@pytest.mark.parametrize("k", range(0, 5))
def test_odd_integer_sum_matches_loop(k):
    assert pc.odd_integer_sum(3001, k, func="s2") == loop_odd(3001, k, s2)
    assert pc.odd_integer_sum(3001, k, func="r11") == loop_odd(3001, k, r11)
    assert pc.odd_integer_sum(3001, k, "pair", "r11") == sum(
        rs(n) * rs(n + k) for n in range(1, 3002, 2))


def test_limit_checks(table):
    with pytest.raises(ValueError):
        pc.s_k_sum(table, 10**6 + 1, 1)
    with pytest.raises(ValueError):
        pc.odd_integer_sum(10, 1, func="s3")
