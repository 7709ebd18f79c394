"""Named invariant suites behind ``rsprimes verify``.

Each check returns pass/fail plus a short detail string. Exhaustive ranges are
swept with the uint64 kernels; every identity is compared against a value
computed another way (bit scans, the automaton, brute force, cumulative sums).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import congruence as cg
from . import corrmeasure as cm
from . import digital as dg
from .dfao import count_word_occurrences, dfao_eval_array, rudin_shapiro_dfao
from .primes import _is_prime_trial, build_table

SUITES = ("lemmas", "oracles", "congruence")
LIMIT_CEILINGS = {"lemmas": 1 << 26, "oracles": 10**8, "congruence": 10**8}
DEFAULT_LIMITS = {"lemmas": 1 << 22, "oracles": 10**6, "congruence": 10**6}

RS_PREFIX = (1, 1, 1, -1, 1, 1, -1, 1, 1, 1, 1, -1, -1, -1, 1, -1, 1, 1)
CRT_MODULUS_POOL = 55440  # 2^4 3^2 5 7 11


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str


def _count_fail(mask: np.ndarray) -> int:
    return int(np.count_nonzero(~mask))


def _fail_detail(bad: int, total: int) -> str:
    return f"{bad} failures out of {total}"


# -- lemmas ------------------------------------------------------------------

def v2_factorial_oracle(limit: int) -> np.ndarray:
    """``v2(n!)`` for ``n < limit`` as a running sum of ``v2(j)``."""
    out = np.zeros(limit, dtype=np.int64)
    if limit > 1:
        out[1:] = np.cumsum(dg.v2_array(np.arange(1, limit, dtype=np.uint64)))
    return out


def lemma_checks(limit: int = DEFAULT_LIMITS["lemmas"], seed: int = 0) -> list[Check]:
    n = np.arange(limit, dtype=np.uint64)
    r11 = dg.r11_array(n)
    r01 = dg.r01_array(n)
    s2 = dg.s2_array(n)
    out = []

    def add(name, ok_mask_or_bool, total, extra=""):
        if isinstance(ok_mask_or_bool, np.ndarray):
            bad = _count_fail(ok_mask_or_bool)
        else:
            bad = 0 if ok_mask_or_bool else 1
        out.append(Check("lemmas", name, bad == 0, _fail_detail(bad, total) + extra))

    add("r11_step", dg.r11_step_array(n) == dg.r11_array(n + np.uint64(1)), limit)
    fact = v2_factorial_oracle(limit)
    add("legendre_v2_factorial", (n.astype(np.int64) - s2) == fact, limit)
    add("n_equals_r11_v2fact_r01", n.astype(np.int64) == r11 + fact + r01, limit)
    add("s2_equals_r11_plus_r01", s2 == r11 + r01, limit)
    add("delta_case_table", dg.delta_case_array(n)[2] == dg.delta_array(n, 1), limit)

    small = n[: min(limit, 1 << 20)]
    ok = np.ones(len(small), dtype=bool)
    tele = np.ones(len(small), dtype=bool)
    prev = np.zeros(len(small), dtype=np.int64)
    for i in range(1, 9):
        ok &= dg.r11_iterate_array(small, i) == dg.r11_array(small + np.uint64(i))
        d = dg.delta_array(small, i)
        tele &= (np.abs(d) <= i) & (d - prev == dg.delta_array(small + np.uint64(i - 1), 1))
        prev = d
    add("r11_iterate_i_le_8", ok, 8 * len(small))
    add("delta_telescoping", tele, 8 * len(small))

    rng = np.random.default_rng(seed)
    m = np.arange(1, min(limit, 1 << 16), dtype=np.uint64)
    worst = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 7))
        alpha = dg.AlphaVector(rng.random(k + 1))
        diff = dg.phase_decompose_array(alpha, m) - dg.direct_phase_array(alpha, m)
        worst = max(worst, float(np.abs(diff - np.round(diff)).max()))
    out.append(Check("lemmas", "phase_decomposition", worst < 1e-9,
                     f"max phase discrepancy {worst:.3g} (tol 1e-9)"))

    rs = dfao_eval_array(rudin_shapiro_dfao(), small)
    add("dfao_matches_r11", rs == 1 - 2 * (r11[: len(small)] & 1), len(small))

    words = range(min(limit, 1 << 16))
    bad = sum(count_word_occurrences("11", x) != dg.r11(x)
              or count_word_occurrences("01", x, True) != dg.r01(x) for x in words)
    out.append(Check("lemmas", "block_counter_matches_kernels", bad == 0,
                     _fail_detail(bad, len(words))))
    return out


# -- oracles -----------------------------------------------------------------

def oracle_checks(limit: int = DEFAULT_LIMITS["oracles"], seed: int = 0) -> list[Check]:
    out = []
    prefix = tuple(int(x) for x in cm.rs_sequence(18))
    out.append(Check("oracles", "rs_first_values", prefix == RS_PREFIX, str(prefix)))

    sums = {M: cm.consecutive_product_sum(M) for M in range(4, 23)}
    wrong = [M for M, v in sums.items() if v != 2 ** (M - 1)]
    out.append(Check("oracles", "order4_closed_form", not wrong,
                     "all equal 2^(M-1)" if not wrong else
                     f"M={wrong[0]}: got {sums[wrong[0]]}, closed form {2 ** (wrong[0] - 1)}"
                     f" ({len(wrong)} of {len(sums)} differ)"))
    mag = all(abs(v) == 2 ** (M - 1) for M, v in sums.items())
    out.append(Check("oracles", "order4_magnitude", mag, "|sum| = 2^(M-1) for M in [4,22]"))

    pk = {k: cm.subword_complexity(1 << 20, k) for k in range(8, 17)}
    bad = [k for k, v in pk.items() if v != 8 * k - 8]
    out.append(Check("oracles", "subword_complexity_8k_minus_8", not bad, str(pk)))

    N = 1 << 12
    c2 = cm.correlation_measure(cm.rs_sequence(N), 2)
    out.append(Check("oracles", "c2_rs_lower_bound", c2.value >= N / 6,
                     f"C2={c2.value} at D={c2.witness_D}, M={c2.witness_M}; N/6={N / 6:.1f}"))

    rng = np.random.default_rng(seed)
    env = cm.random_envelope(N, 2)
    vals = [cm.correlation_measure(rng.choice(np.array([-1, 1]), N), 2).value
            for _ in range(20)]
    out.append(Check("oracles", "c2_random_envelope", max(vals) < env,
                     f"max C2={max(vals)} vs 5 sqrt(2N ln N)={env:.1f}"))

    lo_hi = []
    ok = True
    for N in (1 << 10, 1 << 12, 1 << 14):
        v = cm.sup_norm_grid(N, 8 * N) / math.sqrt(N)
        lo_hi.append(round(v, 4))
        ok &= 0.95 <= v <= cm.SQRT_PROPERTY_CONSTANT
    out.append(Check("oracles", "sqrt_property_band", ok, f"sup/sqrt(N)={lo_hi}"))

    a = cm.pair_correlation_sum(1 << 16, 1) / (1 << 16)
    b = cm.pair_correlation_sum(1 << 20, 3) / (1 << 20)
    out.append(Check("oracles", "pair_correlation_small", abs(a) < 0.05 and abs(b) < 0.02,
                     f"N=2^16,d=1: {a:.4f}; N=2^20,d=3: {b:.4f}"))

    table = build_table(max(limit, 10**4))
    bad = sum(table.is_prime(x) != _is_prime_trial(x) for x in range(2, 10**4 + 1))
    out.append(Check("oracles", "sieve_vs_trial_division", bad == 0, _fail_detail(bad, 10**4 - 1)))
    x = min(limit, 10**6)
    cheb = float(table.mangoldt_table(x).sum()) / x
    out.append(Check("oracles", "chebyshev_psi", 0.9 <= cheb <= 1.1, f"psi({x})/{x}={cheb:.5f}"))
    return out


# -- congruence --------------------------------------------------------------

def _random_system(rng, pool_divisors) -> cg.CongruenceSystem:
    r = int(rng.integers(1, 6))
    mods = rng.choice(pool_divisors, size=r)
    return cg.CongruenceSystem((int(rng.integers(0, m)), int(m)) for m in mods)


def crt_divisor_pool() -> np.ndarray:
    d = np.arange(1, 257)
    return d[CRT_MODULUS_POOL % d == 0]


def congruence_checks(limit: int = DEFAULT_LIMITS["congruence"], seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []

    pool = crt_divisor_pool()
    bad = 0
    for _ in range(500):
        system = _random_system(rng, pool)
        sol = cg.crt_solve(system)
        brute = cg.brute_force_solutions(system)
        if sol is None:
            got = []
        else:
            lcm = math.lcm(*(m for _, m in system.equations))
            got = list(range(sol.residue, lcm, sol.modulus))
        bad += got != brute
    out.append(Check("congruence", "crt_vs_brute_force", bad == 0, _fail_detail(bad, 500)))

    bad = 0
    for _ in range(10**4):
        k = int(rng.integers(1, 7))
        u = [int(x) for x in rng.integers(0, 7, size=k)]
        eps = [int(x) for x in rng.integers(0, 2, size=k)]
        sol = cg.crt_solve(cg.build_paper_system(u, eps))
        cond = cg.pairwise_condition(u, eps)
        if (sol is not None) != cond:
            bad += 1
        elif sol is not None and sol.modulus != 1 << (max(u) + 2):
            bad += 1
    out.append(Check("congruence", "valuation_system_pairwise_condition", bad == 0,
                     _fail_detail(bad, 10**4)))

    table = build_table(limit)
    primes = table.primes(3, limit)
    details, ok = [], True
    for k in range(2, 9):
        rep = cg.check_valuation_profiles(primes, k)
        ok &= rep.ok
        details.append(f"k={k}: fail={rep.conditional_failures} at_thr={rep.at_threshold}")
    out.append(Check("congruence", "valuation_profile_forward", ok, "; ".join(details)))

    bad = 0
    for _ in range(10**4):
        k = int(rng.integers(2, 9))
        i = int(rng.choice(np.arange(1, k + 1, 2)))
        top = cg.profile_threshold(k) + int(rng.integers(1, 7))
        x = cg.profile_witness(k, i, top)
        expect = [top if j == i else dg.v2(abs(i - j)) for j in range(1, k + 1)]
        if x is None or x % 2 == 0 or [dg.v2(x + j) for j in range(1, k + 1)] != expect:
            bad += 1
    out.append(Check("congruence", "valuation_profile_reverse", bad == 0, _fail_detail(bad, 10**4)))

    N = min(limit, 10**6)
    cards = {k: len(cg.enumerate_lambda_k(table, k, N)) for k in range(1, 7)}
    out.append(Check("congruence", "lambda_k_cardinality",
                     all(v == 2**k for k, v in cards.items()), f"N={N}: {cards}"))
    grid = [10**e for e in range(2, 7) if 10**e <= N]
    growth = cg.lambda_k_growth(table, 6, grid) if grid else []
    out.append(Check("congruence", "lambda_k_nondecreasing",
                     all(a <= b for a, b in zip(growth, growth[1:])), f"k=6: {growth}"))

    dm = cg.delta_matrix(primes, 8)
    padded = np.concatenate([np.zeros((len(primes), 1), dtype=np.int64), dm], axis=1)
    ok = all(np.array_equal(padded[:, i] - padded[:, i - 1],
                            dg.delta_array(primes + np.uint64(i - 1), 1)) for i in range(1, 9))
    out.append(Check("congruence", "delta_vector_consistency", ok, f"{len(primes)} primes, k=8"))

    reports = [cg.pairing_diagnostic(table, k, min(N, 10**5), [0.5] * k) for k in (1, 3, 5)]
    reports += [cg.pairing_diagnostic(table, k, min(N, 10**5), [0.0] * (k - 1) + [0.5])
                for k in (1, 2, 3, 4)]
    out.append(Check("congruence", "pairing_sign_cancellation",
                     all(r.sign_failures == 0 for r in reports),
                     f"{sum(r.systems for r in reports)} systems"))
    return out


_RUNNERS: dict[str, Callable[..., list[Check]]] = {
    "lemmas": lemma_checks,
    "oracles": oracle_checks,
    "congruence": congruence_checks,
}


def run_suite(name: str, limit: int | None = None, seed: int = 0) -> list[Check]:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}")
    limit = DEFAULT_LIMITS[name] if limit is None else limit
    if limit > LIMIT_CEILINGS[name]:
        raise ValueError(f"limit {limit} exceeds ceiling {LIMIT_CEILINGS[name]} for {name}")
    return _RUNNERS[name](limit, seed)
