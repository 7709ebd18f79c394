"""Correlation measures of finite +/-1 sequences and the classical Rudin-Shapiro
facts used as regression oracles: the four-term product sum, pair
correlations, subword complexity and the square-root property.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .digital import r11_array

DEFAULT_BUDGET = 2 * 10**9
_CHUNK = 1 << 20


class ComplexityError(RuntimeError):
    pass


class InsufficientWindowWarning(UserWarning):
    pass


def rs_bits(count: int, start: int = 0) -> np.ndarray:
    """Parity of ``r11(n)`` for ``n`` in ``[start, start+count)``, as uint8."""
    n = np.arange(start, start + count, dtype=np.uint64)
    return (r11_array(n) & 1).astype(np.uint8)


def rs_sequence(count: int, start: int = 0) -> np.ndarray:
    """Rudin-Shapiro values ``(-1)**r11(n)`` as int8."""
    return (1 - 2 * rs_bits(count, start).astype(np.int8)).astype(np.int8)


@dataclass(frozen=True)
class CorrelationQuery:
    N: int
    D: tuple[int, ...]
    M: int

    def __post_init__(self):
        D = tuple(int(d) for d in self.D)
        object.__setattr__(self, "D", D)
        if len(D) < 2:
            raise ValueError("order k must be at least 2")
        if D[0] < 0 or any(b <= a for a, b in zip(D, D[1:])):
            raise ValueError(f"delays must be strictly increasing and >= 0: {D}")
        if self.M < 1 or self.M + D[-1] > self.N:
            raise ValueError(f"need 1 <= M and M + d_k <= N (M={self.M}, N={self.N})")

    @property
    def k(self) -> int:
        return len(self.D)


@dataclass(frozen=True)
class CorrelationReport:
    value: int
    witness_D: tuple[int, ...]
    witness_M: int


def v_sum(seq, q: CorrelationQuery) -> int:
    """``sum_{n<M} s[n+d_1] ... s[n+d_k]``."""
    s = np.asarray(seq, dtype=np.int64)
    if len(s) != q.N:
        raise ValueError(f"window has length {len(s)}, query expects {q.N}")
    prod = np.ones(q.M, dtype=np.int64)
    for d in q.D:
        prod *= s[d:d + q.M]
    return int(prod.sum())


def _gap_tuples(k: int, gmax: int):
    for rest in itertools.combinations(range(1, gmax + 1), k - 1):
        yield (0,) + rest


def _best_pair(P: np.ndarray, A: int) -> int:
    """max |P[b] - P[a]| over 0 <= a <= A, a < b < len(P)."""
    L = len(P) - 1
    lo = np.minimum.accumulate(P[:A + 1])
    hi = np.maximum.accumulate(P[:A + 1])
    idx = np.minimum(np.arange(L), A)  # last admissible a for b = 1..L
    Pb = P[1:]
    return int(max((Pb - lo[idx]).max(), (hi[idx] - Pb).max()))


def _first_pair(P: np.ndarray, A: int, value: int) -> tuple[int, int]:
    """Smallest ``a``, then smallest ``b``, achieving ``value``."""
    sufmax = np.maximum.accumulate(P[::-1])[::-1]
    sufmin = np.minimum.accumulate(P[::-1])[::-1]
    a_range = np.arange(A + 1)
    reach = np.maximum(sufmax[a_range + 1] - P[a_range], P[a_range] - sufmin[a_range + 1])
    a = int(np.flatnonzero(reach == value)[0])
    b = a + 1 + int(np.flatnonzero(np.abs(P[a + 1:] - P[a]) == value)[0])
    return a, b


def correlation_measure(seq, k: int, d_max: int | None = None, mode: str = "exact",
                        budget: int = DEFAULT_BUDGET) -> CorrelationReport:
    """``max |V(S_N, M, D)|`` over admissible ``(M, D)``.

    ``mode="exact"`` searches every ``D`` (only for ``k <= 3``);
    ``mode="bounded"`` restricts to ``d_k <= d_max``. For a fixed gap pattern
    ``D - d_1`` the best ``(d_1, M)`` comes from one pass over prefix sums of
    the product sequence. Ties go to the lexicographically smallest ``D``,
    then the smallest ``M``.
    """
    s = np.asarray(seq, dtype=np.int64)
    N = len(s)
    if k < 2:
        raise ValueError("k must be at least 2")
    if N < k:
        raise ValueError("window shorter than the order")
    if mode == "exact":
        if k > 3:
            raise ValueError("exact mode supports k <= 3; use mode='bounded'")
        if d_max not in (None, N, N - 1):
            raise ValueError("exact mode searches the full range; leave d_max unset")
        d_max = N - 1
    elif mode == "bounded":
        if d_max is None:
            raise ValueError("bounded mode needs d_max")
        d_max = min(d_max, N - 1)
        if d_max < k - 1:
            raise ValueError("d_max too small for k distinct delays")
    else:
        raise ValueError(f"unknown mode {mode!r}")

    work = math.comb(d_max, k - 1) * N
    if work > budget:
        raise ComplexityError(f"estimated work {work:.3g} exceeds budget {budget:.3g}")

    best, holders = -1, []
    for g in _gap_tuples(k, d_max):
        L = N - g[-1]
        if L < 1:
            continue
        A = min(L - 1, d_max - g[-1])
        prod = s[:L].copy()
        for off in g[1:]:
            prod *= s[off:off + L]
        P = np.concatenate(([0], np.cumsum(prod)))
        val = _best_pair(P, A)
        if val > best:
            best, holders = val, [(g, P, A)]
        elif val == best:
            holders.append((g, P, A))

    witnesses = []
    for g, P, A in holders:
        a, b = _first_pair(P, A, best)
        witnesses.append((tuple(a + x for x in g), b - a))
    D, M = min(witnesses)
    return CorrelationReport(best, D, M)


def random_envelope(N: int, k: int) -> float:
    """``5 sqrt(k N ln N)``, the typical upper size of ``C_k`` for random sequences."""
    return 5.0 * math.sqrt(k * N * math.log(N))


def akmmr_band(N: int, k: int) -> tuple[float, float]:
    """``(2/5, 7/4) * sqrt(N ln binom(N, k))``."""
    root = math.sqrt(N * math.log(math.comb(N, k)))
    return 0.4 * root, 1.75 * root


def _chunked_parity_sum(total: int, offsets: Sequence[int]) -> int:
    """``sum_{n<total} prod_j r_{n+off_j}`` in chunks."""
    span = max(offsets)
    acc = 0
    for lo in range(0, total, _CHUNK):
        cnt = min(_CHUNK, total - lo)
        bits = rs_bits(cnt + span, lo)
        par = np.zeros(cnt, dtype=np.uint8)
        for off in offsets:
            par ^= bits[off:off + cnt]
        acc += cnt - 2 * int(np.count_nonzero(par))
    return acc


def consecutive_product_sum(M: int) -> int:
    """``sum_{n < 2**M} r_n r_{n+1} r_{n+2} r_{n+3}``."""
    if not 4 <= M <= 26:
        raise ValueError("M must lie in [4, 26]")
    return _chunked_parity_sum(1 << M, (0, 1, 2, 3))


def pair_correlation_sum(N: int, d: int) -> int:
    """``sum_{n<N} r_n r_{n+d}``; ``d = 0`` is allowed and gives ``N``."""
    if d < 0 or N < 0:
        raise ValueError("need N >= 0 and d >= 0")
    if N == 0:
        return 0
    if d == 0:
        return N
    return _chunked_parity_sum(N, (0, d))


def subword_complexity(L: int, k: int) -> int:
    """Number of distinct length-``k`` factors of the Rudin-Shapiro prefix of length ``L``."""
    if not 1 <= k <= 62:
        raise ValueError("k must lie in [1, 62]")
    if L < (1 << (k + 4)):
        raise ValueError(f"prefix length {L} below 2**(k+4) = {1 << (k + 4)}")
    bits = rs_bits(L).astype(np.uint64)
    n_win = L - k + 1
    codes = np.zeros(n_win, dtype=np.uint64)
    for j in range(k):
        codes |= bits[j:j + n_win] << np.uint64(j)
    full = len(np.unique(codes))
    half = len(np.unique(codes[: n_win // 2]))
    if half != full:
        warnings.warn(f"factor count still growing at L={L} (k={k}: {half} -> {full})",
                      InsufficientWindowWarning, stacklevel=2)
    return full


SQRT_PROPERTY_CONSTANT = (2 + math.sqrt(2)) * math.sqrt(3 / 5)


def sup_norm_grid(N: int, G: int) -> float:
    """``max_j |sum_{n<N} r_n e(n j / G)|`` over ``j < G``.

    A lower estimate of the sup over the circle. All ``G`` points at once via
    a zero-padded FFT; ``r_n`` is real so the FFT sign convention is immaterial.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if G < 4 * N:
        raise ValueError("grid must have at least 4N points")
    spec = np.fft.fft(rs_sequence(N).astype(np.float64), n=G)
    return float(np.abs(spec).max())


def trig_poly_value(N: int, theta: float) -> complex:
    """``sum_{n<N} r_n e(n theta)`` by direct evaluation."""
    n = np.arange(N)
    return complex(np.sum(rs_sequence(N) * np.exp(2j * np.pi * theta * n)))
