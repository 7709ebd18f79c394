"""Rudin-Shapiro correlation sums along primes.

Sums whose phases are all multiples of 1/2 are computed exactly as integers;
everything else is accumulated as complex numbers with ``math.fsum`` over the
real and imaginary parts, which makes the result independent of how the prime
range was split between workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .digital import (AlphaVector, as_u64, direct_phase_array, phase_decompose_array,
                      r01_array, r11_array, s2_array, v2_array)
from .primes import PrimeTable

KINDS = ("consecutive", "pair")


def e(x: float) -> complex:
    x = x - math.floor(x)
    return complex(math.cos(2 * math.pi * x), math.sin(2 * math.pi * x))


def _chunks(arr: np.ndarray, workers: int) -> list[np.ndarray]:
    if workers <= 1 or len(arr) < 2 * workers:
        return [arr]
    return np.array_split(arr, workers)


def _map(fn: Callable, arr: np.ndarray, workers: int) -> list:
    parts = _chunks(arr, workers)
    if len(parts) == 1:
        return [fn(parts[0])]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, parts))


def _offsets(k: int, kind: str) -> tuple[int, ...]:
    if kind == "consecutive":
        return tuple(range(k + 1))
    if kind == "pair":
        return (0, k)
    raise ValueError(f"kind must be one of {KINDS}")


def _sign_terms(n: np.ndarray, offsets: Sequence[int], func=r11_array) -> np.ndarray:
    """``(-1)**sum_j func(n + off_j)`` as int8."""
    par = np.zeros(len(n), dtype=np.int64)
    for off in offsets:
        par ^= func(n + np.uint64(off))
    return (1 - 2 * (par & 1)).astype(np.int8)


def _sign_sum(n: np.ndarray, offsets: Sequence[int], workers: int = 1, func=r11_array) -> int:
    # pair with k=0 lists offset 0 twice and the parities cancel, as they should
    return sum(_map(lambda part: int(_sign_terms(part, offsets, func).sum(dtype=np.int64)),
                    n, workers))


def _primes_upto(table: PrimeTable, N: int) -> np.ndarray:
    if N > table.limit:
        raise ValueError(f"N={N} exceeds table limit {table.limit}")
    return table.primes(2, N)


def s_k_sum(table: PrimeTable, N: int, k: int, workers: int = 1) -> int:
    """``sum_{p<=N} r_p r_{p+1} ... r_{p+k}``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _sign_sum(_primes_upto(table, N), _offsets(k, "consecutive"), workers)


def u_k_sum(table: PrimeTable, N: int, k: int, workers: int = 1) -> int:
    """``sum_{p<=N} r_p r_{p+k}``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _sign_sum(_primes_upto(table, N), _offsets(k, "pair"), workers)


def _fsum_unit(phases: Callable[[np.ndarray], np.ndarray], n: np.ndarray,
               workers: int, weights: np.ndarray | None = None) -> complex:
    def part(chunk):
        x = phases(chunk)
        x = 2 * np.pi * (x - np.floor(x))
        return np.cos(x), np.sin(x)

    parts = _map(part, n, workers)
    re = np.concatenate([p[0] for p in parts])
    im = np.concatenate([p[1] for p in parts])
    if weights is not None:
        re, im = re * weights, im * weights
    return complex(math.fsum(re), math.fsum(im))


def s_alpha_sum(table: PrimeTable, N: int, alpha: AlphaVector | Sequence[float],
                workers: int = 1, route: str = "direct") -> int | complex:
    """``sum_{p<=N} e(alpha_0 r11(p) + ... + alpha_k r11(p+k))``.

    Half-integral ``alpha`` takes the exact path and returns an ``int``.
    ``route="decomposed"`` forces the complex path and rebuilds each phase from
    ``r11(p)``, valuations and deltas instead of the ``r11(p+i)`` directly.
    """
    alpha = alpha if isinstance(alpha, AlphaVector) else AlphaVector(alpha)
    ps = _primes_upto(table, N)
    if route == "direct":
        if alpha.is_half_integral():
            coeffs = alpha.half_coefficients()
            return _sign_sum(ps, [i for i, c in enumerate(coeffs) if c], workers)
        return _fsum_unit(lambda n: direct_phase_array(alpha, n), ps, workers)
    if route == "decomposed":
        return _fsum_unit(lambda n: phase_decompose_array(alpha, n), ps, workers)
    raise ValueError(f"unknown route {route!r}")


def psi_terms(table: PrimeTable, N: int, alpha: AlphaVector | Sequence[float]):
    """Prime powers ``n <= N`` with ``Lambda(n)`` and ``e(phase(n))``."""
    alpha = alpha if isinstance(alpha, AlphaVector) else AlphaVector(alpha)
    if N > table.limit:
        raise ValueError(f"N={N} exceeds table limit {table.limit}")
    lam = table.mangoldt_table(N)
    n = np.flatnonzero(lam)
    x = direct_phase_array(alpha, n.astype(np.uint64))
    x = 2 * np.pi * (x - np.floor(x))
    return n, lam[n], np.exp(1j * x)


def psi_sum(table: PrimeTable, N: int, alpha: AlphaVector | Sequence[float]) -> complex:
    """``sum_{n<=N} Lambda(n) e(alpha_0 r11(n) + ... + alpha_k r11(n+k))``."""
    _, w, z = psi_terms(table, N, alpha)
    return complex(math.fsum(w * z.real), math.fsum(w * z.imag))


def psi_running_max(table: PrimeTable, N: int, alpha) -> float:
    """``max_{m<=N} |Psi(m)|``."""
    _, w, z = psi_terms(table, N, alpha)
    if not len(w):
        return 0.0
    return float(np.abs(np.cumsum(w * z)).max())


def v_ba_sum(table: PrimeTable, N: int, b: Sequence[float], a: Sequence[float],
             workers: int = 1) -> complex:
    """``sum_{2<p<=N} e(sum_i b_i v2(p+i) + sum_i a_i delta(p,i))``."""
    if len(a) != len(b) or not len(a):
        raise ValueError("a and b must be nonempty and of equal length")
    if N > table.limit:
        raise ValueError(f"N={N} exceeds table limit {table.limit}")
    ps = table.primes(3, N)

    def phase(n):
        base = r01_array(n)
        out = np.zeros(len(n))
        for i, (bi, ai) in enumerate(zip(b, a), start=1):
            ni = n + np.uint64(i)
            if bi:
                out += bi * v2_array(ni)
            if ai:
                out += ai * (base - r01_array(ni))
        return out

    return _fsum_unit(phase, ps, workers)


def s_alpha_via_v(table: PrimeTable, N: int, alpha: AlphaVector | Sequence[float],
                  workers: int = 1) -> complex:
    """``S_alpha(N)`` rebuilt as ``e(tilde_alpha) V_{b,a}(N)`` plus the ``p = 2`` term.

    Needs ``alpha_0 + ... + alpha_k`` to be an integer; then ``b_i`` is minus
    the tail sum ``alpha_i + ... + alpha_k`` and ``a = (alpha_1, ..., alpha_k)``.
    """
    alpha = alpha if isinstance(alpha, AlphaVector) else AlphaVector(alpha)
    t0 = alpha.tilde_alpha_sub(0)
    if abs(t0 - round(t0)) > 1e-12:
        raise ValueError("the total alpha_0 + ... + alpha_k must be an integer")
    b = [-alpha.tilde_alpha_sub(i) for i in range(1, alpha.k + 1)]
    a = list(alpha.components[1:])
    out = e(alpha.tilde_alpha) * v_ba_sum(table, N, b, a, workers)
    if N >= 2:
        two = np.array([2], dtype=np.uint64)
        out += e(float(direct_phase_array(alpha, two)[0]))
    return out


@dataclass(frozen=True)
class ConvergencePoint:
    N: int
    k: int
    raw: int
    pi_N: int

    @property
    def ratio(self) -> float:
        return self.raw / self.pi_N if self.pi_N else 0.0


def convergence_table(table: PrimeTable, k: int, kind: str, grid: Sequence[int],
                      workers: int = 1) -> list[ConvergencePoint]:
    """Normalised ``S_k`` (``kind="consecutive"``) or ``U_k`` (``kind="pair"``)
    at each ``N`` of an increasing grid, from a single sweep over the primes."""
    grid = [int(g) for g in grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be nonempty and strictly increasing")
    ps = _primes_upto(table, grid[-1])
    offsets = _offsets(k, kind)
    terms = np.concatenate(_map(lambda part: _sign_terms(part, offsets), ps, workers))
    running = np.cumsum(terms, dtype=np.int64)
    out = []
    for N in grid:
        cnt = int(np.searchsorted(ps, N, side="right"))
        raw = int(running[cnt - 1]) if cnt else 0
        out.append(ConvergencePoint(N, k, raw, cnt))
    return out


_FUNCS = {"r11": r11_array, "s2": s2_array}


def odd_integer_sum(N: int, k: int, kind: str = "consecutive", func: str = "r11") -> int:
    """``sum_{n<=N, n odd} (-1)**(f(n) + ... + f(n+k))`` (or ``f(n) + f(n+k)``
    for ``kind="pair"``), with ``f`` one of ``r11``, ``s2``."""
    if func not in _FUNCS:
        raise ValueError(f"func must be one of {sorted(_FUNCS)}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    offsets = _offsets(k, kind)
    total = 0
    step = 1 << 21
    for lo in range(1, N + 1, step):
        n = np.arange(lo, min(lo + step, N + 1), 2, dtype=np.uint64)
        total += _sign_sum(n, offsets, func=_FUNCS[func])
    return total
