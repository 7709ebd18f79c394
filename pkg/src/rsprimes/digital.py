"""Block-digital functions of the binary expansion.

Scalar functions take Python ints (any size); the ``*_array`` kernels take
``uint64`` arrays and are what the sweeps use.

    r11(n)  number of blocks ``11`` in (n)_2
    r01(n)  number of blocks ``01`` in 0(n)_2, i.e. counting the block
            formed by a leading zero and the most significant digit
    s2(n)   sum of binary digits

Together they satisfy ``s2 = r11 + r01`` and ``n = r11 + v2(n!) + r01``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

_ONE = np.uint64(1)


def r11(n: int) -> int:
    return (n & (n >> 1)).bit_count()


def r01(n: int) -> int:
    # bit i set and bit i+1 clear; above the MSB every bit of n>>1 is clear
    return (n & ~(n >> 1)).bit_count()


def s2(n: int) -> int:
    return n.bit_count()


def v2(n: int) -> int:
    """2-adic valuation of ``n``; ``n`` must be positive."""
    if n <= 0:
        raise ValueError(f"v2 is undefined for n={n}")
    return ((n & -n) - 1).bit_length()


def v2_factorial(n: int) -> int:
    """v2(n!) by Legendre's formula, ``n - s2(n)``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return n - s2(n)


def delta(n: int, i: int) -> int:
    return r01(n) - r01(n + i)


@dataclass(frozen=True)
class ValuationCase:
    """Shape of ``n+1`` modulo ``2**(u+2)``: ``n+1 = 2**u + eps*2**(u+1)``."""

    u: int
    epsilon: int
    delta: int


def delta_case(n: int) -> ValuationCase:
    """Classify ``n`` by the low bits of ``n+1`` and read off ``delta(n, 1)``.

    The value comes from the case table, not from ``r01``; tests check the
    two agree.
    """
    m = n + 1
    u = v2(m)
    eps = (m >> (u + 1)) & 1
    if u == 0:
        d = 0 if eps else -1
    else:
        d = 1 if eps else 0
    return ValuationCase(u, eps, d)


def r11_step(n: int) -> int:
    """``r11(n+1)`` computed from data at ``n`` via the one-step recursion."""
    return r11(n) + 1 - v2(n + 1) + delta(n, 1)


def r11_iterate(n: int, i: int) -> int:
    """``r11(n+i)`` via the i-step recursion."""
    if i < 1:
        raise ValueError("i must be positive")
    return r11(n) + i - sum(v2(n + j) for j in range(1, i + 1)) + delta(n, i)


def nearest_int_norm(x: float) -> float:
    """Distance from ``x`` to the nearest integer, in ``[0, 1/2]``."""
    return abs(x - round(x))


@dataclass(frozen=True)
class AlphaVector:
    """Phase vector ``(alpha_0, ..., alpha_k)`` measured in cycles."""

    components: tuple[float, ...]

    def __init__(self, components: Sequence[float]):
        comps = tuple(float(a) for a in components)
        if len(comps) < 2:
            raise ValueError("need at least two components (k >= 1)")
        object.__setattr__(self, "components", comps)

    @property
    def k(self) -> int:
        return len(self.components) - 1

    def __getitem__(self, i: int) -> float:
        return self.components[i]

    @property
    def tilde_alpha(self) -> float:
        return sum(j * a for j, a in enumerate(self.components))

    def tilde_alpha_sub(self, i: int) -> float:
        """Tail sum ``alpha_i + ... + alpha_k``."""
        if not 0 <= i <= self.k:
            raise IndexError(i)
        return sum(self.components[i:])

    def is_half_integral(self) -> bool:
        return all(float(2 * a).is_integer() for a in self.components)

    def half_coefficients(self) -> list[int]:
        """Integers ``c_i`` with ``alpha_i = c_i / 2``, reduced mod 2."""
        if not self.is_half_integral():
            raise ValueError("alpha is not half-integral")
        return [int(2 * a) % 2 for a in self.components]


def direct_phase(alpha: AlphaVector, n: int) -> float:
    return sum(a * r11(n + i) for i, a in enumerate(alpha.components))


def phase_decompose(alpha: AlphaVector, n: int) -> float:
    """The same phase as :func:`direct_phase`, up to an integer, rebuilt from
    ``r11(n)``, valuations and deltas only."""
    k = alpha.k
    out = alpha.tilde_alpha + alpha.tilde_alpha_sub(0) * r11(n)
    out -= sum(alpha.tilde_alpha_sub(i) * v2(n + i) for i in range(1, k + 1))
    out += sum(alpha[i] * delta(n, i) for i in range(1, k + 1))
    return out


def phases_agree(x: float, y: float, tol: float = 1e-9) -> bool:
    return nearest_int_norm(x - y) < tol


# -- uint64 kernels ---------------------------------------------------------

def as_u64(n) -> np.ndarray:
    arr = np.asarray(n)
    if arr.dtype != np.uint64:
        if arr.size and arr.min() < 0:
            raise ValueError("negative input")
        arr = arr.astype(np.uint64)
    return arr


def r11_array(n) -> np.ndarray:
    n = as_u64(n)
    return np.bitwise_count(n & (n >> _ONE)).astype(np.int64)


def r01_array(n) -> np.ndarray:
    n = as_u64(n)
    return np.bitwise_count(n & ~(n >> _ONE)).astype(np.int64)


def s2_array(n) -> np.ndarray:
    return np.bitwise_count(as_u64(n)).astype(np.int64)


def v2_array(n) -> np.ndarray:
    n = as_u64(n)
    if n.size and not n.all():
        raise ValueError("v2 is undefined at 0")
    low = n & (~n + _ONE)
    return np.bitwise_count(low - _ONE).astype(np.int64)


def delta_array(n, i: int) -> np.ndarray:
    n = as_u64(n)
    return r01_array(n) - r01_array(n + np.uint64(i))


def delta_case_array(n) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`delta_case`; returns ``(u, epsilon, delta)``."""
    m = as_u64(n) + _ONE
    u = v2_array(m)
    eps = ((m >> (u + 1).astype(np.uint64)) & _ONE).astype(np.int64)
    d = np.where(u == 0, eps - 1, eps)
    return u, eps, d


def direct_phase_array(alpha: AlphaVector, n) -> np.ndarray:
    n = as_u64(n)
    out = np.zeros(n.shape, dtype=np.float64)
    for i, a in enumerate(alpha.components):
        if a:
            out += a * r11_array(n + np.uint64(i))
    return out


def phase_decompose_array(alpha: AlphaVector, n) -> np.ndarray:
    n = as_u64(n)
    out = alpha.tilde_alpha + alpha.tilde_alpha_sub(0) * r11_array(n).astype(np.float64)
    for i in range(1, alpha.k + 1):
        ni = n + np.uint64(i)
        out -= alpha.tilde_alpha_sub(i) * v2_array(ni)
        out += alpha[i] * (r01_array(n) - r01_array(ni))
    return out


def r11_step_array(n) -> np.ndarray:
    n = as_u64(n)
    n1 = n + _ONE
    return r11_array(n) + 1 - v2_array(n1) + (r01_array(n) - r01_array(n1))


def r11_iterate_array(n, i: int) -> np.ndarray:
    n = as_u64(n)
    out = r11_array(n) + i + (r01_array(n) - r01_array(n + np.uint64(i)))
    for j in range(1, i + 1):
        out -= v2_array(n + np.uint64(j))
    return out
