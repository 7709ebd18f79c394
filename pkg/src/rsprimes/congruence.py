"""Congruence machinery: CRT for non-coprime moduli, the valuation systems
``p + i = 2**u_i + eps_i * 2**(u_i+1)  (mod 2**(u_i+2))`` and the set of
delta vectors realised by primes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .digital import as_u64, r01_array, v2, v2_array
from .primes import PrimeTable

LCM_CEILING = 1 << 63
MAX_LAMBDA_K = 12


@dataclass(frozen=True)
class ResidueClass:
    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1 or not 0 <= self.residue < self.modulus:
            raise ValueError(f"invalid residue class {self.residue} mod {self.modulus}")

    def __contains__(self, x: int) -> bool:
        return x % self.modulus == self.residue


@dataclass(frozen=True)
class CongruenceSystem:
    """Congruences ``x = a (mod m)`` for each ``(a, m)`` in ``equations``."""

    equations: tuple[tuple[int, int], ...]

    def __init__(self, equations: Iterable[tuple[int, int]]):
        eqs = tuple((int(a), int(m)) for a, m in equations)
        for _, m in eqs:
            if m < 1:
                raise ValueError("moduli must be positive")
        object.__setattr__(self, "equations", eqs)

    def __len__(self):
        return len(self.equations)

    def satisfied_by(self, x: int) -> bool:
        return all((x - a) % m == 0 for a, m in self.equations)


def crt_solve(system: CongruenceSystem) -> ResidueClass | None:
    """Merge the congruences pairwise; ``None`` if they are inconsistent.

    Raises ``OverflowError`` if the combined modulus passes ``2**63``.
    """
    if not len(system):
        raise ValueError("empty system")
    r, m = 0, 1
    for a, n in system.equations:
        a %= n
        g = math.gcd(m, n)
        if (a - r) % g:
            return None
        lcm = m // g * n
        if lcm > LCM_CEILING:
            raise OverflowError(f"modulus {lcm} exceeds 2**63")
        if n // g > 1:
            t = (a - r) // g * pow(m // g, -1, n // g) % (n // g)
            r += m * t
        r %= lcm
        m = lcm
    return ResidueClass(r, m)


def brute_force_solutions(system: CongruenceSystem) -> list[int]:
    """All solutions in ``[0, lcm)``, by scanning."""
    lcm = math.lcm(*(m for _, m in system.equations))
    if lcm > 1 << 26:
        raise ValueError(f"scan range {lcm} too large")
    x = np.arange(lcm, dtype=np.int64)
    ok = np.ones(lcm, dtype=bool)
    for a, m in system.equations:
        ok &= (x - a) % m == 0
    return np.flatnonzero(ok).tolist()


def valuation_residue(u: int, eps: int, i: int) -> tuple[int, int]:
    m = 1 << (u + 2)
    return ((1 << u) + eps * (1 << (u + 1)) - i) % m, m


def build_paper_system(u: Sequence[int], eps: Sequence[int]) -> CongruenceSystem:
    """System for ``p + i = 2**u_i + eps_i*2**(u_i+1) (mod 2**(u_i+2))``, i = 1..k."""
    if len(u) != len(eps) or not u:
        raise ValueError("u and eps must be nonempty and of equal length")
    if any(e not in (0, 1) for e in eps) or any(x < 0 for x in u):
        raise ValueError("need u_i >= 0 and eps_i in {0, 1}")
    return CongruenceSystem(valuation_residue(ui, ei, i)
                            for i, (ui, ei) in enumerate(zip(u, eps), start=1))


def pairwise_condition(u: Sequence[int], eps: Sequence[int]) -> bool:
    """Pairwise compatibility of the targets modulo ``2**(min(u_j, u_l)+2)``."""
    targets = [(1 << ui) + ei * (1 << (ui + 1)) - i
               for i, (ui, ei) in enumerate(zip(u, eps), start=1)]
    for j in range(len(u)):
        for l in range(j + 1, len(u)):
            mod = 1 << (min(u[j], u[l]) + 2)
            if (targets[j] - targets[l]) % mod:
                return False
    return True


def valuation_profile(p: int, k: int) -> tuple[int, list[int]]:
    """``u_j = v2(p+j)`` for ``j = 1..k`` and the (first) index of the maximum."""
    if p <= 2 or p % 2 == 0:
        raise ValueError("p must be an odd prime")
    if k < 2:
        raise ValueError("k must be at least 2")
    u = [v2(p + j) for j in range(1, k + 1)]
    i = u.index(max(u)) + 1
    return i, u


def profile_threshold(k: int) -> int:
    """``floor(log2(k-1))``."""
    return (k - 1).bit_length() - 1


@dataclass
class ProfileReport:
    k: int
    checked: int = 0
    above_threshold: int = 0
    at_threshold: int = 0
    non_unique_max: int = 0
    even_index: int = 0
    profile_mismatch: int = 0
    conditional_failures: int = 0

    @property
    def ok(self) -> bool:
        return self.conditional_failures == 0


def check_valuation_profiles(primes: np.ndarray, k: int) -> ProfileReport:
    """Check the valuation-profile characterisation on every odd prime given.

    ``conditional_failures`` counts primes whose maximum exceeds
    ``floor(log2(k-1))`` but whose profile is not ``v2(|i-j|)`` off the
    argmax ``i``, or whose argmax is not unique and odd. The other counters
    are diagnostics over all primes.
    """
    ps = as_u64(primes)
    ps = ps[ps > 2]
    u = np.stack([v2_array(ps + np.uint64(j)) for j in range(1, k + 1)], axis=1)
    top = u.max(axis=1)
    i_idx = u.argmax(axis=1)  # 0-based
    unique = (u == top[:, None]).sum(axis=1) == 1
    odd_i = (i_idx % 2) == 0  # i = i_idx + 1
    j = np.arange(k)
    dist = np.abs(j[None, :] - i_idx[:, None])
    expected = np.where(dist == 0, top[:, None], 0)
    nz = dist > 0
    expected[nz] = v2_array(dist[nz].astype(np.uint64))
    matches = (u == expected).all(axis=1)
    thr = profile_threshold(k)
    above = top > thr
    good = unique & odd_i & matches
    return ProfileReport(
        k=k,
        checked=len(ps),
        above_threshold=int(above.sum()),
        at_threshold=int((top == thr).sum()),
        non_unique_max=int((~unique).sum()),
        even_index=int((~odd_i).sum()),
        profile_mismatch=int((~matches).sum()),
        conditional_failures=int((above & ~good).sum()),
    )


def exact_valuation_system(u: Sequence[int]) -> CongruenceSystem:
    """``v2(x + j) = u_j`` exactly, as ``x + j = 2**u_j (mod 2**(u_j+1))``."""
    return CongruenceSystem((((1 << uj) - j) % (1 << (uj + 1)), 1 << (uj + 1))
                            for j, uj in enumerate(u, start=1))


def profile_witness(k: int, i: int, top: int) -> int | None:
    """Smallest ``x >= 0`` whose valuations ``v2(x+j)`` are ``top`` at ``i`` and
    ``v2(|i-j|)`` elsewhere, or ``None`` when no such ``x`` exists."""
    u = [top if j == i else v2(abs(i - j)) for j in range(1, k + 1)]
    sol = crt_solve(exact_valuation_system(u))
    return None if sol is None else sol.residue


# -- delta vectors ---------------------------------------------------------

def delta_matrix(primes: np.ndarray, k: int) -> np.ndarray:
    """Rows ``(delta(p,1), ..., delta(p,k))``."""
    ps = as_u64(primes)
    base = r01_array(ps)
    return np.stack([base - r01_array(ps + np.uint64(i)) for i in range(1, k + 1)],
                    axis=1)


def _odd_primes(table: PrimeTable, N: int, k: int) -> np.ndarray:
    if not 1 <= k <= MAX_LAMBDA_K:
        raise ValueError(f"k must lie in [1, {MAX_LAMBDA_K}]")
    if N > table.limit:
        raise ValueError(f"N={N} exceeds table limit {table.limit}")
    return table.primes(3, N)


def enumerate_lambda_k(table: PrimeTable, k: int, N: int) -> list[tuple[int, ...]]:
    """Distinct delta vectors over primes ``2 < p <= N``, sorted lexicographically."""
    rows = np.unique(delta_matrix(_odd_primes(table, N, k), k), axis=0)
    return [tuple(int(x) for x in r) for r in rows]


def lambda_k_growth(table: PrimeTable, k: int, grid: Sequence[int]) -> list[int]:
    """Cardinality of the delta-vector set for each ``N`` in ``grid``."""
    ps = _odd_primes(table, max(grid), k)
    _, first = np.unique(delta_matrix(ps, k), axis=0, return_index=True)
    first_primes = np.sort(ps[first])
    return [int(np.searchsorted(first_primes, N, side="right")) for N in grid]


def delta_from_system(u: Sequence[int], eps: Sequence[int]) -> tuple[int, ...]:
    """Delta vector forced by a system: partial sums of the one-step table."""
    out, acc = [], 0
    for uj, ej in zip(u, eps):
        acc += (ej - 1) if uj == 0 else ej
        out.append(acc)
    return tuple(out)


def system_of(p: int, k: int) -> tuple[list[int], list[int]]:
    """The ``(u, eps)`` pair whose system ``p`` satisfies."""
    u = [v2(p + j) for j in range(1, k + 1)]
    eps = [((p + j) >> (uj + 1)) & 1 for j, uj in enumerate(u, start=1)]
    return u, eps


@dataclass
class PairingReport:
    systems: int
    sign_failures: int
    count_imbalance: float


def pairing_diagnostic(table: PrimeTable, k: int, N: int, a: Sequence[float]) -> PairingReport:
    """Pair each realised system ``(u, eps)`` with ``(u, eps')``, ``eps'`` flipping
    ``eps_i`` at the argmax index, and test ``e(a.Delta) + e(a.Delta') = 0``.

    ``count_imbalance`` is ``sum |n - n'| / sum (n + n')`` over pairs, where
    ``n`` counts primes in each system.
    """
    counts: dict[tuple, int] = {}
    for p in _odd_primes(table, N, k).tolist():
        u, eps = system_of(p, k)
        key = (tuple(u), tuple(eps))
        counts[key] = counts.get(key, 0) + 1
    a = np.asarray(a, dtype=float)
    failures = 0
    seen: set = set()
    diff = tot = 0
    for (u, eps), n in counts.items():
        i = u.index(max(u))
        flipped = list(eps)
        flipped[i] ^= 1
        d = np.array(delta_from_system(u, eps))
        d2 = np.array(delta_from_system(u, flipped))
        z = np.exp(2j * np.pi * (a @ d)) + np.exp(2j * np.pi * (a @ d2))
        if abs(z) > 1e-9:
            failures += 1
        pair = frozenset([(u, eps), (u, tuple(flipped))])
        if pair not in seen:
            seen.add(pair)
            n2 = counts.get((u, tuple(flipped)), 0)
            diff += abs(n - n2)
            tot += n + n2
    return PairingReport(len(counts), failures, diff / tot if tot else 0.0)
