"""Segmented sieve of Eratosthenes, prime counting and the von Mangoldt function."""
from __future__ import annotations

import math
import struct
import zlib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterator

import numpy as np

MAX_LIMIT = 1 << 40
CHECKPOINT_STRIDE = 1 << 16
# odd numbers per segment; 2**18 bools sits comfortably in L2
SEGMENT_ODDS = 1 << 18

CACHE_MAGIC = b"BCSV1"
_HEADER = struct.Struct("<Q")
_CRC = struct.Struct("<I")


class ResourceLimitError(RuntimeError):
    pass


class SieveCacheError(ValueError):
    pass


def _small_primes(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags)


def _sieve_segment(out: np.ndarray, j0: int, j1: int, base: np.ndarray) -> None:
    # out[j] says whether 2j+1 is prime, for j in [j0, j1)
    seg = out[j0:j1]
    seg[:] = True
    lo = 2 * j0 + 1
    hi = 2 * (j1 - 1) + 1
    for p in base:
        p = int(p)
        pp = p * p
        if pp > hi:
            break
        start = max(pp, ((lo + p - 1) // p) * p)
        if start % 2 == 0:
            start += p
        seg[(start - lo) // 2::p] = False
    if j0 == 0:
        seg[0] = False  # 1 is not prime


def _odd_flags(limit: int, workers: int = 1) -> np.ndarray:
    n_odd = (limit + 1) // 2
    base = _small_primes(math.isqrt(limit) + 1)[1:]  # odd base primes
    out = np.empty(n_odd, dtype=bool)
    bounds = [(j, min(j + SEGMENT_ODDS, n_odd)) for j in range(0, n_odd, SEGMENT_ODDS)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(lambda b: _sieve_segment(out, b[0], b[1], base), bounds))
    else:
        for j0, j1 in bounds:
            _sieve_segment(out, j0, j1, base)
    return out


class PrimeTable:
    """Primality, ``pi(x)`` and prime ranges for every integer up to ``limit``.

    Only odd numbers are stored; ``pi`` is answered from checkpoints every
    ``CHECKPOINT_STRIDE`` integers plus a short scan.
    """

    def __init__(self, limit: int, odd_prime: np.ndarray):
        self.limit = limit
        self._odd = odd_prime
        self._odd.flags.writeable = False
        self._primes: np.ndarray | None = None
        # checkpoints[c] = pi(c * STRIDE)
        n_cp = limit // CHECKPOINT_STRIDE + 1
        half = CHECKPOINT_STRIDE // 2
        padded = np.zeros(n_cp * half, dtype=np.int64)
        # index j <-> 2j+1, and (c*STRIDE - 1)//2 is the last odd index <= c*STRIDE
        src = odd_prime[: min(len(odd_prime), len(padded))]
        padded[: len(src)] = src
        blocks = padded.reshape(n_cp, half).sum(axis=1)
        cp = np.concatenate(([0], np.cumsum(blocks)[:-1]))
        cp[1:] += 1  # the prime 2
        self.checkpoints = cp
        self.checkpoints.flags.writeable = False

    def __repr__(self):
        return f"PrimeTable(limit={self.limit})"

    def _check(self, x: int) -> None:
        if not 0 <= x <= self.limit:
            raise ValueError(f"{x} outside [0, {self.limit}]")

    def is_prime(self, n: int) -> bool:
        self._check(n)
        if n < 3:
            return n == 2
        return bool(n & 1) and bool(self._odd[n >> 1])

    def pi(self, x: int) -> int:
        self._check(x)
        c = x // CHECKPOINT_STRIDE
        base = c * CHECKPOINT_STRIDE
        total = int(self.checkpoints[c])
        if base < 2 <= x:
            total += 1
        # odd numbers in (base, x]
        j0 = (base + 1) // 2 if base else 0
        j1 = (x + 1) // 2
        return total + int(np.count_nonzero(self._odd[j0:j1]))

    def primes(self, lo: int = 2, hi: int | None = None) -> np.ndarray:
        """Primes in ``[lo, hi]`` as a ``uint64`` array."""
        hi = self.limit if hi is None else hi
        self._check(hi)
        if self._primes is None:
            odd = 2 * np.flatnonzero(self._odd).astype(np.uint64) + np.uint64(1)
            two = np.array([2], dtype=np.uint64) if self.limit >= 2 else odd[:0]
            self._primes = np.concatenate((two, odd))
            self._primes.flags.writeable = False
        a = np.searchsorted(self._primes, max(lo, 0), side="left")
        b = np.searchsorted(self._primes, hi, side="right")
        return self._primes[a:b]

    def iterate_primes(self, lo: int, hi: int) -> Iterator[int]:
        """Stream primes in ``[lo, hi]`` in increasing order, segment by segment."""
        self._check(hi)
        if lo <= 2 <= hi:
            yield 2
        j = max(lo, 3) // 2
        j_end = (hi + 1) // 2
        while j < j_end:
            j1 = min(j + SEGMENT_ODDS, j_end)
            for idx in np.flatnonzero(self._odd[j:j1]):
                yield 2 * (j + int(idx)) + 1
            j = j1

    def pi_ap(self, x: int, m: int, residue: int) -> int:
        """Number of primes ``p <= x`` with ``p % m == residue``."""
        self._check(x)
        if m < 1 or not 0 <= residue < m:
            raise ValueError("need m >= 1 and 0 <= residue < m")
        ps = self.primes(2, x)
        return int(np.count_nonzero(ps % np.uint64(m) == np.uint64(residue)))

    def mangoldt_table(self, n: int | None = None) -> np.ndarray:
        """``Lambda(0..n)`` as a float array (index 0 holds 0)."""
        n = self.limit if n is None else n
        self._check(n)
        lam = np.zeros(n + 1, dtype=np.float64)
        ps = self.primes(2, n)
        logs = np.log(ps.astype(np.float64))
        power = ps.copy()
        keep = np.ones(len(ps), dtype=bool)
        while keep.any():
            lam[power[keep].astype(np.int64)] = logs[keep]
            with np.errstate(over="ignore"):
                nxt = power * ps
            keep = keep & (power <= np.uint64(n) // ps) & (nxt <= np.uint64(n))
            power = nxt
        return lam

    # -- cache file ------------------------------------------------------

    def save(self, path: str | Path) -> None:
        bits = np.packbits(~self._odd, bitorder="little").tobytes()
        with open(path, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(_HEADER.pack(self.limit))
            fh.write(bits)
            fh.write(_CRC.pack(zlib.crc32(bits)))

    @classmethod
    def load(cls, path: str | Path) -> "PrimeTable":
        raw = Path(path).read_bytes()
        head = len(CACHE_MAGIC) + _HEADER.size
        if raw[: len(CACHE_MAGIC)] != CACHE_MAGIC:
            raise SieveCacheError("bad magic")
        if len(raw) < head + _CRC.size:
            raise SieveCacheError("truncated cache file")
        (limit,) = _HEADER.unpack_from(raw, len(CACHE_MAGIC))
        bits = raw[head:-_CRC.size]
        (crc,) = _CRC.unpack_from(raw, len(raw) - _CRC.size)
        if zlib.crc32(bits) != crc:
            raise SieveCacheError("CRC mismatch")
        n_odd = (limit + 1) // 2
        if len(bits) != (n_odd + 7) // 8:
            raise SieveCacheError("payload length does not match limit")
        composite = np.unpackbits(np.frombuffer(bits, dtype=np.uint8),
                                  count=n_odd, bitorder="little").astype(bool)
        return cls(limit, ~composite)


def build_table(limit: int, workers: int = 1) -> PrimeTable:
    if limit < 2:
        raise ValueError("limit must be at least 2")
    if limit > MAX_LIMIT:
        raise ResourceLimitError(f"limit {limit} exceeds ceiling 2**40")
    return PrimeTable(limit, _odd_flags(limit, workers))


def load_or_build(limit: int, cache: str | Path | None = None,
                  workers: int = 1) -> PrimeTable:
    """Reuse a cached table covering ``limit`` if there is one, else build and cache."""
    if cache is not None and Path(cache).exists():
        table = PrimeTable.load(cache)
        if table.limit >= limit:
            return table
    table = build_table(limit, workers)
    if cache is not None:
        table.save(cache)
    return table


def _is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def integer_root(n: int, k: int) -> int:
    """Largest ``r`` with ``r**k <= n``."""
    if n < 2 or k == 1:
        return n
    r = int(round(n ** (1.0 / k)))
    while r ** k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def mangoldt(n: int) -> float:
    """``log p`` if ``n`` is a power of the prime ``p``, else 0."""
    if n < 1:
        raise ValueError("mangoldt is defined for n >= 1")
    if n == 1:
        return 0.0
    # the largest exponent with an exact root leaves a base that is not a power
    for k in range(n.bit_length(), 0, -1):
        r = integer_root(n, k)
        if r >= 2 and r ** k == n:
            return math.log(r) if _is_prime_trial(r) else 0.0
    return 0.0
