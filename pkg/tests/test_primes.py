import math

import numpy as np
import pytest

from rsprimes.primes import (MAX_LIMIT, PrimeTable, ResourceLimitError, SieveCacheError,
                             build_table, integer_root, load_or_build, mangoldt)

from oracles import eratosthenes, is_prime_trial


@pytest.fixture(scope="module")
def small():
    return build_table(200_000)


def test_primes_match_reference(small):
    assert small.primes().tolist() == eratosthenes(200_000)


@pytest.mark.parametrize("limit", [2, 3, 10, 65_536, 65_537, 131_071, 524_289])
def test_pi_across_segment_and_checkpoint_edges(limit):
    t = build_table(limit)
    ref = eratosthenes(limit)
    xs = {x for x in (0, 1, 2, 3, limit - 1, limit // 2) if x <= limit} | {limit}
    xs |= {x for x in (65_535, 65_536, 65_537, 131_072) if x <= limit}
    for x in sorted(xs):
        assert t.pi(x) == sum(1 for p in ref if p <= x)


def test_small_values(small):
    assert small.pi(10) == 4
    assert small.pi(100) == 25
    assert small.primes(2, 10).tolist() == [2, 3, 5, 7]
    assert [small.is_prime(n) for n in range(10)] == [is_prime_trial(n) for n in range(10)]


def test_pi_million(table_1e6):
    assert table_1e6.pi(10**6) == 78498


def test_workers_do_not_change_table():
    a, b = build_table(3_000_000, workers=1), build_table(3_000_000, workers=3)
    assert np.array_equal(a.primes(), b.primes())


def test_iterate_primes_matches_array(small):
    assert list(small.iterate_primes(1000, 120_000)) == small.primes(1000, 120_000).tolist()
    assert list(small.iterate_primes(0, 20)) == [2, 3, 5, 7, 11, 13, 17, 19]


@pytest.mark.parametrize("x, m, r, expected", [(20, 4, 1, 3), (20, 4, 3, 4), (100, 3, 0, 1)])
def test_pi_ap(small, x, m, r, expected):
    assert small.pi_ap(x, m, r) == expected


def test_pi_ap_rejects_bad_class(small):
    with pytest.raises(ValueError):
        small.pi_ap(100, 4, 4)


def test_mangoldt_table(small):
    lam = small.mangoldt_table(1000)
    for n in range(1, 1001):
        assert lam[n] == pytest.approx(mangoldt(n))
    assert lam[1] == 0 and lam[12] == 0
    assert lam[8] == pytest.approx(math.log(2))
    assert lam[729] == pytest.approx(math.log(3))


@pytest.mark.parametrize("n, expected", [(1, 0.0), (7, math.log(7)), (12, 0.0),
                                         (3**13, math.log(3)), (2**61 - 1, math.log(2**61 - 1))])
def test_mangoldt_scalar(n, expected):
    assert mangoldt(n) == pytest.approx(expected)


def test_integer_root():
    assert integer_root(10**18, 2) == 10**9
    assert integer_root(10**18 - 1, 2) == 10**9 - 1
    assert integer_root(3**40, 5) == 3**8


def test_range_checks(small):
    with pytest.raises(ValueError):
        small.pi(200_001)
    with pytest.raises(ValueError):
        build_table(1)
    with pytest.raises(ResourceLimitError):
        build_table(MAX_LIMIT + 1)


def test_cache_roundtrip(tmp_path, small):
    path = tmp_path / "sieve.bin"
    small.save(path)
    back = PrimeTable.load(path)
    assert back.limit == small.limit
    assert np.array_equal(back.primes(), small.primes())
    assert path.read_bytes()[:5] == b"BCSV1"


def test_cache_bad_magic(tmp_path, small):
    path = tmp_path / "sieve.bin"
    small.save(path)
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(SieveCacheError):
        PrimeTable.load(path)


def test_cache_bad_crc(tmp_path, small):
    path = tmp_path / "sieve.bin"
    small.save(path)
    raw = bytearray(path.read_bytes())
    raw[40] ^= 0x01
    path.write_bytes(bytes(raw))
    with pytest.raises(SieveCacheError):
        PrimeTable.load(path)


def test_load_or_build_reuses_larger_cache(tmp_path):
    path = tmp_path / "sieve.bin"
    t1 = load_or_build(50_000, path)
    assert path.exists()
    t2 = load_or_build(10_000, path)
    assert t2.limit == 50_000
    assert t2.pi(10_000) == t1.pi(10_000) == 1229
