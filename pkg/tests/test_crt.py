import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nttssp import crt
from nttssp.she import build_params, decrypt, encrypt, he_mult, keygen
from nttssp.serialize import FormatError, dump_batch, load_batch
from oracles import crt_bruteforce, is_prime_trial, negacyclic, order


def test_crt_example():
    bp = crt.BatchParams(((3, 1), (5, 1)))
    assert bp.t == 15
    a = crt.crt_encode([[2], [3]], bp)
    assert a.to_list() == [8]
    assert [r.to_list() for r in crt.crt_decode(a, bp)] == [[2], [3]]


@given(st.sampled_from([((3, 1), (5, 1), (7, 1)), ((2, 2), (3, 2)), ((5, 2), (7, 1), (11, 1))]), st.data())
def test_crt_vs_bruteforce(factors, data):
    bp = crt.BatchParams(factors)
    res = [data.draw(st.lists(st.integers(0, m - 1), min_size=4, max_size=4)) for m in bp.moduli]
    enc = crt.crt_encode(res, bp).to_list()
    assert enc == [crt_bruteforce([r[j] for r in res], list(bp.moduli)) for j in range(4)]
    assert [r.to_list() for r in crt.crt_decode(enc, bp)] == res


def test_batch_params_validation():
    with pytest.raises(ValueError):
        crt.BatchParams(((3, 3),))
    with pytest.raises(ValueError):
        crt.BatchParams(((9, 1),))
    with pytest.raises(ValueError):
        crt.BatchParams(((3, 1), (3, 2)))


def test_slot_condition_examples():
    assert crt.check_slot_condition(3, 2)
    assert not crt.check_slot_condition(5, 2)
    assert crt.check_slot_condition(7, 2)
    assert crt.check_slot_condition(5, 1)
    with pytest.raises(ValueError):
        crt.check_slot_condition(5, 3)


def test_slot_condition_exhaustive():
    for p in range(3, 1000):
        if not is_prime_trial(p):
            continue
        assert crt.check_slot_condition(p, 2) == (p % 4 == 3)
        for k in (4, 8, 16):
            assert crt.check_slot_condition(p, k) == (order(p % (2 * k), 2 * k) == k)


def test_layout_requires_split_factors():
    with pytest.raises(crt.PackingError):
        crt.make_layout(crt.BatchParams(((3, 2), (7, 2))), 64)


@pytest.mark.parametrize("factors", [((257, 1), (641, 1)), ((17, 2), (97, 1))])
def test_layout_round_trip(factors, rng):
    n = 8
    bp = crt.BatchParams(factors)
    lay = crt.make_layout(bp, n)
    assert lay.slots == bp.m * n
    vals = [rng.integers(0, m, n).tolist() for m in bp.moduli]
    assert lay.unpack(lay.pack(vals)) == vals


def test_plain_slot_products(rng):
    n = 16
    bp = crt.BatchParams(((97, 1), (193, 1)))
    lay = crt.make_layout(bp, n)
    x = [rng.integers(0, m, n).tolist() for m in bp.moduli]
    y = [rng.integers(0, m, n).tolist() for m in bp.moduli]
    a, b = lay.pack(x), lay.pack(y)
    prod = negacyclic(a.to_list(), b.to_list(), bp.t)
    assert lay.unpack(prod) == [[u * v % m for u, v in zip(r, s)] for r, s, m in zip(x, y, bp.moduli)]


def test_encrypted_batching(rng):
    n = 64
    bp = crt.BatchParams(((257, 1), (641, 1)))
    lay = crt.make_layout(bp, n)
    p = build_params(n, bp.t)
    sk, pk = keygen(p, rng)
    for _ in range(100):
        x = [rng.integers(0, m, n).tolist() for m in bp.moduli]
        y = [rng.integers(0, m, n).tolist() for m in bp.moduli]
        cx, cy = encrypt(pk, lay.pack(x), p, rng), encrypt(pk, lay.pack(y), p, rng)
        out = lay.unpack(decrypt(sk, crt.batched_ew_product(cx, cy, lay, p), p))
        assert out == [[u * v % m for u, v in zip(r, s)] for r, s, m in zip(x, y, bp.moduli)]
        out = lay.unpack(decrypt(sk, crt.batched_add(cx, cy), p))
        assert out == [[(u + v) % m for u, v in zip(r, s)] for r, s, m in zip(x, y, bp.moduli)]


def test_batched_product_checks(rng):
    bp = crt.BatchParams(((17, 1), (97, 1)))
    lay = crt.make_layout(bp, 8)
    p = build_params(8, 65537)
    sk, pk = keygen(p, rng)
    ct = encrypt(pk, [0] * 8, p, rng)
    with pytest.raises(crt.PackingError):
        crt.batched_ew_product(ct, ct, lay, p)
    with pytest.raises(crt.PackingError):
        lay.pack([[0] * 8])


def test_batch_serialization():
    bp = crt.BatchParams(((257, 1), (3, 2)))
    assert load_batch(dump_batch(bp)) == bp
    with pytest.raises(FormatError):
        load_batch(b"XXXX" + dump_batch(bp)[4:])
