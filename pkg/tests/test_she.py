import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nttssp.polyring import PolyR
from nttssp.she import (DepthExceeded, ParameterInfeasible, additive_noise_bound, bit_security_from_delta,
                        build_params, decrypt, encrypt, estimate_security, he_add, he_mult, he_sub, keygen,
                        log2_bound, mul_monomial, mul_plain, required_bits)
from oracles import decrypt_formula, monomial_shift, negacyclic


@pytest.fixture(scope="module")
def small():
    p = build_params(64, 257, D=2, A=4)
    rng = np.random.default_rng(7)
    sk, pk = keygen(p, rng)
    return p, sk, pk


def test_tiny_params_round_trip(rng):
    p = build_params(4, 2, 1, 0, 1)
    assert p.qv == 41
    sk, pk = keygen(p, rng)
    for _ in range(50):
        m = rng.integers(0, 2, 4)
        assert decrypt(sk, encrypt(pk, m, p, rng), p).to_list() == m.tolist()


@pytest.mark.parametrize("n,bits", [(1024, 53), (2048, 55), (4096, 56), (8192, 58), (16384, 59)])
def test_reference_modulus_bits(n, bits):
    p = build_params(n, 65537)
    assert p.qv.bit_length() == bits
    assert (p.qv - 1) % (2 * n) == 0
    # q meets the bound exactly
    assert math.log2(p.qv) >= log2_bound(n, 65537)


def test_required_bits_is_tight():
    b = required_bits(1024, 65537)
    assert 2 ** (b - 1) >= 2 ** log2_bound(1024, 65537) > 2 ** (b - 2)


def test_infeasible():
    with pytest.raises(ParameterInfeasible):
        build_params(1024, 65537, D=5)


def test_params_invariants(small):
    p, sk, pk = small
    assert (p.qv - 1) % (2 * p.n) == 0 and math.gcd(p.qv, p.t) == 1
    with pytest.raises(ValueError):
        type(p)(6, p.q, p.t)


def test_pk_consistency(small):
    p, sk, pk = small
    r = (pk.a0 + pk.a1 * sk.s).centered()
    assert all(v % p.t == 0 and abs(v // p.t) <= 6 for v in r)


def test_keygens_differ(small):
    p, _, _ = small
    rng = np.random.default_rng(0)
    assert keygen(p, rng)[0].s != keygen(p, rng)[0].s


def test_round_trip_and_freshness(small, rng):
    p, sk, pk = small
    for _ in range(1000):
        m = rng.integers(0, p.t, p.n)
        assert decrypt(sk, encrypt(pk, m, p, rng), p).to_list() == m.tolist()
    z = np.zeros(p.n, dtype=np.int64)
    assert decrypt(sk, encrypt(pk, z, p, rng), p).to_list() == z.tolist()
    c1, c2 = encrypt(pk, z, p, rng), encrypt(pk, z, p, rng)
    assert c1.polys[0] != c2.polys[0]


def test_encrypt_dimension_mismatch(small, rng):
    p, sk, pk = small
    with pytest.raises(ValueError):
        encrypt(pk, [1, 2, 3], p, rng)


def test_homomorphisms(small, rng):
    p, sk, pk = small
    for _ in range(30):
        a, b = rng.integers(0, p.t, p.n), rng.integers(0, p.t, p.n)
        ca, cb = encrypt(pk, a, p, rng), encrypt(pk, b, p, rng)
        s = he_add(ca, cb)
        assert decrypt(sk, s, p).to_list() == ((a + b) % p.t).tolist()
        pr = he_mult(ca, cb, p)
        assert pr.gamma == 3 and pr.level == 1
        assert decrypt(sk, pr, p).to_list() == negacyclic(a, b, p.t)
        assert decrypt(sk, he_sub(ca, cb), p).to_list() == ((a - b) % p.t).tolist()


def test_three_component_decrypt_formula(small, rng):
    p, sk, pk = small
    a, b = rng.integers(0, p.t, p.n), rng.integers(0, p.t, p.n)
    pr = he_mult(encrypt(pk, a, p, rng), encrypt(pk, b, p, rng), p)
    ref = decrypt_formula([c.to_list() for c in pr.polys], sk.s.to_list(), p.qv, p.t)
    assert decrypt(sk, pr, p).to_list() == ref


def test_mixed_gamma_add(small, rng):
    p, sk, pk = small
    a, b, c = (rng.integers(0, p.t, p.n) for _ in range(3))
    ca, cb, cc = (encrypt(pk, x, p, rng) for x in (a, b, c))
    out = he_add(he_mult(ca, cb, p), cc)
    assert out.gamma == 3
    assert decrypt(sk, out, p).to_list() == [(x + y) % p.t for x, y in zip(negacyclic(a, b, p.t), c)]


def test_mult_by_delta(small, rng):
    p, sk, pk = small
    a = rng.integers(0, p.t, p.n)
    one = np.zeros(p.n, dtype=np.int64)
    one[0] = 1
    out = he_mult(encrypt(pk, a, p, rng), encrypt(pk, one, p, rng), p)
    assert decrypt(sk, out, p).to_list() == a.tolist()


def test_depth_exceeded(small, rng):
    p, sk, pk = small
    c = encrypt(pk, np.ones(p.n, dtype=np.int64), p, rng)
    c2 = he_mult(he_mult(c, c, p), c, p)
    assert c2.level == 2
    with pytest.raises(DepthExceeded):
        he_mult(c2, c, p)
    with pytest.raises(DepthExceeded):
        mul_plain(c2, np.ones(p.n, dtype=np.int64), p)


def test_mul_monomial(small, rng):
    p, sk, pk = small
    a = rng.integers(0, p.t, p.n)
    c = encrypt(pk, a, p, rng)
    for k in (0, 1, 5, p.n - 1, p.n, p.n + 3, 2 * p.n + 7, -3):
        assert decrypt(sk, mul_monomial(c, k), p).to_list() == monomial_shift(a, k, p.t)


@settings(max_examples=15)
@given(st.lists(st.sampled_from(["add", "mul"]), min_size=1, max_size=6), st.integers(0, 2**32))
def test_depth_contract_random_circuits(small, ops, seed):
    p, sk, pk = small
    rng = np.random.default_rng(seed)
    # respect the declared budget: at most D products and A additions
    muls = [o for o in ops if o == "mul"][: p.D]
    adds = [o for o in ops if o == "add"][: p.A]
    plain = [rng.integers(0, p.t, p.n).tolist()]
    ct = encrypt(pk, plain[0], p, rng)
    acc = plain[0]
    for op in muls + adds:
        x = rng.integers(0, p.t, p.n).tolist()
        cx = encrypt(pk, x, p, rng)
        if op == "mul":
            ct, acc = he_mult(ct, cx, p), negacyclic(acc, x, p.t)
        else:
            ct, acc = he_add(ct, cx), [(u + v) % p.t for u, v in zip(acc, x)]
    assert decrypt(sk, ct, p).to_list() == acc


SECURITY_ROWS = [(1024, 1.0090, 30), (2048, 1.0046, 162), (4096, 1.0024, 410), (8192, 1.0012, 930)]


@pytest.mark.parametrize("n,delta,bits", SECURITY_ROWS)
def test_security_rows(n, delta, bits):
    rep = estimate_security(build_params(n, 65537))
    assert abs(rep.delta - delta) < 1e-4
    assert abs(rep.tabulated_bit_security - bits) <= 3
    assert rep.delta > 1


def test_security_formula_cross_check():
    assert abs(bit_security_from_delta(1.0024) - 410.48) < 0.01
    rep = estimate_security(n=2048, q=2**55, sigma=1.0)
    c = math.sqrt(32 / math.pi)
    s = math.sqrt(2 * math.pi)
    ld = (math.log2(c * 2**55 / s)) ** 2 / (4 * 2048 * 55)
    assert rep.delta == pytest.approx(2**ld, rel=1e-12)


def test_security_rule_ln():
    a = estimate_security(n=1024, q=2**53, rule="log2")
    b = estimate_security(n=1024, q=2**53, rule="ln")
    assert b.c < a.c and b.delta < a.delta


@given(st.integers(6, 14), st.integers(30, 60))
def test_security_monotone_in_n(logn, bits):
    n = 2**logn
    a = estimate_security(n=n, q=2**bits)
    b = estimate_security(n=2 * n, q=2**bits)
    assert b.delta < a.delta


def test_noise_bound_helper(small):
    p, _, _ = small
    assert additive_noise_bound(p) * 4 <= p.qv
    assert additive_noise_bound(p, additions=4 * p.A) == pytest.approx(2 * additive_noise_bound(p))


def test_plaintext_polyr_input(small, rng):
    p, sk, pk = small
    m = PolyR(rng.integers(0, p.t, p.n), p.t)
    assert decrypt(sk, encrypt(pk, m, p, rng), p) == m
