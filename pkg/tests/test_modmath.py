import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nttssp import modmath as mm
from oracles import cyclic, dft, is_prime_trial, negacyclic, order


def brute_proth(N, min_bits):
    q = 1 << (min_bits - 1)
    while True:
        f = mm.proth_form(q)
        if f is not None and (q - 1) % (2 * N) == 0 and is_prime_trial(q):
            return q
        q += 1


@pytest.mark.parametrize("N,bits", [(4, 5), (8, 5), (2, 4), (16, 8), (64, 12), (32, 14)])
def test_proth_search_matches_brute_force(N, bits):
    q = mm.proth_search(N, bits)
    assert q.value == brute_proth(N, bits)
    assert q.value == q.proth_k * 2**q.proth_l + 1 and q.proth_k % 2 == 1
    assert (q.value - 1) % (2 * N) == 0


def test_proth_search_frozen():
    assert mm.proth_search(4, 5).value == 17
    # 17 = 1 mod 16, so it is also the answer for N = 8
    assert mm.proth_search(8, 5).value == 17


def test_proth_search_exhausted():
    with pytest.raises(mm.SearchExhausted):
        mm.proth_search(1 << 20, 22, max_bits=22, cap=3)


def test_proth_search_rejects_small_bits():
    with pytest.raises(ValueError):
        mm.proth_search(8, 4)


def test_proth_test_examples():
    assert mm.proth_test(17)
    assert pow(3, 8, 17) == 16
    assert mm.proth_test(65537)
    with pytest.raises(ValueError):
        mm.proth_test(15)


def test_proth_test_composite():
    # 25 = 3*2^3+1 is of Proth form and composite
    assert mm.proth_form(25) == (3, 3)
    assert mm.proth_test(25) is False


@given(st.integers(2, 5000))
def test_check_prime_vs_trial_division(n):
    assert mm.check_prime(n) == is_prime_trial(n)


@pytest.mark.parametrize("p,N,expect", [(17, 4, 4), (17, 8, 2), (17, 1, 1)])
def test_find_root_examples(p, N, expect):
    r = mm.find_root(p, N)
    assert order(r, p) == N
    assert pow(expect, N, p) == 1 and order(expect, p) == N


@pytest.mark.parametrize("p,N", [(17, 16), (97, 32), (12289, 2048), (65537, 1 << 15)])
def test_find_root_order(p, N):
    r = mm.find_root(p, N)
    assert pow(r, N, p) == 1 and pow(r, N // 2, p) == p - 1


def plan4():
    return mm.NttPlan(4, 17, 4)


def test_ntt_examples():
    p = plan4()
    assert mm.ntt_forward([1, 0, 0, 0], p).tolist() == [1, 1, 1, 1]
    assert mm.ntt_forward([0, 1, 0, 0], p).tolist() == [1, 4, 16, 13]
    assert mm.ntt_inverse([1, 1, 1, 1], p).tolist() == [1, 0, 0, 0]
    assert mm.ntt_inverse([1, 4, 16, 13], p).tolist() == [0, 1, 0, 0]


def test_ntt_length_mismatch():
    with pytest.raises(ValueError):
        mm.ntt_forward([1, 2, 3], plan4())


def test_negacyclic_and_cyclic_examples():
    p2 = mm.make_ntt_plan(17, 2)
    assert mm.negacyclic_mul([1, 2], [3, 4], p2).tolist() == [12, 10]
    assert mm.cyclic_mul([1, 2], [3, 4], p2).tolist() == [11, 10]
    x = [5, 6]
    assert mm.negacyclic_mul([1, 0], x, p2).tolist() == x
    assert mm.cyclic_mul([1, 1], x, p2).tolist() == [11, 11]


def test_missing_psi():
    with pytest.raises(ValueError):
        mm.negacyclic_mul([1, 0, 0, 0], [1, 0, 0, 0], plan4())


def test_plan_invariants():
    for p, N in [(17, 8), (97, 16), (65537, 1024)]:
        plan = mm.make_ntt_plan(p, N)
        a = plan.root
        assert pow(a, N, p) == 1 and pow(a, N // 2, p) == p - 1
        assert (p - 1) % N == 0 and plan.n_inv * N % p == 1
        assert pow(plan.psi, N, p) == p - 1 and plan.psi ** 2 % p == a


@pytest.mark.parametrize("N", [2, 4, 8])
def test_ntt_round_trip_exhaustive_small(N):
    p = 17
    plan = mm.make_ntt_plan(p, N)
    import itertools
    vecs = np.array(list(itertools.product(range(p), repeat=N)) if N <= 4 else
                    np.random.default_rng(0).integers(0, p, (4000, N)))
    assert (mm.ntt_inverse(mm.ntt_forward(vecs, plan), plan) == vecs).all()


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32, 64, 128, 256])
def test_products_vs_schoolbook(N, rng):
    q = mm.proth_search(N, 40).value
    plan = mm.make_ntt_plan(q, N)
    trials = 1000 if N <= 32 else 100
    a = rng.integers(0, q, (trials, N))
    b = rng.integers(0, q, (trials, N))
    neg = mm.negacyclic_mul(a, b, plan)
    cyc = mm.cyclic_mul(a, b, plan)
    for i in range(trials):
        assert neg[i].tolist() == negacyclic(a[i], b[i], q)
        assert cyc[i].tolist() == cyclic(a[i], b[i], q)


def test_ntt_vs_direct_dft(rng):
    q = mm.proth_search(64, 61).value
    plan = mm.make_ntt_plan(q, 64)
    x = rng.integers(0, q, 64)
    assert mm.ntt_forward(x, plan).tolist() == dft(x.tolist(), plan.root, q)


def test_compiled_and_numpy_paths_agree(rng):
    for bits in (20, 50, 62):
        q = mm.proth_search(128, bits, max_bits=62).value
        plan = mm.make_ntt_plan(q, 128)
        x = rng.integers(0, q, (5, 128))
        y = rng.integers(0, q, (5, 128))
        got = [mm.ntt_forward(x, plan), mm.negacyclic_forward(x, plan), mm.negacyclic_mul(x, y, plan)]
        mm.USE_JIT = False
        try:
            ref = [mm.ntt_forward(x, plan), mm.negacyclic_forward(x, plan), mm.negacyclic_mul(x, y, plan)]
        finally:
            mm.USE_JIT = True
        for g, r in zip(got, ref):
            assert (g == r).all()


def test_big_modulus_products(rng):
    q = mm.proth_search(32, 100, max_bits=120).value
    plan = mm.make_ntt_plan(q, 32)
    a = [int(v) for v in rng.integers(0, 2**62, 32)]
    b = [int(v) * 12345 for v in rng.integers(0, 2**62, 32)]
    assert mm.negacyclic_mul(np.array(a, dtype=object), np.array(b, dtype=object), plan).tolist() == negacyclic(a, b, q)


@given(st.lists(st.integers(0, 2**61), min_size=1, max_size=16), st.lists(st.integers(0, 2**61), min_size=1, max_size=16))
def test_mulmod_exact(a, b):
    m = (1 << 61) - 1
    k = min(len(a), len(b))
    a, b = [v % m for v in a[:k]], [v % m for v in b[:k]]
    got = mm.mulmod(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64), m)
    assert got.tolist() == [x * y % m for x, y in zip(a, b)]


@given(st.integers(1, 5).map(lambda e: 2**e), st.data())
def test_convolution_theorem(N, data):
    p = 193
    plan = mm.make_ntt_plan(p, N)
    a = data.draw(st.lists(st.integers(0, p - 1), min_size=N, max_size=N))
    b = data.draw(st.lists(st.integers(0, p - 1), min_size=N, max_size=N))
    lhs = mm.ntt_forward(mm.cyclic_mul(a, b, plan), plan)
    rhs = mm.ntt_forward(a, plan) * mm.ntt_forward(b, plan) % p
    assert lhs.tolist() == rhs.tolist()


@given(st.integers(1, 7).map(lambda e: 2**e), st.integers(2, 40))
def test_proth_search_property(N, extra):
    bits = (2 * N).bit_length() + extra
    q = mm.proth_search(N, bits)
    assert (q.value - 1) % (2 * N) == 0 and q.value >= 2 ** (bits - 1)
    assert mm.proth_form(q.value) is not None
