import numpy as np
import pytest

from nttssp import serialize as S
from nttssp.relin import gen_periodic_keys, gen_square_key
from nttssp.she import build_params, decrypt, encrypt, he_mult, keygen


@pytest.fixture(scope="module", params=[(16, 17, {}), (16, 257, dict(min_bits=80, max_bits=100))],
                ids=["u64", "wide"])
def env(request):
    n, t, kw = request.param
    p = build_params(n, t, D=2, **kw)
    rng = np.random.default_rng(1)
    sk, pk = keygen(p, rng)
    return p, sk, pk, rng


def test_params_round_trip(env):
    p = env[0]
    back = S.load_params(S.dump_params(p))
    assert (back.n, back.qv, back.t, back.sigma, back.D, back.A) == (p.n, p.qv, p.t, p.sigma, p.D, p.A)
    magic = S.dump_params(p)[:4]
    assert magic == (b"LSP1" if p.qv < 2**64 else b"LSPX")


def test_ciphertext_round_trip(env):
    p, sk, pk, rng = env
    m = rng.integers(0, p.t, p.n)
    c = encrypt(pk, m, p, rng)
    for ct in (c, he_mult(c, c, p)):
        back = S.load_ciphertext(S.dump_ciphertext(ct))
        assert back.gamma == ct.gamma and back.level == ct.level
        assert all(a == b for a, b in zip(back.polys, ct.polys))
        assert decrypt(sk, back, p) == decrypt(sk, ct, p)


def test_keys_round_trip(env):
    p, sk, pk, rng = env
    assert S.load_secret_key(S.dump_secret_key(sk)).s == sk.s
    pk2 = S.load_public_key(S.dump_public_key(pk))
    assert pk2.a0 == pk.a0 and pk2.a1 == pk.a1
    for rk in (gen_square_key(sk, p, rng), gen_periodic_keys(sk, p, 4, rng)):
        back = S.load_relin_key(S.dump_relin_key(rk))
        assert (back.kind, back.sources, back.target, back.meta) == (rk.kind, rk.sources, rk.target, rk.meta)
        assert (back.A.astype(object) == rk.A.astype(object)).all()
        assert (back.B.astype(object) == rk.B.astype(object)).all()


def test_corrupt_records(env):
    p, sk, pk, rng = env
    blob = S.dump_ciphertext(encrypt(pk, [0] * p.n, p, rng))
    with pytest.raises(S.FormatError):
        S.load_ciphertext(b"ZZZ1" + blob[4:])
    with pytest.raises(S.FormatError):
        S.load_ciphertext(blob[:-3])
    with pytest.raises(S.FormatError):
        S.load_ciphertext(blob + b"\0")
    with pytest.raises(S.FormatError):
        S.load_secret_key(blob)
