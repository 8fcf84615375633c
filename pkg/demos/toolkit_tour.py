"""Signal-processing building blocks on encrypted data: delays, rate
changes, modulation, a matrix product in one ring product, and a cyclic
code."""

from dataclasses import replace

import numpy as np

from nttssp import toolkit as T
from nttssp.relin import downsample_key, gen_downsample_keys, gen_periodic_keys, upsample_key
from nttssp.she import build_params, decrypt, encrypt, keygen

rng = np.random.default_rng(4)
n, t = 16, 257
p = replace(build_params(n, t, D=2), q=build_params(4 * n, t).q)  # q also fits dimension 4n
sk, pk = keygen(p, rng)
x = list(range(1, n + 1))
ct = encrypt(pk, x, p, rng)


def show(label, values):
    print(f"{label:>12}: {[v - t if v > t // 2 else v for v in values]}")


show("input", x)
show("shift 3", decrypt(sk, T.shift(ct, 3), p).to_list())

up, pu = T.upsample(ct, p, 2)
show("upsample 2", decrypt(upsample_key(sk, 2), up, pu).to_list())

dk = gen_downsample_keys(sk, p, 2, rng)
show("downsample 2", decrypt(downsample_key(sk, 2), T.downsample(ct, 2, dk), p.reduced(2)).to_list())

mk = gen_periodic_keys(sk, p, 4, rng)
show("modulate", decrypt(sk, T.modulate(ct, [1, 0, -1, 0], mk, p), p).to_list())

# 2x2 matrix product: the entries of A.B land at fixed coefficients
enc = T.MatrixEncoding(2)
A, B = [[1, 2], [3, 4]], [[5, 6], [7, 8]]
ca = encrypt(pk, T.matmul_encode(A, "left", enc, t, n), p, rng)
cb = encrypt(pk, T.matmul_encode(B, "right", enc, t, n), p, rng)
print(f"{'A.B':>12}: {T.matmul_decode(decrypt(sk, T.encrypted_matmul(ca, cb, enc, p), p), enc)}")
print(f"{'scaled A.B':>12}: {T.matmul_scaled(A, B, 10, 4)} (integer ring of dimension 4, d=10)")

code = T.CrcCode((1, 2, 2, 1), t, n)
msg = [5, 1, 4] + [0] * (code.k - 3)
word = decrypt(sk, T.crc_encode(encrypt(pk, msg + [0] * code.check_degree, p, rng), code.g, p, code), p).to_list()
print(f"{'crc check':>12}: {T.crc_check(word, code)[0]}, corrupted: {T.crc_check([word[0] + 1] + word[1:], code)[0]}")
