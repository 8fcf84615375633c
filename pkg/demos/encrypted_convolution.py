"""Filter an encrypted signal with a cyclic convolution.

The native ring product wraps with a sign flip.  Scaling both operands by
powers of (-1)^(1/N) before encryption and the result by the inverse powers
after decryption turns it into an ordinary circular convolution.
"""

import numpy as np

from nttssp.conv import cyclic_conv_encrypted, cyclic_conv_plain, make_plan, postcode, precode, straightforward_cyclic
from nttssp.she import build_params, decrypt, encrypt, keygen, noise

rng = np.random.default_rng(1)
N, t = 256, 12289
p = build_params(N, t, A=2)
sk, pk = keygen(p, rng)
plan = make_plan(p)
print(f"ring n={p.n}, q={p.qv} ({p.qv.bit_length()} bits), t={t}")

# a short moving-average filter and a noisy ramp, both as residues mod t
x = (np.arange(N) * 7 + rng.integers(0, 20, N)) % t
h = np.zeros(N, dtype=np.int64)
h[:4] = 1

ct = cyclic_conv_encrypted(encrypt(pk, precode(x, plan), p, rng), encrypt(pk, precode(h, plan), p, rng), plan, p)
y = postcode(decrypt(sk, ct, p), plan)
print("coded method matches plaintext:", y == cyclic_conv_plain(x, h, t))
print(f"noise after one product: 2^{noise(sk, ct).bit_length()} of q/2 = 2^{p.qv.bit_length() - 1}")

# the straightforward alternative spends half the ring on padding
k = N // 2
xs, hs = np.zeros(N, dtype=np.int64), np.zeros(N, dtype=np.int64)
xs[:k], hs[:k] = x[:k], h[:k]
out = decrypt(sk, straightforward_cyclic(encrypt(pk, xs, p, rng), encrypt(pk, hs, p, rng), p), p).to_list()
print("padded method, high half is the length-N/2 cyclic result:", out[k:] == cyclic_conv_plain(x[:k], h[:k], t))
