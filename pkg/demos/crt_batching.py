"""Several independent integer vectors in one ciphertext.

With t = 257 * 641 and n = 64 each prime factor splits 1 + z^64 into
linear factors, so one ring product multiplies 2 * 64 slot pairs at once.
A modulus such as 3^2 * 7^2 does not split 1 + z^64 that far and the
layout refuses it.
"""

import numpy as np

from nttssp.crt import BatchParams, PackingError, batched_ew_product, make_layout
from nttssp.she import build_params, decrypt, encrypt, keygen

rng = np.random.default_rng(5)
n = 64
bp = BatchParams(((257, 1), (641, 1)))
lay = make_layout(bp, n)
p = build_params(n, bp.t)
sk, pk = keygen(p, rng)
print(f"t = {bp.t}, {lay.slots} slots, q: {p.qv.bit_length()} bits")

x = [rng.integers(0, m, n).tolist() for m in bp.moduli]
y = [rng.integers(0, m, n).tolist() for m in bp.moduli]
out = lay.unpack(decrypt(sk, batched_ew_product(encrypt(pk, lay.pack(x), p, rng),
                                                encrypt(pk, lay.pack(y), p, rng), lay, p), p))
want = [[a * b % m for a, b in zip(r, s)] for r, s, m in zip(x, y, bp.moduli)]
print("all slot products correct:", out == want)

try:
    make_layout(BatchParams(((3, 2), (7, 2))), n)
except PackingError as exc:
    print("t = 441:", exc)
