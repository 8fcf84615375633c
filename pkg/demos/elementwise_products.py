"""Slot-wise product of two encrypted vectors and what it costs.

Each method transforms the operands so that the ring product acts slot by
slot, multiplies, and transforms back.  Splitting into M polyphase
components shrinks the transform matrices and the key material, down to
one-dimensional components when M = n.
"""

import time

import numpy as np

from nttssp.conv import cost_model, ew_mult_encrypted, gen_elementwise_keys
from nttssp.she import build_params, decrypt, encrypt, keygen

rng = np.random.default_rng(3)
n, t = 64, 257
p = build_params(n, t, D=4, max_bits=200)
sk, pk = keygen(p, rng)
x, y = rng.integers(0, t, n), rng.integers(0, t, n)
cx, cy = encrypt(pk, x, p, rng), encrypt(pk, y, p, rng)
want = (x * y % t).tolist()

print(f"n={n} t={t} q: {p.qv.bit_length()} bits, {p.digits} base-t digits")
print(f"{'method':>10} {'M':>3} {'ok':>3} {'key entries':>12} {'model cost':>11} {'min dim':>7} {'time':>8}")
for method, M in [("full", 1), ("polyphase", 2), ("polyphase", 8), ("direct", n)]:
    keys, _ = gen_elementwise_keys(sk, p, rng, method, M)
    t0 = time.perf_counter()
    out = ew_mult_encrypted(cx, cy, keys, p)
    dt = time.perf_counter() - t0
    cm = cost_model(method, n, n, M, p.qv, t)
    ok = decrypt(sk, out, p).to_list() == want
    print(f"{method:>10} {M:>3} {'yes' if ok else 'NO':>3} {keys.entries:>12} {cm.ratio_to_full:>11.3f} "
          f"{cm.n_min:>7} {dt * 1e3:>6.0f}ms")
