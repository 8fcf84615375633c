"""Number-theoretic transform of an encrypted vector, two ways.

With client help: the key owner applies chirp and wrap codings around
encryption, and the server performs a single product with a public kernel.
Unattended: the server does everything with per-coefficient relinearization
keys, either as one linear map or as a chirp factorization.
"""

import time

import numpy as np

from nttssp import modmath as mm
from nttssp.conv import encrypted_ntt, encrypted_ntt_unattended, make_plan, ntt_postcode, ntt_precode
from nttssp.relin import gen_coeff_keys
from nttssp.she import build_params, decrypt, encrypt, keygen

rng = np.random.default_rng(2)
N, t = 64, 257
p = build_params(N, t, D=5, max_bits=200)
sk, pk = keygen(p, rng)
plan = make_plan(p)
x = rng.integers(0, t, N)
ref = mm.ntt_forward(x, plan.ntt_plan).tolist()

ct = encrypted_ntt(encrypt(pk, ntt_precode(x, plan), p, rng), plan, p)
print("with coding:", ntt_postcode(decrypt(sk, ct, p), plan) == ref, "levels used:", ct.level)

ck = gen_coeff_keys(sk, p, rng)
print(f"per-coefficient keys: {ck.entries} entries of {p.qv.bit_length()} bits")
for method in ("matrix", "chirp"):
    t0 = time.perf_counter()
    out = encrypted_ntt_unattended(encrypt(pk, x, p, rng), plan, ck, p, method=method)
    dt = time.perf_counter() - t0
    print(f"unattended {method}: {decrypt(sk, out, p).to_list() == ref}, levels used {out.level}, {dt * 1e3:.0f} ms")
