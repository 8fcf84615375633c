"""Key homomorphisms and relinearization.

Every variant reduces to the same step: given coefficient polynomials c^(j)
that multiply key components s_j in a decryption circuit, replace
sum_j c^(j) s_j by the pair

    (sum_j <digits_t(c^(j)), b^(j)>,  sum_j <digits_t(c^(j)), a^(j)>)

where (a^(j)_i, b^(j)_i) encode t^i s_j under the target key.  The variants
differ only in how the c^(j) are built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import gmpy2
import numpy as np

from . import modmath as mm
from .polyring import PolyR, _uniform_array, digits_array, num_digits, polyphase_merge, polyphase_split, ring_plan, substitute_power
from .she import Ciphertext, RingParams, SecretKey, next_level


class KindMismatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# key material


@dataclass(frozen=True, eq=False)
class KeyHom:
    """Pairs (a_i, b_i) with b_i + a_i s1 = t^i s2 + t e_i."""
    a: np.ndarray
    b: np.ndarray
    source: str
    target: str


@dataclass(frozen=True, eq=False)
class RelinKey:
    kind: str
    A: np.ndarray  # (blocks, digits, n)
    B: np.ndarray
    q: int
    t: int
    sources: tuple = ()
    target: str = "s"
    meta: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def block_count(self) -> int:
        return self.A.shape[0]

    @property
    def digits(self) -> int:
        return self.A.shape[1]

    @property
    def n(self) -> int:
        return self.A.shape[2]

    @property
    def pair_count(self) -> int:
        return self.block_count * self.digits

    @property
    def entries(self) -> int:
        """Number of Z_q coefficients stored."""
        return 2 * self.pair_count * self.n

    @property
    def bits(self) -> int:
        return self.entries * self.q.bit_length()

    @property
    def blocks(self) -> list[KeyHom]:
        src = self.sources or tuple(f"{self.kind}[{j}]" for j in range(self.block_count))
        return [KeyHom(self.A[j], self.B[j], src[j], self.target) for j in range(self.block_count)]


def _gen_blocks(s1: PolyR, sources: np.ndarray, params: RingParams, rng: np.random.Generator):
    """Key homomorphisms for every row of `sources` (K, n) under target s1."""
    q, t = params.qv, params.t
    K, n = sources.shape
    L = num_digits(q, t)
    A = _uniform_array(q, (K, L, n), rng)
    E = mm.as_residues(params.sampler.integers((K, L, n), rng), q)
    from .polyring import negacyclic_product
    As1 = negacyclic_product(A, np.broadcast_to(s1.coeffs, A.shape), q)
    tE = mm.mulmod(E, np.asarray(t % q, dtype=E.dtype), q)
    B = mm.negmod(mm.addmod(As1, tE, q), q)
    tp = mm.as_residues([pow(t, i, q) for i in range(L)], q).reshape(1, L, 1)
    src = mm.as_residues(sources, q).reshape(K, 1, n)
    B = mm.addmod(B, mm.mulmod(src, tp, q), q)
    return A, B


def make_key(kind: str, s1: PolyR, sources, params: RingParams, rng, names=(), target="s", **meta) -> RelinKey:
    src = np.stack([s.coeffs if isinstance(s, PolyR) else np.asarray(s) for s in sources])
    A, B = _gen_blocks(s1, src, params, rng)
    return RelinKey(kind, A, B, params.qv, params.t, tuple(names), target, dict(meta))


def keyhom_error(rk: RelinKey, s1: PolyR, sources) -> int:
    """Largest |e| in b_i + a_i s1 - t^i s2 = t e over all pairs (needs the keys)."""
    q, t = rk.q, rk.t
    worst = 0
    for j, s2 in enumerate(sources):
        for i in range(rk.digits):
            a = PolyR(rk.A[j, i], q)
            b = PolyR(rk.B[j, i], q)
            r = b + a * s1 - s2 * pow(t, i, q)
            for v in r.centered():
                if v % t:
                    raise AssertionError("residual not a multiple of t")
                worst = max(worst, abs(v // t))
    return worst


# ---------------------------------------------------------------------------
# the shared kernel


def _sum_mod(x: np.ndarray, q: int) -> np.ndarray:
    """Sum over axis 0 of int64 residues without overflow."""
    lo = (x & 0x7FFFFFFF).sum(axis=0)
    hi = (x >> 31).sum(axis=0)
    return mm.addmod(mm.mulmod(hi % q, np.int64((1 << 31) % q), q), lo % q, q)


def _kernel_ntt(rk: RelinKey, D: np.ndarray, chunk: int = 512):
    """D: (batch, K*L, n) digits.  Products in the twisted NTT domain."""
    q, n = rk.q, rk.n
    plan = ring_plan(q, n)
    if "ntt" not in rk._cache:
        rk._cache["ntt"] = (mm.negacyclic_forward(rk.B.reshape(-1, n), plan),
                            mm.negacyclic_forward(rk.A.reshape(-1, n), plan))
    Bh, Ah = rk._cache["ntt"]
    out_b, out_a = [], []
    for d in D:
        acc_b = np.zeros(n, dtype=np.int64)
        acc_a = np.zeros(n, dtype=np.int64)
        for s in range(0, d.shape[0], chunk):
            X = mm.negacyclic_forward(d[s:s + chunk], plan)
            acc_b = mm.addmod(acc_b, _sum_mod(mm.mulmod(X, Bh[s:s + chunk], q), q), q)
            acc_a = mm.addmod(acc_a, _sum_mod(mm.mulmod(X, Ah[s:s + chunk], q), q), q)
        out_b.append(mm.negacyclic_inverse(acc_b, plan))
        out_a.append(mm.negacyclic_inverse(acc_a, plan))
    return np.stack(out_b), np.stack(out_a)


def _pack_rows(rows: np.ndarray, width: int) -> list:
    """Kronecker packing: row -> sum_j row[j] 2^(8 width j)."""
    R, n = rows.shape
    if rows.dtype != object and width >= 8:
        buf = np.zeros((R, n, width), dtype=np.uint8)
        buf[:, :, :8] = rows.astype("<u8").view(np.uint8).reshape(R, n, 8)
        return [gmpy2.mpz(int.from_bytes(buf[i].tobytes(), "little")) for i in range(R)]
    return [gmpy2.mpz(int.from_bytes(b"".join(int(c).to_bytes(width, "little") for c in row), "little")) for row in rows]


def _unpack(value, n: int, width: int, q: int) -> np.ndarray:
    raw = int(value).to_bytes(2 * n * width, "little")
    c = [int.from_bytes(raw[j * width:(j + 1) * width], "little") for j in range(2 * n)]
    return np.array([(c[j] - c[j + n]) % q for j in range(n)], dtype=object)


def _kernel_kronecker(rk: RelinKey, D: np.ndarray):
    q, t, n = rk.q, rk.t, rk.n
    KL = D.shape[1]
    bits = (t - 1).bit_length() + q.bit_length() + n.bit_length() + KL.bit_length() + 1
    width = (bits + 7) // 8
    key = ("kron", width)
    if key not in rk._cache:
        rk._cache[key] = (_pack_rows(rk.B.reshape(-1, n), width), _pack_rows(rk.A.reshape(-1, n), width))
    Bp, Ap = rk._cache[key]
    out_b, out_a = [], []
    for d in D:
        dp = _pack_rows(d.astype(np.int64), width)
        acc_b = gmpy2.mpz(0)
        acc_a = gmpy2.mpz(0)
        for x, yb, ya in zip(dp, Bp, Ap):
            if x:
                acc_b += x * yb
                acc_a += x * ya
        out_b.append(_unpack(acc_b, n, width, q))
        out_a.append(_unpack(acc_a, n, width, q))
    return np.stack(out_b), np.stack(out_a)


def _kernel_scalar(rk: RelinKey, D: np.ndarray):
    # dimension-1 rings: plain dot products
    q = rk.q
    B = rk.B.reshape(-1, 1).astype(object)
    A = rk.A.reshape(-1, 1).astype(object)
    Do = D.astype(object)
    sb = (Do * B[None]).sum(axis=1) % q
    sa = (Do * A[None]).sum(axis=1) % q
    return mm.as_residues(sb, q), mm.as_residues(sa, q)


def key_products(rk: RelinKey, C: np.ndarray, backend: str | None = None):
    """For coefficient polynomials C (..., K, n) over q return the pair
    (sum_j <digits(C_j), b^(j)>, sum_j <digits(C_j), a^(j)>), shape (..., n)."""
    q, t, n, K = rk.q, rk.t, rk.n, rk.block_count
    if C.shape[-2:] != (K, n):
        raise ValueError(f"expected coefficient block shape {(K, n)}, got {C.shape[-2:]}")
    lead = C.shape[:-2]
    D = digits_array(C, q, t)  # (..., K, L, n)
    D = D.reshape((-1, K * rk.digits, n))
    if backend is None:
        if n == 1:
            backend = "scalar"
        elif mm.is_fast(q) and ring_plan(q, n) is not None:
            backend = "ntt"
        else:
            backend = "kronecker"
    fn = {"ntt": _kernel_ntt, "kronecker": _kernel_kronecker, "scalar": _kernel_scalar}[backend]
    sb, sa = fn(rk, D)
    return sb.reshape(lead + (n,)), sa.reshape(lead + (n,))


def key_products_reference(rk: RelinKey, C: np.ndarray):
    """Schoolbook evaluation of the same sums; slow, for cross-checks."""
    from .polyring import schoolbook_negacyclic
    q, t, n = rk.q, rk.t, rk.n
    D = digits_array(C, q, t)
    sb = [0] * n
    sa = [0] * n
    for j in range(rk.block_count):
        for i in range(rk.digits):
            pb = schoolbook_negacyclic(D[j, i], rk.B[j, i], q)
            pa = schoolbook_negacyclic(D[j, i], rk.A[j, i], q)
            sb = [x + y for x, y in zip(sb, pb)]
            sa = [x + y for x, y in zip(sa, pa)]
    return [v % q for v in sb], [v % q for v in sa]


def _switch(c0: np.ndarray, c1: np.ndarray, C: np.ndarray, rk: RelinKey, level: int) -> Ciphertext:
    q = rk.q
    sb, sa = key_products(rk, C)
    return Ciphertext((PolyR(mm.addmod(c0, sb, q), q), PolyR(mm.addmod(c1, sa, q), q)), level)


def _zeros(n, q):
    return np.zeros(n, dtype=mm.dtype_for(q))


# ---------------------------------------------------------------------------
# degree reduction


def gen_square_key(sk: SecretKey, params: RingParams, rng) -> RelinKey:
    return make_key("square", sk.s, [sk.s * sk.s], params, rng, names=("s^2",))


def gen_power_keys(sk: SecretKey, params: RingParams, rng, max_power: int) -> list[RelinKey]:
    """Keys for s^2 .. s^max_power, one RelinKey each."""
    out, p = [], sk.s
    for j in range(2, max_power + 1):
        p = p * sk.s
        out.append(make_key("square" if j == 2 else "power", sk.s, [p], params, rng, names=(f"s^{j}",), power=j))
    return out


def relinearize(ct: Ciphertext, rk: RelinKey) -> Ciphertext:
    if rk.kind != "square":
        raise KindMismatch(f"need a square key, got {rk.kind}")
    if ct.gamma == 2:
        return ct
    if ct.gamma != 3:
        raise ValueError("relinearize expects a three-component ciphertext")
    c0, c1, c2 = (p.coeffs for p in ct.polys)
    return _switch(c0, c1, c2[None], rk, ct.level)


def relinearize_concat(ct: Ciphertext, rks: list[RelinKey]) -> Ciphertext:
    """Reduce (c0, ..., cm) to two components in one pass; rks[j] encodes s^(j+2)."""
    m = ct.gamma - 1
    if m < 1:
        raise ValueError("ciphertext has a single component")
    if len(rks) < m - 1:
        raise ValueError(f"need {m - 1} keys for {ct.gamma} components, got {len(rks)}")
    q = ct.q
    c0 = ct.polys[0].coeffs
    c1 = ct.polys[1].coeffs
    for j in range(2, ct.gamma):
        sb, sa = key_products(rks[j - 2], ct.polys[j].coeffs[None])
        c0 = mm.addmod(c0, sb, q)
        c1 = mm.addmod(c1, sa, q)
    return Ciphertext((PolyR(c0, q), PolyR(c1, q)), ct.level)


# ---------------------------------------------------------------------------
# cleartext products


def skew_circulant(c: np.ndarray, q: int) -> np.ndarray:
    """Matrix C with C @ s = coefficients of c(z) s(z) mod (1+z^n); column j
    holds z^j c(z)."""
    n = len(c)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    idx = (i - j) % n
    M = c[idx]
    return np.where(i >= j, M, mm.negmod(M, q))


def gen_coeff_keys(sk: SecretKey, params: RingParams, rng) -> RelinKey:
    n, q = params.n, params.qv
    src = np.zeros((n, n), dtype=mm.dtype_for(q))
    src[:, 0] = sk.s.coeffs
    return make_key("per-coefficient", sk.s, list(src), params, rng, names=tuple(f"s_{j}" for j in range(n)))


def centered_plain(values, t: int) -> np.ndarray:
    v = np.asarray([int(x) % t for x in np.ravel(values)], dtype=object).reshape(np.shape(values))
    v = np.where(v > t // 2, v - t, v)
    return v.astype(np.int64) if t < 2**62 else v


def _lift_plain(v: np.ndarray, q: int) -> np.ndarray:
    return mm.as_residues(v, q)


def matmul_mod(Lc: np.ndarray, C: np.ndarray, q: int) -> np.ndarray:
    """(Lc @ C) mod q exactly; Lc holds small signed integers, C residues.

    C is cut into limbs narrow enough that float64 dot products stay exact.
    """
    n = Lc.shape[1]
    amax = int(np.max(np.abs(Lc.astype(object)))) if Lc.size else 0
    limb = 52 - max(amax, 1).bit_length() - n.bit_length()
    if limb < 4:
        raise ValueError("matrix entries too large for exact limb products")
    Lf = Lc.astype(np.float64)
    nlimbs = -(-q.bit_length() // limb)
    mask = (1 << limb) - 1
    if mm.is_fast(q):
        Ci = C.astype(np.int64)
        acc = np.zeros((Lc.shape[0], C.shape[1]), dtype=np.int64)
        for k in range(nlimbs):
            part = ((Ci >> (limb * k)) & mask).astype(np.float64)
            prod = np.rint(Lf @ part).astype(np.int64) % q
            acc = mm.addmod(acc, mm.mulmod(prod, np.int64(pow(2, limb * k, q)), q), q)
        return acc
    Co = C.astype(object)
    acc = np.zeros((Lc.shape[0], C.shape[1]), dtype=object)
    for k in range(nlimbs):
        part = ((Co >> (limb * k)) & mask).astype(np.float64)
        prod = np.rint(Lf @ part).astype(np.int64).astype(object)
        acc = (acc + prod * pow(2, limb * k, q)) % q
    return acc


def _check_ct(ct: Ciphertext, rk: RelinKey):
    if ct.gamma != 2:
        raise ValueError("relinearize to two components first")
    if ct.n != rk.n or ct.q != rk.q:
        raise ValueError("key and ciphertext rings differ")


def ew_mult_plain(ct: Ciphertext, g, rk: RelinKey, params: RingParams | None = None) -> Ciphertext:
    """Ciphertext whose plaintext is g * m element-wise (g read mod t)."""
    if rk.kind != "per-coefficient":
        raise KindMismatch(f"need per-coefficient keys, got {rk.kind}")
    _check_ct(ct, rk)
    q, n = rk.q, rk.n
    if len(g) != n:
        raise ValueError("g must have n entries")
    gq = _lift_plain(centered_plain(g, rk.t), q)
    c0 = mm.mulmod(ct.polys[0].coeffs, gq, q)
    C1 = skew_circulant(ct.polys[1].coeffs, q)
    C = mm.mulmod(C1, gq[:, None], q).T  # rows = c^(j)
    return _switch(c0, _zeros(n, q), np.ascontiguousarray(C), rk, next_level(ct.level, params))


def linear_transform(ct: Ciphertext, L, rk: RelinKey, params: RingParams | None = None) -> Ciphertext:
    """Ciphertext whose plaintext is L m (L an n x n matrix read mod t)."""
    if rk.kind != "per-coefficient":
        raise KindMismatch(f"need per-coefficient keys, got {rk.kind}")
    _check_ct(ct, rk)
    q, n = rk.q, rk.n
    Lc = centered_plain(L, rk.t)
    if Lc.shape != (n, n):
        raise ValueError(f"L must be {n}x{n}")
    c0 = matmul_mod(Lc, ct.polys[0].coeffs[:, None], q)[:, 0]
    C = matmul_mod(Lc, skew_circulant(ct.polys[1].coeffs, q), q).T
    return _switch(c0, _zeros(n, q), np.ascontiguousarray(C), rk, next_level(ct.level, params))


def interleave(ct: Ciphertext, rows, rk: RelinKey, params: RingParams | None = None) -> Ciphertext:
    """Output slot i takes input slot rows[i], or zero when rows[i] is None.
    Equivalent to a 0/1 linear transform but built by row gathering."""
    if rk.kind != "per-coefficient":
        raise KindMismatch(f"need per-coefficient keys, got {rk.kind}")
    _check_ct(ct, rk)
    q, n = rk.q, rk.n
    if len(rows) != n:
        raise ValueError("need one source index per output slot")
    keep = np.array([r is not None for r in rows])
    src = np.array([r if r is not None else 0 for r in rows])
    c0 = np.where(keep, ct.polys[0].coeffs[src], 0)
    C1 = skew_circulant(ct.polys[1].coeffs, q)[src]
    C1 = np.where(keep[:, None], C1, 0)
    return _switch(mm.as_residues(c0, q), _zeros(n, q), np.ascontiguousarray(C1.T), rk, next_level(ct.level, params))


def gen_periodic_keys(sk: SecretKey, params: RingParams, m: int, rng) -> RelinKey:
    """Blocks encode S_b(z^m), b < m, where s = sum_b z^b S_b(z^m)."""
    n = params.n
    if m < 1 or n % m:
        raise ValueError("period must divide n")
    comps = polyphase_split(sk.s, m)
    srcs = [substitute_power(c, m) for c in comps]
    return make_key("periodic", sk.s, srcs, params, rng, names=tuple(f"S_{b}(z^{m})" for b in range(m)), m=m)


def ew_mult_plain_periodic(ct: Ciphertext, g, rk: RelinKey, params: RingParams | None = None) -> Ciphertext:
    """Element-wise product with a cleartext of period m; m+1 circuit terms."""
    if rk.kind != "periodic":
        raise KindMismatch(f"need periodic keys, got {rk.kind}")
    _check_ct(ct, rk)
    q, n, m = rk.q, rk.n, rk.meta["m"]
    g = list(g)
    if len(g) == m:
        g = g * (n // m)
    if len(g) != n or any(g[i] % rk.t != g[i % m] % rk.t for i in range(n)):
        raise ValueError(f"g must have period {m}")
    gq = _lift_plain(centered_plain(g, rk.t), q)
    c0 = mm.mulmod(ct.polys[0].coeffs, gq, q)
    C1 = skew_circulant(ct.polys[1].coeffs, q)[:, :m]
    C = mm.mulmod(C1, gq[:, None], q).T
    return _switch(c0, _zeros(n, q), np.ascontiguousarray(C), rk, next_level(ct.level, params))


# ---------------------------------------------------------------------------
# key switches without products


def automorphism_inverse(c: np.ndarray, q: int) -> np.ndarray:
    """c(z^-1) in Z_q[z]/(1+z^n): index 0 stays, index k>0 moves to n-k negated."""
    out = mm.negmod(c[::-1], q)
    return np.concatenate((c[:1], out[:-1]))


def gen_reflection_key(sk: SecretKey, params: RingParams, rng) -> RelinKey:
    s_ref = PolyR(automorphism_inverse(sk.s.coeffs, params.qv), params.qv)
    return make_key("reflection", sk.s, [s_ref], params, rng, names=("s(z^-1)",))


def reflect(ct: Ciphertext, rk: RelinKey, mode: str = "reverse") -> Ciphertext:
    """mode="reverse": plaintext x[l] -> x[n-1-l].
    mode="automorphism": plaintext m(z) -> m(z^-1)."""
    from .she import mul_monomial
    if rk.kind != "reflection":
        raise KindMismatch(f"need a reflection key, got {rk.kind}")
    _check_ct(ct, rk)
    q, n = rk.q, rk.n
    c0 = automorphism_inverse(ct.polys[0].coeffs, q)
    c1 = automorphism_inverse(ct.polys[1].coeffs, q)
    out = _switch(c0, _zeros(n, q), c1[None], rk, ct.level)
    if mode == "automorphism":
        return out
    if mode != "reverse":
        raise ValueError(f"unknown mode {mode!r}")
    return mul_monomial(out, n - 1)


@dataclass(frozen=True, eq=False)
class PolyphaseKeys:
    M: int
    split: RelinKey | None  # S_b under the reduced key s', dimension n/M
    merge: RelinKey | None  # s'(z^M) under s, dimension n

    @property
    def entries(self) -> int:
        return sum(k.entries for k in (self.split, self.merge) if k is not None)


def gen_polyphase_keys(sk: SecretKey, params: RingParams, M: int, rng, insecure: bool = False):
    """Returns (keys, reduced secret key).  M = n collapses the reduced ring to
    dimension one and needs insecure=True."""
    n = params.n
    if M < 1 or M & (M - 1) or n % M:
        raise ValueError("M must be a power of two dividing n")
    if M == n and not insecure:
        raise ValueError("M = n leaves a one-dimensional lattice; pass insecure=True for demos")
    red = params.reduced(M)
    s_red = PolyR(red.sampler.integers(n // M, rng), params.qv)
    comps = polyphase_split(sk.s, M)
    split = make_key("polyphase-split", s_red, comps, red, rng, names=tuple(f"S_{b}" for b in range(M)), target="s'", M=M)
    merge = make_key("polyphase-merge", sk.s, [substitute_power(s_red, M)], params, rng, names=("s'(z^M)",), M=M)
    return PolyphaseKeys(M, split, merge), SecretKey(s_red)


def polyphase_relin_split(ct: Ciphertext, M: int, keys: PolyphaseKeys) -> list[Ciphertext]:
    """Component r decrypts under the reduced key to polyphase component r
    (positions r, r+M, ...) of the plaintext."""
    if keys.M != M:
        raise KindMismatch("keys were generated for a different M")
    if ct.gamma != 2:
        raise ValueError("relinearize to two components first")
    q, n = ct.q, ct.n
    nr = n // M
    C0 = np.stack([p.coeffs for p in polyphase_split(ct.polys[0], M)])
    C1 = np.stack([p.coeffs for p in polyphase_split(ct.polys[1], M)])
    # coefficient of S_b in component r: C1_{r-b}, or y*C1_{r-b+M} on wrap
    yC1 = np.stack([PolyR.monomial(1, q, nr).coeffs for _ in range(M)])
    from .polyring import negacyclic_product
    yC1 = negacyclic_product(C1, yC1, q) if nr > 1 else mm.negmod(C1, q)
    coef = np.empty((M, M, nr), dtype=C1.dtype)
    for r in range(M):
        for b in range(M):
            coef[r, b] = C1[r - b] if b <= r else yC1[r - b + M]
    sb, sa = key_products(keys.split, coef)
    return [Ciphertext((PolyR(mm.addmod(C0[r], sb[r], q), q), PolyR(sa[r], q)), ct.level) for r in range(M)]


def polyphase_relin_merge(parts: list[Ciphertext], keys: PolyphaseKeys) -> Ciphertext:
    M = keys.M
    if len(parts) != M:
        raise ValueError(f"need {M} components")
    A = polyphase_merge([p.polys[0] for p in parts], M)
    B = polyphase_merge([p.polys[1] for p in parts], M)
    level = max(p.level for p in parts)
    return _switch(A.coeffs, _zeros(A.n, A.m), B.coeffs[None], keys.merge, level)


def gen_downsample_keys(sk: SecretKey, params: RingParams, G: int, rng) -> RelinKey:
    """Blocks encode the mirrored components S'_i (i = 1..G-1) under S'_0,
    all in dimension n/G."""
    comps = polyphase_split(sk.s, G, signed=True)
    red = params.reduced(G)
    return make_key("downsample", comps[0], comps[1:], red, rng,
                    names=tuple(f"S'_{i}" for i in range(1, G)), target="S_0", G=G)


def downsample_key(sk: SecretKey, G: int) -> SecretKey:
    """Secret key of the decimated ciphertext, s(z^(1/G))."""
    return SecretKey(polyphase_split(sk.s, G)[0])


def downsample_relin(ct: Ciphertext, G: int, rk: RelinKey) -> Ciphertext:
    """Every G-th plaintext sample, as a ciphertext of dimension n/G under
    downsample_key(sk, G)."""
    if rk.kind != "downsample" or rk.meta.get("G") != G:
        raise KindMismatch("need downsample keys for this G")
    if ct.gamma != 2:
        raise ValueError("relinearize to two components first")
    C0 = polyphase_split(ct.polys[0], G)
    C1 = polyphase_split(ct.polys[1], G)
    if G == 1:
        return ct
    coef = np.stack([c.coeffs for c in C1[1:]])
    q = ct.q
    sb, sa = key_products(rk, coef)
    return Ciphertext((PolyR(mm.addmod(C0[0].coeffs, sb, q), q), PolyR(mm.addmod(C1[0].coeffs, sa, q), q)), ct.level)


def upsample_key(sk: SecretKey, G: int) -> SecretKey:
    return SecretKey(substitute_power(sk.s, G))


# ---------------------------------------------------------------------------
# accounting


def key_entry_count(n: int, L: int, method: str, M: int = 1) -> int:
    """Z_q entries of the key material used by the element-wise methods:
    full: 2(n^2+n)L, polyphase(M): (4n + 2n^2/M^2 + 2n/M)L, direct: (4n+2)L."""
    if method == "full":
        return 2 * (n * n + n) * L
    if method == "polyphase":
        return (4 * n + 2 * (n // M) ** 2 + 2 * (n // M)) * L
    if method == "direct":
        return (4 * n + 2) * L
    raise ValueError(method)
