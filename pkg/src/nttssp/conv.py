"""Cyclic and generalized convolutions, encrypted NTT/INTT and encrypted
element-wise products on top of the negacyclic ring product.

Coding vectors
--------------
Murakami coding turns the native product mod (1 + z^N) into a product mod
(1 - alpha z^N): the inputs are scaled by w^l with w = alpha^(-1/N) (-1)^(1/N)
and the output by w^-l.

The chirp identity  l k = -(k-l)^2/2 + l^2/2 + k^2/2  turns an NTT into a
pre-scaling by c^(l^2), a cyclic convolution with c^(-d^2) and a
post-scaling by c^(k^2), where c is a square root of the NTT root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy.ntheory import nthroot_mod, sqrt_mod

from . import modmath as mm
from .polyring import PolyR
from .relin import (PolyphaseKeys, RelinKey, ew_mult_plain, gen_coeff_keys, gen_polyphase_keys, gen_square_key,
                    linear_transform, polyphase_relin_merge, polyphase_relin_split, relinearize)
from .she import Ciphertext, RingParams, SecretKey, he_add, he_mult, mul_monomial, mul_plain


class RootsUnavailable(ValueError):
    pass


def _root_of(value: int, N: int, t: int) -> int:
    """Smallest x in Z_t with x^N = value."""
    value %= t
    if value == 1:
        return 1
    roots = nthroot_mod(value, N, t, all_roots=True)
    if not roots:
        raise RootsUnavailable(f"{value} has no {N}-th root mod {t}")
    return min(int(r) for r in roots)


def _pow_vec(base: int, N: int, t: int, squares: bool = False) -> np.ndarray:
    e = [l * l if squares else l for l in range(N)]
    return np.array([pow(base, k, t) for k in e], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class TransformPlan:
    N: int
    t: int
    alpha_target: int = 1
    beta: int = -1
    alpha_root: int = field(init=False)   # alpha_target^(1/N)
    neg_root: int = field(init=False)     # (-1)^(1/N)
    chirp: int = field(init=False)        # square root of the NTT root, order 2N
    ntt_root: int = field(init=False)
    pre: np.ndarray = field(init=False, repr=False)
    post: np.ndarray = field(init=False, repr=False)
    chirp_up: np.ndarray = field(init=False, repr=False)    # c^(l^2)
    chirp_down: np.ndarray = field(init=False, repr=False)  # c^(-l^2)

    def __post_init__(self):
        N, t = self.N, self.t
        if N < 2 or N & (N - 1):
            raise ValueError("N must be a power of two >= 2")
        if t >= 2**31:
            # coding vectors use plain int64 products
            raise ValueError("t must be below 2^31")
        if not mm.check_prime(t) or (t - 1) % (2 * N):
            raise RootsUnavailable(f"Z_{t} has no element of order {2 * N}")
        put = lambda k, v: object.__setattr__(self, k, v)
        put("alpha_root", _root_of(self.alpha_target, N, t))
        put("neg_root", mm.smallest_root(t, 2 * N))
        put("chirp", self.neg_root)
        put("ntt_root", self.chirp * self.chirp % t)
        w = pow(self.alpha_root, -1, t) * self.neg_root % t
        put("pre", _pow_vec(w, N, t))
        put("post", _pow_vec(pow(w, -1, t), N, t))
        put("chirp_up", _pow_vec(self.chirp, N, t, squares=True))
        put("chirp_down", _pow_vec(pow(self.chirp, -1, t), N, t, squares=True))
        assert np.all(self.pre * self.post % t == 1)

    @property
    def ntt_plan(self) -> mm.NttPlan:
        return mm.NttPlan(self.N, self.t, self.ntt_root)

    @property
    def murakami(self) -> np.ndarray:
        """(-1)^(l/N): the cyclic (alpha = 1) coding vector used around NTTs."""
        return _pow_vec(self.neg_root, self.N, self.t)


def make_plan(params: RingParams | None = None, alpha_target: int = 1, *, N: int | None = None, t: int | None = None) -> TransformPlan:
    N = N or params.n
    t = t or params.t
    return TransformPlan(N, t, alpha_target % t)


def _vec(x, plan) -> np.ndarray:
    if isinstance(x, PolyR):
        x = x.coeffs
    if isinstance(x, np.ndarray) and x.dtype.kind in "iu":
        v = np.mod(x.astype(np.int64, copy=False), plan.t)
    else:
        v = np.array([int(a) % plan.t for a in x], dtype=np.int64)
    if len(v) != plan.N:
        raise ValueError(f"expected {plan.N} samples, got {len(v)}")
    return v


def precode(x, plan: TransformPlan, side: str = "x") -> PolyR:
    """Coding applied before encryption; identical for both operands."""
    if side not in ("x", "y"):
        raise ValueError("side must be 'x' or 'y'")
    return PolyR(_vec(x, plan) * plan.pre % plan.t, plan.t)


def postcode(y, plan: TransformPlan) -> list[int]:
    return (_vec(y, plan) * plan.post % plan.t).tolist()


def cyclic_conv_encrypted(ctx: Ciphertext, cth: Ciphertext, plan: TransformPlan, params: RingParams | None = None) -> Ciphertext:
    """Product of two precoded ciphertexts; postcode(decrypt(.)) is the
    alpha-generalized (default cyclic) convolution."""
    if ctx.n != plan.N:
        raise ValueError("plan size differs from ciphertext dimension")
    return he_mult(ctx, cth, params)


def straightforward_cyclic(ctx: Ciphertext, cth: Ciphertext, params: RingParams | None = None) -> Ciphertext:
    """Inputs hold length-N/2 signals in the low half.  The product times
    (1 + z^(N/2)) carries the negacyclic result in the low half and the
    cyclic result in the high half."""
    prod = he_mult(ctx, cth, params)
    return he_add(prod, mul_monomial(prod, prod.n // 2))


# ---------------------------------------------------------------------------
# plaintext reference implementations


def cyclic_conv_plain(x, h, t: int) -> list[int]:
    N = len(x)
    return [sum(int(x[l]) * int(h[(k - l) % N]) for l in range(N)) % t for k in range(N)]


def generalized_cyclic_matrix(v, beta: int, t: int) -> np.ndarray:
    """G[r, c] = v[r-c] for r >= c and beta v[r-c+N] otherwise."""
    N = len(v)
    G = np.empty((N, N), dtype=object)
    for r in range(N):
        for c in range(N):
            G[r, c] = int(v[r - c]) % t if r >= c else beta * int(v[r - c + N]) % t
    return G


def _diag_power(base: int, N: int, t: int, i: int) -> np.ndarray:
    return np.array([pow(base, l ** i, t) for l in range(N)], dtype=object)


def generalized_conv(x, y, beta: int, gamma: int, plan: TransformPlan, gamma_half: int | None = None) -> list[int]:
    """X = P_out G_beta(P_in,y y) P_in,x x with P1(v) = diag(v^l),
    P2(v) = diag(v^(l^2)), P_out = P2(gamma^-1/2) P1(beta^-1/N),
    P_in,x = P1(beta^1/N) P2(gamma^-1/2), P_in,y = P1(beta^1/N) P2(gamma^1/2)."""
    t, N = plan.t, plan.N
    beta %= t
    gamma %= t
    if beta == 0 or gamma == 0:
        raise ValueError("beta and gamma must be units")
    if gamma_half is None:
        if gamma == 1:
            gamma_half = 1
        elif gamma == pow(plan.ntt_root, -1, t):
            gamma_half = pow(plan.chirp, -1, t)
        elif gamma == plan.ntt_root:
            gamma_half = plan.chirp
        else:
            r = sqrt_mod(gamma, t, all_roots=True)
            if not r:
                raise ValueError("gamma is not a square")
            gamma_half = min(int(v) for v in r)
    if gamma_half * gamma_half % t != gamma:
        raise ValueError("gamma_half^2 != gamma")
    b_root = plan.neg_root if beta == t - 1 else _root_of(beta, N, t)
    gh_inv = pow(gamma_half, -1, t)
    p_out = _diag_power(gh_inv, N, t, 2) * _diag_power(pow(b_root, -1, t), N, t, 1)
    p_in_x = _diag_power(b_root, N, t, 1) * _diag_power(gh_inv, N, t, 2)
    p_in_y = _diag_power(b_root, N, t, 1) * _diag_power(gamma_half, N, t, 2)
    xv = np.array([int(v) for v in x], dtype=object)
    yv = np.array([int(v) for v in y], dtype=object)
    G = generalized_cyclic_matrix(p_in_y * yv % t, beta, t)
    return [int(v) % t for v in p_out * (G.dot(p_in_x * xv % t)) % t]


def ntt_matrix(N: int, root: int, t: int) -> np.ndarray:
    return np.array([[pow(root, (k * l) % N, t) for l in range(N)] for k in range(N)], dtype=object)


# ---------------------------------------------------------------------------
# encrypted NTT with client-side coding


def ntt_precode(x, plan: TransformPlan, inverse: bool = False) -> PolyR:
    """Chirp scaling then cyclic coding, applied by the key owner."""
    c = plan.chirp_down if inverse else plan.chirp_up
    return PolyR(_vec(x, plan) * c % plan.t * plan.murakami % plan.t, plan.t)


def ntt_postcode(y, plan: TransformPlan, inverse: bool = False) -> list[int]:
    t = plan.t
    m_inv = _pow_vec(pow(plan.neg_root, -1, t), plan.N, t)
    c = plan.chirp_down if inverse else plan.chirp_up
    v = _vec(y, plan) * m_inv % t * c % t
    if inverse:
        v = v * pow(plan.N, -1, t) % t
    return [int(a) for a in v]


def ntt_kernel(plan: TransformPlan, inverse: bool = False) -> PolyR:
    """Coded chirp kernel c^(-d^2) (forward) or c^(d^2) (inverse)."""
    k = plan.chirp_up if inverse else plan.chirp_down
    return PolyR(k * plan.murakami % plan.t, plan.t)


def encrypted_ntt(ct: Ciphertext, plan: TransformPlan, params: RingParams, kernel_ct: Ciphertext | None = None,
                  inverse: bool = False) -> Ciphertext:
    """One multiplication by the coded chirp kernel (cleartext, or encrypted
    when kernel_ct is given)."""
    if ct.n != plan.N or params.t != plan.t:
        raise ValueError("plan does not match ciphertext / params")
    if kernel_ct is not None:
        return he_mult(ct, kernel_ct, params)
    return mul_plain(ct, ntt_kernel(plan, inverse), params)


def encrypted_intt(ct: Ciphertext, plan: TransformPlan, params: RingParams, kernel_ct: Ciphertext | None = None) -> Ciphertext:
    return encrypted_ntt(ct, plan, params, kernel_ct, inverse=True)


# ---------------------------------------------------------------------------
# unattended NTT


@lru_cache(maxsize=64)
def _unattended_vectors(N: int, t: int, inverse: bool):
    plan = TransformPlan(N, t)
    nplan = plan.ntt_plan
    k1 = plan.chirp_up if inverse else plan.chirp_down
    mid = plan.chirp_down if inverse else plan.chirp_up
    seed = plan.chirp_down if inverse else plan.chirp_up
    tr = mm.ntt_inverse(seed, nplan) if inverse else mm.ntt_forward(seed, nplan)
    k2 = np.asarray(tr, dtype=np.int64) * pow(N, -1, t) % t
    mur = plan.murakami
    return k1 * mur % t, mid, k2 * mur % t


def chirp_factorization(x, plan: TransformPlan, inverse: bool = False) -> list[int]:
    """Plaintext evaluation of the factored form
    N^-1 ((x (*) k1) . d) (*) k2, the blueprint of the unattended transform."""
    t, N = plan.t, plan.N
    k1c, mid, k2c = _unattended_vectors(N, t, inverse)
    m_inv = _pow_vec(pow(plan.neg_root, -1, t), N, t)
    k1 = k1c * m_inv % t
    k2 = k2c * m_inv % t
    w = np.array(cyclic_conv_plain(_vec(x, plan), k1, t), dtype=np.int64) * mid % t
    return cyclic_conv_plain(w, k2, t)


def encrypted_ntt_unattended(ct: Ciphertext, plan: TransformPlan, rk: RelinKey, params: RingParams,
                             inverse: bool = False, method: str = "chirp", cyclic_domain: bool = False) -> Ciphertext:
    """NTT/INTT of an uncoded ciphertext without the key owner.

    method="chirp": coding by relinearization, two cleartext convolutions
    and the interior chirp scaling by relinearization (cyclic_domain=True
    skips the outer codings when input and output stay coded).
    method="matrix": a single linear-transform relinearization.
    """
    if rk is None:
        raise ValueError("per-coefficient relinearization keys are required")
    N, t = plan.N, plan.t
    if ct.n != N:
        raise ValueError("plan does not match ciphertext")
    if method == "matrix":
        root = pow(plan.ntt_root, -1, t) if inverse else plan.ntt_root
        F = ntt_matrix(N, root, t)
        if inverse:
            F = F * pow(N, -1, t) % t
        return linear_transform(ct, F, rk, params)
    if method != "chirp":
        raise ValueError(f"unknown method {method!r}")
    k1, mid, k2 = _unattended_vectors(N, t, inverse)
    if not cyclic_domain:
        ct = ew_mult_plain(ct, plan.murakami, rk, params)
    ct = mul_plain(ct, PolyR(k1, t), params)
    ct = ew_mult_plain(ct, mid, rk, params)
    ct = mul_plain(ct, PolyR(k2, t), params)
    if not cyclic_domain:
        ct = ew_mult_plain(ct, _pow_vec(pow(plan.neg_root, -1, t), N, t), rk, params)
    return ct


# ---------------------------------------------------------------------------
# encrypted x encrypted element-wise products


@dataclass(frozen=True, eq=False)
class ElementwiseKeys:
    method: str
    M: int
    n: int
    polyphase: PolyphaseKeys | None
    coeff: RelinKey | None   # per-coefficient keys in the component ring
    square: RelinKey         # square key in the component ring

    @property
    def entries(self) -> int:
        tot = self.square.entries
        if self.coeff is not None:
            tot += self.coeff.entries
        if self.polyphase is not None:
            tot += self.polyphase.entries
        return tot


def gen_elementwise_keys(sk: SecretKey, params: RingParams, rng, method: str = "full", M: int = 1):
    """Returns (keys, component-ring secret).  method: "full" (M=1),
    "polyphase" (1 < M < n) or "direct" (M = n, one-dimensional components)."""
    n = params.n
    if method == "full":
        M = 1
    elif method == "direct":
        M = n
    elif method != "polyphase" or not 1 < M < n:
        raise ValueError("polyphase needs 1 < M < n")
    if M == 1:
        return ElementwiseKeys("full", 1, n, None, gen_coeff_keys(sk, params, rng), gen_square_key(sk, params, rng)), sk
    pk, s_red = gen_polyphase_keys(sk, params, M, rng, insecure=(M == n))
    red = params.reduced(M)
    coeff = gen_coeff_keys(s_red, red, rng) if n // M > 1 else None
    return ElementwiseKeys(method, M, n, pk, coeff, gen_square_key(s_red, red, rng)), s_red


@lru_cache(maxsize=32)
def _sandwich_matrices(N: int, t: int):
    """T maps a ring element to its negacyclic NTT values; Tinv inverts it.
    Ring products become slot-wise products in between."""
    plan = TransformPlan(N, t)
    F = ntt_matrix(N, plan.ntt_root, t)
    Finv = ntt_matrix(N, pow(plan.ntt_root, -1, t), t) * pow(N, -1, t) % t
    psi = np.array([pow(plan.neg_root, l, t) for l in range(N)], dtype=object)
    psi_inv = np.array([pow(plan.neg_root, -l, t) for l in range(N)], dtype=object)
    T = F * psi[None, :] % t
    Tinv = psi_inv[:, None] * Finv % t
    return T, Tinv


def _ew_component(a: Ciphertext, b: Ciphertext, keys: ElementwiseKeys, params: RingParams) -> Ciphertext:
    N = a.n
    if N == 1:
        return relinearize(he_mult(a, b, params), keys.square)
    T, Tinv = _sandwich_matrices(N, params.t)
    x = linear_transform(a, Tinv, keys.coeff, params)
    y = linear_transform(b, Tinv, keys.coeff, params)
    z = relinearize(he_mult(x, y, params), keys.square)
    return linear_transform(z, T, keys.coeff, params)


def ew_mult_encrypted(ct0: Ciphertext, ct1: Ciphertext, keys: ElementwiseKeys, params: RingParams) -> Ciphertext:
    """Ciphertext of the slot-wise product of two encrypted vectors.

    The operands are split into M polyphase components (M = 1: none), each
    pair goes through transform, ring product and inverse transform in the
    component ring, and the components are merged back.
    """
    if ct0.n != keys.n or ct1.n != keys.n:
        raise ValueError("keys were generated for another dimension")
    if keys.M == 1:
        return _ew_component(ct0, ct1, keys, params)
    red = params.reduced(keys.M)
    xs = polyphase_relin_split(ct0, keys.M, keys.polyphase)
    ys = polyphase_relin_split(ct1, keys.M, keys.polyphase)
    outs = [_ew_component(x, y, keys, red) for x, y in zip(xs, ys)]
    return polyphase_relin_merge(outs, keys.polyphase)


def ew_mult_encrypted_blocks(cts0: list, cts1: list, keys: ElementwiseKeys, params: RingParams) -> list:
    """Signals longer than n travel as ceil(N/n) ciphertexts; pairs are independent."""
    if len(cts0) != len(cts1):
        raise ValueError("operands have different block counts")
    return [ew_mult_encrypted(a, b, keys, params) for a, b in zip(cts0, cts1)]


# ---------------------------------------------------------------------------
# cost model


@dataclass(frozen=True)
class CostReport:
    method: str
    cost: float
    bits: int
    entries: int
    n_min: int
    ratio_to_full: float


def cost_model(method: str, n: int, N: int, M: int = 1, q: int = 2, t: int = 2) -> CostReport:
    """Elemental product counts, relinearization key sizes and minimum lattice
    dimension for the three element-wise methods."""
    blocks = -(-N // n)
    L = 1
    p = t
    while p < q:
        p *= t
        L += 1
    lq = math.ceil(math.log2(q))
    lg = math.log2
    cost1 = blocks * n * n * lg(n)
    if method == "full":
        cost, entries, nmin = cost1, 2 * (n * n + n) * L, n
    elif method == "polyphase":
        cost = blocks * ((M * n + n * n / M) * lg(n / M) + n * lg(n))
        entries = (4 * n + 2 * n * n // (M * M) + 2 * n // M) * L
        nmin = n // M
    elif method == "direct":
        cost = blocks * (n * n + n * lg(n))
        entries = (4 * n + 2) * L
        nmin = 1
    else:
        raise ValueError(method)
    return CostReport(method, cost, entries * lq, entries, nmin, cost / cost1)
