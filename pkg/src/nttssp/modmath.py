"""Exact modular arithmetic, Proth primes, roots of unity and radix-2 NTTs.

Residue vectors are numpy arrays.  Moduli below ``FAST_LIMIT`` use int64
storage with an exact reduction; larger moduli fall back to object arrays
holding Python integers, which is slower but has no size limit.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np
from sympy.ntheory import n_order

# The long-double reciprocal trick needs a 64-bit mantissa.  Without one we
# only trust int64 for moduli whose products fit in 63 bits.
_LD_OK = np.finfo(np.longdouble).nmant >= 63
FAST_LIMIT = 2**62 if _LD_OK else 2**31
_SMALL_LIMIT = 2**31

SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class SearchExhausted(RuntimeError):
    pass


class Inconclusive(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# vectorised residue arithmetic


def is_fast(m: int) -> bool:
    return m < FAST_LIMIT


def dtype_for(m: int):
    return np.int64 if is_fast(m) else object


def as_residues(values, m: int) -> np.ndarray:
    """Reduce arbitrary integers into canonical residues [0, m)."""
    if isinstance(values, np.ndarray) and values.dtype != object and is_fast(m):
        return np.mod(values.astype(np.int64, copy=False), m)
    arr = np.array(values, dtype=object)
    arr = arr % m
    if is_fast(m):
        return arr.astype(np.int64)
    return arr


def addmod(a, b, m):
    if is_fast(m):
        s = a + b
        return np.where(s >= m, s - m, s)
    return (a + b) % m


def submod(a, b, m):
    if is_fast(m):
        s = a - b
        return np.where(s < 0, s + m, s)
    return (a - b) % m


def negmod(a, m):
    if is_fast(m):
        return np.where(a == 0, a, m - a)
    return (-a) % m


def mulmod(a, b, m):
    """Exact (a*b) mod m for canonical residues."""
    if m < _SMALL_LIMIT:
        return (a * b) % m
    if is_fast(m):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        inv = np.longdouble(1) / np.longdouble(m)
        quot = (a.astype(np.longdouble) * b.astype(np.longdouble) * inv).astype(np.int64)
        # wrap-around in the products cancels out in the difference
        with np.errstate(over="ignore"):
            r = (a.astype(np.uint64) * b.astype(np.uint64) - quot.astype(np.uint64) * np.uint64(m)).astype(np.int64)
        r = np.where(r < 0, r + m, r)
        return np.where(r >= m, r - m, r)
    return (a * b) % m


def center(a, m):
    """Centered lift into (-m/2, m/2] as Python-int object array or int64."""
    half = m // 2
    if is_fast(m):
        return np.where(a > half, a - m, a)
    return np.array([int(v) - m if v > half else int(v) for v in np.ravel(a)], dtype=object).reshape(np.shape(a))


# ---------------------------------------------------------------------------
# primality and Proth primes


def proth_form(q: int):
    """Return (k, l) with q = k*2^l + 1, k odd and 2^l > k, or None."""
    if q < 3 or q % 2 == 0:
        return None
    v = q - 1
    l = (v & -v).bit_length() - 1
    k = v >> l
    if (1 << l) > k:
        return k, l
    return None


def miller_rabin(n: int, bases=_MR_BASES) -> bool:
    if n < 2:
        return False
    for p in (2,) + SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    # the fixed bases are deterministic below 3.3e24; past that add random ones
    if n < 3_317_044_064_679_887_385_961_981:
        return miller_rabin(n)
    rng = np.random.default_rng(n % (2**63))
    extra = tuple(int(rng.integers(2, 2**62)) % (n - 3) + 2 for _ in range(24))
    return miller_rabin(n, _MR_BASES + extra)


def proth_test(q: int, trials: int = 20, rng=None) -> bool:
    """Proth's theorem.  True when a witness a^((q-1)/2) = -1 is found,
    False when some a proves q composite, Inconclusive otherwise."""
    if proth_form(q) is None:
        raise ValueError(f"{q} is not of the form k*2^l+1 with odd k < 2^l")
    rng = rng or np.random.default_rng(q % (2**63))
    e = (q - 1) // 2
    for i in range(trials):
        if i < 5:
            a = (3, 5, 7, 11, 13)[i]
        else:
            a = int(rng.integers(2, min(q - 1, 2**62)))
        if a % q == 0:
            continue
        r = pow(a, e, q)
        if r == q - 1:
            return True
        if r != 1:
            return False
    raise Inconclusive(f"no Proth witness for {q} after {trials} trials")


def check_prime(q: int) -> bool:
    if q < 100:
        return q > 1 and all(q % p for p in range(2, math.isqrt(q) + 1))
    if any(q % p == 0 for p in SMALL_PRIMES):
        return False
    if proth_form(q) is not None:
        try:
            return proth_test(q)
        except Inconclusive:
            pass
    return is_prime(q)


@dataclass(frozen=True)
class Modulus:
    value: int
    proth_k: int
    proth_l: int

    def __post_init__(self):
        if self.value != self.proth_k * 2**self.proth_l + 1 or self.proth_k % 2 == 0 or 2**self.proth_l <= self.proth_k:
            raise ValueError("not a Proth number")

    @classmethod
    def from_value(cls, q: int) -> "Modulus":
        kl = proth_form(q)
        if kl is None:
            raise ValueError(f"{q} is not a Proth number")
        if not check_prime(q):
            raise ValueError(f"{q} is not prime")
        return cls(q, kl[0], kl[1])

    @property
    def bits(self) -> int:
        return self.value.bit_length()

    def __int__(self):
        return self.value


def proth_search(N: int, min_bits: int, max_bits: int = 63, cap: int = 200_000) -> Modulus:
    """Smallest Proth prime q >= 2^(min_bits-1) with q = 1 mod 2N.

    Candidates are k*2^l + 1 with l >= log2(2N); for each l the odd k are
    walked upward and the streams are merged so values come out in order.
    """
    if N < 1 or N & (N - 1):
        raise ValueError("N must be a power of two")
    l_min = (2 * N).bit_length() - 1
    if min_bits < l_min + 1:
        raise ValueError(f"min_bits must be at least {l_min + 1}")
    if min_bits > max_bits:
        raise ValueError(f"min_bits={min_bits} exceeds max_bits={max_bits}")
    lo = 1 << (min_bits - 1)
    hi = 1 << max_bits
    heap = []
    for l in range(l_min, max_bits):
        # smallest odd k with k*2^l + 1 >= lo
        k = max(1, -(-(lo - 1) // (1 << l)))
        if k % 2 == 0:
            k += 1
        if k < (1 << l):
            heapq.heappush(heap, (k * (1 << l) + 1, k, l))
    tested = 0
    while heap:
        q, k, l = heapq.heappop(heap)
        if q >= hi:
            break
        if check_prime(q):
            return Modulus(q, k, l)
        tested += 1
        if tested >= cap:
            break
        k += 2
        if k < (1 << l):
            heapq.heappush(heap, (k * (1 << l) + 1, k, l))
    raise SearchExhausted(f"no Proth prime = 1 mod {2 * N} in [2^{min_bits - 1}, 2^{max_bits})")


# ---------------------------------------------------------------------------
# roots of unity


def find_root(p: int, N: int) -> int:
    """An element of order exactly N: scan i = 1, 2, ... for an element whose
    order M is a multiple of N, and return i^(M/N)."""
    p = int(p)
    if (p - 1) % N:
        raise ValueError(f"{N} does not divide {p}-1")
    if N == 1:
        return 1
    for i in range(2, p):
        M = n_order(i, p)
        if M % N == 0:
            alpha = pow(i, M // N, p)
            assert pow(alpha, N // 2, p) == p - 1 or N == 1
            return alpha
    raise AssertionError("unreachable for prime p")


def smallest_root(p: int, order: int) -> int:
    """Smallest positive element of exactly the given power-of-two order."""
    if (p - 1) % order:
        raise ValueError(f"{order} does not divide {p}-1")
    if order == 1:
        return 1
    g = find_root(p, order)
    # all elements of that order are g^j with odd j
    return min(pow(g, j, p) for j in range(1, order, 2)) if order <= 4096 else g


def nth_roots(value: int, N: int, p: int) -> list[int]:
    """All x in Z_p with x^N = value (brute force; small p only)."""
    return [x for x in range(1, p) if pow(x, N, p) == value % p]


# ---------------------------------------------------------------------------
# NTT plans


def _bitrev(N: int) -> np.ndarray:
    bits = N.bit_length() - 1
    idx = np.arange(N)
    rev = np.zeros(N, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _stage_twiddles(root: int, N: int, p: int, dtype):
    stages = []
    length = 2
    while length <= N:
        w = pow(root, N // length, p)
        tw = [1] * (length // 2)
        for j in range(1, length // 2):
            tw[j] = tw[j - 1] * w % p
        stages.append(np.array(tw, dtype=dtype))
        length *= 2
    return stages


def _shoup_tables(stages, p: int):
    """Flattened stage twiddles w and floor(w 2^64 / p) for the compiled kernel."""
    if not stages:
        return np.zeros(0, np.uint64), np.zeros(0, np.uint64)
    w = [int(v) for tw in stages for v in tw]
    return np.array(w, dtype=np.uint64), np.array([(v << 64) // p for v in w], dtype=np.uint64)


@numba.njit(cache=True, inline="always")
def _mulhi(a, b):
    mask = numba.uint64(0xFFFFFFFF)
    s32 = numba.uint64(32)
    a_lo, a_hi = a & mask, a >> s32
    b_lo, b_hi = b & mask, b >> s32
    ll = a_lo * b_lo
    hl = a_hi * b_lo
    cross = (ll >> s32) + (hl & mask) + a_lo * b_hi
    return a_hi * b_hi + (hl >> s32) + (cross >> s32)


@numba.njit(cache=True, inline="always")
def _shoup(v, w, ws, p):
    """v w mod p given ws = floor(w 2^64 / p)."""
    m = v * w - _mulhi(v, ws) * p
    return m - p if m >= p else m


@numba.njit(cache=True, inline="always")
def _redc_mul(a, b, p, pneg):
    """a b 2^-64 mod p (Montgomery)."""
    lo = a * b
    m = lo * pneg
    r = _mulhi(a, b) + _mulhi(m, p) + (numba.uint64(1) if lo != 0 else numba.uint64(0))
    return r - p if r >= p else r


@numba.njit(cache=True)
def _butterflies(y, p, tw, tws):
    N = y.shape[0]
    length = 2
    base = 0
    while length <= N:
        half = length // 2
        for s in range(0, N, length):
            for j in range(half):
                m = _shoup(y[s + j + half], tw[base + j], tws[base + j], p)
                u = y[s + j]
                a = u + m
                y[s + j] = a - p if a >= p else a
                y[s + j + half] = u - m if u >= m else u + p - m
        base += half
        length *= 2


@numba.njit(cache=True)
def _load(y, x, bitrev, pre, pre_s, p):
    for i in range(y.shape[0]):
        k = bitrev[i]
        v = numba.uint64(x[k])
        y[i] = _shoup(v, pre[k], pre_s[k], p) if pre.shape[0] else v


@numba.njit(cache=True)
def _scale(y, post, post_s, p):
    if post.shape[0]:
        for i in range(y.shape[0]):
            y[i] = _shoup(y[i], post[i], post_s[i], p)


@numba.njit(cache=True)
def _transform_jit(x, p, tw, tws, bitrev, pre, pre_s, post, post_s):
    rows, N = x.shape
    out = np.empty((rows, N), dtype=np.uint64)
    for r in range(rows):
        _load(out[r], x[r], bitrev, pre, pre_s, p)
        _butterflies(out[r], p, tw, tws)
        _scale(out[r], post, post_s, p)
    return out


@numba.njit(cache=True)
def _negacyclic_jit(a, b, p, pneg, bitrev, twist, twist_s, ftw, ftws, itw, itws, post, post_s):
    rows, N = a.shape
    out = np.empty((rows, N), dtype=np.uint64)
    A = np.empty(N, dtype=np.uint64)
    B = np.empty(N, dtype=np.uint64)
    C = np.empty(N, dtype=np.uint64)
    for r in range(rows):
        _load(A, a[r], bitrev, twist, twist_s, p)
        _butterflies(A, p, ftw, ftws)
        _load(B, b[r], bitrev, twist, twist_s, p)
        _butterflies(B, p, ftw, ftws)
        for i in range(N):
            C[i] = _redc_mul(A[i], B[i], p, pneg)
        y = out[r]
        for i in range(N):
            y[i] = C[bitrev[i]]
        _butterflies(y, p, itw, itws)
        # post carries the 2^64 that undoes the Montgomery factor
        _scale(y, post, post_s, p)
    return out


_EMPTY = np.zeros(0, dtype=np.uint64)


def _shoup_vec(values, p: int):
    w = [int(v) for v in values]
    return np.array(w, dtype=np.uint64), np.array([(v << 64) // p for v in w], dtype=np.uint64)


def _powers(g: int, N: int, p: int, dtype, scale: int = 1):
    out = [scale % p] * N
    for j in range(1, N):
        out[j] = out[j - 1] * g % p
    return np.array(out, dtype=dtype)


@dataclass(frozen=True, eq=False)
class NttPlan:
    N: int
    p: int
    root: int
    psi: int | None = None
    root_inv: int = field(init=False)
    n_inv: int = field(init=False)
    bitrev: np.ndarray = field(init=False, repr=False)
    fwd: list = field(init=False, repr=False)
    inv: list = field(init=False, repr=False)
    twist: np.ndarray | None = field(init=False, repr=False)
    untwist: np.ndarray | None = field(init=False, repr=False)
    fwd_jit: tuple | None = field(init=False, repr=False)
    inv_jit: tuple | None = field(init=False, repr=False)
    jit_tables: dict | None = field(init=False, repr=False)

    def __post_init__(self):
        N, p, root = self.N, self.p, self.root
        if N < 1 or N & (N - 1):
            raise ValueError("N must be a power of two")
        if pow(root, N, p) != 1 or (N > 1 and pow(root, N // 2, p) != p - 1):
            raise ValueError("root is not a primitive N-th root of unity")
        dt = dtype_for(p)
        set_ = object.__setattr__
        set_(self, "root_inv", pow(root, -1, p))
        set_(self, "n_inv", pow(N, -1, p))
        set_(self, "bitrev", _bitrev(N))
        set_(self, "fwd", _stage_twiddles(root, N, p, dt))
        set_(self, "inv", _stage_twiddles(self.root_inv, N, p, dt))
        fast = is_fast(p)
        set_(self, "fwd_jit", _shoup_tables(self.fwd, p) if fast else None)
        set_(self, "inv_jit", _shoup_tables(self.inv, p) if fast else None)
        if self.psi is not None:
            if pow(self.psi, 2, p) != root % p or pow(self.psi, N, p) != p - 1:
                raise ValueError("psi must satisfy psi^2 = root and psi^N = -1")
            set_(self, "twist", _powers(self.psi, N, p, dt))
            set_(self, "untwist", _powers(pow(self.psi, -1, p), N, p, dt, self.n_inv))
        else:
            set_(self, "twist", None)
            set_(self, "untwist", None)
        tables = None
        if fast:
            tables = {"bitrev": self.bitrev.astype(np.int64), "ninv": _shoup_vec([self.n_inv] * N, p)}
            if self.psi is not None:
                tables["twist"] = _shoup_vec(self.twist, p)
                tables["untwist"] = _shoup_vec(self.untwist, p)
                tables["untwist_mont"] = _shoup_vec([int(v) * 2**64 % p for v in self.untwist], p)
                tables["pneg"] = np.uint64((-pow(p, -1, 2**64)) % 2**64)
        set_(self, "jit_tables", tables)


@lru_cache(maxsize=None)
def make_ntt_plan(p: int, N: int, negacyclic: bool = True) -> NttPlan:
    """Plan over Z_p; with negacyclic=True the twist root psi of order 2N is
    found first and root = psi^2."""
    p = int(p)
    if negacyclic:
        psi = find_root(p, 2 * N)
        return NttPlan(N, p, psi * psi % p, psi)
    return NttPlan(N, p, find_root(p, N))


def _check_len(x, plan):
    if np.shape(x)[-1] != plan.N:
        raise ValueError(f"length {np.shape(x)[-1]} does not match plan size {plan.N}")


# compiled butterflies for int64 residues; set False to force the numpy path
USE_JIT = True


def _jit_ok(plan, *arrays) -> bool:
    return USE_JIT and plan.jit_tables is not None and all(np.asarray(a).dtype == np.int64 for a in arrays)


def _rows(x, N):
    return np.ascontiguousarray(np.asarray(x, dtype=np.int64).reshape(-1, N))


def _run_jit(x, plan, stages_jit, pre=None, post=None):
    N = plan.N
    pre = pre or (_EMPTY, _EMPTY)
    post = post or (_EMPTY, _EMPTY)
    out = _transform_jit(_rows(x, N), np.uint64(plan.p), stages_jit[0], stages_jit[1],
                         plan.jit_tables["bitrev"], pre[0], pre[1], post[0], post[1])
    return out.astype(np.int64).reshape(np.shape(x))


def _transform(x, p, stages, bitrev):
    N = x.shape[-1]
    lead = x.shape[:-1]
    x = x[..., bitrev]
    length = 2
    for tw in stages:
        half = length // 2
        x = x.reshape(lead + (N // length, 2, half))
        u = x[..., 0, :]
        v = mulmod(x[..., 1, :], tw, p)
        x = np.stack((addmod(u, v, p), submod(u, v, p)), axis=-2)
        length *= 2
    return x.reshape(lead + (N,))


def _prep(x, plan):
    _check_len(x, plan)
    arr = np.asarray(x)
    if is_fast(plan.p):
        return arr.astype(np.int64, copy=False)
    return arr.astype(object)


def ntt_forward(x, plan: NttPlan) -> np.ndarray:
    """X[k] = sum_l x[l] root^(lk) mod p along the last axis."""
    x = _prep(x, plan)
    if _jit_ok(plan, x):
        return _run_jit(x, plan, plan.fwd_jit)
    return _transform(x, plan.p, plan.fwd, plan.bitrev)


def ntt_inverse(X, plan: NttPlan) -> np.ndarray:
    X = _prep(X, plan)
    if _jit_ok(plan, X):
        return _run_jit(X, plan, plan.inv_jit, post=plan.jit_tables["ninv"])
    y = _transform(X, plan.p, plan.inv, plan.bitrev)
    return mulmod(y, plan.n_inv, plan.p)


def _need_psi(plan):
    if plan.psi is None:
        raise ValueError("plan has no psi; negacyclic products need a 2N-th root")


def negacyclic_forward(a, plan: NttPlan) -> np.ndarray:
    _need_psi(plan)
    a = _prep(a, plan)
    if _jit_ok(plan, a):
        return _run_jit(a, plan, plan.fwd_jit, pre=plan.jit_tables["twist"])
    return _transform(mulmod(a, plan.twist, plan.p), plan.p, plan.fwd, plan.bitrev)


def negacyclic_inverse(A, plan: NttPlan) -> np.ndarray:
    _need_psi(plan)
    A = _prep(A, plan)
    if _jit_ok(plan, A):
        return _run_jit(A, plan, plan.inv_jit, post=plan.jit_tables["untwist"])
    y = _transform(A, plan.p, plan.inv, plan.bitrev)
    return mulmod(y, plan.untwist, plan.p)


def negacyclic_mul(a, b, plan: NttPlan) -> np.ndarray:
    """a*b mod (1 + z^N) mod p."""
    _check_len(b, plan)
    _need_psi(plan)
    a, b = _prep(a, plan), _prep(b, plan)
    if _jit_ok(plan, a, b):
        shape, N, T = np.broadcast_shapes(a.shape, b.shape), plan.N, plan.jit_tables
        a, b = np.broadcast_to(a, shape), np.broadcast_to(b, shape)
        out = _negacyclic_jit(_rows(a, N), _rows(b, N), np.uint64(plan.p), T["pneg"], T["bitrev"],
                              T["twist"][0], T["twist"][1], plan.fwd_jit[0], plan.fwd_jit[1],
                              plan.inv_jit[0], plan.inv_jit[1], T["untwist_mont"][0], T["untwist_mont"][1])
        return out.astype(np.int64).reshape(shape)
    A = negacyclic_forward(a, plan)
    B = negacyclic_forward(b, plan)
    return negacyclic_inverse(mulmod(A, B, plan.p), plan)


def cyclic_mul(a, b, plan: NttPlan) -> np.ndarray:
    """a*b mod (z^N - 1) mod p."""
    _check_len(b, plan)
    A = ntt_forward(a, plan)
    B = ntt_forward(b, plan)
    return ntt_inverse(mulmod(A, B, plan.p), plan)
