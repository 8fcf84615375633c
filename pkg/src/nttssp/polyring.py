"""Polynomials in Z_m[z]/(1 + z^n), samplers, digit decomposition and
polyphase splitting."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import modmath as mm


@lru_cache(maxsize=None)
def ring_plan(m: int, n: int):
    """Negacyclic NTT plan for Z_m[z]/(1+z^n) when one exists, else None."""
    if (m - 1) % (2 * n) or not mm.check_prime(m):
        return None
    return mm.make_ntt_plan(m, n)


@dataclass(frozen=True, eq=False)
class PolyR:
    coeffs: np.ndarray
    m: int

    def __post_init__(self):
        c = mm.as_residues(self.coeffs, self.m)
        n = c.shape[-1] if c.ndim else 0
        if c.ndim != 1 or n & (n - 1) or n == 0:
            raise ValueError("coefficient vector length must be a power of two")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @classmethod
    def zero(cls, m: int, n: int) -> "PolyR":
        return cls(np.zeros(n, dtype=mm.dtype_for(m)), m)

    @classmethod
    def const(cls, value: int, m: int, n: int) -> "PolyR":
        c = np.zeros(n, dtype=mm.dtype_for(m))
        c[0] = int(value) % m
        return cls(c, m)

    @classmethod
    def monomial(cls, k: int, m: int, n: int, value: int = 1) -> "PolyR":
        # z^k with the negacyclic sign for k outside [0, n)
        sign = -1 if (k // n) % 2 else 1
        c = np.zeros(n, dtype=mm.dtype_for(m))
        c[k % n] = (sign * value) % m
        return cls(c, m)

    def to_list(self) -> list[int]:
        return [int(v) for v in self.coeffs]

    def centered(self) -> list[int]:
        h = self.m // 2
        return [int(v) - self.m if v > h else int(v) for v in self.coeffs]

    def _check(self, other):
        if self.m != other.m or self.n != other.n:
            raise ValueError("ring mismatch")

    def __add__(self, other):
        return poly_add(self, other)

    def __sub__(self, other):
        return poly_sub(self, other)

    def __mul__(self, other):
        if isinstance(other, PolyR):
            return poly_mul(self, other)
        return scalar_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return PolyR(mm.negmod(self.coeffs, self.m), self.m)

    def __eq__(self, other):
        return isinstance(other, PolyR) and self.m == other.m and self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.m, tuple(self.to_list())))

    def __repr__(self):
        return f"PolyR(m={self.m}, n={self.n}, coeffs={self.to_list()[:8]}{'...' if self.n > 8 else ''})"


def poly_add(a: PolyR, b: PolyR) -> PolyR:
    a._check(b)
    return PolyR(mm.addmod(a.coeffs, b.coeffs, a.m), a.m)


def poly_sub(a: PolyR, b: PolyR) -> PolyR:
    a._check(b)
    return PolyR(mm.submod(a.coeffs, b.coeffs, a.m), a.m)


def scalar_mul(a: PolyR, k: int) -> PolyR:
    k = int(k) % a.m
    if mm.is_fast(a.m):
        return PolyR(mm.mulmod(a.coeffs, np.int64(k), a.m), a.m)
    return PolyR(a.coeffs * k % a.m, a.m)


def schoolbook_negacyclic(a, b, m: int) -> list[int]:
    """O(n^2) reference product mod (1 + z^n), pure Python integers."""
    n = len(a)
    out = [0] * n
    a = [int(x) for x in a]
    b = [int(x) for x in b]
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            k = i + j
            if k < n:
                out[k] += ai * bj
            else:
                out[k - n] -= ai * bj
    return [v % m for v in out]


def negacyclic_product(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Product of residue vectors (batched over leading axes) in Z_m[z]/(1+z^n)."""
    n = a.shape[-1]
    plan = ring_plan(m, n)
    if plan is not None:
        return mm.negacyclic_mul(a, b, plan)
    a2 = np.broadcast_to(a, np.broadcast_shapes(a.shape, b.shape))
    b2 = np.broadcast_to(b, a2.shape)
    flat_a = a2.reshape(-1, n)
    flat_b = b2.reshape(-1, n)
    rows = [schoolbook_negacyclic(x, y, m) for x, y in zip(flat_a, flat_b)]
    return mm.as_residues(np.array(rows, dtype=object), m).reshape(a2.shape)


def poly_mul(a: PolyR, b: PolyR) -> PolyR:
    a._check(b)
    return PolyR(negacyclic_product(a.coeffs, b.coeffs, a.m), a.m)


# ---------------------------------------------------------------------------
# sampling


def _uniform_array(m: int, size, rng: np.random.Generator) -> np.ndarray:
    if m <= 2**63:
        return rng.integers(0, m, size=size, dtype=np.int64) if mm.is_fast(m) else np.array(
            rng.integers(0, m, size=size, dtype=np.uint64).tolist(), dtype=object)
    # rejection sampling on raw bytes
    nbytes = (m.bit_length() + 7) // 8
    mask = (1 << m.bit_length()) - 1
    count = int(np.prod(size))
    out = []
    while len(out) < count:
        raw = rng.bytes(nbytes * (count - len(out)) * 2)
        for i in range(0, len(raw), nbytes):
            v = int.from_bytes(raw[i:i + nbytes], "little") & mask
            if v < m:
                out.append(v)
                if len(out) == count:
                    break
    return np.array(out, dtype=object).reshape(size)


def sample_uniform(m: int, n: int, rng: np.random.Generator) -> PolyR:
    return PolyR(_uniform_array(m, n, rng), m)


@dataclass(frozen=True)
class GaussianSampler:
    sigma: float
    tail_cut: int = 6

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def integers(self, size, rng: np.random.Generator) -> np.ndarray:
        """Rounded (half-even) normal draws; draws past tail_cut*sigma are redrawn."""
        bound = self.tail_cut * self.sigma
        x = np.rint(rng.normal(0.0, self.sigma, size))
        bad = np.abs(x) > bound
        while bad.any():
            x[bad] = np.rint(rng.normal(0.0, self.sigma, int(bad.sum())))
            bad = np.abs(x) > bound
        return x.astype(np.int64)


def sample_error(sampler: GaussianSampler, m: int, n: int, rng: np.random.Generator) -> PolyR:
    return PolyR(sampler.integers(n, rng), m)


# ---------------------------------------------------------------------------
# base-t digits


def num_digits(q: int, t: int) -> int:
    """ceil(log_t q), computed exactly."""
    L, p = 0, 1
    while p < q:
        p *= t
        L += 1
    return max(L, 1)


def digits_array(c: np.ndarray, q: int, t: int) -> np.ndarray:
    """Unsigned base-t digits of residues, new axis -2 of length ceil(log_t q)."""
    L = num_digits(q, t)
    out = []
    if mm.is_fast(q):
        x = c.astype(np.int64)
        for _ in range(L):
            out.append(x % t)
            x = x // t
        return np.stack(out, axis=-2)
    x = c.astype(object)
    for _ in range(L):
        out.append(x % t)
        x = x // t
    d = np.stack(out, axis=-2)
    return d.astype(np.int64) if t < 2**62 else d


def base_t_decompose(c: PolyR, t: int) -> list[PolyR]:
    if t < 2:
        raise ValueError("base must be at least 2")
    d = digits_array(c.coeffs, c.m, t)
    return [PolyR(d[i], c.m) for i in range(d.shape[0])]


def recompose(digits: list[PolyR], t: int) -> PolyR:
    m = digits[0].m
    acc = PolyR.zero(m, digits[0].n)
    for i, d in enumerate(digits):
        acc = acc + scalar_mul(d, pow(t, i, m))
    return acc


# ---------------------------------------------------------------------------
# substitution and polyphase components


def substitute_power(a: PolyR, G: int) -> PolyR:
    """a(z^G) viewed in the ring of dimension G*n."""
    if G < 1 or G & (G - 1):
        raise ValueError("G must be a power of two")
    out = np.zeros(a.n * G, dtype=a.coeffs.dtype)
    out[::G] = a.coeffs
    return PolyR(out, a.m)


def _check_M(n: int, M: int):
    if M < 1 or M & (M - 1) or n % M:
        raise ValueError(f"M={M} must be a power of two dividing n={n}")


def polyphase_split(a: PolyR, M: int, signed: bool = False) -> list[PolyR]:
    """Components of a with a(z) = sum_i z^i A_i(z^M)  (signed=False), or the
    mirrored form a(z) = sum_i z^-i A_i(z^M) where component i collects
    positions dM - i and the wrapped entry at a negative index is negated
    (signed=True)."""
    _check_M(a.n, M)
    c = a.coeffs
    if not signed:
        return [PolyR(c[i::M], a.m) for i in range(M)]
    comps = [PolyR(c[0::M], a.m)]
    for i in range(1, M):
        v = c[M - i::M].copy()
        # v currently holds positions M-i, 2M-i, ...; shift so index d = dM-i
        first = mm.negmod(c[a.n - i:a.n - i + 1], a.m)
        comps.append(PolyR(np.concatenate((first, v[:-1])), a.m))
    return comps


def polyphase_merge(parts: list[PolyR], M: int, signed: bool = False) -> PolyR:
    if len(parts) != M:
        raise ValueError("need exactly M components")
    n = parts[0].n * M
    _check_M(n, M)
    m = parts[0].m
    out = np.zeros(n, dtype=parts[0].coeffs.dtype)
    if not signed:
        for i, p in enumerate(parts):
            out[i::M] = p.coeffs
        return PolyR(out, m)
    out[0::M] = parts[0].coeffs
    for i in range(1, M):
        v = parts[i].coeffs
        out[M - i::M][:-1] = v[1:]
        out[n - i] = mm.negmod(v[:1], m)[0]
    return PolyR(out, m)
