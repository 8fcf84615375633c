"""RLWE somewhat-homomorphic encryption over Z_q[z]/(1 + z^n) with plaintext
space Z_t[z]/(1 + z^n)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import modmath as mm
from .polyring import GaussianSampler, PolyR, num_digits, ring_plan, sample_error, sample_uniform


class DepthExceeded(RuntimeError):
    pass


class ParameterInfeasible(ValueError):
    pass


@dataclass(frozen=True)
class RingParams:
    n: int
    q: mm.Modulus
    t: int
    sigma: float = 1.0
    D: int = 1
    A: int = 1
    tail_cut: int = 6

    def __post_init__(self):
        n, q = self.n, self.q.value
        if n < 1 or n & (n - 1):
            raise ValueError("n must be a power of two")
        if (q - 1) % (2 * n):
            raise ValueError("q must be 1 mod 2n")
        if math.gcd(self.t, q) != 1 or self.t < 2:
            raise ValueError("t must be at least 2 and coprime to q")

    @property
    def qv(self) -> int:
        return self.q.value

    @property
    def digits(self) -> int:
        """Number of base-t digits of a residue mod q."""
        return num_digits(self.qv, self.t)

    @property
    def sampler(self) -> GaussianSampler:
        return GaussianSampler(self.sigma, self.tail_cut)

    @property
    def plan(self):
        return ring_plan(self.qv, self.n)

    @property
    def plain_plan(self):
        return ring_plan(self.t, self.n)

    def reduced(self, M: int) -> "RingParams":
        """Same moduli over the ring of dimension n/M."""
        if self.n % M:
            raise ValueError("M must divide n")
        return replace(self, n=self.n // M)

    def expanded(self, G: int) -> "RingParams":
        return replace(self, n=self.n * G)


def bound_squared(n: int, t: int, sigma: float, D: int, A: int) -> Fraction:
    """Square of 4 (2 t sigma^2 sqrt(n))^(D+1) (2n)^(D/2) sqrt(A), exactly."""
    s2 = Fraction(sigma) ** 2
    return 16 * (2 * t * s2) ** (2 * D + 2) * Fraction(n) ** (D + 1) * Fraction(2 * n) ** D * A


def log2_bound(n: int, t: int, sigma: float = 1.0, D: int = 1, A: int = 1) -> float:
    return 0.5 * math.log2(bound_squared(n, t, sigma, D, A))


def required_bits(n: int, t: int, sigma: float = 1.0, D: int = 1, A: int = 1) -> int:
    """Smallest bit length B such that every B-bit integer meets the bound,
    i.e. 2^(B-1) >= bound."""
    b2 = bound_squared(n, t, sigma, D, A)
    m = 0
    while Fraction(4) ** m < b2:
        m += 1
    return m + 1


def build_params(n: int, t: int, sigma: float = 1.0, D: int = 1, A: int = 1, *,
                 max_bits: int = 63, min_bits: int | None = None, margin_bits: int = 0,
                 tail_cut: int = 6) -> RingParams:
    """Smallest Proth prime q = 1 mod 2n meeting the noise bound.  The bound
    grows like a sum of random terms, so its tails are occasionally exceeded;
    margin_bits adds headroom when zero failures matter more than size."""
    B = required_bits(n, t, sigma, D, A) + margin_bits
    if min_bits is not None:
        B = max(B, min_bits)
    B = max(B, (2 * n).bit_length() + 1)
    if B > max_bits:
        raise ParameterInfeasible(f"q needs {B} bits, above the {max_bits}-bit limit")
    q = mm.proth_search(n, B, max_bits=max(max_bits, B))
    if q.value == t:
        q = mm.proth_search(n, B + 1, max_bits=max_bits)
    return RingParams(n, q, t, sigma, D, A, tail_cut)


# ---------------------------------------------------------------------------
# keys and ciphertexts


@dataclass(frozen=True)
class SecretKey:
    s: PolyR

    def powers(self, count: int) -> list[PolyR]:
        out = [PolyR.const(1, self.s.m, self.s.n)]
        for _ in range(1, count):
            out.append(out[-1] * self.s)
        return out


@dataclass(frozen=True)
class PublicKey:
    a0: PolyR
    a1: PolyR


@dataclass(frozen=True)
class Ciphertext:
    polys: tuple
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "polys", tuple(self.polys))
        if len(self.polys) < 1:
            raise ValueError("empty ciphertext")

    @property
    def gamma(self) -> int:
        return len(self.polys)

    @property
    def n(self) -> int:
        return self.polys[0].n

    @property
    def q(self) -> int:
        return self.polys[0].m


def keygen(params: RingParams, rng: np.random.Generator):
    q, n = params.qv, params.n
    s = sample_error(params.sampler, q, n, rng)
    e = sample_error(params.sampler, q, n, rng)
    a1 = sample_uniform(q, n, rng)
    a0 = -(a1 * s + e * params.t)
    return SecretKey(s), PublicKey(a0, a1)


def embed_plain(m, params: RingParams, centered: bool = False) -> PolyR:
    """Lift a plaintext (PolyR over t or integer sequence) into R_q."""
    vals = m.to_list() if isinstance(m, PolyR) else [int(v) for v in m]
    if len(vals) != params.n:
        raise ValueError(f"plaintext has {len(vals)} coefficients, ring has {params.n}")
    t = params.t
    vals = [v % t for v in vals]
    if centered:
        vals = [v - t if v > t // 2 else v for v in vals]
    return PolyR(np.array(vals, dtype=object), params.qv)


def encrypt(pk: PublicKey, m, params: RingParams, rng: np.random.Generator) -> Ciphertext:
    q, n, t = params.qv, params.n, params.t
    if pk.a0.n != n:
        raise ValueError("key dimension does not match params")
    # centered residues keep the message terms of the noise zero-mean
    mq = embed_plain(m, params, centered=True)
    u = sample_error(params.sampler, q, n, rng)
    g = sample_error(params.sampler, q, n, rng)
    f = sample_error(params.sampler, q, n, rng)
    c0 = pk.a0 * u + g * t + mq
    c1 = pk.a1 * u + f * t
    return Ciphertext((c0, c1), 0)


def decrypt_raw(sk: SecretKey, ct: Ciphertext) -> list[int]:
    """Centered representatives of sum_i c_i s^i mod q."""
    acc = ct.polys[-1]
    for c in reversed(ct.polys[:-1]):
        acc = acc * sk.s + c
    return acc.centered()


def decrypt(sk: SecretKey, ct: Ciphertext, params: RingParams) -> PolyR:
    if ct.n != sk.s.n:
        raise ValueError("ciphertext and key dimensions differ")
    vals = decrypt_raw(sk, ct)
    return PolyR(np.array([v % params.t for v in vals], dtype=object), params.t)


def noise(sk: SecretKey, ct: Ciphertext) -> int:
    """Largest magnitude of the centered decryption value before reduction mod t."""
    return max(abs(v) for v in decrypt_raw(sk, ct))


def _zero_like(p: PolyR) -> PolyR:
    return PolyR.zero(p.m, p.n)


def he_add(ct0: Ciphertext, ct1: Ciphertext) -> Ciphertext:
    g = max(ct0.gamma, ct1.gamma)
    a = list(ct0.polys) + [_zero_like(ct0.polys[0])] * (g - ct0.gamma)
    b = list(ct1.polys) + [_zero_like(ct1.polys[0])] * (g - ct1.gamma)
    return Ciphertext(tuple(x + y for x, y in zip(a, b)), max(ct0.level, ct1.level))


def he_neg(ct: Ciphertext) -> Ciphertext:
    return Ciphertext(tuple(-c for c in ct.polys), ct.level)


def he_sub(ct0: Ciphertext, ct1: Ciphertext) -> Ciphertext:
    return he_add(ct0, he_neg(ct1))


def next_level(level: int, params: RingParams | None) -> int:
    if params is not None and level + 1 > params.D:
        raise DepthExceeded(f"level {level + 1} exceeds supported depth {params.D}")
    return level + 1


def he_mult(ct0: Ciphertext, ct1: Ciphertext, params: RingParams | None = None) -> Ciphertext:
    """Product as a polynomial in an auxiliary variable v: component k is
    sum_{i+j=k} c0_i c1_j."""
    level = next_level(max(ct0.level, ct1.level), params)
    out = [None] * (ct0.gamma + ct1.gamma - 1)
    for i, a in enumerate(ct0.polys):
        for j, b in enumerate(ct1.polys):
            p = a * b
            out[i + j] = p if out[i + j] is None else out[i + j] + p
    return Ciphertext(tuple(out), level)


def mul_plain(ct: Ciphertext, p, params: RingParams) -> Ciphertext:
    """Multiply by a cleartext polynomial; the centered lift keeps noise small."""
    pq = embed_plain(p, params, centered=True)
    level = next_level(ct.level, params)
    return Ciphertext(tuple(c * pq for c in ct.polys), level)


def add_plain(ct: Ciphertext, p, params: RingParams) -> Ciphertext:
    pq = embed_plain(p, params)
    return Ciphertext((ct.polys[0] + pq,) + ct.polys[1:], ct.level)


def mul_monomial(ct: Ciphertext, k: int) -> Ciphertext:
    """Multiply every component by z^k; noise is unchanged."""
    out = []
    for c in ct.polys:
        n = c.n
        src = np.arange(n) + k % (2 * n)
        neg = (src // n) % 2 == 1
        vals = np.where(neg, mm.negmod(c.coeffs, c.m), c.coeffs)
        coeffs = np.empty_like(vals)
        coeffs[src % n] = vals
        out.append(PolyR(coeffs, c.m))
    return Ciphertext(tuple(out), ct.level)


# ---------------------------------------------------------------------------
# security estimate

DEFAULT_EPSILON = 2.0 ** -32


@dataclass(frozen=True)
class SecurityReport:
    delta: float
    bit_security: float
    epsilon: float
    c: float
    s_scale: float
    n: int
    log2_q: float
    c_rule: str = "log2"
    tabulated_delta: float = field(init=False)
    tabulated_bit_security: float = field(init=False)

    def __post_init__(self):
        d4 = round(self.delta, 4)
        object.__setattr__(self, "tabulated_delta", d4)
        object.__setattr__(self, "tabulated_bit_security", bit_security_from_delta(d4))


def bit_security_from_delta(delta: float) -> float:
    return 1.8 / math.log2(delta) - 110


def attack_constant(epsilon: float, rule: str = "log2") -> float:
    """c = sqrt(log(1/eps)/pi), with the logarithm in base 2 ("log2") or e ("ln")."""
    if rule == "log2":
        return math.sqrt(math.log2(1 / epsilon) / math.pi)
    if rule == "ln":
        return math.sqrt(math.log(1 / epsilon) / math.pi)
    raise ValueError(f"unknown rule {rule!r}")


def estimate_security(params: RingParams | None = None, epsilon: float = DEFAULT_EPSILON, *,
                      n: int | None = None, q: int | None = None, sigma: float | None = None,
                      rule: str = "log2") -> SecurityReport:
    """Root Hermite factor of the distinguishing attack and the matching BKZ
    bit-security estimate."""
    if params is not None:
        n = n or params.n
        q = q or params.qv
        sigma = sigma or params.sigma
    sigma = sigma or 1.0
    c = attack_constant(epsilon, rule)
    s = sigma * math.sqrt(2 * math.pi)
    lq = math.log2(q)
    log2_delta = (math.log2(c / s) + lq) ** 2 / (4 * n * lq)
    delta = 2.0 ** log2_delta
    return SecurityReport(delta, 1.8 / log2_delta - 110, epsilon, c, s, n, lq, rule)


def additive_noise_bound(params: RingParams, depth: int | None = None, additions: int | None = None) -> float:
    """(2 t sigma^2 sqrt(n))^(depth+1) (2n)^(depth/2) sqrt(additions): the
    decryption-value budget behind the modulus bound (without its factor 4)."""
    D = params.D if depth is None else depth
    A = params.A if additions is None else additions
    n, t, s2 = params.n, params.t, params.sigma ** 2
    return (2 * t * s2 * math.sqrt(n)) ** (D + 1) * (2 * n) ** (D / 2) * math.sqrt(A)
