"""Encrypted signal-processing operations built on the ring homomorphism and
the relinearization engine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polyring import PolyR, substitute_power
from .relin import RelinKey, downsample_relin, ew_mult_plain_periodic
from .she import Ciphertext, RingParams, he_mult, mul_monomial, mul_plain


class DimensionInfeasible(ValueError):
    pass


# ---------------------------------------------------------------------------
# shifts and rate changes


def shift(ct: Ciphertext, l0: int) -> Ciphertext:
    """Delay by l0 samples; wrapped samples change sign."""
    return mul_monomial(ct, l0)


def upsample(ct: Ciphertext, params: RingParams, G: int, max_n: int = 1 << 16) -> tuple[Ciphertext, RingParams]:
    """Substitute z -> z^G in every component.  The result decrypts under
    s(z^G) (see relin.upsample_key) in dimension G*n."""
    if G < 1 or G & (G - 1):
        raise ValueError("G must be a power of two")
    if ct.n != params.n:
        raise ValueError("ciphertext and params dimensions differ")
    if params.n * G > max_n:
        raise DimensionInfeasible(f"dimension {params.n * G} exceeds the cap {max_n}")
    try:
        up = params.expanded(G)
    except ValueError as exc:
        raise DimensionInfeasible(str(exc)) from exc
    return Ciphertext(tuple(substitute_power(c, G) for c in ct.polys), ct.level), up


def downsample(ct: Ciphertext, G: int, rk: RelinKey) -> Ciphertext:
    return downsample_relin(ct, G, rk)


def modulate(ct: Ciphertext, carrier, rk: RelinKey, params: RingParams | None = None) -> Ciphertext:
    """Sample-wise product with a carrier whose period divides n."""
    return ew_mult_plain_periodic(ct, carrier, rk, params)


# ---------------------------------------------------------------------------
# matrix product as one polynomial product


def _pow2_at_least(x: int) -> int:
    n = 1
    while n < x:
        n *= 2
    return n


@dataclass(frozen=True)
class MatrixEncoding:
    N: int
    degree: int = field(init=False)
    n_min: int = field(init=False)

    def __post_init__(self):
        N = self.N
        if N < 1:
            raise ValueError("N must be positive")
        deg = N ** 3 + N ** 2 - N - 1
        object.__setattr__(self, "degree", deg)
        object.__setattr__(self, "n_min", _pow2_at_least(deg + 1))

    def a_index(self, i: int, j: int) -> int:
        return i + j * self.N

    def b_index(self, i: int, j: int) -> int:
        N = self.N
        return N * (N - 1 - i + j * N)

    def c_index(self, i: int, j: int) -> int:
        N = self.N
        return N * N - N + i + j * N * N


def _matrix(X, N: int) -> list[list[int]]:
    rows = [[int(v) for v in r] for r in X]
    if len(rows) != N or any(len(r) != N for r in rows):
        raise ValueError(f"expected an {N}x{N} matrix")
    return rows


def matmul_encode(X, role: str, enc: MatrixEncoding, t: int, n: int | None = None) -> PolyR:
    n = enc.n_min if n is None else n
    if n < enc.degree + 1:
        raise DimensionInfeasible(f"n={n} cannot hold degree {enc.degree}")
    if role not in ("left", "right"):
        raise ValueError("role must be 'left' or 'right'")
    idx = enc.a_index if role == "left" else enc.b_index
    X = _matrix(X, enc.N)
    out = [0] * n
    for i in range(enc.N):
        for j in range(enc.N):
            out[idx(i, j)] = X[i][j] % t
    return PolyR(np.array(out, dtype=object), t)


def matmul_decode(c, enc: MatrixEncoding) -> list[list[int]]:
    vals = c.to_list() if isinstance(c, PolyR) else [int(v) for v in c]
    return [[vals[enc.c_index(i, j)] for j in range(enc.N)] for i in range(enc.N)]


def matmul_overflows(A, B, t: int) -> bool:
    """True if some entry of A.B (over the integers) leaves [0, t)."""
    A, B = np.array(A, dtype=object), np.array(B, dtype=object)
    C = A.dot(B)
    return bool(np.any(C < 0) or np.any(C >= t))


def encrypted_matmul(ctA: Ciphertext, ctB: Ciphertext, enc: MatrixEncoding, params: RingParams) -> Ciphertext:
    if params.n < enc.degree + 1:
        raise DimensionInfeasible(f"n={params.n} cannot hold degree {enc.degree}; need {enc.n_min}")
    return he_mult(ctA, ctB, params)


def matmul_scaled(A, B, d: int, l: int) -> list[list[int]]:
    """A.B for non-negative integer matrices through a ring of dimension l.
    With z = d w the product is reduced mod 1 + w^l; coefficient u then holds
    d^u sum_v (-d^l)^v c_{u+lv}, whose base (-d^l) digits are the wanted
    coefficients.  Every coefficient of a(z)b(z) must lie below d^l."""
    A, B = np.array(A, dtype=object), np.array(B, dtype=object)
    N = A.shape[0]
    if d < 2 or l < 1:
        raise ValueError("need d >= 2 and l >= 1")
    if np.any(A < 0) or np.any(B < 0):
        raise ValueError("entries must be non-negative")
    enc = MatrixEncoding(N)
    size = enc.degree + 1
    a = [0] * size
    b = [0] * size
    for i in range(N):
        for j in range(N):
            a[enc.a_index(i, j)] = int(A[i, j])
            b[enc.b_index(i, j)] = int(B[i, j])
    # precondition on the full integer product
    full = [0] * (2 * size - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                full[i + j] += ai * bj
    base = d ** l
    if max(full) >= base:
        raise ValueError(f"a product coefficient reaches {max(full)} >= d^l = {base}")
    # fold into Z[w]/(1 + w^l) after z = d w
    def fold(p):
        out = [0] * l
        for k, v in enumerate(p):
            if v:
                out[k % l] += (-1) ** (k // l) * v * d ** k
        return out
    w = schoolbook_negacyclic_int(fold(a), fold(b))
    c = [0] * (2 * size + 2 * l)
    for u, x in enumerate(w):
        if x % d ** u:
            raise ArithmeticError("folded coefficient not divisible by d^u")
        x //= d ** u
        v = 0
        while x:
            digit = x % base
            c[u + l * v] = digit
            x = (x - digit) // -base
            v += 1
    return [[c[enc.c_index(i, j)] for j in range(N)] for i in range(N)]


def schoolbook_negacyclic_int(a: list[int], b: list[int]) -> list[int]:
    n = len(a)
    out = [0] * n
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                k = i + j
                if k < n:
                    out[k] += ai * bj
                else:
                    out[k - n] -= ai * bj
    return out


# ---------------------------------------------------------------------------
# cyclic codes over Z_t


@dataclass(frozen=True)
class CrcCode:
    g: tuple  # generator coefficients, low degree first
    t: int
    n: int

    def __post_init__(self):
        g = [int(v) % self.t for v in self.g]
        while len(g) > 1 and g[-1] == 0:
            g.pop()
        if not g or g[-1] == 0:
            raise ValueError("generator must be nonzero")
        if math.gcd(g[-1], self.t) != 1:
            raise ValueError("leading coefficient of g must be a unit mod t")
        object.__setattr__(self, "g", tuple(g))

    @property
    def check_degree(self) -> int:
        return len(self.g) - 1

    @property
    def k(self) -> int:
        """Longest message that does not wrap around."""
        return self.n - self.check_degree

    def generator(self, m: int) -> PolyR:
        c = [0] * self.n
        c[: len(self.g)] = self.g
        return PolyR(np.array(c, dtype=object), m)


def crc_encode(ct_m: Ciphertext, g, params: RingParams, code: CrcCode | None = None) -> Ciphertext:
    """Codeword m(z) g(z): one ciphertext product when g is encrypted, a
    cleartext product otherwise."""
    if isinstance(g, Ciphertext):
        return he_mult(ct_m, g, params)
    if code is None:
        code = CrcCode(tuple(g), params.t, params.n)
    return mul_plain(ct_m, code.generator(params.t), params)


def poly_divmod(num: list[int], den: list[int], t: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder over Z_t; den must have a unit leading term."""
    num = [v % t for v in num]
    den = [v % t for v in den]
    while len(den) > 1 and den[-1] == 0:
        den.pop()
    inv = pow(den[-1], -1, t)
    dd = len(den) - 1
    quot = [0] * max(len(num) - dd, 1)
    rem = num[:]
    for k in range(len(num) - 1, dd - 1, -1):
        f = rem[k] * inv % t
        if f:
            quot[k - dd] = f
            for i, dv in enumerate(den):
                rem[k - dd + i] = (rem[k - dd + i] - f * dv) % t
    return quot, rem[:dd] if dd else [0]


def crc_check(codeword, code: CrcCode) -> tuple[bool, list[int]]:
    """(g divides the codeword, message = codeword / g truncated to k terms)."""
    vals = codeword.to_list() if isinstance(codeword, PolyR) else [int(v) for v in codeword]
    quot, rem = poly_divmod(vals, list(code.g), code.t)
    ok = all(v == 0 for v in rem)
    msg = (quot + [0] * code.k)[: code.k]
    return ok, msg

