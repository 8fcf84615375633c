"""CRT batching of the plaintext space Z_t[z]/(1+z^n) with t = prod t_i^k_i.

Reconstruction uses a = sum_i T_i a_i d_i with T_i = t / t_i^k_i and
d_i = T_i^-1 mod t_i^k_i.  Slots come from a negacyclic NTT of length n
inside each factor ring Z_{t_i^k_i}[z]/(1+z^n); that transform exists
exactly when t_i = 1 mod 2n (roots are Hensel-lifted for k_i > 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import modmath as mm
from .polyring import PolyR
from .she import Ciphertext, RingParams, he_add, he_mult


class PackingError(ValueError):
    pass


@dataclass(frozen=True)
class BatchParams:
    factors: tuple  # ((t_i, k_i), ...)
    t: int = field(init=False)
    moduli: tuple = field(init=False)
    T: tuple = field(init=False)
    d: tuple = field(init=False)

    def __post_init__(self):
        facs = tuple((int(p), int(k)) for p, k in self.factors)
        object.__setattr__(self, "factors", facs)
        mods = tuple(p ** k for p, k in facs)
        for i, (p, k) in enumerate(facs):
            if k not in (1, 2):
                raise ValueError("only k_i in {1, 2} are supported")
            if not mm.check_prime(p):
                raise ValueError(f"{p} is not prime")
            for j in range(i):
                if facs[j][0] == p:
                    raise ValueError("factors must be distinct primes")
        t = math.prod(mods)
        T = tuple(t // m for m in mods)
        d = tuple(pow(Ti, -1, m) for Ti, m in zip(T, mods))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "moduli", mods)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "d", d)

    @property
    def m(self) -> int:
        return len(self.factors)


def _ints(a):
    return a.to_list() if isinstance(a, PolyR) else [int(v) for v in a]


def crt_encode(residues, bp: BatchParams) -> PolyR:
    if len(residues) != bp.m:
        raise ValueError(f"expected {bp.m} residue vectors")
    vecs = [_ints(r) for r in residues]
    n = len(vecs[0])
    if any(len(v) != n for v in vecs):
        raise ValueError("residue vectors differ in length")
    out = [sum(Ti * (v[j] % mi) * di for Ti, v, di, mi in zip(bp.T, vecs, bp.d, bp.moduli)) % bp.t for j in range(n)]
    return PolyR(np.array(out, dtype=object), bp.t)


def crt_decode(a, bp: BatchParams) -> list[PolyR]:
    vals = _ints(a)
    return [PolyR(np.array([v % mi for v in vals], dtype=object), mi) for mi in bp.moduli]


def check_slot_condition(t_i: int, k_i: int) -> bool:
    """True iff 1 + x^k_i is irreducible over Z_t_i, i.e. the multiplicative
    order of t_i modulo 2 k_i equals k_i (k_i a power of two)."""
    if k_i < 1 or k_i & (k_i - 1):
        raise ValueError("k_i must be a power of two")
    if k_i == 1:
        return True
    order, x = 1, t_i % (2 * k_i)
    if math.gcd(t_i, 2 * k_i) != 1:
        return False
    while x != 1:
        x = x * t_i % (2 * k_i)
        order += 1
    return order == k_i


# ---------------------------------------------------------------------------
# slot packing


def _lift_root(psi: int, p: int, k: int, n: int) -> int:
    """Newton lift of a root of x^n + 1 from Z_p to Z_{p^k}."""
    mod = p
    for _ in range(1, k):
        mod *= p
        f = (pow(psi, n, mod) + 1) % mod
        df = n * pow(psi, n - 1, mod) % mod
        psi = (psi - f * pow(df, -1, mod)) % mod
    return psi


@dataclass(frozen=True, eq=False)
class SlotLayout:
    """Factor-major layout: slot (i, j) is NTT value j of factor ring i."""
    bp: BatchParams
    n: int
    plans: tuple = field(init=False, repr=False)

    def __post_init__(self):
        plans = []
        for (p, k), mod in zip(self.bp.factors, self.bp.moduli):
            if (p - 1) % (2 * self.n):
                raise PackingError(
                    f"Z_{mod}[z]/(1+z^{self.n}) has no {self.n}-slot decomposition: needs {p} = 1 mod {2 * self.n}")
            psi = _lift_root(mm.smallest_root(p, 2 * self.n), p, k, self.n)
            plans.append(mm.NttPlan(self.n, mod, psi * psi % mod, psi))
        object.__setattr__(self, "plans", tuple(plans))

    @property
    def slots(self) -> int:
        return self.bp.m * self.n

    def pack(self, values) -> PolyR:
        """values: m rows of n integers (row i read mod t_i^k_i)."""
        rows = [np.array([int(v) % mod for v in row], dtype=np.int64) for row, mod in zip(values, self.bp.moduli)]
        if len(rows) != self.bp.m or any(len(r) != self.n for r in rows):
            raise PackingError(f"expected {self.bp.m} rows of {self.n} values")
        polys = [mm.negacyclic_inverse(r, plan) for r, plan in zip(rows, self.plans)]
        return crt_encode(polys, self.bp)

    def unpack(self, a: PolyR) -> list[list[int]]:
        return [[int(v) for v in mm.negacyclic_forward(np.array(r.to_list(), dtype=np.int64), plan)]
                for r, plan in zip(crt_decode(a, self.bp), self.plans)]


def make_layout(bp: BatchParams, n: int) -> SlotLayout:
    return SlotLayout(bp, n)


def batched_ew_product(ct0: Ciphertext, ct1: Ciphertext, layout: SlotLayout, params: RingParams | None = None) -> Ciphertext:
    """One ring product multiplies every slot pair."""
    if params is not None and params.t != layout.bp.t:
        raise PackingError("plaintext modulus differs from the batch modulus")
    if ct0.n != layout.n or ct1.n != layout.n:
        raise PackingError("layout dimension differs from ciphertext dimension")
    return he_mult(ct0, ct1, params)


def batched_add(ct0: Ciphertext, ct1: Ciphertext) -> Ciphertext:
    return he_add(ct0, ct1)
