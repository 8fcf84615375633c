"""Independent reference implementations used by the tests.  Everything
here is schoolbook arithmetic on integers: no NTT, no modular tricks."""

from __future__ import annotations

import numpy as np


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def order(a: int, p: int) -> int:
    k, x = 1, a % p
    while x != 1:
        x = x * a % p
        k += 1
    return k


def dft(x, root: int, p: int) -> list[int]:
    N = len(x)
    return [sum(int(x[l]) * pow(root, l * k, p) for l in range(N)) % p for k in range(N)]


def negacyclic(a, b, m: int) -> list[int]:
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            v = int(a[i]) * int(b[j])
            if i + j < n:
                out[i + j] += v
            else:
                out[i + j - n] -= v
    return [v % m for v in out]


def cyclic(a, b, m: int) -> list[int]:
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            out[(i + j) % n] += int(a[i]) * int(b[j])
    return [v % m for v in out]


def _full_conv(a, b) -> np.ndarray:
    """Exact linear convolution in int64; refuses inputs that could overflow."""
    a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
    bound = int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0)) * len(a)
    if bound >= 2**62:
        raise OverflowError("use the pure Python oracle for these sizes")
    return np.convolve(a, b)


def negacyclic_fast(a, b, m: int) -> list[int]:
    n = len(a)
    full = _full_conv(a, b)
    out = full[:n].copy()
    out[: n - 1] -= full[n:]
    return (out % m).tolist()


def cyclic_fast(a, b, m: int) -> list[int]:
    n = len(a)
    full = _full_conv(a, b)
    out = full[:n].copy()
    out[: n - 1] += full[n:]
    return (out % m).tolist()


def monomial_shift(x, k: int, t: int) -> list[int]:
    """x(z) z^k mod (1 + z^n), by explicit index walking."""
    n = len(x)
    out = [0] * n
    for i, v in enumerate(x):
        j = i + k
        sign = 1
        while j >= n:
            j -= n
            sign = -sign
        while j < 0:
            j += n
            sign = -sign
        out[j] = (out[j] + sign * int(v)) % t
    return out


def crt_bruteforce(residues, moduli) -> int:
    M = 1
    for m in moduli:
        M *= m
    for a in range(M):
        if all(a % m == r % m for r, m in zip(residues, moduli)):
            return a
    raise ValueError("no solution")


def matmul(A, B, t: int | None = None):
    N = len(A)
    C = [[sum(int(A[i][k]) * int(B[k][j]) for k in range(N)) for j in range(N)] for i in range(N)]
    return C if t is None else [[v % t for v in row] for row in C]


def poly_mul_full(a, b) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += int(x) * int(y)
    return out


def decrypt_formula(polys, s, q: int, t: int) -> list[int]:
    """sum_i c_i s^i mod q, centered, mod t, all by schoolbook."""
    n = len(s)
    acc = [0] * n
    spow = [1] + [0] * (n - 1)
    for c in polys:
        term = negacyclic(c, spow, q)
        acc = [(x + y) % q for x, y in zip(acc, term)]
        spow = negacyclic(spow, s, q)
    return [(v - q if v > q // 2 else v) % t for v in acc]
