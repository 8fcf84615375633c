"""Versioned little-endian binary records.

Fixed-width records (suffix "1") store moduli and coefficients as u64.  When
q or t needs more than 64 bits the "X" variant is written instead: moduli are
length-prefixed byte strings and coefficients use a fixed per-record width.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from . import modmath as mm
from .crt import BatchParams
from .polyring import PolyR
from .relin import RelinKey
from .she import Ciphertext, PublicKey, RingParams, SecretKey


class FormatError(ValueError):
    pass


LAYOUT_VERSION = 1


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, k: int) -> bytes:
        if self.pos + k > len(self.data):
            raise FormatError("truncated record")
        out = bytes(self.data[self.pos:self.pos + k])
        self.pos += k
        return out

    def unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size))

    def done(self):
        if self.pos != len(self.data):
            raise FormatError("trailing bytes after record")


def _magic(r: _Reader, family: str) -> bool:
    """Returns True for the wide variant."""
    m = r.take(4)
    if m == (family + "1").encode():
        return False
    if m == (family + "X").encode():
        return True
    raise FormatError(f"bad magic {m!r}, expected {family}1 or {family}X")


def _wide(*values: int) -> bool:
    return any(v >= 1 << 64 for v in values)


def _int_bytes(v: int) -> bytes:
    b = v.to_bytes(max(1, (v.bit_length() + 7) // 8), "little")
    return struct.pack("<H", len(b)) + b


def _read_int(r: _Reader) -> int:
    (k,) = r.unpack("<H")
    return int.from_bytes(r.take(k), "little")


def _width(q: int) -> int:
    return max(8, ((q - 1).bit_length() + 7) // 8)


def _coeff_bytes(c: np.ndarray, wide: bool, width: int) -> bytes:
    if not wide:
        return np.asarray(c).astype("<u8").tobytes() if c.dtype != object else np.array(
            [int(v) for v in c.ravel()], dtype="<u8").tobytes()
    return b"".join(int(v).to_bytes(width, "little") for v in np.asarray(c).ravel())


def _read_coeffs(r: _Reader, count: int, q: int, wide: bool, width: int) -> np.ndarray:
    if not wide:
        raw = np.frombuffer(r.take(8 * count), dtype="<u8")
        if mm.is_fast(q):
            out = raw.astype(np.int64)
        else:
            out = np.array([int(v) for v in raw], dtype=object)
    else:
        raw = r.take(width * count)
        out = np.array([int.from_bytes(raw[i:i + width], "little") for i in range(0, len(raw), width)], dtype=object)
        if mm.is_fast(q):
            out = out.astype(np.int64)
    if count and (out >= q).any():
        raise FormatError("coefficient out of range")
    return out


# ---------------------------------------------------------------------------
# params


def dump_params(p: RingParams) -> bytes:
    q, t = p.qv, p.t
    if not _wide(q, t):
        return b"LSP1" + struct.pack("<IQQdBI", p.n, q, t, p.sigma, p.D, p.A)
    return b"LSPX" + struct.pack("<I", p.n) + _int_bytes(q) + _int_bytes(t) + struct.pack("<dBI", p.sigma, p.D, p.A)


def load_params(data: bytes) -> RingParams:
    r = _Reader(data)
    if _magic(r, "LSP"):
        (n,) = r.unpack("<I")
        q, t = _read_int(r), _read_int(r)
        sigma, D, A = r.unpack("<dBI")
    else:
        n, q, t, sigma, D, A = r.unpack("<IQQdBI")
    r.done()
    return RingParams(n, mm.Modulus.from_value(q), t, sigma, D, A)


# ---------------------------------------------------------------------------
# ciphertexts and keys


def _header(family: str, q: int, n: int) -> tuple[bytes, bool, int]:
    wide = _wide(q)
    head = (family + ("X" if wide else "1")).encode()
    head += struct.pack("<I", n) + (_int_bytes(q) if wide else struct.pack("<Q", q))
    return head, wide, _width(q)


def _read_header(r: _Reader, family: str) -> tuple[int, int, bool, int]:
    wide = _magic(r, family)
    (n,) = r.unpack("<I")
    q = _read_int(r) if wide else r.unpack("<Q")[0]
    return n, q, wide, _width(q)


def dump_ciphertext(ct: Ciphertext) -> bytes:
    head, wide, w = _header("LSC", ct.q, ct.n)
    body = struct.pack("<HB", ct.gamma, ct.level)
    body += b"".join(_coeff_bytes(c.coeffs, wide, w) for c in ct.polys)
    return head + body


def load_ciphertext(data: bytes) -> Ciphertext:
    r = _Reader(data)
    n, q, wide, w = _read_header(r, "LSC")
    gamma, level = r.unpack("<HB")
    polys = tuple(PolyR(_read_coeffs(r, n, q, wide, w), q) for _ in range(gamma))
    r.done()
    return Ciphertext(polys, level)


def dump_secret_key(sk: SecretKey) -> bytes:
    head, wide, w = _header("LSS", sk.s.m, sk.s.n)
    return head + _coeff_bytes(sk.s.coeffs, wide, w)


def load_secret_key(data: bytes) -> SecretKey:
    r = _Reader(data)
    n, q, wide, w = _read_header(r, "LSS")
    s = PolyR(_read_coeffs(r, n, q, wide, w), q)
    r.done()
    return SecretKey(s)


def dump_public_key(pk: PublicKey) -> bytes:
    head, wide, w = _header("LSK", pk.a0.m, pk.a0.n)
    return head + _coeff_bytes(pk.a0.coeffs, wide, w) + _coeff_bytes(pk.a1.coeffs, wide, w)


def load_public_key(data: bytes) -> PublicKey:
    r = _Reader(data)
    n, q, wide, w = _read_header(r, "LSK")
    a0 = PolyR(_read_coeffs(r, n, q, wide, w), q)
    a1 = PolyR(_read_coeffs(r, n, q, wide, w), q)
    r.done()
    return PublicKey(a0, a1)


def dump_relin_key(rk: RelinKey) -> bytes:
    head, wide, w = _header("LSR", rk.q, rk.n)
    info = json.dumps({"kind": rk.kind, "t": rk.t, "sources": list(rk.sources),
                       "target": rk.target, "meta": rk.meta}, sort_keys=True).encode()
    body = struct.pack("<III", rk.block_count, rk.digits, len(info)) + info
    return head + body + _coeff_bytes(rk.A, wide, w) + _coeff_bytes(rk.B, wide, w)


def load_relin_key(data: bytes) -> RelinKey:
    r = _Reader(data)
    n, q, wide, w = _read_header(r, "LSR")
    K, L, k = r.unpack("<III")
    try:
        info = json.loads(r.take(k))
    except ValueError as exc:
        raise FormatError("corrupt key descriptor") from exc
    A = _read_coeffs(r, K * L * n, q, wide, w).reshape(K, L, n)
    B = _read_coeffs(r, K * L * n, q, wide, w).reshape(K, L, n)
    r.done()
    return RelinKey(info["kind"], A, B, q, info["t"], tuple(info["sources"]), info["target"], info["meta"])


# ---------------------------------------------------------------------------
# batching descriptor


def dump_batch(bp: BatchParams) -> bytes:
    out = b"LSB1" + struct.pack("<HH", LAYOUT_VERSION, bp.m)
    return out + b"".join(struct.pack("<QB", p, k) for p, k in bp.factors)


def load_batch(data: bytes) -> BatchParams:
    r = _Reader(data)
    if r.take(4) != b"LSB1":
        raise FormatError("bad magic, expected LSB1")
    version, m = r.unpack("<HH")
    if version != LAYOUT_VERSION:
        raise FormatError(f"unsupported layout version {version}")
    factors = [r.unpack("<QB") for _ in range(m)]
    r.done()
    return BatchParams(tuple(factors))
