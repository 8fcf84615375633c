"""Command-line entry point: nttssp <subcommand> ...

Set NTTSSP_SEED to make key generation and encryption reproducible (tests
only; never for real keys).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, relin, serialize
from .conv import (cyclic_conv_encrypted, encrypted_intt, encrypted_ntt, ew_mult_encrypted, gen_elementwise_keys,
                   make_plan, ntt_postcode, ntt_precode, postcode, precode)
from .she import (DepthExceeded, ParameterInfeasible, RingParams, add_plain, build_params, decrypt, encrypt,
                  estimate_security, he_mult, keygen, mul_plain)
from .toolkit import MatrixEncoding, encrypted_matmul, matmul_decode, matmul_encode, modulate, shift


class PipelineError(ValueError):
    pass


def make_rng() -> np.random.Generator:
    seed = os.environ.get("NTTSSP_SEED")
    return np.random.default_rng(int(seed) if seed is not None else None)


# ---------------------------------------------------------------------------
# signal files


def read_signal(path: str, raw: bool = False) -> list[int]:
    """Newline-separated integers, or raw little-endian signed 16-bit samples."""
    data = Path(path).read_bytes()
    if raw:
        if len(data) % 2:
            raise ValueError("raw input must hold whole 16-bit samples")
        return np.frombuffer(data, dtype="<i2").astype(int).tolist()
    return [int(tok) for tok in data.decode().split()]


def fit(values: list[int], n: int) -> list[int]:
    if len(values) > n:
        raise ValueError(f"signal has {len(values)} samples, ring holds {n}")
    return list(values) + [0] * (n - len(values))


def centered(values, t: int) -> list[int]:
    return [v - t if v > t // 2 else v for v in (int(x) % t for x in values)]


def load_params_arg(spec) -> RingParams:
    if isinstance(spec, dict):
        if "q" in spec:
            return params_from_json(spec)
        return build_params(spec["n"], spec["t"], spec.get("sigma", 1.0), spec.get("D", 1), spec.get("A", 1),
                            max_bits=spec.get("max_bits", 63))
    path = Path(spec)
    if path.suffix == ".json":
        return load_params_arg(json.loads(path.read_text()))
    return serialize.load_params(path.read_bytes())


def params_json(p: RingParams) -> dict:
    return {"n": p.n, "t": p.t, "sigma": p.sigma, "D": p.D, "A": p.A, "q": p.qv,
            "proth_k": p.q.proth_k, "proth_l": p.q.proth_l}


def params_from_json(d: dict) -> RingParams:
    from .modmath import Modulus
    return RingParams(d["n"], Modulus(d["q"], d["proth_k"], d["proth_l"]), d["t"], d["sigma"], d["D"], d["A"])


# ---------------------------------------------------------------------------
# subcommands


def cmd_params(a) -> int:
    p = build_params(a.n, a.t, a.sigma, a.D, a.A, max_bits=a.max_bits)
    rep = estimate_security(p)
    print(f"q = {p.qv} ({p.q.proth_k}*2^{p.q.proth_l}+1)")
    print(f"ceil(log2 q) = {p.qv.bit_length()}")
    print(f"delta = {rep.delta:.6f}")
    print(f"bit security = {rep.bit_security:.1f}")
    if a.out:
        Path(a.out).write_bytes(serialize.dump_params(p))
    if a.json:
        Path(a.json).write_text(json.dumps(params_json(p)))
    return 0


def cmd_keygen(a) -> int:
    p = load_params_arg(a.params)
    sk, pk = keygen(p, make_rng())
    Path(a.sk).write_bytes(serialize.dump_secret_key(sk))
    Path(a.pk).write_bytes(serialize.dump_public_key(pk))
    return 0


def cmd_relinkeys(a) -> int:
    p = load_params_arg(a.params)
    sk = serialize.load_secret_key(Path(a.sk).read_bytes())
    rng = make_rng()
    L = p.digits
    if a.kind == "elementwise":
        M = {"full": 1, "direct": p.n}.get(a.method, a.M)
        keys, _ = gen_elementwise_keys(sk, p, rng, a.method, M)
        print(f"kind=elementwise method={a.method} M={M} entries={keys.entries} "
              f"formula={relin.key_entry_count(p.n, L, a.method, M)}")
        return 0
    if a.kind == "square":
        rk = relin.gen_square_key(sk, p, rng)
    elif a.kind == "coeff":
        rk = relin.gen_coeff_keys(sk, p, rng)
    elif a.kind == "periodic":
        rk = relin.gen_periodic_keys(sk, p, a.m, rng)
    elif a.kind == "reflection":
        rk = relin.gen_reflection_key(sk, p, rng)
    else:
        rk = relin.gen_downsample_keys(sk, p, a.G, rng)
    print(f"kind={rk.kind} blocks={rk.block_count} digits={rk.digits} entries={rk.entries} bits={rk.bits}")
    if a.out:
        Path(a.out).write_bytes(serialize.dump_relin_key(rk))
    return 0


def cmd_encrypt(a) -> int:
    p = load_params_arg(a.params)
    pk = serialize.load_public_key(Path(a.pk).read_bytes())
    x = fit(read_signal(a.input, a.raw), p.n)
    ct = encrypt(pk, x, p, make_rng())
    Path(a.out).write_bytes(serialize.dump_ciphertext(ct))
    return 0


def cmd_decrypt(a) -> int:
    p = load_params_arg(a.params)
    sk = serialize.load_secret_key(Path(a.sk).read_bytes())
    ct = serialize.load_ciphertext(Path(a.input).read_bytes())
    vals = decrypt(sk, ct, p).to_list()
    if a.centered:
        vals = centered(vals, p.t)
    if a.length is not None:
        vals = vals[: a.length]
    text = "\n".join(str(v) for v in vals) + "\n"
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_security(a) -> int:
    if a.params:
        p = load_params_arg(a.params)
        rep = estimate_security(p, a.epsilon, rule=a.rule)
    else:
        if a.n is None or a.q is None:
            raise SystemExit("security-report needs --params or both --n and --q")
        rep = estimate_security(None, a.epsilon, n=a.n, q=a.q, sigma=a.sigma, rule=a.rule)
    print(json.dumps({"n": rep.n, "log2_q": rep.log2_q, "epsilon": rep.epsilon, "c": rep.c,
                      "delta": rep.delta, "bit_security": rep.bit_security,
                      "tabulated_delta": rep.tabulated_delta,
                      "tabulated_bit_security": rep.tabulated_bit_security}, indent=2))
    return 0


def cmd_bench(a) -> int:
    if a.reps < 1:
        raise SystemExit("--reps must be at least 1")
    sizes = tuple(int(s) for s in a.sizes.split(",")) if a.sizes else bench.SIZES
    text = bench.to_csv(bench.run_suite(a.suite, sizes=sizes, reps=a.reps))
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# pipelines

# multiplicative levels used by each op; "sole" ops carry their own coding
# and cannot be chained with anything else
OP_DEPTH = {"shift": 0, "add_plain": 0, "mul_plain": 1, "square": 1, "reflect": 0, "modulate": 1,
            "cyclic_conv": 1, "ntt": 1, "intt": 1, "ew_mult": 3, "matmul": 1}
SOLE_OPS = {"cyclic_conv", "ntt", "intt", "matmul"}


def op_depth(op: dict) -> int:
    if op["op"] == "ew_mult" and op.get("method") == "direct":
        return 1
    return OP_DEPTH[op["op"]]


def check_pipeline(spec: dict, p: RingParams) -> int:
    """Static validation; returns the declared depth."""
    ops = spec.get("ops")
    if not isinstance(ops, list) or not ops:
        raise PipelineError("pipeline needs a non-empty 'ops' list")
    for op in ops:
        if op.get("op") not in OP_DEPTH:
            raise PipelineError(f"unknown op {op.get('op')!r}")
    names = [op["op"] for op in ops]
    if any(nm in SOLE_OPS for nm in names) and len(names) > 1:
        raise PipelineError(f"{', '.join(sorted(SOLE_OPS))} must be the only op in a pipeline")
    depth = sum(op_depth(op) for op in ops)
    if depth > p.D:
        raise PipelineError(f"pipeline depth {depth} exceeds the supported depth D={p.D}")
    if "input" not in spec and names[0] != "matmul":
        raise PipelineError("pipeline needs an 'input'")
    return depth


def _signal(v, n: int, base: Path = Path(".")) -> list[int]:
    return fit(read_signal(str(base / v)) if isinstance(v, str) else [int(x) for x in v], n)


def run_pipeline(spec: dict, base: Path | None = None) -> list:
    base = base or Path(".")
    pspec = spec.get("params")
    if pspec is None:
        raise PipelineError("pipeline needs 'params'")
    p = load_params_arg(pspec if isinstance(pspec, dict) else str(base / pspec))
    check_pipeline(spec, p)
    rng = make_rng()
    sk, pk = keygen(p, rng)
    ops = spec["ops"]
    first = ops[0]
    n, t = p.n, p.t

    if first["op"] == "matmul":
        enc = MatrixEncoding(len(first["A"]))
        ca = encrypt(pk, matmul_encode(first["A"], "left", enc, t, n), p, rng)
        cb = encrypt(pk, matmul_encode(first["B"], "right", enc, t, n), p, rng)
        return matmul_decode(decrypt(sk, encrypted_matmul(ca, cb, enc, p), p), enc)

    x = _signal(spec["input"], n, base)
    if first["op"] == "cyclic_conv":
        plan = make_plan(p)
        h = _signal(first["h"], n, base)
        cx = encrypt(pk, precode(x, plan), p, rng)
        ch = encrypt(pk, precode(h, plan, "y"), p, rng)
        return postcode(decrypt(sk, cyclic_conv_encrypted(cx, ch, plan, p), p), plan)
    if first["op"] in ("ntt", "intt"):
        inv = first["op"] == "intt"
        plan = make_plan(p)
        ct = encrypt(pk, ntt_precode(x, plan, inv), p, rng)
        out = encrypted_intt(ct, plan, p) if inv else encrypted_ntt(ct, plan, p)
        return ntt_postcode(decrypt(sk, out, p), plan, inv)

    ct = encrypt(pk, x, p, rng)
    for op in ops:
        name = op["op"]
        if name == "shift":
            ct = shift(ct, int(op["k"]))
        elif name == "add_plain":
            ct = add_plain(ct, _signal(op["h"], n, base), p)
        elif name == "mul_plain":
            ct = mul_plain(ct, _signal(op["h"], n, base), p)
        elif name == "square":
            ct = relin.relinearize(he_mult(ct, ct, p), relin.gen_square_key(sk, p, rng))
        elif name == "reflect":
            ct = relin.reflect(ct, relin.gen_reflection_key(sk, p, rng), op.get("mode", "reverse"))
        elif name == "modulate":
            carrier = [int(v) for v in op["carrier"]]
            ct = modulate(ct, carrier, relin.gen_periodic_keys(sk, p, len(carrier), rng), p)
        elif name == "ew_mult":
            method = op.get("method", "full")
            M = {"full": 1, "direct": n}.get(method, int(op.get("M", 2)))
            keys, _ = gen_elementwise_keys(sk, p, rng, method, M)
            cy = encrypt(pk, _signal(op["y"], n, base), p, rng)
            ct = ew_mult_encrypted(ct, cy, keys, p)
    return decrypt(sk, ct, p).to_list()


def cmd_run(a) -> int:
    path = Path(a.pipeline)
    spec = json.loads(path.read_text())
    out = run_pipeline(spec, path.parent)
    text = json.dumps({"output": out})
    target = a.out or spec.get("output")
    if target:
        (path.parent / target if not a.out else Path(target)).write_text(text + "\n")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nttssp", description="Encrypted signal processing over R_q")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("params", help="choose q and report security")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--D", type=int, default=1)
    s.add_argument("--A", type=int, default=1)
    s.add_argument("--max-bits", type=int, default=63)
    s.add_argument("--out", help="binary params record")
    s.add_argument("--json", help="JSON params record")
    s.set_defaults(fn=cmd_params)

    s = sub.add_parser("keygen")
    s.add_argument("--params", required=True)
    s.add_argument("--sk", required=True)
    s.add_argument("--pk", required=True)
    s.set_defaults(fn=cmd_keygen)

    s = sub.add_parser("relinkeys")
    s.add_argument("--params", required=True)
    s.add_argument("--sk", required=True)
    s.add_argument("--kind", required=True,
                   choices=["square", "coeff", "periodic", "reflection", "downsample", "elementwise"])
    s.add_argument("--m", type=int, default=2, help="carrier period (periodic)")
    s.add_argument("--G", type=int, default=2, help="decimation factor (downsample)")
    s.add_argument("--method", default="full", choices=["full", "polyphase", "direct"])
    s.add_argument("--M", type=int, default=2, help="polyphase factor")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_relinkeys)

    s = sub.add_parser("encrypt")
    s.add_argument("--params", required=True)
    s.add_argument("--pk", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--raw", action="store_true", help="input is little-endian int16")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_encrypt)

    s = sub.add_parser("decrypt")
    s.add_argument("--params", required=True)
    s.add_argument("--sk", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--centered", action="store_true")
    s.add_argument("--length", type=int)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_decrypt)

    s = sub.add_parser("run")
    s.add_argument("pipeline")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_run)

    s = sub.add_parser("bench")
    s.add_argument("--suite", default="core")
    s.add_argument("--sizes", help="comma-separated ring dimensions")
    s.add_argument("--reps", type=int, default=21)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_bench)

    s = sub.add_parser("security-report")
    s.add_argument("--params")
    s.add_argument("--n", type=int)
    s.add_argument("--q", type=int)
    s.add_argument("--sigma", type=float, default=1.0)
    s.add_argument("--epsilon", type=float, default=2.0 ** -32)
    s.add_argument("--rule", default="log2", choices=["log2", "ln"])
    s.set_defaults(fn=cmd_security)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParameterInfeasible, PipelineError, DepthExceeded, serialize.FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
