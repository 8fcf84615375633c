"""Wall-clock micro-benchmarks reported as median and interquartile range."""

from __future__ import annotations

import csv
import io
import time

import numpy as np

from .conv import make_plan, postcode, precode
from .polyring import sample_uniform
from .she import build_params, decrypt, encrypt, keygen

SIZES = (1024, 2048, 4096, 8192, 16384)
OPS = ("encrypt", "decrypt", "poly-mult", "poly-add", "pre-post")


def time_op(fn, reps: int, warmup: int = 2) -> tuple[float, float]:
    """(median, IQR) of fn() in microseconds."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    for _ in range(warmup):
        fn()
    samples = np.empty(reps)
    for i in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        samples[i] = (time.perf_counter_ns() - t0) / 1e3
    q1, med, q3 = np.percentile(samples, [25, 50, 75])
    return float(med), float(q3 - q1)


def core_suite(sizes=SIZES, reps: int = 21, t: int = 65537, seed: int = 0, ops=OPS) -> list[tuple]:
    """Rows (op, n, median_us, iqr_us) with the reference parameter set
    (sigma = 1, D = 1, A = 1) at every n."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        p = build_params(n, t)
        sk, pk = keygen(p, rng)
        m = rng.integers(0, t, n)
        ct = encrypt(pk, m, p, rng)
        a, b = sample_uniform(p.qv, n, rng), sample_uniform(p.qv, n, rng)
        jobs = {
            "encrypt": lambda: encrypt(pk, m, p, rng),
            "decrypt": lambda: decrypt(sk, ct, p),
            "poly-mult": lambda: a * b,
            "poly-add": lambda: a + b,
        }
        if "pre-post" in ops:
            plan = make_plan(p)
            jobs["pre-post"] = lambda: postcode(precode(m, plan), plan)
        for op in ops:
            med, iqr = time_op(jobs[op], reps)
            rows.append((op, n, med, iqr))
    return rows


SUITES = {"core": core_suite}


def run_suite(name: str = "core", **kw) -> list[tuple]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kw)


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("op", "n", "median_us", "iqr_us"))
    for op, n, med, iqr in rows:
        w.writerow((op, n, f"{med:.1f}", f"{iqr:.1f}"))
    return buf.getvalue()
