"""Timing/accuracy harness and the CSV / gnuplot writers used by the CLI."""
import csv
import io
import time
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from .algebra import tprod
from .completion import relative_error
from .cross import ArrayOracle, acta
from .factorizations import tsvd_randomized, tsvd_truncated
from .generators import GeneratorSpec
from .tensor import atomic_write_bytes

CSV_FIELDS = ("method", "n", "rank_or_eps", "seed", "time_s", "rel_err", "psnr_db", "rank")
METHODS = ("tsvd", "rtsvd", "acta")


@dataclass
class RunRecord:
    method: str
    n: str
    rank_or_eps: float
    seed: int
    time_s: float
    rel_err: float
    psnr_db: Optional[float] = None
    rank: Optional[float] = None

    def __post_init__(self):
        if self.time_s < 0 or (self.rel_err is not None and self.rel_err < 0):
            raise ValueError("time and error must be nonnegative")


def dims_label(shape):
    shape = tuple(int(d) for d in shape)
    if len(set(shape)) == 1:
        return str(shape[0])
    return "x".join(str(d) for d in shape)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if np.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def records_to_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        row = asdict(rec)
        writer.writerow([_fmt(row[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def rows_to_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_text(path, text):
    data = text.encode()
    atomic_write_bytes(path, lambda fh: fh.write(data))


def gnuplot_blocks(records, column="time_s"):
    """One data block per method (``n value``), blocks separated by two blank lines."""
    out = []
    for method in dict.fromkeys(r.method for r in records):
        out.append(f"# {method}: n {column}")
        for r in records:
            if r.method == method:
                out.append(f"{r.n} {_fmt(getattr(r, column))}")
        out.append("\n")
    return "\n".join(out)


def run_method(method, x, rank=None, eps=1e-8, seed=0, oversample=10, power_iters=1):
    """Run one factorization; returns ``(approximation, seconds, estimated rank)``.

    Only the factorization call is timed; the reconstruction used for the
    error is computed afterwards.
    """
    if method == "acta":
        oracle = ArrayOracle(x)
        t0 = time.perf_counter()
        cf = acta(oracle, eps=eps, seed=seed)
        dt = time.perf_counter() - t0
        return cf.reconstruct(), dt, cf.rank
    if method == "tsvd":
        t0 = time.perf_counter()
        f = tsvd_truncated(x, rank)
        dt = time.perf_counter() - t0
        return f.reconstruct(), dt, rank
    if method == "rtsvd":
        extra = max(0, min(oversample, min(x.shape[:2]) - rank))
        t0 = time.perf_counter()
        f = tsvd_randomized(x, rank, extra, power_iters, seed)
        dt = time.perf_counter() - t0
        return f.reconstruct(), dt, rank
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def run_bench(methods, sizes, rank=30, eps=1e-8, repeats=1, seed=0, kind="synthetic",
              oversample=10, power_iters=1, warmup=True, progress=None):
    """Mean time and error per ``(method, size)`` over ``repeats`` seeded tensors.

    ``repeats`` tensors are drawn with seeds ``seed, seed + 1, ...``; every
    method sees the same tensors.
    """
    methods = list(methods)
    if not methods:
        raise ValueError("no methods given")
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    if warmup:
        small = GeneratorSpec("synthetic", 12, 3, seed).materialize()
        for m in methods:
            run_method(m, small, rank=3, eps=eps, seed=seed, oversample=2)
    records = []
    for n in sizes:
        acc = {m: ([], [], []) for m in methods}
        for rep in range(repeats):
            spec = GeneratorSpec(kind, n, rank if kind == "synthetic" else None, seed + rep)
            x = spec.materialize()
            for m in methods:
                approx, dt, r = run_method(m, x, rank=rank, eps=eps, seed=seed + rep,
                                           oversample=oversample, power_iters=power_iters)
                acc[m][0].append(dt)
                acc[m][1].append(relative_error(x, approx))
                acc[m][2].append(r)
                if progress:
                    progress(m, n, rep, dt)
        for m in methods:
            times, errs, ranks = acc[m]
            records.append(RunRecord(m, str(n), eps if m == "acta" else rank, seed,
                                     float(np.mean(times)), float(np.mean(errs)), None,
                                     float(np.mean(ranks))))
    return records


def tprod_check(x, y):
    """Relative discrepancy between the FFT t-product and the block-circulant definition."""
    from .algebra import tprod_circulant
    fast = tprod(x, y)
    slow = tprod_circulant(x, y)
    scale = max(np.linalg.norm(slow), np.finfo(float).tiny)
    return fast, float(np.linalg.norm(fast - slow) / scale)
