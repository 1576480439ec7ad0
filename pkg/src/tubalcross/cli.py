"""Command-line front end.

Subcommands: ``acta``, ``tsvd``, ``rtsvd``, ``bench``, ``complete``, ``tprod``.
Every subcommand accepts ``--out DIR``, ``--seed N`` and ``--threads N``.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 malformed input,
5 numerical/engine failure.
"""
import argparse
import contextlib
import logging
import os
import shutil
import sys
import tempfile
import time

import numpy as np

from . import bench
from .completion import ENGINES, complete, psnr, pixel_mask
from .cross import ArrayOracle, acta
from .errors import DimensionMismatch, FormatError, MaskError, TubalError
from .factorizations import tsvd_randomized, tsvd_truncated
from .generators import GeneratorSpec
from .imageio import encode_pnm, read_image
from .tensor import encode_t3d, open_t3d, read_t3d

log = logging.getLogger("tubalcross")

EXIT_USAGE, EXIT_IO, EXIT_FORMAT, EXIT_ENGINE = 2, 3, 4, 5
ENGINE_NAMES = {"acta": "acta_cur", "tsvd": "tsvd", "rtsvd": "randomized"}


class UsageError(Exception):
    pass


class Outputs:
    """Collect output files and publish them together at the end of a run."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.files = {}

    def add(self, name, payload):
        self.files[name] = payload.encode() if isinstance(payload, str) else payload

    def commit(self):
        os.makedirs(self.out_dir, exist_ok=True)
        staging = tempfile.mkdtemp(dir=self.out_dir, prefix=".staging-")
        try:
            for name, data in self.files.items():
                with open(os.path.join(staging, name), "wb") as fh:
                    fh.write(data)
            for name in self.files:
                os.replace(os.path.join(staging, name), os.path.join(self.out_dir, name))
        finally:
            shutil.rmtree(staging, ignore_errors=True)
        return [os.path.join(self.out_dir, n) for n in self.files]


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_common(p):
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="BLAS thread count")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_input(p, rank_required=False):
    p.add_argument("--input", help="T3D1 tensor file")
    p.add_argument("--gen", choices=("synthetic", "case1", "case2", "case3"),
                   help="generate the input instead of reading it")
    p.add_argument("--n", type=int, help="generator size")
    p.add_argument("--rank", type=int, required=rank_required,
                   help="tubal rank (synthetic generator / truncation rank)")


def build_parser():
    parser = argparse.ArgumentParser(prog="tubalcross", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("acta", help="adaptive cross tubal approximation")
    _add_common(p)
    _add_input(p)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--max-rank", type=int, default=None)
    p.add_argument("--no-error", action="store_true", help="skip the full-tensor error check")

    for name in ("tsvd", "rtsvd"):
        p = sub.add_parser(name, help=f"{'randomized' if name == 'rtsvd' else 'truncated'} t-SVD")
        _add_common(p)
        _add_input(p)
        p.add_argument("--target-rank", type=int, default=None,
                       help="truncation rank (defaults to --rank)")
        if name == "rtsvd":
            p.add_argument("--oversample", type=int, default=10)
            p.add_argument("--power-iters", type=int, default=1)

    p = sub.add_parser("bench", help="timing/accuracy comparison")
    _add_common(p)
    p.add_argument("--methods", default="tsvd,rtsvd,acta")
    p.add_argument("--sizes", type=_int_list, default=[50, 100, 150])
    p.add_argument("--gen", choices=("synthetic", "case1", "case2", "case3"), default="synthetic")
    p.add_argument("--rank", type=int, default=30)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--oversample", type=int, default=10)
    p.add_argument("--power-iters", type=int, default=1)

    p = sub.add_parser("complete", help="image completion")
    _add_common(p)
    p.add_argument("--image", required=True, help="binary PGM/PPM file")
    p.add_argument("--missing", type=float, default=0.7, help="fraction of pixels removed")
    p.add_argument("--rank", type=int, default=70)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--rank-step", type=int, default=1, help="rank increment per iteration (0: fixed rank)")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--engine", choices=tuple(ENGINE_NAMES), default="acta")

    p = sub.add_parser("tprod", help="t-product with fast-vs-circulant check")
    _add_common(p)
    p.add_argument("--a", help="left T3D1 operand")
    p.add_argument("--b", help="right T3D1 operand")
    p.add_argument("--dims", type=_int_list, default=[4, 5, 3, 6],
                   help="I1,I2,I4,I3 for random operands when --a/--b are absent")
    return parser


def _load_input(args, lazy=False):
    if args.input and args.gen:
        raise UsageError("give either --input or --gen, not both")
    if args.input:
        if lazy:
            x = open_t3d(args.input)
            return ArrayOracle(x), (lambda: read_t3d(args.input)), x.shape
        x = read_t3d(args.input)
        return ArrayOracle(x), (lambda: x), x.shape
    if not args.gen:
        raise UsageError("one of --input or --gen is required")
    if not args.n:
        raise UsageError("--gen needs --n")
    try:
        spec = GeneratorSpec(args.gen, args.n, args.rank if args.gen == "synthetic" else None, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.gen == "synthetic":
        x = spec.materialize()
        return ArrayOracle(x), (lambda: x), x.shape
    oracle = spec.oracle()
    return oracle, oracle.materialize, oracle.shape


def cmd_acta(args):
    oracle, materialize, shape = _load_input(args, lazy=True)
    t0 = time.perf_counter()
    cf = acta(oracle, eps=args.eps, max_rank=args.max_rank, seed=args.seed)
    dt = time.perf_counter() - t0
    err = None if args.no_error else bench.relative_error(materialize(), cf.reconstruct())
    rec = bench.RunRecord("acta", bench.dims_label(shape), args.eps, args.seed, dt,
                          err if err is not None else float("nan"), None, cf.rank)
    out = Outputs(args.out)
    if cf.rank:  # a rank-0 factor has no valid container
        out.add("U.t3d", encode_t3d(cf.U))
        out.add("V.t3d", encode_t3d(cf.V))
    pivots = [(k, i, j) for k, (i, j) in enumerate(zip(cf.row_indices, cf.col_indices))]
    out.add("indices.csv", bench.rows_to_csv(("k", "row", "col"), pivots))
    out.add("history.csv", bench.rows_to_csv(("k", "rho", "mu", "row", "col", "accepted"),
                                             [(k, float(h.rho), float(h.mu), h.row, h.col, int(h.accepted))
                                              for k, h in enumerate(cf.history)]))
    out.add("run.csv", bench.records_to_csv([rec]))
    out.commit()
    print(f"acta: rank {cf.rank} ({cf.stop_reason}), rel_err {_show(err)}, {dt:.3f} s")
    return 0


def cmd_tsvd(args, randomized=False):
    rank = args.target_rank or args.rank
    if not rank:
        raise UsageError("--target-rank (or --rank) is required")
    _, materialize, shape = _load_input(args)
    x = materialize()
    t0 = time.perf_counter()
    if randomized:
        extra = max(0, min(args.oversample, min(shape[:2]) - rank))
        f = tsvd_randomized(x, rank, extra, args.power_iters, args.seed)
    else:
        f = tsvd_truncated(x, rank)
    dt = time.perf_counter() - t0
    err = bench.relative_error(x, f.reconstruct())
    method = "rtsvd" if randomized else "tsvd"
    rec = bench.RunRecord(method, bench.dims_label(shape), rank, args.seed, dt, err, None, rank)
    out = Outputs(args.out)
    for name, t in (("U", f.U), ("S", f.S), ("V", f.V)):
        out.add(f"{name}.t3d", encode_t3d(t))
    out.add("run.csv", bench.records_to_csv([rec]))
    out.commit()
    print(f"{method}: rank {rank}, rel_err {err:.3e}, {dt:.3f} s")
    return 0


def cmd_bench(args):
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise UsageError("--methods must name at least one of " + ", ".join(bench.METHODS))
    bad = [m for m in methods if m not in bench.METHODS]
    if bad:
        raise UsageError(f"unknown methods {bad}; choose from {bench.METHODS}")
    if not args.sizes:
        raise UsageError("--sizes is empty")
    if args.repeats < 1:
        raise UsageError("--repeats must be at least 1")
    records = bench.run_bench(methods, args.sizes, rank=args.rank, eps=args.eps,
                              repeats=args.repeats, seed=args.seed, kind=args.gen,
                              oversample=args.oversample, power_iters=args.power_iters,
                              progress=lambda m, n, r, dt: log.info("%s n=%d rep=%d %.3fs", m, n, r, dt))
    out = Outputs(args.out)
    out.add("bench.csv", bench.records_to_csv(records))
    out.add("bench_time.dat", bench.gnuplot_blocks(records, "time_s"))
    out.add("bench_error.dat", bench.gnuplot_blocks(records, "rel_err"))
    out.commit()
    sys.stdout.write(bench.records_to_csv(records))
    return 0


def cmd_complete(args):
    if not 0.0 <= args.missing < 1.0:
        raise UsageError("--missing must lie in [0, 1)")
    img = read_image(args.image)
    mask = pixel_mask(img.shape, args.missing, args.seed)
    engine = ENGINE_NAMES[args.engine]
    rank = min(args.rank, *img.shape[:2])
    t0 = time.perf_counter()
    rep = complete(img, mask, engine=engine, rank=rank, iters=args.iters, tol=args.tol,
                   rank_step=args.rank_step or None, seed=args.seed, reference=img)
    dt = time.perf_counter() - t0
    final_psnr = psnr(rep.final, img)
    rec = bench.RunRecord(f"complete-{args.engine}", bench.dims_label(img.shape), rank, args.seed, dt,
                          bench.relative_error(img, rep.final) if np.any(img) else 0.0,
                          final_psnr, rank)
    ext = ".pgm" if img.shape[2] == 1 else ".ppm"
    out = Outputs(args.out)
    out.add("completed" + ext, encode_pnm(rep.final))
    out.add("psnr.csv", bench.rows_to_csv(("iter", "rank", "psnr_db", "observed_residual", "change"),
                                          [(k + 1, rep.ranks[k], rep.psnr[k], rep.observed_residual[k], rep.change[k])
                                           for k in range(rep.iterations)]))
    out.add("run.csv", bench.records_to_csv([rec]))
    out.commit()
    print(f"complete[{args.engine}]: {rep.iterations} iterations, PSNR {_show(final_psnr)} dB, {dt:.2f} s")
    return 0


def cmd_tprod(args):
    if bool(args.a) != bool(args.b):
        raise UsageError("--a and --b must be given together")
    if args.a:
        a, b = read_t3d(args.a), read_t3d(args.b)
    else:
        if len(args.dims) != 4 or min(args.dims) < 1:
            raise UsageError("--dims needs four positive integers I1,I2,I4,I3")
        i1, i2, i4, i3 = args.dims
        rng = np.random.default_rng(args.seed)
        a, b = rng.standard_normal((i1, i2, i3)), rng.standard_normal((i2, i4, i3))
    c, disc = bench.tprod_check(a, b)
    out = Outputs(args.out)
    out.add("tprod.t3d", encode_t3d(c))
    out.commit()
    print(f"tprod: {a.shape} * {b.shape} -> {c.shape}; fast vs circulant relative difference {disc:.3e}")
    return 0


def _show(v):
    if v is None:
        return "n/a"
    small = np.isfinite(v) and v != 0 and abs(v) < 1e-2
    return f"{v:.3e}" if small else f"{v:.4g}"


COMMANDS = {
    "acta": cmd_acta,
    "tsvd": cmd_tsvd,
    "rtsvd": lambda a: cmd_tsvd(a, randomized=True),
    "bench": cmd_bench,
    "complete": cmd_complete,
    "tprod": cmd_tprod,
}


def _thread_limit(n):
    if not n:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        with _thread_limit(args.threads):
            return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (FormatError, MaskError, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TubalError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
