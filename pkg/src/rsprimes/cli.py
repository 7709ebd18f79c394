"""Command-line front end.

Every command writes a table (CSV by default, or JSON) preceded by a
provenance header. Exit status: 0 success, 1 failed verification, 2 usage
or range error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import time

import numpy as np

from . import __version__
from . import congruence as cg
from . import corrmeasure as cm
from . import digital as dg
from . import primecorr as pc
from . import verify as vf
from .primes import ResourceLimitError, load_or_build

WORKERS_ENV = "RSPRIMES_WORKERS"
MAX_CLI_LIMIT = 10**9


class UsageError(Exception):
    pass


# -- parsing -----------------------------------------------------------------

def parse_int(text: str) -> int:
    """Integers like ``1000``, ``10^7``, ``2**20``, ``1e6`` or ``1_000``."""
    t = text.strip().replace("_", "")
    m = re.fullmatch(r"(\d+)\s*(?:\^|\*\*)\s*(\d+)", t)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    m = re.fullmatch(r"(\d+)[eE](\d+)", t)
    if m:
        return int(m.group(1)) * 10 ** int(m.group(2))
    if re.fullmatch(r"-?\d+", t):
        return int(t)
    raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


def parse_grid(text: str) -> list[int]:
    """Comma list of integers, or ``A..B:geometric[:r]`` / ``A..B:linear[:step]``."""
    m = re.fullmatch(r"(.+?)\.\.(.+?):(geometric|linear)(?::(.+))?", text.strip())
    if not m:
        grid = [parse_int(x) for x in text.split(",") if x.strip()]
    else:
        lo, hi = parse_int(m.group(1)), parse_int(m.group(2))
        kind = m.group(3)
        step = parse_int(m.group(4)) if m.group(4) else (10 if kind == "geometric" else 1)
        if lo < 1 or hi < lo or step < (2 if kind == "geometric" else 1):
            raise argparse.ArgumentTypeError(f"bad grid range {text!r}")
        grid, x = [], lo
        while x <= hi:
            grid.append(x)
            x = x * step if kind == "geometric" else x + step
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise argparse.ArgumentTypeError("grid must be nonempty and strictly increasing")
    return grid


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma list of reals: {text!r}")


def parse_ints(text: str) -> list[int]:
    return [parse_int(x) for x in text.split(",")]


def parse_equation(text: str) -> tuple[int, int]:
    try:
        a, m = text.split(":")
        return int(a), int(m)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RESIDUE:MODULUS, got {text!r}")


def parse_krange(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(parse_int(lo), parse_int(hi) + 1))
    return parse_ints(text)


# -- output ------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (tuple, list)):
        return " ".join(str(x) for x in v)
    return v


class Table:
    def __init__(self, columns, rows, meta=None, notes=None):
        self.columns = list(columns)
        self.rows = [[_cell(v) for v in r] for r in rows]
        self.meta = dict(meta or {})
        self.notes = list(notes or [])


def render(table: Table, fmt: str, provenance: dict) -> str:
    if fmt == "json":
        doc = {"provenance": provenance, "meta": table.meta, "notes": table.notes,
               "columns": table.columns,
               "rows": [dict(zip(table.columns, r)) for r in table.rows]}
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    for key, val in provenance.items():
        buf.write(f"# {key}: {val}\n")
    for key, val in table.meta.items():
        buf.write(f"# {key}: {val}\n")
    for note in table.notes:
        buf.write(f"# {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow(["" if v is None else v for v in r])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------

def _table_for(args, limit: int):
    if limit > MAX_CLI_LIMIT:
        raise ResourceLimitError(f"limit {limit} exceeds CLI ceiling {MAX_CLI_LIMIT}")
    return load_or_build(max(limit, 2), args.sieve_cache, args.workers)


_GEN = {
    "rs": lambda n: 1 - 2 * (dg.r11_array(n) & 1),
    "r11": dg.r11_array,
    "r01": dg.r01_array,
    "s2": dg.s2_array,
}


def cmd_gen(args) -> Table:
    if args.count < 1 or args.start < 0:
        raise UsageError("need start >= 0 and count >= 1")
    n = np.arange(args.start, args.start + args.count, dtype=np.uint64)
    vals = _GEN[args.function](n)
    return Table(["n", "value"], zip(n.tolist(), vals.tolist()),
                 meta={"function": args.function})


def cmd_corr(args) -> Table:
    if args.source == "rs":
        seq = cm.rs_sequence(args.N, args.start)
    else:
        seq = np.random.default_rng(args.seed).choice(np.array([-1, 1]), args.N)
    rep = cm.correlation_measure(seq, args.k, args.d_max, args.mode)
    row = [args.N, args.k, args.mode, rep.value, rep.witness_D, rep.witness_M,
           round(rep.value / args.N, 12), round(cm.random_envelope(args.N, args.k), 6)]
    return Table(["N", "k", "mode", "value", "witness_D", "witness_M", "value_over_N",
                  "random_envelope"], [row], meta={"source": args.source})


def cmd_prime_corr(args) -> Table:
    table = _table_for(args, args.grid[-1])
    pts = pc.convergence_table(table, args.k, args.kind, args.grid, args.workers)
    return Table(["N", "pi_N", "raw_sum", "ratio"],
                 [[p.N, p.pi_N, p.raw, p.ratio] for p in pts],
                 meta={"kind": args.kind, "k": args.k})


def cmd_odd_corr(args) -> Table:
    rows = []
    for N in args.grid:
        raw = pc.odd_integer_sum(N, args.k, args.kind, args.digit_func)
        odd = (N + 1) // 2
        rows.append([N, odd, raw, raw / odd if odd else 0.0])
    return Table(["N", "odd_count", "raw_sum", "ratio"], rows,
                 meta={"kind": args.kind, "k": args.k, "func": args.digit_func})


def cmd_expsum(args) -> Table:
    alpha = dg.AlphaVector(args.alpha)
    table = _table_for(args, args.N)
    if args.weight == "prime":
        raw = pc.s_alpha_sum(table, args.N, alpha, args.workers)
        norm = table.pi(args.N)
    else:
        raw = pc.psi_sum(table, args.N, alpha)
        norm = float(np.sum(table.mangoldt_table(args.N)))
    if isinstance(raw, int):
        re_, im_ = raw, 0
    else:
        re_, im_ = raw.real, raw.imag
    ratio = abs(raw) / norm if norm else 0.0
    return Table(["N", "weight", "raw_real", "raw_imag", "norm", "abs_ratio"],
                 [[args.N, args.weight, re_, im_, norm, ratio]],
                 meta={"alpha": ",".join(repr(a) for a in alpha.components),
                       "exact_path": isinstance(raw, int)})


def cmd_crt(args) -> Table:
    if args.u is not None or args.eps is not None:
        if args.u is None or args.eps is None or args.eq:
            raise UsageError("give either --eq equations or both --u and --eps")
        system = cg.build_paper_system(args.u, args.eps)
    elif args.eq:
        system = cg.CongruenceSystem(args.eq)
    else:
        raise UsageError("no congruences given")
    sol = cg.crt_solve(system)
    eqs = "; ".join(f"x={a} mod {m}" for a, m in system.equations)
    if sol is None:
        return Table(["solvable", "residue", "modulus"], [[False, None, None]],
                     meta={"system": eqs})
    return Table(["solvable", "residue", "modulus"], [[True, sol.residue, sol.modulus]],
                 meta={"system": eqs})


def cmd_lambda_k(args) -> Table:
    table = _table_for(args, args.N)
    vecs = cg.enumerate_lambda_k(table, args.k, args.N)
    return Table([f"d{i}" for i in range(1, args.k + 1)], vecs,
                 meta={"k": args.k, "N": args.N, "cardinality": len(vecs),
                       "upper_bound_2^k": 2 ** args.k})


def cmd_supnorm(args) -> Table:
    G = args.G or 8 * args.N
    v = cm.sup_norm_grid(args.N, G)
    return Table(["N", "G", "sup", "sup_over_sqrtN", "constant"],
                 [[args.N, G, v, v / np.sqrt(args.N), cm.SQRT_PROPERTY_CONSTANT]])


def cmd_subword(args) -> Table:
    rows = [[k, args.L, cm.subword_complexity(args.L, k), 8 * k - 8] for k in args.k]
    return Table(["k", "L", "complexity", "eight_k_minus_8"], rows)


def cmd_verify(args) -> Table:
    names = vf.SUITES if args.suite == "all" else (args.suite,)
    checks = []
    for name in names:
        checks += vf.run_suite(name, args.limit, args.seed)
    rows = [[c.suite, c.name, "pass" if c.passed else "FAIL", c.detail] for c in checks]
    t = Table(["suite", "check", "status", "detail"], rows,
              meta={"passed": sum(c.passed for c in checks), "total": len(checks)})
    t.failed = not all(c.passed for c in checks)
    return t


def cmd_bench(args) -> Table:
    rows, notes = [], []

    def timed(name, size, fn):
        t0 = time.perf_counter()
        result = fn()
        notes.append(f"time {name}: {time.perf_counter() - t0:.3f}s")
        rows.append([name, size, result])

    N = args.N
    holder = {}
    timed("sieve", N, lambda: holder.setdefault("t", _table_for(args, N)).pi(N))
    timed("s_k_sum_k2", N, lambda: pc.s_k_sum(holder["t"], N, 2, args.workers))
    timed("u_k_sum_k3", N, lambda: pc.u_k_sum(holder["t"], N, 3, args.workers))
    n = np.arange(1 << 20, dtype=np.uint64)
    timed("r11_step_sweep", 1 << 20,
          lambda: int(np.count_nonzero(dg.r11_step_array(n) != dg.r11_array(n + np.uint64(1)))))
    timed("c2_exact_rs", 1 << 12,
          lambda: cm.correlation_measure(cm.rs_sequence(1 << 12), 2).value)
    # timings vary run to run, so they stay in the comment header
    return Table(["task", "size", "result"], rows, notes=notes)


# -- driver ------------------------------------------------------------------

def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--workers", type=int, default=None,
                        help=f"worker threads (default ${WORKERS_ENV} or 1)")
    common.add_argument("--sieve-cache", default=None, help="path of a sieve cache file")

    p = argparse.ArgumentParser(prog="rsprimes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rsprimes {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="sequence values")
    s.add_argument("function", choices=sorted(_GEN))
    s.add_argument("start", type=parse_int)
    s.add_argument("count", type=parse_int)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("corr", parents=[common], help="correlation measure C_k")
    s.add_argument("--N", type=parse_int, default=1 << 12)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--mode", choices=("exact", "bounded"), default="exact")
    s.add_argument("--d-max", type=parse_int, default=None)
    s.add_argument("--source", choices=("rs", "random"), default="rs")
    s.add_argument("--start", type=parse_int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_corr)

    s = sub.add_parser("prime-corr", parents=[common], help="S_k / U_k along primes")
    s.add_argument("kind", choices=pc.KINDS)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--grid", type=parse_grid, required=True)
    s.set_defaults(func=cmd_prime_corr)

    s = sub.add_parser("odd-corr", parents=[common], help="the same sums over odd integers")
    s.add_argument("kind", choices=pc.KINDS)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--grid", type=parse_grid, required=True)
    s.add_argument("--func", dest="digit_func", choices=("r11", "s2"), default="r11")
    s.set_defaults(func=cmd_odd_corr)

    s = sub.add_parser("expsum", parents=[common], help="S_alpha(N) or Psi(N)")
    s.add_argument("--alpha", type=parse_floats, required=True)
    s.add_argument("--N", type=parse_int, required=True)
    s.add_argument("--weight", choices=("prime", "mangoldt"), default="prime")
    s.set_defaults(func=cmd_expsum)

    s = sub.add_parser("crt", parents=[common], help="solve a congruence system")
    s.add_argument("--eq", type=parse_equation, action="append", default=[],
                   metavar="A:M", help="x = A (mod M); repeatable")
    s.add_argument("--u", type=parse_ints, help="valuations u_1,..,u_k")
    s.add_argument("--eps", type=parse_ints, help="bits eps_1,..,eps_k")
    s.set_defaults(func=cmd_crt)

    s = sub.add_parser("lambda-k", parents=[common], help="delta vectors realised by primes")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--N", type=parse_int, required=True)
    s.set_defaults(func=cmd_lambda_k)

    s = sub.add_parser("supnorm", parents=[common], help="grid sup norm of the RS polynomial")
    s.add_argument("--N", type=parse_int, required=True)
    s.add_argument("--G", type=parse_int, default=None)
    s.set_defaults(func=cmd_supnorm)

    s = sub.add_parser("subword", parents=[common], help="factor complexity of RS")
    s.add_argument("--L", type=parse_int, default=1 << 20)
    s.add_argument("--k", type=parse_krange, default=list(range(8, 17)))
    s.set_defaults(func=cmd_subword)

    s = sub.add_parser("verify", parents=[common], help="run invariant suites")
    s.add_argument("suite", choices=vf.SUITES + ("all",))
    s.add_argument("--limit", type=parse_int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("bench", parents=[common], help="time the main kernels")
    s.add_argument("--N", type=parse_int, default=10**7)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is None:
        args.workers = _default_workers()
    if args.workers < 1:
        parser.error("--workers must be positive")
    try:
        table = args.func(args)
    except (UsageError, ValueError, ResourceLimitError, cm.ComplexityError, OverflowError) as exc:
        print(f"rsprimes {args.command}: error: {exc}", file=sys.stderr)
        return 2
    provenance = {"tool": f"rsprimes {__version__}",
                  "command": " ".join(["rsprimes"] + argv),
                  "workers": args.workers}
    text = render(table, args.format, provenance)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if getattr(table, "failed", False) else 0


if __name__ == "__main__":
    sys.exit(main())
