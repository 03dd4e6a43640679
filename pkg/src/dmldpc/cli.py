"""Command-line front end: ``dmldpc {construct,analyze,simulate,export,import-alist,witness}``.

Exit codes: 0 success, 1 precondition violation, 2 parse error, 3 resource guard.
Machine-readable output goes to stdout; a version stamp goes to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, arrays, formats, gf2, sim
from .errors import FormatError, LdpcError, PreconditionError, ResourceLimitError
from .pcm import ParityCheckMatrix, build_h, build_h_bar, build_h_star, construct, qc_transform


def _add_source(p: argparse.ArgumentParser, with_file: bool = True) -> None:
    if with_file:
        p.add_argument("matrix", nargs="?", help="alist file (or .grid exponent grid) to load")
    p.add_argument("--a", type=int, help="order of the difference array")
    p.add_argument("--kind", choices=["dm", "dca"], help="dm (odd a) or dca (even a)")
    p.add_argument("--alpha", type=int, help="generator for kind=dm")
    p.add_argument("--r0", type=int, help="deleted block for kind=dca")
    p.add_argument("--qc", action="store_true", help="quasi-cyclic form (kind=dm only)")
    p.add_argument("--from-file", help="difference-array text file instead of --a")


def _check_flags(args) -> None:
    matrix = getattr(args, "matrix", None)
    building = args.a is not None or args.from_file is not None
    if matrix and building:
        raise PreconditionError("give either a matrix file or construction flags, not both")
    if not matrix and not building:
        raise PreconditionError("need a matrix file, --a, or --from-file")
    if args.a is not None and args.from_file:
        raise PreconditionError("--a and --from-file are mutually exclusive")
    if matrix and (args.kind or args.alpha is not None or args.r0 is not None or args.qc):
        raise PreconditionError("construction flags do not apply to a loaded matrix")
    if args.a is not None and args.kind is None:
        raise PreconditionError("--kind is required with --a")
    if args.kind == "dca" and args.alpha is not None:
        raise PreconditionError("--alpha only applies to kind=dm")
    if args.kind == "dm" and args.r0 is not None:
        raise PreconditionError("--r0 only applies to kind=dca")
    if args.qc and args.kind == "dca":
        raise PreconditionError("--qc only applies to kind=dm")


def _from_array(args) -> ParityCheckMatrix:
    d = arrays.loads(Path(args.from_file).read_text())
    if args.kind and args.kind != d.kind.value:
        raise PreconditionError(f"file holds kind={d.kind.value}, not {args.kind}")
    report = arrays.validate(d)
    if not report.ok:
        raise PreconditionError("invalid difference array: " + "; ".join(report))
    if d.kind is arrays.Kind.DM:
        if args.r0 is not None:
            raise PreconditionError("--r0 only applies to kind=dca")
        h = build_h(d)
        return qc_transform(h, d.alpha) if args.qc else h
    if args.alpha is not None or args.qc:
        raise PreconditionError("--alpha and --qc only apply to kind=dm")
    return build_h_bar(d, args.r0)


def load_matrix(args) -> ParityCheckMatrix:
    _check_flags(args)
    if getattr(args, "matrix", None):
        return formats.read_matrix(args.matrix)
    if args.from_file:
        return _from_array(args)
    if args.qc:
        alpha = args.alpha if args.alpha is not None else arrays.select_alpha(args.a)
        arrays.build_dm(args.a, alpha)  # validates a and alpha
        return build_h_star(args.a, alpha)
    return construct(args.a, args.kind, alpha=args.alpha, r0=args.r0)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_construct(args) -> int:
    h = load_matrix(args)
    alist = formats.dumps_alist(h)
    if args.out:
        Path(args.out).write_text(alist)
        if args.qc:
            Path(args.out).with_suffix(".grid").write_text(formats.dumps_grid(h))
        print(analysis.profile(h).summary())
    else:
        sys.stdout.write(alist)
        print(analysis.profile(h).summary(), file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    h = load_matrix(args)
    p = analysis.profile(
        h,
        girth_cap=args.girth_cap,
        stopping_search=args.stopping,
        exact_min_dist=args.min_dist,
        dim_cap=args.dim_cap,
        node_budget=args.node_budget,
    )
    _emit(p.to_text(), args.out)
    return 0


def _grid(text: str | None, name: str) -> tuple[float, ...]:
    if not text:
        raise PreconditionError(f"{name} grid is required")
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise PreconditionError(f"{name} grid must be comma-separated numbers") from None


def cmd_simulate(args) -> int:
    h = load_matrix(args)
    if args.channel == "awgn":
        if args.eps:
            raise PreconditionError("--eps only applies to --channel bec")
        params = _grid(args.ebno, "--ebno")
    else:
        if args.ebno:
            raise PreconditionError("--ebno only applies to --channel awgn")
        params = _grid(args.eps, "--eps")
    cfg = sim.SimConfig(
        channel=args.channel,
        params=params,
        decoder=args.decoder,
        nms_factor=args.nms_factor,
        max_iterations=args.max_iter,
        target_frame_errors=args.target_fe,
        max_frames=args.max_frames,
        seed=args.seed,
        workers=args.workers,
    )
    points = sim.simulate(h, cfg)
    _emit(sim.format_csv(points), args.out)
    for p in points:
        if p.low_confidence:
            print(f"# low-confidence: param={p.param:g} reached max_frames with {p.frame_errors} frame errors", file=sys.stderr)
    return 0


def cmd_export(args) -> int:
    h = load_matrix(args)
    if args.generator:
        e = gf2.systematic_encoder(h)
        gen = ParityCheckMatrix.from_dense(e.generator.to_dense())
        _emit(formats.dumps_alist(gen), args.out)
    elif args.format == "grid":
        _emit(formats.dumps_grid(h), args.out)
    else:
        _emit(formats.dumps_alist(h), args.out)
    return 0


def cmd_import(args) -> int:
    h = formats.read_alist(args.file)
    if args.out:
        formats.write_alist(h, args.out)
    print(f"m={h.n_cols}")
    print(f"x={h.n_rows}")
    print(f"edges={h.n_edges}")
    return 0


def cmd_witness(args) -> int:
    if args.kind == "dm":
        cols = analysis.witness_weight10(args.a)
        h = construct(args.a, "dm", alpha=(args.a - 1) // 2)
    else:
        cols = analysis.witness_weight8(args.a)
        h = construct(args.a, "dca", r0=args.a // 2)
    word = np.zeros(h.n_cols, dtype=np.uint8)
    word[list(cols)] = 1
    weight = int(gf2.syndrome(h, word).sum())
    print("columns=" + ",".join(map(str, cols)))
    print(f"syndrome_weight={weight}")
    print(f"weight={len(cols)}")
    return 0 if weight == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dmldpc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dmldpc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a parity-check matrix and write it as alist")
    _add_source(p, with_file=False)
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry; construction is deterministic")
    p.add_argument("--out", help="alist destination (the grid goes next to it with suffix .grid)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="print the code profile as sorted key=value lines")
    _add_source(p)
    p.add_argument("--stopping", type=int, metavar="SIZE", help="exhaustive stopping-set search up to SIZE")
    p.add_argument("--min-dist", action="store_true", help="brute-force the minimum distance")
    p.add_argument("--dim-cap", type=int, default=26)
    p.add_argument("--node-budget", type=int, default=50_000_000)
    p.add_argument("--girth-cap", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte-Carlo BER/FER, CSV on stdout or --out")
    _add_source(p)
    p.add_argument("--channel", choices=["awgn", "bec"], default="awgn")
    p.add_argument("--ebno", help="comma-separated Eb/No grid in dB")
    p.add_argument("--eps", help="comma-separated erasure probabilities")
    p.add_argument("--decoder", choices=["spa", "nms"], default="spa")
    p.add_argument("--nms-factor", type=float, default=sim.NMS_FACTOR)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--target-fe", type=int, default=50)
    p.add_argument("--max-frames", type=int, default=10_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="write a matrix as alist or exponent grid")
    _add_source(p)
    p.add_argument("--format", choices=["alist", "grid"], default="alist")
    p.add_argument("--generator", action="store_true", help="export the systematic generator matrix instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import-alist", help="validate an alist file, optionally rewrite it normalized")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("witness", help="low-weight codeword of the explicit families")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--kind", choices=["dm", "dca"], required=True)
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 2
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 3
    except (PreconditionError, LdpcError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 2
    print(f"# dmldpc {__version__}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
