"""Command-line surface: batch analyses over grid-set JSON files.

Exit codes: 0 success, 1 validation error, 2 violated mathematical
hypothesis (e.g. a failed pigeonhole scan).  Errors are emitted as JSON on
stderr.  Every run writes a manifest recording the command, the sha256 of
each input file, the seed and the package version.  All file writes are
atomic (temp file + rename) and byte-identical across reruns of the same
configuration.  Rational parameters are exact strings: "1/2", "0.05", "3".
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .branching import (
    BranchingFunction,
    branching_function,
    decompose_hull,
    decompose_min_length,
)
from .constructions import (
    SharpnessParams,
    concentration_example,
    random_frostman,
    random_katz_tao,
    sharpness_example,
    small_diameter_example,
)
from .errors import HypothesisError, InputError
from .extraction import UniformStructure, is_uniform, uniform_pieces, uniformize
from .gridset import GridSet
from .prooftrace import scale_window_abc, scale_window_c3, scale_window_c4
from .regularity import regularity_report
from .sumproduct import expansion_search


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _write_atomic(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_grid_set(path: str) -> GridSet:
    p = Path(path)
    if not p.exists():
        raise InputError(f"input file not found: {path}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if isinstance(data, dict) and "set" in data and "indices" not in data:
        data = data["set"]
    return GridSet.from_dict(data)


def _seed(args) -> int:
    env = os.environ.get("SUMLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"SUMLAB_SEED must be an integer, got {env!r}") from exc
    return args.seed


def _manifest(args, inputs: list[str], outputs: list[Path], seed: int | None = None) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "argv": args._argv,
        "seed": seed,
        "inputs": {name: _sha256(Path(name)) for name in inputs},
        "outputs": [str(p) for p in outputs],
    }


_EXECUTION_FLAGS = ("--jobs", "-o", "--output", "--per-c-csv", "--csv")


def _config_argv(argv: list[str]) -> list[str]:
    """argv without execution-only flags, so equal configs emit equal bytes."""
    out = []
    skip = False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in _EXECUTION_FLAGS:
            skip = True
            continue
        if any(tok.startswith(flag + "=") for flag in _EXECUTION_FLAGS):
            continue
        out.append(tok)
    return out


def _emit(args, payload: dict, out: str, inputs: list[str], seed: int | None = None) -> None:
    out_path = Path(out)
    payload = dict(payload)
    payload["run_config"] = {
        "version": __version__,
        "command": args.command,
        "argv": _config_argv(args._argv),
        "seed": seed,
    }
    _write_atomic(out_path, _dump(payload))
    manifest_path = out_path.with_name(out_path.stem + ".manifest.json")
    _write_atomic(manifest_path, _dump(_manifest(args, inputs, [out_path], seed)))


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> int:
    P = _load_grid_set(args.input)
    reports = regularity_report(P, [args.s])
    rep = reports[0]
    payload = rep.to_json()
    if args.mode == "exact":
        from .regularity import frostman_constant, katz_tao_constant

        payload["frostman_exact"] = frostman_constant(P, args.s, "exact").to_json()
        payload["katz_tao_exact"] = katz_tao_constant(P, args.s, "exact").to_json()
    payload["cardinality"] = len(P)
    _emit(args, payload, args.output, [args.input])
    return 0


def cmd_uniformize(args) -> int:
    P = _load_grid_set(args.input)
    outputs = []
    outdir = Path(args.output)
    if args.pieces:
        if args.epsilon is None:
            raise InputError("--pieces requires --epsilon")
        pieces = uniform_pieces(P, args.T, args.epsilon)
        payload = {"pieces": len(pieces)}
        for i, (piece, struct) in enumerate(pieces):
            piece_path = outdir / f"piece_{i:03d}.json"
            _write_atomic(piece_path, _dump({"set": piece.to_dict(), "structure": struct.to_json()}))
            outputs.append(piece_path)
        summary = outdir / "pieces.json"
        _write_atomic(summary, _dump(payload))
        outputs.append(summary)
    else:
        sub, struct = uniformize(P, args.T)
        out = outdir / "uniform.json"
        _write_atomic(out, _dump({"set": sub.to_dict(), "structure": struct.to_json()}))
        outputs.append(out)
    _write_atomic(outdir / "manifest.json", _dump(_manifest(args, [args.input], outputs)))
    return 0


def cmd_branch(args) -> int:
    P = _load_grid_set(args.input)
    struct = is_uniform(P, args.T)
    if not isinstance(struct, UniformStructure):
        raise HypothesisError(f"input set is not uniform: {struct.reason}")
    f = branching_function(struct)
    if args.decompose == "hull":
        dec = decompose_hull(f)
    else:
        if args.epsilon is None:
            raise InputError("--decompose minlen requires --epsilon")
        dec = decompose_min_length(f, args.epsilon)
    payload = {
        "branching_function": f.to_json(),
        "decomposition": dec.to_json(),
    }
    _emit(args, payload, args.output, [args.input])
    if args.csv:
        _write_atomic(Path(args.csv), _branching_csv(f))
    return 0


def cmd_construct(args) -> int:
    outdir = Path(args.output)
    outputs = []
    seed = None
    if args.kind == "sharpness":
        params = SharpnessParams(q=args.q, alpha=args.alpha, eta=args.eta, beta=args.beta, gamma=args.gamma)
        A, B, C, meta = sharpness_example(params, rounding="nearest" if args.round else "strict")
        named = {"A": A, "B": B, "C": C}
        payload = meta
    elif args.kind == "remark-diam":
        A, B, C = small_diameter_example(args.q, args.rb_exp, args.rc_exp)
        named = {"A": A, "B": B, "C": C}
        payload = {"q": args.q, "rb_exp": args.rb_exp, "rc_exp": args.rc_exp}
    elif args.kind == "concentration":
        A, B = concentration_example(args.q, args.a_exp, args.b_exp)
        named = {"A": A, "B": B}
        payload = {"q": args.q, "a_exp": args.a_exp, "b_exp": args.b_exp}
    else:  # random
        seed = _seed(args)
        maker = random_katz_tao if args.random_kind == "katztao" else random_frostman
        P = maker(args.q, args.T, args.s, seed)
        named = {"set": P}
        payload = {"q": args.q, "T": args.T, "s": str(args.s), "seed": seed, "kind": args.random_kind}
    for name, gs in named.items():
        path = outdir / f"{name}.json"
        _write_atomic(path, _dump(gs.to_dict()))
        outputs.append(path)
    meta_path = outdir / "metadata.json"
    _write_atomic(meta_path, _dump(payload))
    outputs.append(meta_path)
    _write_atomic(outdir / "manifest.json", _dump(_manifest(args, [], outputs, seed)))
    return 0


def cmd_expand(args) -> int:
    A = _load_grid_set(args.A)
    B = _load_grid_set(args.B)
    C = _load_grid_set(args.C)
    if (args.theta is None) == (args.theta_exp is None):
        raise InputError("give exactly one of --theta, --theta-exp")
    report = expansion_search(A, B, C, theta=args.theta, theta_exp=args.theta_exp, jobs=args.jobs)
    _emit(args, report.to_json(), args.output, [args.A, args.B, args.C])
    if args.per_c_csv:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["c_index", "full", "adversarial"])
        for rec in report.records:
            writer.writerow([rec.c_index, rec.full_covering, rec.adversarial_covering])
        _write_atomic(Path(args.per_c_csv), buf.getvalue())
    return 0


def cmd_trace(args) -> int:
    A = _load_grid_set(args.A)
    B = _load_grid_set(args.B)
    C = _load_grid_set(args.C)
    if args.variant == "abc":
        if args.beta is None:
            raise InputError("trace abc requires --beta")
        cert = scale_window_abc(A, B, C, args.T, args.alpha, args.beta, args.gamma, args.eta)
    elif args.variant == "c3":
        if args.beta is None:
            raise InputError("trace c3 requires --beta")
        cert = scale_window_c3(A, B, C, args.T, args.alpha, args.beta, args.gamma, args.eta)
    else:
        cert = scale_window_c4(A, B, C, args.T, args.alpha, args.gamma, args.eta)
    _emit(args, cert.to_json(), args.output, [args.A, args.B, args.C])
    return 0


def cmd_verify(args) -> int:
    from .acceptance import run_all

    numbers = None
    if args.suite != "all":
        try:
            numbers = {int(tok) for tok in args.suite.split(",")}
        except ValueError as exc:
            raise InputError(f"--suite expects 'all' or a comma list of numbers, got {args.suite!r}") from exc
    results = run_all(numbers=numbers)
    return 0 if all(r.passed for r in results) else 1


def _branching_csv(f: BranchingFunction) -> str:
    lines = ["j,f"]
    for j, v in enumerate(f.values):
        lines.append(f"{j},{v}")
    return "\n".join(lines) + "\n"


def _svg_line_plot(series: list[tuple[str, list[tuple[float, float]]]], xlabel: str, ylabel: str) -> str:
    """Minimal deterministic SVG line plot with labeled axes."""
    width, height, pad = 640, 420, 56
    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    if not xs:
        raise InputError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f6fb2", "#c23b22", "#3a7d44", "#7d3a76"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width // 2}" y="{height - 12}" text-anchor="middle" font-size="13">{xlabel}</text>',
        f'<text x="16" y="{height // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {height // 2})">{ylabel}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="11">{x0:.6g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" text-anchor="end" font-size="11">{x1:.6g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" text-anchor="end" font-size="11">{y0:.6g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" text-anchor="end" font-size="11">{y1:.6g}</text>',
    ]
    for t, (label, pts) in enumerate(series):
        color = colors[t % len(colors)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        parts.append(
            f'<text x="{width - pad}" y="{pad + 14 * (t + 1)}" text-anchor="end" '
            f'font-size="12" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(args) -> int:
    p = Path(args.input)
    if not p.exists():
        raise InputError(f"input file not found: {args.input}")
    data = json.loads(p.read_text(encoding="utf-8"))
    if args.kind == "branching":
        f = BranchingFunction.from_dict(data.get("branching_function", data))
        if args.format == "csv":
            _write_atomic(Path(args.output), _branching_csv(f))
        else:
            pts = [(float(j), float(v)) for j, v in enumerate(f.values)]
            series = [("f", pts)]
            dec = data.get("decomposition")
            if dec:
                bps = dec["breakpoints"]
                base = [float(f.values[bps[0]])]
                for (a, b), s in zip(zip(bps, bps[1:]), dec["slopes"]):
                    base.append(base[-1] + (b - a) * float(Fraction(s)))
                series.append(("minorant", [(float(x), y) for x, y in zip(bps, base)]))
            _write_atomic(Path(args.output), _svg_line_plot(series, "j", "f(j)"))
    else:  # expansion
        recs = data["per_c"]
        if args.format == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(["c_index", "full", "adversarial"])
            for rec in recs:
                writer.writerow([rec["c"], rec["full"], rec["adversarial"]])
            _write_atomic(Path(args.output), buf.getvalue())
        else:
            full = [(float(r["c"]), float(r["full"])) for r in recs]
            adv = [(float(r["c"]), float(r["adversarial"])) for r in recs]
            _write_atomic(Path(args.output), _svg_line_plot(
                [("full", full), ("adversarial", adv)], "c index", "covering"))
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumlab",
        description="Exact computations with delta-discretized subsets of [0, 1].",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="regularity constants of a set")
    p.add_argument("--input", required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--mode", choices=["dyadic", "exact"], default="dyadic")
    p.add_argument("-o", "--output", default="report.json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("uniformize", help="extract a uniform subset or pieces")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--pieces", action="store_true")
    p.add_argument("--epsilon", type=_rational)
    p.add_argument("-o", "--output", default="uniformized")
    p.set_defaults(func=cmd_uniformize)

    p = sub.add_parser("branch", help="branching function and slope decomposition")
    p.add_argument("--input", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--decompose", choices=["hull", "minlen"], default="hull")
    p.add_argument("--epsilon", type=_rational)
    p.add_argument("--csv", help="also write (j, f(j)) rows to this path")
    p.add_argument("-o", "--output", default="branching.json")
    p.set_defaults(func=cmd_branch)

    p = sub.add_parser("construct", help="build the explicit example families")
    csub = p.add_subparsers(dest="kind", required=True)

    ps = csub.add_parser("sharpness", help="AP sharpness triple")
    ps.add_argument("--q", type=int, required=True)
    ps.add_argument("--alpha", type=_rational, required=True)
    ps.add_argument("--eta", type=_rational, required=True)
    ps.add_argument("--beta", type=_rational, required=True)
    ps.add_argument("--gamma", type=_rational, required=True)
    ps.add_argument("--round", action="store_true",
                    help="round non-integral exponents instead of erroring")
    ps.add_argument("-o", "--output", default="sharpness")
    ps.set_defaults(func=cmd_construct)

    pd = csub.add_parser("remark-diam", help="small-diameter obstruction pair")
    pd.add_argument("--q", type=int, required=True)
    pd.add_argument("--rb-exp", type=int, required=True)
    pd.add_argument("--rc-exp", type=int, required=True)
    pd.add_argument("-o", "--output", default="remark-diam")
    pd.set_defaults(func=cmd_construct)

    pc = csub.add_parser("concentration", help="interval-concentrated A, B")
    pc.add_argument("--q", type=int, required=True)
    pc.add_argument("--a-exp", type=int, required=True)
    pc.add_argument("--b-exp", type=int, required=True)
    pc.add_argument("-o", "--output", default="concentration")
    pc.set_defaults(func=cmd_construct)

    pr = csub.add_parser("random", help="seeded random regular set")
    pr.add_argument("--kind", dest="random_kind", choices=["katztao", "frostman"], required=True)
    pr.add_argument("--q", type=int, required=True)
    pr.add_argument("--T", type=int, required=True)
    pr.add_argument("--s", type=_rational, required=True)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("-o", "--output", default="random")
    pr.set_defaults(func=cmd_construct)

    p = sub.add_parser("expand", help="expansion search with the adversarial pair set")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--C", required=True)
    p.add_argument("--theta", type=_rational)
    p.add_argument("--theta-exp", type=_rational)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--per-c-csv")
    p.add_argument("-o", "--output", default="expansion.json")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("trace", help="run a scale-selection proof trace")
    p.add_argument("variant", choices=["abc", "c3", "c4"])
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--C", required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("--beta", type=_rational)
    p.add_argument("--gamma", type=_rational, required=True)
    p.add_argument("--eta", type=_rational, required=True)
    p.add_argument("-o", "--output", default="certificate.json")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("verify", help="run the acceptance battery")
    p.add_argument("--suite", default="all", help="'all' or comma list like '1,4,7'")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="CSV / SVG emission for reports")
    p.add_argument("--kind", choices=["branching", "expansion"], required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["csv", "svg"], default="csv")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    args._argv = argv
    try:
        return args.func(args)
    except InputError as exc:
        json.dump({"error": {"kind": "validation", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except HypothesisError as exc:
        json.dump({"error": {"kind": "hypothesis", "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
