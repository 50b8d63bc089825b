"""Command-line front end.

Subcommands: construct (polar code design), complexity (deterministic
ops-per-info-bit reports), simulate (Monte Carlo BLER sweeps), compare
(polar-vs-LDPC iteration matching), matrices (parity-check file tools).

Every flag can also be supplied through a JSON config file (--config);
explicit flags win. Output paths resolve against $FECBENCH_OUTDIR when
they are relative, and every CSV is accompanied by a .manifest.json
recording the full parameter set, seeds, and library versions so a rerun
reproduces the bytes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .channel import ChannelPoint
from .ldpc.code import (
    SparseParityCheck,
    derive_layers,
    expand_protograph,
    format_alist,
    parse_alist,
    parse_protograph,
)
from .polar.codec import build_pruned_tree, count_ops_sc, count_ops_ssc
from .polar.construction import (
    construct_ga,
    design_snr_search,
    load_construction,
    make_shortening,
    save_construction,
)
from .sim import (
    CSV_HEADER,
    LdpcScheme,
    PolarScheme,
    SimConfig,
    csv_line,
    format_csv,
    match_iterations,
    run_bler_point,
)

COMPLEXITY_HEADER = "row_type,code_id,decoder,k,n,n_iter,ops_per_info_bit"
COMPARE_HEADER = "metric,code_id,k,rate,value"


@dataclass
class RunManifest:
    subcommand: str
    argv: list[str]
    params: dict
    master_seed: int | None
    versions: dict
    created_utc: str

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


def _manifest(subcommand: str, argv, params: dict, master_seed=None) -> RunManifest:
    clean = {}
    for key, val in params.items():
        if isinstance(val, Path):
            val = str(val)
        if isinstance(val, (str, int, float, bool, list, tuple, type(None))):
            clean[key] = list(val) if isinstance(val, tuple) else val
    return RunManifest(
        subcommand=subcommand,
        argv=list(argv),
        params=clean,
        master_seed=master_seed,
        versions={
            "fecbench": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        created_utc=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    )


def _resolve_out(path_str: str | None, default_name: str) -> Path:
    p = Path(path_str) if path_str else Path(default_name)
    outdir = os.environ.get("FECBENCH_OUTDIR")
    if outdir and not p.is_absolute():
        p = Path(outdir) / p
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _write_artifact(path: Path, text: str, manifest: RunManifest) -> None:
    path.write_text(text)
    path.with_suffix(path.suffix + ".manifest.json").write_text(manifest.to_json())


def _load_ldpc(path: str, layer_size: int | None):
    """Sniff alist vs. protograph, return (code, layering, puncture, code_id)."""
    text = Path(path).read_text()
    first = next(line for line in text.splitlines()
                 if line.strip() and not line.lstrip().startswith("#"))
    code_id = Path(path).stem
    if len(first.split()) == 3:
        proto = parse_protograph(text)
        code = expand_protograph(proto)
        layers = derive_layers(code, layer_size or proto.z)
        return code, layers, proto.puncture_vars(), code_id
    code = parse_alist(text)
    layers = derive_layers(code, layer_size or code.m)
    return code, layers, np.array([], dtype=np.int64), code_id


def _sim_config(args) -> SimConfig:
    return SimConfig(
        max_frames=args.max_frames,
        min_frame_errors=args.min_errors,
        master_seed=args.seed,
        all_zero_mode=args.all_zero,
        batch_size=args.batch_size,
    )


def _parse_snrs(values: list[str]) -> list[float]:
    out = []
    for chunk in values:
        for tok in chunk.split(","):
            tok = tok.strip()
            if tok:
                out.append(float(tok))
    return out


# ---------------------------------------------------------------------------
# Subcommand handlers


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ValueError(f"missing required option(s): {flags}")


def cmd_construct(args, argv) -> int:
    _require(args, "n_mother", "n_target", "k")
    shortening = make_shortening(args.n_mother, args.n_target, args.variant)
    snr, cons = design_snr_search(args.n_mother, args.k, shortening=shortening,
                                  target_bler=args.target_bler)
    default = f"polar_k{args.k}_n{args.n_target}_{args.variant}.txt"
    out = _resolve_out(args.output, default)
    save_construction(out, cons)
    manifest = _manifest("construct", argv, vars(args))
    out.with_suffix(out.suffix + ".manifest.json").write_text(manifest.to_json())
    print(f"design Eb/N0: {snr:.2f} dB")
    print(f"predicted BLER: {cons.predicted_bler:.3e}")
    print(f"wrote {out}")
    return 0


def cmd_complexity(args, argv) -> int:
    rows = []
    polar_entries = []
    for path in args.construction or []:
        cons = load_construction(path)
        tree = build_pruned_tree(cons)
        k, n = cons.k, cons.n_target
        sc = count_ops_sc(cons.n_mother) / k
        ssc = count_ops_ssc(tree) / k
        cid = Path(path).stem
        polar_entries.append((cid, k, ssc))
        rows.append(f"polar,{cid},sc,{k},{n},,{sc}")
        rows.append(f"polar,{cid},ssc,{k},{n},,{ssc}")
    for path in args.ldpc or []:
        code, layers, punct, cid = _load_ldpc(path, args.layer_size)
        k = code.n - code.m  # design dimension; redundant checks would lower it
        n_tx = code.n - punct.size
        per_iter = (5 * code.e - 3 * code.m) / k
        rows.append(f"ldpc,{cid},lms_per_iteration,{k},{n_tx},1,{per_iter}")
        if args.n_iter is not None:
            total = args.n_iter * per_iter
            rows.append(f"ldpc,{cid},lms,{k},{n_tx},{args.n_iter},{total}")
            for pid, pk, ssc in polar_entries:
                if pk == k:
                    rows.append(f"ratio,{cid}/{pid},lms_over_ssc,{k},,"
                                f"{args.n_iter},{total / ssc}")
    for rate_str in args.sweep or []:
        num, den = rate_str.split("/")
        rate = int(num) / int(den)
        n = args.sweep_n_min
        while n <= args.sweep_n_max:
            k = int(round(n * rate))
            _, cons = design_snr_search(n, k, target_bler=args.target_bler)
            tree = build_pruned_tree(cons)
            rows.append(f"sweep,polar_r{num}_{den},sc,{k},{n},,{count_ops_sc(n) / k}")
            rows.append(f"sweep,polar_r{num}_{den},ssc,{k},{n},,{count_ops_ssc(tree) / k}")
            n *= 2
    text = "\n".join([COMPLEXITY_HEADER, *rows]) + "\n"
    out = _resolve_out(args.output, "complexity.csv")
    _write_artifact(out, text, _manifest("complexity", argv, vars(args)))
    print(f"wrote {out}")
    return 0


def _build_scheme(args):
    if args.construction and args.ldpc:
        raise ValueError("give either --construction or --ldpc, not both")
    if args.construction:
        cons = load_construction(args.construction)
        return PolarScheme(cons, code_id=Path(args.construction).stem)
    if args.ldpc:
        code, layers, punct, cid = _load_ldpc(args.ldpc, args.layer_size)
        return LdpcScheme(code, layers, puncture=punct, alpha=args.alpha,
                          max_iter=args.max_iter, code_id=cid)
    raise ValueError("one of --construction or --ldpc is required")


def cmd_simulate(args, argv) -> int:
    _require(args, "decoder")
    scheme = _build_scheme(args)
    decoder = args.decoder
    snrs = _parse_snrs(args.snr or [])
    config = _sim_config(args)
    rows = []
    for offset, ebno in enumerate(snrs):
        # duplicate SNR entries stay independent rows: the master seed is
        # offset by the row index so their noise differs
        cfg = dataclasses.replace(config, master_seed=config.master_seed + offset)
        point = ChannelPoint.from_ebno(ebno, scheme.rate)
        result = run_bler_point(decoder, scheme, point, cfg)
        rows.append(csv_line(scheme.code_id, decoder, result, scheme.k))
        print(f"{ebno} dB: bler={result.bler:.4g} "
              f"({result.frame_errors}/{result.frames})")
    out = _resolve_out(args.output, f"sim_{scheme.code_id}_{decoder}.csv")
    _write_artifact(out, format_csv(rows),
                    _manifest("simulate", argv, vars(args), args.seed))
    print(f"wrote {out}")
    return 0


def cmd_compare(args, argv) -> int:
    _require(args, "polar_construction")
    polar = PolarScheme(load_construction(args.polar_construction),
                        code_id=Path(args.polar_construction).stem)
    config = _sim_config(args)
    snrs = _parse_snrs(args.snr or [])
    if not snrs:
        raise ValueError("--snr grid for the polar reference curve is required")
    curve = []
    for ebno in snrs:
        point = ChannelPoint.from_ebno(ebno, polar.rate)
        bp = run_bler_point("ssc", polar, point, config)
        curve.append(bp)
        print(f"polar {ebno} dB: bler={bp.bler:.4g} ({bp.frame_errors}/{bp.frames})")
    ssc_per_k = count_ops_ssc(polar.tree) / polar.k

    rows = [f"ssc_ops_per_info_bit,{polar.code_id},{polar.k},{polar.rate},{ssc_per_k}"]
    if args.ldpc:
        code, layers, punct, cid = _load_ldpc(args.ldpc, args.layer_size)
        scheme = LdpcScheme(code, layers, puncture=punct, alpha=args.alpha,
                            max_iter=args.max_iter, code_id=cid)
        if scheme.k != polar.k:
            raise ValueError(f"information length mismatch: polar K={polar.k}, "
                             f"LDPC K={scheme.k}")
        if not np.isclose(scheme.rate, polar.rate, rtol=1e-6):
            raise ValueError(f"rate mismatch: polar R={polar.rate}, "
                             f"LDPC R={scheme.rate}")
        match = match_iterations(scheme, curve, target_bler=args.target_bler,
                                 config=config, max_candidate=args.max_iter)
        measured = match.point
        lms_per_k = measured.avg_ops_per_info_bit
        rows += [
            f"crossing_ebno_db,{scheme.code_id},{scheme.k},{scheme.rate},{match.ebno_db}",
            f"matched_iterations,{scheme.code_id},{scheme.k},{scheme.rate},{match.n_iter}",
            f"lms_avg_iterations,{scheme.code_id},{scheme.k},{scheme.rate},{measured.avg_iterations}",
            f"lms_ops_per_info_bit,{scheme.code_id},{scheme.k},{scheme.rate},{lms_per_k}",
            f"ops_ratio_lms_over_ssc,{scheme.code_id},{scheme.k},{scheme.rate},{lms_per_k / ssc_per_k}",
        ]
        print(f"matched iterations: {match.n_iter}  "
              f"ratio: {lms_per_k / ssc_per_k:.3f}")
    else:
        # self-comparison: the reference decoder matched against itself
        rows.append(f"ops_ratio_lms_over_ssc,{polar.code_id},{polar.k},{polar.rate},1.0")
        print("self-comparison: ratio 1.0")
    text = "\n".join([COMPARE_HEADER, *rows]) + "\n"
    out = _resolve_out(args.output, f"compare_{polar.code_id}.csv")
    _write_artifact(out, text, _manifest("compare", argv, vars(args), args.seed))
    print(f"wrote {out}")
    return 0


def cmd_matrices(args, argv) -> int:
    text = Path(args.file).read_text()
    first = next(line for line in text.splitlines()
                 if line.strip() and not line.lstrip().startswith("#"))
    is_proto = len(first.split()) == 3
    if args.action == "expand":
        if not is_proto:
            raise ValueError("expand needs a protograph file (rows cols z header)")
        proto = parse_protograph(text)
        code = expand_protograph(proto)
        out = _resolve_out(args.output, Path(args.file).stem + ".alist")
        out.write_text(format_alist(code))
        print(f"wrote {out} ({code.m} checks, {code.n} variables, {code.e} edges)")
        return 0
    # info
    if is_proto:
        proto = parse_protograph(text)
        code = expand_protograph(proto)
        punct = proto.puncture_vars().size
        print(f"protograph: {proto.rows}x{proto.cols} base, Z={proto.z}")
    else:
        code = parse_alist(text)
        punct = 0
    k = code.n - code.m
    n_tx = code.n - punct
    print(f"checks M={code.m}  variables N={code.n}  edges E={code.e}")
    print(f"design K={k}  transmitted N={n_tx}  rate={k / n_tx:.4f}")
    print(f"check degrees: {sorted(set(code.check_degrees().tolist()))}")
    print(f"variable degrees: {sorted(set(code.var_degrees().tolist()))}")
    print(f"lms ops per iteration per info bit: {(5 * code.e - 3 * code.m) / k}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _add_config_flag(p: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps an absent subcommand-level --config from clobbering
    # a value parsed at the top level
    p.add_argument("--config", default=argparse.SUPPRESS,
                   help="JSON file of flag defaults; explicit flags override")


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-frames", type=int, default=100_000)
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--all-zero", action="store_true",
                   help="simulate the all-zero codeword instead of random data")
    p.add_argument("--batch-size", type=int, default=256)


def _add_ldpc_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.75,
                   help="min-sum attenuation factor")
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--layer-size", type=int, default=None,
                   help="checks per layer (default: Z for protographs, "
                   "all checks for alist files)")


def build_parser(config_defaults: dict | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fecbench",
        description="Forward-error-correction workbench: polar SC/SSC and "
                    "LDPC layered min-sum under one LLR-operation accounting model.")
    parser.add_argument("--config", default=None,
                        help="JSON file of flag defaults; explicit flags override")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    all_parsers = [parser]

    p = sub.add_parser("construct", help="design a polar code and save it")
    all_parsers.append(p)
    _add_config_flag(p)
    p.add_argument("--n-mother", type=int, default=None)
    p.add_argument("--n-target", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--variant", choices=("full", "natural", "bit_reverse"),
                   default="full")
    p.add_argument("--target-bler", type=float, default=1e-6)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("complexity", help="deterministic ops-per-info-bit report")
    all_parsers.append(p)
    _add_config_flag(p)
    p.add_argument("--construction", action="append", default=None,
                   help="polar construction file (repeatable)")
    p.add_argument("--ldpc", action="append", default=None,
                   help="alist or protograph file (repeatable)")
    p.add_argument("--n-iter", type=int, default=None,
                   help="iteration count for LMS totals and ratio rows")
    p.add_argument("--layer-size", type=int, default=None)
    p.add_argument("--sweep", action="append", default=None,
                   help="rate like 1/2: emit an ops-vs-N sweep (repeatable)")
    p.add_argument("--sweep-n-min", type=int, default=512)
    p.add_argument("--sweep-n-max", type=int, default=65536)
    p.add_argument("--target-bler", type=float, default=1e-6)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_complexity)

    p = sub.add_parser("simulate", help="Monte Carlo BLER sweep")
    all_parsers.append(p)
    _add_config_flag(p)
    p.add_argument("--construction", default=None, help="polar construction file")
    p.add_argument("--ldpc", default=None, help="alist or protograph file")
    p.add_argument("--decoder", choices=("sc", "ssc", "lms", "spa"), default=None)
    p.add_argument("--snr", action="append", default=None,
                   help="Eb/N0 in dB (repeatable, comma lists accepted)")
    _add_sim_flags(p)
    _add_ldpc_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("compare", help="match LDPC iterations to a polar curve")
    all_parsers.append(p)
    _add_config_flag(p)
    p.add_argument("--polar-construction", default=None)
    p.add_argument("--ldpc", default=None,
                   help="omit for a polar self-comparison")
    p.add_argument("--target-bler", type=float, default=1e-3)
    p.add_argument("--snr", action="append", default=None,
                   help="polar reference curve grid (repeatable)")
    _add_sim_flags(p)
    _add_ldpc_flags(p)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("matrices", help="parity-check matrix utilities")
    all_parsers.append(p)
    _add_config_flag(p)
    p.add_argument("action", choices=("expand", "info"))
    p.add_argument("file")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=cmd_matrices)

    if config_defaults:
        renamed = {key.replace("-", "_"): val for key, val in config_defaults.items()}
        for sp in all_parsers:
            dests = {a.dest for a in sp._actions} - {"handler", "subcommand",
                                                     "help", "config"}
            found = {k: v for k, v in renamed.items() if k in dests}
            if found:
                sp.set_defaults(**found)
    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                defaults = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return 1
        if not isinstance(defaults, dict):
            print("error: config file must hold a JSON object", file=sys.stderr)
            return 1
        args = build_parser(defaults).parse_args(argv)
    try:
        return args.handler(args, argv)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
