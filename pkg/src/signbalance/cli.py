"""Command-line interface.

    signbalance summarize --input g.txt
    signbalance test --input g.txt --method new --reps 10000 --seed 1
    signbalance generate --ws 1,100,2,0.1 --er 100,12 --seed 3 --out g.txt
    signbalance simulate --preset ws-h0 --seed 0 --out pvalues.csv

Exit codes: 0 success, 1 I/O or parse error, 2 statistic undefined,
3 degenerate normal approximation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

from . import generators as gen
from .errors import DegenerateApproximation, GraphValidationError, StatisticUndefined
from .experiments import PRESETS, run_preset
from .gaussian import ApproximationWarning, gaussian_test
from .graph import format_edge_list, read_edge_list, sign_subgraph, summary
from .mctest import JSON_FIELDS, binned_test, new_test, old_test, structural_test
from .nulls import SeedSpec, parse_bins

EXIT_OK, EXIT_IO, EXIT_UNDEFINED, EXIT_DEGENERATE = 0, 1, 2, 3

PVALUE_MODES = {"raw": "raw_left", "add-one": "add_one_left", "two-sided": "two_sided"}
# the structural test is two-sided by default; "raw" asks for the left tail
STRUCTURAL_ALTERNATIVE = {"raw": "less", "two-sided": "two-sided"}


class CliError(Exception):
    def __init__(self, message, code=EXIT_IO):
        super().__init__(message)
        self.code = code


def _floats(text, count, flag):
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise CliError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if len(vals) != count:
        raise CliError(f"{flag}: expected {count} values, got {len(vals)}")
    return vals


def _emit(text, out):
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {out}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _load(path):
    if not path:
        raise CliError("--input is required")
    try:
        return read_edge_list(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None
    except GraphValidationError as exc:
        raise CliError(f"{path}: {exc}") from None


def _config(args):
    """Merge a JSON config file under the explicit flags."""
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {args.config}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.config}: invalid JSON ({exc.msg}, line {exc.lineno})") from None
    defaults = vars(build_parser().parse_args([args.command]))
    for key, val in cfg.items():
        key = key.replace("-", "_")
        if key not in defaults or key in ("command", "config"):
            raise CliError(f"{args.config}: unknown key {key!r}")
        if getattr(args, key) == defaults[key]:
            if isinstance(val, list) and key in ("ws", "sbm", "er"):
                val = ",".join(str(v) for v in val)
            setattr(args, key, val)


def cmd_summarize(args):
    g = _load(args.input)
    blocks = {"graph": summary(g), "positive": summary(sign_subgraph(g, 1)),
              "negative": summary(sign_subgraph(g, -1))}
    if args.format == "csv":
        fields = list(next(iter(blocks.values())).to_dict())
        rows = [[name] + ["" if v is None else v for v in s.to_dict().values()] for name, s in blocks.items()]
        return _csv(["subgraph"] + fields, rows)
    return json.dumps({"vertex_count": g.vertex_count, **{k: v.to_dict() for k, v in blocks.items()}},
                      indent=2) + "\n"


def cmd_test(args):
    g = _load(args.input)
    if args.reps < 1:
        raise CliError("--reps must be at least 1")
    mode = PVALUE_MODES[args.pvalue] if args.pvalue else "raw_left"
    kw = dict(workers=args.workers, keep_samples=False)
    method = args.method
    if method == "old":
        res = old_test(g, args.reps, args.seed, mode, **kw)
    elif method == "new":
        res = new_test(g, args.reps, args.seed, mode, **kw)
    elif method == "binned":
        if not args.bins:
            raise CliError("--method binned needs --bins, e.g. 0-1,2-4,5+")
        try:
            bins = parse_bins(args.bins, g.embeddedness.L)
            res = binned_test(g, bins, args.reps, args.seed, mode, **kw)
        except ValueError as exc:
            raise CliError(f"--bins: {exc}") from None
    elif method == "structural":
        if args.pvalue == "add-one":
            raise CliError("--pvalue add-one is not available for the structural test")
        alt = STRUCTURAL_ALTERNATIVE[args.pvalue] if args.pvalue else "two-sided"
        res = structural_test(g, args.reps, args.seed, alt, **kw)
    else:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ApproximationWarning)
            res = gaussian_test(g)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    if args.format == "csv":
        d = res.to_dict()
        return _csv(JSON_FIELDS, [["" if d[k] is None else d[k] for k in JSON_FIELDS]])
    return res.to_json() + "\n"


def cmd_generate(args):
    seed = SeedSpec(args.seed)
    picked = [f for f in ("ws", "sbm", "er") if getattr(args, f)]
    if not picked:
        raise CliError("generate needs --ws, --sbm or --er")
    try:
        if args.sbm:
            if len(picked) > 1:
                raise CliError("--sbm cannot be combined with --ws or --er")
            vals = args.sbm.split(",")
            if len(vals) == 1:
                spec = gen.SBM_MODELS.get(int(vals[0]))
                if spec is None:
                    raise CliError(f"--sbm: unknown model {vals[0]}; use 1, 2, 3 or n,p+,q+,p-,q-")
            else:
                n, *probs = _floats(args.sbm, 5, "--sbm")
                spec = gen.SbmSpec(int(n), *probs)
            g = gen.gen_signed_sbm(spec, seed.rng(0), clash=args.clash)
        else:
            g = None
            if args.ws:
                d, n, k, p = _floats(args.ws, 4, "--ws")
                g = gen.gen_ws(gen.WsSpec(int(d), int(n), int(k), p), seed.rng(0))
            if args.er:
                n_vertices, m = (int(x) for x in _floats(args.er, 2, "--er"))
                er = gen.gen_er_gnm(n_vertices, m, seed.rng(1))
                # WS positives with ER negatives on top
                g = er if g is None else gen.compose(g, er)
            if args.neg_frac is not None:
                if args.ws and args.er:
                    raise CliError("--neg-frac does not apply to a WS + ER composition")
                g = gen.sign_uniform(g, float(args.neg_frac), seed.rng(2))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return format_edge_list(g)


def cmd_simulate(args):
    if not args.preset:
        raise CliError(f"--preset is required; choose from {sorted(PRESETS)}")
    if args.preset not in PRESETS:
        raise CliError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
    kw = {"seed": args.seed, "workers": args.workers}
    if args.reps is not None:
        kw["reps"] = args.reps
    if args.graphs is not None:
        if args.preset == "clt-normality":
            raise CliError("--graphs does not apply to clt-normality (one base graph)")
        kw["graphs"] = args.graphs
    if args.ws:
        if args.preset == "sbm-h1":
            raise CliError("--ws does not apply to sbm-h1")
        kw["ws"] = tuple(_floats(args.ws, 4, "--ws"))
        kw["ws"] = (int(kw["ws"][0]), int(kw["ws"][1]), int(kw["ws"][2]), kw["ws"][3])
    if args.neg_frac is not None:
        key = "neg_ratio" if args.preset == "ws-h0" else "neg_frac"
        if args.preset == "sbm-h1":
            raise CliError("--neg-frac does not apply to sbm-h1")
        kw[key] = float(args.neg_frac)
    sim = run_preset(args.preset, **kw)
    if args.format == "csv":
        return sim.to_csv()
    if args.out:
        _emit(sim.to_csv(), args.out)
        args.out = None
    return sim.summary_json() + "\n"


COMMANDS = {"summarize": cmd_summarize, "test": cmd_test, "generate": cmd_generate,
            "simulate": cmd_simulate}


def build_parser():
    p = argparse.ArgumentParser(prog="signbalance", description="Tests of structural balance in signed graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, reps_default):
        sp.add_argument("--config", help="JSON file with flag values (flags given on the command line win)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--reps", type=int, default=reps_default, help="null draws per test")

    s = sub.add_parser("summarize", help="graph statistics for the graph and its sign subgraphs")
    s.add_argument("--input")
    s.add_argument("--config")
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"), default="json")

    t = sub.add_parser("test", help="run a balance test on an edge list")
    t.add_argument("--input")
    t.add_argument("--method", choices=("old", "new", "binned", "structural", "gaussian"), default="new")
    t.add_argument("--pvalue", choices=tuple(PVALUE_MODES))
    t.add_argument("--bins", help="level bins for --method binned, e.g. 0-1,2-4,5+")
    common(t, 10_000)

    gp = sub.add_parser("generate", help="write a generated graph as an edge list")
    gp.add_argument("--ws", help="d,n,k,p")
    gp.add_argument("--sbm", help="model number 1-3, or n,p+,q+,p-,q-")
    gp.add_argument("--er", help="N,m")
    gp.add_argument("--neg-frac", type=float, help="fraction of edges made negative uniformly")
    gp.add_argument("--clash", choices=("void", "negative"), default="void")
    gp.add_argument("--config")
    gp.add_argument("--seed", type=int, default=0)
    gp.add_argument("--out")

    sm = sub.add_parser("simulate", help="run a simulation preset")
    sm.add_argument("--preset", help=", ".join(PRESETS))
    sm.add_argument("--graphs", type=int, help="replicate graphs")
    sm.add_argument("--ws", help="override the WS base spec d,n,k,p")
    sm.add_argument("--neg-frac", type=float, help="negative fraction (ws-h0: ER edges per WS edge)")
    common(sm, None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _config(args)
        text = COMMANDS[args.command](args)
        _emit(text, getattr(args, "out", None))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except StatisticUndefined as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except DegenerateApproximation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
