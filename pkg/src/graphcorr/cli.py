"""Command-line front end: simulate, analyze, predict, reduce-clique.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (unreadable or
inconsistent inputs).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .experiments import (
    MODELS,
    ExperimentConfig,
    analyze_pair,
    load_config,
    override_config,
    predict_auc,
    read_labels,
    reduce_clique,
    run_experiment,
    write_block_table,
)
from .graphs import GraphCorrError, read_edge_list
from .spectral import UsvtConfig


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _usvt_from_flags(args) -> UsvtConfig | None:
    if args.rank is not None and args.threshold is not None:
        raise GraphCorrError("--rank and --threshold are mutually exclusive")
    if args.rank is not None:
        return UsvtConfig(rank=args.rank)
    if args.threshold is not None:
        return UsvtConfig(c0=args.threshold)
    return None


def _add_usvt_flags(p):
    p.add_argument("--rank", type=int, help="fixed truncation rank k")
    p.add_argument(
        "--threshold",
        type=float,
        metavar="C0",
        help="singular value threshold constant c0",
    )


def _cmd_simulate(args) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        if not args.model:
            raise GraphCorrError("either --config or --model is required")
        config = ExperimentConfig(model=args.model)
    config = override_config(
        config,
        model=args.model,
        n_values=tuple(args.n) if args.n else None,
        r_values=tuple(args.r) if args.r else None,
        K=args.K,
        mc_replicates=args.mc,
        bootstrap_m=args.bootstrap_m,
        alpha=args.alpha,
        base_seed=args.seed,
        usvt=_usvt_from_flags(args),
        out=args.out,
    )
    rows, manifest = run_experiment(config)
    for row in rows:
        print(
            f"model={row['model']} n={row['n']} r={row['r']}"
            + (f" K={row['K']}" if row["K"] != "" else "")
            + f" rejection_rate={row['rejection_rate']}"
            + (
                f" theoretical_power={row['theoretical_power']:.6g}"
                if row["theoretical_power"] != ""
                else ""
            )
        )
    if manifest["errors"]:
        for err in manifest["errors"]:
            print(f"cell n={err['n']} r={err['r']} failed: {err['error']}", file=sys.stderr)
    if config.out:
        print(f"wrote {config.out} and {config.out}.manifest.json")
    return 0


def _cmd_analyze(args) -> int:
    a = read_edge_list(args.graph_a)
    b = read_edge_list(args.graph_b)
    if a.shape[0] != b.shape[0]:
        raise GraphCorrError(
            f"vertex counts differ: {a.shape[0]} vs {b.shape[0]}"
        )
    labels = names = None
    if args.labels:
        labels, names = read_labels(args.labels, a.shape[0])
    cfg = _usvt_from_flags(args) or UsvtConfig()
    result = analyze_pair(
        a,
        b,
        test=args.test,
        cfg=cfg,
        m=args.bootstrap_m,
        alpha=args.alpha,
        seed=args.seed,
        K=args.K,
        labels=labels,
        label_names=names or (),
        use_complement=args.complement,
    )
    print(result.report.to_json())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(result.report.to_json() + "\n")
        if result.block_mean_r is not None:
            write_block_table(
                result.block_mean_r,
                result.label_names,
                os.path.join(args.out, "block_mean_r.csv"),
            )
            write_block_table(
                result.block_pearson,
                result.label_names,
                os.path.join(args.out, "block_pearson.csv"),
            )
        print(f"wrote results under {args.out}")
    return 0


def _cmd_predict(args) -> int:
    a = read_edge_list(args.graph_a)
    b = read_edge_list(args.graph_b) if args.graph_b else None
    if b is not None and a.shape[0] != b.shape[0]:
        raise GraphCorrError(f"vertex counts differ: {a.shape[0]} vs {b.shape[0]}")
    cfg = _usvt_from_flags(args) or UsvtConfig()
    summary, rocs = predict_auc(
        a,
        b,
        fraction=args.fraction,
        repeats=args.repeats,
        cfg=cfg,
        base_seed=args.seed,
        exact_conditional=args.exact_conditional,
    )
    print(json.dumps({k: v for k, v in summary.items() if k != "aucs"}))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "auc_summary.json"), "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
        for mode, roc in rocs.items():
            path = os.path.join(args.out, f"roc_{mode}.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("fpr,tpr\n")
                for fpr, tpr in roc.points:
                    fh.write(f"{fpr:.10g},{tpr:.10g}\n")
        print(f"wrote results under {args.out}")
    return 0


def _cmd_reduce_clique(args) -> int:
    info = reduce_clique(args.n, args.p, args.s0, args.seed, args.out or ".")
    print(
        "round trip exact; correlation Frobenius norm = "
        f"{info['correlation_frobenius_norm']:.6g} (clique size {info['clique_size']})"
    )
    for name, path in info["paths"].items():
        print(f"  {name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphcorr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a Monte Carlo study over an (n, r) grid")
    p.add_argument("--config", help="YAML experiment description")
    p.add_argument("--model", choices=MODELS, help="model name (overrides config)")
    p.add_argument("--n", type=int, nargs="+", help="vertex count grid")
    p.add_argument("--r", type=float, nargs="+", help="correlation grid")
    p.add_argument("--K", type=int, help="block count (blockmodel only)")
    p.add_argument("--mc", type=int, help="Monte Carlo replicates per cell")
    p.add_argument("--bootstrap-m", type=int, dest="bootstrap_m")
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    _add_usvt_flags(p)
    p.add_argument("--out", help="result CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="test two edge lists for edge correlation")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument(
        "--test", choices=("diff", "same", "sbm", "lambda1"), default="diff"
    )
    p.add_argument("--labels", help="vertex label file for block summaries")
    p.add_argument("--complement", action="store_true", help="analyze complements")
    p.add_argument("--K", type=int, default=2, help="communities for --test sbm")
    p.add_argument("--bootstrap-m", type=int, dest="bootstrap_m", default=99)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    _add_usvt_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("predict", help="hold-out link prediction with AUC summary")
    p.add_argument("graph_a", help="target graph edge list")
    p.add_argument("graph_b", nargs="?", help="optional auxiliary graph edge list")
    p.add_argument("--fraction", type=float, default=0.1)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--exact-conditional", action="store_true", dest="exact_conditional")
    p.add_argument("--seed", type=int, default=0)
    _add_usvt_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser(
        "reduce-clique", help="map a planted-clique instance to a graph pair"
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--s0", type=int, required=True, help="planted clique size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_reduce_clique)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphCorrError as exc:
        print(f"graphcorr: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"graphcorr: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
