"""Command-line driver.

Subcommands: parse, decompose, extract, train, optimize, compare,
sweep, synth, group, report.  Exit codes for comparison commands:
0 = not-clone, 1 = clone, 2 = error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from clonescope.config import SEED_ENV_VAR, load_config
from clonescope.corpus import (
    TRANSFORM_NAMES,
    FunctionCache,
    group_corpus,
    load_pairs,
    make_tree_pairs,
    save_pairs,
    synthesize_clones,
)
from clonescope.errors import CloneScopeError
from clonescope.features import features_of_function
from clonescope.gbdt import (
    HyperPoint,
    importance_table,
    load_model,
    save_model,
    train,
)
from clonescope.hpo import optimize
from clonescope.parser import parse_contract
from clonescope.pipeline import (
    EXIT_CLONE,
    EXIT_ERROR,
    EXIT_NOT_CLONE,
    load_function,
    run_end_to_end,
    sweep_delta,
)
from clonescope.similarity import VERDICT_CLONE, render_text, report_to_json
from clonescope.statements import decompose

SCHEMA_VERSION = 1


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help=f"random seed (overrides {SEED_ENV_VAR} and config)")


def _config_from(args: argparse.Namespace, **extra) -> "RunConfig":
    overrides = {"seed": getattr(args, "seed", None)}
    overrides.update(extra)
    return load_config(getattr(args, "config", None), overrides)


# ── subcommand implementations ───────────────────────────────────


def _cmd_parse(args: argparse.Namespace) -> int:
    source = Path(args.file).read_text()
    functions = parse_contract(source)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "file": args.file,
        "functions": [
            {
                "contract": func.contract_name,
                "name": func.name,
                "ast": func.definition.to_json(),
            }
            for func in functions
        ],
    }
    _emit_json(payload, args.json)
    return 0


def _select_function(args: argparse.Namespace):
    spec = args.file if not args.function else f"{args.file}:{args.function}"
    return load_function(spec)


def _cmd_decompose(args: argparse.Namespace) -> int:
    func = _select_function(args)
    trees = decompose(func)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "function": func.function_id,
        "trees": [tree.to_json() for tree in trees],
    }
    _emit_json(payload, args.json)
    return 0


def _cmd_extract(args: argparse.Namespace) -> int:
    func = _select_function(args)
    trees = decompose(func)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "function": func.function_id,
        "features": [feats.to_json() for feats in features_of_function(trees)],
    }
    _emit_json(payload, args.json)
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    config = _config_from(args)
    records = load_pairs(args.pairs)
    pairs = make_tree_pairs(records, seed=config.seed)
    if args.hyper:
        payload = json.loads(Path(args.hyper).read_text())
        hyper = HyperPoint.from_json(payload.get("hyper", payload))
    else:
        hyper = HyperPoint()
    model = train(pairs, hyper, seed=config.seed)
    save_model(model, args.out)

    table = importance_table(model)
    print(f"trained on {len(pairs)} statement-tree pairs; "
          f"final training loss {model.train_loss_curve[-1]:.4f}")
    print(f"{'Rank':>4}  {'Feature':<34}  {'Weight':>8}")
    for rank, label, weight in table:
        print(f"{rank:>4}  {label:<34}  {weight:8.5f}")

    if args.importance:
        with Path(args.importance).open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["rank", "feature", "weight"])
            for rank, label, weight in table:
                writer.writerow([rank, label, f"{weight:.6f}"])
    if args.fig:
        from clonescope.plots import save_importance_figure

        save_importance_figure(table, args.fig)
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    config = _config_from(args)
    train_records = load_pairs(args.train)
    val_records = load_pairs(args.val)
    cache = FunctionCache()
    train_pairs = make_tree_pairs(train_records, seed=config.seed, cache=cache)
    val_pairs = make_tree_pairs(val_records, seed=config.seed + 1, cache=cache)

    result = optimize(
        train_pairs, val_pairs,
        budget=args.budget, k=args.k, steps=args.steps, seed=config.seed,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "hyper": result.best.to_json(),
        "validation_loss": result.best_loss,
        "evaluations": len(result.history),
    }
    _emit_json(payload, args.out)
    if args.history:
        with Path(args.history).open("w") as handle:
            for record in result.history:
                handle.write(json.dumps(record.to_json()) + "\n")
    print(f"best verified validation loss: {result.best_loss:.5f} "
          f"after {len(result.history)} evaluations")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    config = _config_from(
        args,
        delta=args.delta,
        mode=args.mode,
        match_threshold=args.match_threshold,
        model_path=args.model,
        out_dir=getattr(args, "out_dir", None),
    )
    report = run_end_to_end(config, args.a, args.b)
    if getattr(args, "json", False):
        sys.stdout.write(json.dumps(report_to_json(report), indent=2) + "\n")
    else:
        sys.stdout.write(render_text(report))
    return EXIT_CLONE if report.verdict == VERDICT_CLONE else EXIT_NOT_CLONE


def _parse_deltas(text: str) -> list[float]:
    if ":" in text:
        start, stop, step = (float(part) for part in text.split(":"))
        deltas = []
        current = start
        while current <= stop + 1e-9:
            deltas.append(round(current, 10))
            current += step
        return deltas
    return [float(part) for part in text.split(",")]


def _cmd_sweep(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    records = load_pairs(args.pairs)
    deltas = _parse_deltas(args.deltas)
    rows = sweep_delta(model, records, deltas,
                       mode=args.mode, match_threshold=args.match_threshold)

    with Path(args.out).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["delta", "precision", "recall"])
        for row in rows:
            writer.writerow([f"{row.delta:.2f}", f"{row.precision:.6f}", f"{row.recall:.6f}"])
    print(f"{'delta':>6}  {'precision':>9}  {'recall':>7}")
    for row in rows:
        print(f"{row.delta:6.2f}  {row.precision:9.4f}  {row.recall:7.4f}")

    if args.fig:
        from clonescope.plots import save_sweep_figure

        save_sweep_figure(rows, args.fig)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    config = _config_from(args)
    template_dir = Path(args.templates)
    if args.generate:
        from clonescope.templates import make_demo_templates

        template_dir.mkdir(parents=True, exist_ok=True)
        for name, source in make_demo_templates(args.generate, seed=config.seed):
            (template_dir / f"{name}.sol").write_text(source)

    sources = [path.read_text() for path in sorted(template_dir.glob("*.sol"))]
    if not sources:
        raise CloneScopeError(f"no .sol templates found in {template_dir}")
    transforms = set(args.transforms.split(",")) if args.transforms else set(TRANSFORM_NAMES)
    records = synthesize_clones(sources, transforms, seed=config.seed)
    save_pairs(records, args.out)
    positives = sum(1 for rec in records if rec.label == 1)
    print(f"wrote {len(records)} pairs ({positives} positive, "
          f"{len(records) - positives} negative) to {args.out}")
    return 0


def _cmd_group(args: argparse.Namespace) -> int:
    config = _config_from(args, delta=args.delta)
    model = load_model(args.model)
    paths = sorted(Path(args.corpus).glob("*.sol"))
    functions = []
    for path in paths:
        functions.extend(parse_contract(path.read_text()))
    groups = group_corpus(functions, model, delta=config.delta,
                          mode=config.mode, match_threshold=config.match_threshold)
    ids = [func.function_id for func in functions]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "groups": [group.to_json(ids) for group in groups],
    }
    _emit_json(payload, args.out)
    print(f"{len(functions)} functions in {len(groups)} groups")
    return 0


# ── argument wiring ──────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clonescope",
        description="Statement-level clone detection for Solidity functions.",
    )
    parser.add_argument("--config", default=None, help="key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a file and emit the AST as JSON")
    p.add_argument("file")
    p.add_argument("--json", default=None, help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("decompose", help="statement trees of one function")
    p.add_argument("file")
    p.add_argument("--function", default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("extract", help="category-level features of one function")
    p.add_argument("file")
    p.add_argument("--function", default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("train", help="train the pair classifier")
    p.add_argument("--pairs", required=True, help="function-pair JSONL")
    p.add_argument("--hyper", default=None, help="hyperparameter JSON")
    p.add_argument("--out", required=True, help="model JSON output path")
    p.add_argument("--importance", default=None, help="importance table CSV")
    p.add_argument("--fig", default=None, help="importance chart PNG")
    _add_seed(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("optimize", help="search classifier hyperparameters")
    p.add_argument("--train", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--budget", type=int, default=128)
    p.add_argument("--k", type=int, default=64)
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--out", default=None, help="hyperparameter JSON output")
    p.add_argument("--history", default=None, help="evaluation history JSONL")
    _add_seed(p)
    p.set_defaults(func=_cmd_optimize)

    for name, with_bundle in (("compare", False), ("report", True)):
        p = sub.add_parser(name, help="compare two functions" if not with_bundle
                           else "compare and write the full report bundle")
        p.add_argument("a", help="file or file:function")
        p.add_argument("b", help="file or file:function")
        p.add_argument("--model", required=True)
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--mode", choices=("proportion", "literal"), default=None)
        p.add_argument("--match-threshold", dest="match_threshold", type=float, default=None)
        if with_bundle:
            p.add_argument("--out-dir", required=True)
        else:
            p.add_argument("--json", action="store_true", help="emit JSON instead of text")
        _add_seed(p)
        p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sweep", help="precision/recall across verdict thresholds")
    p.add_argument("--pairs", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--deltas", default="0.5:0.9:0.05", help="start:stop:step or comma list")
    p.add_argument("--mode", choices=("proportion", "literal"), default="proportion")
    p.add_argument("--match-threshold", dest="match_threshold", type=float, default=0.5)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--fig", default=None, help="sweep curve PNG")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("synth", help="synthesise a labelled clone corpus")
    p.add_argument("--templates", required=True, help="directory of .sol templates")
    p.add_argument("--out", required=True, help="pairs JSONL output")
    p.add_argument("--transforms", default=None, help="comma list of transforms")
    p.add_argument("--generate", type=int, default=0,
                   help="write N built-in templates into the directory first")
    _add_seed(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("group", help="greedy similarity grouping of a corpus")
    p.add_argument("--corpus", required=True, help="directory of .sol files")
    p.add_argument("--model", required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out", default=None, help="groups JSON output")
    _add_seed(p)
    p.set_defaults(func=_cmd_group)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CloneScopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
