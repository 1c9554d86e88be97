"""End-to-end drivers: compare two source files, sweep the verdict
threshold over a labelled corpus, and score function pairs in batch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from clonescope.ast_nodes import FunctionAst
from clonescope.config import RunConfig, resolve_hyper
from clonescope.corpus import FunctionCache, PairRecord, make_tree_pairs
from clonescope.errors import CloneScopeError
from clonescope.gbdt import GbdtModel, load_model, train
from clonescope.parser import parse_contract
from clonescope.similarity import (
    SimilarityReport,
    aggregate,
    compare_functions,
    generate_report,
    pair_matrix,
    render_text,
    report_to_json,
    verdict,
)

EXIT_NOT_CLONE = 0
EXIT_CLONE = 1
EXIT_ERROR = 2


def load_function(spec: str) -> FunctionAst:
    """Resolve a ``path`` or ``path:function`` reference to a parsed function."""
    path_part, _, func_name = spec.partition(":")
    source = Path(path_part).read_text()
    try:
        functions = parse_contract(source)
    except CloneScopeError as exc:
        raise CloneScopeError(f"{path_part}: {exc}") from exc
    if func_name:
        for func in functions:
            if func.name == func_name:
                return func
        raise CloneScopeError(f"function {func_name!r} not found in {path_part}")
    if len(functions) != 1:
        raise CloneScopeError(
            f"{path_part} defines {len(functions)} functions; use path:function")
    return functions[0]


def obtain_model(config: RunConfig) -> GbdtModel:
    """Load the configured model, or train one from configured pair data."""
    if config.model_path:
        return load_model(config.model_path)
    if config.train_pairs_path:
        from clonescope.corpus import load_pairs

        records = load_pairs(config.train_pairs_path)
        pairs = make_tree_pairs(records, seed=config.seed)
        return train(pairs, resolve_hyper(config), seed=config.seed)
    raise CloneScopeError("no model path and no training data configured")


def run_end_to_end(
    config: RunConfig,
    file_a: str,
    file_b: str,
    model: GbdtModel | None = None,
) -> SimilarityReport:
    """Parse, decompose, extract, score and report on one function pair."""
    func_a = load_function(file_a)
    func_b = load_function(file_b)
    model = model or obtain_model(config)

    matrix = compare_functions(func_a, func_b, model)
    score_a, score_b = aggregate(matrix, config.mode, config.match_threshold)
    result = verdict(score_a, score_b, config.delta)
    report = generate_report(
        matrix, score_a, score_b, result,
        delta=config.delta,
        mode=config.mode,
        match_threshold=config.match_threshold,
        model_id=model.identifier(),
    )

    if config.out_dir:
        write_report_bundle(report, matrix, Path(config.out_dir))
    return report


def write_report_bundle(report: SimilarityReport, matrix, out_dir: Path) -> dict[str, Path]:
    """Write the JSON/text reports, the match table, and the score heatmap."""
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "json": out_dir / "report.json",
        "text": out_dir / "report.txt",
        "csv": out_dir / "matches.csv",
        "figure": out_dir / "similarity_matrix.png",
    }
    paths["json"].write_text(json.dumps(report_to_json(report), indent=2) + "\n")
    paths["text"].write_text(render_text(report))

    import csv

    with paths["csv"].open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["a_start_line", "a_end_line", "b_start_line", "b_end_line", "score"])
        for match in report.matched_lines:
            writer.writerow([
                match.span_a.start_line, match.span_a.end_line,
                match.span_b.start_line, match.span_b.end_line,
                f"{match.score:.6f}",
            ])

    from clonescope.plots import save_matrix_figure

    save_matrix_figure(matrix, paths["figure"])
    return paths


# ── batch scoring and the delta sweep ────────────────────────────


@dataclass(frozen=True)
class SweepRow:
    delta: float
    precision: float
    recall: float


def score_records(
    model: GbdtModel,
    records: list[PairRecord],
    mode: str = "proportion",
    match_threshold: float = 0.5,
    cache: FunctionCache | None = None,
) -> list[tuple[float, float]]:
    """Directional similarity scores for each function-pair record."""
    cache = cache or FunctionCache()
    results: list[tuple[float, float]] = []
    for record in records:
        _, _, feats_a = cache.get(record.source_a)
        _, _, feats_b = cache.get(record.source_b)
        if not feats_a or not feats_b:
            results.append((0.0, 0.0))
            continue
        scores = pair_matrix(feats_a, feats_b, model)
        results.append(aggregate(scores, mode, match_threshold))
    return results


def sweep_delta(
    model: GbdtModel,
    records: list[PairRecord],
    deltas: list[float],
    mode: str = "proportion",
    match_threshold: float = 0.5,
    cache: FunctionCache | None = None,
) -> list[SweepRow]:
    """Precision/recall at each verdict threshold over labelled pairs."""
    if not records:
        raise ValueError("sweep needs at least one labelled pair")
    paired_scores = score_records(model, records, mode, match_threshold, cache)
    labels = [record.label for record in records]

    rows: list[SweepRow] = []
    for delta in deltas:
        tp = fp = fn = 0
        for (score_a, score_b), label in zip(paired_scores, labels):
            predicted = max(score_a, score_b) >= delta
            if predicted and label == 1:
                tp += 1
            elif predicted and label == 0:
                fp += 1
            elif not predicted and label == 1:
                fn += 1
        precision = tp / (tp + fp) if tp + fp else 1.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        rows.append(SweepRow(delta=delta, precision=precision, recall=recall))
    return rows


def f1_score(model: GbdtModel, records: list[PairRecord], delta: float,
             mode: str = "proportion", match_threshold: float = 0.5,
             cache: FunctionCache | None = None) -> tuple[float, float, float]:
    """(precision, recall, f1) of clone verdicts at one threshold."""
    row = sweep_delta(model, records, [delta], mode, match_threshold, cache)[0]
    if row.precision + row.recall == 0.0:
        return row.precision, row.recall, 0.0
    f1 = 2.0 * row.precision * row.recall / (row.precision + row.recall)
    return row.precision, row.recall, f1
