"""Function-level similarity from statement-tree pair predictions.

Every statement tree of one function is scored against every tree of
the other; scores binarised at the match threshold feed two directional
aggregates (one per function, since the functions may have different
tree counts).  Either aggregate crossing the verdict threshold flags
the pair as a clone, which deliberately catches the case of a small
function embedded whole inside a larger one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from clonescope.ast_nodes import FunctionAst
from clonescope.errors import EmptyFunction
from clonescope.features import FeatureSet, features_of_function, pair_features
from clonescope.gbdt import GbdtModel, predict_proba_batch
from clonescope.spans import SourceSpan
from clonescope.statements import StatementTree, decompose

SCHEMA_VERSION = 1

DEFAULT_DELTA = 0.7
DEFAULT_MATCH_THRESHOLD = 0.5

VERDICT_CLONE = "clone"
VERDICT_NOT_CLONE = "not-clone"


@dataclass(frozen=True)
class SimilarityMatrix:
    scores: np.ndarray  # shape (m, n), entries in [0, 1]
    row_trees: tuple[StatementTree, ...]
    col_trees: tuple[StatementTree, ...]
    function_a: str
    function_b: str

    @property
    def shape(self) -> tuple[int, int]:
        return self.scores.shape


@dataclass(frozen=True)
class MatchedLine:
    span_a: SourceSpan
    span_b: SourceSpan
    score: float

    def to_json(self) -> dict:
        return {
            "a": {"sl": self.span_a.start_line, "el": self.span_a.end_line},
            "b": {"sl": self.span_b.start_line, "el": self.span_b.end_line},
            "score": self.score,
        }


@dataclass(frozen=True)
class SimilarityReport:
    verdict: str
    score_a: float
    score_b: float
    delta: float
    mode: str
    match_threshold: float
    matched_lines: tuple[MatchedLine, ...]
    function_a: str
    function_b: str
    model_id: str


def pair_matrix(
    feats_a: list[FeatureSet],
    feats_b: list[FeatureSet],
    model: GbdtModel,
) -> np.ndarray:
    """Score every (tree of A, tree of B) pair in one batched prediction."""
    vectors = np.asarray([
        pair_features(fa, fb) for fa in feats_a for fb in feats_b
    ])
    probs = predict_proba_batch(model, vectors)
    return probs.reshape(len(feats_a), len(feats_b))


def compare_functions(
    func_a: FunctionAst,
    func_b: FunctionAst,
    model: GbdtModel,
) -> SimilarityMatrix:
    trees_a = decompose(func_a)
    trees_b = decompose(func_b)
    if not trees_a:
        raise EmptyFunction(f"function {func_a.function_id!r} has no statement trees")
    if not trees_b:
        raise EmptyFunction(f"function {func_b.function_id!r} has no statement trees")
    scores = pair_matrix(features_of_function(trees_a), features_of_function(trees_b), model)
    return SimilarityMatrix(
        scores=scores,
        row_trees=tuple(trees_a),
        col_trees=tuple(trees_b),
        function_a=func_a.function_id,
        function_b=func_b.function_id,
    )


def aggregate(
    matrix: SimilarityMatrix | np.ndarray,
    mode: str = "proportion",
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
) -> tuple[float, float]:
    """Directional similarity scores from the binarised score matrix.

    ``proportion`` (default): fraction of rows (resp. columns) with at
    least one match; always in [0, 1].  ``literal``: total match count
    divided by the row (resp. column) count, which can exceed 1.
    """
    scores = matrix.scores if isinstance(matrix, SimilarityMatrix) else np.asarray(matrix)
    if scores.size == 0:
        raise ValueError("cannot aggregate an empty matrix")
    m, n = scores.shape
    binary = (scores >= match_threshold).astype(np.float64)
    if mode == "literal":
        total = float(binary.sum())
        return total / m, total / n
    if mode == "proportion":
        score_a = float(binary.max(axis=1).sum()) / m
        score_b = float(binary.max(axis=0).sum()) / n
        return score_a, score_b
    raise ValueError(f"unknown aggregation mode {mode!r}")


def verdict(score_a: float, score_b: float, delta: float = DEFAULT_DELTA) -> str:
    """Clone when either directional score reaches the threshold."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    return VERDICT_CLONE if max(score_a, score_b) >= delta else VERDICT_NOT_CLONE


def generate_report(
    matrix: SimilarityMatrix,
    score_a: float,
    score_b: float,
    verdict_value: str,
    *,
    delta: float = DEFAULT_DELTA,
    mode: str = "proportion",
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
    model_id: str = "",
) -> SimilarityReport:
    """Line-level report: each matched row of A is paired with its best column."""
    matches: list[MatchedLine] = []
    scores = matrix.scores
    for i, row_tree in enumerate(matrix.row_trees):
        j = int(np.argmax(scores[i]))
        best = float(scores[i, j])
        if best >= match_threshold:
            matches.append(MatchedLine(
                span_a=row_tree.span,
                span_b=matrix.col_trees[j].span,
                score=best,
            ))
    matches.sort(key=lambda m: (m.span_a.start_line, m.span_a.start_col))
    return SimilarityReport(
        verdict=verdict_value,
        score_a=score_a,
        score_b=score_b,
        delta=delta,
        mode=mode,
        match_threshold=match_threshold,
        matched_lines=tuple(matches),
        function_a=matrix.function_a,
        function_b=matrix.function_b,
        model_id=model_id,
    )


def report_to_json(report: SimilarityReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "verdict": report.verdict,
        "s_a": report.score_a,
        "s_b": report.score_b,
        "delta": report.delta,
        "mode": report.mode,
        "match_threshold": report.match_threshold,
        "function_a": report.function_a,
        "function_b": report.function_b,
        "model_id": report.model_id,
        "matches": [m.to_json() for m in report.matched_lines],
    }


def render_text(report: SimilarityReport) -> str:
    """Human-readable report: conclusion first, then the matched-line table."""
    lines = [
        "Similarity detection report",
        "===========================",
        f"Functions: {report.function_a}  vs  {report.function_b}",
        f"Model: {report.model_id or 'n/a'}",
        f"Scores: s_a={report.score_a:.4f}  s_b={report.score_b:.4f}  "
        f"(mode={report.mode}, match_threshold={report.match_threshold:g})",
        f"Verdict: {report.verdict.upper()}  (delta={report.delta:g})",
        "",
    ]
    if report.matched_lines:
        lines.append(f"{'lines A':>12}  {'lines B':>12}  {'score':>7}")
        lines.append(f"{'-' * 12}  {'-' * 12}  {'-' * 7}")
        for match in report.matched_lines:
            a = _line_range(match.span_a)
            b = _line_range(match.span_b)
            lines.append(f"{a:>12}  {b:>12}  {match.score:7.4f}")
    else:
        lines.append("No matched lines at the current threshold.")
    lines.append("")
    return "\n".join(lines)


def _line_range(span: SourceSpan) -> str:
    if span.start_line == span.end_line:
        return str(span.start_line)
    return f"{span.start_line}-{span.end_line}"
