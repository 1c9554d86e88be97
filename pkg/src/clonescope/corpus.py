"""Dataset tooling: labelled pair records, synthetic clone generation,
statement-tree pair derivation, and similarity-based corpus grouping.

Positive pairs come from semantics-preserving source transforms applied
to template functions; the generator records which statement trees
correspond across the pair so tree-level training labels need no
heuristic alignment.  Negative pairs cross functions from distinct
templates.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from clonescope.ast_nodes import AstNode, FunctionAst, NodeKind
from clonescope.errors import SchemaError
from clonescope.features import FeatureSet, features_of_function, pair_features
from clonescope.gbdt import GbdtModel, LabeledPair
from clonescope.lexer import UNIT_NAMES, Token, TokenKind, tokenize
from clonescope.parser import parse_function
from clonescope.similarity import (
    DEFAULT_DELTA,
    DEFAULT_MATCH_THRESHOLD,
    VERDICT_CLONE,
    aggregate,
    pair_matrix,
    verdict,
)
from clonescope.statements import StatementTree, decompose

SCHEMA_VERSION = 1

TRANSFORM_NAMES = (
    "rename-identifiers",
    "reorder-independent-statements",
    "insert-dead-code",
    "constant-perturbation",
)

ORIGIN_HUMAN = "human"
ORIGIN_SYNTHETIC = "synthetic-transform"
ORIGIN_HEURISTIC = "heuristic"

# Identifiers with built-in meaning; renaming them would change semantics.
_RENAME_RESERVED = frozenset({
    "msg", "block", "tx", "now", "this", "super",
    "require", "assert", "keccak256", "sha3", "sha256", "ripemd160",
    "ecrecover", "addmod", "mulmod", "selfdestruct", "suicide",
}) | UNIT_NAMES


@dataclass
class PairRecord:
    pair_id: str
    source_a: str
    source_b: str
    label: int
    origin: str
    template_a: str | None = None
    template_b: str | None = None
    transform: str | None = None
    tree_alignment: list[tuple[int, int]] | None = None

    def to_json(self) -> dict:
        record: dict = {
            "id": self.pair_id,
            "source_a": self.source_a,
            "source_b": self.source_b,
            "label": self.label,
            "origin": self.origin,
        }
        if self.template_a is not None:
            record["template_a"] = self.template_a
        if self.template_b is not None:
            record["template_b"] = self.template_b
        if self.transform is not None:
            record["transform"] = self.transform
        if self.tree_alignment is not None:
            record["tree_alignment"] = [[a, b] for a, b in self.tree_alignment]
        return record


@dataclass
class FunctionGroup:
    group_id: int
    members: list[int] = field(default_factory=list)
    template: int = 0

    def to_json(self, function_ids: list[str] | None = None) -> dict:
        data = {
            "group_id": self.group_id,
            "members": list(self.members),
            "template": self.template,
        }
        if function_ids is not None:
            data["member_ids"] = [function_ids[i] for i in self.members]
            data["template_id"] = function_ids[self.template]
        return data


# ── JSONL persistence ────────────────────────────────────────────


def load_pairs(path: str | Path) -> list[PairRecord]:
    records: list[PairRecord] = []
    text = Path(path).read_text()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from exc
        if not isinstance(raw, dict):
            raise SchemaError("record is not an object", line_no)
        for key in ("id", "source_a", "source_b", "label", "origin"):
            if key not in raw:
                raise SchemaError(f"missing required field {key!r}", line_no)
        if raw["label"] not in (0, 1):
            raise SchemaError(f"label must be 0 or 1, got {raw['label']!r}", line_no)
        alignment = raw.get("tree_alignment")
        if alignment is not None:
            alignment = [(int(a), int(b)) for a, b in alignment]
        records.append(PairRecord(
            pair_id=str(raw["id"]),
            source_a=raw["source_a"],
            source_b=raw["source_b"],
            label=int(raw["label"]),
            origin=str(raw["origin"]),
            template_a=raw.get("template_a"),
            template_b=raw.get("template_b"),
            transform=raw.get("transform"),
            tree_alignment=alignment,
        ))
    return records


def save_pairs(records: list[PairRecord], path: str | Path) -> None:
    with Path(path).open("w") as handle:
        for record in records:
            handle.write(json.dumps(record.to_json()) + "\n")


# ── source transforms ────────────────────────────────────────────


def _splice(source: str, replacements: list[tuple[int, int, str]]) -> str:
    """Apply (start_offset, end_offset, text) replacements right-to-left."""
    out = source
    for start, end, text in sorted(replacements, key=lambda r: r[0], reverse=True):
        out = out[:start] + text + out[end:]
    return out


def rename_identifiers(source: str, rng: random.Random) -> tuple[str, list[tuple[int, int]]]:
    """Consistently rename every user identifier to a fresh aN name."""
    tokens = tokenize(source)
    taken = {tok.lexeme for tok in tokens if tok.kind is TokenKind.IDENT}
    mapping: dict[str, str] = {}
    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            name = f"a{counter}"
            counter += 1
            if name not in taken:
                return name

    replacements = []
    for idx, tok in enumerate(tokens):
        if tok.kind is not TokenKind.IDENT or tok.lexeme in _RENAME_RESERVED:
            continue
        if idx > 0 and tokens[idx - 1].lexeme == ".":
            continue  # member names carry semantics
        if tok.lexeme not in mapping:
            mapping[tok.lexeme] = fresh()
        replacements.append((tok.start_offset, tok.end_offset, mapping[tok.lexeme]))

    renamed = _splice(source, replacements)
    n = len(decompose(parse_function(source)))
    return renamed, [(i, i) for i in range(n)]


def _statement_effects(root: AstNode) -> tuple[set[str], set[str]] | None:
    """(reads, writes) of a statement, or None when reordering is unsafe."""
    if root.kind is NodeKind.VARIABLE_DEFINITION_STATEMENT:
        name_node = root.children[1]
        writes = {name_node.value}
        rest = root.children[2:] if len(root.children) > 2 else ()
        reads = set()
        for child in rest:
            for node in child.walk():
                if node.kind is NodeKind.CALL:
                    return None  # calls may have side effects
                if node.kind is NodeKind.IDENTIFIER:
                    reads.add(node.value)
        return reads, writes
    if root.kind is NodeKind.ASSIGNMENT:
        target = root.children[0]
        base = next((n for n in target.walk() if n.kind is NodeKind.IDENTIFIER), None)
        if base is None:
            return None
        writes = {base.value}
        reads = set()
        for node in root.walk():
            if node.kind is NodeKind.CALL:
                return None
            if node.kind is NodeKind.IDENTIFIER:
                reads.add(node.value)
        return reads, writes
    return None


def _swappable(a: AstNode, b: AstNode) -> bool:
    effects_a = _statement_effects(a)
    effects_b = _statement_effects(b)
    if effects_a is None or effects_b is None:
        return False
    reads_a, writes_a = effects_a
    reads_b, writes_b = effects_b
    return not (
        writes_a & writes_b or writes_a & reads_b or reads_a & writes_b
    )


def _contiguous(trees: list[StatementTree], i: int) -> bool:
    return trees[i].span.end_line + 1 == trees[i + 1].span.start_line


def reorder_statements(source: str, rng: random.Random) -> tuple[str, list[tuple[int, int]]]:
    """Swap adjacent independent declaration/assignment statements."""
    func = parse_function(source)
    trees = decompose(func)
    order = list(range(len(trees)))

    candidates = [
        i for i in range(len(trees) - 1)
        if _contiguous(trees, i) and _swappable(trees[i].root, trees[i + 1].root)
    ]
    chosen: list[int] = []
    last = -2
    for i in candidates:
        if i <= last + 1:
            continue  # keep swaps non-overlapping
        if rng.random() < 0.5:
            chosen.append(i)
            last = i
    if not chosen and candidates:
        chosen = [candidates[0]]

    lines = source.splitlines()
    for i in sorted(chosen, reverse=True):
        first, second = trees[i].span, trees[i + 1].span
        block_a = lines[first.start_line - 1:first.end_line]
        block_b = lines[second.start_line - 1:second.end_line]
        lines[first.start_line - 1:second.end_line] = block_b + block_a
        order[i], order[i + 1] = order[i + 1], order[i]

    reordered = "\n".join(lines)
    if source.endswith("\n"):
        reordered += "\n"
    alignment = [(orig, new) for new, orig in enumerate(order)]
    alignment.sort()
    return reordered, alignment


def insert_dead_code(source: str, rng: random.Random) -> tuple[str, list[tuple[int, int]]]:
    """Insert unused declarations at up to 20% of the statement count."""
    func = parse_function(source)
    trees = decompose(func)
    n = len(trees)
    count = max(1, n // 5)

    positions = sorted(rng.sample(range(n), min(count, n)))
    lines = source.splitlines()
    for serial, pos in enumerate(reversed(positions)):
        tree = trees[pos]
        anchor = lines[tree.span.start_line - 1]
        indent = anchor[:len(anchor) - len(anchor.lstrip())]
        name = f"__d{len(positions) - 1 - serial}"
        value = rng.randrange(0, 4)
        lines.insert(tree.span.start_line - 1, f"{indent}uint {name} = {value};")

    patched = "\n".join(lines)
    if source.endswith("\n"):
        patched += "\n"
    alignment = []
    for i in range(n):
        shift = sum(1 for pos in positions if pos <= i)
        alignment.append((i, i + shift))
    return patched, alignment


def perturb_constants(source: str, rng: random.Random) -> tuple[str, list[tuple[int, int]]]:
    """Nudge number literals, keeping the statement structure intact."""
    tokens = tokenize(source)
    numbers = [
        tok for tok in tokens
        if tok.kind is TokenKind.NUMBER and not tok.lexeme.lower().startswith("0x")
    ]
    replacements = []
    for tok in numbers:
        if rng.random() < 0.5:
            replacements.append((tok.start_offset, tok.end_offset, _bump_number(tok, rng)))
    if not replacements and numbers:
        tok = numbers[0]
        replacements.append((tok.start_offset, tok.end_offset, _bump_number(tok, rng)))

    patched = _splice(source, replacements)
    n = len(decompose(parse_function(source)))
    return patched, [(i, i) for i in range(n)]


def _bump_number(tok: Token, rng: random.Random) -> str:
    if "." in tok.lexeme:
        whole, frac = tok.lexeme.split(".", 1)
        return f"{int(whole) + 1}.{frac}"
    value = int(tok.lexeme)
    return str(value + 1 if rng.random() < 0.5 else value * 2 + 1)


TRANSFORMS = {
    "rename-identifiers": rename_identifiers,
    "reorder-independent-statements": reorder_statements,
    "insert-dead-code": insert_dead_code,
    "constant-perturbation": perturb_constants,
}


# ── synthetic corpus generation ──────────────────────────────────


def synthesize_clones(
    base_functions: list[str],
    transforms: set[str] | tuple[str, ...] = TRANSFORM_NAMES,
    seed: int = 0,
    negatives_per_positive: int = 2,
) -> list[PairRecord]:
    """Positive pairs from transforms of each base function, negatives from
    cross-template pairs, at a 1:2 class ratio by default."""
    unknown = set(transforms) - set(TRANSFORM_NAMES)
    if unknown:
        raise ValueError(f"unknown transforms: {sorted(unknown)}")
    ordered_transforms = [t for t in TRANSFORM_NAMES if t in set(transforms)]

    names = [parse_function(source).name for source in base_functions]
    variants: list[list[str]] = [[source] for source in base_functions]
    records: list[PairRecord] = []

    for i, source in enumerate(base_functions):
        for transform_name in ordered_transforms:
            rng = random.Random(f"{seed}:{i}:{transform_name}")
            transformed, alignment = TRANSFORMS[transform_name](source, rng)
            variants[i].append(transformed)
            records.append(PairRecord(
                pair_id=f"pos-{i:04d}-{transform_name}",
                source_a=source,
                source_b=transformed,
                label=1,
                origin=ORIGIN_SYNTHETIC,
                template_a=names[i],
                template_b=names[i],
                transform=transform_name,
                tree_alignment=alignment,
            ))

    n_positives = len(records)
    n_negatives = negatives_per_positive * n_positives
    rng = random.Random(f"{seed}:negatives")
    seen: set[tuple[int, int, int]] = set()
    attempts = 0
    count = 0
    while count < n_negatives and attempts < 100 * n_negatives and len(base_functions) > 1:
        attempts += 1
        i, j = rng.sample(range(len(base_functions)), 2)
        variant = rng.randrange(len(variants[j]))
        key = (i, j, variant)
        if key in seen and attempts < 50 * n_negatives:
            continue
        seen.add(key)
        records.append(PairRecord(
            pair_id=f"neg-{count:04d}",
            source_a=base_functions[i],
            source_b=variants[j][variant],
            label=0,
            origin=ORIGIN_HEURISTIC,
            template_a=names[i],
            template_b=names[j],
        ))
        count += 1
    return records


# ── statement-tree pair derivation ───────────────────────────────


class FunctionCache:
    """Parse/decompose/extract once per distinct source text."""

    def __init__(self) -> None:
        self._store: dict[str, tuple[FunctionAst, list[StatementTree], list[FeatureSet]]] = {}

    def get(self, source: str) -> tuple[FunctionAst, list[StatementTree], list[FeatureSet]]:
        entry = self._store.get(source)
        if entry is None:
            func = parse_function(source)
            trees = decompose(func)
            entry = (func, trees, features_of_function(trees))
            self._store[source] = entry
        return entry


def make_tree_pairs(
    records: list[PairRecord],
    seed: int = 0,
    negatives_per_positive: float = 2.0,
    cache: FunctionCache | None = None,
) -> list[LabeledPair]:
    """Statement-tree training pairs from function-level records.

    Positives follow the recorded alignment of transform pairs.
    Negatives sample cross-template tree pairs, skipping pairs whose
    canonical feature sets coincide (those cannot be asserted dissimilar).
    """
    cache = cache or FunctionCache()
    pairs: list[LabeledPair] = []

    for record in records:
        if record.label != 1 or not record.tree_alignment:
            continue
        _, _, feats_a = cache.get(record.source_a)
        _, _, feats_b = cache.get(record.source_b)
        for ia, ib in record.tree_alignment:
            if ia < len(feats_a) and ib < len(feats_b):
                pairs.append(LabeledPair(pair_features(feats_a[ia], feats_b[ib]), 1))

    n_positive = len(pairs)
    target = int(round(negatives_per_positive * n_positive))
    negative_records = [r for r in records if r.label == 0]
    rng = random.Random(f"{seed}:tree-negatives")
    attempts = 0
    added = 0
    while added < target and negative_records and attempts < 50 * max(target, 1):
        attempts += 1
        record = negative_records[rng.randrange(len(negative_records))]
        _, _, feats_a = cache.get(record.source_a)
        _, _, feats_b = cache.get(record.source_b)
        if not feats_a or not feats_b:
            continue
        fa = feats_a[rng.randrange(len(feats_a))]
        fb = feats_b[rng.randrange(len(feats_b))]
        if fa == fb:
            continue  # canonically identical: not a trustworthy negative
        pairs.append(LabeledPair(pair_features(fa, fb), 0))
        added += 1
    return pairs


# ── corpus grouping ──────────────────────────────────────────────


def group_corpus(
    functions: list[FunctionAst],
    model: GbdtModel,
    delta: float = DEFAULT_DELTA,
    mode: str = "proportion",
    match_threshold: float = DEFAULT_MATCH_THRESHOLD,
) -> list[FunctionGroup]:
    """Greedy first-fit clustering against each group's template function."""
    feature_sets: list[list[FeatureSet]] = []
    for func in functions:
        trees = decompose(func)
        feature_sets.append(features_of_function(trees))

    groups: list[FunctionGroup] = []
    for idx, feats in enumerate(feature_sets):
        placed = False
        if feats:
            for group in groups:
                template_feats = feature_sets[group.template]
                if not template_feats:
                    continue
                scores = pair_matrix(feats, template_feats, model)
                score_a, score_b = aggregate(scores, mode, match_threshold)
                if verdict(score_a, score_b, delta) == VERDICT_CLONE:
                    group.members.append(idx)
                    placed = True
                    break
        if not placed:
            groups.append(FunctionGroup(group_id=len(groups), members=[idx], template=idx))
    return groups
