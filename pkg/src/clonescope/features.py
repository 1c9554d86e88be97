"""Category-level features of statement trees and the pairwise encoding.

Every AST node maps to exactly one of seven categories.  A node may
contribute one canonical token to its category's bag; purely structural
wrappers (blocks, declaration statements, argument containers) stay
silent, which is why the bag sizes sum to at most the tree size.

Identifier lexemes canonicalise to the single token "ID" so that
consistent renaming leaves the feature set unchanged.  Operators,
units, data types, member names, literals and construct kinds keep
their canonical spelling.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from clonescope.ast_nodes import AstNode, NodeKind
from clonescope.statements import StatementTree, StatementTreeKind


class NodeCategory(Enum):
    ARITHMETIC_OPERATOR = "ArithmeticOperator"
    MEMBER_VARIABLE = "MemberVariable"
    VALUE = "Value"
    IDENTIFIER = "Identifier"
    UNIT = "Unit"
    DATA_TYPE = "DataType"
    CODE_CONSTRUCTS = "CodeConstructs"


CATEGORY_ORDER: tuple[NodeCategory, ...] = tuple(NodeCategory)

# kind -> (category, fixed construct token | "value" marker | None for silent)
_VALUE = object()
_CATEGORY_TABLE: dict[NodeKind, tuple[NodeCategory, object]] = {
    NodeKind.ARITHMETIC_OPERATOR: (NodeCategory.ARITHMETIC_OPERATOR, _VALUE),
    NodeKind.MEMBER_ACCESS: (NodeCategory.MEMBER_VARIABLE, _VALUE),
    NodeKind.NUMBER_LITERAL: (NodeCategory.VALUE, _VALUE),
    NodeKind.HEX_LITERAL: (NodeCategory.VALUE, _VALUE),
    NodeKind.STRING_LITERAL: (NodeCategory.VALUE, _VALUE),
    NodeKind.BOOL_LITERAL: (NodeCategory.VALUE, _VALUE),
    NodeKind.IDENTIFIER: (NodeCategory.IDENTIFIER, "ID"),
    NodeKind.PARAMETER: (NodeCategory.IDENTIFIER, "ID"),
    NodeKind.UNIT: (NodeCategory.UNIT, _VALUE),
    NodeKind.ELEMENTARY_TYPE: (NodeCategory.DATA_TYPE, _VALUE),
    NodeKind.MAPPING_TYPE: (NodeCategory.DATA_TYPE, "mapping"),
    NodeKind.ARRAY_TYPE: (NodeCategory.DATA_TYPE, "array"),
    NodeKind.OPERATOR: (NodeCategory.CODE_CONSTRUCTS, _VALUE),
    NodeKind.ASSIGNMENT: (NodeCategory.CODE_CONSTRUCTS, "Assignment"),
    NodeKind.BINARY_OPERATION: (NodeCategory.CODE_CONSTRUCTS, "BinaryOperation"),
    NodeKind.UNARY_OPERATION: (NodeCategory.CODE_CONSTRUCTS, "UnaryOperation"),
    NodeKind.CONDITIONAL_EXPRESSION: (NodeCategory.CODE_CONSTRUCTS, "Conditional"),
    NodeKind.CALL: (NodeCategory.CODE_CONSTRUCTS, "FunctionCall"),
    NodeKind.TYPE_CAST: (NodeCategory.CODE_CONSTRUCTS, "TypeCast"),
    NodeKind.ARGUMENT_LIST: (NodeCategory.CODE_CONSTRUCTS, "ArgumentList"),
    NodeKind.INDEX_ACCESS: (NodeCategory.CODE_CONSTRUCTS, "IndexAccess"),
    NodeKind.IF_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "If"),
    NodeKind.FOR_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "ForLoop"),
    NodeKind.WHILE_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "WhileLoop"),
    NodeKind.RETURN_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "Return"),
    NodeKind.EMIT_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "Emit"),
    NodeKind.BREAK_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "Break"),
    NodeKind.CONTINUE_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "Continue"),
    NodeKind.REVERT_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, "Revert"),
    NodeKind.ASSEMBLY_BLOCK: (NodeCategory.CODE_CONSTRUCTS, "Assembly"),
    NodeKind.FUNCTION_DEFINITION: (NodeCategory.CODE_CONSTRUCTS, "Function"),
    NodeKind.CONTRACT_DEFINITION: (NodeCategory.CODE_CONSTRUCTS, "Contract"),
    NodeKind.EVENT_DEFINITION: (NodeCategory.CODE_CONSTRUCTS, "Event"),
    # silent structural wrappers
    NodeKind.BLOCK: (NodeCategory.CODE_CONSTRUCTS, None),
    NodeKind.VARIABLE_DEFINITION_STATEMENT: (NodeCategory.CODE_CONSTRUCTS, None),
    NodeKind.UNIT_EXPRESSION: (NodeCategory.CODE_CONSTRUCTS, None),
    NodeKind.PARAMETER_LIST: (NodeCategory.CODE_CONSTRUCTS, None),
    NodeKind.RETURN_PARAMETER_LIST: (NodeCategory.CODE_CONSTRUCTS, None),
    NodeKind.STATE_VARIABLE_DECLARATION: (NodeCategory.CODE_CONSTRUCTS, None),
    NodeKind.PRAGMA_DIRECTIVE: (NodeCategory.CODE_CONSTRUCTS, None),
}

assert set(_CATEGORY_TABLE) == set(NodeKind), "category table must cover every node kind"


def categorize_node(node: AstNode) -> NodeCategory:
    """Total mapping of AST nodes to the seven categories."""
    return _CATEGORY_TABLE[node.kind][0]


def canonical_token(node: AstNode) -> str | None:
    """Canonical bag token contributed by a node, or None for silent kinds."""
    token = _CATEGORY_TABLE[node.kind][1]
    if token is _VALUE:
        return node.value
    return token  # fixed string or None


@dataclass(frozen=True)
class FeatureSet:
    kind: StatementTreeKind
    tree_size: int
    bags: dict[NodeCategory, Counter]

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "size": self.tree_size,
            "bags": {
                category.value: sorted(self.bags[category].elements())
                for category in CATEGORY_ORDER
            },
        }


def extract_features(tree: StatementTree) -> FeatureSet:
    """Collect canonical tokens of every node, grouped by category.

    The walk is post-order and covers nested subtrees; the result is a
    pure function of the tree.
    """
    bags: dict[NodeCategory, Counter] = {category: Counter() for category in CATEGORY_ORDER}
    size = 0
    for node in tree.root.walk():
        size += 1
        token = canonical_token(node)
        if token is not None:
            bags[categorize_node(node)][token] += 1
    return FeatureSet(kind=tree.kind, tree_size=size, bags=bags)


# ── pairwise encoding ────────────────────────────────────────────

PAIR_FEATURE_NAMES: tuple[str, ...] = tuple(
    f"{category.value}_{component}"
    for category in CATEGORY_ORDER
    for component in ("jaccard", "size_diff", "size_ratio")
) + ("kind_match", "tree_size_ratio", "log_tree_size_sum")

PAIR_FEATURE_DIM = len(PAIR_FEATURE_NAMES)  # 24


def multiset_jaccard(a: Counter, b: Counter) -> float:
    """Jaccard over multisets using min/max multiplicities; 1 when both empty."""
    if not a and not b:
        return 1.0
    union = 0
    inter = 0
    for token in a.keys() | b.keys():
        ca = a.get(token, 0)
        cb = b.get(token, 0)
        inter += min(ca, cb)
        union += max(ca, cb)
    return inter / union


def pair_features(a: FeatureSet, b: FeatureSet) -> np.ndarray:
    """Symmetric fixed-length encoding of a statement-tree pair."""
    out = np.empty(PAIR_FEATURE_DIM, dtype=np.float64)
    i = 0
    for category in CATEGORY_ORDER:
        bag_a = a.bags[category]
        bag_b = b.bags[category]
        size_a = sum(bag_a.values())
        size_b = sum(bag_b.values())
        larger = max(size_a, size_b)
        out[i] = multiset_jaccard(bag_a, bag_b)
        out[i + 1] = abs(size_a - size_b) / larger if larger else 0.0
        out[i + 2] = min(size_a, size_b) / larger if larger else 1.0
        i += 3
    out[i] = 1.0 if a.kind is b.kind else 0.0
    out[i + 1] = min(a.tree_size, b.tree_size) / max(a.tree_size, b.tree_size, 1)
    out[i + 2] = math.log(a.tree_size + b.tree_size) if (a.tree_size + b.tree_size) > 0 else 0.0
    return out


def features_of_function(trees: list[StatementTree]) -> list[FeatureSet]:
    return [extract_features(tree) for tree in trees]
