"""Decomposition of function ASTs into typed statement trees.

Each tree is rooted at one top-level statement of the function body and
covers a source line or a whole loop/conditional block.  Statements
nested inside a block-bearing statement stay inside that tree; only the
outermost structure decides the type.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from clonescope.ast_nodes import AstNode, FunctionAst, NodeKind
from clonescope.spans import SourceSpan


class StatementTreeKind(Enum):
    VARIABLE_DEFINITION = "VariableDefinition"
    ASSIGNMENT_OPERATION = "AssignmentOperation"
    CONDITIONAL_BLOCK = "ConditionalBlock"
    CONTROL_LOOP = "ControlLoop"
    FUNCTION_CALL = "FunctionCall"
    OTHER_OPERATION = "OtherOperation"


_KIND_BY_ROOT: dict[NodeKind, StatementTreeKind] = {
    NodeKind.VARIABLE_DEFINITION_STATEMENT: StatementTreeKind.VARIABLE_DEFINITION,
    NodeKind.ASSIGNMENT: StatementTreeKind.ASSIGNMENT_OPERATION,
    NodeKind.IF_STATEMENT: StatementTreeKind.CONDITIONAL_BLOCK,
    NodeKind.FOR_STATEMENT: StatementTreeKind.CONTROL_LOOP,
    NodeKind.WHILE_STATEMENT: StatementTreeKind.CONTROL_LOOP,
    NodeKind.CALL: StatementTreeKind.FUNCTION_CALL,
}


@dataclass(frozen=True)
class StatementTree:
    kind: StatementTreeKind
    root: AstNode
    span: SourceSpan
    index: int
    function_id: str

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "span": self.span.to_json(),
            "index": self.index,
        }


def classify_statement(node: AstNode) -> StatementTreeKind:
    """Type of a statement-level node, decided by its outermost structure.

    Anything not covered by the first five types (returns, emits,
    reverts, break/continue, bare increments, assembly blocks, ...)
    falls back to OtherOperation.
    """
    return _KIND_BY_ROOT.get(node.kind, StatementTreeKind.OTHER_OPERATION)


def decompose(func: FunctionAst) -> list[StatementTree]:
    """Split a function body into statement trees, one per top-level statement.

    Emission follows source order (the order of a post-order walk
    restricted to top-level statements).  An empty body yields an empty
    list.
    """
    trees: list[StatementTree] = []
    for index, node in enumerate(func.body.children):
        trees.append(StatementTree(
            kind=classify_statement(node),
            root=node,
            span=node.span,
            index=index,
            function_id=func.function_id,
        ))
    return trees


def kind_distribution(trees: list[StatementTree]) -> dict[StatementTreeKind, int]:
    """Count trees per kind; every kind is present in the result."""
    counts = {kind: 0 for kind in StatementTreeKind}
    for tree in trees:
        counts[tree.kind] += 1
    return counts
