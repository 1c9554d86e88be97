"""AST node model for the supported Solidity subset.

Nodes are immutable: parse products can be shared freely across threads.
The kind set is closed; the parser either produces one of these kinds or
raises an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from clonescope.spans import SourceSpan


class NodeKind(Enum):
    # statements
    BLOCK = "Block"
    VARIABLE_DEFINITION_STATEMENT = "VariableDefinitionStatement"
    IF_STATEMENT = "IfStatement"
    FOR_STATEMENT = "ForStatement"
    WHILE_STATEMENT = "WhileStatement"
    RETURN_STATEMENT = "ReturnStatement"
    EMIT_STATEMENT = "EmitStatement"
    BREAK_STATEMENT = "BreakStatement"
    CONTINUE_STATEMENT = "ContinueStatement"
    REVERT_STATEMENT = "RevertStatement"
    ASSEMBLY_BLOCK = "AssemblyBlock"
    # expressions
    ASSIGNMENT = "Assignment"
    BINARY_OPERATION = "BinaryOperation"
    UNARY_OPERATION = "UnaryOperation"
    CONDITIONAL_EXPRESSION = "ConditionalExpression"
    CALL = "FunctionCall"
    TYPE_CAST = "TypeCast"
    ARGUMENT_LIST = "ArgumentList"
    MEMBER_ACCESS = "MemberAccess"
    INDEX_ACCESS = "IndexAccess"
    IDENTIFIER = "Identifier"
    ARITHMETIC_OPERATOR = "ArithmeticOperator"
    OPERATOR = "Operator"
    NUMBER_LITERAL = "NumberLiteral"
    HEX_LITERAL = "HexLiteral"
    STRING_LITERAL = "StringLiteral"
    BOOL_LITERAL = "BoolLiteral"
    UNIT_EXPRESSION = "UnitExpression"
    UNIT = "Unit"
    # types
    ELEMENTARY_TYPE = "ElementaryType"
    MAPPING_TYPE = "MappingType"
    ARRAY_TYPE = "ArrayType"
    # declarations
    PARAMETER = "Parameter"
    PARAMETER_LIST = "ParameterList"
    RETURN_PARAMETER_LIST = "ReturnParameterList"
    FUNCTION_DEFINITION = "FunctionDefinition"
    CONTRACT_DEFINITION = "ContractDefinition"
    EVENT_DEFINITION = "EventDefinition"
    STATE_VARIABLE_DECLARATION = "StateVariableDeclaration"
    PRAGMA_DIRECTIVE = "PragmaDirective"


# Operator lexemes treated as arithmetic when they appear as operator nodes.
ARITHMETIC_OPERATORS: frozenset[str] = frozenset({"+", "-", "*", "/", "%", "**", "++", "--"})


@dataclass(frozen=True)
class AstNode:
    kind: NodeKind
    span: SourceSpan
    value: str | None = None
    children: tuple["AstNode", ...] = field(default_factory=tuple)

    def walk(self) -> Iterator["AstNode"]:
        """Post-order traversal of the subtree rooted here."""
        for child in self.children:
            yield from child.walk()
        yield self

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def to_json(self) -> dict:
        # Stable field order, integers and strings only.
        return {
            "kind": self.kind.value,
            "value": self.value,
            "span": self.span.to_json(),
            "children": [child.to_json() for child in self.children],
        }


@dataclass(frozen=True)
class FunctionAst:
    name: str
    params: tuple[tuple[str, str], ...]  # (name, type text)
    body: AstNode
    source: str
    contract_name: str
    span: SourceSpan
    definition: AstNode

    @property
    def function_id(self) -> str:
        if self.contract_name:
            return f"{self.contract_name}.{self.name}"
        return self.name


def operator_node(lexeme: str, span: SourceSpan) -> AstNode:
    """Leaf node for an operator token, split by arithmetic flavour."""
    if lexeme in ARITHMETIC_OPERATORS:
        return AstNode(NodeKind.ARITHMETIC_OPERATOR, span, lexeme)
    return AstNode(NodeKind.OPERATOR, span, lexeme)
