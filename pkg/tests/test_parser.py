import pytest

from clonescope.ast_nodes import NodeKind
from clonescope.errors import ParseError, UnsupportedConstruct
from clonescope.parser import parse_contract, parse_function

from helpers import lexemes_in_span, random_function, span_text


def all_nodes(node):
    yield from node.walk()


# ── parse_function ───────────────────────────────────────────────


def test_fig4_batch_transfer_shape(fig4_sources):
    source, _ = fig4_sources
    func = parse_function(source)
    assert func.name == "batchTransfer"
    assert func.body.kind is NodeKind.BLOCK
    kinds = {node.kind for node in all_nodes(func.body)}
    assert NodeKind.FOR_STATEMENT in kinds
    # Eleven executable body lines: the union of top-level statement spans.
    lines = set()
    for stmt in func.body.children:
        lines.update(stmt.span.lines())
    assert len(lines) == 11


def test_empty_function_body():
    func = parse_function("function f() public {}")
    assert func.name == "f"
    assert func.body.kind is NodeKind.BLOCK
    assert func.body.children == ()


def test_assembly_block_is_opaque_leaf():
    func = parse_function(
        "function f() public {\n"
        "    assembly { let x := add(1, 2) }\n"
        "}\n"
    )
    stmt = func.body.children[0]
    assert stmt.kind is NodeKind.ASSEMBLY_BLOCK
    assert stmt.children == ()


def test_parse_function_rejects_multiple():
    source = "function a() public {}\nfunction b() public {}\n"
    with pytest.raises(ParseError):
        parse_function(source)


# ── parse_contract ───────────────────────────────────────────────


def test_contract_with_three_functions():
    source = (
        "pragma solidity ^0.4.24;\n"
        "contract Token {\n"
        "    mapping(address => uint) balances;\n"
        "    event Transfer(address indexed from, address to, uint value);\n"
        "    function one() public {}\n"
        "    function two() public {}\n"
        "    function three() public {}\n"
        "}\n"
    )
    functions = parse_contract(source)
    assert [f.name for f in functions] == ["one", "two", "three"]
    assert all(f.contract_name == "Token" for f in functions)


def test_file_with_no_functions():
    assert parse_contract("pragma solidity ^0.4.24;\n") == []


def test_modifier_is_unsupported():
    source = (
        "contract C {\n"
        "    modifier onlyOwner() { _; }\n"
        "    function f() public {}\n"
        "}\n"
    )
    with pytest.raises(UnsupportedConstruct):
        parse_contract(source)


def test_modifier_invocation_in_header_is_unsupported():
    source = "function f() public whenNotPaused returns (bool) {}\n"
    with pytest.raises(UnsupportedConstruct):
        parse_contract(source)


def test_struct_is_unsupported():
    with pytest.raises(UnsupportedConstruct):
        parse_contract("contract C { struct S { uint a; } }")


# ── grammar coverage ─────────────────────────────────────────────


def test_cast_vs_declaration_disambiguation():
    func = parse_function(
        "function f(uint a) public {\n"
        "    uint256 b = uint256(a) * 2;\n"
        "    uint256(a) + 1;\n"
        "}\n"
    )
    decl, expr = func.body.children
    assert decl.kind is NodeKind.VARIABLE_DEFINITION_STATEMENT
    assert expr.kind is NodeKind.BINARY_OPERATION
    casts = [n for n in all_nodes(func.body) if n.kind is NodeKind.TYPE_CAST]
    assert len(casts) == 2


def test_unit_literals():
    func = parse_function("function f() public { uint d = 3 days; }")
    units = [n for n in all_nodes(func.body) if n.kind is NodeKind.UNIT]
    assert [u.value for u in units] == ["days"]


def test_member_and_index_access():
    func = parse_function(
        "function f(address[] a) public { balances[msg.sender] = a.length; }")
    kinds = [n.kind for n in all_nodes(func.body)]
    assert kinds.count(NodeKind.MEMBER_ACCESS) == 2
    assert kinds.count(NodeKind.INDEX_ACCESS) == 1
    members = {n.value for n in all_nodes(func.body) if n.kind is NodeKind.MEMBER_ACCESS}
    assert members == {"sender", "length"}


def test_compound_assignment_carries_arith_operator():
    func = parse_function("function f(uint x) public { x += 2; }")
    stmt = func.body.children[0]
    assert stmt.kind is NodeKind.ASSIGNMENT
    assert stmt.value == "+="
    assert stmt.children[1].kind is NodeKind.ARITHMETIC_OPERATOR
    assert stmt.children[1].value == "+"


def test_if_else_chain_is_single_statement():
    func = parse_function(
        "function f(uint x) public {\n"
        "    if (x > 1) {\n"
        "        x = 1;\n"
        "    } else if (x > 0) {\n"
        "        x = 0;\n"
        "    } else {\n"
        "        x = 2;\n"
        "    }\n"
        "}\n"
    )
    assert len(func.body.children) == 1
    assert func.body.children[0].kind is NodeKind.IF_STATEMENT


def test_mapping_parameter_type_text():
    func = parse_function("function f(mapping(address => uint256) m) public {}")
    assert func.params == (("m", "mapping(address=>uint256)"),)


def test_parse_error_reports_span_and_expectation():
    with pytest.raises(ParseError) as err:
        parse_function("function f() public { uint a = ; }")
    assert err.value.span.start_line == 1


# ── invariants ───────────────────────────────────────────────────


@pytest.mark.parametrize("seed", range(40))
def test_subset_grammar_totality(seed):
    # Every generated program must parse without error.
    func = parse_function(random_function(seed))
    assert func.body.kind is NodeKind.BLOCK


@pytest.mark.parametrize("seed", range(15))
def test_determinism(seed):
    source = random_function(seed)
    assert parse_function(source) == parse_function(source)


@pytest.mark.parametrize("seed", range(15))
def test_child_spans_contained_in_parent(seed):
    func = parse_function(random_function(seed))
    stack = [func.definition]
    while stack:
        node = stack.pop()
        for child in node.children:
            assert node.span.contains(child.span), (node.kind, child.kind)
            stack.append(child)


@pytest.mark.parametrize("seed", range(15))
def test_round_trip_span_fidelity(seed):
    # Text under each node's span re-tokenizes to the node's own tokens.
    source = random_function(seed)
    func = parse_function(source)
    from clonescope.lexer import tokenize

    for node in all_nodes(func.body):
        expected = lexemes_in_span(source, node.span)
        actual = [tok.lexeme for tok in tokenize(span_text(source, node.span))]
        assert actual == expected, node.kind
