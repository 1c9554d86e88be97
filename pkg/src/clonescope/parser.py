"""Recursive-descent parser for the supported Solidity subset.

Single-token lookahead with one bounded exception: a statement that
starts with a type keyword is re-read as an expression statement when no
declared name follows (that is how casts like ``uint256(x) * y;`` are
told apart from declarations).

The subset covers contract and function declarations, elementary types
plus mappings and arrays, declarations with initialisers, assignments
(including compound operators), ``if``/``else``, ``for``, ``while``,
``return``, ``require``-style calls, ``revert``, ``emit``, ``break``,
``continue``, member and index access, casts, literals with time/ether
units, and ``assembly`` blocks kept as opaque leaves.  Everything else
raises UnsupportedConstruct.
"""

from __future__ import annotations

from clonescope.ast_nodes import AstNode, FunctionAst, NodeKind, operator_node
from clonescope.errors import ParseError, UnsupportedConstruct
from clonescope.lexer import (
    TYPE_KEYWORDS,
    UNIT_NAMES,
    UNSUPPORTED_KEYWORDS,
    Token,
    TokenKind,
    tokenize,
)
from clonescope.spans import SourceSpan

_HEADER_KEYWORDS = frozenset({
    "public", "private", "internal", "external",
    "view", "pure", "payable", "constant",
})
_VISIBILITY_KEYWORDS = frozenset({"public", "private", "internal", "constant"})
_LOCATION_KEYWORDS = frozenset({"memory", "storage", "calldata"})

_ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%="})
_UNARY_OPS = frozenset({"!", "~", "-", "+", "++", "--"})

# Binary operator tiers, loosest first.  Each tier is left-associative.
_BINARY_TIERS: tuple[frozenset[str], ...] = (
    frozenset({"||"}),
    frozenset({"&&"}),
    frozenset({"|"}),
    frozenset({"^"}),
    frozenset({"&"}),
    frozenset({"==", "!="}),
    frozenset({"<", ">", "<=", ">="}),
    frozenset({"<<", ">>"}),
    frozenset({"+", "-"}),
    frozenset({"*", "/", "%"}),
)


class Parser:
    """Single-use parser over one source text."""

    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    # ── token access ─────────────────────────────────────────────

    def _at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def _peek(self, ahead: int = 0) -> Token | None:
        idx = self.pos + ahead
        return self.tokens[idx] if idx < len(self.tokens) else None

    def _eof_span(self) -> SourceSpan:
        if self.tokens:
            last = self.tokens[-1].span
            return SourceSpan(last.end_line, last.end_col, last.end_line, last.end_col)
        return SourceSpan(1, 1, 1, 1)

    def _current(self) -> Token:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._eof_span())
        return tok

    def _advance(self) -> Token:
        tok = self._current()
        self.pos += 1
        return tok

    def _check(self, lexeme: str) -> bool:
        tok = self._peek()
        return tok is not None and tok.lexeme == lexeme

    def _match(self, lexeme: str) -> Token | None:
        if self._check(lexeme):
            return self._advance()
        return None

    def _expect(self, lexeme: str) -> Token:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._eof_span(), expected=repr(lexeme))
        if tok.lexeme != lexeme:
            raise ParseError(f"unexpected {tok.lexeme!r}", tok.span, expected=repr(lexeme))
        return self._advance()

    def _expect_ident(self, what: str) -> Token:
        tok = self._peek()
        if tok is None:
            raise ParseError("unexpected end of input", self._eof_span(), expected=what)
        if tok.kind is not TokenKind.IDENT:
            raise ParseError(f"unexpected {tok.lexeme!r}", tok.span, expected=what)
        return self._advance()

    def _at_type_start(self) -> bool:
        tok = self._peek()
        if tok is None or tok.kind is not TokenKind.KEYWORD:
            return False
        return tok.lexeme in TYPE_KEYWORDS or tok.lexeme == "mapping"

    def _reject_unsupported(self, tok: Token, context: str) -> None:
        if tok.kind is TokenKind.KEYWORD and tok.lexeme in UNSUPPORTED_KEYWORDS:
            raise UnsupportedConstruct(f"{tok.lexeme!r} is outside the supported subset ({context})", tok.span)

    # ── top level ────────────────────────────────────────────────

    def parse_source(self) -> list[FunctionAst]:
        functions: list[FunctionAst] = []
        while not self._at_end():
            tok = self._current()
            self._reject_unsupported(tok, "top level")
            if tok.is_kw("pragma"):
                self._parse_pragma()
            elif tok.is_kw("contract"):
                functions.extend(self._parse_contract())
            elif tok.is_kw("function"):
                functions.append(self._parse_function(contract_name=""))
            else:
                raise ParseError(f"unexpected {tok.lexeme!r}", tok.span,
                                 expected="'pragma', 'contract' or 'function'")
        return functions

    def _parse_pragma(self) -> AstNode:
        start = self._expect("pragma")
        last = start
        while not self._at_end() and not self._check(";"):
            last = self._advance()
        semi = self._match(";")
        end = semi or last
        return AstNode(NodeKind.PRAGMA_DIRECTIVE, start.span.cover(end.span))

    def _parse_contract(self) -> list[FunctionAst]:
        self._expect("contract")
        name = self._expect_ident("contract name")
        tok = self._peek()
        if tok is not None and tok.is_kw("is"):
            raise UnsupportedConstruct("contract inheritance is outside the supported subset", tok.span)
        self._expect("{")
        functions: list[FunctionAst] = []
        while not self._check("}"):
            tok = self._current()
            self._reject_unsupported(tok, f"contract {name.lexeme}")
            if tok.is_kw("function"):
                functions.append(self._parse_function(contract_name=name.lexeme))
            elif tok.is_kw("event"):
                self._parse_event()
            elif self._at_type_start():
                self._parse_state_variable()
            else:
                raise ParseError(f"unexpected {tok.lexeme!r} in contract body", tok.span,
                                 expected="function, event or state variable")
        self._expect("}")
        return functions

    def _parse_event(self) -> AstNode:
        start = self._expect("event")
        self._expect_ident("event name")
        self._expect("(")
        while not self._check(")"):
            self._parse_type()
            # `indexed` marker and the parameter name are both plain idents
            while self._peek() is not None and self._peek().kind is TokenKind.IDENT:
                self._advance()
            if not self._match(","):
                break
        self._expect(")")
        end = self._expect(";")
        return AstNode(NodeKind.EVENT_DEFINITION, start.span.cover(end.span))

    def _parse_state_variable(self) -> AstNode:
        start = self._current()
        type_node = self._parse_type()
        while True:
            tok = self._peek()
            if tok is not None and tok.kind is TokenKind.KEYWORD and tok.lexeme in _VISIBILITY_KEYWORDS:
                self._advance()
            else:
                break
        name = self._expect_ident("state variable name")
        children: list[AstNode] = [type_node, AstNode(NodeKind.IDENTIFIER, name.span, name.lexeme)]
        if self._match("="):
            children.append(self._parse_expression())
        end = self._expect(";")
        return AstNode(NodeKind.STATE_VARIABLE_DECLARATION, start.span.cover(end.span),
                       name.lexeme, tuple(children))

    # ── functions ────────────────────────────────────────────────

    def _parse_function(self, contract_name: str) -> FunctionAst:
        start = self._expect("function")
        name = self._expect_ident("function name")

        params, param_list_node = self._parse_parameter_list(NodeKind.PARAMETER_LIST)

        returns_node: AstNode | None = None
        while True:
            tok = self._peek()
            if tok is None:
                raise ParseError("unexpected end of input in function header", self._eof_span())
            if tok.kind is TokenKind.KEYWORD and tok.lexeme in _HEADER_KEYWORDS:
                self._advance()
                continue
            if tok.is_kw("returns"):
                self._advance()
                _, returns_node = self._parse_parameter_list(NodeKind.RETURN_PARAMETER_LIST)
                continue
            if tok.lexeme == "{":
                break
            if tok.kind is TokenKind.IDENT:
                raise UnsupportedConstruct(
                    f"modifier invocation {tok.lexeme!r} is outside the supported subset", tok.span)
            raise ParseError(f"unexpected {tok.lexeme!r} in function header", tok.span, expected="'{'")

        body = self._parse_block()

        span = start.span.cover(body.span)
        children: list[AstNode] = [param_list_node]
        if returns_node is not None:
            children.append(returns_node)
        children.append(body)
        definition = AstNode(NodeKind.FUNCTION_DEFINITION, span, name.lexeme, tuple(children))
        return FunctionAst(
            name=name.lexeme,
            params=tuple(params),
            body=body,
            source=self.source,
            contract_name=contract_name,
            span=span,
            definition=definition,
        )

    def _parse_parameter_list(self, kind: NodeKind) -> tuple[list[tuple[str, str]], AstNode]:
        open_tok = self._expect("(")
        params: list[tuple[str, str]] = []
        nodes: list[AstNode] = []
        while not self._check(")"):
            type_node, type_text = self._parse_type_with_text()
            while True:
                tok = self._peek()
                if tok is not None and tok.kind is TokenKind.KEYWORD and tok.lexeme in _LOCATION_KEYWORDS:
                    self._advance()
                else:
                    break
            name_tok = self._peek()
            if name_tok is not None and name_tok.kind is TokenKind.IDENT:
                self._advance()
                pname = name_tok.lexeme
                pspan = type_node.span.cover(name_tok.span)
            else:
                pname = ""
                pspan = type_node.span
            params.append((pname, type_text))
            nodes.append(AstNode(NodeKind.PARAMETER, pspan, pname or None, (type_node,)))
            if not self._match(","):
                break
        close_tok = self._expect(")")
        list_node = AstNode(kind, open_tok.span.cover(close_tok.span), None, tuple(nodes))
        return params, list_node

    # ── types ────────────────────────────────────────────────────

    def _parse_type(self) -> AstNode:
        node, _ = self._parse_type_with_text()
        return node

    def _parse_type_with_text(self) -> tuple[AstNode, str]:
        tok = self._current()
        if tok.is_kw("mapping"):
            start = self._advance()
            self._expect("(")
            key_node, key_text = self._parse_type_with_text()
            self._expect("=>")
            value_node, value_text = self._parse_type_with_text()
            close = self._expect(")")
            node = AstNode(NodeKind.MAPPING_TYPE, start.span.cover(close.span),
                           None, (key_node, value_node))
            text = f"mapping({key_text}=>{value_text})"
        elif tok.kind is TokenKind.KEYWORD and tok.lexeme in TYPE_KEYWORDS:
            self._advance()
            node = AstNode(NodeKind.ELEMENTARY_TYPE, tok.span, tok.lexeme)
            text = tok.lexeme
        else:
            raise ParseError(f"unexpected {tok.lexeme!r}", tok.span, expected="type name")

        while self._check("["):
            self._advance()
            children: list[AstNode] = [node]
            if not self._check("]"):
                children.append(self._parse_expression())
            close = self._expect("]")
            node = AstNode(NodeKind.ARRAY_TYPE, node.span.cover(close.span), None, tuple(children))
            text += "[]"
        return node, text

    # ── statements ───────────────────────────────────────────────

    def _parse_block(self) -> AstNode:
        open_tok = self._expect("{")
        statements: list[AstNode] = []
        while not self._check("}"):
            if self._at_end():
                raise ParseError("unterminated block", open_tok.span, expected="'}'")
            statements.append(self._parse_statement())
        close_tok = self._expect("}")
        return AstNode(NodeKind.BLOCK, open_tok.span.cover(close_tok.span), None, tuple(statements))

    def _parse_statement(self) -> AstNode:
        tok = self._current()
        self._reject_unsupported(tok, "statement")

        if tok.is_kw("if"):
            return self._parse_if()
        if tok.is_kw("for"):
            return self._parse_for()
        if tok.is_kw("while"):
            return self._parse_while()
        if tok.is_kw("return"):
            return self._parse_return()
        if tok.is_kw("emit"):
            return self._parse_emit()
        if tok.is_kw("revert"):
            return self._parse_revert()
        if tok.is_kw("assembly"):
            return self._parse_assembly()
        if tok.is_kw("break"):
            start = self._advance()
            end = self._expect(";")
            return AstNode(NodeKind.BREAK_STATEMENT, start.span.cover(end.span))
        if tok.is_kw("continue"):
            start = self._advance()
            end = self._expect(";")
            return AstNode(NodeKind.CONTINUE_STATEMENT, start.span.cover(end.span))

        if self._at_type_start():
            # Could be a declaration or a cast expression; decide by
            # whether a name follows the type.
            saved = self.pos
            try:
                self._parse_type()
                after_type = self._peek()
                is_decl = after_type is not None and after_type.kind is TokenKind.IDENT
            except ParseError:
                is_decl = False
            self.pos = saved
            if is_decl:
                return self._parse_variable_definition(consume_semicolon=True)

        expr = self._parse_expression()
        self._expect(";")
        return expr

    def _parse_variable_definition(self, consume_semicolon: bool) -> AstNode:
        start = self._current()
        type_node = self._parse_type()
        while True:
            tok = self._peek()
            if tok is not None and tok.kind is TokenKind.KEYWORD and tok.lexeme in _LOCATION_KEYWORDS:
                self._advance()
            else:
                break
        name = self._expect_ident("variable name")
        children: list[AstNode] = [type_node, AstNode(NodeKind.IDENTIFIER, name.span, name.lexeme)]
        end_span = name.span
        if self._match("="):
            init = self._parse_expression()
            children.append(init)
            end_span = init.span
        if consume_semicolon:
            end_span = self._expect(";").span
        return AstNode(NodeKind.VARIABLE_DEFINITION_STATEMENT, start.span.cover(end_span),
                       None, tuple(children))

    def _parse_if(self) -> AstNode:
        start = self._expect("if")
        self._expect("(")
        cond = self._parse_expression()
        self._expect(")")
        then_branch = self._parse_statement_or_block()
        children = [cond, then_branch]
        end_span = then_branch.span
        if self._peek() is not None and self._peek().is_kw("else"):
            self._advance()
            else_branch = self._parse_statement_or_block()
            children.append(else_branch)
            end_span = else_branch.span
        return AstNode(NodeKind.IF_STATEMENT, start.span.cover(end_span), None, tuple(children))

    def _parse_statement_or_block(self) -> AstNode:
        if self._check("{"):
            return self._parse_block()
        return self._parse_statement()

    def _parse_for(self) -> AstNode:
        start = self._expect("for")
        self._expect("(")
        children: list[AstNode] = []
        if not self._match(";"):
            if self._at_type_start():
                children.append(self._parse_variable_definition(consume_semicolon=True))
            else:
                children.append(self._parse_expression())
                self._expect(";")
        if not self._check(";"):
            children.append(self._parse_expression())
        self._expect(";")
        if not self._check(")"):
            children.append(self._parse_expression())
        self._expect(")")
        body = self._parse_statement_or_block()
        children.append(body)
        return AstNode(NodeKind.FOR_STATEMENT, start.span.cover(body.span), None, tuple(children))

    def _parse_while(self) -> AstNode:
        start = self._expect("while")
        self._expect("(")
        cond = self._parse_expression()
        self._expect(")")
        body = self._parse_statement_or_block()
        return AstNode(NodeKind.WHILE_STATEMENT, start.span.cover(body.span), None, (cond, body))

    def _parse_return(self) -> AstNode:
        start = self._expect("return")
        children: tuple[AstNode, ...] = ()
        if not self._check(";"):
            children = (self._parse_expression(),)
        end = self._expect(";")
        return AstNode(NodeKind.RETURN_STATEMENT, start.span.cover(end.span), None, children)

    def _parse_emit(self) -> AstNode:
        start = self._expect("emit")
        call = self._parse_expression()
        if call.kind is not NodeKind.CALL:
            raise ParseError("emit expects an event call", call.span, expected="call")
        end = self._expect(";")
        return AstNode(NodeKind.EMIT_STATEMENT, start.span.cover(end.span), None, (call,))

    def _parse_revert(self) -> AstNode:
        start = self._expect("revert")
        children: tuple[AstNode, ...] = ()
        if self._check("("):
            open_tok = self._advance()
            args: list[AstNode] = []
            while not self._check(")"):
                args.append(self._parse_expression())
                if not self._match(","):
                    break
            close_tok = self._expect(")")
            children = (AstNode(NodeKind.ARGUMENT_LIST, open_tok.span.cover(close_tok.span),
                                None, tuple(args)),)
        end = self._expect(";")
        return AstNode(NodeKind.REVERT_STATEMENT, start.span.cover(end.span), None, children)

    def _parse_assembly(self) -> AstNode:
        # Opaque leaf: consume the balanced brace region without building
        # any internal structure.
        start = self._expect("assembly")
        self._expect("{")
        depth = 1
        end = start
        while depth > 0:
            if self._at_end():
                raise ParseError("unterminated assembly block", start.span, expected="'}'")
            tok = self._advance()
            if tok.lexeme == "{":
                depth += 1
            elif tok.lexeme == "}":
                depth -= 1
            end = tok
        return AstNode(NodeKind.ASSEMBLY_BLOCK, start.span.cover(end.span))

    # ── expressions ──────────────────────────────────────────────

    def _parse_expression(self) -> AstNode:
        return self._parse_assignment()

    def _parse_assignment(self) -> AstNode:
        target = self._parse_conditional()
        tok = self._peek()
        if tok is not None and tok.kind is TokenKind.OP and tok.lexeme in _ASSIGN_OPS:
            op = self._advance()
            value = self._parse_assignment()  # right-associative
            children: list[AstNode] = [target]
            if op.lexeme != "=":
                children.append(operator_node(op.lexeme[:-1], op.span))
            children.append(value)
            return AstNode(NodeKind.ASSIGNMENT, target.span.cover(value.span),
                           op.lexeme, tuple(children))
        return target

    def _parse_conditional(self) -> AstNode:
        cond = self._parse_binary(0)
        if self._check("?"):
            self._advance()
            then_expr = self._parse_expression()
            self._expect(":")
            else_expr = self._parse_expression()
            return AstNode(NodeKind.CONDITIONAL_EXPRESSION, cond.span.cover(else_expr.span),
                           None, (cond, then_expr, else_expr))
        return cond

    def _parse_binary(self, tier: int) -> AstNode:
        if tier >= len(_BINARY_TIERS):
            return self._parse_power()
        left = self._parse_binary(tier + 1)
        ops = _BINARY_TIERS[tier]
        while True:
            tok = self._peek()
            if tok is None or tok.kind is not TokenKind.OP or tok.lexeme not in ops:
                return left
            op = self._advance()
            right = self._parse_binary(tier + 1)
            left = AstNode(NodeKind.BINARY_OPERATION, left.span.cover(right.span), op.lexeme,
                           (left, operator_node(op.lexeme, op.span), right))

    def _parse_power(self) -> AstNode:
        base = self._parse_unary()
        if self._check("**"):
            op = self._advance()
            exponent = self._parse_power()  # right-associative
            return AstNode(NodeKind.BINARY_OPERATION, base.span.cover(exponent.span), op.lexeme,
                           (base, operator_node(op.lexeme, op.span), exponent))
        return base

    def _parse_unary(self) -> AstNode:
        tok = self._peek()
        if tok is not None and tok.kind is TokenKind.OP and tok.lexeme in _UNARY_OPS:
            op = self._advance()
            operand = self._parse_unary()
            return AstNode(NodeKind.UNARY_OPERATION, op.span.cover(operand.span), op.lexeme,
                           (operator_node(op.lexeme, op.span), operand))
        return self._parse_postfix()

    def _parse_postfix(self) -> AstNode:
        node = self._parse_primary()
        while True:
            tok = self._peek()
            if tok is None:
                break
            if tok.lexeme == "(":
                node = self._finish_call(node)
            elif tok.lexeme == "[":
                self._advance()
                index = self._parse_expression()
                close = self._expect("]")
                node = AstNode(NodeKind.INDEX_ACCESS, node.span.cover(close.span),
                               None, (node, index))
            elif tok.lexeme == ".":
                self._advance()
                member = self._expect_ident("member name")
                node = AstNode(NodeKind.MEMBER_ACCESS, node.span.cover(member.span),
                               member.lexeme, (node,))
            elif tok.kind is TokenKind.OP and tok.lexeme in ("++", "--"):
                op = self._advance()
                node = AstNode(NodeKind.UNARY_OPERATION, node.span.cover(op.span), op.lexeme,
                               (node, operator_node(op.lexeme, op.span)))
            else:
                break
        if node.kind is NodeKind.ELEMENTARY_TYPE:
            raise ParseError("type name is not an expression", node.span, expected="cast or declaration")
        return node

    def _finish_call(self, callee: AstNode) -> AstNode:
        open_tok = self._expect("(")
        args: list[AstNode] = []
        while not self._check(")"):
            args.append(self._parse_expression())
            if not self._match(","):
                break
        close_tok = self._expect(")")
        if callee.kind is NodeKind.ELEMENTARY_TYPE:
            if len(args) != 1:
                raise ParseError("cast takes exactly one argument",
                                 callee.span.cover(close_tok.span), expected="one argument")
            return AstNode(NodeKind.TYPE_CAST, callee.span.cover(close_tok.span),
                           None, (callee, args[0]))
        arg_list = AstNode(NodeKind.ARGUMENT_LIST, open_tok.span.cover(close_tok.span),
                           None, tuple(args))
        return AstNode(NodeKind.CALL, callee.span.cover(close_tok.span), None, (callee, arg_list))

    def _parse_primary(self) -> AstNode:
        tok = self._current()

        if tok.lexeme == "(":
            self._advance()
            inner = self._parse_expression()
            self._expect(")")
            return inner

        if tok.kind is TokenKind.IDENT:
            self._advance()
            return AstNode(NodeKind.IDENTIFIER, tok.span, tok.lexeme)

        if tok.kind is TokenKind.NUMBER:
            self._advance()
            if tok.lexeme[:2].lower() == "0x":
                return AstNode(NodeKind.HEX_LITERAL, tok.span, tok.lexeme)
            number = AstNode(NodeKind.NUMBER_LITERAL, tok.span, tok.lexeme)
            unit_tok = self._peek()
            if (unit_tok is not None and unit_tok.kind is TokenKind.IDENT
                    and unit_tok.lexeme in UNIT_NAMES):
                self._advance()
                unit = AstNode(NodeKind.UNIT, unit_tok.span, unit_tok.lexeme)
                return AstNode(NodeKind.UNIT_EXPRESSION, tok.span.cover(unit_tok.span),
                               None, (number, unit))
            return number

        if tok.kind is TokenKind.STRING:
            self._advance()
            return AstNode(NodeKind.STRING_LITERAL, tok.span, tok.lexeme)

        if tok.is_kw("true") or tok.is_kw("false"):
            self._advance()
            return AstNode(NodeKind.BOOL_LITERAL, tok.span, tok.lexeme)

        if tok.kind is TokenKind.KEYWORD and tok.lexeme in TYPE_KEYWORDS:
            self._advance()
            return AstNode(NodeKind.ELEMENTARY_TYPE, tok.span, tok.lexeme)

        self._reject_unsupported(tok, "expression")
        raise ParseError(f"unexpected {tok.lexeme!r}", tok.span, expected="expression")


# ── public entry points ──────────────────────────────────────────


def parse_contract(source: str) -> list[FunctionAst]:
    """Parse one contract file and return its functions in source order."""
    return Parser(source).parse_source()


def parse_function(source: str) -> FunctionAst:
    """Parse source containing exactly one function definition.

    The function may be bare or wrapped in a single contract.
    """
    functions = parse_contract(source)
    if len(functions) != 1:
        span = SourceSpan(1, 1, 1, 1)
        raise ParseError(f"expected exactly one function, found {len(functions)}", span,
                         expected="one function definition")
    return functions[0]
