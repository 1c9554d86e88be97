"""Test support: a random program generator for the supported grammar
and span/text utilities shared across test modules.
"""

from __future__ import annotations

import random

from clonescope.lexer import tokenize
from clonescope.spans import SourceSpan

INT_TYPES = ("uint", "uint8", "uint32", "uint64", "uint128", "uint256", "int", "int128")
UNITS = ("seconds", "minutes", "hours", "days", "weeks", "ether", "wei", "finney")
CMP_OPS = ("<", ">", "<=", ">=", "==", "!=")
ARITH_OPS = ("+", "-", "*", "/", "%")
MEMBERS = ("timestamp", "number", "length", "sender", "value")


class ProgramGenerator:
    """Emits random functions that stay inside the parser's subset."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.counter = 0
        self.names: list[str] = []

    def fresh(self) -> str:
        self.counter += 1
        name = f"v{self.counter}"
        self.names.append(name)
        return name

    def name(self) -> str:
        if self.names and self.rng.random() < 0.8:
            return self.rng.choice(self.names)
        return self.fresh()

    def expression(self, depth: int = 0) -> str:
        roll = self.rng.random()
        if depth >= 2 or roll < 0.3:
            choices = [
                str(self.rng.randrange(0, 5000)),
                self.name(),
                "true",
                "false",
                f"{self.rng.randrange(1, 60)} {self.rng.choice(UNITS)}",
                f"msg.{self.rng.choice(('sender', 'value'))}",
                f"block.{self.rng.choice(('timestamp', 'number'))}",
            ]
            return self.rng.choice(choices)
        if roll < 0.45:
            op = self.rng.choice(ARITH_OPS)
            return f"{self.expression(depth + 1)} {op} {self.expression(depth + 1)}"
        if roll < 0.55:
            op = self.rng.choice(CMP_OPS)
            return f"{self.expression(depth + 1)} {op} {self.expression(depth + 1)}"
        if roll < 0.63:
            return f"({self.expression(depth + 1)} && {self.expression(depth + 1)})"
        if roll < 0.7:
            return f"!{self.expression(depth + 1)}"
        if roll < 0.78:
            t = self.rng.choice(("uint256", "uint", "int256"))
            return f"{t}({self.expression(depth + 1)})"
        if roll < 0.86:
            return f"{self.name()}[{self.expression(depth + 1)}]"
        if roll < 0.93:
            return f"{self.name()}.{self.rng.choice(MEMBERS)}"
        args = ", ".join(self.expression(depth + 1) for _ in range(self.rng.randrange(0, 3)))
        return f"{self.name()}({args})"

    def statement(self, indent: str, depth: int = 0) -> list[str]:
        roll = self.rng.random()
        if roll < 0.22:
            t = self.rng.choice(INT_TYPES)
            return [f"{indent}{t} {self.fresh()} = {self.expression()};"]
        if roll < 0.38:
            target = self.name()
            if self.rng.random() < 0.3:
                op = self.rng.choice(("+=", "-=", "*="))
                return [f"{indent}{target} {op} {self.expression()};"]
            return [f"{indent}{target} = {self.expression()};"]
        if roll < 0.5:
            return [f"{indent}require({self.expression()});"]
        if roll < 0.6 and depth < 2:
            lines = [f"{indent}if ({self.expression()}) {{"]
            lines += self.statement(indent + "    ", depth + 1)
            if self.rng.random() < 0.5:
                lines += [f"{indent}}} else {{"]
                lines += self.statement(indent + "    ", depth + 1)
            lines.append(f"{indent}}}")
            return lines
        if roll < 0.7 and depth < 2:
            i = self.fresh()
            bound = self.rng.randrange(2, 40)
            lines = [f"{indent}for (uint {i} = 0; {i} < {bound}; {i}++) {{"]
            lines += self.statement(indent + "    ", depth + 1)
            lines.append(f"{indent}}}")
            return lines
        if roll < 0.76 and depth < 2:
            v = self.name()
            lines = [f"{indent}while ({v} > {self.rng.randrange(1, 30)}) {{"]
            lines.append(f"{indent}    {v} = {v} - {self.rng.randrange(1, 9)};")
            lines.append(f"{indent}}}")
            return lines
        if roll < 0.82:
            return [f"{indent}emit Ping(msg.sender, {self.expression()});"]
        if roll < 0.86:
            return [f"{indent}revert();"]
        if roll < 0.9:
            return [f"{indent}assembly {{ let r := add(1, {self.rng.randrange(1, 99)}) }}"]
        if roll < 0.95:
            args = ", ".join(self.expression() for _ in range(self.rng.randrange(0, 3)))
            return [f"{indent}{self.name()}({args});"]
        return [f"{indent}return {self.expression()};"]

    def function(self, name: str = "fuzzed") -> str:
        self.counter = 0
        self.names = []
        params = []
        for _ in range(self.rng.randrange(0, 3)):
            params.append(f"{self.rng.choice(INT_TYPES)} {self.fresh()}")
        if self.rng.random() < 0.3:
            params.append(f"address[] {self.fresh()}")
        body: list[str] = []
        for _ in range(self.rng.randrange(1, 7)):
            body += self.statement("    ")
        body.append(f"    return {self.expression()};")
        header = f"function {name}({', '.join(params)}) public returns (uint) {{"
        return "\n".join([header, *body, "}"]) + "\n"


def random_function(seed: int) -> str:
    return ProgramGenerator(random.Random(seed)).function()


def span_text(source: str, span: SourceSpan) -> str:
    """Exact source text covered by a span (inclusive columns)."""
    lines = source.splitlines()
    if span.start_line == span.end_line:
        return lines[span.start_line - 1][span.start_col - 1:span.end_col]
    parts = [lines[span.start_line - 1][span.start_col - 1:]]
    parts.extend(lines[span.start_line:span.end_line - 1])
    parts.append(lines[span.end_line - 1][:span.end_col])
    return "\n".join(parts)


def lexemes_in_span(source: str, span: SourceSpan) -> list[str]:
    return [tok.lexeme for tok in tokenize(source) if span.contains(tok.span)]
