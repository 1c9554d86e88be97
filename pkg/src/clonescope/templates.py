"""Built-in template functions for the synthetic acceptance corpus.

Each template is a standalone Solidity function assembled from a pool of
statement patterns.  Templates drawn from the pool share few patterns,
and shared patterns are instantiated with different types, operators and
constants, so cross-template pairs are dependably dissimilar while
transform pairs stay dependably similar.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from clonescope.parser import parse_function
from clonescope.statements import decompose

_INT_TYPES = ("uint", "uint32", "uint64", "uint128", "uint256", "int", "int128", "int256")
_CMP_OPS = (">", ">=", "<", "<=")
_UNITS = ("seconds", "minutes", "hours", "days", "weeks", "ether", "finney", "wei")
_BLOCK_MEMBERS = ("timestamp", "number", "gaslimit", "difficulty")
_LEDGERS = ("balances", "ledger", "holdings", "stakes", "credits", "deposits")
_EVENTS = ("Transfer", "Payout", "Locked", "Claimed", "Burned", "Minted",
           "Released", "Staked", "Voted", "Settled", "Swept", "Charged")
_ASM_OPS = ("add", "mul", "sub", "div", "and", "or", "xor", "mod")


@dataclass
class _Ctx:
    """Per-template instantiation knobs and name bookkeeping."""

    rng: random.Random
    int_type: str = "uint"
    ledger: str = "balances"
    event: str = "Transfer"
    params: list[tuple[str, str]] = field(default_factory=list)  # (type, name)
    locals_used: list[str] = field(default_factory=list)
    _counter: int = 0

    def const(self, low: int = 1, high: int = 9999) -> int:
        return self.rng.randrange(low, high)

    def cmp(self) -> str:
        return self.rng.choice(_CMP_OPS)

    def fresh(self, base: str) -> str:
        self._counter += 1
        name = f"{base}{self._counter}"
        self.locals_used.append(name)
        return name

    def latest(self, fallback: str) -> str:
        return self.locals_used[-1] if self.locals_used else fallback

    def need_param(self, type_text: str, name: str) -> str:
        for ptype, pname in self.params:
            if pname == name:
                return name
        self.params.append((type_text, name))
        return name

    def amount(self) -> str:
        return self.need_param(self.int_type, "amount")

    def array(self) -> str:
        return self.need_param("address[]", "targets")

    def account(self) -> str:
        return self.need_param("address", "account")


# ── statement patterns ───────────────────────────────────────────
# Each returns one or more already-indented body lines.


def _p_decl_length(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("count")
    return [f"uint {name} = {ctx.array()}.length;"]


def _p_decl_cast_mul(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("total")
    source = ctx.latest(ctx.amount())
    return [f"{ctx.int_type} {name} = {ctx.int_type}({source}) * {ctx.amount()};"]


def _p_decl_add_const(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("base")
    return [f"{ctx.int_type} {name} = {ctx.amount()} + {ctx.const()};"]


def _p_decl_unit(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("window")
    unit = ctx.rng.choice(_UNITS)
    return [f"uint {name} = {ctx.const(1, 400)} {unit};"]


def _p_decl_block_member(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("mark")
    member = ctx.rng.choice(_BLOCK_MEMBERS)
    return [f"uint {name} = block.{member};"]


def _p_decl_msg_value(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("paid")
    op = ctx.rng.choice(("+", "-", "*"))
    return [f"uint {name} = msg.value {op} {ctx.const()};"]


def _p_decl_div(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("share")
    return [f"{ctx.int_type} {name} = {ctx.amount()} / {ctx.const(2, 97)};"]


def _p_decl_mod(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("rem")
    return [f"uint {name} = {ctx.amount()} % {ctx.const(2, 127)};"]


def _p_require_cmp(ctx: _Ctx) -> list[str]:
    return [f"require({ctx.amount()} {ctx.cmp()} {ctx.const()});"]


def _p_require_range(ctx: _Ctx) -> list[str]:
    low = ctx.const(1, 50)
    high = ctx.const(60, 500)
    return [f"require({ctx.amount()} > {low} && {ctx.amount()} <= {high});"]


def _p_require_ledger(ctx: _Ctx) -> list[str]:
    return [f"require({ctx.ledger}[msg.sender] >= {ctx.amount()});"]


def _p_require_neq(ctx: _Ctx) -> list[str]:
    return [f"require({ctx.amount()} != {ctx.const()});"]


def _p_assign_ledger_sub(ctx: _Ctx) -> list[str]:
    return [f"{ctx.ledger}[msg.sender] = {ctx.ledger}[msg.sender] - {ctx.amount()};"]


def _p_assign_ledger_add(ctx: _Ctx) -> list[str]:
    acct = ctx.account()
    return [f"{ctx.ledger}[{acct}] = {ctx.ledger}[{acct}] + {ctx.amount()};"]


def _p_assign_compound(ctx: _Ctx) -> list[str]:
    target = ctx.latest(ctx.amount())
    op = ctx.rng.choice(("+=", "-=", "*="))
    return [f"{target} {op} {ctx.const()};"]


def _p_assign_scale(ctx: _Ctx) -> list[str]:
    target = ctx.latest(ctx.amount())
    return [f"{target} = {target} * {ctx.const(2, 40)} / {ctx.const(41, 200)};"]


def _p_assign_shift(ctx: _Ctx) -> list[str]:
    target = ctx.latest(ctx.amount())
    op = ctx.rng.choice(("<<", ">>"))
    return [f"{target} = {target} {op} {ctx.const(1, 8)};"]


def _p_for_transfer(ctx: _Ctx) -> list[str]:
    arr = ctx.array()
    bound = ctx.latest(ctx.amount())
    i = ctx.fresh("i")
    ctx.locals_used.pop()  # loop counter is not a reusable local
    return [
        f"for (uint {i} = 0; {i} < {bound}; {i}++) {{",
        f"    {ctx.ledger}[{arr}[{i}]] = {ctx.ledger}[{arr}[{i}]] + {ctx.amount()};",
        "}",
    ]


def _p_for_count(ctx: _Ctx) -> list[str]:
    acc = ctx.fresh("acc")
    i = ctx.fresh("k")
    ctx.locals_used.pop()
    return [
        f"uint {acc} = {ctx.const(0, 5)};",
        f"for (uint {i} = 0; {i} < {ctx.const(3, 64)}; {i}++) {{",
        f"    {acc} = {acc} + {i};",
        "}",
    ]


def _p_while_drain(ctx: _Ctx) -> list[str]:
    v = ctx.fresh("left")
    return [
        f"uint {v} = {ctx.amount()};",
        f"while ({v} > {ctx.const(1, 60)}) {{",
        f"    {v} = {v} - {ctx.const(1, 9)};",
        "}",
    ]


def _p_if_revert(ctx: _Ctx) -> list[str]:
    return [f"if ({ctx.amount()} {ctx.cmp()} {ctx.const()}) revert();"]


def _p_if_else_assign(ctx: _Ctx) -> list[str]:
    v = ctx.fresh("delta")
    pivot = ctx.const()
    return [
        f"uint {v} = 0;",
        f"if ({ctx.amount()} >= {pivot}) {{",
        f"    {v} = {ctx.amount()} - {pivot};",
        "} else {",
        f"    {v} = {pivot} - {ctx.amount()};",
        "}",
    ]


def _p_call_transfer(ctx: _Ctx) -> list[str]:
    return [f"{ctx.account()}.transfer({ctx.amount()});"]


def _p_call_checkpoint(ctx: _Ctx) -> list[str]:
    return [f"checkpoint({ctx.amount()}, {ctx.const()});"]


def _p_decl_hash(ctx: _Ctx) -> list[str]:
    name = ctx.fresh("digest")
    return [f"uint256 {name} = uint256(sha3({ctx.amount()}));"]


def _p_emit(ctx: _Ctx) -> list[str]:
    return [f"emit {ctx.event}(msg.sender, {ctx.latest(ctx.amount())});"]


def _p_assembly(ctx: _Ctx) -> list[str]:
    op = ctx.rng.choice(_ASM_OPS)
    return [f"assembly {{ let r := {op}({ctx.const(1, 9)}, {ctx.const(10, 99)}) }}"]


def _p_increment(ctx: _Ctx) -> list[str]:
    return [f"{ctx.latest(ctx.amount())}++;"]


# Pool entries: (builder, compatible-with-int-types).  Patterns touching
# the ledger or msg.value stay unsigned to keep the sources plausible.
_PATTERN_POOL = (
    _p_decl_length,
    _p_decl_cast_mul,
    _p_decl_add_const,
    _p_decl_unit,
    _p_decl_block_member,
    _p_decl_msg_value,
    _p_decl_div,
    _p_decl_mod,
    _p_require_cmp,
    _p_require_range,
    _p_require_ledger,
    _p_require_neq,
    _p_assign_ledger_sub,
    _p_assign_ledger_add,
    _p_assign_compound,
    _p_assign_scale,
    _p_assign_shift,
    _p_for_transfer,
    _p_for_count,
    _p_while_drain,
    _p_if_revert,
    _p_if_else_assign,
    _p_call_transfer,
    _p_call_checkpoint,
    _p_decl_hash,
    _p_emit,
    _p_assembly,
    _p_increment,
)

_RETURNS = ("return true;", "return false;")

_NAME_WORDS = (
    "batch", "sweep", "lock", "claim", "burn", "mint", "vote", "stake",
    "drain", "settle", "charge", "rebase", "fund", "route", "audit",
    "bridge", "wrap", "slash", "pledge", "refund", "tally", "escrow",
    "ration", "meter", "gather",
)


def build_template(index: int, seed: int = 0) -> tuple[str, str]:
    """One deterministic template function; returns (name, source)."""
    rng = random.Random(f"{seed}:template:{index}")
    ctx = _Ctx(
        rng=rng,
        int_type=rng.choice(_INT_TYPES),
        ledger=rng.choice(_LEDGERS),
        event=rng.choice(_EVENTS),
    )

    word = _NAME_WORDS[index % len(_NAME_WORDS)]
    name = f"{word}Handler{index}"

    n_patterns = rng.randrange(5, 8)
    patterns = rng.sample(list(_PATTERN_POOL), n_patterns)

    body_lines: list[str] = []
    for pattern in patterns:
        body_lines.extend(pattern(ctx))
    if rng.random() < 0.5:
        body_lines.extend(_p_emit(ctx))
    if ctx.latest("") and rng.random() < 0.5:
        body_lines.append(f"return {ctx.latest('')};")
    else:
        body_lines.append(rng.choice(_RETURNS))

    if not ctx.params:
        ctx.params.append((ctx.int_type, "amount"))
    params = ", ".join(f"{ptype} {pname}" for ptype, pname in ctx.params)

    source_lines = [f"function {name}({params}) public returns (uint) {{"]
    source_lines.extend("    " + line for line in body_lines)
    source_lines.append("}")
    source = "\n".join(source_lines) + "\n"

    func = parse_function(source)  # generator bug guard: must stay in-subset
    trees = decompose(func)
    if len(trees) < 4:
        raise AssertionError(f"template {name} decomposes to only {len(trees)} trees")
    return name, source


def make_demo_templates(count: int = 50, seed: int = 0) -> list[tuple[str, str]]:
    """Deterministic family of distinct template functions."""
    return [build_template(i, seed) for i in range(count)]
