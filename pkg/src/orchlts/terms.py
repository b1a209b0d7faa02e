"""Abstract syntax of the activity algebra: expressions, conditions, activities.

All terms are immutable values (frozen dataclasses), so they can be shared
freely, hashed, and compared structurally.  Rendering functions produce the
canonical single-line surface syntax used by the pretty printer, transition
labels, and canonical state keys; the DSL parser accepts exactly what the
renderers emit (round-trip law).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import IntegerOverflow, UndeclaredVariable

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

# The distinguished variable a subscription condition may read: it stands
# for the current value of the subscribed resource.
RESOURCE_VALUE_VAR = "EPR"


def is_ident(s: str) -> bool:
    return bool(IDENT_RE.match(s))


# --------------------------------------------------------------------------
# Integer expressions


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - *
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, VarRef, BinOp]


# --------------------------------------------------------------------------
# Boolean conditions


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str  # one of < <= == != >= >
    left: Expr
    right: Expr


@dataclass(frozen=True)
class And:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Or:
    left: "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Not:
    operand: "Cond"


Cond = Union[BoolLit, Cmp, And, Or, Not]


# --------------------------------------------------------------------------
# Activities (one constructor per production of the algebra)


@dataclass(frozen=True)
class Throw:
    pass


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Exit:
    pass


@dataclass(frozen=True)
class Receive:
    pl: str
    op: str
    var: str


@dataclass(frozen=True)
class Invoke:
    pl: str
    op: str
    var: str


@dataclass(frozen=True)
class Reply:
    pl: str
    var: str


@dataclass(frozen=True)
class ReplyBar:
    pl: str
    var: str


@dataclass(frozen=True)
class Assign:
    expr: Expr
    var: str


@dataclass(frozen=True)
class Wait:
    timeout: int


@dataclass(frozen=True)
class Seq:
    first: "Activity"
    second: "Activity"


@dataclass(frozen=True)
class Par:
    left: "Activity"
    right: "Activity"


@dataclass(frozen=True)
class While:
    cond: Cond
    body: "Activity"


@dataclass(frozen=True)
class PickBranch:
    pl: str
    op: str
    var: str
    body: "Activity"


@dataclass(frozen=True)
class Pick:
    branches: tuple[PickBranch, ...]
    alarm: "Activity"
    timeout: int


@dataclass(frozen=True)
class CreateResource:
    epr: str
    value: int
    lifetime: int
    handler: "Activity"


@dataclass(frozen=True)
class GetProp:
    epr: str
    var: str


@dataclass(frozen=True)
class SetProp:
    epr: str
    value: int


@dataclass(frozen=True)
class SetTimeout:
    epr: str
    timeout: int


@dataclass(frozen=True)
class Subscribe:
    orch: str
    epr: str
    cond: Cond  # may only reference the resource-value symbol
    handler: "Activity"


Activity = Union[
    Throw, Empty, Exit, Receive, Invoke, Reply, ReplyBar, Assign, Wait,
    Seq, Par, While, Pick, CreateResource, GetProp, SetProp, SetTimeout,
    Subscribe,
]

EMPTY = Empty()
THROW = Throw()
EXIT = Exit()


# --------------------------------------------------------------------------
# Operation definitions (the bodies behind OPS)


@dataclass(frozen=True)
class GuardedAssign:
    guard: Cond
    target: str
    rhs: Expr


@dataclass(frozen=True)
class OpDef:
    name: str
    params: tuple[str, ...] = ()
    body: tuple[GuardedAssign, ...] = ()


@dataclass(frozen=True)
class PartnerLink:
    name: str
    sender: str
    receiver: str


# --------------------------------------------------------------------------
# Evaluation


def _check64(value: int) -> int:
    if value < INT64_MIN or value > INT64_MAX:
        raise IntegerOverflow(f"value {value} outside signed 64-bit range")
    return value


def eval_expr(expr: Expr, sigma: dict) -> int:
    """Evaluate an integer expression against a variable store."""
    if isinstance(expr, Lit):
        return _check64(expr.value)
    if isinstance(expr, VarRef):
        if expr.name not in sigma:
            raise UndeclaredVariable(expr.name)
        return sigma[expr.name]
    if isinstance(expr, BinOp):
        left = eval_expr(expr.left, sigma)
        right = eval_expr(expr.right, sigma)
        if expr.op == "+":
            return _check64(left + right)
        if expr.op == "-":
            return _check64(left - right)
        if expr.op == "*":
            return _check64(left * right)
        raise ValueError(f"bad operator {expr.op!r}")
    raise TypeError(f"not an expression: {expr!r}")


_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


def eval_cond(cond: Cond, sigma: dict) -> bool:
    """Evaluate a boolean condition against a variable store."""
    if isinstance(cond, BoolLit):
        return cond.value
    if isinstance(cond, Cmp):
        return _CMP[cond.op](eval_expr(cond.left, sigma), eval_expr(cond.right, sigma))
    if isinstance(cond, And):
        return eval_cond(cond.left, sigma) and eval_cond(cond.right, sigma)
    if isinstance(cond, Or):
        return eval_cond(cond.left, sigma) or eval_cond(cond.right, sigma)
    if isinstance(cond, Not):
        return not eval_cond(cond.operand, sigma)
    raise TypeError(f"not a condition: {cond!r}")


def eval_resource_cond(cond: Cond, value: int) -> bool:
    """Evaluate a subscription condition with the resource value bound to EPR."""
    return eval_cond(cond, {RESOURCE_VALUE_VAR: value})


def cond_vars(cond: Cond) -> set:
    """All variable names referenced by a condition."""
    out: set = set()

    def walk_expr(e: Expr):
        if isinstance(e, VarRef):
            out.add(e.name)
        elif isinstance(e, BinOp):
            walk_expr(e.left)
            walk_expr(e.right)

    def walk(c: Cond):
        if isinstance(c, Cmp):
            walk_expr(c.left)
            walk_expr(c.right)
        elif isinstance(c, (And, Or)):
            walk(c.left)
            walk(c.right)
        elif isinstance(c, Not):
            walk(c.operand)

    walk(cond)
    return out


def expr_vars(expr: Expr) -> set:
    out: set = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, VarRef):
            out.add(e.name)
        elif isinstance(e, BinOp):
            stack.append(e.left)
            stack.append(e.right)
    return out


# --------------------------------------------------------------------------
# Rendering (canonical compact surface syntax)

_EXPR_PREC = {"+": 1, "-": 1, "*": 2}


def render_expr(expr: Expr) -> str:
    def go(e: Expr, parent: int, right_child: bool) -> str:
        if isinstance(e, Lit):
            return str(e.value)
        if isinstance(e, VarRef):
            return e.name
        prec = _EXPR_PREC[e.op]
        text = go(e.left, prec, False) + e.op + go(e.right, prec, True)
        if prec < parent or (prec == parent and right_child):
            return "(" + text + ")"
        return text

    return go(expr, 0, False)


def render_cond(cond: Cond) -> str:
    # precedence: or(1) < and(2) < not(3) < atom(4)
    def go(c: Cond, parent: int, right_child: bool) -> str:
        if isinstance(c, BoolLit):
            return "true" if c.value else "false"
        if isinstance(c, Cmp):
            return f"{render_expr(c.left)} {c.op} {render_expr(c.right)}"
        if isinstance(c, Not):
            return "not (" + go(c.operand, 0, False) + ")"
        if isinstance(c, And):
            prec = 2
        else:
            prec = 1
        op = "and" if isinstance(c, And) else "or"
        text = go(c.left, prec, False) + f" {op} " + go(c.right, prec, True)
        if prec < parent or (prec == parent and right_child):
            return "(" + text + ")"
        return text

    return go(cond, 0, False)


def render_activity(act: Activity) -> str:
    """Single-line canonical form of an activity term."""
    # precedence: par(1) < seq(2) < atom(3); both operators parse
    # right-associatively, so a left-nested operand needs parentheses.
    def go(a: Activity, parent: int, right_child: bool) -> str:
        if isinstance(a, Throw):
            return "throw"
        if isinstance(a, Empty):
            return "empty"
        if isinstance(a, Exit):
            return "exit"
        if isinstance(a, Receive):
            return f"receive({a.pl},{a.op},{a.var})"
        if isinstance(a, Invoke):
            return f"invoke({a.pl},{a.op},{a.var})"
        if isinstance(a, Reply):
            return f"reply({a.pl},{a.var})"
        if isinstance(a, ReplyBar):
            return f"replybar({a.pl},{a.var})"
        if isinstance(a, Assign):
            return f"assign({render_expr(a.expr)},{a.var})"
        if isinstance(a, Wait):
            return f"wait({a.timeout})"
        if isinstance(a, While):
            return f"while({render_cond(a.cond)}) {{ {go(a.body, 0, False)} }}"
        if isinstance(a, Pick):
            parts = []
            for br in a.branches:
                parts.append(f"on({br.pl},{br.op},{br.var}) {{ {go(br.body, 0, False)} }}")
            parts.append(f"alarm({a.timeout}) {{ {go(a.alarm, 0, False)} }}")
            return "pick { " + " ".join(parts) + " }"
        if isinstance(a, CreateResource):
            return (f"createResource({a.epr},{a.value},{a.lifetime})"
                    f" {{ {go(a.handler, 0, False)} }}")
        if isinstance(a, GetProp):
            return f"getProp({a.epr},{a.var})"
        if isinstance(a, SetProp):
            return f"setProp({a.epr},{a.value})"
        if isinstance(a, SetTimeout):
            return f"setTimeout({a.epr},{a.timeout})"
        if isinstance(a, Subscribe):
            return (f"subscribe({a.orch},{a.epr},{render_cond(a.cond)})"
                    f" {{ {go(a.handler, 0, False)} }}")
        if isinstance(a, Seq):
            prec = 2
            text = go(a.first, prec + 1, False) + "; " + go(a.second, prec, True)
        elif isinstance(a, Par):
            prec = 1
            text = go(a.left, prec + 1, False) + " || " + go(a.right, prec, True)
        else:
            raise TypeError(f"not an activity: {a!r}")
        if prec < parent:
            return "(" + text + ")"
        return text

    return go(act, 0, False)
