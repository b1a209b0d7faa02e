"""Textual model format: parser, validator, and canonical pretty printer.

A model file declares one choreography: operation bodies, partnerlinks,
orchestrators (variables, fault handler, declared event handlers, main
activity) and an optional config block.  Activities are written exactly as
the algebra renders them, so parse(print_model(def)) reproduces def.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .choreography import ChoreographyDef, Config
from .errors import ParseError
from .orchestration import OrchestratorDef
from .terms import (EMPTY, RESOURCE_VALUE_VAR, Activity, And, Assign, BinOp,
                    BoolLit, Cmp, Cond, CreateResource, Empty, Exit, Expr,
                    GetProp, GuardedAssign, Invoke, Lit, Not, OpDef, Or, Par,
                    PartnerLink, Pick, PickBranch, Receive, Reply, ReplyBar,
                    Seq, SetProp, SetTimeout, Subscribe, Throw, VarRef, Wait,
                    While, render_activity, render_cond, render_expr)

_SYMBOLS = ("||", "->", ":=", "==", "!=", "<=", ">=",
            "{", "}", "(", ")", ";", ",", "=", "<", ">", "+", "-", "*")

_ACTIVITY_KEYWORDS = {
    "assign", "receive", "invoke", "reply", "replybar", "wait", "empty",
    "exit", "throw", "while", "pick", "createResource", "getProp", "setProp",
    "setTimeout", "subscribe",
}

_SECTION_KEYWORDS = {"vars", "fault", "handlers", "main", "op", "partnerlink",
                     "orchestrator", "config", "choreography", "on", "alarm"}


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | INT | SYM | EOF
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # error | warning
    message: str
    line: int = 0
    col: int = 0

    def __str__(self):
        where = f"{self.line}:{self.col}: " if self.line else ""
        return f"{where}{self.severity}: {self.message}"


@dataclass
class SourceModel:
    path: str
    text: str
    model: Optional[ChoreographyDef]
    diagnostics: list[Diagnostic] = field(default_factory=list)


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("SYM", sym, line, col))
                col += len(sym)
                i += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0
        self.marks: list[tuple] = []  # (kind, payload, line, col)
        self.cur_orch: Optional[str] = None
        self.in_rcond = False

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.col)

    def expect_sym(self, sym: str) -> Token:
        tok = self.next()
        if tok.kind != "SYM" or tok.text != sym:
            self.error(f"expected {sym!r}, found {tok.text!r}", tok)
        return tok

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.next()
        if tok.kind != "IDENT":
            self.error(f"expected {what}, found {tok.text!r}", tok)
        return tok

    def expect_keyword(self, kw: str) -> Token:
        tok = self.next()
        if tok.kind != "IDENT" or tok.text != kw:
            self.error(f"expected {kw!r}, found {tok.text!r}", tok)
        return tok

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYM" and tok.text == sym

    def at_ident(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "IDENT" and tok.text == word

    def eat_sym(self, sym: str) -> bool:
        if self.at_sym(sym):
            self.pos += 1
            return True
        return False

    def mark(self, kind: str, payload, tok: Token):
        self.marks.append((kind, payload, tok.line, tok.col))

    def expect_int(self) -> tuple[int, Token]:
        neg = False
        start = self.peek()
        if self.at_sym("-"):
            self.next()
            neg = True
        tok = self.next()
        if tok.kind != "INT":
            self.error(f"expected integer, found {tok.text!r}", tok)
        value = int(tok.text)
        return (-value if neg else value), start

    # -- model structure ---------------------------------------------------

    def parse_model(self) -> ChoreographyDef:
        self.expect_keyword("choreography")
        name = self.expect_ident("choreography name").text
        self.expect_sym("{")
        ops: dict[str, OpDef] = {}
        pls: dict[str, PartnerLink] = {}
        orchs: list[OrchestratorDef] = []
        config = Config()
        while not self.at_sym("}"):
            tok = self.peek()
            if self.at_ident("op"):
                op = self.parse_opdef()
                if op.name in ops:
                    self.error(f"duplicate operation {op.name!r}", tok)
                ops[op.name] = op
            elif self.at_ident("partnerlink"):
                pl = self.parse_partnerlink()
                if pl.name in pls:
                    self.error(f"duplicate partnerlink {pl.name!r}", tok)
                pls[pl.name] = pl
            elif self.at_ident("orchestrator"):
                orchs.append(self.parse_orchestrator())
            elif self.at_ident("config"):
                config = self.parse_config()
            else:
                self.error(f"expected a declaration, found {tok.text!r}", tok)
        self.expect_sym("}")
        if self.peek().kind != "EOF":
            self.error("trailing content after choreography")
        if not orchs:
            self.error("a choreography needs at least one orchestrator")
        return ChoreographyDef(name, tuple(orchs), pls, ops, config)

    def parse_opdef(self) -> OpDef:
        self.expect_keyword("op")
        name = self.expect_ident("operation name").text
        self.expect_sym("(")
        params = []
        if not self.at_sym(")"):
            params.append(self.expect_ident("parameter").text)
            while self.eat_sym(","):
                params.append(self.expect_ident("parameter").text)
        self.expect_sym(")")
        self.expect_sym("{")
        body = []
        while self.at_ident("if"):
            self.next()
            guard = self.parse_cond()
            self.expect_keyword("then")
            target = self.expect_ident("assignment target").text
            self.expect_sym(":=")
            rhs = self.parse_expr()
            self.expect_sym(";")
            body.append(GuardedAssign(guard, target, rhs))
        self.expect_sym("}")
        return OpDef(name, tuple(params), tuple(body))

    def parse_partnerlink(self) -> PartnerLink:
        self.expect_keyword("partnerlink")
        name_tok = self.expect_ident("partnerlink name")
        self.expect_sym("=")
        self.expect_sym("(")
        sender = self.expect_ident("sender").text
        self.expect_sym("->")
        receiver = self.expect_ident("receiver").text
        self.expect_sym(")")
        self.expect_sym(";")
        self.mark("pl-decl", (name_tok.text, sender, receiver), name_tok)
        return PartnerLink(name_tok.text, sender, receiver)

    def parse_orchestrator(self) -> OrchestratorDef:
        self.expect_keyword("orchestrator")
        id_tok = self.expect_ident("orchestrator id")
        self.mark("orch-decl", id_tok.text, id_tok)
        self.cur_orch = id_tok.text
        self.expect_sym("{")
        variables: list[tuple[str, int]] = []
        fault: Activity = EMPTY
        handlers: list[tuple[Activity, bool]] = []
        if self.at_ident("vars"):
            self.next()
            while True:
                var_tok = self.expect_ident("variable name")
                self.expect_sym("=")
                init, _ = self.expect_int()
                if any(v == var_tok.text for v, _ in variables):
                    self.error(f"duplicate variable {var_tok.text!r}", var_tok)
                self.mark("var-decl", (self.cur_orch, var_tok.text), var_tok)
                variables.append((var_tok.text, init))
                if not self.eat_sym(","):
                    break
            self.expect_sym(";")
        if self.at_ident("fault"):
            self.next()
            fault = self.parse_activity()
            self.expect_sym(";")
        if self.at_ident("handlers"):
            self.next()
            while True:
                at_start = False
                if (self.at_ident("at") and self.peek(1).text == "-"
                        and self.peek(2).text == "start"):
                    self.pos += 3
                    at_start = True
                handlers.append((self.parse_activity(), at_start))
                if not self.eat_sym(","):
                    break
            self.expect_sym(";")
        self.expect_keyword("main")
        self.expect_sym("=")
        main = self.parse_activity()
        self.expect_sym(";")
        self.expect_sym("}")
        self.cur_orch = None
        return OrchestratorDef(id_tok.text, tuple(variables), main, fault,
                               tuple(handlers))

    def parse_config(self) -> Config:
        self.expect_keyword("config")
        self.expect_sym("{")
        expiry = "creator"
        open_domain = None
        while not self.at_sym("}"):
            key_tok = self.expect_ident("config key")
            key = key_tok.text
            while self.at_sym("-"):
                self.next()
                key += "-" + self.expect_ident("config key").text
            self.expect_sym("=")
            if key == "expiry-target":
                value = self.expect_ident("expiry target").text
                if value not in ("creator", "subscribers", "both"):
                    self.error(f"bad expiry target {value!r}", key_tok)
                expiry = value
            elif key == "open-domain":
                self.expect_sym("{")
                values = [self.expect_int()[0]]
                while self.eat_sym(","):
                    values.append(self.expect_int()[0])
                self.expect_sym("}")
                open_domain = tuple(values)
            else:
                self.error(f"unknown config key {key!r}", key_tok)
            self.expect_sym(";")
        self.expect_sym("}")
        return Config(expiry, open_domain)

    # -- activities ----------------------------------------------------------

    def at_activity_start(self) -> bool:
        tok = self.peek()
        if tok.kind == "SYM":
            return tok.text == "("
        return tok.kind == "IDENT" and tok.text in _ACTIVITY_KEYWORDS

    def parse_activity(self) -> Activity:
        # `;` binds tighter than `||`; both are right-associative
        left = self.parse_seq()
        if self.eat_sym("||"):
            return Par(left, self.parse_activity())
        return left

    def parse_seq(self) -> Activity:
        first = self.parse_atom()
        if self.at_sym(";") and self.toks[self.pos + 1:] \
                and self._starts_activity(self.pos + 1):
            self.next()
            return Seq(first, self.parse_seq())
        return first

    def _starts_activity(self, pos: int) -> bool:
        tok = self.toks[min(pos, len(self.toks) - 1)]
        if tok.kind == "SYM":
            return tok.text == "("
        return tok.kind == "IDENT" and tok.text in _ACTIVITY_KEYWORDS

    def parse_atom(self) -> Activity:
        tok = self.peek()
        if self.eat_sym("("):
            act = self.parse_activity()
            self.expect_sym(")")
            return act
        if tok.kind != "IDENT":
            self.error(f"expected an activity, found {tok.text!r}", tok)
        word = tok.text
        if word == "empty":
            self.next()
            return Empty()
        if word == "exit":
            self.next()
            return Exit()
        if word == "throw":
            self.next()
            return Throw()
        if word == "assign":
            self.next()
            self.expect_sym("(")
            expr = self.parse_expr()
            self.expect_sym(",")
            var = self._var_use()
            self.expect_sym(")")
            return Assign(expr, var)
        if word in ("receive", "invoke"):
            self.next()
            self.expect_sym("(")
            pl = self._pl_ref()
            self.expect_sym(",")
            op = self._op_ref()
            self.expect_sym(",")
            var = self._var_use()
            self.expect_sym(")")
            return (Receive if word == "receive" else Invoke)(pl, op, var)
        if word in ("reply", "replybar"):
            self.next()
            self.expect_sym("(")
            pl = self._pl_ref()
            self.expect_sym(",")
            var = self._var_use()
            self.expect_sym(")")
            return (Reply if word == "reply" else ReplyBar)(pl, var)
        if word == "wait":
            self.next()
            self.expect_sym("(")
            t, t_tok = self.expect_int()
            self.mark("timeout", (t, "wait"), t_tok)
            self.expect_sym(")")
            return Wait(t)
        if word == "while":
            self.next()
            self.expect_sym("(")
            cond = self.parse_cond()
            self.expect_sym(")")
            body = self._braced_activity()
            return While(cond, body)
        if word == "pick":
            return self.parse_pick()
        if word == "createResource":
            self.next()
            self.expect_sym("(")
            epr_tok = self.expect_ident("resource id")
            self.mark("epr-create", (self.cur_orch, epr_tok.text), epr_tok)
            self.expect_sym(",")
            value, _ = self.expect_int()
            self.expect_sym(",")
            lifetime, lt_tok = self.expect_int()
            self.mark("timeout", (lifetime, "createResource"), lt_tok)
            self.expect_sym(")")
            handler = self._braced_activity()
            return CreateResource(epr_tok.text, value, lifetime, handler)
        if word == "getProp":
            self.next()
            self.expect_sym("(")
            epr = self.expect_ident("resource id").text
            self.expect_sym(",")
            var = self._var_use()
            self.expect_sym(")")
            return GetProp(epr, var)
        if word == "setProp":
            self.next()
            self.expect_sym("(")
            epr = self.expect_ident("resource id").text
            self.expect_sym(",")
            value, _ = self.expect_int()
            self.expect_sym(")")
            return SetProp(epr, value)
        if word == "setTimeout":
            self.next()
            self.expect_sym("(")
            epr = self.expect_ident("resource id").text
            self.expect_sym(",")
            t, t_tok = self.expect_int()
            self.mark("timeout", (t, "setTimeout"), t_tok)
            self.expect_sym(")")
            return SetTimeout(epr, t)
        if word == "subscribe":
            self.next()
            self.expect_sym("(")
            orch = self.expect_ident("orchestrator id").text
            self.expect_sym(",")
            epr = self.expect_ident("resource id").text
            self.expect_sym(",")
            saved = self.in_rcond
            self.in_rcond = True
            cond = self.parse_cond()
            self.in_rcond = saved
            self.expect_sym(")")
            # the handler runs at the subscribing orchestrator
            outer = self.cur_orch
            self.cur_orch = orch
            handler = self._braced_activity()
            self.cur_orch = outer
            return Subscribe(orch, epr, cond, handler)
        self.error(f"expected an activity, found {word!r}", tok)

    def parse_pick(self) -> Pick:
        self.expect_keyword("pick")
        self.expect_sym("{")
        branches = []
        while self.at_ident("on"):
            self.next()
            self.expect_sym("(")
            pl = self._pl_ref()
            self.expect_sym(",")
            op = self._op_ref()
            self.expect_sym(",")
            var = self._var_use()
            self.expect_sym(")")
            body = self._braced_activity()
            branches.append(PickBranch(pl, op, var, body))
        self.expect_keyword("alarm")
        self.expect_sym("(")
        t, t_tok = self.expect_int()
        self.mark("timeout", (t, "alarm"), t_tok)
        self.expect_sym(")")
        alarm = self._braced_activity()
        self.expect_sym("}")
        return Pick(tuple(branches), alarm, t)

    def _braced_activity(self) -> Activity:
        self.expect_sym("{")
        act = self.parse_activity()
        self.expect_sym("}")
        return act

    def _var_use(self) -> str:
        tok = self.expect_ident("variable name")
        self.mark("var-use", (self.cur_orch, tok.text), tok)
        return tok.text

    def _pl_ref(self) -> str:
        tok = self.expect_ident("partnerlink name")
        self.mark("pl-ref", tok.text, tok)
        return tok.text

    def _op_ref(self) -> str:
        tok = self.expect_ident("operation name")
        self.mark("op-ref", tok.text, tok)
        return tok.text

    # -- expressions and conditions -------------------------------------------

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.peek().kind == "SYM" and self.peek().text in ("+", "-"):
            op = self.next().text
            left = BinOp(op, left, self.parse_term())
        return left

    def parse_term(self) -> Expr:
        left = self.parse_factor()
        while self.at_sym("*"):
            self.next()
            left = BinOp("*", left, self.parse_factor())
        return left

    def parse_factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == "INT" or self.at_sym("-"):
            value, _ = self.expect_int()
            return Lit(value)
        if tok.kind == "IDENT":
            self.next()
            if self.in_rcond:
                self.mark("rcond-var", tok.text, tok)
            elif self.cur_orch is not None:
                self.mark("var-use", (self.cur_orch, tok.text), tok)
            return VarRef(tok.text)
        if self.eat_sym("("):
            expr = self.parse_expr()
            self.expect_sym(")")
            return expr
        self.error(f"expected an expression, found {tok.text!r}", tok)

    _CMP_OPS = ("==", "!=", "<=", ">=", "<", ">", "=")

    def parse_cond(self) -> Cond:
        left = self.parse_cond_and()
        while self.at_ident("or"):
            self.next()
            left = Or(left, self.parse_cond_and())
        return left

    def parse_cond_and(self) -> Cond:
        left = self.parse_cond_atom()
        while self.at_ident("and"):
            self.next()
            left = And(left, self.parse_cond_atom())
        return left

    def parse_cond_atom(self) -> Cond:
        tok = self.peek()
        if self.at_ident("true"):
            self.next()
            return BoolLit(True)
        if self.at_ident("false"):
            self.next()
            return BoolLit(False)
        if self.at_ident("not"):
            self.next()
            self.expect_sym("(")
            inner = self.parse_cond()
            self.expect_sym(")")
            return Not(inner)
        saved = self.pos
        saved_marks = len(self.marks)
        try:
            left = self.parse_expr()
            op_tok = self.next()
            if op_tok.kind != "SYM" or op_tok.text not in self._CMP_OPS:
                self.error("expected a comparison operator", op_tok)
            op = "==" if op_tok.text == "=" else op_tok.text
            right = self.parse_expr()
            return Cmp(op, left, right)
        except ParseError:
            self.pos = saved
            del self.marks[saved_marks:]
        self.expect_sym("(")
        inner = self.parse_cond()
        self.expect_sym(")")
        return inner


def parse_model(text: str) -> ChoreographyDef:
    return _Parser(text).parse_model()


def parse_source(text: str, path: str = "<string>") -> SourceModel:
    """Parse and validate, collecting positioned diagnostics."""
    parser = _Parser(text)
    try:
        cdef = parser.parse_model()
    except ParseError as exc:
        return SourceModel(path, text, None,
                           [Diagnostic("error", exc.message, exc.line, exc.col)])
    return SourceModel(path, text, cdef, validate_model(cdef, parser.marks))


def parse_activity_text(text: str) -> Activity:
    parser = _Parser(text)
    act = parser.parse_activity()
    if parser.peek().kind != "EOF":
        parser.error("trailing content after activity")
    return act


def parse_cond_text(text: str) -> Cond:
    parser = _Parser(text)
    cond = parser.parse_cond()
    if parser.peek().kind != "EOF":
        parser.error("trailing content after condition")
    return cond


def parse_expr_text(text: str) -> Expr:
    parser = _Parser(text)
    expr = parser.parse_expr()
    if parser.peek().kind != "EOF":
        parser.error("trailing content after expression")
    return expr


# --------------------------------------------------------------------------
# Validation


def _marks_from_def(cdef: ChoreographyDef) -> list[tuple]:
    """Recompute validation marks from a definition (no source positions)."""
    marks: list[tuple] = []

    def add(kind, payload):
        marks.append((kind, payload, 0, 0))

    def walk_expr(e: Expr, orch: str):
        if isinstance(e, VarRef):
            add("var-use", (orch, e.name))
        elif isinstance(e, BinOp):
            walk_expr(e.left, orch)
            walk_expr(e.right, orch)

    def walk_cond(c: Cond, orch: str, rcond: bool):
        if isinstance(c, Cmp):
            for side in (c.left, c.right):
                if rcond:
                    for v in sorted(_expr_var_names(side)):
                        add("rcond-var", v)
                else:
                    walk_expr(side, orch)
        elif isinstance(c, (And, Or)):
            walk_cond(c.left, orch, rcond)
            walk_cond(c.right, orch, rcond)
        elif isinstance(c, Not):
            walk_cond(c.operand, orch, rcond)

    def walk(a: Activity, orch: str):
        if isinstance(a, Assign):
            walk_expr(a.expr, orch)
            add("var-use", (orch, a.var))
        elif isinstance(a, (Receive, Invoke)):
            add("pl-ref", a.pl)
            add("op-ref", a.op)
            add("var-use", (orch, a.var))
        elif isinstance(a, (Reply, ReplyBar)):
            add("pl-ref", a.pl)
            add("var-use", (orch, a.var))
        elif isinstance(a, Wait):
            add("timeout", (a.timeout, "wait"))
        elif isinstance(a, Seq):
            walk(a.first, orch)
            walk(a.second, orch)
        elif isinstance(a, Par):
            walk(a.left, orch)
            walk(a.right, orch)
        elif isinstance(a, While):
            walk_cond(a.cond, orch, False)
            walk(a.body, orch)
        elif isinstance(a, Pick):
            for br in a.branches:
                add("pl-ref", br.pl)
                add("op-ref", br.op)
                add("var-use", (orch, br.var))
                walk(br.body, orch)
            add("timeout", (a.timeout, "alarm"))
            walk(a.alarm, orch)
        elif isinstance(a, CreateResource):
            add("epr-create", (orch, a.epr))
            add("timeout", (a.lifetime, "createResource"))
            walk(a.handler, orch)
        elif isinstance(a, GetProp):
            add("var-use", (orch, a.var))
        elif isinstance(a, SetTimeout):
            add("timeout", (a.timeout, "setTimeout"))
        elif isinstance(a, Subscribe):
            walk_cond(a.cond, orch, True)
            walk(a.handler, a.orch)

    for od in cdef.orchestrators:
        add("orch-decl", od.id)
        for var, _ in od.variables:
            add("var-decl", (od.id, var))
    for pl in cdef.partnerlinks.values():
        add("pl-decl", (pl.name, pl.sender, pl.receiver))
    for od in cdef.orchestrators:
        walk(od.main, od.id)
        walk(od.fault, od.id)
        for act, _ in od.handlers:
            walk(act, od.id)
    return marks


def _expr_var_names(e: Expr) -> set:
    if isinstance(e, VarRef):
        return {e.name}
    if isinstance(e, BinOp):
        return _expr_var_names(e.left) | _expr_var_names(e.right)
    return set()


def validate_model(cdef: ChoreographyDef,
                   marks: Optional[list[tuple]] = None) -> list[Diagnostic]:
    """Semantic checks over a parsed model; fatal and warning tiers."""
    if marks is None:
        marks = _marks_from_def(cdef)
    diags: list[Diagnostic] = []
    orch_ids = [od.id for od in cdef.orchestrators]
    declared = {od.id: {v for v, _ in od.variables} for od in cdef.orchestrators}
    seen_orchs: set[str] = set()
    seen_eprs: set[str] = set()

    for kind, payload, line, col in marks:
        def err(msg, severity="error"):
            diags.append(Diagnostic(severity, msg, line, col))

        if kind == "orch-decl":
            if payload in seen_orchs:
                err(f"duplicate orchestrator id {payload!r}")
            seen_orchs.add(payload)
        elif kind == "pl-decl":
            name, sender, receiver = payload
            for end in (sender, receiver):
                if end not in orch_ids:
                    err(f"partnerlink {name!r} endpoint {end!r} is not an orchestrator")
            if sender == receiver:
                err(f"partnerlink {name!r} must connect two distinct orchestrators")
        elif kind == "var-use":
            orch, var = payload
            if orch in declared and var not in declared[orch]:
                err(f"variable {var!r} is not declared in orchestrator {orch!r}")
        elif kind == "timeout":
            value, construct = payload
            if value < 1:
                err(f"{construct} requires a timeout >= 1, got {value}")
        elif kind == "rcond-var":
            if payload != RESOURCE_VALUE_VAR:
                err(f"subscription conditions may only read {RESOURCE_VALUE_VAR!r},"
                    f" found {payload!r}")
        elif kind == "op-ref":
            if payload not in cdef.ops:
                err(f"operation {payload!r} is not defined")
        elif kind == "pl-ref":
            if payload not in cdef.partnerlinks:
                err(f"partnerlink {payload!r} is not declared")
        elif kind == "epr-create":
            _, epr = payload
            if epr in seen_eprs:
                err(f"resource {epr!r} is created more than once;"
                    " later creations are no-ops", "warning")
            seen_eprs.add(epr)
    return diags


# --------------------------------------------------------------------------
# Pretty printing


def print_model(cdef: ChoreographyDef) -> str:
    lines = [f"choreography {cdef.name} {{"]
    for name in sorted(cdef.ops):
        op = cdef.ops[name]
        lines.append(f"  op {name}({', '.join(op.params)}) {{")
        for g in op.body:
            lines.append(f"    if {render_cond(g.guard)} then"
                         f" {g.target} := {render_expr(g.rhs)};")
        lines.append("  }")
    for name in sorted(cdef.partnerlinks):
        pl = cdef.partnerlinks[name]
        lines.append(f"  partnerlink {name} = ({pl.sender} -> {pl.receiver});")
    for od in cdef.orchestrators:
        lines.append(f"  orchestrator {od.id} {{")
        if od.variables:
            decls = ", ".join(f"{v}={init}" for v, init in od.variables)
            lines.append(f"    vars {decls};")
        if od.fault != EMPTY:
            lines.append(f"    fault {render_activity(od.fault)};")
        if od.handlers:
            parts = [("at-start " if at_start else "") + render_activity(act)
                     for act, at_start in od.handlers]
            lines.append(f"    handlers {', '.join(parts)};")
        lines.append(f"    main = {render_activity(od.main)};")
        lines.append("  }")
    if cdef.config != Config():
        lines.append("  config {")
        if cdef.config.expiry_target != "creator":
            lines.append(f"    expiry-target = {cdef.config.expiry_target};")
        if cdef.config.open_domain is not None:
            dom = ", ".join(str(v) for v in cdef.config.open_domain)
            lines.append(f"    open-domain = {{{dom}}};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
