"""Lowest semantic level: action and delay steps of a single activity term.

Communication actions (receive/invoke/reply/replybar/pick) fire only when the
environment enables them.  In closed mode they are never enabled standalone
(the choreography layer pairs them); in open mode the environment supplies
values from a finite input domain; the choreography layer uses a firing
environment that enables exactly one capability with one value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import NotDelayable, UndeclaredVariable
from .state import (apply_op, resource_add_subscription, resource_create,
                    resource_set_lifetime, resource_set_value)
from .terms import (EMPTY, Activity, Assign, CreateResource, Empty, Exit,
                    GetProp, Invoke, OpDef, Par, Pick, Receive, Reply,
                    ReplyBar, Seq, SetProp, SetTimeout, Subscribe, Throw,
                    Wait, While, eval_cond, eval_expr, render_activity,
                    render_cond, render_expr)


@dataclass(frozen=True)
class Label:
    kind: str
    text: str

    def __str__(self) -> str:
        return self.text


DELAY = Label("delay", "delay")
TAU = Label("tau", "tau")
THROW_LABEL = Label("throw", "throw")
EXIT_LABEL = Label("exit", "exit")

SYNC_KINDS = ("invoke", "receive", "reply", "replybar", "pick")


@dataclass(frozen=True)
class ActivityStep:
    label: Label
    residual: Activity
    sigma: dict
    rho: dict
    rule: str
    # for communication steps, the local variable named by the redex, so the
    # choreography layer can read the transmitted value
    var: Optional[str] = None


# --------------------------------------------------------------------------
# Exploration modes and communication environments


@dataclass(frozen=True)
class Closed:
    pass


@dataclass(frozen=True)
class Open:
    """Environment values for open exploration; per-operation overrides."""

    domain: tuple[int, ...] = (0,)
    per_op: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def values_for(self, op: Optional[str]) -> tuple[int, ...]:
        for name, dom in self.per_op:
            if name == op:
                return dom
        return self.domain


class CommEnv:
    """Closed environment: no standalone communication steps."""

    def receive_values(self, pl, op):
        return ()

    def invoke_enabled(self, pl, op):
        return False

    def reply_enabled(self, pl):
        return False

    def replybar_values(self, pl):
        return ()

    def pick_values(self, pl, op):
        return ()


CLOSED_ENV = CommEnv()


class OpenEnv(CommEnv):
    def __init__(self, mode: Open):
        self.mode = mode

    def receive_values(self, pl, op):
        return self.mode.values_for(op)

    def invoke_enabled(self, pl, op):
        return True

    def reply_enabled(self, pl):
        return True

    def replybar_values(self, pl):
        return self.mode.values_for(None)

    def pick_values(self, pl, op):
        return self.mode.values_for(op)


class FireEnv(CommEnv):
    """Enables exactly one communication capability with one value."""

    def __init__(self, kind: str, pl: str, op: Optional[str] = None,
                 value: Optional[int] = None):
        self.kind = kind
        self.pl = pl
        self.op = op
        self.value = value

    def receive_values(self, pl, op):
        if self.kind == "receive" and pl == self.pl and op == self.op:
            return (self.value,)
        return ()

    def invoke_enabled(self, pl, op):
        return self.kind == "invoke" and pl == self.pl and op == self.op

    def reply_enabled(self, pl):
        return self.kind == "reply" and pl == self.pl

    def replybar_values(self, pl):
        if self.kind == "replybar" and pl == self.pl:
            return (self.value,)
        return ()

    def pick_values(self, pl, op):
        if self.kind == "pick" and pl == self.pl and op == self.op:
            return (self.value,)
        return ()


def env_for_mode(mode) -> CommEnv:
    if isinstance(mode, Closed):
        return CLOSED_ENV
    if isinstance(mode, Open):
        return OpenEnv(mode)
    raise TypeError(f"not a mode: {mode!r}")


# --------------------------------------------------------------------------
# Action transitions


def _bind(sigma: dict, var: str, value: int) -> dict:
    if var not in sigma:
        raise UndeclaredVariable(var)
    out = dict(sigma)
    out[var] = value
    return out


def action_steps(act: Activity, sigma: dict, rho: dict, ops: dict,
                 orch: str, env: CommEnv = CLOSED_ENV) -> list[ActivityStep]:
    """All action steps derivable for one activity term.

    Fault situations from the rules (missing resource, zero timeout) surface
    as throw-labeled steps, never as engine errors.
    """
    steps: list[ActivityStep] = []

    if isinstance(act, Throw):
        steps.append(ActivityStep(THROW_LABEL, EMPTY, sigma, rho, "Throw"))

    elif isinstance(act, Exit):
        steps.append(ActivityStep(EXIT_LABEL, EMPTY, sigma, rho, "Exit"))

    elif isinstance(act, Receive):
        for v in env.receive_values(act.pl, act.op):
            s2 = apply_op(_opdef(ops, act.op), [], _bind(sigma, act.var, v))
            label = Label("receive", f"receive({act.pl},{act.op},{v})")
            steps.append(ActivityStep(label, EMPTY, s2, rho, "Receive", act.var))

    elif isinstance(act, Invoke):
        if env.invoke_enabled(act.pl, act.op):
            label = Label("invoke", f"invoke({act.pl},{act.op},{act.var})")
            steps.append(ActivityStep(label, EMPTY, sigma, rho, "Invoke", act.var))

    elif isinstance(act, Reply):
        if env.reply_enabled(act.pl):
            label = Label("reply", f"reply({act.pl},{act.var})")
            steps.append(ActivityStep(label, EMPTY, sigma, rho, "Reply", act.var))

    elif isinstance(act, ReplyBar):
        for v in env.replybar_values(act.pl):
            label = Label("replybar", f"replybar({act.pl},{v})")
            steps.append(ActivityStep(label, EMPTY, _bind(sigma, act.var, v),
                                      rho, "ReplyBar", act.var))

    elif isinstance(act, Assign):
        value = eval_expr(act.expr, sigma)
        label = Label("assign", f"assign({render_expr(act.expr)},{act.var})")
        steps.append(ActivityStep(label, EMPTY, _bind(sigma, act.var, value),
                                  rho, "Assign"))

    elif isinstance(act, Seq):
        for st in action_steps(act.first, sigma, rho, ops, orch, env):
            if st.label.kind in ("throw", "exit"):
                steps.append(ActivityStep(st.label, EMPTY, st.sigma, st.rho,
                                          "Seq3", st.var))
            elif isinstance(st.residual, Empty):
                steps.append(ActivityStep(st.label, act.second, st.sigma,
                                          st.rho, "Seq2", st.var))
            else:
                steps.append(ActivityStep(st.label, Seq(st.residual, act.second),
                                          st.sigma, st.rho, "Seq1", st.var))

    elif isinstance(act, Par):
        for st in action_steps(act.left, sigma, rho, ops, orch, env):
            if st.label.kind in ("throw", "exit"):
                steps.append(ActivityStep(st.label, EMPTY, st.sigma, st.rho,
                                          "Par3", st.var))
            else:
                steps.append(ActivityStep(st.label, Par(st.residual, act.right),
                                          st.sigma, st.rho, "Par1", st.var))
        for st in action_steps(act.right, sigma, rho, ops, orch, env):
            if st.label.kind in ("throw", "exit"):
                steps.append(ActivityStep(st.label, EMPTY, st.sigma, st.rho,
                                          "Par4", st.var))
            else:
                steps.append(ActivityStep(st.label, Par(act.left, st.residual),
                                          st.sigma, st.rho, "Par2", st.var))
        if isinstance(act.left, Empty) and isinstance(act.right, Empty):
            steps.append(ActivityStep(TAU, EMPTY, sigma, rho, "Par5"))

    elif isinstance(act, While):
        if eval_cond(act.cond, sigma):
            steps.append(ActivityStep(TAU, Seq(act.body, act), sigma, rho, "While1"))
        else:
            steps.append(ActivityStep(TAU, EMPTY, sigma, rho, "While2"))

    elif isinstance(act, Pick):
        if act.timeout >= 1:
            for br in act.branches:
                for v in env.pick_values(br.pl, br.op):
                    s2 = apply_op(_opdef(ops, br.op), [], _bind(sigma, br.var, v))
                    label = Label("pick", f"pick({br.pl},{br.op},{v})")
                    steps.append(ActivityStep(label, br.body, s2, rho, "Pick",
                                              br.var))

    elif isinstance(act, CreateResource):
        rho2 = resource_create(rho, act.epr, act.value, act.lifetime,
                               act.handler, orch)
        text = (f"createResource({act.epr},{act.value},{act.lifetime},"
                f"{render_activity(act.handler)})")
        steps.append(ActivityStep(Label("createResource", text), EMPTY, sigma,
                                  rho2, "CR"))

    elif isinstance(act, GetProp):
        if act.epr in rho:
            value = rho[act.epr].value
            label = Label("getProp", f"getProp({act.epr},{value})")
            steps.append(ActivityStep(label, EMPTY, _bind(sigma, act.var, value),
                                      rho, "GetProp"))
        else:
            steps.append(ActivityStep(THROW_LABEL, EMPTY, sigma, rho, "GetProp2"))

    elif isinstance(act, SetProp):
        if act.epr in rho:
            rho2 = resource_set_value(rho, act.epr, act.value)
            label = Label("setProp", f"setProp({act.epr},{act.value})")
            steps.append(ActivityStep(label, EMPTY, sigma, rho2, "SetProp"))
        else:
            steps.append(ActivityStep(THROW_LABEL, EMPTY, sigma, rho, "SetProp2"))

    elif isinstance(act, SetTimeout):
        if act.epr not in rho:
            steps.append(ActivityStep(THROW_LABEL, EMPTY, sigma, rho, "SetTime2"))
        elif act.timeout == 0:
            steps.append(ActivityStep(THROW_LABEL, EMPTY, sigma, rho, "SetTime3"))
        else:
            rho2 = resource_set_lifetime(rho, act.epr, act.timeout)
            label = Label("setTimeout", f"setTimeout({act.epr},{act.timeout})")
            steps.append(ActivityStep(label, EMPTY, sigma, rho2, "SetTime"))

    elif isinstance(act, Subscribe):
        if act.epr in rho:
            rho2 = resource_add_subscription(rho, act.epr, act.orch, act.cond,
                                             act.handler)
            text = (f"subscribe({act.orch},{act.epr},{render_cond(act.cond)},"
                    f"{render_activity(act.handler)})")
            steps.append(ActivityStep(Label("subscribe", text), EMPTY, sigma,
                                      rho2, "Subs"))
        else:
            steps.append(ActivityStep(THROW_LABEL, EMPTY, sigma, rho, "Subs2"))

    elif isinstance(act, (Empty, Wait)):
        pass  # no action rules; these only let time pass

    else:
        raise TypeError(f"not an activity: {act!r}")

    return steps


def _opdef(ops: dict, name: str) -> OpDef:
    if name not in ops:
        raise KeyError(f"undefined operation: {name}")
    return ops[name]


# --------------------------------------------------------------------------
# Delay transitions


def can_delay(act: Activity) -> bool:
    """True iff a delay rule applies; every other constructor is urgent."""
    if isinstance(act, (Wait, Receive, Invoke, Empty, Pick)):
        return True
    if isinstance(act, Seq):
        return can_delay(act.first)
    if isinstance(act, Par):
        return can_delay(act.left) and can_delay(act.right)
    return False


def delay_step(act: Activity) -> Activity:
    """The residual after one time unit; the caller ticks the store once."""
    if isinstance(act, Wait):
        return Wait(act.timeout - 1) if act.timeout > 1 else EMPTY
    if isinstance(act, (Receive, Invoke, Empty)):
        return act
    if isinstance(act, Seq):
        head = delay_step(act.first)
        # a head that completes by delaying hands control to the continuation
        return act.second if isinstance(head, Empty) else Seq(head, act.second)
    if isinstance(act, Par):
        return Par(delay_step(act.left), delay_step(act.right))
    if isinstance(act, Pick):
        if act.timeout > 1:
            return Pick(act.branches, act.alarm, act.timeout - 1)
        return act.alarm
    raise NotDelayable(f"no delay rule for {render_activity(act)}")


# --------------------------------------------------------------------------
# Communication capabilities exposed to the choreography layer


@dataclass(frozen=True)
class Offer:
    kind: str  # invoke | receive | reply | replybar | pick
    pl: str
    op: Optional[str]
    var: str


def sync_offers(act: Activity) -> list[Offer]:
    """Communication redexes reachable as the next action of the term."""
    if isinstance(act, Invoke):
        return [Offer("invoke", act.pl, act.op, act.var)]
    if isinstance(act, Receive):
        return [Offer("receive", act.pl, act.op, act.var)]
    if isinstance(act, Reply):
        return [Offer("reply", act.pl, None, act.var)]
    if isinstance(act, ReplyBar):
        return [Offer("replybar", act.pl, None, act.var)]
    if isinstance(act, Pick):
        if act.timeout >= 1:
            return [Offer("pick", br.pl, br.op, br.var) for br in act.branches]
        return []
    if isinstance(act, Seq):
        return sync_offers(act.first)
    if isinstance(act, Par):
        return sync_offers(act.left) + sync_offers(act.right)
    return []
