"""Top semantic level: a closed set of orchestrators over a shared store.

Internal steps of one orchestrator interleave; matching send/receive pairs on
a partner link fire together; a global delay advances everybody in lockstep
and is blocked while any synchronisation is possible or any orchestrator is
urgent (maximal progress).  An exit anywhere stops the whole choreography.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .activity import CLOSED_ENV, FireEnv, Label, Open, OpenEnv
from .errors import NotDelayable
from .orchestration import (OrchStep, OrchestratorDef, is_terminated,
                            orch_action_steps, orch_delay_step, orch_offers,
                            spawn_handlers)
from .state import ChorState, HandlerInstance, LocalState, notif_set, resource_tick
from .terms import EMPTY, OpDef, PartnerLink


@dataclass(frozen=True)
class Config:
    expiry_target: str = "creator"  # creator | subscribers | both
    open_domain: Optional[tuple[int, ...]] = None  # values offered by the environment


@dataclass(frozen=True)
class ChoreographyDef:
    name: str
    orchestrators: tuple[OrchestratorDef, ...]
    partnerlinks: dict[str, PartnerLink] = field(default_factory=dict)
    ops: dict[str, OpDef] = field(default_factory=dict)
    config: Config = Config()

    def index_of(self, orch: str) -> int:
        for i, od in enumerate(self.orchestrators):
            if od.id == orch:
                return i
        raise KeyError(orch)


@dataclass(frozen=True)
class ChorStep:
    label: Label
    state: ChorState
    orch: str
    rule: str


@dataclass(frozen=True)
class Blocked:
    """Why the global delay step is not available."""
    reason: str


def initial_state(cdef: ChoreographyDef) -> ChorState:
    locs = []
    for odef in cdef.orchestrators:
        pool = tuple(HandlerInstance(("decl", i), act)
                     for i, (act, at_start) in enumerate(odef.handlers) if at_start)
        locs.append(LocalState(odef.id, odef.main, pool, dict(odef.variables)))
    return tuple_state(locs, {})


def tuple_state(locs: list[LocalState], rho: dict) -> ChorState:
    return ChorState(tuple(locs), rho)


def _with_bystanders(cdef: ChoreographyDef, locs: list[LocalState], rho: dict,
                     touched: set[int]) -> list[LocalState]:
    """Spawn newly-enabled subscription handlers at untouched orchestrators."""
    out = []
    for i, loc in enumerate(locs):
        if i in touched or is_terminated(loc):
            out.append(loc)
        else:
            pool = spawn_handlers(loc.pool, notif_set(loc.orch, rho))
            out.append(LocalState(loc.orch, loc.activity, pool, loc.sigma))
    return out


def _exit_state(cs: ChorState) -> ChorState:
    locs = [LocalState(l.orch, EMPTY, (), l.sigma) for l in cs.locals]
    return tuple_state(locs, cs.rho)


def chor_action_steps(cdef: ChoreographyDef, cs: ChorState) -> list[ChorStep]:
    steps: list[ChorStep] = []

    # exits and internal steps of a single orchestrator
    for i, odef in enumerate(cdef.orchestrators):
        loc = cs.locals[i]
        for st in orch_action_steps(odef, loc, cs.rho, cdef.ops, CLOSED_ENV):
            if st.label.kind == "exit":
                steps.append(ChorStep(st.label, _exit_state(cs), odef.id, "Chor1"))
            else:
                locs = list(cs.locals)
                locs[i] = st.local
                locs = _with_bystanders(cdef, locs, st.rho, {i})
                steps.append(ChorStep(st.label, tuple_state(locs, st.rho),
                                      odef.id, "Chor2"))
        if cdef.config.open_domain is not None:
            env = OpenEnv(Open(cdef.config.open_domain))
            for st in orch_action_steps(odef, loc, cs.rho, cdef.ops, env):
                if st.label.kind in ("exit", "throw"):
                    continue  # already produced by the closed pass
                locs = list(cs.locals)
                locs[i] = st.local
                locs = _with_bystanders(cdef, locs, st.rho, {i})
                steps.append(ChorStep(st.label, tuple_state(locs, st.rho),
                                      odef.id, "Open"))

    # synchronisations on each partner link
    for name in sorted(cdef.partnerlinks):
        pl = cdef.partnerlinks[name]
        i = cdef.index_of(pl.sender)
        j = cdef.index_of(pl.receiver)
        steps.extend(_sync_steps(cdef, cs, name, i, j))
    return steps


def _fire(cdef: ChoreographyDef, idx: int, cs: ChorState,
          env: FireEnv) -> list[OrchStep]:
    return orch_action_steps(cdef.orchestrators[idx], cs.locals[idx],
                             cs.rho, cdef.ops, env)


def _sync_steps(cdef: ChoreographyDef, cs: ChorState, pl: str,
                i: int, j: int) -> list[ChorStep]:
    steps: list[ChorStep] = []
    sender = cdef.orchestrators[i]
    receiver = cdef.orchestrators[j]

    # request: invoke at the sender meets receive or pick at the receiver
    invoke_ops = sorted({o.op for o in orch_offers(cs.locals[i])
                         if o.kind == "invoke" and o.pl == pl})
    for op in invoke_ops:
        for ist in _fire(cdef, i, cs, FireEnv("invoke", pl, op)):
            if ist.label.kind != "invoke":
                continue
            value = cs.locals[i].sigma[ist.var]
            for kind, rule in (("receive", "Chor4"), ("pick", "Chor6")):
                for jst in _fire(cdef, j, cs, FireEnv(kind, pl, op, value)):
                    if jst.label.kind != kind:
                        continue
                    locs = list(cs.locals)
                    locs[i] = ist.local
                    locs[j] = jst.local
                    rho2 = jst.rho
                    locs = _with_bystanders(cdef, locs, rho2, {i, j})
                    steps.append(ChorStep(ist.label, tuple_state(locs, rho2),
                                          sender.id, rule))

    # response: reply at the receiver meets replybar at the sender
    for jst in _fire(cdef, j, cs, FireEnv("reply", pl)):
        if jst.label.kind != "reply":
            continue
        value = cs.locals[j].sigma[jst.var]
        for ist in _fire(cdef, i, cs, FireEnv("replybar", pl, None, value)):
            if ist.label.kind != "replybar":
                continue
            locs = list(cs.locals)
            locs[i] = ist.local
            locs[j] = jst.local
            rho2 = jst.rho
            locs = _with_bystanders(cdef, locs, rho2, {i, j})
            label = Label("reply", f"reply({pl},{value})")
            steps.append(ChorStep(label, tuple_state(locs, rho2),
                                  receiver.id, "Chor5"))
    return steps


def sync_enabled(cdef: ChoreographyDef, cs: ChorState) -> bool:
    """True when some request or response synchronisation can fire."""
    for name, pl in cdef.partnerlinks.items():
        i = cdef.index_of(pl.sender)
        j = cdef.index_of(pl.receiver)
        snd = orch_offers(cs.locals[i])
        rcv = orch_offers(cs.locals[j])
        for o in snd:
            if o.kind == "invoke" and o.pl == name:
                if any(r.kind in ("receive", "pick") and r.pl == name
                       and r.op == o.op for r in rcv):
                    return True
            if o.kind == "replybar" and o.pl == name:
                if any(r.kind == "reply" and r.pl == name for r in rcv):
                    return True
    return False


def chor_delay(cdef: ChoreographyDef, cs: ChorState,
               urgent_internal: bool = False) -> Union[ChorState, Blocked]:
    """One global time unit, or the reason the clock cannot advance."""
    if sync_enabled(cdef, cs):
        return Blocked("communication pending")
    if urgent_internal and chor_action_steps(cdef, cs):
        return Blocked("internal action pending")
    locs = []
    for odef, loc in zip(cdef.orchestrators, cs.locals):
        try:
            locs.append(orch_delay_step(odef, loc, cs.rho,
                                        cdef.config.expiry_target))
        except NotDelayable as exc:
            return Blocked(str(exc))
    return tuple_state(locs, resource_tick(cs.rho))
