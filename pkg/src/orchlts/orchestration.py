"""Second semantic level: one orchestrator with its running event handlers.

An orchestrator is a main activity plus a pool of spawned handler instances.
Non-fault steps of either component spawn the subscription handlers whose
conditions hold afterwards; a throw switches the main activity to the fault
handler; an exit clears everything.  A delay step advances the main activity
and every instance together and spawns expiry handlers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .activity import (CLOSED_ENV, ActivityStep, CommEnv, Label, Offer,
                       action_steps, can_delay, delay_step, sync_offers)
from .errors import NotDelayable
from .state import HandlerInstance, LocalState, expiry_set, notif_set
from .terms import EMPTY, Activity, Empty, render_activity


@dataclass(frozen=True)
class OrchestratorDef:
    id: str
    variables: tuple[tuple[str, int], ...]  # declaration order, initial values
    main: Activity
    fault: Activity = EMPTY
    handlers: tuple[tuple[Activity, bool], ...] = ()  # (activity, at_start)


@dataclass(frozen=True)
class OrchStep:
    label: Label
    local: LocalState
    rho: dict
    rule: str
    var: Optional[str] = None  # communication variable, if any


def spawn_handlers(pool: tuple[HandlerInstance, ...],
                   new: list[HandlerInstance]) -> tuple[HandlerInstance, ...]:
    """Append fresh instances; an origin with a live instance is not respawned."""
    live = {h.origin for h in pool}
    out = list(pool)
    for inst in sorted(new, key=lambda h: (h.origin, render_activity(h.remaining))):
        if inst.origin not in live and not isinstance(inst.remaining, Empty):
            out.append(inst)
            live.add(inst.origin)
    return tuple(out)


def _prune(pool: list[HandlerInstance]) -> list[HandlerInstance]:
    return [h for h in pool if not isinstance(h.remaining, Empty)]


def orch_action_steps(odef: OrchestratorDef, local: LocalState, rho: dict,
                      ops: dict, env: CommEnv = CLOSED_ENV) -> list[OrchStep]:
    """All orchestrator-level action steps (main activity and handler pool)."""
    steps: list[OrchStep] = []

    for st in action_steps(local.activity, local.sigma, rho, ops, local.orch, env):
        if st.label.kind == "throw":
            loc2 = LocalState(local.orch, odef.fault, local.pool, st.sigma)
            steps.append(OrchStep(st.label, loc2, st.rho, "Notif3", st.var))
        elif st.label.kind == "exit":
            loc2 = LocalState(local.orch, EMPTY, (), st.sigma)
            steps.append(OrchStep(st.label, loc2, st.rho, "Notif4", st.var))
        else:
            spawned = spawn_handlers(tuple(_prune(list(local.pool))),
                                     notif_set(local.orch, st.rho))
            loc2 = LocalState(local.orch, st.residual, spawned, st.sigma)
            steps.append(OrchStep(st.label, loc2, st.rho, "Notif1", st.var))

    for idx, inst in enumerate(local.pool):
        for st in action_steps(inst.remaining, local.sigma, rho, ops,
                               local.orch, env):
            rest = [h for k, h in enumerate(local.pool) if k != idx]
            if st.label.kind == "throw":
                # a faulting handler routes to the fault handler like the
                # main activity would; the spent instance is pruned
                loc2 = LocalState(local.orch, odef.fault, tuple(rest), st.sigma)
                steps.append(OrchStep(st.label, loc2, st.rho, "Notif3", st.var))
            elif st.label.kind == "exit":
                loc2 = LocalState(local.orch, EMPTY, (), st.sigma)
                steps.append(OrchStep(st.label, loc2, st.rho, "Notif4", st.var))
            else:
                pool2 = list(local.pool)
                pool2[idx] = HandlerInstance(inst.origin, st.residual)
                spawned = spawn_handlers(tuple(_prune(pool2)),
                                         notif_set(local.orch, st.rho))
                loc2 = LocalState(local.orch, local.activity, spawned, st.sigma)
                steps.append(OrchStep(st.label, loc2, st.rho, "Notif2", st.var))

    return steps


def orch_delay_step(odef: OrchestratorDef, local: LocalState, rho: dict,
                    expiry_target: str = "creator") -> LocalState:
    """Advance main and every instance by one time unit; spawn expiry handlers.

    Expiry handlers are selected at the pre-tick store; the caller ticks the
    shared store exactly once per global delay.
    """
    if not can_delay(local.activity):
        raise NotDelayable(
            f"{local.orch}: urgent main activity {render_activity(local.activity)}")
    for inst in local.pool:
        if not can_delay(inst.remaining):
            raise NotDelayable(
                f"{local.orch}: urgent handler {render_activity(inst.remaining)}")
    main2 = delay_step(local.activity)
    pool2 = _prune([HandlerInstance(h.origin, delay_step(h.remaining))
                    for h in local.pool])
    if is_terminated(local):
        # a finished (or exited) orchestrator makes no further steps, so
        # nothing can be spawned into it
        pool3 = tuple(pool2)
    else:
        pool3 = spawn_handlers(tuple(pool2),
                               expiry_set(local.orch, rho, expiry_target))
    return LocalState(local.orch, main2, pool3, local.sigma)


def is_terminated(local: LocalState) -> bool:
    return isinstance(local.activity, Empty) and not local.pool


def orch_offers(local: LocalState) -> list[Offer]:
    """Exposed communication capabilities of the main activity and handlers."""
    out = sync_offers(local.activity)
    for inst in local.pool:
        out.extend(sync_offers(inst.remaining))
    return out
