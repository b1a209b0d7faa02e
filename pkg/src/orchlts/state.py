"""Stores and global configurations, plus the pure bookkeeping functions.

The shared resource store maps resource ids to leased tuples; one store is
shared by every orchestrator of a choreography.  All update functions return
new stores and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import terms
from .errors import NonPositiveLifetime, UndeclaredVariable, UnknownResource
from .terms import (Activity, Cond, Empty, OpDef, eval_cond, eval_expr,
                    eval_resource_cond, render_activity, render_cond)

EXPIRY_TARGETS = ("creator", "subscribers", "both")


@dataclass(frozen=True)
class Subscription:
    orch: str
    cond: Cond
    handler: Activity


@dataclass(frozen=True)
class Resource:
    epr: str
    value: int
    subs: tuple[Subscription, ...]  # kept sorted by subscriber id
    lifetime: int
    expiry_handler: Activity
    creator: str

    def __post_init__(self):
        if self.lifetime < 1:
            raise NonPositiveLifetime(self.lifetime)


# A resource store is a plain dict {epr: Resource}; a variable store is a
# plain dict {var: int}.  Both are treated as immutable (copied on update).


@dataclass(frozen=True)
class HandlerInstance:
    """A running event handler and where it came from.

    origin is one of ("sub", epr, subscriber), ("exp", epr) or ("decl", i);
    at most one live instance per origin exists in a pool.
    """

    origin: tuple
    remaining: Activity

    def origin_text(self) -> str:
        head, *rest = self.origin
        return f"{head}({','.join(str(x) for x in rest)})"


@dataclass(frozen=True)
class LocalState:
    orch: str
    activity: Activity
    pool: tuple[HandlerInstance, ...]
    sigma: dict

    def __eq__(self, other):  # dicts compare by content; pools as multisets
        if not isinstance(other, LocalState):
            return NotImplemented
        return (self.orch == other.orch and self.activity == other.activity
                and sorted_pool(self.pool) == sorted_pool(other.pool)
                and self.sigma == other.sigma)

    def __hash__(self):
        return hash((self.orch, self.activity, sorted_pool(self.pool),
                     tuple(sorted(self.sigma.items()))))


@dataclass(frozen=True)
class ChorState:
    locals: tuple[LocalState, ...]
    rho: dict

    def __eq__(self, other):
        if not isinstance(other, ChorState):
            return NotImplemented
        return self.locals == other.locals and self.rho == other.rho

    def __hash__(self):
        return hash(canonical_key(self))


def sorted_pool(pool: tuple[HandlerInstance, ...]) -> tuple[HandlerInstance, ...]:
    return tuple(sorted(pool, key=lambda h: (h.origin, render_activity(h.remaining))))


# --------------------------------------------------------------------------
# Operation application


def apply_op(op: OpDef, args: list, sigma: dict) -> dict:
    """Run an operation body over a store; parameters are a temporary overlay.

    The returned store covers exactly the variables declared in `sigma`;
    parameter slots that are not declared variables vanish afterwards.
    """
    if len(args) != len(op.params):
        raise ValueError(f"op {op.name}: expected {len(op.params)} args, got {len(args)}")
    env = dict(sigma)
    env.update(zip(op.params, args))
    for ga in op.body:
        if ga.target not in sigma:
            raise UndeclaredVariable(ga.target)
        if eval_cond(ga.guard, env):
            env[ga.target] = eval_expr(ga.rhs, env)
    return {k: env[k] for k in sigma}


# --------------------------------------------------------------------------
# Resource store updates


def resource_set_value(rho: dict, epr: str, value: int) -> dict:
    if epr not in rho:
        raise UnknownResource(epr)
    out = dict(rho)
    r = out[epr]
    out[epr] = Resource(r.epr, value, r.subs, r.lifetime, r.expiry_handler, r.creator)
    return out


def resource_set_lifetime(rho: dict, epr: str, lifetime: int) -> dict:
    if epr not in rho:
        raise UnknownResource(epr)
    if lifetime < 1:
        raise NonPositiveLifetime(lifetime)
    out = dict(rho)
    r = out[epr]
    out[epr] = Resource(r.epr, r.value, r.subs, lifetime, r.expiry_handler, r.creator)
    return out


def resource_add_subscription(rho: dict, epr: str, orch: str, cond: Cond,
                              handler: Activity) -> dict:
    """Add a subscriber, or replace its condition/handler if already present."""
    if epr not in rho:
        raise UnknownResource(epr)
    out = dict(rho)
    r = out[epr]
    subs = [s for s in r.subs if s.orch != orch]
    subs.append(Subscription(orch, cond, handler))
    subs.sort(key=lambda s: s.orch)
    out[epr] = Resource(r.epr, r.value, tuple(subs), r.lifetime, r.expiry_handler,
                        r.creator)
    return out


def resource_create(rho: dict, epr: str, value: int, lifetime: int,
                    handler: Activity, creator: str) -> dict:
    """Insert a fresh resource; an existing id makes this a no-op."""
    if epr in rho:
        return rho
    out = dict(rho)
    out[epr] = Resource(epr, value, (), lifetime, handler, creator)
    return out


def resource_tick(rho: dict) -> dict:
    """One global time unit: decrement lifetimes, drop resources at 1."""
    out = {}
    for epr, r in rho.items():
        if r.lifetime > 1:
            out[epr] = Resource(r.epr, r.value, r.subs, r.lifetime - 1,
                                r.expiry_handler, r.creator)
    return out


# --------------------------------------------------------------------------
# Handler-spawning sets


def notif_set(orch: str, rho: dict) -> list[HandlerInstance]:
    """Subscription handlers of `orch` whose condition holds right now."""
    out = []
    for epr in sorted(rho):
        r = rho[epr]
        for sub in r.subs:
            if sub.orch == orch and not isinstance(sub.handler, Empty) \
                    and eval_resource_cond(sub.cond, r.value):
                out.append(HandlerInstance(("sub", epr, orch), sub.handler))
    return out


def expiry_set(orch: str, rho: dict, target: str = "creator") -> list[HandlerInstance]:
    """Expiry handlers triggered for `orch` by resources at lifetime 1.

    `target` selects who receives the handler: the resource creator, its
    subscribers, or both.
    """
    if target not in EXPIRY_TARGETS:
        raise ValueError(f"bad expiry target {target!r}")
    out = []
    for epr in sorted(rho):
        r = rho[epr]
        if r.lifetime != 1 or isinstance(r.expiry_handler, Empty):
            continue
        hit = False
        if target in ("creator", "both") and r.creator == orch:
            hit = True
        if target in ("subscribers", "both") and any(s.orch == orch for s in r.subs):
            hit = True
        if hit:
            out.append(HandlerInstance(("exp", epr), r.expiry_handler))
    return out


# --------------------------------------------------------------------------
# Canonical state keys


def render_subscription(sub: Subscription) -> str:
    return f"({sub.orch},{render_cond(sub.cond)},{render_activity(sub.handler)})"


def render_resource(r: Resource) -> str:
    subs = ";".join(render_subscription(s) for s in sorted(r.subs, key=lambda s: s.orch))
    return f"{r.epr}=({r.value},[{subs}],{r.lifetime},{render_activity(r.expiry_handler)},{r.creator})"


def render_instance(h: HandlerInstance) -> str:
    return f"{h.origin_text()}|{render_activity(h.remaining)}"


def canonical_key(cs: ChorState) -> str:
    """Injective key for structural equality: pools are order-insensitive."""
    parts = []
    for loc in cs.locals:
        pool = "&".join(render_instance(h) for h in sorted_pool(loc.pool))
        sigma = ",".join(f"{k}={v}" for k, v in sorted(loc.sigma.items()))
        parts.append(f"{loc.orch}:{{{render_activity(loc.activity)}}}[{pool}]{{{sigma}}}")
    rho = ";".join(render_resource(cs.rho[epr]) for epr in sorted(cs.rho))
    return " / ".join(parts) + " # " + rho
