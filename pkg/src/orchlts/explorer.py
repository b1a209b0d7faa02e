"""Bounded explicit-state exploration of a choreography's transition system."""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

from .activity import DELAY, Label
from .choreography import (ChoreographyDef, chor_action_steps, chor_delay,
                           initial_state)
from .errors import NotFound
from .state import ChorState, canonical_key, render_instance, sorted_pool
from .terms import Empty, render_activity, render_cond

FLAG_ORDER = ("terminal-success", "deadlock", "timelock", "frontier-cut")


@dataclass
class Limits:
    max_states: int = 10000
    max_depth: Optional[int] = None
    max_delay_steps: Optional[int] = None

    def __post_init__(self):
        for name in ("max_states", "max_depth", "max_delay_steps"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass
class StateRec:
    index: int
    key: str
    state: ChorState
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class Edge:
    src: int
    label: Label
    dst: int
    rule: str
    orch: str = ""


@dataclass
class Lts:
    states: list[StateRec]
    edges: list[Edge]
    initial: int = 0
    limits_hit: bool = False

    def out_edges(self, idx: int) -> list[Edge]:
        return [e for e in self.edges if e.src == idx]


def _is_terminal_success(cs: ChorState) -> bool:
    return all(isinstance(l.activity, Empty) and not l.pool for l in cs.locals)


def explore(cdef: ChoreographyDef, limits: Optional[Limits] = None,
            urgent_internal: bool = False) -> Lts:
    """Breadth-first closure of action and delay steps, deduplicated by key."""
    limits = limits or Limits()
    init = initial_state(cdef)
    key0 = canonical_key(init)
    states = [StateRec(0, key0, init)]
    by_key = {key0: 0}
    depth = {0: 0}
    delay_run = {0: 0}  # best-known count of consecutive delays on arrival
    edges: list[Edge] = []
    expanded: set[int] = set()
    delay_expanded: set[int] = set()
    cut: set[int] = set()  # expanded, but with successors dropped by a limit
    limits_hit = False
    orch_pos = {od.id: i for i, od in enumerate(cdef.orchestrators)}
    queue = deque([0])

    def discover(cs: ChorState, d: int, run: int) -> Optional[int]:
        nonlocal limits_hit
        key = canonical_key(cs)
        if key in by_key:
            idx = by_key[key]
            if run < delay_run[idx]:
                delay_run[idx] = run
                if idx not in delay_expanded:
                    queue.append(idx)
            return idx
        if len(states) >= limits.max_states:
            limits_hit = True
            return None
        idx = len(states)
        states.append(StateRec(idx, key, cs))
        by_key[key] = idx
        depth[idx] = d
        delay_run[idx] = run
        queue.append(idx)
        return idx

    while queue:
        idx = queue.popleft()
        cs = states[idx].state
        d = depth[idx]
        if limits.max_depth is not None and d >= limits.max_depth:
            limits_hit = True
            continue
        if idx not in expanded:
            expanded.add(idx)
            steps = chor_action_steps(cdef, cs)
            keyed = [(orch_pos.get(st.orch, len(orch_pos)), st.rule,
                      st.label.text, canonical_key(st.state), st)
                     for st in steps]
            keyed.sort(key=lambda t: t[:4])
            seen = set()
            for pos, rule, text, skey, st in keyed:
                sig = (st.label, skey, rule, st.orch)
                if sig in seen:
                    continue
                seen.add(sig)
                dst = discover(st.state, d + 1, 0)
                if dst is None:
                    cut.add(idx)
                else:
                    edges.append(Edge(idx, st.label, dst, rule, st.orch))
        if idx not in delay_expanded:
            if (limits.max_delay_steps is not None
                    and delay_run[idx] >= limits.max_delay_steps):
                limits_hit = True
                cut.add(idx)
            else:
                res = chor_delay(cdef, cs, urgent_internal)
                if isinstance(res, ChorState):
                    delay_expanded.add(idx)
                    dst = discover(res, d + 1, delay_run[idx] + 1)
                    if dst is None:
                        cut.add(idx)
                    else:
                        edges.append(Edge(idx, DELAY, dst, "Chor3"))

    lts = Lts(states, edges, 0, limits_hit)
    classify(lts, expanded - cut)
    return lts


def classify(lts: Lts, expanded: Optional[set[int]] = None) -> Lts:
    """Fill per-state flags from the explored edges."""
    if expanded is None:
        expanded = set(range(len(lts.states)))
    has_action: dict[int, bool] = {}
    has_delay: dict[int, bool] = {}
    only_self_delay: dict[int, bool] = {}
    for rec in lts.states:
        has_action[rec.index] = False
        has_delay[rec.index] = False
        only_self_delay[rec.index] = True
    for e in lts.edges:
        if e.label.kind == "delay":
            has_delay[e.src] = True
            if e.dst != e.src:
                only_self_delay[e.src] = False
        else:
            has_action[e.src] = True
    for rec in lts.states:
        flags = []
        if _is_terminal_success(rec.state):
            flags.append("terminal-success")
        elif rec.index in expanded:
            if not has_action[rec.index]:
                if has_delay[rec.index] and not only_self_delay[rec.index]:
                    pass  # time passes productively; not stuck yet
                else:
                    flags.append("deadlock")
                if not has_delay[rec.index]:
                    flags.append("timelock")
        if rec.index not in expanded:
            flags.append("frontier-cut")
        rec.flags = tuple(f for f in FLAG_ORDER if f in flags)
    return lts


@dataclass(frozen=True)
class TraceStep:
    label: str
    src: int
    dst: int


def find_trace(lts: Lts, predicate: Callable[[StateRec], bool]) -> list[TraceStep]:
    """Shortest path from the initial state to a state matching the predicate."""
    if predicate(lts.states[lts.initial]):
        return []
    out: dict[int, list[Edge]] = {}
    for e in lts.edges:
        out.setdefault(e.src, []).append(e)
    parent: dict[int, tuple[int, Edge]] = {}
    queue = deque([lts.initial])
    seen = {lts.initial}
    while queue:
        idx = queue.popleft()
        for e in out.get(idx, ()):
            if e.dst in seen:
                continue
            seen.add(e.dst)
            parent[e.dst] = (idx, e)
            if predicate(lts.states[e.dst]):
                return _unwind(parent, lts.initial, e.dst)
            queue.append(e.dst)
    raise NotFound("no reachable state satisfies the predicate")


def _unwind(parent: dict, start: int, end: int) -> list[TraceStep]:
    steps = []
    cur = end
    while cur != start:
        prev, e = parent[cur]
        steps.append(TraceStep(e.label.text, e.src, e.dst))
        cur = prev
    steps.reverse()
    return steps


def find_trace_labels(lts: Lts, patterns: list[str]) -> list[TraceStep]:
    """Shortest path whose labels contain the patterns as a subsequence.

    Each pattern matches a label by substring.
    """
    if not patterns:
        return []
    out: dict[int, list[Edge]] = {}
    for e in lts.edges:
        out.setdefault(e.src, []).append(e)
    start = (lts.initial, 0)
    parent: dict[tuple, tuple[tuple, Edge]] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        idx, matched = queue.popleft()
        for e in out.get(idx, ()):
            m2 = matched + 1 if patterns[matched] in e.label.text else matched
            node = (e.dst, m2)
            if node in seen:
                continue
            seen.add(node)
            parent[node] = ((idx, matched), e)
            if m2 == len(patterns):
                steps = []
                cur = node
                while cur != start:
                    prev, pe = parent[cur]
                    steps.append(TraceStep(pe.label.text, pe.src, pe.dst))
                    cur = prev
                steps.reverse()
                return steps
            queue.append(node)
    raise NotFound("no path matches the label subsequence")


def random_walk(cdef: ChoreographyDef, seed: int, steps: int,
                urgent_internal: bool = False) -> list[str]:
    """Pseudo-random path of up to `steps` labels; deterministic per seed."""
    rng = random.Random(seed)
    cs = initial_state(cdef)
    labels: list[str] = []
    orch_pos = {od.id: i for i, od in enumerate(cdef.orchestrators)}
    for _ in range(steps):
        succ: list[tuple[tuple, Label, ChorState]] = []
        for st in chor_action_steps(cdef, cs):
            succ.append(((orch_pos.get(st.orch, 99), st.rule, st.label.text,
                          canonical_key(st.state)), st.label, st.state))
        res = chor_delay(cdef, cs, urgent_internal)
        if isinstance(res, ChorState):
            succ.append((("~", "Chor3", DELAY.text, canonical_key(res)),
                         DELAY, res))
        if not succ:
            break
        succ.sort(key=lambda t: tuple(map(str, t[0])))
        _, label, cs = succ[rng.randrange(len(succ))]
        labels.append(label.text)
    return labels


# --------------------------------------------------------------------------
# Serialization


def _json_obj(lts: Lts) -> dict:
    states = []
    for rec in lts.states:
        locals_ = []
        for loc in rec.state.locals:
            locals_.append({
                "orch": loc.orch,
                "activity": render_activity(loc.activity),
                "pool": [render_instance(h) for h in sorted_pool(loc.pool)],
                "sigma": {v: loc.sigma[v] for v in sorted(loc.sigma)},
            })
        rho = []
        for epr in sorted(rec.state.rho):
            r = rec.state.rho[epr]
            rho.append({
                "epr": r.epr,
                "value": r.value,
                "lifetime": r.lifetime,
                "subs": [{"orch": s.orch, "cond": render_cond(s.cond)}
                         for s in r.subs],
            })
        states.append({"id": rec.index, "key": rec.key,
                       "flags": list(rec.flags), "locals": locals_, "rho": rho})
    edges = [{"from": e.src, "label": e.label.text, "to": e.dst}
             for e in lts.edges]
    return {"states": states, "initial": lts.initial, "edges": edges,
            "limits_hit": lts.limits_hit}


@dataclass
class LoadedLts:
    """A transition system re-read from its JSON export (render-only view)."""
    obj: dict


def export_json(lts) -> str:
    obj = lts.obj if isinstance(lts, LoadedLts) else _json_obj(lts)
    return json.dumps(obj, indent=2) + "\n"


def load_json(text: str) -> LoadedLts:
    return LoadedLts(json.loads(text))


def export_dot(lts) -> str:
    obj = lts.obj if isinstance(lts, LoadedLts) else _json_obj(lts)
    lines = ["digraph lts {"]
    for st in obj["states"]:
        flag_text = ",".join(st["flags"])
        attr = f' [flags="{flag_text}"]' if flag_text else ""
        lines.append(f'  s{st["id"]}{attr};')
    for e in obj["edges"]:
        text = e["label"].replace('"', '\\"')
        lines.append(f'  s{e["from"]} -> s{e["to"]} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
