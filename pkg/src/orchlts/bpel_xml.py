"""Importer for the WS-BPEL/WSRF XML subset.

Each orchestrator arrives as one XML process document; channel directions,
operation bodies, initial variable values, and the parameters of the
resource-factory idiom come from a JSON bindings sidecar, since the XML
subset does not carry them.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

from .choreography import ChoreographyDef, Config
from .dsl import parse_activity_text, parse_cond_text, parse_expr_text
from .errors import MissingBinding, UnsupportedElement
from .orchestration import OrchestratorDef
from .terms import (EMPTY, Activity, Assign, CreateResource, Empty, Exit,
                    GetProp, GuardedAssign, Invoke, OpDef, Par, PartnerLink,
                    Pick, PickBranch, Receive, Reply, ReplyBar, Seq,
                    SetProp, SetTimeout, Subscribe, Throw, VarRef, Wait,
                    While)

# WSRF/WSN namespaces, matched by URI; the prefix table is configurable
DEFAULT_NS = {
    "wsrp": "http://docs.oasis-open.org/wsrf/rp-2",
    "wsrl": "http://docs.oasis-open.org/wsrf/rl-2",
    "wsnt": "http://docs.oasis-open.org/wsn/b-2",
}

_CORE = {"process", "sequence", "flow", "while", "pick", "onMessage",
         "onAlarm", "receive", "reply", "invoke", "assign", "wait", "empty",
         "exit", "throw", "copy", "from", "to", "for", "condition",
         "faultHandlers", "eventHandlers", "variables", "variable",
         "partnerLinks", "partnerLink"}


def _split(tag: str) -> tuple[str, str]:
    if tag.startswith("{"):
        uri, local = tag[1:].split("}", 1)
        return uri, local
    return "", tag


class _Importer:
    def __init__(self, bindings: dict, ns: Optional[dict] = None):
        self.bindings = bindings
        self.ns = dict(DEFAULT_NS)
        if ns:
            self.ns.update(ns)
        self.uri_to_prefix = {uri: p for p, uri in self.ns.items()}
        self.orch: str = ""
        self.factory_queue: list[dict] = []

    # -- helpers -------------------------------------------------------------

    def kind_of(self, elem: ET.Element) -> str:
        """Row key: bare local name for BPEL, prefix:local for WSRF/WSN."""
        uri, local = _split(elem.tag)
        prefix = self.uri_to_prefix.get(uri)
        if prefix:
            return f"{prefix}:{local}"
        return local

    def reject(self, elem: ET.Element, hint: str = ""):
        uri, local = _split(elem.tag)
        raise UnsupportedElement(local, f"orchestrator {self.orch}", hint)

    def attr(self, elem: ET.Element, name: str) -> str:
        value = elem.get(name)
        if value is None:
            self.reject(elem, f"missing attribute {name!r}")
        return value

    def child(self, elem: ET.Element, kind: str) -> Optional[ET.Element]:
        for c in elem:
            if self.kind_of(c) == kind:
                return c
        return None

    def activity_children(self, elem: ET.Element,
                          skip: tuple[str, ...] = ()) -> list[ET.Element]:
        return [c for c in elem if self.kind_of(c) not in skip]

    # -- element translation ---------------------------------------------------

    def convert(self, elem: ET.Element) -> Activity:
        kind = self.kind_of(elem)
        if kind == "empty":
            return Empty()
        if kind == "exit":
            return Exit()
        if kind == "throw":
            return Throw()
        if kind == "receive":
            return Receive(self.attr(elem, "partnerLink"),
                           self.attr(elem, "operation"),
                           self.attr(elem, "variable"))
        if kind == "reply":
            return Reply(self.attr(elem, "partnerLink"),
                         self.attr(elem, "variable"))
        if kind == "invoke":
            return self.convert_invoke(elem)
        if kind == "assign":
            return self.convert_assign(elem)
        if kind == "wait":
            for_el = self.child(elem, "for")
            if for_el is None or not (for_el.text or "").strip():
                self.reject(elem, "wait needs a <for> duration")
            return Wait(int(for_el.text.strip()))
        if kind == "sequence":
            return self.convert_body(list(elem), Seq)
        if kind == "flow":
            return self.convert_body(list(elem), Par)
        if kind == "while":
            cond_el = self.child(elem, "condition")
            text = elem.get("condition") or (
                cond_el.text.strip() if cond_el is not None and cond_el.text else None)
            if text is None:
                self.reject(elem, "while needs a condition")
            body = [c for c in elem if self.kind_of(c) != "condition"]
            return While(parse_cond_text(text), self.convert_body(body, Seq))
        if kind == "pick":
            return self.convert_pick(elem)
        if kind == "wsrp:GetResourceProperty":
            # the property name in the text is informational only: the model
            # keeps a single integer property per resource
            return GetProp(self.attr(elem, "resource"),
                           self.attr(elem, "variable"))
        if kind == "wsrp:SetResourceProperties":
            upd = self.child(elem, "wsrp:Update")
            if upd is None or not (upd.text or "").strip():
                self.reject(elem, "expected a <wsrp:Update> with an integer")
            return SetProp(self.attr(elem, "resource"), int(upd.text.strip()))
        if kind == "wsrl:SetTerminationTime":
            req = self.child(elem, "wsrl:RequestedTerminationTime")
            if req is None or not (req.text or "").strip():
                self.reject(elem, "expected <wsrl:RequestedTerminationTime>")
            return SetTimeout(self.attr(elem, "resource"), int(req.text.strip()))
        if kind == "wsnt:Subscribe":
            return self.convert_subscribe(elem)
        if kind == "wsnt:Notify":
            self.reject(elem, "Notify is a runtime effect (it spawns the"
                        " associated event handler activity), not syntax")
        self.reject(elem)

    def convert_invoke(self, elem: ET.Element) -> Activity:
        pl = self.attr(elem, "partnerLink")
        op = self.attr(elem, "operation")
        if pl == "Factory" and op == "CreateResource":
            if not self.factory_queue:
                raise MissingBinding(
                    f"factory parameters for orchestrator {self.orch}")
            params = self.factory_queue.pop(0)
            handler = parse_activity_text(params.get("handler", "empty"))
            return CreateResource(params["epr"], int(params["value"]),
                                  int(params["lifetime"]), handler)
        var_in = self.attr(elem, "inputVariable")
        var_out = elem.get("outputVariable")
        invoke = Invoke(pl, op, var_in)
        if var_out is None:
            return invoke
        return Seq(invoke, ReplyBar(pl, var_out))

    def convert_assign(self, elem: ET.Element) -> Activity:
        copy = self.child(elem, "copy")
        if copy is None:
            self.reject(elem, "expected a <copy>")
        from_el = self.child(copy, "from")
        to_el = self.child(copy, "to")
        if from_el is None or to_el is None:
            self.reject(elem, "expected <from> and <to>")
        if from_el.get("variable"):
            expr = VarRef(from_el.get("variable"))
        elif (from_el.text or "").strip():
            expr = parse_expr_text(from_el.text.strip())
        else:
            self.reject(elem, "empty <from>")
        return Assign(expr, self.attr(to_el, "variable"))

    def _is_epr_assign(self, elem: ET.Element) -> bool:
        """The assign that stores the factory's endpoint reference."""
        if self.kind_of(elem) != "assign":
            return False
        copy = self.child(elem, "copy")
        if copy is None:
            return False
        from_el = self.child(copy, "from")
        if from_el is None:
            return False
        query = (from_el.get("query") or "").lower()
        return "endpointreference" in query

    def convert_body(self, children: list[ET.Element], ctor) -> Activity:
        acts = []
        i = 0
        while i < len(children):
            elem = children[i]
            act = self.convert(elem)
            # the factory idiom spans two elements: the invoke and the assign
            # that extracts the returned endpoint reference
            if (isinstance(act, CreateResource) and i + 1 < len(children)
                    and self._is_epr_assign(children[i + 1])):
                i += 1
            acts.append(act)
            i += 1
        if not acts:
            return EMPTY
        out = acts[-1]
        for act in reversed(acts[:-1]):
            out = ctor(act, out)
        return out

    def convert_pick(self, elem: ET.Element) -> Activity:
        branches = []
        alarm: Activity = EMPTY
        timeout = None
        for c in elem:
            kind = self.kind_of(c)
            if kind == "onMessage":
                branches.append(PickBranch(self.attr(c, "partnerLink"),
                                           self.attr(c, "operation"),
                                           self.attr(c, "variable"),
                                           self.convert_body(list(c), Seq)))
            elif kind == "onAlarm":
                for_el = self.child(c, "for")
                if for_el is None or not (for_el.text or "").strip():
                    self.reject(c, "onAlarm needs a <for> duration")
                timeout = int(for_el.text.strip())
                body = [x for x in c if self.kind_of(x) != "for"]
                alarm = self.convert_body(body, Seq)
            else:
                self.reject(c)
        if timeout is None:
            self.reject(elem, "pick needs an <onAlarm>")
        return Pick(tuple(branches), alarm, timeout)

    def convert_subscribe(self, elem: ET.Element) -> Activity:
        consumer = self.child(elem, "wsnt:ConsumerReference")
        producer = self.child(elem, "wsnt:ProducerReference")
        precond = self.child(elem, "wsnt:Precondition")
        if consumer is None or producer is None or precond is None:
            self.reject(elem, "expected ConsumerReference, ProducerReference"
                        " and Precondition")
        handler: Activity = EMPTY
        rest = [c for c in elem if c not in (consumer, producer, precond)]
        if rest:
            handler = self.convert_body(rest, Seq)
        return Subscribe(consumer.text.strip(), producer.text.strip(),
                         parse_cond_text(precond.text.strip()), handler)

    # -- process documents -----------------------------------------------------

    def convert_process(self, root: ET.Element) -> OrchestratorDef:
        if self.kind_of(root) != "process":
            self.reject(root, "expected a <process> root")
        orch = self.attr(root, "name")
        self.orch = orch
        self.factory_queue = list(self.bindings.get("factory", {}).get(orch, []))
        fault: Activity = EMPTY
        handlers: list[tuple[Activity, bool]] = []
        body: list[ET.Element] = []
        for c in root:
            kind = self.kind_of(c)
            if kind == "faultHandlers":
                fault = self.convert_body(list(c), Seq)
            elif kind == "eventHandlers":
                for h in c:
                    at_start = (h.get("atStart") or "no") == "yes"
                    handlers.append((self.convert(h), at_start))
            elif kind in ("variables", "partnerLinks"):
                continue  # declarations come from the bindings sidecar
            else:
                body.append(c)
        main = self.convert_body(body, Seq)
        variables = self.bindings.get("variables", {}).get(orch)
        if variables is None:
            raise MissingBinding(f"initial variables for orchestrator {orch}")
        return OrchestratorDef(orch, tuple(variables.items()), main, fault,
                               tuple(handlers))


def _ops_from_bindings(bindings: dict) -> dict[str, OpDef]:
    ops = {}
    for name, spec in bindings.get("ops", {}).items():
        body = tuple(GuardedAssign(parse_cond_text(g["guard"]),
                                   g["target"],
                                   parse_expr_text(g["rhs"]))
                     for g in spec.get("body", []))
        ops[name] = OpDef(name, tuple(spec.get("params", [])), body)
    return ops


def _partnerlinks_from_bindings(bindings: dict) -> dict[str, PartnerLink]:
    pls = {}
    for name, spec in bindings.get("partnerlinks", {}).items():
        pls[name] = PartnerLink(name, spec["sender"], spec["receiver"])
    return pls


def _config_from_bindings(bindings: dict) -> Config:
    spec = bindings.get("config", {})
    dom = spec.get("open-domain")
    return Config(spec.get("expiry-target", "creator"),
                  tuple(dom) if dom is not None else None)


def import_bpel(xml_texts: list[str], bindings: dict,
                ns: Optional[dict] = None) -> ChoreographyDef:
    """Translate one XML document per orchestrator plus a bindings sidecar."""
    importer = _Importer(bindings, ns)
    orchs = {}
    for text in xml_texts:
        odef = importer.convert_process(ET.fromstring(text))
        orchs[odef.id] = odef
    order = bindings.get("order", sorted(orchs))
    missing = [o for o in order if o not in orchs]
    if missing:
        raise MissingBinding(f"no XML document for orchestrator {missing[0]}")
    return ChoreographyDef(bindings.get("name", "imported"),
                           tuple(orchs[o] for o in order),
                           _partnerlinks_from_bindings(bindings),
                           _ops_from_bindings(bindings),
                           _config_from_bindings(bindings))
