"""Executable semantics for service choreographies with leased resources."""

from .choreography import (Blocked, ChoreographyDef, ChorStep, Config,
                           chor_action_steps, chor_delay, initial_state)
from .dsl import parse_model, parse_source, print_model, validate_model
from .errors import ModelError, NotFound, ParseError
from .explorer import (Limits, Lts, explore, export_dot, export_json,
                       find_trace, find_trace_labels, load_json, random_walk)
from .orchestration import OrchestratorDef
from .state import ChorState, LocalState, Resource, Subscription, canonical_key
from .terms import OpDef, PartnerLink

__all__ = [
    "Blocked", "ChoreographyDef", "ChorStep", "Config", "chor_action_steps",
    "chor_delay", "initial_state", "parse_model", "parse_source",
    "print_model", "validate_model", "ModelError", "NotFound", "ParseError",
    "Limits", "Lts", "explore", "export_dot", "export_json", "find_trace",
    "find_trace_labels", "load_json", "random_walk", "OrchestratorDef",
    "ChorState", "LocalState", "Resource", "Subscription", "canonical_key",
    "OpDef", "PartnerLink",
]

__version__ = "0.1.0"
