"""Global level: interleaving, synchronization, exit, and the global clock."""

from conftest import mk_chor, mk_orch, seq
from orchlts.choreography import (Blocked, chor_action_steps, chor_delay,
                                  initial_state, sync_enabled)
from orchlts.state import ChorState, HandlerInstance, Resource, Subscription
from orchlts.terms import (EMPTY, EXIT, THROW, Assign, BoolLit, Cmp,
                           GuardedAssign, Invoke, Lit, OpDef, PartnerLink,
                           Pick, PickBranch, Receive, Reply, ReplyBar, Seq,
                           VarRef, Wait)

def _op(name="store5"):
    return OpDef(name, (), (GuardedAssign(BoolLit(True), "y", Lit(5)),))


PL = PartnerLink("pl", "A", "B")


def pair_chor(main_a, main_b, fault_a=EMPTY, fault_b=EMPTY, config=None):
    a = mk_orch("A", (("x", 1),), main_a, fault_a)
    b = mk_orch("B", (("y", 0),), main_b, fault_b)
    kw = {"config": config} if config else {}
    return mk_chor([a, b], [PL], [_op()], **kw)


def by_rule(steps, rule):
    return [st for st in steps if st.rule == rule]


def test_initial_state_spawns_at_start_handlers():
    handler = (Wait(1), True)
    late = (Wait(2), False)
    cdef = mk_chor([mk_orch("A", (("x", 0),), EMPTY, handlers=(handler, late))])
    cs = initial_state(cdef)
    assert cs.locals[0].pool == (HandlerInstance(("decl", 0), Wait(1)),)
    assert cs.rho == {}


def test_chor1_exit_stops_every_orchestrator():
    cdef = pair_chor(EXIT, Wait(1))
    steps = by_rule(chor_action_steps(cdef, initial_state(cdef)), "Chor1")
    assert len(steps) == 1
    st = steps[0]
    assert st.label.kind == "exit"
    assert all(l.activity == EMPTY and l.pool == () for l in st.state.locals)
    assert st.state.locals[0].sigma == {"x": 1}  # stores survive


def test_chor1_needs_an_exit():
    cdef = pair_chor(Assign(Lit(2), "x"), Wait(1))
    assert by_rule(chor_action_steps(cdef, initial_state(cdef)), "Chor1") == []


def test_chor2_internal_step_of_one_orchestrator():
    cdef = pair_chor(Assign(Lit(2), "x"), Wait(1))
    steps = chor_action_steps(cdef, initial_state(cdef))
    assert [st.rule for st in steps] == ["Chor2"]
    st = steps[0]
    assert st.orch == "A"
    assert st.state.locals[0].sigma == {"x": 2}
    assert st.state.locals[1].activity == Wait(1)  # bystander untouched


def test_chor2_throw_is_internal_and_triggers_the_fault_handler():
    cdef = pair_chor(THROW, Wait(1), fault_a=Assign(Lit(9), "x"))
    steps = chor_action_steps(cdef, initial_state(cdef))
    assert [st.rule for st in steps] == ["Chor2"]
    assert steps[0].label.kind == "throw"
    assert steps[0].state.locals[0].activity == Assign(Lit(9), "x")


def test_chor2_excludes_unmatched_communication():
    cdef = pair_chor(Invoke("pl", "store5", "x"), Wait(1))
    assert chor_action_steps(cdef, initial_state(cdef)) == []


def test_chor2_bystander_gains_newly_enabled_handlers():
    sub = Subscription("B", Cmp(">=", VarRef("EPR"), Lit(2)), Wait(9))
    rho = {"E": Resource("E", 0, (sub,), 4, EMPTY, "A")}
    cdef = pair_chor(seq(Assign(Lit(2), "x"), EMPTY), Wait(1))
    cs = ChorState(initial_state(cdef).locals, rho)
    # A's internal step does not change E, so B's condition stays false
    st = chor_action_steps(cdef, cs)[0]
    assert st.state.locals[1].pool == ()
    # but once the resource satisfies the condition, B's handler appears
    rho2 = {"E": Resource("E", 3, (sub,), 4, EMPTY, "A")}
    cs2 = ChorState(initial_state(cdef).locals, rho2)
    st2 = chor_action_steps(cdef, cs2)[0]
    assert [h.origin for h in st2.state.locals[1].pool] == [("sub", "E", "B")]


def test_chor4_invoke_receive_handshake():
    cdef = pair_chor(Invoke("pl", "store5", "x"), Receive("pl", "store5", "y"))
    steps = chor_action_steps(cdef, initial_state(cdef))
    assert [st.rule for st in steps] == ["Chor4"]
    st = steps[0]
    assert st.label.text == "invoke(pl,store5,x)"
    assert st.state.locals[0].activity == EMPTY
    assert st.state.locals[1].activity == EMPTY
    # y received 1 and the op body then stored 5
    assert st.state.locals[1].sigma == {"y": 5}


def test_chor4_needs_matching_operation():
    cdef = mk_chor([mk_orch("A", (("x", 1),), Invoke("pl", "store5", "x")),
                    mk_orch("B", (("y", 0),), Receive("pl", "other", "y"))],
                   [PL], [_op(), _op("other")])
    assert chor_action_steps(cdef, initial_state(cdef)) == []


def test_chor5_reply_replybar_handshake():
    cdef = pair_chor(ReplyBar("pl", "x"), Reply("pl", "y"))
    steps = chor_action_steps(cdef, initial_state(cdef))
    assert [st.rule for st in steps] == ["Chor5"]
    st = steps[0]
    assert st.label.text == "reply(pl,0)"  # the replier's current value of y
    assert st.state.locals[0].sigma == {"x": 0}  # delivered to the caller


def test_chor5_needs_both_endpoints():
    cdef = pair_chor(ReplyBar("pl", "x"), Wait(1))
    assert chor_action_steps(cdef, initial_state(cdef)) == []


def test_chor6_invoke_meets_pick_branch():
    pick = Pick((PickBranch("pl", "store5", "y", Assign(Lit(1), "y")),),
                EMPTY, 3)
    cdef = pair_chor(Invoke("pl", "store5", "x"), pick)
    steps = chor_action_steps(cdef, initial_state(cdef))
    assert [st.rule for st in steps] == ["Chor6"]
    st = steps[0]
    assert st.state.locals[1].activity == Assign(Lit(1), "y")
    assert st.state.locals[1].sigma == {"y": 5}


def test_chor6_not_after_the_alarm_took_over():
    pick = Pick((PickBranch("pl", "store5", "y", EMPTY),), EMPTY, 0)
    cdef = pair_chor(Invoke("pl", "store5", "x"), pick)
    assert by_rule(chor_action_steps(cdef, initial_state(cdef)), "Chor6") == []


def test_chor3_global_delay_moves_everyone_and_ticks_resources():
    cdef = pair_chor(Wait(2), Wait(1))
    rho = {"E": Resource("E", 7, (), 2, EMPTY, "A")}
    cs = ChorState(initial_state(cdef).locals, rho)
    nxt = chor_delay(cdef, cs)
    assert isinstance(nxt, ChorState)
    assert nxt.locals[0].activity == Wait(1)
    assert nxt.locals[1].activity == EMPTY
    assert nxt.rho["E"].lifetime == 1


def test_chor3_blocked_by_a_pending_synchronization():
    cdef = pair_chor(Invoke("pl", "store5", "x"), Receive("pl", "store5", "y"))
    cs = initial_state(cdef)
    assert sync_enabled(cdef, cs)
    blocked = chor_delay(cdef, cs)
    assert isinstance(blocked, Blocked) and "communication" in blocked.reason


def test_chor3_blocked_by_an_urgent_orchestrator():
    cdef = pair_chor(Wait(1), Assign(Lit(1), "y"))
    blocked = chor_delay(cdef, initial_state(cdef))
    assert isinstance(blocked, Blocked) and "urgent" in blocked.reason


def test_chor3_unmatched_communication_may_wait():
    # an invoke with no listener is not a pending synchronization
    cdef = pair_chor(Invoke("pl", "store5", "x"), Wait(1))
    cs = initial_state(cdef)
    assert not sync_enabled(cdef, cs)
    assert isinstance(chor_delay(cdef, cs), ChorState)


def test_urgent_internal_option_blocks_delay_on_any_action():
    cdef = pair_chor(Wait(1), Pick((), Assign(Lit(1), "y"), 1))
    cs = initial_state(cdef)
    assert isinstance(chor_delay(cdef, cs), ChorState)
    cdef2 = pair_chor(Assign(Lit(2), "x"), Wait(1))
    cs2 = initial_state(cdef2)
    blocked = chor_delay(cdef2, cs2, urgent_internal=True)
    assert isinstance(blocked, Blocked)
