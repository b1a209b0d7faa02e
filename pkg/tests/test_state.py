import pytest

from orchlts.errors import (NonPositiveLifetime, UndeclaredVariable,
                            UnknownResource)
from orchlts.state import (ChorState, HandlerInstance, LocalState, Resource,
                           Subscription, apply_op, canonical_key, expiry_set,
                           notif_set, resource_add_subscription,
                           resource_create, resource_set_lifetime,
                           resource_set_value, resource_tick)
from orchlts.terms import (EMPTY, Assign, BoolLit, Cmp, GuardedAssign, Lit,
                           OpDef, VarRef, Wait)

CMP = OpDef("cmp", (), (GuardedAssign(Cmp(">", VarRef("vbid"), VarRef("vw")),
                                      "vw", VarRef("vbid")),))


def test_apply_op_guard_taken():
    # the winning-bid comparison: a higher bid replaces the stored one
    assert apply_op(CMP, [], {"vbid": 30, "vw": 25}) == {"vbid": 30, "vw": 30}


def test_apply_op_guard_skipped():
    assert apply_op(CMP, [], {"vbid": 20, "vw": 25}) == {"vbid": 20, "vw": 25}


def test_apply_op_params_are_temporary():
    op = OpDef("inc", ("d",),
               (GuardedAssign(BoolLit(True), "x", VarRef("d")),))
    out = apply_op(op, [7], {"x": 0})
    assert out == {"x": 7}  # the parameter does not leak into the store


def test_apply_op_undeclared_target():
    op = OpDef("bad", (), (GuardedAssign(BoolLit(True), "y", Lit(1)),))
    with pytest.raises(UndeclaredVariable):
        apply_op(op, [], {"x": 0})


def _res(value=25, lifetime=4, subs=()):
    return {"EPR": Resource("EPR", value, tuple(subs), lifetime, Assign(Lit(0), "d"),
                            "Osys")}


def test_resource_updates_do_not_mutate():
    rho = _res()
    rho2 = resource_set_value(rho, "EPR", 30)
    assert rho["EPR"].value == 25 and rho2["EPR"].value == 30
    rho3 = resource_set_lifetime(rho, "EPR", 9)
    assert rho3["EPR"].lifetime == 9 and rho["EPR"].lifetime == 4


def test_resource_update_unknown_id():
    with pytest.raises(UnknownResource):
        resource_set_value({}, "EPR", 1)
    with pytest.raises(UnknownResource):
        resource_add_subscription({}, "EPR", "O1", BoolLit(True), EMPTY)


def test_resource_lifetime_must_be_positive():
    with pytest.raises(NonPositiveLifetime):
        resource_set_lifetime(_res(), "EPR", 0)
    with pytest.raises(NonPositiveLifetime):
        Resource("E", 0, (), 0, EMPTY, "O")


def test_resource_create_is_noop_on_existing_id():
    rho = _res()
    assert resource_create(rho, "EPR", 99, 9, EMPTY, "O2") is rho


def test_subscription_replaces_same_subscriber():
    rho = resource_add_subscription(_res(), "EPR", "O1",
                                    Cmp(">=", VarRef("EPR"), Lit(0)), Wait(1))
    rho = resource_add_subscription(rho, "EPR", "O1",
                                    Cmp(">=", VarRef("EPR"), Lit(31)), Wait(1))
    subs = rho["EPR"].subs
    assert len(subs) == 1 and subs[0].cond == Cmp(">=", VarRef("EPR"), Lit(31))


def test_tick_decrements_and_drops_at_one():
    rho = {"A": Resource("A", 0, (), 2, EMPTY, "O"),
           "B": Resource("B", 0, (), 1, EMPTY, "O")}
    rho2 = resource_tick(rho)
    assert set(rho2) == {"A"} and rho2["A"].lifetime == 1
    assert resource_tick(rho2) == {}


def test_notif_set_checks_condition_and_owner():
    sub_true = Subscription("O1", Cmp(">=", VarRef("EPR"), Lit(0)), Wait(1))
    sub_false = Subscription("O2", Cmp(">=", VarRef("EPR"), Lit(99)), Wait(1))
    sub_empty = Subscription("O3", BoolLit(True), EMPTY)
    rho = _res(subs=(sub_true, sub_false, sub_empty))
    assert [h.origin for h in notif_set("O1", rho)] == [("sub", "EPR", "O1")]
    assert notif_set("O2", rho) == []
    assert notif_set("O3", rho) == []  # an empty handler never spawns


def test_expiry_set_routing():
    sub = Subscription("O1", BoolLit(True), Wait(1))
    rho = _res(lifetime=1, subs=(sub,))
    assert [h.origin for h in expiry_set("Osys", rho, "creator")] == [("exp", "EPR")]
    assert expiry_set("O1", rho, "creator") == []
    assert [h.origin for h in expiry_set("O1", rho, "subscribers")] == [("exp", "EPR")]
    assert expiry_set("Osys", rho, "subscribers") == []
    assert expiry_set("O1", rho, "both") and expiry_set("Osys", rho, "both")


def test_expiry_set_only_at_lifetime_one():
    assert expiry_set("Osys", _res(lifetime=2), "creator") == []


def test_canonical_key_pool_is_a_multiset():
    h1 = HandlerInstance(("sub", "E", "O"), Wait(1))
    h2 = HandlerInstance(("exp", "E"), Wait(2))
    a = ChorState((LocalState("O", EMPTY, (h1, h2), {"x": 0}),), {})
    b = ChorState((LocalState("O", EMPTY, (h2, h1), {"x": 0}),), {})
    assert canonical_key(a) == canonical_key(b)
    assert a == b and hash(a) == hash(b)


def test_canonical_key_distinguishes_stores():
    a = ChorState((LocalState("O", EMPTY, (), {"x": 0}),), {})
    b = ChorState((LocalState("O", EMPTY, (), {"x": 1}),), {})
    assert canonical_key(a) != canonical_key(b)
