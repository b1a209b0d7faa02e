import random
from pathlib import Path

from orchlts.choreography import ChoreographyDef, Config
from orchlts.orchestration import OrchestratorDef
from orchlts.terms import (EMPTY, Assign, BoolLit, Cmp, CreateResource,
                           GetProp, GuardedAssign, Invoke, Lit, OpDef, Par,
                           PartnerLink, Pick, PickBranch, Receive, Reply,
                           ReplyBar, Seq, VarRef, Wait)

MODELS = Path(__file__).resolve().parent.parent / "models"


def read_model_text(name: str) -> str:
    return (MODELS / name).read_text(encoding="utf-8")


def mk_orch(oid, variables=(), main=EMPTY, fault=EMPTY, handlers=()):
    return OrchestratorDef(oid, tuple(variables), main, fault, tuple(handlers))


def mk_chor(orchs, pls=(), ops=(), config=Config(), name="test"):
    return ChoreographyDef(name, tuple(orchs),
                           {pl.name: pl for pl in pls},
                           {op.name: op for op in ops}, config)


NOOP = OpDef("noop")
PL_AB = PartnerLink("ab", "A", "B")


def seq(*acts):
    out = acts[-1]
    for act in reversed(acts[:-1]):
        out = Seq(act, out)
    return out


def random_explorable_model(rng: random.Random) -> ChoreographyDef:
    """A small closed model with a finite state space (no loops)."""
    n_orch = rng.randint(1, 3)
    ids = [f"P{i}" for i in range(n_orch)]
    pls = []
    if n_orch >= 2:
        for k in range(rng.randint(0, 2)):
            a, b = rng.sample(ids, 2)
            pls.append(PartnerLink(f"ch{k}", a, b))
    ops = [OpDef("store", (), (GuardedAssign(BoolLit(True), "x", VarRef("x")),))]

    def leaf(oid):
        choices = ["assign", "wait", "empty"]
        my_sends = [pl for pl in pls if pl.sender == oid]
        my_recvs = [pl for pl in pls if pl.receiver == oid]
        if my_sends:
            choices += ["invoke", "replybar"]
        if my_recvs:
            choices += ["receive", "reply", "pick"]
        kind = rng.choice(choices)
        if kind == "assign":
            return Assign(Lit(rng.randint(0, 3)), "x")
        if kind == "wait":
            return Wait(rng.randint(1, 2))
        if kind == "invoke":
            return Invoke(rng.choice(my_sends).name, "store", "x")
        if kind == "receive":
            return Receive(rng.choice(my_recvs).name, "store", "x")
        if kind == "reply":
            return Reply(rng.choice(my_recvs).name, "x")
        if kind == "replybar":
            return ReplyBar(rng.choice(my_sends).name, "x")
        if kind == "pick":
            pl = rng.choice(my_recvs)
            return Pick((PickBranch(pl.name, "store", "x", EMPTY),),
                        EMPTY, rng.randint(1, 2))
        return EMPTY

    def build(oid, budget):
        if budget <= 1:
            return leaf(oid)
        kind = rng.choice(["seq", "par", "leaf"])
        if kind == "leaf":
            return leaf(oid)
        left = build(oid, budget // 2)
        right = build(oid, budget - budget // 2)
        return Seq(left, right) if kind == "seq" else Par(left, right)

    orchs = []
    for oid in ids:
        main = build(oid, rng.randint(1, 6))
        if rng.random() < 0.3:
            main = Seq(CreateResource(f"R{oid}", rng.randint(0, 5),
                                      rng.randint(1, 3), EMPTY), main)
        if rng.random() < 0.3:
            main = Seq(main, GetProp(f"R{oid}", "x"))
        orchs.append(mk_orch(oid, (("x", 0),), main, fault=EMPTY))
    return mk_chor(orchs, pls, ops)
