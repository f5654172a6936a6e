import dataclasses
import random

from hypothesis import given, settings, strategies as st

from fnv import check_net, elaborate, parse
from fnv.model import ConnectorDecl, dotted
from fnv.netcheck import check_net_def, senders_by_signal

from generators import random_model
from oracles import senders_regrouped


def codes(diags):
    return [(d.code, d.severity) for d in diags]


def test_cls_net_is_clean(cls_model):
    assert check_net(cls_model, "CarComfort") == []


def test_two_senders_give_one_n1():
    m = parse("funcnet N { block A; block B; block C; connect A -> C : S; connect B -> C : S; }")
    found = check_net(m, "N")
    assert codes(found) == [("N1", "error")]
    assert found[0].subject == "N:S"


def test_unused_block_port_warns():
    m = parse("funcnet N { block A { in Speed; } block B; connect A -> B : X; }")
    found = check_net(m, "N")
    assert codes(found) == [("N6", "warning")]
    assert found[0].subject == "N:A.Speed"


def test_boundary_in_signal_sent_again_is_n1():
    m = parse("funcnet N { in S; block A; block B; connect N -> A : S; connect B -> A : S; }")
    assert codes(check_net(m, "N")) == [("N1", "error")]


def test_self_loop_is_n3():
    m = parse("funcnet N { block A; block B; connect A -> A, B : S; }")
    assert codes(check_net(m, "N")) == [("N3", "error")]


def test_signal_less_and_stereotyped_are_n4():
    m = parse("funcnet N { block A; block B; block C; connect A -> B; connect B -[M]-> C : Q; }")
    assert codes(check_net(m, "N")) == [("N4", "error"), ("N4", "error")]


def test_elaboration_errors_only():
    m = parse("funcnet N { block A; block B; connect A -> Z : S; connect A -> B; }")
    assert codes(check_net(m, "N")) == [("N2", "error")]


def test_idempotent(cls_model):
    m = parse("funcnet N { in Q; block A { out Z; } block B; connect A -> B : S; connect B -> A : S; }")
    first = check_net(m, "N")
    assert first == check_net(m, "N") == list(check_net_def.__wrapped__(m.net("N")))
    assert [d.code for d in first] == ["N1", "N6", "N6"]


def test_n1_soundness_on_cls(cls_model):
    tree = elaborate(cls_model.net("CarComfort"))
    groups = senders_regrouped(tree)
    assert all(len(s) == 1 for s in groups.values())
    assert set(groups) == set(senders_by_signal(tree))


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_n1_soundness_random(seed):
    model = random_model(random.Random(seed))
    for name, net in model.funcnets.items():
        if any(d.is_error for d in check_net(model, name)):
            continue
        groups = senders_regrouped(elaborate(net))
        assert all(len(s) == 1 for s in groups.values())


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_second_sender_adds_exactly_one_n1(cls_model, data):
    net = cls_model.net("CarComfort")
    tree = elaborate(net)
    senders = senders_by_signal(tree)
    signal = data.draw(st.sampled_from(sorted(s for s in senders if "." not in s)))
    (sender,) = senders[signal]
    leaves = sorted(n.qname for n in tree.leaves() if n.qname != sender)
    src = data.draw(st.sampled_from(leaves))
    dst = data.draw(st.sampled_from([q for q in leaves if q != src]))
    extra = ConnectorDecl(src, (dst,), signal, None)
    mutated = dataclasses.replace(net, connectors=net.connectors + (extra,))
    before = [d for d in check_net_def(net) if d.is_error]
    after = [d for d in check_net_def(mutated) if d.is_error]
    assert before == []
    assert [(d.code, d.subject) for d in after] == [("N1", f"CarComfort:{signal}")]
    assert dotted(src) in after[0].message
