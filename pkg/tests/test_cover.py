"""Ideal algebra, down/up-set fixpoints, and initial-state coverability."""

from __future__ import annotations

from itertools import islice
from itertools import product as iproduct
from random import Random

import pytest

from gen import random_counter_machine, random_downset
from oracles import (
    bfs_reach,
    covered_oracle,
    downset_members,
    ref_counter_step,
    ref_ideal_member,
    ref_post_downclosed,
)
from wstskit.counter import (
    OP_DEC,
    OP_INC,
    OP_NOOP,
    CounterConfig,
    CounterMachine,
    CounterTransition,
)
from wstskit.cover import (
    OMEGA,
    DownSet,
    Ideal,
    UpSet,
    backward_coverability,
    check_cover_monotone_bounded,
    downset_candidates,
    downset_contains,
    downset_normalize,
    downset_of_config,
    downset_post,
    downset_post_monotone,
    downset_subset,
    downset_union,
    entry_str,
    forward_cover_semiproc,
    ideal_contains,
    ideal_subset,
    noncover_semiproc,
    pre_basis,
    upset_contains,
    upset_normalize,
    vec_leq,
    x0_coverability,
)
from wstskit.verdict import Outcome


def cm(states, counters, trans, initial="q0"):
    return CounterMachine(tuple(states), tuple(counters), tuple(trans), initial)


def t(src, op, counter, tgt, zero=()):
    return CounterTransition(src, op, counter, frozenset(zero), tgt)


def test_entry_and_vec_basics():
    assert entry_str(3) == "3" and entry_str(OMEGA) == "ω"
    assert vec_leq((1, 2), (1, OMEGA))
    assert not vec_leq((OMEGA,), (5,))
    assert vec_leq((), ())


def test_ideal_show_and_membership():
    i = Ideal("q0", (2, OMEGA))
    assert i.show() == "q0:(2,ω)"
    assert ideal_contains(i, CounterConfig("q0", (2, 999)))
    assert not ideal_contains(i, CounterConfig("q0", (3, 0)))
    assert not ideal_contains(i, CounterConfig("q1", (0, 0)))
    assert ideal_subset(Ideal("q0", (1, 3)), i)
    assert not ideal_subset(i, Ideal("q0", (1, 3)))


def test_downset_normalize_is_canonical():
    a, b = Ideal("q0", (1,)), Ideal("q0", (3,))
    d = downset_normalize([a, b, a, Ideal("q1", (OMEGA,))])
    assert d.ideals == (Ideal("q0", (3,)), Ideal("q1", (OMEGA,)))
    assert downset_normalize(d.ideals) == d  # idempotent
    assert d.show() == "{q0:(3), q1:(ω)}"


def test_downset_normalize_preserves_denotation():
    rng = Random(3)
    for _ in range(40):
        m = random_counter_machine(rng)
        raw = [
            Ideal(
                rng.choice(m.states),
                tuple(
                    OMEGA if rng.random() < 0.2 else rng.randint(0, 3)
                    for _ in m.counters
                ),
            )
            for _ in range(rng.randint(1, 4))
        ]
        d = downset_normalize(raw)
        for control in m.states:
            for values in iproduct(range(5), repeat=len(m.counters)):
                x = CounterConfig(control, values)
                assert downset_contains(d, x) == any(
                    ref_ideal_member(i, x) for i in raw
                )


def test_downset_relations_match_enumeration():
    rng = Random(17)
    for _ in range(60):
        m = random_counter_machine(rng)
        d1 = random_downset(rng, m)
        d2 = random_downset(rng, m)
        m1 = downset_members(m, d1, 4)
        m2 = downset_members(m, d2, 4)
        assert downset_subset(d1, d2) == (m1 <= m2)
        assert downset_members(m, downset_union(d1, d2), 4) == (m1 | m2)
        x = CounterConfig(
            rng.choice(m.states), tuple(rng.randint(0, 4) for _ in m.counters)
        )
        assert downset_contains(d1, x) == any(
            ref_ideal_member(i, x) for i in d1.ideals
        )


def test_downset_of_config():
    d = downset_of_config(CounterConfig("q0", (2, 0)))
    assert d.ideals == (Ideal("q0", (2, 0)),)
    assert downset_contains(d, CounterConfig("q0", (1, 0)))
    assert not downset_contains(d, CounterConfig("q0", (2, 1)))


def test_downset_post_signature_check(m7):
    with pytest.raises(ValueError):
        downset_post(m7.machine, DownSet((Ideal("nope", (0,)),)))
    with pytest.raises(ValueError):
        downset_post(m7.machine, DownSet((Ideal("q0", (0, 0)),)))


def test_downset_post_denotation_exact():
    rng = Random(20260823)
    for _ in range(50):
        m = random_counter_machine(rng, zero_tests=True)
        d = random_downset(rng, m)
        got = downset_members(m, downset_post(m, d), 3)
        want = ref_post_downclosed(m, downset_members(m, d, 4), 3)
        assert got == want


def test_downset_post_hand_facts(m7):
    m = m7.machine
    assert downset_post(m, DownSet((Ideal("q0", (0,)),))) == DownSet((Ideal("q1", (1,)),))
    # the zero test contributes through the sub-ideal at value 0
    assert downset_post(m, DownSet((Ideal("q1", (1,)),))) == DownSet((Ideal("q2", (0,)),))
    # saturation from the initial closure
    d = downset_of_config(m.initial_config())
    seen = [d]
    while True:
        nxt = downset_union(d, downset_post(m, d))
        if nxt == d:
            break
        d = nxt
        seen.append(d)
    assert [s.show() for s in seen] == [
        "{q0:(0)}",
        "{q0:(0), q1:(1)}",
        "{q0:(0), q1:(1), q2:(0)}",
    ]


def test_closure_of_reach_need_not_be_inductive(m7):
    # the downward closure of the exact reach set from (q0,0)
    m = m7.machine
    reach, complete = bfs_reach(m, m.initial_config(), ref_counter_step, max_nodes=100)
    assert complete and reach == {CounterConfig("q0", (0,)), CounterConfig("q1", (1,))}
    y = downset_normalize(Ideal(c.control, tuple(c.values)) for c in reach)
    assert y == DownSet((Ideal("q0", (0,)), Ideal("q1", (1,))))
    stepped = downset_post(m, y)
    assert downset_contains(stepped, CounterConfig("q2", (0,)))
    assert not downset_subset(stepped, y)


def test_monotone_gate(m7, m8):
    d = DownSet((Ideal("q0", (0,)),))
    with pytest.raises(ValueError):
        downset_post_monotone(m7.machine, d)
    with pytest.raises(ValueError):
        pre_basis(m8.machine, upset_normalize([CounterConfig("q0", (0,))]))
    with pytest.raises(ValueError):
        backward_coverability(
            m8.machine, CounterConfig("q0", (0,)), CounterConfig("q2", (1,))
        )
    with pytest.raises(ValueError):
        forward_cover_semiproc(
            m8.machine, CounterConfig("q0", (0,)), CounterConfig("q2", (1,))
        )


def test_upset_normalize_minimal_antichain():
    rng = Random(23)
    for _ in range(40):
        configs = [
            CounterConfig(rng.choice(["q0", "q1"]), (rng.randint(0, 3), rng.randint(0, 3)))
            for _ in range(rng.randint(1, 6))
        ]
        u = upset_normalize(configs)
        kept = u.basis
        assert set(kept) <= set(configs)
        for a in kept:
            for b in kept:
                if a != b:
                    assert not (a.control == b.control and vec_leq(a.values, b.values))
        for c in configs:
            assert upset_contains(u, c)
    assert upset_normalize([CounterConfig("q0", (1, 0))]).show() == "↑{q0:(1,0)}"


def test_pre_basis_hand_cases():
    m = cm(
        ["q0", "q1"], ["c"],
        [t("q0", OP_INC, "c", "q1"), t("q1", OP_DEC, "c", "q0"), t("q1", OP_NOOP, None, "q0")],
    )
    up = upset_normalize([CounterConfig("q1", (3,))])
    assert pre_basis(m, up).basis == (CounterConfig("q0", (2,)),)
    up0 = upset_normalize([CounterConfig("q1", (0,))])
    assert pre_basis(m, up0).basis == (CounterConfig("q0", (0,)),)
    upd = upset_normalize([CounterConfig("q0", (2,))])
    # dec into q0 needs one more than the target; the noop needs the same
    assert pre_basis(m, upd).basis == (CounterConfig("q1", (2,)),)


def test_backward_coverability_toys():
    chain = cm(
        ["q0", "q1", "q2"], ["c"],
        [t("q0", OP_INC, "c", "q1"), t("q1", OP_INC, "c", "q2")],
    )
    x0 = CounterConfig("q0", (0,))
    assert backward_coverability(chain, x0, CounterConfig("q2", (2,)))
    assert not backward_coverability(chain, x0, CounterConfig("q2", (3,)))
    assert backward_coverability(chain, x0, CounterConfig("q0", (0,)))
    assert not backward_coverability(chain, x0, CounterConfig("q0", (1,)))


def test_backward_coverability_agrees_with_search_oracle():
    rng = Random(31)
    conclusive = 0
    for _ in range(80):
        m = random_counter_machine(rng, zero_tests=False)
        x0 = m.initial_config()
        y = CounterConfig(
            rng.choice(m.states), tuple(rng.randint(0, 3) for _ in m.counters)
        )
        got = backward_coverability(m, x0, y)
        covered, sure = covered_oracle(m, x0, y, value_cap=8)
        if sure:
            assert got == covered
            conclusive += 1
        elif covered:
            assert got
    assert conclusive > 20


def test_forward_cover_semiproc_positive():
    pump = cm(["q0"], ["c"], [t("q0", OP_INC, "c", "q0")])
    v = forward_cover_semiproc(pump, CounterConfig("q0", (0,)), CounterConfig("q0", (5,)))
    assert v.outcome is Outcome.POSITIVE and v.witness == 5


def test_forward_cover_semiproc_budget_and_fixpoint():
    pump = cm(["q0", "q1"], ["c"], [t("q0", OP_INC, "c", "q0")])
    out = forward_cover_semiproc(
        pump, CounterConfig("q0", (0,)), CounterConfig("q1", (0,)), step_budget=7
    )
    assert out.outcome is Outcome.INCONCLUSIVE and out.budget_used == 7
    assert not out.caveats  # plain budget exhaustion

    line = cm(["q0", "q1"], ["c"], [t("q0", OP_INC, "c", "q1")])
    fix = forward_cover_semiproc(
        line, CounterConfig("q0", (0,)), CounterConfig("q1", (2,))
    )
    assert fix.outcome is Outcome.INCONCLUSIVE
    assert fix.caveats and "fixpoint" in fix.caveats[0]


def test_candidate_enumeration_order(m8):
    m = m8.machine
    first = list(islice(downset_candidates(m), 300))
    assert first[0] == DownSet((Ideal("q3", (0,)),))
    assert len(set(first)) == len(first)  # no repeats
    for d in first:
        assert downset_normalize(d.ideals) == d  # canonical antichains only
    assert first[75] == DownSet((Ideal("q0", (0,)), Ideal("q2", (OMEGA,))))


def test_noncover_semiproc_finds_m8_certificate(m8):
    m = m8.machine
    v = noncover_semiproc(m, CounterConfig("q0", (0,)), CounterConfig("q1", (1,)))
    assert v.outcome is Outcome.NEGATIVE
    assert v.witness == DownSet((Ideal("q0", (0,)), Ideal("q2", (OMEGA,))))
    assert v.budget_used == 76
    # certificates stay closed under repeated stepping
    d = v.witness
    for _ in range(5):
        d = downset_post(m, d)
        assert downset_subset(d, v.witness)


def test_noncover_semiproc_budget_and_coverable_target(m8):
    m = m8.machine
    small = noncover_semiproc(m, CounterConfig("q0", (0,)), CounterConfig("q1", (1,)), 10)
    assert small.outcome is Outcome.INCONCLUSIVE and small.budget_used == 10
    cov = noncover_semiproc(m, CounterConfig("q0", (0,)), CounterConfig("q2", (1,)), 500)
    assert cov.outcome is Outcome.INCONCLUSIVE  # target is coverable; no invariant exists


def test_noncover_semiproc_can_miss_unreachable_targets(m7):
    # (q2,0) is unreachable, but any candidate containing the initial
    # closure steps to (q2,0) through the sub-ideal at the zero test,
    # so no inductive certificate exists and the search stays inconclusive
    m = m7.machine
    reach, complete = bfs_reach(m, m.initial_config(), ref_counter_step, max_nodes=50)
    assert complete
    assert all(c.control != "q2" for c in reach)
    v = noncover_semiproc(m, m.initial_config(), CounterConfig("q2", (0,)), 400)
    assert v.outcome is Outcome.INCONCLUSIVE


def test_x0_coverability_m8(m8):
    m = m8.machine
    x0 = CounterConfig("q0", (0,))
    pos = x0_coverability(m, x0, CounterConfig("q2", (3,)))
    assert pos.outcome is Outcome.POSITIVE
    assert pos.witness == (3, 4, 4)
    assert pos.budget_used == 4
    neg = x0_coverability(m, x0, CounterConfig("q1", (1,)))
    assert neg.outcome is Outcome.NEGATIVE
    assert neg.witness == DownSet((Ideal("q0", (0,)), Ideal("q2", (OMEGA,))))
    assert neg.budget_used == 76


def test_x0_coverability_finite_reach(m6):
    m = m6.machine
    ok = x0_coverability(m, CounterConfig("q0", (0,)), CounterConfig("q1", (0,)))
    assert ok.outcome is Outcome.POSITIVE and ok.witness == (0,)
    blocked = x0_coverability(m, CounterConfig("q0", (1,)), CounterConfig("q1", (0,)))
    assert blocked.outcome is Outcome.NEGATIVE
    # forward search drained: certificate is the closure of the reach set
    assert blocked.witness == DownSet((Ideal("q0", (1,)),))


def test_x0_coverability_budget():
    pump = cm(["q0", "q1"], ["c"], [t("q0", OP_INC, "c", "q0")])
    v = x0_coverability(pump, CounterConfig("q0", (0,)), CounterConfig("q0", (50,)), budget=20)
    assert v.outcome is Outcome.INCONCLUSIVE and v.budget_used == 20
    assert v.caveats and "round budget" in v.caveats[0]


def test_x0_coverability_witness_replays(m8):
    m = m8.machine
    x0 = CounterConfig("q0", (0,))
    target = CounterConfig("q2", (2,))
    v = x0_coverability(m, x0, target)
    assert v.outcome is Outcome.POSITIVE
    x = x0
    for label in v.witness:
        x = ref_counter_step(m, x, label)
        assert x is not None
    assert x.control == target.control and vec_leq(target.values, x.values)


def test_check_cover_monotone_bounded(m8):
    m = m8.machine
    assert check_cover_monotone_bounded(m, CounterConfig("q0", (0,)), 5, 6) == (True, None)
    ok, cex = check_cover_monotone_bounded(m, CounterConfig("q0", (1,)), 5, 6)
    assert not ok
    assert cex == (
        CounterConfig("q1", (1,)),
        CounterConfig("q1", (0,)),
        0,
        CounterConfig("q3", (0,)),
    )
    with pytest.raises(ValueError):
        check_cover_monotone_bounded(m, CounterConfig("q0", (0,)), 0, 6)


def test_machines_without_zero_tests_are_cover_monotone():
    rng = Random(41)
    for _ in range(25):
        m = random_counter_machine(rng, zero_tests=False, max_states=3, max_transitions=5)
        x0 = m.initial_config(tuple(rng.randint(0, 1) for _ in m.counters))
        ok, cex = check_cover_monotone_bounded(m, x0, 3, 4)
        assert ok, (m, x0, cex)
