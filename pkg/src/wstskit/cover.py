"""Downward-closed set algebra over counter-machine states and the
coverability procedures built on it.

A downward-closed set is a finite union of ideals (control state plus a
vector over ℕ ∪ {ω}); an upward-closed set is the up-closure of a finite
antichain of configurations.  On top of the algebra sit:

  * exact backward coverability for machines without zero tests,
  * a forward saturation semi-procedure (also zero-test free),
  * a certificate search for non-coverability that enumerates candidate
    downward-closed invariants and is sound for arbitrary machines,
  * a combined decision loop from a fixed initial state that interleaves
    exact forward search with the certificate search, and
  * a bounded refutation check for monotonicity relative to one initial
    state.

Zero tests are the fault line: the one-step image of a downward-closed
set stays exactly computable (a zero test restricts an ideal to its
member states with the tested entries at 0), but backward and forward
reasoning that relies on monotonicity breaks, so those operations refuse
machines with zero tests outright.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .counter import (
    OP_DEC,
    OP_INC,
    CounterConfig,
    CounterMachine,
    cm_post,
    counter_config_str,
    require_no_zero_tests,
)
from .orders import counter_state_leq
from .verdict import AnalysisVerdict, Outcome

OMEGA = float("inf")

Vec = tuple  # entries are ints, or OMEGA


def entry_str(e) -> str:
    return "ω" if e == OMEGA else str(int(e))


def vec_leq(u: Vec, v: Vec) -> bool:
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return all(a <= b for a, b in zip(u, v))


@dataclass(frozen=True)
class Ideal:
    """One directed downward-closed block: a control state and entry-wise
    bounds, with ω for an unbounded component."""

    control: str
    bounds: Vec

    def show(self) -> str:
        return f"{self.control}:({','.join(entry_str(e) for e in self.bounds)})"


def ideal_contains(ideal: Ideal, x: CounterConfig) -> bool:
    if len(ideal.bounds) != len(x.values):
        raise ValueError(f"dimension mismatch: {len(ideal.bounds)} vs {len(x.values)}")
    return ideal.control == x.control and all(v <= b for v, b in zip(x.values, ideal.bounds))


def ideal_subset(i1: Ideal, i2: Ideal) -> bool:
    return i1.control == i2.control and vec_leq(i1.bounds, i2.bounds)


def _ideal_sort_key(i: Ideal):
    return (i.control, i.bounds)


@dataclass(frozen=True)
class DownSet:
    """Inclusion-minimal union of ideals, canonically ordered.

    Build through :func:`downset_normalize`; the constructor trusts its
    input to already be an antichain in sorted order.
    """

    ideals: tuple[Ideal, ...]

    def show(self) -> str:
        return "{" + ", ".join(i.show() for i in self.ideals) + "}"


def downset_normalize(ideals: Iterable[Ideal]) -> DownSet:
    """Drop every ideal contained in another; sort canonically.

    Duplicates are removed first, so afterwards only strict containment
    can hold between distinct elements and keeping the maximal ones is
    unambiguous.
    """
    pool = list(dict.fromkeys(ideals))
    keep = [a for a in pool if not any(b is not a and ideal_subset(a, b) for b in pool)]
    return DownSet(tuple(sorted(keep, key=_ideal_sort_key)))


def downset_contains(d: DownSet, x: CounterConfig) -> bool:
    return any(ideal_contains(i, x) for i in d.ideals)


def downset_subset(d1: DownSet, d2: DownSet) -> bool:
    """Denotation inclusion; an ideal lies in a union iff in one member."""
    return all(any(ideal_subset(a, b) for b in d2.ideals) for a in d1.ideals)


def downset_union(d1: DownSet, d2: DownSet) -> DownSet:
    return downset_normalize(d1.ideals + d2.ideals)


def downset_of_config(x: CounterConfig) -> DownSet:
    return DownSet((Ideal(x.control, tuple(x.values)),))


def _check_signature(machine: CounterMachine, d: DownSet) -> None:
    k = len(machine.counters)
    for i in d.ideals:
        if i.control not in machine.states:
            raise ValueError(f"ideal control {i.control!r} not a machine state")
        if len(i.bounds) != k:
            raise ValueError(f"ideal dimension {len(i.bounds)} != machine dimension {k}")


def downset_post(machine: CounterMachine, d: DownSet) -> DownSet:
    """Exact one-step image, downward closed.

    Per ideal and transition from its control state: a zero test first
    restricts the ideal to the sub-ideal with the tested entries at 0
    (never empty, the sets are downward closed); then inc adds one to the
    bound (ω stays ω), dec needs a bound of at least 1 or ω and subtracts
    one (ω stays ω), otherwise the transition contributes nothing.
    """
    _check_signature(machine, d)
    out = []
    for ideal in d.ideals:
        for t in machine.transitions:
            if t.source != ideal.control:
                continue
            bounds = list(ideal.bounds)
            for c in t.zero_tests:
                bounds[machine.counter_index(c)] = 0
            if t.op == OP_INC:
                ci = machine.counter_index(t.counter)
                bounds[ci] = bounds[ci] + 1
            elif t.op == OP_DEC:
                ci = machine.counter_index(t.counter)
                if bounds[ci] < 1:
                    continue
                bounds[ci] = bounds[ci] - 1
            out.append(Ideal(t.target, tuple(bounds)))
    return downset_normalize(out)


def downset_post_monotone(machine: CounterMachine, d: DownSet) -> DownSet:
    """One-step image for the monotone fragment; refuses zero tests."""
    require_no_zero_tests(machine)
    return downset_post(machine, d)


@dataclass(frozen=True)
class UpSet:
    """Upward closure of a minimal antichain of configurations."""

    basis: tuple[CounterConfig, ...]

    def show(self) -> str:
        return "↑{" + ", ".join(counter_config_str(b) for b in self.basis) + "}"


def upset_normalize(configs: Iterable[CounterConfig]) -> UpSet:
    pool = list(dict.fromkeys(configs))
    keep = [
        a
        for a in pool
        if not any(b is not a and counter_state_leq(b, a) for b in pool)
    ]
    return UpSet(tuple(sorted(keep, key=lambda c: (c.control, c.values))))


def upset_contains(u: UpSet, x: CounterConfig) -> bool:
    return any(counter_state_leq(b, x) for b in u.basis)


def pre_basis(machine: CounterMachine, u: UpSet) -> UpSet:
    """Minimal basis of the states that reach the up-closure in one step.

    Only for machines without zero tests.  For a basis vector b and a
    transition into its control state: inc(c) lowers component c to
    max(b_c - 1, 0); dec(c) raises it to b_c + 1; a plain move keeps b.
    """
    require_no_zero_tests(machine)
    preds = []
    for b in u.basis:
        for t in machine.transitions:
            if t.target != b.control:
                continue
            values = list(b.values)
            if t.op == OP_INC:
                ci = machine.counter_index(t.counter)
                values[ci] = max(values[ci] - 1, 0)
            elif t.op == OP_DEC:
                ci = machine.counter_index(t.counter)
                values[ci] = values[ci] + 1
            preds.append(CounterConfig(t.source, tuple(values)))
    return upset_normalize(preds)


def backward_coverability(
    machine: CounterMachine, x0: CounterConfig, y: CounterConfig
) -> bool:
    """Exact coverability for machines without zero tests.

    Saturates the backward sequence I, I ∪ pre(I), ... to its fixpoint
    (bases compared as canonical antichains; termination is guaranteed by
    the well-ordering of counter vectors) and answers whether x0 lies in
    the final upward-closed set.
    """
    require_no_zero_tests(machine)
    basis = upset_normalize([y])
    while True:
        if upset_contains(basis, x0):
            return True
        bigger = upset_normalize(basis.basis + pre_basis(machine, basis).basis)
        if bigger == basis:
            return upset_contains(basis, x0)
        basis = bigger


def forward_cover_semiproc(
    machine: CounterMachine, x0: CounterConfig, y: CounterConfig, step_budget: int = 100
) -> AnalysisVerdict:
    """Forward saturation for machines without zero tests.

    Grows D from the closure of x0 by D ∪ post(D) and answers positive
    when y enters D.  The procedure never answers negative: at the budget
    it is inconclusive, and on reaching a fixpoint without y it reports
    inconclusive with a caveat saying so (the caller may read that as a
    non-cover for this machine class, but the contract stays one-sided).
    """
    require_no_zero_tests(machine)
    d = downset_of_config(x0)
    steps = 0
    while True:
        if downset_contains(d, y):
            return AnalysisVerdict(Outcome.POSITIVE, steps, steps)
        if steps >= step_budget:
            return AnalysisVerdict(Outcome.INCONCLUSIVE, None, steps)
        bigger = downset_union(d, downset_post(machine, d))
        if bigger == d:
            return AnalysisVerdict(
                Outcome.INCONCLUSIVE,
                None,
                steps,
                ("forward saturation reached a fixpoint that excludes the target",),
            )
        d = bigger
        steps += 1


def _antichain_subsets(vectors: list[Vec], max_size: int) -> list[tuple[Vec, ...]]:
    out: list[tuple[Vec, ...]] = []
    for size in range(0, max_size + 1):
        for combo in itertools.combinations(vectors, size):
            ok = True
            for a, b in itertools.combinations(combo, 2):
                if vec_leq(a, b) or vec_leq(b, a):
                    ok = False
                    break
            if ok:
                out.append(combo)
    return out


def _fits_bound(d: DownSet, controls: Sequence[str], bound: int) -> bool:
    per_control = {q: 0 for q in controls}
    for i in d.ideals:
        per_control[i.control] += 1
        if per_control[i.control] > bound:
            return False
        if any(e != OMEGA and e > bound for e in i.bounds):
            return False
    return True


def downset_candidates(machine: CounterMachine) -> Iterator[DownSet]:
    """Fair enumeration of all canonical downward-closed sets.

    Bound B = 1, 2, ... ; at bound B the finite entries range over 0..B
    and each control state holds at most B pairwise incomparable vectors
    (ω entries are allowed at every bound).  Per-control vector lists are
    ordered lexicographically with ω last, subsets by size then position,
    and the per-control choices combine in control declaration order.
    Sets already produced at a smaller bound are skipped.
    """
    k = len(machine.counters)
    controls = machine.states
    for bound in itertools.count(1):
        entries = list(range(bound + 1)) + [OMEGA]
        vectors = [tuple(v) for v in itertools.product(entries, repeat=k)]
        options = _antichain_subsets(vectors, bound)
        for combo in itertools.product(options, repeat=len(controls)):
            ideals = [
                Ideal(q, vec) for q, part in zip(controls, combo) for vec in part
            ]
            d = DownSet(tuple(sorted(ideals, key=_ideal_sort_key)))
            if _fits_bound(d, controls, bound - 1):
                continue
            yield d


def noncover_semiproc(
    machine: CounterMachine,
    x0: CounterConfig,
    y: CounterConfig,
    enumeration_budget: int = 10000,
) -> AnalysisVerdict:
    """Certificate search for non-coverability; sound for any machine.

    Enumerates candidate downward-closed sets in the fixed fair order and
    answers negative on the first D that contains x0, excludes y, and is
    closed under the exact one-step image; D is the witness.  Inconclusive
    once the budget of tested candidates runs out.  The check uses exact
    steps, so zero tests are fine; the flip side is that some unreachable
    targets admit no such invariant at all and stay inconclusive forever.
    """
    tested = 0
    for d in downset_candidates(machine):
        if tested >= enumeration_budget:
            break
        tested += 1
        if not downset_contains(d, x0):
            continue
        if downset_contains(d, y):
            continue
        if downset_subset(downset_post(machine, d), d):
            return AnalysisVerdict(Outcome.NEGATIVE, d, tested)
    return AnalysisVerdict(Outcome.INCONCLUSIVE, None, tested)


def x0_coverability(
    machine: CounterMachine,
    x0: CounterConfig,
    y: CounterConfig,
    budget: int = 10000,
) -> AnalysisVerdict:
    """Coverability of y from the fixed initial state x0.

    Interleaves, one round each: an exact breadth-first search over the
    reachable configurations (a configuration at or above y is a positive
    witness; its label run is returned), and the certificate enumeration
    of :func:`noncover_semiproc` (an inductive invariant separating x0
    from y is a negative witness).  If the forward search exhausts the
    reachable set first, the answer is negative with the closure of the
    reached configurations as certificate.  Both definite answers are
    exact facts; the budget bounds the number of rounds, and termination
    within any budget is only guaranteed for systems that are monotone
    relative to x0.
    """
    parent: dict[CounterConfig, Optional[tuple[CounterConfig, int]]] = {x0: None}
    queue = deque([x0])
    candidates = downset_candidates(machine)
    rounds = 0
    while rounds < budget:
        rounds += 1
        if queue:
            x = queue.popleft()
            if counter_state_leq(y, x):
                labels = []
                cur = x
                while parent[cur] is not None:
                    prev, label = parent[cur]
                    labels.append(label)
                    cur = prev
                labels.reverse()
                return AnalysisVerdict(Outcome.POSITIVE, tuple(labels), rounds)
            for label, nxt in cm_post(machine, x):
                if nxt not in parent:
                    parent[nxt] = (x, label)
                    queue.append(nxt)
        elif parent:
            # forward search complete: the reached set is exactly Post*
            certificate = downset_normalize(
                Ideal(c.control, tuple(c.values)) for c in parent
            )
            return AnalysisVerdict(Outcome.NEGATIVE, certificate, rounds)
        d = next(candidates, None)
        if d is None:
            break
        if (
            downset_contains(d, x0)
            and not downset_contains(d, y)
            and downset_subset(downset_post(machine, d), d)
        ):
            return AnalysisVerdict(Outcome.NEGATIVE, d, rounds)
    return AnalysisVerdict(
        Outcome.INCONCLUSIVE,
        None,
        rounds,
        (
            "round budget exhausted; without monotonicity relative to the "
            "initial state neither search is guaranteed to terminate",
        ),
    )


def check_cover_monotone_bounded(
    machine: CounterMachine,
    x0: CounterConfig,
    value_cap: int,
    length_cap: int,
) -> tuple[bool, Optional[tuple[CounterConfig, CounterConfig, int, CounterConfig]]]:
    """Bounded refutation of monotonicity relative to x0.

    Enumerates the reachable configurations with counter values capped at
    ``value_cap``, closes them downward, and for every pair x1 ≤ y1 with
    y1 in that cover and every exact step x1 → x2 searches for y2 with
    y1 →* y2 (at most ``length_cap`` steps, values uncapped) and x2 ≤ y2.
    Returns (True, None) when no violation shows up within the caps; this
    is evidence, not proof.  A violation is returned as (y1, x1, label,
    x2), the first one in canonical order.
    """
    if value_cap < 1 or length_cap < 1:
        raise ValueError("caps must be >= 1")
    reached = {x0}
    queue = deque([x0])
    while queue:
        x = queue.popleft()
        for _, nxt in cm_post(machine, x):
            if max(nxt.values, default=0) > value_cap:
                continue
            if nxt not in reached:
                reached.add(nxt)
                queue.append(nxt)

    cover: set[CounterConfig] = set()
    for c in reached:
        for values in itertools.product(*(range(v + 1) for v in c.values)):
            cover.add(CounterConfig(c.control, values))

    control_rank = {q: i for i, q in enumerate(machine.states)}
    for y1 in sorted(cover, key=lambda c: (control_rank[c.control], c.values)):
        for values in itertools.product(*(range(v + 1) for v in y1.values)):
            x1 = CounterConfig(y1.control, values)
            for label, x2 in cm_post(machine, x1):
                # search y2 with y1 ->* y2 and x2 <= y2, up to length_cap steps
                frontier = {y1}
                seen = {y1}
                found = any(counter_state_leq(x2, y2) for y2 in frontier)
                depth = 0
                while not found and depth < length_cap and frontier:
                    depth += 1
                    nxt_frontier = set()
                    for y in frontier:
                        for _, y2 in cm_post(machine, y):
                            if y2 not in seen:
                                seen.add(y2)
                                nxt_frontier.add(y2)
                    frontier = nxt_frontier
                    found = any(counter_state_leq(x2, y2) for y2 in frontier)
                if not found:
                    return False, (y1, x1, label, x2)
    return True, None
