"""Counter machines: syntax, small-step semantics, and the restricted
zero-test check.

A machine is a finite control graph whose transitions carry one operation
(increment, decrement, or noop on a single counter) plus a set of counters
that must be zero for the transition to fire.  Zero tests read the values
before the operation applies.  Transition labels are the declaration
indices, so label sequences replay unambiguously even when two transitions
share source and operation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

OP_INC = "inc"
OP_DEC = "dec"
OP_NOOP = "noop"
_OPS = (OP_INC, OP_DEC, OP_NOOP)


@dataclass(frozen=True)
class CounterTransition:
    source: str
    op: str
    counter: Optional[str]  # None exactly when op is noop
    zero_tests: frozenset[str]
    target: str


@dataclass(frozen=True)
class CounterConfig:
    control: str
    values: tuple[int, ...]


@dataclass(frozen=True)
class CounterMachine:
    states: tuple[str, ...]
    counters: tuple[str, ...]
    transitions: tuple[CounterTransition, ...]
    initial: str
    name: str = "counter-machine"

    def __post_init__(self) -> None:
        states = set(self.states)
        counters = set(self.counters)
        if len(states) != len(self.states):
            raise ValueError("duplicate control states")
        if len(counters) != len(self.counters):
            raise ValueError("duplicate counters")
        if self.initial not in states:
            raise ValueError(f"initial control {self.initial!r} not declared")
        for i, t in enumerate(self.transitions):
            if t.source not in states or t.target not in states:
                raise ValueError(f"transition {i} uses undeclared control state")
            if t.op not in _OPS:
                raise ValueError(f"transition {i} has unknown op {t.op!r}")
            if (t.counter is None) != (t.op == OP_NOOP):
                raise ValueError(f"transition {i}: op {t.op} and counter disagree")
            if t.counter is not None and t.counter not in counters:
                raise ValueError(f"transition {i} uses undeclared counter {t.counter!r}")
            if not t.zero_tests <= counters:
                raise ValueError(f"transition {i} zero-tests undeclared counters")

    def counter_index(self, c: str) -> int:
        return self.counters.index(c)

    def initial_config(self, values: Sequence[int] | None = None) -> CounterConfig:
        if values is None:
            values = (0,) * len(self.counters)
        values = tuple(values)
        if len(values) != len(self.counters):
            raise ValueError("initial valuation has wrong dimension")
        return CounterConfig(self.initial, values)

    def describe_transition(self, label: int) -> str:
        t = self.transitions[label]
        if t.op == OP_NOOP:
            text = OP_NOOP
        else:
            text = f"{t.op}({t.counter})"
        if t.zero_tests:
            text += " [zero: " + ",".join(sorted(t.zero_tests)) + "]"
        return text


def counter_config_str(x: CounterConfig) -> str:
    return f"{x.control}:(" + ",".join(str(v) for v in x.values) + ")"


def cm_step(machine: CounterMachine, x: CounterConfig, label: int) -> CounterConfig | None:
    """One transition step; None when the transition is disabled.

    Disabled covers a failing zero test, a decrement at zero, and a source
    control mismatch.  Zero tests are evaluated on the pre-state.
    """
    if not 0 <= label < len(machine.transitions):
        raise ValueError(f"unknown transition label {label}")
    t = machine.transitions[label]
    if x.control != t.source:
        return None
    for c in t.zero_tests:
        if x.values[machine.counter_index(c)] != 0:
            return None
    values = x.values
    if t.op != OP_NOOP:
        i = machine.counter_index(t.counter)
        if t.op == OP_DEC:
            if values[i] == 0:
                return None
            values = values[:i] + (values[i] - 1,) + values[i + 1 :]
        else:
            values = values[:i] + (values[i] + 1,) + values[i + 1 :]
    return CounterConfig(t.target, values)


def cm_post(machine: CounterMachine, x: CounterConfig) -> list[tuple[int, CounterConfig]]:
    """All enabled one-step successors, in transition declaration order."""
    out = []
    for label in range(len(machine.transitions)):
        y = cm_step(machine, x, label)
        if y is not None:
            out.append((label, y))
    return out


def cm_run(
    machine: CounterMachine, x0: CounterConfig, labels: Iterable[int]
) -> tuple[CounterConfig, int | None]:
    """Fold cm_step over a label sequence.

    Returns ``(final_config, None)`` on success, or ``(last_config, i)``
    where ``i`` is the first index at which the run got stuck.
    """
    x = x0
    for i, label in enumerate(labels):
        nxt = cm_step(machine, x, label)
        if nxt is None:
            return x, i
        x = nxt
    return x, None


def control_reachable(machine: CounterMachine, start: str) -> set[str]:
    """Control states reachable from ``start`` in the control graph."""
    seen = {start}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for t in machine.transitions:
            if t.source == q and t.target not in seen:
                seen.add(t.target)
                queue.append(t.target)
    return seen


def is_cmrz(machine: CounterMachine) -> tuple[bool, list[int] | None]:
    """Check that no counter is incremented or decremented at or after a
    zero test of it, along any control-graph path from the initial control.

    This is a syntactic condition on transition sequences, not on feasible
    runs; machines whose feasible runs are all safe can still be rejected.
    A transition that tests a counter and operates on the same counter
    counts as a violation on its own (positions i = j).  On failure the
    shortest violating transition sequence is returned, starting at the
    zero-testing transition and ending at the offending operation.
    """
    reachable = control_reachable(machine, machine.initial)
    best: list[int] | None = None

    def consider(candidate: list[int]) -> None:
        nonlocal best
        if best is None or len(candidate) < len(best):
            best = candidate

    for ti, t in enumerate(machine.transitions):
        if not t.zero_tests or t.source not in reachable:
            continue
        if t.op != OP_NOOP and t.counter in t.zero_tests:
            consider([ti])
            continue
        # BFS over the control graph from target(t) for the nearest
        # transition operating on a tested counter (cycles included).
        seen = {t.target}
        queue: deque[tuple[str, list[int]]] = deque([(t.target, [])])
        found: list[int] | None = None
        while queue and found is None:
            q, path = queue.popleft()
            for ui, u in enumerate(machine.transitions):
                if u.source != q:
                    continue
                if u.op != OP_NOOP and u.counter in t.zero_tests:
                    found = [ti] + path + [ui]
                    break
                if u.target not in seen:
                    seen.add(u.target)
                    queue.append((u.target, path + [ui]))
        if found is not None:
            consider(found)
    return best is None, best


def has_zero_tests(machine: CounterMachine) -> bool:
    return any(t.zero_tests for t in machine.transitions)


def require_no_zero_tests(machine: CounterMachine) -> CounterMachine:
    """Gate for the monotone fragment; raises when a zero test is present."""
    for i, t in enumerate(machine.transitions):
        if t.zero_tests:
            raise ValueError(
                f"transition {i} carries a zero test; this operation is only "
                "sound for machines without zero tests"
            )
    return machine
