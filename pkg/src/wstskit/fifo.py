"""FIFO machines: syntax, semantics, bounded-language automata, and the
input-bounded product construction.

Letters are interned in an :class:`Alphabet` and compared by integer id;
channel contents are tuples of letter ids.  Transition labels are
declaration indices, as for counter machines.  The product construction
restricts a machine to behaviours whose per-channel send projections stay
inside a bounded language w_1^* ... w_n^* and whose receive projections
stay inside its prefixes; for distinct-letter languages the construction
is a product with two deterministic position-tracking automata.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

SEND = "!"
RECV = "?"

# A DFA action: (channel, direction, letter id).
Action = tuple[str, str, int]


class Alphabet:
    """Interned letter table; words are tuples of integer letter ids."""

    def __init__(self, letters: Iterable[str]):
        self._letters = tuple(letters)
        if len(set(self._letters)) != len(self._letters):
            raise ValueError("duplicate letters in alphabet")
        for name in self._letters:
            if not name:
                raise ValueError("empty letter name")
        self._ids = {a: i for i, a in enumerate(self._letters)}

    @property
    def letters(self) -> tuple[str, ...]:
        return self._letters

    def __len__(self) -> int:
        return len(self._letters)

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self._letters == other._letters

    def __hash__(self) -> int:
        return hash(self._letters)

    def __repr__(self) -> str:
        return f"Alphabet({list(self._letters)!r})"

    def id(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise ValueError(f"unknown letter {name!r}") from None

    def name(self, lid: int) -> str:
        return self._letters[lid]

    def word(self, text: str | Iterable[str]) -> tuple[int, ...]:
        """Intern a word; a plain string is read one character per letter."""
        if isinstance(text, str):
            return tuple(self.id(ch) for ch in text)
        return tuple(self.id(a) for a in text)

    def show(self, word: Sequence[int]) -> str:
        if not word:
            return "ε"
        names = [self.name(lid) for lid in word]
        if all(len(n) == 1 for n in names):
            return "".join(names)
        return ".".join(names)


@dataclass(frozen=True)
class FifoTransition:
    source: str
    channel: str
    kind: str  # SEND or RECV
    letter: int
    target: str


@dataclass(frozen=True)
class FifoConfig:
    control: str
    contents: tuple[tuple[int, ...], ...]  # indexed by channel declaration order


@dataclass(frozen=True)
class FifoMachine:
    states: tuple[str, ...]
    channels: tuple[str, ...]
    alphabet: Alphabet
    transitions: tuple[FifoTransition, ...]
    initial: str
    name: str = "fifo-machine"

    def __post_init__(self) -> None:
        states = set(self.states)
        channels = set(self.channels)
        if len(states) != len(self.states):
            raise ValueError("duplicate control states")
        if len(channels) != len(self.channels):
            raise ValueError("duplicate channels")
        if self.initial not in states:
            raise ValueError(f"initial control {self.initial!r} not declared")
        for i, t in enumerate(self.transitions):
            if t.source not in states or t.target not in states:
                raise ValueError(f"transition {i} uses undeclared control state")
            if t.channel not in channels:
                raise ValueError(f"transition {i} uses undeclared channel {t.channel!r}")
            if t.kind not in (SEND, RECV):
                raise ValueError(f"transition {i} has unknown direction {t.kind!r}")
            if not 0 <= t.letter < len(self.alphabet):
                raise ValueError(f"transition {i} uses an unknown letter id")

    def channel_index(self, ch: str) -> int:
        return self.channels.index(ch)

    def initial_config(
        self, contents: Mapping[str, str | Sequence[int]] | None = None
    ) -> FifoConfig:
        per_channel = [()] * len(self.channels)
        if contents:
            for ch, word in contents.items():
                per_channel[self.channel_index(ch)] = self.alphabet.word(word)
        return FifoConfig(self.initial, tuple(per_channel))

    def describe_transition(self, label: int) -> str:
        t = self.transitions[label]
        prefix = "" if len(self.channels) == 1 else t.channel
        return f"{prefix}{t.kind}{self.alphabet.name(t.letter)}"


def fifo_config_str(machine: FifoMachine, x: FifoConfig) -> str:
    return f"{x.control}:(" + "|".join(machine.alphabet.show(w) for w in x.contents) + ")"


def fifo_step(machine: FifoMachine, x: FifoConfig, label: int) -> FifoConfig | None:
    """One transition step; None when disabled.

    A send appends to the channel tail; a receive consumes the head letter
    and is disabled unless the channel starts with that letter.
    """
    if not 0 <= label < len(machine.transitions):
        raise ValueError(f"unknown transition label {label}")
    t = machine.transitions[label]
    if x.control != t.source:
        return None
    ci = machine.channel_index(t.channel)
    word = x.contents[ci]
    if t.kind == SEND:
        new_word = word + (t.letter,)
    else:
        if not word or word[0] != t.letter:
            return None
        new_word = word[1:]
    contents = x.contents[:ci] + (new_word,) + x.contents[ci + 1 :]
    return FifoConfig(t.target, contents)


def fifo_post(machine: FifoMachine, x: FifoConfig) -> list[tuple[int, FifoConfig]]:
    """All enabled one-step successors, in transition declaration order."""
    out = []
    for label in range(len(machine.transitions)):
        y = fifo_step(machine, x, label)
        if y is not None:
            out.append((label, y))
    return out


def fifo_run(
    machine: FifoMachine, x0: FifoConfig, labels: Iterable[int]
) -> tuple[FifoConfig, int | None]:
    """Fold fifo_step; returns (final, None) or (last config, stuck index)."""
    x = x0
    for i, label in enumerate(labels):
        nxt = fifo_step(machine, x, label)
        if nxt is None:
            return x, i
        x = nxt
    return x, None


_ACTION_RE = re.compile(r"^(\w+)?([!?])(\w+)$")


def resolve_action_run(
    machine: FifoMachine, x0: FifoConfig, actions: str | Sequence[str]
) -> list[int]:
    """Resolve an action-string run like ``"!c !b ?c"`` to transition labels.

    The channel may be omitted on single-channel machines.  Resolution
    simulates the machine with backtracking and requires exactly one
    transition sequence that executes the whole action string; zero or
    several complete resolutions are errors.
    """
    if isinstance(actions, str):
        tokens = actions.split()
    else:
        tokens = list(actions)
    parsed: list[tuple[str, str, int]] = []
    for tok in tokens:
        m = _ACTION_RE.match(tok)
        if not m:
            raise ValueError(f"bad action token {tok!r}")
        ch, kind, letter = m.groups()
        if ch is None:
            if len(machine.channels) != 1:
                raise ValueError(f"action {tok!r} omits the channel on a multi-channel machine")
            ch = machine.channels[0]
        parsed.append((ch, kind, machine.alphabet.id(letter)))

    solutions: list[list[int]] = []

    def search(x: FifoConfig, i: int, chosen: list[int]) -> None:
        if len(solutions) >= 2:
            return
        if i == len(parsed):
            solutions.append(list(chosen))
            return
        ch, kind, lid = parsed[i]
        for label, t in enumerate(machine.transitions):
            if (t.channel, t.kind, t.letter) != (ch, kind, lid):
                continue
            y = fifo_step(machine, x, label)
            if y is None:
                continue
            chosen.append(label)
            search(y, i + 1, chosen)
            chosen.pop()

    search(x0, 0, [])
    if not solutions:
        raise ValueError("action run is not executable")
    if len(solutions) > 1:
        raise ValueError("action run is ambiguous; pass transition labels instead")
    return solutions[0]


def send_proj(machine: FifoMachine, labels: Iterable[int], channel: str) -> tuple[int, ...]:
    """Word of letters sent on ``channel`` along the label sequence."""
    out = []
    for label in labels:
        t = machine.transitions[label]
        if t.channel == channel and t.kind == SEND:
            out.append(t.letter)
    return tuple(out)


def recv_proj(machine: FifoMachine, labels: Iterable[int], channel: str) -> tuple[int, ...]:
    """Word of letters received on ``channel`` along the label sequence."""
    out = []
    for label in labels:
        t = machine.transitions[label]
        if t.channel == channel and t.kind == RECV:
            out.append(t.letter)
    return tuple(out)


@dataclass(frozen=True)
class BoundedLang:
    """Per-channel bounded languages w_1^* ... w_n^* over one alphabet."""

    alphabet: Alphabet
    channels: tuple[str, ...]
    blocks: tuple[tuple[tuple[int, ...], ...], ...]  # per channel, per block

    def __post_init__(self) -> None:
        if len(self.channels) != len(self.blocks):
            raise ValueError("one block list per channel required")
        for per_channel in self.blocks:
            for w in per_channel:
                if not w:
                    raise ValueError("bounded-language words must be non-empty")

    def blocks_for(self, channel: str) -> tuple[tuple[int, ...], ...]:
        return self.blocks[self.channels.index(channel)]

    @property
    def distinct_letter(self) -> bool:
        """True iff no letter occurs twice across all words of all channels."""
        seen: set[int] = set()
        for per_channel in self.blocks:
            for w in per_channel:
                for lid in w:
                    if lid in seen:
                        return False
                    seen.add(lid)
        return True

    def show(self) -> str:
        parts = []
        for ch, per_channel in zip(self.channels, self.blocks):
            body = "".join(f"({self.alphabet.show(w)})" for w in per_channel)
            parts.append(f"{ch}: {body}")
        return "; ".join(parts)


def bounded_lang(machine: FifoMachine, words: Mapping[str, Sequence[str]]) -> BoundedLang:
    """Build a BoundedLang from plain strings, e.g. {"ch": ("ab", "c")}."""
    channels = []
    blocks = []
    for ch in machine.channels:
        if ch not in words:
            continue
        channels.append(ch)
        blocks.append(tuple(machine.alphabet.word(w) for w in words[ch]))
    unknown = set(words) - set(machine.channels)
    if unknown:
        raise ValueError(f"bounded language names unknown channels: {sorted(unknown)}")
    return BoundedLang(machine.alphabet, tuple(channels), tuple(blocks))


@dataclass
class Normalization:
    """Result of distinct-letter normalization.

    ``letter_map`` maps every letter name of the new machine back to the
    original letter name, so traces of the normalized machine erase to
    traces of the original one.  ``positions`` records, for each annotated
    letter, the (channel, block index, offset) occurrence it stands for.
    """

    machine: FifoMachine
    lang: BoundedLang
    letter_map: dict[str, str]
    positions: dict[str, tuple[str, int, int]]


def normalize_distinct_letter(machine: FifoMachine, lang: BoundedLang) -> Normalization:
    """Rename bounded-language letter occurrences apart.

    Each occurrence of a letter in the language's words becomes a fresh
    annotated letter; machine transitions on a renamed letter are split
    into one copy per occurrence on the same channel.  A language that is
    already distinct-letter is returned unchanged (identity letter map).
    The annotation is resolved at run time by the product construction:
    receives are forced by the channel head, sends by the position DFAs.
    """
    alphabet = machine.alphabet
    positions_identity: dict[str, tuple[str, int, int]] = {}
    for ch, per_channel in zip(lang.channels, lang.blocks):
        for bi, w in enumerate(per_channel):
            for oi, lid in enumerate(w):
                positions_identity[alphabet.name(lid)] = (ch, bi, oi)
    if lang.distinct_letter:
        letter_map = {name: name for name in alphabet.letters}
        return Normalization(machine, lang, letter_map, positions_identity)

    # Scan occurrences in declaration order: channel, block, offset.
    occurrences: list[tuple[str, int, int, int]] = []
    for ch, per_channel in zip(lang.channels, lang.blocks):
        for bi, w in enumerate(per_channel):
            for oi, lid in enumerate(w):
                occurrences.append((ch, bi, oi, lid))

    used = set(alphabet.letters)
    counters: dict[int, int] = {}
    new_names: list[str] = []
    positions: dict[str, tuple[str, int, int]] = {}
    letter_map: dict[str, str] = {name: name for name in alphabet.letters}
    occ_name: dict[tuple[str, int, int], str] = {}
    for ch, bi, oi, lid in occurrences:
        counters[lid] = counters.get(lid, 0) + 1
        base = f"{alphabet.name(lid)}{counters[lid]}"
        name = base
        while name in used:
            name += "_"
        used.add(name)
        new_names.append(name)
        positions[name] = (ch, bi, oi)
        letter_map[name] = alphabet.name(lid)
        occ_name[(ch, bi, oi)] = name

    new_alphabet = Alphabet(alphabet.letters + tuple(new_names))

    new_blocks = []
    for ch, per_channel in zip(lang.channels, lang.blocks):
        ch_blocks = []
        for bi, w in enumerate(per_channel):
            ch_blocks.append(tuple(new_alphabet.id(occ_name[(ch, bi, oi)]) for oi in range(len(w))))
        new_blocks.append(tuple(ch_blocks))
    new_lang = BoundedLang(new_alphabet, lang.channels, tuple(new_blocks))

    # Split each transition into one copy per occurrence of its letter on
    # its channel; transitions whose letter never occurs there are kept
    # verbatim (the product will prune them).
    new_transitions = []
    for t in machine.transitions:
        variants = [
            occ_name[(ch, bi, oi)]
            for ch, bi, oi, lid in occurrences
            if ch == t.channel and lid == t.letter
        ]
        if not variants:
            new_transitions.append(
                FifoTransition(t.source, t.channel, t.kind, new_alphabet.id(alphabet.name(t.letter)), t.target)
            )
        else:
            for name in variants:
                new_transitions.append(
                    FifoTransition(t.source, t.channel, t.kind, new_alphabet.id(name), t.target)
                )
    new_machine = FifoMachine(
        states=machine.states,
        channels=machine.channels,
        alphabet=new_alphabet,
        transitions=tuple(new_transitions),
        initial=machine.initial,
        name=f"{machine.name}-normalized",
    )
    return Normalization(new_machine, new_lang, letter_map, positions)


@dataclass
class Dfa:
    """Deterministic automaton over machine actions (channel, direction, letter).

    ``delta`` is partial; a missing entry rejects.  Explicit self-loops are
    stored for the direction the automaton does not track, so stepping is
    uniform for both the send and the receive automaton.
    """

    states: tuple[str, ...]
    initial: str
    accepting: frozenset[str]
    delta: dict[tuple[str, Action], str]

    def step(self, state: str, action: Action) -> str | None:
        return self.delta.get((state, action))

    def run(self, actions: Iterable[Action]) -> str | None:
        state: str | None = self.initial
        for a in actions:
            state = self.step(state, a)
            if state is None:
                return None
        return state

    def accepts(self, actions: Iterable[Action]) -> bool:
        state = self.run(actions)
        return state is not None and state in self.accepting


def _tracker_initial(blocks: tuple[tuple[int, ...], ...]) -> tuple[int, int]:
    return (0, 0)


def _tracker_step(
    blocks: tuple[tuple[int, ...], ...],
    posmap: dict[int, tuple[int, int]],
    pos: tuple[int, int],
    lid: int,
) -> tuple[int, int] | None:
    """Advance a cyclic position tracker through w_1^* ... w_n^*.

    State (i, j) means: blocks before i are complete, j letters of w_i are
    matched.  At a block boundary (j = 0) any later block may be started;
    mid-word only the expected next letter is allowed.
    """
    hit = posmap.get(lid)
    if hit is None:
        return None
    k, l = hit
    bi, oi = pos
    if oi == 0:
        if l != 0 or k < bi:
            return None
        return (k, (l + 1) % len(blocks[k]))
    if (k, l) != (bi, oi):
        return None
    return (bi, (oi + 1) % len(blocks[bi]))


def _build_position_dfa(
    machine: FifoMachine, lang: BoundedLang, tracked: str, prefix: str
) -> Dfa:
    if not lang.distinct_letter:
        raise ValueError("bounded language must be distinct-letter; normalize first")
    missing = [ch for ch in machine.channels if ch not in lang.channels]
    if missing:
        raise ValueError(f"bounded language misses channels: {missing}")

    per_channel_blocks = [lang.blocks_for(ch) for ch in machine.channels]
    posmaps: list[dict[int, tuple[int, int]]] = []
    for blocks in per_channel_blocks:
        posmap: dict[int, tuple[int, int]] = {}
        for bi, w in enumerate(blocks):
            for oi, lid in enumerate(w):
                posmap[lid] = (bi, oi)
        posmaps.append(posmap)

    actions: list[Action] = [
        (ch, kind, lid)
        for ch in machine.channels
        for kind in (SEND, RECV)
        for lid in range(len(machine.alphabet))
    ]

    initial = tuple(_tracker_initial(b) for b in per_channel_blocks)
    names: dict[tuple, str] = {initial: f"{prefix}0"}
    order = [initial]
    delta: dict[tuple[str, Action], str] = {}
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        for a in actions:
            ch, kind, lid = a
            if kind != tracked:
                nxt = state  # the untracked direction never moves the DFA
            else:
                ci = machine.channel_index(ch)
                blocks = per_channel_blocks[ci]
                if not blocks:
                    continue  # empty language: nothing may move on this channel
                moved = _tracker_step(blocks, posmaps[ci], state[ci], lid)
                if moved is None:
                    continue
                nxt = state[:ci] + (moved,) + state[ci + 1 :]
            if nxt not in names:
                names[nxt] = f"{prefix}{len(names)}"
                order.append(nxt)
                queue.append(nxt)
            delta[(names[state], a)] = names[nxt]

    if tracked == SEND:
        accepting = frozenset(
            names[s] for s in order if all(pos[1] == 0 for pos in s)
        )
    else:
        accepting = frozenset(names.values())
    return Dfa(
        states=tuple(names[s] for s in order),
        initial=names[initial],
        accepting=accepting,
        delta=delta,
    )


def build_send_dfa(machine: FifoMachine, lang: BoundedLang) -> Dfa:
    """DFA accepting action sequences whose send projections lie in L_c.

    Product over channels of cyclic position trackers; receive actions
    self-loop.  Accepting states are those with every tracker at a block
    boundary (each channel's sent word is a complete element of L_c).
    """
    return _build_position_dfa(machine, lang, SEND, "s")


def build_recv_dfa(machine: FifoMachine, lang: BoundedLang) -> Dfa:
    """DFA accepting action sequences whose receive projections lie in
    Pref(L_c); all states accepting, send actions self-loop."""
    return _build_position_dfa(machine, lang, RECV, "r")


def _completable_pairs(machine: FifoMachine, send_dfa: Dfa, recv_dfa: Dfa) -> set[tuple[str, str]]:
    """DFA state pairs from which some action word reaches acceptance in both."""
    actions: list[Action] = [
        (ch, kind, lid)
        for ch in machine.channels
        for kind in (SEND, RECV)
        for lid in range(len(machine.alphabet))
    ]
    pairs = [(s, r) for s in send_dfa.states for r in recv_dfa.states]
    preds: dict[tuple[str, str], set[tuple[str, str]]] = {p: set() for p in pairs}
    for s, r in pairs:
        for a in actions:
            s2 = send_dfa.step(s, a)
            r2 = recv_dfa.step(r, a)
            if s2 is not None and r2 is not None:
                preds[(s2, r2)].add((s, r))
    good = {
        (s, r)
        for s, r in pairs
        if s in send_dfa.accepting and r in recv_dfa.accepting
    }
    queue = deque(good)
    while queue:
        p = queue.popleft()
        for q in preds[p]:
            if q not in good:
                good.add(q)
                queue.append(q)
    return good


def product_machine(
    machine: FifoMachine, send_dfa: Dfa, recv_dfa: Dfa, prune: bool = True
) -> FifoMachine:
    """Product of a FIFO machine with the send and receive automata.

    Control states are triples (q, s, r), reachable part only.  With
    ``prune`` on (the default), states whose DFA pair cannot be completed
    to joint acceptance by any action word are dropped as well.
    """
    good = _completable_pairs(machine, send_dfa, recv_dfa) if prune else None
    init = (machine.initial, send_dfa.initial, recv_dfa.initial)

    names: dict[tuple[str, str, str], str] = {}
    taken: set[str] = set()

    def name_of(triple: tuple[str, str, str]) -> str:
        if triple not in names:
            base = "_".join(triple)
            name = base
            k = 2
            while name in taken:
                name = f"{base}_{k}"
                k += 1
            names[triple] = name
            taken.add(name)
        return names[triple]

    order = [init]
    name_of(init)
    transitions: list[FifoTransition] = []
    queue = deque([init])
    seen = {init}
    while queue:
        q, s, r = queue.popleft()
        for t in machine.transitions:
            if t.source != q:
                continue
            action: Action = (t.channel, t.kind, t.letter)
            s2 = send_dfa.step(s, action)
            r2 = recv_dfa.step(r, action)
            if s2 is None or r2 is None:
                continue
            if good is not None and (s2, r2) not in good:
                continue
            triple = (t.target, s2, r2)
            if triple not in seen:
                seen.add(triple)
                order.append(triple)
                queue.append(triple)
            transitions.append(
                FifoTransition(name_of((q, s, r)), t.channel, t.kind, t.letter, name_of(triple))
            )
    return FifoMachine(
        states=tuple(name_of(tr) for tr in order),
        channels=machine.channels,
        alphabet=machine.alphabet,
        transitions=tuple(transitions),
        initial=name_of(init),
        name=f"{machine.name}-product",
    )


def _omega_prefix(head: Sequence[int], period: Sequence[int], n: int) -> tuple[int, ...]:
    out = list(head)
    while len(out) < n:
        out.extend(period)
    return tuple(out[:n])


def check_fifo_infinite_iterability(
    machine: FifoMachine, x: FifoConfig, labels: Sequence[int]
) -> bool:
    """Decide whether the loop ``labels`` can be iterated forever from x.

    True iff the sequence fires from x, returns to x's control state, and
    for every channel either nothing is received, or the receive
    projection is no longer than the send projection and the eventually
    periodic words w_c·send^ω and recv^ω coincide.  The ω-equation is
    decided on a prefix of length |w_c| + |send|·|recv| + |send| + |recv|,
    which is safe by periodicity.  A sequence that does not fire, or that
    ends in a different control state (so a second iteration is
    impossible), yields False.
    """
    final, stuck = fifo_run(machine, x, labels)
    if stuck is not None or final.control != x.control:
        return False
    for ci, ch in enumerate(machine.channels):
        s = send_proj(machine, labels, ch)
        r = recv_proj(machine, labels, ch)
        if not r:
            continue
        if len(r) > len(s):
            return False
        w = x.contents[ci]
        n = len(w) + len(s) * len(r) + len(s) + len(r)
        if _omega_prefix(w + s, s, n) != _omega_prefix(r, r, n):
            return False
    return True
