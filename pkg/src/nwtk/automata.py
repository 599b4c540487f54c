"""Multi-stack visibly pushdown automata and matching-edge word automata.

Two equivalent acceptor families over the same alphabets:

* ``Mvpa``: one stack per call/return pair; calls push, returns pop, and a
  return on an empty stack is a separate transition kind keyed on the
  bottom symbol.
* ``Mnwa``: reads the nested word instead; a matched return consults the
  state reached just after its matching call.  A generalized variant adds
  a set of calling states that must only occur at matched calls.

Conversions preserve the accepted language.  The simulation engine for
``Mnwa`` routes through ``Mvpa`` so the equivalence constructions are the
trusted path; an independent run-search lives in the test suite.
"""

from __future__ import annotations

import json
from itertools import product as iproduct

from .core import CALL, INTERNAL, RETURN, CallReturnAlphabet, validate_alphabet, alphabet_to_json
from .errors import (
    AlphabetMismatch,
    CallingStatesPresent,
    EmptyWord,
    LengthMismatch,
    NwtkError,
    UnknownSymbol,
)

__all__ = [
    "Mvpa",
    "Mnwa",
    "mvpa_initial_configs",
    "mvpa_step",
    "mvpa_accepts",
    "mnwa_run_check",
    "mnwa_accepts",
    "mvpa_to_mnwa",
    "mnwa_to_mvpa",
    "degeneralize",
    "product",
    "automaton_to_json",
    "automaton_from_json",
    "load_automaton",
]


def _check_states(states, *groups):
    for group in groups:
        for q in group:
            if q not in states:
                raise NwtkError(f"unknown state {q!r}")


class Mvpa:
    """A visibly pushdown automaton with one stack per call/return pair."""

    __slots__ = (
        "alphabet",
        "states",
        "gamma",
        "bottom",
        "initial",
        "final",
        "delta_call",
        "delta_return",
        "delta_internal",
        "_call",
        "_ret",
        "_int",
    )

    def __init__(
        self,
        alphabet,
        states,
        gamma,
        bottom,
        initial,
        final,
        delta_call,
        delta_return,
        delta_internal,
    ):
        self.alphabet = alphabet
        self.states = frozenset(states)
        self.gamma = frozenset(gamma)
        self.bottom = bottom
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        self.delta_call = frozenset(tuple(t) for t in delta_call)
        self.delta_return = frozenset(tuple(t) for t in delta_return)
        self.delta_internal = frozenset(tuple(t) for t in delta_internal)
        if bottom in self.gamma:
            raise NwtkError("the bottom symbol cannot be a pushable stack symbol")
        _check_states(self.states, self.initial, self.final)
        call_idx: dict = {}
        ret_idx: dict = {}
        int_idx: dict = {}
        for q, a, A, q2 in self.delta_call:
            if alphabet.classify(a).kind != CALL:
                raise AlphabetMismatch(f"{a!r} is not a call symbol")
            if A not in self.gamma:
                raise NwtkError(f"call transitions must push a proper symbol, got {A!r}")
            _check_states(self.states, (q, q2))
            call_idx.setdefault((q, a), []).append((A, q2))
        for q, a, A, q2 in self.delta_return:
            if alphabet.classify(a).kind != RETURN:
                raise AlphabetMismatch(f"{a!r} is not a return symbol")
            if A != bottom and A not in self.gamma:
                raise NwtkError(f"unknown stack symbol {A!r}")
            _check_states(self.states, (q, q2))
            ret_idx.setdefault((q, a), []).append((A, q2))
        for q, a, q2 in self.delta_internal:
            if alphabet.classify(a).kind != INTERNAL:
                raise AlphabetMismatch(f"{a!r} is not an internal symbol")
            _check_states(self.states, (q, q2))
            int_idx.setdefault((q, a), []).append(q2)
        self._call = {k: tuple(v) for k, v in call_idx.items()}
        self._ret = {k: tuple(v) for k, v in ret_idx.items()}
        self._int = {k: tuple(v) for k, v in int_idx.items()}


def mvpa_initial_configs(a: Mvpa) -> frozenset:
    """Start configurations: an initial state with all stacks empty."""
    empty = ((),) * a.alphabet.k
    return frozenset((q, empty) for q in a.initial)


def mvpa_step(a: Mvpa, configs, symbol: str) -> frozenset:
    """All configurations reachable from ``configs`` by reading one symbol."""
    cls = a.alphabet.classify(symbol)
    out = set()
    if cls.kind == CALL:
        s = cls.stack - 1
        rows = a._call.get
        for q, stacks in configs:
            for A, q2 in rows((q, symbol), ()):
                out.add((q2, stacks[:s] + ((A,) + stacks[s],) + stacks[s + 1 :]))
    elif cls.kind == RETURN:
        s = cls.stack - 1
        bottom = a.bottom
        rows = a._ret.get
        for q, stacks in configs:
            st = stacks[s]
            for A, q2 in rows((q, symbol), ()):
                if A == bottom:
                    if not st:
                        out.add((q2, stacks))
                elif st and st[0] == A:
                    out.add((q2, stacks[:s] + (st[1:],) + stacks[s + 1 :]))
    else:
        rows = a._int.get
        for q, stacks in configs:
            for q2 in rows((q, symbol), ()):
                out.add((q2, stacks))
    return frozenset(out)


def mvpa_accepts(a: Mvpa, tokens) -> bool:
    """Whether some run over the token sequence ends in a final state."""
    tokens = tuple(tokens)
    if not tokens:
        raise EmptyWord("automata accept non-empty words only")
    configs = mvpa_initial_configs(a)
    for symbol in tokens:
        if not configs:
            return False
        configs = mvpa_step(a, configs, symbol)
    final = a.final
    return any(q in final for q, _ in configs)


class Mnwa:
    """A (generalized) automaton over nested words.

    ``delta1`` rows (q, a, q') apply where no matching edge arrives;
    ``delta2`` rows (p, q, a, q') additionally require that the state
    right after the matching call was p.  States in ``calling`` may only
    be visited at matched calls.
    """

    __slots__ = (
        "alphabet",
        "states",
        "initial",
        "final",
        "calling",
        "delta1",
        "delta2",
        "_d1",
        "_d2",
        "_compiled",
    )

    def __init__(self, alphabet, states, initial, final, delta1, delta2, calling=()):
        self.alphabet = alphabet
        self.states = frozenset(states)
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        self.calling = frozenset(calling)
        self.delta1 = frozenset(tuple(t) for t in delta1)
        self.delta2 = frozenset(tuple(t) for t in delta2)
        _check_states(self.states, self.initial, self.final, self.calling)
        d1: dict = {}
        d2: dict = {}
        for q, a, q2 in self.delta1:
            alphabet.classify(a)
            _check_states(self.states, (q, q2))
            d1.setdefault((q, a), []).append(q2)
        for p, q, a, q2 in self.delta2:
            if alphabet.classify(a).kind != RETURN:
                raise AlphabetMismatch(
                    f"matched-return transitions need return symbols, got {a!r}"
                )
            _check_states(self.states, (p, q, q2))
            d2.setdefault((p, q, a), []).append(q2)
        self._d1 = {k: tuple(v) for k, v in d1.items()}
        self._d2 = {k: tuple(v) for k, v in d2.items()}
        self._compiled = None


def mnwa_run_check(b: Mnwa, word, run) -> bool:
    """Whether ``run`` (one state per position) is an accepting run."""
    if word.alphabet != b.alphabet:
        raise AlphabetMismatch("word and automaton alphabets differ")
    run = list(run)
    n = len(word)
    if len(run) != n:
        raise LengthMismatch(f"run has {len(run)} states for {n} positions")
    labels = word.labels
    mu_inv = word.mu_inv
    mu = word.mu
    first = run[0]
    if not any(first in b._d1.get((q, labels[0]), ()) for q in b.initial):
        return False
    for i in range(2, n + 1):
        call = mu_inv.get(i)
        if call is None:
            if run[i - 1] not in b._d1.get((run[i - 2], labels[i - 1]), ()):
                return False
        elif run[i - 1] not in b._d2.get((run[call - 1], run[i - 2], labels[i - 1]), ()):
            return False
    if run[n - 1] not in b.final:
        return False
    calling = b.calling
    if calling:
        for i in range(1, n + 1):
            if run[i - 1] in calling and i not in mu:
                return False
    return True


def mnwa_accepts(b: Mnwa, word) -> bool:
    """Acceptance via the stack-machine equivalence (degeneralizing first if needed)."""
    if word.alphabet != b.alphabet:
        raise AlphabetMismatch("word and automaton alphabets differ")
    compiled = b._compiled
    if compiled is None:
        plain = degeneralize(b) if b.calling else b
        compiled = mnwa_to_mvpa(plain)
        b._compiled = compiled
    return mvpa_accepts(compiled, word.labels)


def mvpa_to_mnwa(a: Mvpa) -> Mnwa:
    """Language-preserving conversion; states remember the last pushed symbol."""
    symbols = sorted(a.gamma) + [a.bottom]
    states = [f"{q}|{A}" for q in sorted(a.states) for A in symbols]
    delta1 = set()
    delta2 = set()
    for q, x, A2, q2 in a.delta_call:
        for A in symbols:
            delta1.add((f"{q}|{A}", x, f"{q2}|{A2}"))
    blind = [(q, x, q2) for q, x, q2 in a.delta_internal]
    blind += [(q, x, q2) for q, x, A, q2 in a.delta_return if A == a.bottom]
    for q, x, q2 in blind:
        for A in symbols:
            for A2 in symbols:
                delta1.add((f"{q}|{A}", x, f"{q2}|{A2}"))
    for q, x, B, q2 in a.delta_return:
        for p in a.states:
            for A in symbols:
                for A2 in symbols:
                    delta2.add((f"{p}|{B}", f"{q}|{A}", x, f"{q2}|{A2}"))
    return Mnwa(
        a.alphabet,
        states,
        [f"{q}|{a.bottom}" for q in a.initial],
        [f"{q}|{A}" for q in a.final for A in symbols],
        delta1,
        delta2,
    )


def mnwa_to_mvpa(b: Mnwa) -> Mvpa:
    """Language-preserving conversion; the stacks store target states of calls."""
    if b.calling:
        raise CallingStatesPresent(
            "degeneralize the automaton before converting; calling states "
            "have no stack-machine counterpart"
        )
    bottom = "_"
    while bottom in b.states:
        bottom += "_"
    classify = b.alphabet.classify
    delta_call = set()
    delta_internal = set()
    delta_return = set()
    for q, a, q2 in b.delta1:
        kind = classify(a).kind
        if kind == CALL:
            delta_call.add((q, a, q2, q2))
        elif kind == INTERNAL:
            delta_internal.add((q, a, q2))
        else:
            delta_return.add((q, a, bottom, q2))
    for p, q, a, q2 in b.delta2:
        delta_return.add((q, a, p, q2))
    return Mvpa(
        b.alphabet,
        b.states,
        b.states,
        bottom,
        b.initial,
        b.final,
        delta_call,
        delta_return,
        delta_internal,
    )


_FLAG_NEXT_D1 = {0: "0", 1: "2", 2: "2"}


def degeneralize(b: Mnwa) -> Mnwa:
    """Remove calling states by tracking one three-valued flag per stack.

    A flag is raised to 1 when a calling state is entered at a call of its
    stack, aged to 2 by any later plain step, and cleared exactly by the
    return matching the raising call.  Accepting flag vectors are all-zero,
    so every visit to a calling state must have been at a matched call.
    """
    k = b.alphabet.k
    vectors = ["".join(v) for v in iproduct("012", repeat=k)]
    zero = "0" * k
    classify = b.alphabet.classify
    calling = b.calling
    delta1 = set()
    delta2 = set()
    for q, a, q2 in b.delta1:
        cls = classify(a)
        if q2 in calling and cls.kind != CALL:
            continue
        raised = cls.stack - 1 if (q2 in calling and cls.kind == CALL) else None
        for vec in vectors:
            nxt = "".join(
                "1" if s == raised and c == "0" else _FLAG_NEXT_D1[int(c)]
                for s, c in enumerate(vec)
            )
            delta1.add((f"{q}|{vec}", a, f"{q2}|{nxt}"))
    for p, q, a, q2 in b.delta2:
        if q2 in calling:
            continue
        for cvec in vectors:
            for vec in vectors:
                nxt = "".join(
                    "0" if cv == "1" else v for cv, v in zip(cvec, vec)
                )
                delta2.add((f"{p}|{cvec}", f"{q}|{vec}", a, f"{q2}|{nxt}"))
    states = [f"{q}|{vec}" for q in sorted(b.states) for vec in vectors]
    return Mnwa(
        b.alphabet,
        states,
        [f"{q}|{zero}" for q in b.initial],
        [f"{q}|{zero}" for q in b.final],
        delta1,
        delta2,
    )


def product(b1: Mnwa, b2: Mnwa, mode: str) -> Mnwa:
    """Intersection as a synchronous product, union as a disjoint sum."""
    if b1.alphabet != b2.alphabet:
        raise AlphabetMismatch("product needs a common alphabet")
    if mode == "intersection":
        states = [f"{q1}&{q2}" for q1 in sorted(b1.states) for q2 in sorted(b2.states)]
        delta1 = set()
        for (q1, a, r1) in b1.delta1:
            for (q2, a2, r2) in b2.delta1:
                if a == a2:
                    delta1.add((f"{q1}&{q2}", a, f"{r1}&{r2}"))
        delta2 = set()
        for (p1, q1, a, r1) in b1.delta2:
            for (p2, q2, a2, r2) in b2.delta2:
                if a == a2:
                    delta2.add((f"{p1}&{p2}", f"{q1}&{q2}", a, f"{r1}&{r2}"))
        calling = {
            f"{q1}&{q2}"
            for q1 in b1.states
            for q2 in b2.states
            if q1 in b1.calling or q2 in b2.calling
        }
        return Mnwa(
            b1.alphabet,
            states,
            [f"{q1}&{q2}" for q1 in b1.initial for q2 in b2.initial],
            [f"{q1}&{q2}" for q1 in b1.final for q2 in b2.final],
            delta1,
            delta2,
            calling,
        )
    if mode == "union":
        def tag(side, q):
            return f"{side}.{q}"

        states = [tag(1, q) for q in sorted(b1.states)] + [tag(2, q) for q in sorted(b2.states)]
        delta1 = {(tag(1, q), a, tag(1, r)) for q, a, r in b1.delta1} | {
            (tag(2, q), a, tag(2, r)) for q, a, r in b2.delta1
        }
        delta2 = {(tag(1, p), tag(1, q), a, tag(1, r)) for p, q, a, r in b1.delta2} | {
            (tag(2, p), tag(2, q), a, tag(2, r)) for p, q, a, r in b2.delta2
        }
        return Mnwa(
            b1.alphabet,
            states,
            [tag(1, q) for q in b1.initial] + [tag(2, q) for q in b2.initial],
            [tag(1, q) for q in b1.final] + [tag(2, q) for q in b2.final],
            delta1,
            delta2,
            {tag(1, q) for q in b1.calling} | {tag(2, q) for q in b2.calling},
        )
    raise NwtkError(f"unknown product mode {mode!r}")


# ---------------------------------------------------------------------------
# serialization

def automaton_to_json(a) -> dict:
    if isinstance(a, Mvpa):
        return {
            "kind": "mvpa",
            "alphabet": alphabet_to_json(a.alphabet),
            "states": sorted(a.states),
            "initial": sorted(a.initial),
            "final": sorted(a.final),
            "bottom": a.bottom,
            "gamma": sorted(a.gamma),
            "delta_call": sorted(list(t) for t in a.delta_call),
            "delta_return": sorted(list(t) for t in a.delta_return),
            "delta_internal": sorted(list(t) for t in a.delta_internal),
        }
    if isinstance(a, Mnwa):
        return {
            "kind": "mnwa",
            "alphabet": alphabet_to_json(a.alphabet),
            "states": sorted(a.states),
            "initial": sorted(a.initial),
            "final": sorted(a.final),
            "calling": sorted(a.calling),
            "delta1": sorted(list(t) for t in a.delta1),
            "delta2": sorted(list(t) for t in a.delta2),
        }
    raise NwtkError(f"not an automaton: {a!r}")


def automaton_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    alphabet = validate_alphabet(data["alphabet"])
    kind = data.get("kind")
    if kind == "mvpa":
        return Mvpa(
            alphabet,
            data["states"],
            data["gamma"],
            data["bottom"],
            data["initial"],
            data["final"],
            data["delta_call"],
            data["delta_return"],
            data["delta_internal"],
        )
    if kind == "mnwa":
        return Mnwa(
            alphabet,
            data["states"],
            data["initial"],
            data["final"],
            data["delta1"],
            data["delta2"],
            data.get("calling", ()),
        )
    raise NwtkError(f"unknown automaton kind {kind!r}")


def load_automaton(path):
    with open(path, "r", encoding="utf-8") as handle:
        return automaton_from_json(json.load(handle))
