"""Call-return alphabets and the nested words they induce.

A K-stack call-return alphabet partitions its symbols into K call/return
pairs of sets plus a set of internal symbols.  A word over such an alphabet
determines, per stack, a unique matching between calls and returns; the word
together with that matching is a nested word.  Positions are 1-based in every
public interface.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .errors import (
    DuplicateSymbol,
    EmptyAlphabet,
    EmptyWord,
    PositionOutOfRange,
    UnknownSymbol,
)

CALL = "call"
RETURN = "return"
INTERNAL = "internal"


@dataclass(frozen=True)
class SymbolClass:
    """Role of a symbol: call/return with a 1-based stack index, or internal."""

    kind: str
    stack: int | None = None


class CallReturnAlphabet:
    """K disjoint call/return symbol pairs plus internal symbols.

    Component order is preserved from construction; it fixes the symbol
    order used by corpus enumeration and serialization.
    """

    __slots__ = ("stacks", "internal", "_class_of", "symbols")

    def __init__(self, stacks, internal=()):
        stacks = tuple((tuple(c), tuple(r)) for c, r in stacks)
        internal = tuple(internal)
        if not stacks:
            raise EmptyAlphabet("at least one call/return stack is required")
        class_of: dict[str, SymbolClass] = {}
        order: list[str] = []

        def add(sym, cls):
            if not isinstance(sym, str) or not sym:
                raise UnknownSymbol(f"symbols must be non-empty strings, got {sym!r}")
            if sym in class_of:
                raise DuplicateSymbol(f"symbol {sym!r} occurs twice")
            class_of[sym] = cls
            order.append(sym)

        for s, (calls, returns) in enumerate(stacks, start=1):
            for sym in calls:
                add(sym, SymbolClass(CALL, s))
            for sym in returns:
                add(sym, SymbolClass(RETURN, s))
        for sym in internal:
            add(sym, SymbolClass(INTERNAL))
        object.__setattr__(self, "stacks", stacks)
        object.__setattr__(self, "internal", internal)
        object.__setattr__(self, "_class_of", class_of)
        object.__setattr__(self, "symbols", tuple(order))

    @property
    def k(self) -> int:
        return len(self.stacks)

    def classify(self, symbol: str) -> SymbolClass:
        try:
            return self._class_of[symbol]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol!r} is not in the alphabet") from None

    def __contains__(self, symbol) -> bool:
        return symbol in self._class_of

    def calls(self, stack=None):
        if stack is None:
            return tuple(s for c, _ in self.stacks for s in c)
        return self.stacks[stack - 1][0]

    def returns(self, stack=None):
        if stack is None:
            return tuple(s for _, r in self.stacks for s in r)
        return self.stacks[stack - 1][1]

    def __eq__(self, other):
        return (
            isinstance(other, CallReturnAlphabet)
            and self.stacks == other.stacks
            and self.internal == other.internal
        )

    def __hash__(self):
        return hash((self.stacks, self.internal))

    def __repr__(self):
        return f"CallReturnAlphabet(stacks={self.stacks!r}, internal={self.internal!r})"


def validate_alphabet(raw) -> CallReturnAlphabet:
    """Build an alphabet from the JSON shape {"stacks": [{"calls": [...], "returns": [...]}], "internal": [...]}."""
    if isinstance(raw, CallReturnAlphabet):
        return raw
    stacks = [(entry["calls"], entry["returns"]) for entry in raw.get("stacks", ())]
    return CallReturnAlphabet(stacks, raw.get("internal", ()))


def alphabet_to_json(alphabet: CallReturnAlphabet) -> dict:
    return {
        "stacks": [
            {"calls": list(c), "returns": list(r)} for c, r in alphabet.stacks
        ],
        "internal": list(alphabet.internal),
    }


class NestedWord:
    """A word with its per-stack call/return matching.

    ``mu`` maps each matched call to its return, ``mu_inv`` the reverse,
    ``stack_of`` gives the stack index of a matched call.  ``pending``
    holds the positions of unmatched calls and returns.
    """

    __slots__ = ("alphabet", "labels", "mu", "mu_inv", "stack_of", "pending")

    def __init__(self, alphabet, labels, mu, stack_of, pending):
        self.alphabet = alphabet
        self.labels = tuple(labels)
        self.mu = mu
        self.mu_inv = {j: i for i, j in mu.items()}
        self.stack_of = stack_of
        self.pending = frozenset(pending)

    def __len__(self):
        return len(self.labels)

    def label(self, i: int) -> str:
        if not 1 <= i <= len(self.labels):
            raise PositionOutOfRange(f"position {i} not in 1..{len(self.labels)}")
        return self.labels[i - 1]

    def positions(self):
        return range(1, len(self.labels) + 1)

    def matches(self):
        """All matched pairs as (call, return, stack), sorted by call."""
        return sorted((i, j, self.stack_of[i]) for i, j in self.mu.items())

    def neighbors(self, i: int):
        """Adjacent positions: predecessor, successor, and the matching partner."""
        out = []
        if i > 1:
            out.append(i - 1)
        if i < len(self.labels):
            out.append(i + 1)
        j = self.mu.get(i)
        if j is None:
            j = self.mu_inv.get(i)
        if j is not None:
            out.append(j)
        return out

    # logic-evaluation hooks (see logic.eval)
    def universe(self):
        return range(1, len(self.labels) + 1)

    def has(self, name: str, args) -> bool:
        if name == "succ":
            i, j = args
            return j == i + 1
        if name == "match":
            i, j = args
            return self.mu.get(i) == j
        if name.startswith("label:"):
            (i,) = args
            return self.labels[i - 1] == name[6:]
        raise UnknownSymbol(f"nested words have no relation {name!r}")

    def __eq__(self, other):
        return (
            isinstance(other, NestedWord)
            and self.alphabet == other.alphabet
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"NestedWord({' '.join(self.labels)})"


def nested(alphabet: CallReturnAlphabet, tokens) -> NestedWord:
    """Build the nested word of a token sequence.

    One left-to-right scan per construction: each stack keeps its open
    calls; a return closes the most recent open call of its own stack or
    stays pending when there is none.
    """
    tokens = tuple(tokens)
    if not tokens:
        raise EmptyWord("words must be non-empty")
    classify = alphabet.classify
    open_calls: list[list[int]] = [[] for _ in range(alphabet.k)]
    mu: dict[int, int] = {}
    stack_of: dict[int, int] = {}
    pending: list[int] = []
    for pos, sym in enumerate(tokens, start=1):
        cls = classify(sym)
        if cls.kind == CALL:
            open_calls[cls.stack - 1].append(pos)
        elif cls.kind == RETURN:
            opened = open_calls[cls.stack - 1]
            if opened:
                call = opened.pop()
                mu[call] = pos
                stack_of[call] = cls.stack
            else:
                pending.append(pos)
    for opened in open_calls:
        pending.extend(opened)
    return NestedWord(alphabet, tokens, mu, stack_of, pending)


def string(word: NestedWord) -> tuple[str, ...]:
    """The underlying token sequence of a nested word."""
    return word.labels


def is_well_formed(alphabet: CallReturnAlphabet, tokens, stack: int) -> bool:
    """Whether the projection onto one stack's calls and returns is balanced."""
    if not 1 <= stack <= alphabet.k:
        raise PositionOutOfRange(f"stack {stack} not in 1..{alphabet.k}")
    classify = alphabet.classify
    depth = 0
    for sym in tokens:
        cls = classify(sym)
        if cls.stack != stack:
            continue
        if cls.kind == CALL:
            depth += 1
        else:
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def distance(word: NestedWord, i: int, j: int):
    """Length of a shortest path along successor and matching edges.

    Within one word every pair is connected; the walk over an arbitrary
    substructure may not be, in which case ``math.inf`` would be the
    natural answer and ``None`` is returned here.
    """
    n = len(word)
    if not 1 <= i <= n:
        raise PositionOutOfRange(f"position {i} not in 1..{n}")
    if not 1 <= j <= n:
        raise PositionOutOfRange(f"position {j} not in 1..{n}")
    if i == j:
        return 0
    seen = {i: 0}
    queue = deque((i,))
    while queue:
        v = queue.popleft()
        d = seen[v] + 1
        for u in word.neighbors(v):
            if u == j:
                return d
            if u not in seen:
                seen[u] = d
                queue.append(u)
    return None


def iter_token_tuples(alphabet: CallReturnAlphabet, max_len: int):
    """All token sequences of length 1..max_len in length-lexicographic order.

    Lexicographic order follows the alphabet's component order.
    """
    from itertools import product

    symbols = alphabet.symbols
    for length in range(1, max_len + 1):
        yield from product(symbols, repeat=length)


# ---------------------------------------------------------------------------
# serialization

def parse_word_line(alphabet: CallReturnAlphabet, line: str) -> NestedWord:
    return nested(alphabet, line.split())

def format_word(word: NestedWord) -> str:
    return " ".join(word.labels)


def read_word_file(path, alphabet: CallReturnAlphabet) -> list[NestedWord]:
    """One word per line, whitespace-separated tokens; blank lines ignored."""
    words = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                words.append(parse_word_line(alphabet, line))
    return words


def load_alphabet(path) -> CallReturnAlphabet:
    with open(path, "r", encoding="utf-8") as handle:
        return validate_alphabet(json.load(handle))


def word_to_dot(word: NestedWord, name: str = "word") -> str:
    """Graphviz rendering: solid successor arcs, dashed matching arcs."""
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for i in word.positions():
        lines.append(f'  p{i} [label="{i}:{word.label(i)}"];')
    for i in range(1, len(word)):
        lines.append(f"  p{i} -> p{i + 1};")
    for i, j, s in word.matches():
        lines.append(f'  p{i} -> p{j} [style=dashed, label="{s}", constraint=false];')
    lines.append("}")
    return "\n".join(lines)
