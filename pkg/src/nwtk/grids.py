"""Labeled grids, their nested-word encoding, and the machinery to check
that the encoding is a strong first-order reduction.

A grid cell (i, j) with odd column j is represented by a call labeled a,
with even j by a call labeled b; the cell's second representative is the
matching return.  Columns alternate direction: odd columns read top to
bottom, even columns bottom to top.  ``verify_reduction`` replays every
defining equivalence of the reduction mechanically, quantifying over all
cell tuples and evaluating both sides with the formula evaluator.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import CallReturnAlphabet, NestedWord, nested
from .errors import AlphabetMismatch, BoundsExceeded, UnknownSymbol
from .logic import (
    And,
    Eq,
    ExistsFO,
    Forall,
    Implies,
    Label,
    Match,
    Not,
    Or,
    Rel,
    Succ,
    eval as eval_formula,
)

__all__ = [
    "GRID_ALPHABET",
    "Grid",
    "GridEncoding",
    "encode",
    "reduction_formulas",
    "ReductionReport",
    "verify_reduction",
    "image_membership",
    "image_property_formulas",
]

GRID_ALPHABET = CallReturnAlphabet(((("a",), ("a~",)), (("b",), ("b~",))))

VERIFY_CAP = 64


class Grid:
    """The (n, m) grid: cells [n] x [m], row steps succ1, column steps
    succ2, odd columns in P_a, even columns in P_b."""

    __slots__ = ("n", "m")

    def __init__(self, n: int, m: int):
        if n < 1 or m < 1:
            raise BoundsExceeded("grids need at least one row and column")
        self.n = n
        self.m = m

    def universe(self):
        return [(i, j) for j in range(1, self.m + 1) for i in range(1, self.n + 1)]

    def has(self, name: str, args) -> bool:
        if name == "P_a":
            return args[0][1] % 2 == 1
        if name == "P_b":
            return args[0][1] % 2 == 0
        if name == "succ1":
            (i, j), (i2, j2) = args
            return i2 == i + 1 and j2 == j
        if name == "succ2":
            (i, j), (i2, j2) = args
            return i2 == i and j2 == j + 1
        raise UnknownSymbol(f"grids have no relation {name!r}")

    def __eq__(self, other):
        return isinstance(other, Grid) and (self.n, self.m) == (other.n, other.m)

    def __hash__(self):
        return hash((self.n, self.m))

    def __repr__(self):
        return f"Grid({self.n}, {self.m})"


@dataclass(frozen=True)
class GridEncoding:
    """A grid with its word, the cell-to-call map chi, and the two-copy
    bijection chi_bar (copy 1 the call, copy 2 its return)."""

    grid: Grid
    word: NestedWord
    chi: dict
    chi_bar: dict


def encode(n: int, m: int) -> GridEncoding:
    grid = Grid(n, m)
    tokens: list[str] = ["a"] * n
    ab = ["a~", "b"] * n
    ba = ["b~", "a"] * n
    if m % 2 == 1:
        for _ in range((m - 1) // 2):
            tokens += ab + ba
        tokens += ["a~"] * n
    else:
        for _ in range(m // 2 - 1):
            tokens += ab + ba
        tokens += ab + ["b~"] * n
    word = nested(GRID_ALPHABET, tokens)

    pos_a = [p for p in word.positions() if tokens[p - 1] == "a"]
    pos_b = [p for p in word.positions() if tokens[p - 1] == "b"]
    chi = {}
    for j in range(1, m + 1):
        for i in range(1, n + 1):
            if j % 2 == 1:
                chi[(i, j)] = pos_a[n * ((j + 1) // 2 - 1) + i - 1]
            else:
                chi[(i, j)] = pos_b[n * (j // 2 - 1) + (n - i)]
    chi_bar = {}
    for u, p in chi.items():
        chi_bar[(1, u)] = p
        chi_bar[(2, u)] = word.mu[p]
    return GridEncoding(grid, word, chi, chi_bar)


def _false():
    return Not(Eq("u1", "u1"))


def reduction_formulas() -> dict:
    """The defining formulas of the reduction, keyed by relation.

    Grid-side formulas (for word relations) use variables u1, u2; word-side
    formulas (for grid relations) use x1, x2.
    """
    P_a = Rel("P_a", ("u1",))
    P_b = Rel("P_b", ("u1",))
    label: dict = {}
    for c in ("a", "b"):
        label[(c, 1)] = Rel(f"P_{c}", ("u1",))
        label[(c, 2)] = _false()
        label[(c + "~", 1)] = _false()
        label[(c + "~", 2)] = Rel(f"P_{c}", ("u1",))

    succ = {
        (1, 1): And(
            Rel("succ1", ("u1", "u2")),
            Not(ExistsFO("z", Rel("succ2", ("z", "u1")))),
        ),
        (1, 2): Or(
            Or(
                And(
                    And(Eq("u1", "u2"), P_a),
                    Not(ExistsFO("z", Rel("succ1", ("u1", "z")))),
                ),
                And(
                    And(Eq("u1", "u2"), P_b),
                    Not(ExistsFO("z", Rel("succ1", ("z", "u1")))),
                ),
            ),
            Or(
                And(
                    And(P_a, Rel("P_b", ("u2",))),
                    ExistsFO(
                        "z",
                        And(Rel("succ1", ("u1", "z")), Rel("succ2", ("u2", "z"))),
                    ),
                ),
                And(
                    And(P_b, Rel("P_a", ("u2",))),
                    ExistsFO(
                        "z",
                        And(Rel("succ1", ("z", "u1")), Rel("succ2", ("u2", "z"))),
                    ),
                ),
            ),
        ),
        (2, 1): Rel("succ2", ("u1", "u2")),
        (2, 2): Or(
            And(
                And(P_a, Rel("succ1", ("u2", "u1"))),
                Not(ExistsFO("z", Rel("succ2", ("u1", "z")))),
            ),
            And(
                And(P_b, Rel("succ1", ("u1", "u2"))),
                Not(ExistsFO("z", Rel("succ2", ("u1", "z")))),
            ),
        ),
    }
    match = {
        (1, 1): _false(),
        (1, 2): Eq("u1", "u2"),
        (2, 1): _false(),
        (2, 2): _false(),
    }

    def two_apart(v, w, mid_label):
        return ExistsFO(
            "z", And(And(Succ(v, "z"), Succ("z", w)), Label("z", mid_label))
        )

    succ1 = Or(
        And(
            And(Label("x1", "a"), Label("x2", "a")),
            Or(Succ("x1", "x2"), two_apart("x1", "x2", "b~")),
        ),
        And(
            And(Label("x1", "b"), Label("x2", "b")),
            two_apart("x2", "x1", "a~"),
        ),
    )
    succ2 = ExistsFO("z", And(Match("x1", "z"), Succ("z", "x2")))
    return {
        "psi": Match("x1", "x2"),
        "label": label,
        "succ": succ,
        "match": match,
        "P": {"a": Label("x1", "a"), "b": Label("x1", "b")},
        "succ1": succ1,
        "succ2": succ2,
    }


@dataclass(frozen=True)
class ReductionReport:
    n: int
    m: int
    ok: bool
    checked: int
    failure: dict | None


def verify_reduction(n: int, m: int, formulas=None) -> ReductionReport:
    """Replay every defining equivalence of the reduction on (n, m).

    Checks, in order: chi_bar is a bijection; the pairing formula matches
    the copy pairing; each word relation agrees with its grid formula on
    all cell tuples and copy assignments; each grid relation agrees with
    its word formula.  Stops at the first failing tuple.
    """
    if 2 * n * m > VERIFY_CAP:
        raise BoundsExceeded(
            f"word has {2 * n * m} positions, verification cap is {VERIFY_CAP}"
        )
    enc = encode(n, m)
    grid, word, chi, chi_bar = enc.grid, enc.word, enc.chi, enc.chi_bar
    fs = formulas if formulas is not None else reduction_formulas()
    cells = grid.universe()
    checked = 0

    def report(failure):
        return ReductionReport(n, m, False, checked, failure)

    values = sorted(chi_bar.values())
    if values != list(word.positions()):
        return report({"condition": "bijection", "got": values})
    checked += 1

    pairing = {(chi_bar[(1, u)], chi_bar[(2, u)]) for u in cells}
    for p in word.positions():
        for q in word.positions():
            lhs = eval_formula(word, fs["psi"], {"x1": p, "x2": q})
            if lhs != ((p, q) in pairing):
                return report(
                    {"condition": "pairing", "tuple": (p, q), "word": lhs}
                )
            checked += 1

    for (c, k), phi in fs["label"].items():
        for u in cells:
            lhs = eval_formula(grid, phi, {"u1": u})
            rhs = eval_formula(word, Label("x1", c), {"x1": chi_bar[(k, u)]})
            if lhs != rhs:
                return report(
                    {
                        "condition": "word-relation",
                        "relation": f"label:{c}",
                        "kappa": (k,),
                        "tuple": (u,),
                        "grid": lhs,
                        "word": rhs,
                    }
                )
            checked += 1

    for rel, table in (("succ", fs["succ"]), ("match", fs["match"])):
        word_atom = Succ("x1", "x2") if rel == "succ" else Match("x1", "x2")
        for kappa, phi in table.items():
            k1, k2 = kappa
            for u1 in cells:
                for u2 in cells:
                    lhs = eval_formula(grid, phi, {"u1": u1, "u2": u2})
                    rhs = eval_formula(
                        word,
                        word_atom,
                        {"x1": chi_bar[(k1, u1)], "x2": chi_bar[(k2, u2)]},
                    )
                    if lhs != rhs:
                        return report(
                            {
                                "condition": "word-relation",
                                "relation": rel,
                                "kappa": kappa,
                                "tuple": (u1, u2),
                                "grid": lhs,
                                "word": rhs,
                            }
                        )
                    checked += 1

    for c in ("a", "b"):
        for u in cells:
            lhs = eval_formula(grid, Rel(f"P_{c}", ("u1",)), {"u1": u})
            rhs = eval_formula(word, fs["P"][c], {"x1": chi[u]})
            if lhs != rhs:
                return report(
                    {
                        "condition": "grid-relation",
                        "relation": f"P_{c}",
                        "tuple": (u,),
                        "grid": lhs,
                        "word": rhs,
                    }
                )
            checked += 1
    for rel in ("succ1", "succ2"):
        for u1 in cells:
            for u2 in cells:
                lhs = eval_formula(grid, Rel(rel, ("u1", "u2")), {"u1": u1, "u2": u2})
                rhs = eval_formula(
                    word, fs[rel], {"x1": chi[u1], "x2": chi[u2]}
                )
                if lhs != rhs:
                    return report(
                        {
                            "condition": "grid-relation",
                            "relation": rel,
                            "tuple": (u1, u2),
                            "grid": lhs,
                            "word": rhs,
                        }
                    )
                checked += 1
    return ReductionReport(n, m, True, checked, None)


# ---------------------------------------------------------------------------
# the image of the encoding

def _shape_ok(tokens) -> bool:
    """Scan for a+ [(a~ b)+ (b~ a)+]* a~+  or  a+ [(a~ b)+ (b~ a)+]* (a~ b)+ b~+."""
    n = len(tokens)
    p = 0
    while p < n and tokens[p] == "a":
        p += 1
    if p == 0:
        return False
    while True:
        if p == n:
            return False
        if all(t == "a~" for t in tokens[p:]):
            return True
        # (a~ b)+, maximal
        if tokens[p] != "a~":
            return False
        while p < n and tokens[p] == "a~":
            if p + 1 >= n or tokens[p + 1] != "b":
                return False
            p += 2
        if p == n:
            return False
        if all(t == "b~" for t in tokens[p:]):
            return True
        # (b~ a)+, maximal
        if tokens[p] != "b~":
            return False
        while p < n and tokens[p] == "b~":
            if p + 1 >= n or tokens[p + 1] != "a":
                return False
            p += 2


def _offsets_ok(word) -> bool:
    """The five offset implications over pairs of equally labeled matched calls."""
    labels = word.labels
    pairs = sorted(word.mu.items())
    for x1, y1 in pairs:
        lx = labels[x1 - 1]
        ly = labels[y1 - 1]
        for x2, y2 in pairs:
            if labels[x2 - 1] != lx:
                continue
            dx = x2 - x1
            dy = y1 - y2
            if lx == "a" and dx == 1 and dy not in (1, 2):
                return False
            if ly == "a~" and dy == 1 and dx not in (1, 2):
                return False
            if ly == "b~" and dy == 1 and dx != 2:
                return False
            if dx == 2 and labels[x1] != lx and dy not in (1, 2):
                return False
            if dy == 2 and labels[y2] != labels[y2 - 1] and dx not in (1, 2):
                return False
    return True


def image_membership(word: NestedWord) -> bool:
    """Whether the word encodes some grid: the block shape, a total
    matching, and the five offset implications together."""
    if word.alphabet != GRID_ALPHABET:
        raise AlphabetMismatch("image membership is defined over the grid alphabet")
    return (
        _shape_ok(word.labels)
        and not word.pending
        and _offsets_ok(word)
    )


def image_property_formulas() -> dict:
    """The logical forms of the matching and offset parts, for cross-checks."""
    total = Forall("x", ExistsFO("y", Or(Match("x", "y"), Match("y", "x"))))

    counter = [0]

    def fresh():
        counter[0] += 1
        return f"z{counter[0]}"

    def same_label(v, w):
        out = None
        for c in GRID_ALPHABET.symbols:
            clause = And(Label(v, c), Label(w, c))
            out = clause if out is None else Or(out, clause)
        return out

    def dist1(v, w):
        return Succ(v, w)

    def dist2(v, w):
        z = fresh()
        return ExistsFO(z, And(Succ(v, z), Succ(z, w)))

    def dist12(v, w):
        return Or(dist1(v, w), dist2(v, w))

    def next_differs(v):
        z = fresh()
        return ExistsFO(z, And(Succ(v, z), Not(same_label(v, z))))

    premise = And(
        same_label("x1", "x2"), And(Match("x1", "y1"), Match("x2", "y2"))
    )
    clauses = And(
        And(
            Implies(And(Label("x1", "a"), dist1("x1", "x2")), dist12("y2", "y1")),
            Implies(And(Label("y1", "a~"), dist1("y2", "y1")), dist12("x1", "x2")),
        ),
        And(
            Implies(And(Label("y1", "b~"), dist1("y2", "y1")), dist2("x1", "x2")),
            And(
                Implies(
                    And(dist2("x1", "x2"), next_differs("x1")), dist12("y2", "y1")
                ),
                Implies(
                    And(dist2("y2", "y1"), next_differs("y2")), dist12("x1", "x2")
                ),
            ),
        ),
    )
    offsets = Forall(
        "x1",
        Forall("x2", Forall("y1", Forall("y2", Implies(premise, clauses)))),
    )
    return {"total": total, "offsets": offsets}
