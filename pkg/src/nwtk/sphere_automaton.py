"""A run discipline that forces states to describe true neighborhoods.

States are sets of extended spheres: a sphere plus an active node and a
color.  Reading position i, a state collects, for every center within the
radius, that center's sphere with the active node placed on i.  Local
transition conditions compare how active nodes move along successor and
matching edges; colors (from an overlap coloring of the word) separate
isomorphic spheres that lie close together, which pins every accepting
run to the real sphere around each position.

Membership of a re-pointed sphere in a state is decided up to
isomorphism via canonical keys; within one state, members with
isomorphic cores and equal colors must agree on the active node.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import RETURN
from .errors import InvalidState, LengthMismatch
from .spheres import Sphere, sphere, sphere_key

__all__ = [
    "ExtendedSphere",
    "SphereState",
    "EMPTY_STATE",
    "StatePredicates",
    "state_predicates",
    "delta_allows",
    "eta",
    "OverlapColoring",
    "chi_coloring",
    "canonical_run",
    "br_run_verify",
    "PLACEHOLDER_SPHERE",
]


class ExtendedSphere:
    """A sphere with an active node and a color."""

    __slots__ = ("core", "active", "color", "key", "so", "si", "mo", "mi", "dist")

    def __init__(self, core: Sphere, active, color: int):
        self.core = core
        self.active = active
        self.color = color
        self.key = (core.key, core.index_of[active], color)
        self.so = core.succ_out.get(active)
        self.si = core.succ_in.get(active)
        mo = core.mu_out.get(active)
        self.mo = mo[0] if mo else None
        mi = core.mu_in.get(active)
        self.mi = mi[0] if mi else None
        self.dist = core.dist[active]

    def key_at(self, node):
        """Key of the same sphere re-pointed to another active node."""
        return (self.core.key, self.core.index_of[node], self.color)

    def __repr__(self):
        return f"ExtendedSphere(center={self.core.center}, active={self.active}, color={self.color})"


class SphereState:
    """A set of extended spheres (possibly empty), deduplicated up to isomorphism."""

    __slots__ = ("members", "key", "core_groups", "label", "valid", "final", "calling")

    def __init__(self, members):
        by_key = {}
        for m in members:
            by_key.setdefault(m.key, m)
        members = tuple(sorted(by_key.values(), key=lambda m: m.key))
        self.members = members
        self.key = frozenset(by_key)
        groups: dict = {}
        for m in members:
            groups.setdefault((m.core.key, m.color), []).append(m.key[1])
        self.core_groups = {k: tuple(v) for k, v in groups.items()}
        if members:
            centered = sum(1 for m in members if m.key[1] == 0)
            labels = {m.core.labels[m.active] for m in members}
            self.label = next(iter(labels)) if len(labels) == 1 else None
            self.valid = (
                centered == 1
                and self.label is not None
                and all(len(v) == 1 for v in self.core_groups.values())
            )
            self.final = all(m.so is None and m.mo is None for m in members)
            self.calling = any(m.mo is not None for m in members)
        else:
            self.label = None
            self.valid = True
            self.final = True
            self.calling = False

    def __eq__(self, other):
        return isinstance(other, SphereState) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return f"SphereState({len(self.members)} members)"


EMPTY_STATE = SphereState(())


@dataclass(frozen=True)
class StatePredicates:
    valid: bool
    final: bool
    calling: bool


def state_predicates(state: SphereState) -> StatePredicates:
    """Role of a state; the empty state is the unique initial state."""
    return StatePredicates(
        valid=state.valid,
        final=state.final,
        calling=state.calling,
    )


def _require_valid(*states):
    for s in states:
        if s is not None and not s.valid:
            raise InvalidState("a state violates the membership conditions")


def delta_allows(prev, matched, symbol, nxt, alphabet=None) -> bool:
    """Whether the automaton permits the step prev -> nxt reading ``symbol``.

    ``matched`` is the state taken right after the matching call, or None
    where no matching edge arrives (then a fresh-position step applies).
    """
    _require_valid(prev, matched, nxt)
    if not nxt.members:
        return False
    if nxt.label != symbol:  # (2)
        return False
    r = nxt.members[0].core.radius
    if matched is None:
        prev_nonempty = bool(prev.members)
        for e2 in nxt.members:
            if e2.mi is not None:  # (1)
                return False
            if e2.si is None:
                if prev_nonempty and e2.dist != r:  # (4)
                    return False
            elif e2.key_at(e2.si) not in prev.key:  # (6)
                return False
        nxt_groups = nxt.core_groups
        nxt_keys = nxt.key
        for e in prev.members:
            so = e.so
            if so is None:
                if e.dist != r:  # (5)
                    return False
                so_idx = -1
            else:
                if e.key_at(so) not in nxt_keys:  # (7)
                    return False
                so_idx = e.core.index_of[so]
            idxs = nxt_groups.get((e.core.key, e.color))
            if idxs:  # (3)
                for ai in idxs:
                    if ai != so_idx:
                        return False
        return True

    # matched-return step
    if alphabet is not None and alphabet.classify(symbol).kind != RETURN:
        return False
    if not prev.members or not matched.members:
        return False
    mat_keys = matched.key
    for e2 in nxt.members:
        if e2.si is None:
            if e2.dist != r:  # (4)
                return False
        elif e2.key_at(e2.si) not in prev.key:  # (6)
            return False
        if e2.mi is None:
            if e2.dist != r:  # (4')
                return False
        elif e2.key_at(e2.mi) not in mat_keys:  # (6')
            return False
    nxt_groups = nxt.core_groups
    nxt_keys = nxt.key
    for e in prev.members:
        so = e.so
        if so is None:
            if e.dist != r:  # (5)
                return False
            so_idx = -1
        else:
            if e.key_at(so) not in nxt_keys:  # (7)
                return False
            so_idx = e.core.index_of[so]
        idxs = nxt_groups.get((e.core.key, e.color))
        if idxs:  # (3)
            for ai in idxs:
                if ai != so_idx:
                    return False
    for e in matched.members:
        mo = e.mo
        if mo is None:
            if e.dist != r:  # (5')
                return False
            mo_idx = -1
        else:
            if e.key_at(mo) not in nxt_keys:  # (7')
                return False
            mo_idx = e.core.index_of[mo]
        idxs = nxt_groups.get((e.core.key, e.color))
        if idxs:  # (3')
            for ai in idxs:
                if ai != mo_idx:
                    return False
    return True


PLACEHOLDER_SPHERE = Sphere((0,), {0: ""}, (), (), 0, 0)


def eta(state: SphereState) -> Sphere:
    """The sphere a state claims for its position: the member whose active
    node is its center; a fixed placeholder for the empty state."""
    _require_valid(state)
    for m in state.members:
        if m.key[1] == 0:
            return m.core
    return PLACEHOLDER_SPHERE


@dataclass(frozen=True)
class OverlapColoring:
    """A coloring separating nearby isomorphic spheres.

    Two positions overlap when their spheres are isomorphic and their
    distance is at most 2r+1; overlapping positions get distinct colors.
    """

    radius: int
    colors: dict
    degrees: dict
    max_degree: int
    num_colors: int


def _overlap_adjacency(word, r, keys):
    """Overlap neighbors per position, via bounded-depth reachability."""
    n = len(word)
    groups: dict = {}
    for i in range(1, n + 1):
        groups.setdefault(keys[i - 1], []).append(i)
    adj = {i: [] for i in range(1, n + 1)}
    limit = 2 * r + 1
    neighbors = word.neighbors
    for key, group in groups.items():
        if len(group) < 2:
            continue
        gset = set(group)
        for i in group:
            seen = {i}
            frontier = [i]
            near = []
            for _ in range(limit):
                nxt = []
                for v in frontier:
                    for u in neighbors(v):
                        if u not in seen:
                            seen.add(u)
                            nxt.append(u)
                            if u in gset:
                                near.append(u)
                frontier = nxt
            adj[i] = near
    return adj


def chi_coloring(word, r: int) -> OverlapColoring:
    keys = [sphere_key(word, i, r) for i in word.positions()]
    return _chi_from_keys(word, r, keys)


def _chi_from_keys(word, r, keys) -> OverlapColoring:
    adj = _overlap_adjacency(word, r, keys)
    colors: dict = {}
    for i in range(1, len(word) + 1):
        used = {colors[j] for j in adj[i] if j in colors}
        c = 1
        while c in used:
            c += 1
        colors[i] = c
    degrees = {i: len(adj[i]) for i in adj}
    return OverlapColoring(
        radius=r,
        colors=colors,
        degrees=degrees,
        max_degree=max(degrees.values(), default=0),
        num_colors=max(colors.values(), default=0),
    )


def canonical_run(word, r: int) -> list[SphereState]:
    """The intended accepting run: state i collects every sphere whose
    center lies within the radius of position i, re-pointed to i."""
    spheres = [sphere(word, i, r) for i in word.positions()]
    coloring = _chi_from_keys(word, r, [s.key for s in spheres])
    colors = coloring.colors
    states = []
    for i in word.positions():
        members = [
            ExtendedSphere(spheres[ip - 1], i, colors[ip])
            for ip in spheres[i - 1].nodes
        ]
        states.append(SphereState(members))
    return states


def br_run_verify(word, r: int, run) -> bool:
    """Check a state sequence against the full run discipline.

    Valid states, permitted steps, a final last state, and matching edges
    at every calling state; any violation yields False.
    """
    run = list(run)
    n = len(word)
    if len(run) != n:
        raise LengthMismatch(f"run has {len(run)} states for {n} positions")
    for state in run:
        if not state.valid or not state.members:
            return False
        if state.members[0].core.radius != r:
            return False
    labels = word.labels
    mu_inv = word.mu_inv
    prev = EMPTY_STATE
    for i in range(1, n + 1):
        call = mu_inv.get(i)
        matched = run[call - 1] if call is not None else None
        if not delta_allows(prev, matched, labels[i - 1], run[i - 1]):
            return False
        prev = run[i - 1]
    if not run[n - 1].final:
        return False
    mu = word.mu
    return all(not run[i - 1].calling or i in mu for i in range(1, n + 1))
