"""Spheres: bounded-radius neighborhoods of word positions.

A sphere is the substructure induced by all positions within a given
distance of a center, where distance counts successor and matching edges
alike.  Spheres are compared up to isomorphism that fixes the center.

Every node carries at most one edge of each kind (successor out/in,
matching out/in), so a breadth-first traversal from the center that
expands edge kinds in a fixed order visits nodes in an order any
isomorphic sphere reproduces exactly.  That order yields a canonical
form in linear time; no search over bijections is needed, and the
traversal level of a node is its distance from the center.
"""

from __future__ import annotations

import json
from .errors import InvalidSphere, PositionOutOfRange, RadiusMismatch

__all__ = [
    "Sphere",
    "sphere",
    "sphere_key",
    "sphere_iso",
    "sphere_count",
    "enumerate_spheres",
    "max_size_bound",
    "sphere_to_json",
    "sphere_from_json",
    "sphere_to_dot",
]


def max_size_bound(radius: int) -> int:
    """Upper bound on sphere size: ball growth in a degree-3 graph."""
    if radius < 0:
        raise InvalidSphere("radius must be non-negative")
    return 1 + 3 * (2**radius - 1)


class Sphere:
    """An induced neighborhood with a distinguished center.

    ``nodes`` keep their original identities (word positions when the
    sphere was extracted from a word).  ``succ`` holds directed successor
    pairs, ``mu`` directed matching triples (call, return, stack).
    """

    __slots__ = (
        "nodes",
        "labels",
        "succ",
        "mu",
        "center",
        "radius",
        "verified",
        "succ_out",
        "succ_in",
        "mu_out",
        "mu_in",
        "index_of",
        "dist",
        "key",
    )

    def __init__(self, nodes, labels, succ, mu, center, radius, verified=False):
        nodes = tuple(sorted(nodes))
        node_set = set(nodes)
        if center not in node_set:
            raise InvalidSphere(f"center {center!r} is not a node")
        if radius < 0:
            raise InvalidSphere("radius must be non-negative")
        if len(nodes) > max_size_bound(radius):
            raise InvalidSphere(
                f"{len(nodes)} nodes exceed the size bound for radius {radius}"
            )
        succ_out: dict = {}
        succ_in: dict = {}
        mu_out: dict = {}
        mu_in: dict = {}
        succ = tuple(sorted(succ))
        mu = tuple(sorted(mu))
        for i, j in succ:
            if i not in node_set or j not in node_set:
                raise InvalidSphere(f"successor edge ({i}, {j}) leaves the node set")
            if i in succ_out or j in succ_in:
                raise InvalidSphere("a node has two successor edges of one kind")
            succ_out[i] = j
            succ_in[j] = i
        for i, j, s in mu:
            if i not in node_set or j not in node_set:
                raise InvalidSphere(f"matching edge ({i}, {j}) leaves the node set")
            if i in mu_out or i in mu_in or j in mu_out or j in mu_in:
                raise InvalidSphere("a node is matched twice")
            if s < 1:
                raise InvalidSphere("stack tags are 1-based")
            mu_out[i] = (j, s)
            mu_in[j] = (i, s)
        labels = dict(labels)
        if set(labels) != node_set:
            raise InvalidSphere("labels must cover exactly the node set")

        # canonical traversal; doubles as the connectivity and radius check
        order = [center]
        index_of = {center: 0}
        dist = {center: 0}
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            d = dist[v] + 1
            for u in (
                succ_out.get(v),
                succ_in.get(v),
                (mu_out[v][0] if v in mu_out else None),
                (mu_in[v][0] if v in mu_in else None),
            ):
                if u is not None and u not in index_of:
                    index_of[u] = len(order)
                    dist[u] = d
                    order.append(u)
        if len(order) != len(nodes):
            raise InvalidSphere("sphere is not connected to its center")
        if dist[order[-1]] > radius:
            raise InvalidSphere("a node lies farther from the center than the radius")

        edges = sorted(
            [(index_of[i], index_of[j], 0) for i, j in succ]
            + [(index_of[i], index_of[j], s) for i, j, s in mu]
        )
        self.nodes = nodes
        self.labels = labels
        self.succ = succ
        self.mu = mu
        self.center = center
        self.radius = radius
        self.verified = verified
        self.succ_out = succ_out
        self.succ_in = succ_in
        self.mu_out = mu_out
        self.mu_in = mu_in
        self.index_of = index_of
        self.dist = dist
        self.key = (
            radius,
            tuple(labels[v] for v in order),
            tuple(edges),
        )

    def size(self) -> int:
        return len(self.nodes)

    def __repr__(self):
        parts = " ".join(f"{v}:{self.labels[v]}" for v in self.nodes)
        return f"Sphere(r={self.radius}, center={self.center}, {parts})"


def sphere(word, i: int, r: int) -> Sphere:
    """Extract the radius-r sphere of a word around position i."""
    n = len(word)
    if not 1 <= i <= n:
        raise PositionOutOfRange(f"position {i} not in 1..{n}")
    mu = word.mu
    mu_inv = word.mu_inv
    dist = {i: 0}
    frontier = [i]
    for d in range(1, r + 1):
        nxt = []
        for v in frontier:
            if v > 1 and v - 1 not in dist:
                dist[v - 1] = d
                nxt.append(v - 1)
            if v < n and v + 1 not in dist:
                dist[v + 1] = d
                nxt.append(v + 1)
            p = mu.get(v)
            if p is None:
                p = mu_inv.get(v)
            if p is not None and p not in dist:
                dist[p] = d
                nxt.append(p)
        frontier = nxt
    nodes = dist.keys()
    labels = {v: word.labels[v - 1] for v in nodes}
    succ = [(v, v + 1) for v in nodes if v + 1 in dist]
    mu_edges = [
        (v, mu[v], word.stack_of[v]) for v in nodes if v in mu and mu[v] in dist
    ]
    return Sphere(nodes, labels, succ, mu_edges, i, r, verified=True)


def sphere_key(word, i: int, r: int):
    """Canonical key of ``sphere(word, i, r)`` without building the object.

    Equal keys mean isomorphic spheres; the traversal and edge encoding
    mirror the ``Sphere`` constructor exactly.
    """
    n = len(word)
    if not 1 <= i <= n:
        raise PositionOutOfRange(f"position {i} not in 1..{n}")
    if r < 0:
        raise InvalidSphere("radius must be non-negative")
    mu = word.mu
    mu_inv = word.mu_inv
    dist = {i: 0}
    frontier = [i]
    for d in range(1, r + 1):
        nxt = []
        for v in frontier:
            u = v - 1
            if v > 1 and u not in dist:
                dist[u] = d
                nxt.append(u)
            u = v + 1
            if v < n and u not in dist:
                dist[u] = d
                nxt.append(u)
            p = mu.get(v)
            if p is None:
                p = mu_inv.get(v)
            if p is not None and p not in dist:
                dist[p] = d
                nxt.append(p)
        frontier = nxt
    order = [i]
    index_of = {i: 0}
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for u in (v + 1, v - 1, mu.get(v), mu_inv.get(v)):
            if u is not None and u in dist and u not in index_of:
                index_of[u] = len(order)
                order.append(u)
    labels = word.labels
    stack_of = word.stack_of
    edges = []
    for v in dist:
        u = v + 1
        if u in dist:
            edges.append((index_of[v], index_of[u], 0))
        u = mu.get(v)
        if u is not None and u in dist:
            edges.append((index_of[v], index_of[u], stack_of[v]))
    edges.sort()
    return (r, tuple(labels[v - 1] for v in order), tuple(edges))


def sphere_iso(a: Sphere, b: Sphere) -> bool:
    """Isomorphism respecting labels, edge kinds, stack tags, and the center."""
    if a.radius != b.radius:
        raise RadiusMismatch(f"cannot compare radii {a.radius} and {b.radius}")
    return a.key == b.key


def sphere_count(word, target: Sphere, r: int) -> int:
    """How many positions of the word realize the target sphere."""
    if target.radius != r:
        raise RadiusMismatch(f"target has radius {target.radius}, expected {r}")
    key = target.key
    return sum(1 for i in word.positions() if sphere_key(word, i, r) == key)


def enumerate_spheres(alphabet, r: int, max_len: int):
    """All sphere shapes realized by words up to the given length.

    An under-approximation of the full shape space, adequate as a
    corpus-backed universe; returns one representative per shape.
    """
    from .core import iter_token_tuples, nested

    seen = {}
    for tokens in iter_token_tuples(alphabet, max_len):
        word = nested(alphabet, tokens)
        for i in word.positions():
            s = sphere(word, i, r)
            if s.key not in seen:
                seen[s.key] = s
    return list(seen.values())


def sphere_to_json(s: Sphere) -> dict:
    return {
        "nodes": [{"id": v, "label": s.labels[v]} for v in s.nodes],
        "succ": [[i, j] for i, j in s.succ],
        "match": [[i, j, st] for i, j, st in s.mu],
        "center": s.center,
        "radius": s.radius,
    }


def sphere_from_json(data) -> Sphere:
    if isinstance(data, str):
        data = json.loads(data)
    labels = {entry["id"]: entry["label"] for entry in data["nodes"]}
    return Sphere(
        labels.keys(),
        labels,
        [tuple(e) for e in data["succ"]],
        [tuple(e) for e in data["match"]],
        data["center"],
        data["radius"],
    )


def sphere_to_dot(s: Sphere, name: str = "sphere") -> str:
    """Graphviz rendering; the center is drawn as a rectangle."""
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for v in s.nodes:
        shape = ", shape=box" if v == s.center else ""
        lines.append(f'  n{v} [label="{v}:{s.labels[v]}"{shape}];')
    for i, j in s.succ:
        lines.append(f"  n{i} -> n{j};")
    for i, j, st in s.mu:
        lines.append(f'  n{i} -> n{j} [style=dashed, label="{st}", constraint=false];')
    lines.append("}")
    return "\n".join(lines)
