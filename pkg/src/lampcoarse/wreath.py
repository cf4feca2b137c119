"""Wreath products of graphs, lamplighter graphs and wreath product groups.

A vertex of the wreath product (X, o) wr Y is a finitely supported
colouring of V(Y) by vertices of X together with an arrow in V(Y). The
metric is computed exactly: the arrow has to tour every lamp whose colour
differs (a fixed-endpoint travelling-salesman path in Y, solved by
Held-Karp) and each such lamp pays the X-distance between its two colours.
"""

from __future__ import annotations

import ast
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import CapExceeded, DisconnectedGraph, LampcoarseError, UnknownVertex, WindowError
from .graph import (
    Graph,
    Metric,
    Window,
    _bfs,
    bfs_window,
    complete_graph,
    from_oracle,
    shortest_path,
    sort_vertices,
    vertex_key,
)

HELD_KARP_CAP = 20
MATERIALIZE_CAP = 10**6


# ---------------------------------------------------------------- colourings


class Colouring:
    """Finitely supported colouring in canonical form (no default entries)."""

    __slots__ = ("_items", "_map", "default", "_hash")

    def __init__(self, values: Mapping | Iterable[tuple] = (), default=0):
        raw = dict(values)
        m = {q: x for q, x in raw.items() if x != default}
        self._items = tuple(sorted(m.items(), key=lambda kv: vertex_key(kv[0])))
        self._map = m
        self.default = default
        self._hash = hash((self._items, default))

    def __getitem__(self, q):
        return self._map.get(q, self.default)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Colouring)
            and self._hash == other._hash
            and self._items == other._items
            and self.default == other.default
        )

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self._items)

    def __repr__(self) -> str:
        return f"Colouring({str(self)})"

    def __str__(self) -> str:
        return "{" + ",".join(f"{_fmt(q)}:{_fmt(x)}" for q, x in self._items) + "}"

    def sort_key(self) -> tuple:
        return tuple((vertex_key(q), vertex_key(x)) for q, x in self._items)

    def items(self) -> tuple:
        return self._items

    def as_dict(self) -> dict:
        return dict(self._map)

    @property
    def support(self) -> frozenset:
        return frozenset(self._map)

    def differs(self, other: "Colouring") -> frozenset:
        """Positions where the two colourings disagree (c1 triangle c2)."""
        keys = self._map.keys() | other._map.keys()
        return frozenset(q for q in keys if self[q] != other[q])

    def updated(self, q, x) -> "Colouring":
        m = dict(self._map)
        m[q] = x
        return Colouring(m, self.default)

    def restrict(self, positions: Iterable) -> "Colouring":
        keep = set(positions)
        return Colouring({q: x for q, x in self._map.items() if q in keep}, self.default)

    def restrict_outside(self, positions: Iterable) -> "Colouring":
        drop = set(positions)
        return Colouring({q: x for q, x in self._map.items() if q not in drop}, self.default)


def colour_add(a: Colouring, b: Colouring, n: int) -> Colouring:
    keys = a.support | b.support
    return Colouring({q: (a[q] + b[q]) % n for q in keys})


def colour_sub(a: Colouring, b: Colouring, n: int) -> Colouring:
    keys = a.support | b.support
    return Colouring({q: (a[q] - b[q]) % n for q in keys})


def _fmt(v) -> str:
    return repr(v).replace(" ", "") if isinstance(v, tuple) else str(v)


@dataclass(frozen=True)
class LampVertex:
    colouring: Colouring
    arrow: object

    def __str__(self) -> str:
        return f"{self.colouring}@{_fmt(self.arrow)}"

    def __repr__(self) -> str:
        return f"LampVertex({self})"

    def sort_key(self) -> tuple:
        return (vertex_key(self.arrow), self.colouring.sort_key())


def lamp(colours: Mapping | None = None, arrow=0, default=0) -> LampVertex:
    return LampVertex(Colouring(colours or {}, default), arrow)


_VERTEX_RE = re.compile(r"^\{(?P<body>.*)\}@(?P<arrow>.+)$")


def parse_lamp_vertex(text: str, default=0) -> LampVertex:
    """Parse the text form ``{v1:c1,v2:c2}@p``."""
    m = _VERTEX_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a lamp vertex: {text!r}")
    body = m.group("body").strip()
    colours = {}
    if body:
        try:
            parsed = ast.literal_eval("{" + body + "}")
        except (ValueError, SyntaxError) as exc:
            raise ValueError(f"bad colouring in {text!r}") from exc
        colours = dict(parsed)
    try:
        arrow = ast.literal_eval(m.group("arrow"))
    except (ValueError, SyntaxError):
        arrow = m.group("arrow")
    return LampVertex(Colouring(colours, default), arrow)


# ---------------------------------------------------------------- spaces


class WreathSpace:
    """The wreath product (lamp, basepoint) wr base of two connected graphs."""

    def __init__(self, lamp: Graph, base: Graph, basepoint=None, colours: int | None = None, name: str = ""):
        if len(lamp) == 0 or len(base) == 0:
            raise ValueError("lamp and base graphs must be nonempty")
        lamp.require_connected()
        base.require_connected()
        if basepoint is None:
            basepoint = lamp.vertices[0]
        lamp.check(basepoint)
        self.lamp = lamp
        self.base = base
        self.basepoint = basepoint
        self.colours = colours
        self.name = name or (f"L{colours}({base.name})" if colours else f"({lamp.name}) wr ({base.name})")
        self.base_metric = Metric(base)
        self._lamp_dist = {v: _bfs(lamp, [v]) for v in lamp.vertices}

    @classmethod
    def lamplighter(cls, n: int, base: Graph) -> "WreathSpace":
        if n < 1:
            raise ValueError("number of colours must be positive")
        return cls(complete_graph(n), base, 0, colours=n)

    def __repr__(self) -> str:
        return f"<WreathSpace {self.name}>"

    @property
    def base_degree(self) -> int:
        return self.base.max_degree()

    def lamp_distance(self, x, y) -> int:
        return self._lamp_dist[x][y]

    def colouring(self, values: Mapping | Iterable[tuple] = ()) -> Colouring:
        return Colouring(values, self.basepoint)

    def vertex(self, values: Mapping | Iterable[tuple] = (), arrow=None) -> LampVertex:
        v = LampVertex(self.colouring(values), self.base.vertices[0] if arrow is None else arrow)
        self.check(v)
        return v

    def check(self, v: LampVertex) -> None:
        if not isinstance(v, LampVertex):
            raise TypeError(f"expected LampVertex, got {type(v).__name__}")
        if v.arrow not in self.base:
            raise UnknownVertex(f"arrow {v.arrow!r} is not a base vertex")
        if v.colouring.default != self.basepoint:
            raise LampcoarseError("colouring default differs from the lamp basepoint")
        for q, x in v.colouring.items():
            if q not in self.base:
                raise UnknownVertex(f"lamp position {q!r} is not a base vertex")
            if x not in self.lamp:
                raise UnknownVertex(f"colour {x!r} is not a lamp vertex")


def neighbors(w: WreathSpace, v: LampVertex) -> list[LampVertex]:
    """Arrow moves along base edges plus colour moves at the arrow along lamp edges."""
    w.check(v)
    c, p = v.colouring, v.arrow
    out = [LampVertex(c, q) for q in w.base.neighbors(p)]
    out.extend(LampVertex(c.updated(p, x), p) for x in w.lamp.neighbors(c[p]))
    return sort_vertices(set(out))


def _neighbour_oracle(w: WreathSpace) -> Callable[[LampVertex], list]:
    base_rim = w.base.rim

    def nbrs(v: LampVertex) -> list:
        out = neighbors(w, v)
        if v.arrow in base_rim:
            # the ambient base continues beyond the window; mark with a sentinel
            out.append(None)
        return out

    return nbrs


def materialize(
    w: WreathSpace,
    support_window: Iterable | None = None,
    arrow_window: Iterable | None = None,
    cap: int = MATERIALIZE_CAP,
) -> Graph:
    """Explicit graph on all (c, p) with supp(c) in support_window and p in arrow_window."""
    support = sort_vertices(w.base.vertices if support_window is None else set(support_window))
    arrows = sort_vertices(w.base.vertices if arrow_window is None else set(arrow_window))
    for q in itertools.chain(support, arrows):
        w.base.check(q)
    count = len(w.lamp) ** len(support) * len(arrows)
    if count > cap:
        raise CapExceeded(f"window has {count} vertices, cap is {cap}")
    verts = []
    for values in itertools.product(w.lamp.vertices, repeat=len(support)):
        c = Colouring(zip(support, values), w.basepoint)
        verts.extend(LampVertex(c, p) for p in arrows)
    params = (("lamp", w.lamp.name), ("base", w.base.name), ("support", len(support)), ("arrows", len(arrows)))
    g = from_oracle(verts, _neighbour_oracle(w), "wreath", params, name=w.name)
    return g


# ---------------------------------------------------------------- travelling salesman


def held_karp(
    nodes: Sequence,
    dist: Callable[[object, object], int],
    start=None,
    end=None,
    cap: int = HELD_KARP_CAP,
) -> tuple[int, tuple]:
    """Shortest walk from ``start`` through all ``nodes`` to ``end``.

    ``start`` or ``end`` may be None, meaning that endpoint is free. The
    visiting order returned is the lexicographically least optimal one,
    with nodes compared by :func:`vertex_key`.
    """
    nodes = sort_vertices(dict.fromkeys(nodes))
    k = len(nodes)
    if k > cap:
        raise CapExceeded(f"Held-Karp cap is {cap} nodes, got {k}")
    if k == 0:
        if start is None or end is None:
            return 0, ()
        return dist(start, end), ()
    d = np.array([[dist(a, b) for b in nodes] for a in nodes], dtype=np.int64)
    ds = np.array([0 if start is None else dist(start, a) for a in nodes], dtype=np.int64)
    de = np.array([0 if end is None else dist(a, end) for a in nodes], dtype=np.int64)

    # g[mask, i]: cheapest way to stand at node i, still owe every node in mask, then finish
    full = (1 << k) - 1
    g = np.empty((1 << k, k), dtype=np.int64)
    g[0] = de
    bitvals = [1 << j for j in range(k)]
    for mask in range(1, 1 << k):
        bits = [j for j in range(k) if mask & bitvals[j]]
        subs = [mask ^ bitvals[j] for j in bits]
        cand = d[:, bits] + g[subs, bits][None, :]
        g[mask] = cand.min(axis=1)

    total = int(min(ds[i] + g[full ^ bitvals[i], i] for i in range(k)))
    order = []
    remaining = full
    cur_cost = lambda j: int(ds[j]) if not order else int(d[order[-1], j])
    target = total
    while remaining:
        for j in range(k):
            if remaining & bitvals[j]:
                rest = remaining ^ bitvals[j]
                c = cur_cost(j) + int(g[rest, j])
                if c == target:
                    target -= cur_cost(j)
                    order.append(j)
                    remaining = rest
                    break
        else:  # pragma: no cover - the DP guarantees a consistent choice
            raise AssertionError("Held-Karp reconstruction failed")
    return total, tuple(nodes[i] for i in order)


def ts_path(w: WreathSpace, start, must_visit: Iterable, end, cap: int = HELD_KARP_CAP) -> tuple[int, tuple]:
    """Length of the shortest base path from start to end visiting every vertex in must_visit."""
    for q in itertools.chain([start, end], must_visit):
        w.base.check(q)
    return held_karp(list(must_visit), _base_dist(w), start, end, cap)


def _base_dist(w: WreathSpace) -> Callable:
    metric = w.base_metric

    def dist(a, b) -> int:
        try:
            return metric(a, b)
        except DisconnectedGraph as exc:
            raise DisconnectedGraph(f"lamp at {b!r} is unreachable from {a!r}") from exc

    return dist


def lamp_distance(w: WreathSpace, u: LampVertex, v: LampVertex, cap: int = HELD_KARP_CAP) -> int:
    w.check(u)
    w.check(v)
    diff = u.colouring.differs(v.colouring)
    ts, _ = ts_path(w, u.arrow, diff, v.arrow, cap)
    return ts + sum(w.lamp_distance(u.colouring[q], v.colouring[q]) for q in diff)


def lamp_geodesic(w: WreathSpace, u: LampVertex, v: LampVertex, cap: int = HELD_KARP_CAP) -> list[LampVertex]:
    """A geodesic built lamp by lamp: tour the differing lamps in optimal order, recolouring each."""
    w.check(u)
    w.check(v)
    diff = u.colouring.differs(v.colouring)
    _, order = ts_path(w, u.arrow, diff, v.arrow, cap)
    path = [u]
    c, p = u.colouring, u.arrow
    for q in order:
        for step in shortest_path(w.base, p, q)[1:]:
            path.append(LampVertex(c, step))
        p = q
        for colour in shortest_path(w.lamp, c[q], v.colouring[q])[1:]:
            c = c.updated(q, colour)
            path.append(LampVertex(c, p))
    for step in shortest_path(w.base, p, v.arrow)[1:]:
        path.append(LampVertex(c, step))
    return path


# ---------------------------------------------------------------- wreath groups


@dataclass(frozen=True)
class WreathGroup:
    """A wr B with A = Z_lamp_order (0 means Z) and B = product of Z_m (0 means Z)."""

    lamp_order: int
    base_moduli: tuple[int, ...]

    def reduce_base(self, b: Sequence[int]) -> tuple[int, ...]:
        if len(b) != len(self.base_moduli):
            raise ValueError(f"base element {b!r} has wrong rank")
        return tuple(x % m if m else x for x, m in zip(b, self.base_moduli))

    def reduce_lamp(self, x: int) -> int:
        return x % self.lamp_order if self.lamp_order else x

    @property
    def finite(self) -> bool:
        return self.lamp_order > 0 and all(self.base_moduli)

    def order(self) -> int:
        if not self.finite:
            raise ValueError("group is infinite")
        size_b = math.prod(self.base_moduli)
        return self.lamp_order**size_b * size_b

    def base_elements(self) -> list[tuple[int, ...]]:
        if not all(self.base_moduli):
            raise ValueError("base group is infinite")
        return list(itertools.product(*(range(m) for m in self.base_moduli)))


@dataclass(frozen=True)
class WreathElement:
    group: WreathGroup
    lamps: tuple  # sorted ((position, value), ...) with nonzero values
    base: tuple

    @classmethod
    def make(cls, group: WreathGroup, lamps: Mapping | None = None, base=None) -> "WreathElement":
        rank = len(group.base_moduli)
        if base is None:
            base = (0,) * rank
        base = group.reduce_base(base if isinstance(base, tuple) else (base,))
        acc: dict = {}
        for b, x in (lamps or {}).items():
            b = group.reduce_base(b if isinstance(b, tuple) else (b,))
            acc[b] = group.reduce_lamp(acc.get(b, 0) + x)
        items = tuple(sorted((b, x) for b, x in acc.items() if x != 0))
        return cls(group, items, base)

    def lamp_map(self) -> dict:
        return dict(self.lamps)

    def sort_key(self) -> tuple:
        return (self.base, self.lamps)

    def __str__(self) -> str:
        def pos(b):
            return str(b[0]) if len(b) == 1 else _fmt(b)

        body = ",".join(f"{pos(b)}:{x}" for b, x in self.lamps)
        return "{" + body + "}@" + pos(self.base)

    def __repr__(self) -> str:
        return f"WreathElement({self})"


def identity(group: WreathGroup) -> WreathElement:
    return WreathElement.make(group)


def lamp_generator(group: WreathGroup, value: int = 1) -> WreathElement:
    return WreathElement.make(group, {(0,) * len(group.base_moduli): value})


def shift_generator(group: WreathGroup, axis: int = 0, step: int = 1) -> WreathElement:
    b = [0] * len(group.base_moduli)
    b[axis] = step
    return WreathElement.make(group, base=tuple(b))


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def wreath_mul(x: WreathElement, y: WreathElement) -> WreathElement:
    """Product in which y's lamps are read relative to x's arrow.

    Right-multiplying by a lamp generator changes the lamp under the
    arrow; right-multiplying by a shift moves the arrow.
    """
    if x.group != y.group:
        raise LampcoarseError("elements belong to different wreath groups")
    group = x.group
    acc = dict(x.lamps)
    for b, v in y.lamps:
        pos = group.reduce_base(_add(x.base, b))
        acc[pos] = group.reduce_lamp(acc.get(pos, 0) + v)
    items = tuple(sorted((b, v) for b, v in acc.items() if v != 0))
    return WreathElement(group, items, group.reduce_base(_add(x.base, y.base)))


def wreath_inv(x: WreathElement) -> WreathElement:
    group = x.group
    neg = tuple(-c for c in x.base)
    lamps = {group.reduce_base(_add(b, neg)): -v for b, v in x.lamps}
    return WreathElement.make(group, lamps, neg)


def wreath_pow(x: WreathElement, k: int) -> WreathElement:
    out = identity(x.group)
    step = x if k >= 0 else wreath_inv(x)
    for _ in range(abs(k)):
        out = wreath_mul(out, step)
    return out


def _cayley_oracle(gens: Sequence[WreathElement]) -> Callable:
    both = list(gens) + [wreath_inv(s) for s in gens]

    def nbrs(x: WreathElement) -> list:
        return [y for y in (wreath_mul(x, s) for s in both) if y != x]

    return nbrs


def cayley(
    group: WreathGroup,
    generators: Sequence[WreathElement],
    radius: int | None = None,
    cap: int = MATERIALIZE_CAP,
) -> Graph:
    """Cayley graph (edges a -- a*s) of a wreath group.

    With ``radius`` the result is the ball of that radius around the
    identity; without it the group must be finite and the whole graph is
    built, failing if the generators do not generate.
    """
    if not generators:
        raise ValueError("need at least one generator")
    for s in generators:
        if s.group != group:
            raise LampcoarseError("generator from another group")
    nbrs = _cayley_oracle(generators)
    gens_txt = " ".join(str(s) for s in generators)
    if radius is not None:
        return bfs_window(identity(group), nbrs, radius, "cayley", (("group", group), ("gens", gens_txt)), cap,
                          name=f"Cayley ball r={radius}")
    if not group.finite:
        raise WindowError("infinite group needs a finite radius window")
    size = group.order()
    if size > cap:
        raise CapExceeded(f"group has {size} elements, cap is {cap}")
    g = bfs_window(identity(group), nbrs, size, "cayley", (("group", group), ("gens", gens_txt)), cap,
                   name="Cayley graph")
    if len(g) != size:
        raise WindowError(f"generators reach only {len(g)} of {size} elements")
    return Graph(g.vertices, g.edges(), name=g.name, window=Window("cayley", g.window.params[:2]))


def element_to_lamp_vertex(x: WreathElement) -> LampVertex:
    """Read a Z_n wr B element as a lamplighter vertex over the base group's positions."""
    unwrap = (lambda b: b[0]) if len(x.base) == 1 else (lambda b: b)
    return LampVertex(Colouring({unwrap(b): v for b, v in x.lamps}), unwrap(x.base))


# ---------------------------------------------------------------- Diestel-Leader


def tree_parent(v: tuple) -> tuple:
    """Parent (towards the fixed end) of a vertex ``(level, letters)`` of the lamp tree."""
    h, letters = v
    return (h - 1, tuple(item for item in letters if item[0] != h - 1))


def tree_children(v: tuple, n: int) -> list[tuple]:
    h, letters = v
    out = [(h + 1, letters)]
    out.extend((h + 1, letters + ((h, x),)) for x in range(1, n))
    return out


def tree_adjacent(u: tuple, v: tuple) -> bool:
    return (u[0] == v[0] + 1 and tree_parent(u) == v) or (v[0] == u[0] + 1 and tree_parent(v) == u)


def busemann(v: tuple) -> int:
    return v[0]


def psi_embed(e: WreathElement) -> tuple[tuple, tuple]:
    """Split a Z_n wr Z element at its arrow into two tree vertices.

    The left tree vertex records the lamps strictly left of the arrow at
    level p; the right one records the remaining lamps, reflected, at
    level -p. Levels therefore sum to zero.
    """
    if len(e.group.base_moduli) != 1 or e.group.base_moduli[0] != 0 or e.group.lamp_order < 2:
        raise LampcoarseError("psi_embed needs an element of Z_n wr Z")
    (p,) = e.base
    left = tuple(sorted((b[0], x) for b, x in e.lamps if b[0] < p))
    right = tuple(sorted((-1 - b[0], x) for b, x in e.lamps if b[0] >= p))
    return ((p, left), (-p, right))


def strong_product_adjacent(a: tuple, b: tuple) -> bool:
    if a == b:
        return False
    (u, v), (x, y) = a, b
    return (u == x or tree_adjacent(u, x)) and (v == y or tree_adjacent(v, y))


def dl_neighbours(n: int) -> Callable:
    def nbrs(pair: tuple) -> list:
        u, v = pair
        out = [(c, tree_parent(v)) for c in tree_children(u, n)]
        out.extend((tree_parent(u), c) for c in tree_children(v, n))
        return out

    return nbrs


DL_ROOT = ((0, ()), (0, ()))


def dl_graph(n: int, depth: int, cap: int = MATERIALIZE_CAP) -> Graph:
    """Ball of radius ``depth`` in the horocyclic product of two (n+1)-regular trees."""
    if n < 2:
        raise ValueError("DL(n) needs n >= 2")
    return bfs_window(DL_ROOT, dl_neighbours(n), depth, "dl", (("n", n),), cap, name=f"DL({n}) ball r={depth}")


# ---------------------------------------------------------------- transported maps


def transport_bilip(
    alpha: Mapping,
    beta: Mapping,
    w1: WreathSpace,
    w2: WreathSpace,
    beta_inv: Mapping | None = None,
) -> Callable[[LampVertex], LampVertex]:
    """The map (c, p) -> (alpha . c . beta^-1, beta(p)) between wreath products."""
    if set(alpha) != set(w1.lamp.vertices) or sorted(map(vertex_key, alpha.values())) != sorted(
        map(vertex_key, w2.lamp.vertices)
    ):
        raise LampcoarseError("alpha must be a bijection between the lamp graphs")
    if set(beta) != set(w1.base.vertices) or set(beta.values()) != set(w2.base.vertices) or len(
        set(beta.values())
    ) != len(beta):
        raise LampcoarseError("beta must be a bijection between the base graphs")
    inv = {y: x for x, y in beta.items()}
    if beta_inv is not None and dict(beta_inv) != inv:
        raise LampcoarseError("supplied beta inverse is inconsistent")

    def phi(v: LampVertex) -> LampVertex:
        w1.check(v)
        c = v.colouring
        values = {q: alpha[c[inv[q]]] for q in w2.base.vertices}
        return LampVertex(Colouring(values, w2.basepoint), beta[v.arrow])

    return phi


def bilipschitz_constant(
    phi: Callable[[LampVertex], LampVertex],
    pairs: Iterable[tuple[LampVertex, LampVertex]],
    w1: WreathSpace,
    w2: WreathSpace,
) -> Fraction:
    """Largest distortion ratio (either direction) of phi over the sampled pairs."""
    worst = Fraction(1)
    for u, v in pairs:
        d1 = lamp_distance(w1, u, v)
        d2 = lamp_distance(w2, phi(u), phi(v))
        if (d1 == 0) != (d2 == 0):
            return Fraction(10**9)
        if d1:
            worst = max(worst, Fraction(d2, d1), Fraction(d1, d2))
    return worst


# ---------------------------------------------------------------- dead ends


def dead_end_depth(w: WreathSpace, u: LampVertex, v: LampVertex, depth: int) -> bool:
    """True iff every vertex of B(v, depth) other than v is strictly closer to u than v is.

    v itself can never be strictly closer than itself, so it is left out;
    depth 0 leaves nothing to check and counts as no dead end.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    w.check(v)
    if depth == 0:
        return False
    target = lamp_distance(w, u, v)
    seen = {v: 0}
    frontier = [v]
    for r in range(depth):
        nxt = []
        for x in frontier:
            if x.arrow in w.base.rim:
                raise WindowError(f"ball around {v} reaches the base window rim at {x.arrow!r}")
            for y in neighbors(w, x):
                if y not in seen:
                    seen[y] = r + 1
                    nxt.append(y)
        frontier = nxt
    return all(lamp_distance(w, u, x) < target for x in seen if x != v)


# ---------------------------------------------------------------- distortion in Z wr Z

ZWRZ = WreathGroup(0, (0,))


def distortion_element(n: int) -> WreathElement:
    """(c, n) with c = n at 0 and -n at n."""
    return WreathElement.make(ZWRZ, {0: n, n: -n}, n)


def commutator_generators() -> list[WreathElement]:
    a, t = lamp_generator(ZWRZ), shift_generator(ZWRZ)
    s = wreath_mul(wreath_mul(wreath_mul(a, t), wreath_inv(a)), wreath_inv(t))
    return [s, t]


def word_length(target: WreathElement, generators: Sequence[WreathElement], max_depth: int,
                max_states: int = 2_000_000) -> int | None:
    """Word length by bidirectional breadth-first search; None when it exceeds max_depth."""
    if target == identity(target.group):
        return 0
    steps = list(generators) + [wreath_inv(s) for s in generators]
    fwd = {identity(target.group): 0}
    bwd = {target: 0}
    fwd_frontier = list(fwd)
    bwd_frontier = list(bwd)
    df = db = 0
    while df + db < max_depth:
        grow_fwd = len(fwd_frontier) <= len(bwd_frontier)
        seen, other, frontier = (fwd, bwd, fwd_frontier) if grow_fwd else (bwd, fwd, bwd_frontier)
        level = (df if grow_fwd else db) + 1
        nxt = []
        best = None
        for x in frontier:
            for s in steps:
                y = wreath_mul(x, s)
                if y in seen:
                    continue
                seen[y] = level
                if y in other:
                    total = level + other[y]
                    best = total if best is None else min(best, total)
                nxt.append(y)
        if len(fwd) + len(bwd) > max_states:
            raise CapExceeded(f"word-length search exceeded {max_states} states")
        if best is not None:
            return best
        if grow_fwd:
            fwd_frontier, df = nxt, level
        else:
            bwd_frontier, db = nxt, level
    return None
