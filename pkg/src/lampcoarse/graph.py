"""Finite simple graphs, windows of infinite graphs, and metric primitives.

Vertices are arbitrary hashable ids. Whenever an algorithm has to break a
tie it uses :func:`vertex_key`, a total order that sorts integers
numerically, tuples componentwise and everything else by ``repr``.
"""

from __future__ import annotations

import ast
import itertools
import sys
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import CapExceeded, DisconnectedGraph, UnknownVertex, WindowError

Vertex = Hashable

DEFAULT_ISO_CAP = 200


def vertex_key(v) -> tuple:
    if isinstance(v, bool):
        return (0, int(v))
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, tuple):
        return (1, tuple(vertex_key(x) for x in v))
    if isinstance(v, str):
        return (2, v)
    sort_key = getattr(v, "sort_key", None)
    if sort_key is not None:
        return (3, sort_key())
    return (4, repr(v))


def sort_vertices(vs: Iterable) -> list:
    return sorted(vs, key=vertex_key)


@dataclass(frozen=True)
class Window:
    """Describes which infinite graph a finite graph is cut out of.

    ``rim`` holds the vertices whose neighbourhood in the ambient infinite
    graph is not fully present. An empty rim means the graph is the whole
    (finite) ambient graph.
    """

    family: str
    params: tuple[tuple[str, str], ...] = ()
    rim: frozenset = field(default_factory=frozenset)

    def header(self) -> str:
        parts = [self.family] + [f"{k}={v}" for k, v in self.params]
        return "# window " + " ".join(parts)


class Graph:
    """Immutable finite simple undirected graph."""

    __slots__ = ("_order", "_index", "_adj", "_nbrs", "name", "window")

    def __init__(
        self,
        vertices: Iterable = (),
        edges: Iterable[tuple] = (),
        name: str = "",
        window: Window | None = None,
    ):
        adj: dict = {}
        for v in vertices:
            adj.setdefault(v, set())
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u!r}")
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        order = tuple(sort_vertices(adj))
        self._order = order
        self._index = {v: i for i, v in enumerate(order)}
        self._adj = {v: frozenset(ns) for v, ns in adj.items()}
        self._nbrs = {v: tuple(sorted(ns, key=self._index.__getitem__)) for v, ns in adj.items()}
        self.name = name
        if window is not None and not window.rim <= self._adj.keys():
            raise ValueError("window rim must be a subset of the vertex set")
        self.window = window

    @property
    def vertices(self) -> tuple:
        return self._order

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, v) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator:
        return iter(self._order)

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<Graph{label} |V|={len(self)} |E|={self.num_edges()}>"

    def index(self, v) -> int:
        self.check(v)
        return self._index[v]

    def check(self, v) -> None:
        if v not in self._adj:
            raise UnknownVertex(f"unknown vertex {v!r}")

    def neighbors(self, v) -> tuple:
        self.check(v)
        return self._nbrs[v]

    def adjacent(self, u, v) -> bool:
        return v in self._adj.get(u, ())

    def degree(self, v) -> int:
        return len(self.neighbors(v))

    def edges(self) -> Iterator[tuple]:
        idx = self._index
        for u in self._order:
            for v in self._nbrs[u]:
                if idx[u] < idx[v]:
                    yield (u, v)

    def num_edges(self) -> int:
        return sum(len(ns) for ns in self._adj.values()) // 2

    def max_degree(self) -> int:
        return max((len(ns) for ns in self._adj.values()), default=0)

    @property
    def rim(self) -> frozenset:
        return self.window.rim if self.window else frozenset()

    def subgraph(self, vs: Iterable, name: str = "") -> "Graph":
        keep = set(vs)
        for v in keep:
            self.check(v)
        edges = [(u, v) for u, v in self.edges() if u in keep and v in keep]
        return Graph(keep, edges, name=name)

    def relabel(self, mapping: Mapping) -> "Graph":
        return Graph(
            (mapping[v] for v in self._order),
            ((mapping[u], mapping[v]) for u, v in self.edges()),
            name=self.name,
        )

    def is_connected(self) -> bool:
        if not self._order:
            return True
        return len(_bfs(self, [self._order[0]])) == len(self)

    def require_connected(self) -> None:
        if not self.is_connected():
            raise DisconnectedGraph(f"graph {self.name or '<unnamed>'} is disconnected")


# ---------------------------------------------------------------- builders


def from_oracle(
    vertices: Iterable,
    neighbours: Callable[[Vertex], Iterable],
    family: str,
    params: Sequence[tuple[str, object]] = (),
    name: str = "",
) -> Graph:
    """Induced window on ``vertices`` of the graph given by a neighbour oracle.

    Vertices with an oracle neighbour outside the set form the rim.
    """
    keep = set(vertices)
    edges = []
    rim = set()
    for v in keep:
        for w in neighbours(v):
            if w in keep:
                edges.append((v, w))
            else:
                rim.add(v)
    window = Window(family, tuple((k, str(x)) for k, x in params), frozenset(rim))
    return Graph(keep, edges, name=name or family, window=window)


def bfs_window(
    root,
    neighbours: Callable[[Vertex], Iterable],
    radius: int,
    family: str,
    params: Sequence[tuple[str, object]] = (),
    cap: int = 10**6,
    name: str = "",
) -> Graph:
    """Ball of the given radius around ``root`` in an implicitly given graph."""
    dist = {root: 0}
    frontier = [root]
    for r in range(radius):
        nxt = []
        for v in frontier:
            for w in neighbours(v):
                if w not in dist:
                    dist[w] = r + 1
                    nxt.append(w)
                    if len(dist) > cap:
                        raise CapExceeded(f"ball exceeds {cap} vertices")
        frontier = nxt
    params = tuple(params) + (("radius", radius),)
    return from_oracle(dist, neighbours, family, params, name)


def path_graph(k: int) -> Graph:
    if k < 1:
        raise ValueError("path needs at least one vertex")
    return Graph(range(k), [(i, i + 1) for i in range(k - 1)], name=f"path-{k}",
                 window=Window("path", (("k", str(k)),)))


def cycle_graph(k: int) -> Graph:
    if k < 3:
        raise ValueError("cycle needs at least three vertices")
    return Graph(range(k), [(i, (i + 1) % k) for i in range(k)], name=f"cycle-{k}",
                 window=Window("cycle", (("k", str(k)),)))


def complete_graph(k: int) -> Graph:
    if k < 1:
        raise ValueError("complete graph needs at least one vertex")
    return Graph(range(k), itertools.combinations(range(k), 2), name=f"complete-{k}",
                 window=Window("complete", (("k", str(k)),)))


def line_window(lo: int, hi: int) -> Graph:
    """The interval [lo, hi] of the bi-infinite line."""
    if lo > hi:
        raise ValueError("empty interval")
    return from_oracle(range(lo, hi + 1), lambda i: (i - 1, i + 1), "line",
                       (("lo", lo), ("hi", hi)), name=f"line[{lo},{hi}]")


def grid_window(d: int, lo: int, hi: int) -> Graph:
    """The box [lo, hi]^d of the square lattice Z^d."""

    def nbrs(v):
        for i in range(d):
            for s in (-1, 1):
                yield v[:i] + (v[i] + s,) + v[i + 1:]

    box = itertools.product(range(lo, hi + 1), repeat=d)
    return from_oracle(box, nbrs, "grid", (("d", d), ("lo", lo), ("hi", hi)),
                       name=f"grid{d}[{lo},{hi}]")


def tree_neighbours(d: int) -> Callable[[tuple], list]:
    """Neighbour oracle of the d-regular tree rooted at ``()``.

    The root has children ``(0,) ... (d-1,)``; every other vertex has
    children obtained by appending ``0 ... d-2``.
    """

    def nbrs(v: tuple) -> list:
        out = [] if not v else [v[:-1]]
        width = d if not v else d - 1
        out.extend(v + (i,) for i in range(width))
        return out

    return nbrs


def tree_window(d: int, depth: int) -> Graph:
    if d < 2:
        raise ValueError("tree degree must be at least 2")
    return bfs_window((), tree_neighbours(d), depth, f"tree-{d}", name=f"tree{d}(depth {depth})")


def truncated_cube() -> Graph:
    """Truncated cube built by cutting every corner of the 3-cube into a triangle.

    Vertex ``(v, w)`` sits on cube edge ``vw`` next to corner ``v``.
    """
    corners = list(itertools.product((0, 1), repeat=3))

    def cube_nbrs(v):
        return [v[:i] + (1 - v[i],) + v[i + 1:] for i in range(3)]

    edges = []
    for v in corners:
        ns = cube_nbrs(v)
        edges.extend(((v, a), (v, b)) for a, b in itertools.combinations(ns, 2))
        edges.extend(((v, w), (w, v)) for w in ns)
    return Graph(edges=edges, name="truncated-cube")


# ---------------------------------------------------------------- metric


def _bfs(g: Graph, sources: Iterable, limit: int | None = None) -> dict:
    dist = {}
    queue = deque()
    for s in sources:
        g.check(s)
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    nbrs = g._nbrs
    while queue:
        v = queue.popleft()
        dv = dist[v]
        if limit is not None and dv >= limit:
            continue
        for w in nbrs[v]:
            if w not in dist:
                dist[w] = dv + 1
                queue.append(w)
    return dist


def distances_from(g: Graph, source) -> dict:
    """Hop distances from ``source``; unreachable vertices map to ``None``."""
    dist = _bfs(g, [source])
    return {v: dist.get(v) for v in g.vertices}


def distance_field(g: Graph, sources: Iterable) -> dict:
    """Distance from the nearest source to every reachable vertex."""
    sources = list(sources)
    for v in sources:
        g.check(v)
    return _bfs(g, sources)


def shortest_path(g: Graph, a, b) -> list:
    """A geodesic from a to b, choosing the least neighbour (by vertex order) at each step."""
    dist = _bfs(g, [b])
    if a not in dist:
        raise DisconnectedGraph(f"{b!r} is not reachable from {a!r}")
    path = [a]
    v = a
    while v != b:
        v = next(w for w in g.neighbors(v) if dist.get(w) == dist[v] - 1)
        path.append(v)
    return path


class Metric:
    """Lazily cached hop metric on a fixed graph."""

    def __init__(self, g: Graph):
        self.g = g
        self._rows: dict = {}

    def row(self, v) -> dict:
        r = self._rows.get(v)
        if r is None:
            r = self._rows[v] = _bfs(self.g, [v])
        return r

    def __call__(self, u, v) -> int:
        d = self.row(u).get(v)
        if d is None:
            raise DisconnectedGraph(f"{v!r} is not reachable from {u!r}")
        return d

    def diameter(self, vs: Iterable) -> int:
        vs = list(dict.fromkeys(vs))
        return max((self(u, v) for u, v in itertools.combinations(vs, 2)), default=0)


def ball(g: Graph, v, r: int) -> frozenset:
    if r < 0:
        raise ValueError("radius must be non-negative")
    return frozenset(_bfs(g, [v], limit=r))


def thicken(g: Graph, s: Iterable, r: int) -> frozenset:
    if r < 0:
        raise ValueError("radius must be non-negative")
    return frozenset(_bfs(g, s, limit=r))


def boundary(g: Graph, s: Iterable) -> frozenset:
    """Outer vertex boundary: vertices outside ``s`` adjacent to some vertex of ``s``."""
    s = set(s)
    out = set()
    for v in s:
        for w in g.neighbors(v):
            if w not in s:
                out.add(w)
    return frozenset(out)


def set_distance(g: Graph, s: Iterable, t: Iterable) -> int | None:
    t = set(t)
    for v in t:
        g.check(v)
    dist = _bfs(g, s)
    found = [dist[v] for v in t if v in dist]
    return min(found) if found else None


def diameter(g: Graph, vs: Iterable | None = None) -> int:
    vs = g.vertices if vs is None else list(vs)
    best = 0
    for v in vs:
        dist = _bfs(g, [v])
        for w in vs:
            if w not in dist:
                raise DisconnectedGraph("set spans several components")
            best = max(best, dist[w])
    return best


def components(g: Graph, vs: Iterable | None = None) -> list[frozenset]:
    """Connected components of the subgraph induced on ``vs`` (all of g by default)."""
    keep = set(g.vertices if vs is None else vs)
    seen: set = set()
    comps = []
    for v in g.vertices:
        if v not in keep or v in seen:
            continue
        comp = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in g.neighbors(x):
                if y in keep and y not in comp:
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def distance_to_rim(g: Graph, v) -> float:
    rim = g.rim
    if not rim:
        return float("inf")
    dist = _bfs(g, [v])
    found = [dist[x] for x in rim if x in dist]
    return min(found) if found else float("inf")


# ---------------------------------------------------------------- ends and growth


@dataclass(frozen=True)
class EndsReport:
    radius: int
    margin: int
    components: int
    deep_components: int
    sizes: tuple[int, ...]


def ends_profile(g: Graph, center, radii: Sequence[int], margin: int) -> list[EndsReport]:
    """Components of g minus B(center, r), and how many reach ``margin`` beyond the ball.

    Raises WindowError ("inconclusive at this window") when the window rim
    lies within r + margin of the center, since truncation could then
    change the answer.
    """
    g.require_connected()
    dist = _bfs(g, [center])
    rim_dist = min((dist[x] for x in g.rim), default=float("inf"))
    reports = []
    for r in radii:
        if rim_dist <= r + margin:
            raise WindowError(
                f"inconclusive at this window: rim at distance {rim_dist} "
                f"but radius {r} plus margin {margin} needs more room"
            )
        outside = [v for v in g.vertices if dist[v] > r]
        comps = components(g, outside)
        deep = sum(1 for c in comps if max(dist[v] for v in c) - r >= margin)
        sizes = tuple(sorted((len(c) for c in comps), reverse=True))
        reports.append(EndsReport(r, margin, len(comps), deep, sizes))
    return reports


def growth(g: Graph, radius: int) -> int:
    """Largest ball of the given radius, over centers whose ball is not truncated."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    rim = g.rim
    best = 0
    for v in g.vertices:
        b = _bfs(g, [v], limit=radius)
        if any(b[x] < radius for x in rim if x in b):
            continue
        best = max(best, len(b))
    if best == 0:
        raise WindowError(f"no window-interior center for radius {radius}")
    return best


# ---------------------------------------------------------------- isomorphism


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    mapping: dict | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.isomorphic


def _refine(graphs: Sequence[Graph]) -> tuple[list[dict], int]:
    colours = [{v: g.degree(v) for v in g.vertices} for g in graphs]
    rounds = 0
    while True:
        sigs = [
            {v: (col[v], tuple(sorted(col[w] for w in g.neighbors(v)))) for v in g.vertices}
            for g, col in zip(graphs, colours)
        ]
        palette = {s: i for i, s in enumerate(sorted({s for sg in sigs for s in sg.values()}))}
        new = [{v: palette[s] for v, s in sg.items()} for sg in sigs]
        classes_old = len({c for col in colours for c in col.values()})
        classes_new = len(palette)
        colours = new
        rounds += 1
        if classes_new == classes_old:
            return colours, rounds


def _histogram(col: dict) -> dict:
    h: dict = {}
    for c in col.values():
        h[c] = h.get(c, 0) + 1
    return h


def check_isomorphism(g1: Graph, g2: Graph, mapping: Mapping) -> bool:
    if set(mapping) != set(g1.vertices) or set(mapping.values()) != set(g2.vertices):
        return False
    if len(set(mapping.values())) != len(mapping):
        return False
    if g1.num_edges() != g2.num_edges():
        return False
    return all(g2.adjacent(mapping[u], mapping[v]) for u, v in g1.edges())


def isomorphic(g1: Graph, g2: Graph, cap: int = DEFAULT_ISO_CAP) -> IsoResult:
    """Exact isomorphism test by colour refinement plus backtracking.

    Returns a checked witness bijection, or the invariant that separates
    the graphs. Candidates are tried in vertex order so witnesses are
    reproducible.
    """
    for g in (g1, g2):
        if len(g) > cap:
            raise CapExceeded(f"isomorphism cap is {cap} vertices, got {len(g)}")
    if len(g1) != len(g2):
        return IsoResult(False, reason=f"vertex counts differ ({len(g1)} vs {len(g2)})")
    if g1.num_edges() != g2.num_edges():
        return IsoResult(False, reason=f"edge counts differ ({g1.num_edges()} vs {g2.num_edges()})")
    deg1 = sorted(g1.degree(v) for v in g1.vertices)
    deg2 = sorted(g2.degree(v) for v in g2.vertices)
    if deg1 != deg2:
        return IsoResult(False, reason="degree sequences differ")
    (c1, c2), rounds = _refine([g1, g2])
    if _histogram(c1) != _histogram(c2):
        return IsoResult(False, reason=f"colour refinement separates the graphs after {rounds} rounds")

    size = _histogram(c1)
    order: list = []
    placed: set = set()
    remaining = sorted(g1.vertices, key=lambda v: (size[c1[v]], c1[v], vertex_key(v)))
    for start in remaining:
        if start in placed:
            continue
        queue = deque([start])
        placed.add(start)
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(g1.neighbors(v), key=lambda x: (size[c1[x]], vertex_key(x))):
                if w not in placed:
                    placed.add(w)
                    queue.append(w)

    by_colour: dict = {}
    for v in g2.vertices:
        by_colour.setdefault(c2[v], []).append(v)
    anchor = {}
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        earlier = [w for w in g1.neighbors(v) if pos[w] < pos[v]]
        anchor[v] = min(earlier, key=pos.__getitem__) if earlier else None

    mapping: dict = {}
    used: set = set()

    def candidates(v):
        a = anchor[v]
        pool = g2.neighbors(mapping[a]) if a is not None else by_colour[c1[v]]
        return [x for x in pool if x not in used and c2[x] == c1[v]]

    def consistent(v, x) -> bool:
        for w in g1.neighbors(v):
            if w in mapping and not g2.adjacent(x, mapping[w]):
                return False
        mapped_nbrs = sum(1 for w in g1.neighbors(v) if w in mapping)
        return mapped_nbrs == sum(1 for y in g2.neighbors(x) if y in used)

    def extend(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for x in candidates(v):
            if consistent(v, x):
                mapping[v] = x
                used.add(x)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.discard(x)
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, len(order) + 100))
    try:
        found = extend(0)
    finally:
        sys.setrecursionlimit(limit)
    if not found:
        return IsoResult(False, reason="exhaustive backtracking found no bijection")
    if not check_isomorphism(g1, g2, mapping):
        raise AssertionError("isomorphism witness failed verification")
    return IsoResult(True, dict(mapping), reason="witness verified")


# ---------------------------------------------------------------- I/O


def _fmt(v) -> str:
    text = str(v) if not isinstance(v, tuple) else repr(v)
    text = text.replace(" ", "")
    if not text or any(ch.isspace() for ch in text):
        raise ValueError(f"vertex id {v!r} has no whitespace-free form")
    return text


def _parse(token: str):
    try:
        return ast.literal_eval(token)
    except (ValueError, SyntaxError):
        return token


def to_edgelist(g: Graph) -> str:
    lines = []
    if g.window is not None:
        lines.append(g.window.header())
        if g.window.rim:
            lines.append("# rim " + " ".join(_fmt(v) for v in sort_vertices(g.window.rim)))
    for v in g.vertices:
        if g.degree(v) == 0:
            lines.append(f"# vertex {_fmt(v)}")
    lines.extend(f"{_fmt(u)} {_fmt(v)}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def from_edgelist(text: str, name: str = "") -> Graph:
    vertices = []
    edges = []
    family = None
    params: list = []
    rim: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            words = line[1:].split()
            if words and words[0] == "vertex" and len(words) == 2:
                vertices.append(_parse(words[1]))
            elif words and words[0] == "window" and len(words) >= 2:
                family = words[1]
                for item in words[2:]:
                    k, _, val = item.partition("=")
                    params.append((k, val))
            elif words and words[0] == "rim":
                rim.extend(_parse(w) for w in words[1:])
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        edges.append((_parse(parts[0]), _parse(parts[1])))
    window = Window(family, tuple(params), frozenset(rim)) if family else None
    return Graph(vertices, edges, name=name, window=window)


def to_dot(g: Graph, name: str | None = None) -> str:
    title = (name or g.name or "G").replace('"', "'")
    lines = [f'graph "{title}" {{']
    for v in g.vertices:
        lines.append(f'  "{_fmt(v)}";')
    for u, v in g.edges():
        lines.append(f'  "{_fmt(u)}" -- "{_fmt(v)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
