"""Coarse homotopy of paths, persistent intersections and nerve projections.

Two paths with common endpoints are E-coarsely homotopic when one can be
turned into the other by a sequence of elementary moves, each replacing a
subpath by another path with the same endpoints such that the union of
the two has diameter at most E. The search below explores exact vertex
sequences breadth first under explicit caps and only answers "no" when the
reachable set is closed.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .errors import CoveringError, NearCommonLeaf, WindowError
from .graph import Graph, Metric, sort_vertices, vertex_key
from .leaves import dist_to_leaf
from .wreath import Colouring, LampVertex, WreathSpace, lamp_geodesic, ts_path

Move = tuple[int, int, tuple]

YES, NO, UNKNOWN = "yes", "no", "unknown"


def as_path(g: Graph, seq: Iterable) -> tuple:
    path = tuple(seq)
    if not path:
        raise ValueError("a path needs at least one vertex")
    for v in path:
        g.check(v)
    for a, b in zip(path, path[1:]):
        if not g.adjacent(a, b):
            raise ValueError(f"{a!r} and {b!r} are not adjacent")
    return path


def _metric(g: Graph, metric: Metric | None) -> Metric:
    if metric is None:
        return Metric(g)
    if metric.g is not g:
        raise ValueError("metric belongs to another graph")
    return metric


def elementary_move(
    g: Graph,
    p: Sequence,
    i: int,
    j: int,
    replacement: Sequence,
    E: int,
    metric: Metric | None = None,
) -> tuple:
    """Replace the subpath p[i..j] (inclusive) by ``replacement``."""
    metric = _metric(g, metric)
    p = as_path(g, p)
    xi = as_path(g, replacement)
    if not 0 <= i <= j < len(p):
        raise IndexError(f"bad subpath bounds {i}..{j} for a path of {len(p)} vertices")
    zeta = p[i : j + 1]
    if xi[0] != zeta[0] or xi[-1] != zeta[-1]:
        raise ValueError(f"endpoint mismatch: subpath {zeta[0]!r}..{zeta[-1]!r}, replacement {xi[0]!r}..{xi[-1]!r}")
    union = list(dict.fromkeys(zeta + xi))
    for a, b in itertools.combinations(union, 2):
        d = metric(a, b)
        if d > E:
            raise ValueError(f"diameter bound violated: d({a!r}, {b!r}) = {d} > {E}")
    return p[:i] + xi + p[j + 1 :]


def replay(g: Graph, p: Sequence, script: Iterable[Move], E: int, metric: Metric | None = None) -> tuple:
    metric = _metric(g, metric)
    cur = as_path(g, p)
    for i, j, xi in script:
        cur = elementary_move(g, cur, i, j, xi, E, metric)
    return cur


def _replacements(
    g: Graph, metric: Metric, zeta: tuple, allowed: frozenset, E: int, budget: int
) -> Iterator[tuple]:
    """Walks from zeta[0] to zeta[-1] inside ``allowed``, pairwise within E, shortest first."""
    start, end = zeta[0], zeta[-1]
    end_row = metric.row(end)
    walk = [start]
    counts = {start: 1}

    def ok(x) -> bool:
        row = metric.row(x)
        return all(row.get(y, E + 1) <= E for y in counts)

    def dfs(remaining: int):
        v = walk[-1]
        if remaining == 0:
            if v == end:
                yield tuple(walk)
            return
        for x in g.neighbors(v):
            if x not in allowed or end_row.get(x, remaining) > remaining - 1:
                continue
            if x not in counts and not ok(x):
                continue
            walk.append(x)
            counts[x] = counts.get(x, 0) + 1
            yield from dfs(remaining - 1)
            walk.pop()
            counts[x] -= 1
            if not counts[x]:
                del counts[x]

    for length in range(end_row.get(start, budget + 1), budget + 1):
        yield from dfs(length)


def moves_from(g: Graph, metric: Metric, p: tuple, E: int, max_len: int) -> Iterator[tuple[Move, tuple]]:
    """Every elementary move applicable to p whose result has at most max_len edges.

    Longer subpaths come first, and replacements run shortest first.
    """
    n = len(p)
    spans = []
    for i in range(n):
        allowed = None
        for j in range(i, n):
            row_j = metric.row(p[j])
            if any(row_j[p[k]] > E for k in range(i, j)):
                break
            ball_j = frozenset(x for x, d in row_j.items() if d <= E)
            allowed = ball_j if allowed is None else allowed & ball_j
            spans.append((i, j, allowed))
    spans.sort(key=lambda s: (s[0] - s[1], s[0]))
    for i, j, allowed in spans:
        zeta = p[i : j + 1]
        budget = max_len - (n - 1 - (j - i))
        if budget < 0:
            continue
        for xi in _replacements(g, metric, zeta, allowed, E, budget):
            if xi != zeta:
                yield (i, j, xi), p[:i] + xi + p[j + 1 :]


@dataclass(frozen=True)
class SearchResult:
    status: str
    script: tuple = ()
    found: tuple | None = None
    states: int = 0
    closed: bool = False
    detail: str = ""


def _search(
    g: Graph,
    start: tuple,
    E: int,
    max_len: int,
    max_states: int,
    goal: Callable[[tuple], bool],
    metric: Metric | None = None,
) -> SearchResult:
    metric = _metric(g, metric)
    if len(start) - 1 > max_len:
        return SearchResult(UNKNOWN, states=0, detail=f"start path longer than max_len={max_len}")
    parent: dict = {start: None}
    if goal(start):
        return SearchResult(YES, (), start, 1, False, "start already satisfies the goal")
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for move, q in moves_from(g, metric, p, E, max_len):
            if q in parent:
                continue
            parent[q] = (p, move)
            if goal(q):
                script = []
                cur = q
                while parent[cur] is not None:
                    prev, mv = parent[cur]
                    script.append(mv)
                    cur = prev
                return SearchResult(YES, tuple(reversed(script)), q, len(parent), False, "goal reached")
            if len(parent) >= max_states:
                return SearchResult(UNKNOWN, states=len(parent), detail=f"state budget {max_states} exhausted")
            queue.append(q)
    return SearchResult(
        NO, states=len(parent), closed=True,
        detail=f"reachable set closed with {len(parent)} paths of length <= {max_len}",
    )


@dataclass(frozen=True)
class HomotopyVerdict:
    status: str
    script: tuple = ()
    states: int = 0
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status == YES


def coarse_homotopic(
    g: Graph,
    p1: Sequence,
    p2: Sequence,
    E: int,
    max_len: int,
    max_states: int,
    metric: Metric | None = None,
) -> HomotopyVerdict:
    """Decide E-coarse homotopy within caps.

    "no" means the set of paths of at most max_len edges reachable from p1
    is closed under moves and misses p2.
    """
    a, b = as_path(g, p1), as_path(g, p2)
    if (a[0], a[-1]) != (b[0], b[-1]):
        raise ValueError("paths must share their endpoints")
    if len(b) - 1 > max_len:
        return HomotopyVerdict(UNKNOWN, detail=f"target path longer than max_len={max_len}")
    res = _search(g, a, E, max_len, max_states, lambda q: q == b, metric)
    return HomotopyVerdict(res.status, res.script, res.states, res.detail)


def is_coarsely_trivial(
    g: Graph, loop: Sequence, E: int, max_len: int, max_states: int, metric: Metric | None = None
) -> HomotopyVerdict:
    loop = as_path(g, loop)
    if loop[0] != loop[-1]:
        raise ValueError("not a loop: endpoints differ")
    return coarse_homotopic(g, loop, (loop[0],), E, max_len, max_states, metric)


# ---------------------------------------------------------------- coverings and nerves


class Covering:
    """A covering of a vertex set given by a part-membership oracle.

    ``parts_of(v)`` returns the tags of every part containing v.
    """

    def __init__(self, parts_of: Callable[[object], Iterable], scale: int, name: str = ""):
        self._parts_of = parts_of
        self.scale = scale
        self.name = name

    @classmethod
    def from_sets(cls, parts: dict, scale: int, name: str = "") -> "Covering":
        index: dict = {}
        for tag, members in parts.items():
            for v in members:
                index.setdefault(v, []).append(tag)

        return cls(lambda v: index.get(v, ()), scale, name)

    def parts_of(self, v) -> tuple:
        return tuple(sorted(set(self._parts_of(v)), key=_tag_key))

    def contains(self, tag, v) -> bool:
        return tag in set(self._parts_of(v))

    def members(self, tag, g: Graph) -> frozenset:
        return frozenset(v for v in g.vertices if self.contains(tag, v))


def _tag_key(tag) -> tuple:
    return vertex_key(tag)


@dataclass(frozen=True)
class NerveProjection:
    raw: tuple
    reduced: tuple


def free_reduce(seq: Iterable) -> tuple:
    stack: list = []
    for x in seq:
        if stack and stack[-1] == x:
            continue
        if len(stack) >= 2 and stack[-2] == x:
            stack.pop()
            continue
        stack.append(x)
    return tuple(stack)


def _endpoint_part(cov: Covering, v, declared, which: str):
    parts = cov.parts_of(v)
    if declared is not None:
        if declared not in parts:
            raise CoveringError(f"{which} vertex {v!r} is not in the declared part {declared!r}")
        return declared
    if len(parts) != 1:
        raise CoveringError(f"{which} vertex {v!r} lies in {len(parts)} parts; declare one")
    return parts[0]


def nerve_projection(cov: Covering, p: Sequence, start=None, end=None) -> NerveProjection:
    """Greedy maximal-segment projection of a path to the nerve, and its free reduction."""
    p = tuple(p)
    parts = [set(cov.parts_of(v)) for v in p]
    a = _endpoint_part(cov, p[0], start, "start")
    b = _endpoint_part(cov, p[-1], end, "end")
    if a == b:
        raise CoveringError("start and end parts must be distinct")
    seq = [a]
    cur = a
    for k in range(len(p) - 1):
        if cur in parts[k + 1]:
            continue
        common = parts[k] & parts[k + 1]
        if len(common) != 1:
            raise CoveringError(
                f"edge {p[k]!r} -- {p[k + 1]!r} lies in {len(common)} parts (needs exactly one)",
                edge=(p[k], p[k + 1]),
            )
        (cur,) = common
        seq.append(cur)
    if cur != b:
        seq.append(b)
    return NerveProjection(tuple(seq), free_reduce(seq))


@dataclass(frozen=True)
class CoveringCheck:
    ok: bool
    problems: tuple = ()
    sampled: bool = False


def check_covering(cov: Covering, g: Graph, E: int | None = None, metric: Metric | None = None) -> CoveringCheck:
    """Check the nerve-projection hypotheses of a covering on a finite graph.

    Edges must each lie in some part and the nerve must be triangle free.
    Small sets are checked exactly for E = 1; for larger E every ball of
    radius E // 2 and every pair within distance E is checked, which is a
    sample of the diameter-E sets.
    """
    E = cov.scale if E is None else E
    problems = []
    parts = {v: set(cov.parts_of(v)) for v in g.vertices}
    for v, ps in parts.items():
        if not ps:
            problems.append(f"vertex {v} lies in no part")
    for u, v in g.edges():
        if not parts[u] & parts[v]:
            problems.append(f"edge {u} -- {v} lies in no part")
            if len(problems) > 20:
                break
    sampled = E > 1
    if sampled and not problems:
        metric = _metric(g, metric)
        for v in g.vertices:
            row = metric.row(v)
            ball = [x for x, d in row.items() if d <= E // 2]
            common = set(parts[v])
            for x in ball:
                common &= parts[x]
            if not common:
                problems.append(f"ball of radius {E // 2} at {v} lies in no single part")
            for x, d in row.items():
                if d <= E and not parts[v] & parts[x]:
                    problems.append(f"pair {v}, {x} at distance {d} lies in no single part")
            if len(problems) > 20:
                break
    nerve: dict = {}
    for ps in parts.values():
        for s, t in itertools.combinations(ps, 2):
            nerve.setdefault(s, set()).add(t)
            nerve.setdefault(t, set()).add(s)
    for s, ns in nerve.items():
        for t in ns:
            common = ns & nerve.get(t, set())
            if common:
                problems.append(f"nerve triangle {s}, {t}, {next(iter(common))}")
                break
        if len(problems) > 20:
            break
    return CoveringCheck(not problems, tuple(problems), sampled)


def lamp_io_covering(w: WreathSpace, p, A1: int) -> Covering:
    """Inner/outer covering of a lamplighter graph around the lamp position p.

    Inner parts I(d): arrow within 3*A1 of p, colouring equal to d outside
    B(p, 3*A1). Outer parts O(d): arrow farther than 2*A1 from p,
    colouring equal to d on B(p, A1). Every set of diameter at most A1
    lies in one part, distinct inner parts are disjoint, distinct outer
    parts are disjoint, so the nerve is a bipartite graph.
    """
    if A1 < 1:
        raise ValueError("A1 must be at least 1")
    w.base.check(p)
    row = w.base_metric.row(p)
    if any(row.get(x, 10**9) < 3 * A1 for x in w.base.rim):
        raise WindowError(f"base window too small around {p!r} for A1={A1}")
    inner = frozenset(x for x, d in row.items() if d <= 3 * A1)
    core = frozenset(x for x, d in row.items() if d <= A1)

    def parts_of(v: LampVertex):
        d = row[v.arrow]
        out = []
        if d <= 3 * A1:
            out.append(("I", v.colouring.restrict_outside(inner)))
        if d > 2 * A1:
            out.append(("O", v.colouring.restrict(core)))
        return out

    cov = Covering(parts_of, A1, name=f"io(p={p}, A1={A1})")
    cov.center = p
    cov.inner = inner
    cov.core = core
    return cov


def outer_part(cov: Covering, v: LampVertex):
    return ("O", v.colouring.restrict(cov.core))


# ---------------------------------------------------------------- persistence


CERTIFIED, REFUTED = "certified-persistent", "refuted"


@dataclass(frozen=True)
class PersistenceCertificate:
    verdict: str
    E: int
    max_len: int
    max_states: int
    nerve_path: tuple = ()
    witness: tuple | None = None
    script: tuple = ()
    search_states: int = 0
    search_closed: bool = False
    notes: tuple = ()


def avoiding_path_search(
    g: Graph, p: Sequence, target: Iterable, E: int, max_len: int, max_states: int, metric: Metric | None = None
) -> SearchResult:
    """Breadth-first search of the move closure of p for a path missing target."""
    target = frozenset(target)
    p = as_path(g, p)
    return _search(g, p, E, max_len, max_states, lambda q: not any(v in target for v in q), metric)


def persistent_intersection(
    g: Graph,
    p: Sequence,
    target: Iterable,
    E: int,
    max_len: int,
    max_states: int,
    cov: Covering | None = None,
    start=None,
    end=None,
    metric: Metric | None = None,
) -> PersistenceCertificate:
    """Certify or refute that every path E-coarsely homotopic to p meets target.

    With a covering whose hypotheses hold, the certificate is issued when
    some part on the reduced nerve path is entirely contained in target.
    Otherwise a bounded search for an avoiding path decides between
    "refuted" (with a replayable witness) and "unknown".
    """
    p = as_path(g, p)
    target = frozenset(target)
    metric = _metric(g, metric)
    caps = dict(E=E, max_len=max_len, max_states=max_states)
    if not any(v in target for v in p):
        return PersistenceCertificate(REFUTED, **caps, witness=p, notes=("path misses target",))
    if p[0] in target or p[-1] in target:
        return PersistenceCertificate(CERTIFIED, **caps, notes=("an endpoint lies in target",))
    notes = []
    if cov is not None:
        check = check_covering(cov, g, E, metric)
        projection = None
        if check.ok:
            try:
                projection = nerve_projection(cov, p, start, end)
            except CoveringError as exc:
                notes.append(f"nerve projection failed: {exc}; search-only mode")
        else:
            notes.append("covering hypotheses fail: " + "; ".join(check.problems[:3]) + "; search-only mode")
        if projection is not None:
            for tag in projection.reduced:
                members = cov.members(tag, g)
                if members and members <= target:
                    return PersistenceCertificate(
                        CERTIFIED, **caps, nerve_path=projection.reduced,
                        notes=tuple(notes) + (f"part {_show(tag)} on the reduced nerve path lies in target",
                                              "covering sampled" if check.sampled else "covering checked exactly"),
                    )
            notes.append("no part of the reduced nerve path lies inside target")
    res = avoiding_path_search(g, p, target, E, max_len, max_states, metric)
    if res.status == YES:
        return PersistenceCertificate(
            REFUTED, **caps, witness=res.found, script=res.script, search_states=res.states, notes=tuple(notes)
        )
    notes.append(res.detail)
    return PersistenceCertificate(
        UNKNOWN, **caps, search_states=res.states, search_closed=res.closed, notes=tuple(notes)
    )


def _show(tag) -> str:
    if isinstance(tag, tuple) and len(tag) == 2 and isinstance(tag[1], Colouring):
        return f"{tag[0]}({tag[1]})"
    return str(tag)


# ---------------------------------------------------------------- stringy witnesses


@dataclass(frozen=True)
class StringyWitness:
    lamp: object
    distances: tuple[int, int]
    inner_parts: tuple
    bound: int
    diameter: int

    @property
    def within_bound(self) -> bool:
        return self.diameter <= self.bound


def inner_part_diameter(w: WreathSpace, p, A1: int) -> int:
    """Diameter of an inner part I(d) of the covering around p.

    Inside an inner part the colouring is free on B(p, 3*A1) and the arrow
    ranges over the same ball. Recolouring is an isometry, so two
    vertices are farthest apart when every lamp of the ball differs by the
    diameter of the lamp graph; the arrow term is then the worst
    travelling-salesman path through the whole ball.
    """
    row = w.base_metric.row(p)
    region = sort_vertices(x for x, d in row.items() if d <= 3 * A1)
    lamp_diam = max(max(r.values()) for r in w._lamp_dist.values())
    worst = 0
    for q1 in region:
        for q2 in region:
            ts, _ = ts_path(w, q1, region, q2)
            worst = max(worst, ts)
    return worst + len(region) * lamp_diam


def common_leaf(u: LampVertex, v: LampVertex, metric, D: int) -> Colouring:
    """Colouring agreeing with u near v's arrow, with v near u's arrow, and with both elsewhere."""
    cu, cv = u.colouring, v.colouring
    values = cu.as_dict()
    for q in cu.differs(cv):
        if metric(q, u.arrow) <= D:
            values[q] = cv[q]
    return Colouring(values, cu.default)


def stringy_witness(w: WreathSpace, u: LampVertex, v: LampVertex, A1: int, A2: int) -> StringyWitness:
    """A lamp far from both arrows, the inner parts a path must cross, and their diameter bound."""
    w.check(u)
    w.check(v)
    D = 2 * A1 + A2
    metric = w.base_metric
    diff = u.colouring.differs(v.colouring)
    far = [q for q in sort_vertices(diff) if metric(q, u.arrow) >= D and metric(q, v.arrow) >= D]
    if not far:
        leaf = common_leaf(u, v, metric, D)
        K = (1 + 2 * D) * w.base_degree**D
        du, dv = dist_to_leaf(w, u, leaf), dist_to_leaf(w, v, leaf)
        raise NearCommonLeaf(
            f"near common leaf {leaf}: distances {du}, {dv} (lemma constant K={K})", leaf=leaf
        )
    p = far[0]
    cov = lamp_io_covering(w, p, A1)
    path = lamp_geodesic(w, u, v)
    proj = nerve_projection(cov, path, outer_part(cov, u), outer_part(cov, v))
    inner = tuple(tag for tag in proj.reduced if tag[0] == "I")
    bound = (1 + 4 * A1) * w.base_degree ** (2 * A1)
    return StringyWitness(p, (metric(p, u.arrow), metric(p, v.arrow)), inner, bound, inner_part_diameter(w, p, A1))


# ---------------------------------------------------------------- four copies of the base


def two_lamp_subgraph(g: Graph, p, q, colours: Sequence = (0, 1)) -> Graph:
    """Induced subgraph on vertices lit only at p and q, with colours from ``colours``."""
    allowed = set(colours)
    keep = []
    for v in g.vertices:
        supp = v.colouring.support
        if supp <= {p, q} and all(v.colouring[x] in allowed for x in (p, q)):
            keep.append(v)
    return g.subgraph(keep, name=f"two-lamp({p},{q})")


def two_lamp_retraction(v: LampVertex, p, q, colours: Sequence = (0, 1)) -> LampVertex:
    """Switch off lamps outside {p, q} and lamps at p, q whose colour is not allowed."""
    allowed = set(colours)
    c = v.colouring
    values = {x: c[x] for x in (p, q) if c[x] in allowed}
    return LampVertex(Colouring(values, c.default), v.arrow)
