"""Følner certificates, quasi-isometry checks, quasi-kappa-to-one maps and aptolic constructions."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import LampcoarseError, UnknownVertex, WindowError
from .graph import (
    Graph,
    Metric,
    boundary,
    components,
    distance_field,
    grid_window,
    sort_vertices,
    vertex_key,
)
from .leaves import AptolicMap, QIFit, fit_pairs
from .wreath import Colouring, LampVertex, WreathSpace, lamp_distance, neighbors


# ---------------------------------------------------------------- Følner sets


@dataclass(frozen=True)
class FolnerEntry:
    label: str
    size: int
    boundary: int
    predicted: int | None
    ratio: Fraction

    @property
    def matches(self) -> bool:
        return self.predicted is None or self.boundary == self.predicted


@dataclass(frozen=True)
class FolnerCertificate:
    entries: tuple
    window: str

    @property
    def exact(self) -> bool:
        return all(e.matches for e in self.entries)

    @property
    def decreasing(self) -> bool:
        ratios = [e.ratio for e in self.entries]
        return all(a > b for a, b in zip(ratios, ratios[1:]))


def _require_interior(g: Graph, s: Iterable, what: str) -> None:
    bad = [v for v in s if v in g.rim]
    if bad:
        raise WindowError(f"{what} touches the window rim at {bad[0]!r}")


def folner_boxes(d: int, n_values: Sequence[int]) -> FolnerCertificate:
    """Boxes {0..n-1}^d in the grid, with measured boundary against 2 d n^(d-1)."""
    if d < 1 or not n_values or min(n_values) < 1:
        raise ValueError("need d >= 1 and positive box sizes")
    top = max(n_values)
    g = grid_window(d, -1, top)
    entries = []
    for n in n_values:
        box = list(itertools.product(range(n), repeat=d))
        _require_interior(g, box, "box")
        b = len(boundary(g, box))
        entries.append(FolnerEntry(f"n={n}", len(box), b, 2 * d * n ** (d - 1), Fraction(b, len(box))))
    return FolnerCertificate(tuple(entries), g.window.header())


@dataclass(frozen=True)
class WreathFolner:
    size: int
    boundary: int
    size_formula: int
    quoted_formula: int
    corrected_formula: int

    @property
    def quoted_matches(self) -> bool:
        return self.boundary == self.quoted_formula

    @property
    def corrected_matches(self) -> bool:
        return self.boundary == self.corrected_formula


def wreath_box(w: WreathSpace, A: Iterable, B: Iterable) -> list[LampVertex]:
    """All (c, p) with p in B, c in A on B and c equal to the basepoint off B."""
    A, B = sort_vertices(set(A)), sort_vertices(set(B))
    out = []
    for values in itertools.product(A, repeat=len(B)):
        c = Colouring(zip(B, values), w.basepoint)
        out.extend(LampVertex(c, p) for p in B)
    return out


def folner_wreath(w: WreathSpace, A: Iterable, B: Iterable, cap: int = 10**6) -> WreathFolner:
    """Measure the boundary of the product set built from A in the lamp graph and B in the base."""
    A, B = set(A), set(B)
    if not A or not B:
        raise ValueError("A and B must be nonempty")
    for x in A:
        w.lamp.check(x)
    for p in B:
        w.base.check(p)
    _require_interior(w.lamp, A, "A")
    _require_interior(w.base, B, "B")
    size = len(B) * len(A) ** len(B)
    if size > cap:
        raise LampcoarseError(f"set has {size} vertices, cap is {cap}")
    F = set(wreath_box(w, A, B))
    bnd = set()
    for v in F:
        for u in neighbors(w, v):
            if u not in F:
                bnd.add(u)
    dA = len(boundary(w.lamp, A))
    dB = len(boundary(w.base, B))
    a, b = len(A), len(B)
    return WreathFolner(
        len(F),
        len(bnd),
        size,
        b * dA + dB,
        b * a ** (b - 1) * dA + a**b * dB,
    )


@dataclass(frozen=True)
class TreeBoundary:
    size: int
    boundary: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.boundary >= self.bound


def tree_subtree_boundary(g: Graph, subtree: Iterable, d: int) -> TreeBoundary:
    s = set(subtree)
    if not s:
        raise ValueError("empty subtree")
    for v in s:
        g.check(v)
        if g.degree(v) != d and v not in g.rim:
            raise ValueError(f"ambient tree is not {d}-regular at {v!r}")
    _require_interior(g, s, "subtree")
    if len(components(g, s)) != 1:
        raise ValueError("not a subtree: the set is disconnected")
    return TreeBoundary(len(s), len(boundary(g, s)), (d - 2) * len(s) + 2)


def random_subtree(g: Graph, size: int, rng: random.Random, root=None) -> frozenset:
    """Grow a connected set away from the rim by random boundary additions."""
    interior = [v for v in g.vertices if v not in g.rim]
    root = rng.choice(interior) if root is None else root
    s = {root}
    while len(s) < size:
        frontier = sort_vertices(v for v in boundary(g, s) if v not in g.rim)
        if not frontier:
            break
        s.add(rng.choice(frontier))
    return frozenset(s)


# ---------------------------------------------------------------- quasi-isometries


class QIMap:
    """A tabulated vertex map between graphs with declared (A, B) parameters."""

    def __init__(self, source: Graph, target: Graph, table: Mapping | Callable, A=1, B=0,
                 domain: Iterable | None = None, name: str = ""):
        self.source = source
        self.target = target
        keys = source.vertices if domain is None else sort_vertices(domain)
        if callable(table) and not isinstance(table, Mapping):
            table = {x: table(x) for x in keys}
        self.table = {x: table[x] for x in keys}
        for x, y in self.table.items():
            source.check(x)
            if y not in target:
                raise UnknownVertex(f"{x!r} maps to {y!r}, outside the target window")
        self.A = Fraction(A)
        self.B = Fraction(B)
        self.name = name
        self._fibres = None

    def __call__(self, x):
        try:
            return self.table[x]
        except KeyError:
            raise UnknownVertex(f"{x!r} is outside the tabulated domain") from None

    @property
    def domain(self) -> list:
        return list(self.table)

    def fibre(self, y) -> list:
        if self._fibres is None:
            fib: dict = {}
            for x, z in self.table.items():
                fib.setdefault(z, []).append(x)
            self._fibres = fib
        return self._fibres.get(y, [])

    def then(self, other: "QIMap") -> "QIMap":
        domain = [x for x in self.table if self.table[x] in other.table]
        return QIMap(self.source, other.target, {x: other(self(x)) for x in domain},
                     self.A * other.A, other.A * self.B + other.B, domain, f"{other.name} o {self.name}")


@dataclass(frozen=True)
class QIReport:
    fit: QIFit
    coverage: int
    declared: tuple

    @property
    def ok(self) -> bool:
        return self.fit.B <= self.declared[1] and self.coverage <= self.declared[1]


def qi_verify(f: QIMap, pairs: Iterable[tuple] | None = None, A=None) -> QIReport:
    """Fit d2 <= A d1 + B, d1 / A - B <= d2 at the declared A and measure image density."""
    sm, tm = Metric(f.source), Metric(f.target)
    if pairs is None:
        pairs = itertools.combinations(f.domain, 2)
    dists = [(sm(x, y), tm(f(x), f(y))) for x, y in pairs]
    fit = fit_pairs(dists, f.A if A is None else A)
    near = distance_field(f.target, set(f.table.values()))
    coverage = max(near.get(y, 10**9) for y in f.target.vertices)
    return QIReport(fit, coverage, (f.A, f.B))


def quasi_inverse(f: QIMap) -> QIMap:
    """Send each target vertex to the least source vertex whose image is nearest."""
    tm = Metric(f.target)
    order = sorted(f.domain, key=vertex_key)
    table = {}
    for y in f.target.vertices:
        row = tm.row(y)
        table[y] = min(order, key=lambda x: (row.get(f(x), 10**9), vertex_key(x)))
    return QIMap(f.target, f.source, table, f.A, 3 * f.A * f.B, name=f"inverse of {f.name}")


def displacement(f: QIMap) -> int:
    """Largest d(x, f(x)) when source and target are the same graph."""
    m = Metric(f.source)
    return max((m(x, f(x)) for x in f.domain), default=0)


# ---------------------------------------------------------------- quasi-kappa-to-one


@dataclass(frozen=True)
class KappaRow:
    centres: tuple
    size: int
    preimage: int
    boundary: int
    residual: Fraction


@dataclass(frozen=True)
class KappaReport:
    kappa: Fraction
    R: int
    C: Fraction
    rows: tuple
    sampled: bool

    @property
    def passed(self) -> bool:
        return all(r.residual <= self.C * r.boundary for r in self.rows)

    @property
    def worst(self) -> Fraction:
        return max((r.residual / r.boundary if r.boundary else r.residual for r in self.rows), default=Fraction(0))


def thick_family(g: Graph, R: int, max_balls: int = 3, cap: int = 500, seed: int = 0) -> list[tuple]:
    """Unions of at most max_balls radius-R balls with window-interior centres.

    Returns (centres, set) pairs. Beyond the cap every single ball is kept
    and the rest is a seeded sample of larger unions.
    """
    m = Metric(g)
    rim = g.rim
    centres = [x for x in g.vertices if all(m.row(x).get(y, 10**9) > R for y in rim)]
    if not centres:
        raise WindowError(f"no centre whose radius-{R} ball avoids the rim")
    balls = {x: frozenset(y for y, d in m.row(x).items() if d <= R) for x in centres}
    seen: dict = {}
    for x in centres:
        seen.setdefault(balls[x], (x,))
    combos = [c for k in range(2, max_balls + 1) for c in itertools.combinations(centres, k)]
    sampled = len(seen) + len(combos) > cap
    if sampled:
        rng = random.Random(seed)
        rng.shuffle(combos)
    for c in combos:
        if len(seen) >= cap:
            break
        s = frozenset().union(*(balls[x] for x in c))
        seen.setdefault(s, c)
    return sorted(((c, s) for s, c in seen.items()), key=lambda t: (len(t[0]), [vertex_key(x) for x in t[0]]))


def quasi_kappa_check(f: QIMap, kappa, R: int, C, max_balls: int = 3, cap: int = 500, seed: int = 0) -> KappaReport:
    """Residuals | |f^-1(S)| - kappa |S| | against C |boundary S| over thick target sets.

    Preimages are counted over the tabulated domain, which must contain
    every preimage of the target window.
    """
    kappa, C = Fraction(kappa), Fraction(C)
    family = thick_family(f.target, R, max_balls, cap, seed)
    rows = []
    for centres, s in family:
        pre = sum(len(f.fibre(y)) for y in s)
        b = len(boundary(f.target, s))
        rows.append(KappaRow(tuple(centres), len(s), pre, b, abs(pre - kappa * len(s))))
    return KappaReport(kappa, R, C, tuple(rows), len(family) >= cap)


# ---------------------------------------------------------------- tree maps


def tree_ray(g: Graph) -> list[tuple]:
    """The ray from the root () through the first child, as far as the window reaches."""
    ray = [()]
    while ray[-1] + (0,) in g:
        ray.append(ray[-1] + (0,))
    return ray


def toward_end_map(g: Graph, d: int) -> QIMap:
    """Map each tree vertex to its neighbour toward the end of the ray () -> (0,) -> (0, 0) ...

    The last ray vertex of the window has its image outside and is left
    out of the domain.
    """
    ray = tree_ray(g)
    on_ray = set(ray)
    table = {}
    for v in g.vertices:
        if v in on_ray:
            nxt = v + (0,)
            if nxt in g:
                table[v] = nxt
        else:
            table[v] = v[:-1]
    if any(g.degree(v) != d for v in g.vertices if v not in g.rim):
        raise ValueError(f"window is not a {d}-regular tree")
    return QIMap(g, g, table, 1, 2, domain=table, name="toward-end")


def interior_fibre_sizes(f: QIMap) -> dict:
    """Fibre sizes over target vertices whose whole neighbourhood lies in the window."""
    g = f.target
    out = {}
    for y in g.vertices:
        if y in g.rim or any(z in g.rim for z in g.neighbors(y)):
            continue
        out[y] = len(f.fibre(y))
    return out


# ---------------------------------------------------------------- aptolic constructions


def split_colour(k: int, m: int) -> tuple[int, int]:
    """Mixed-radix split of Z_{mp} into (Z_m part, Z_p part)."""
    return k % m, k // m


def join_colour(u: int, digits: Sequence[int], m: int, p: int) -> int:
    """Inverse mixed-radix encoding of Z_m x (Z_p)^n into Z_{m p^n}."""
    v = 0
    for digit in reversed(digits):
        v = v * p + digit
    return u + m * v


@dataclass(frozen=True)
class NonamenableReport:
    pairs: int
    first_inclusion: bool
    second_inclusion: bool
    max_upper: Fraction
    max_lower: Fraction
    upper_bound: int
    lower_bound: int
    failures: tuple = ()

    @property
    def ok(self) -> bool:
        return (self.first_inclusion and self.second_inclusion
                and self.max_upper <= self.upper_bound and self.max_lower <= self.lower_bound)


def aptolic_nonamenable(m: int, p: int, n: int, g: Graph, f: QIMap, C: int) -> AptolicMap:
    """The colouring map c -> c-bar between L_{mp}(X) and L_{mp^n}(X) with identity on positions.

    The Z_m part of c(x) stays at x; the Z_p parts over the fibre of x,
    in window enumeration order, are packed into the digits of c-bar(x).
    """
    if min(m, p, n) < 1:
        raise ValueError("m, p, n must be positive")
    sizes = interior_fibre_sizes(f)
    bad = {y: s for y, s in sizes.items() if s != n}
    if bad:
        y = sort_vertices(bad)[0]
        raise LampcoarseError(f"fibre over {y!r} has {bad[y]} points, expected {n}")
    if displacement(f) > C:
        raise LampcoarseError(f"map moves a vertex by more than C={C}")
    enumeration = {v: i for i, v in enumerate(g.vertices)}
    complete = set(sizes)
    source = WreathSpace.lamplighter(m * p, g)
    target = WreathSpace.lamplighter(m * p**n, g)

    def alpha(c: Colouring) -> Colouring:
        support = set(c.support)
        touched = support | {f(x) for x in support}
        out = {}
        for y in touched:
            if y not in complete:
                raise WindowError(f"fibre over {y!r} is not complete in the window")
            fib = sorted(f.fibre(y), key=enumeration.__getitem__)
            u = split_colour(c[y], m)[0]
            digits = [split_colour(c[x], m)[1] for x in fib]
            out[y] = join_colour(u, digits, m, p)
        return Colouring(out, 0)

    amap = AptolicMap(source, target, alpha, lambda q: q, complete, (2 * C + 1, 0), name=f"cbar({m},{p},{n})")
    amap.fibre_map = f
    amap.bounds = (2 * C + 1, 2 * n * C + 1)
    return amap


def verify_nonamenable(amap: AptolicMap, pairs: Sequence[tuple[LampVertex, LampVertex]]) -> NonamenableReport:
    """Check the two support inclusions and the Lipschitz bounds on sampled pairs."""
    f = amap.fibre_map
    first = second = True
    failures = []
    up = low = Fraction(0)
    for u, v in pairs:
        diff = u.colouring.differs(v.colouring)
        bu, bv = amap.alpha(u.colouring), amap.alpha(v.colouring)
        bdiff = bu.differs(bv)
        if not bdiff <= diff | {f(x) for x in diff}:
            first = False
            failures.append(("first", u, v))
        if not diff <= bdiff | {x for y in bdiff for x in f.fibre(y)}:
            second = False
            failures.append(("second", u, v))
        d1 = lamp_distance(amap.source, u, v)
        d2 = lamp_distance(amap.target, LampVertex(bu, u.arrow), LampVertex(bv, v.arrow))
        if d1:
            up = max(up, Fraction(d2, d1))
        if d2:
            low = max(low, Fraction(d1, d2))
    return NonamenableReport(len(pairs), first, second, up, low, amap.bounds[0], amap.bounds[1], tuple(failures[:5]))


def sample_tree_vertices(amap: AptolicMap, count: int, depth: int, lamps: int, seed: int) -> list[LampVertex]:
    """Random vertices with at most ``lamps`` lit lamps at depth <= depth and arrows at depth <= depth."""
    rng = random.Random(seed)
    g = amap.source.base
    pool = [v for v in g.vertices if len(v) <= depth]
    colours = amap.source.colours
    out = []
    for _ in range(count):
        k = rng.randint(0, lamps)
        lit = rng.sample(pool, k)
        c = Colouring({q: rng.randrange(1, colours) for q in lit}, 0)
        out.append(LampVertex(c, rng.choice(pool)))
    return out


@dataclass(frozen=True)
class AmenableReport:
    bijective: bool
    window_colourings: int
    qi: QIReport
    hausdorff: int
    samples: int


def aptolic_amenable(
    X: Graph,
    Y: Graph,
    P: Sequence[Sequence],
    Q: Sequence[Sequence],
    psi: Mapping,
    beta: QIMap,
    sigma: Callable[[tuple], tuple],
    q: int,
) -> AptolicMap:
    """Aptolic map L_{q^a}(X) -> L_{q^b}(Y) assembled piecewise through sigma.

    P partitions X into ordered pieces of size b, Q partitions Y into
    ordered pieces of size a, psi matches pieces, and sigma is a bijection
    (Z_{q^a})^b -> (Z_{q^b})^a fixing 0.
    """
    P = [tuple(piece) for piece in P]
    Q = [tuple(piece) for piece in Q]
    b = len(P[0])
    a = len(Q[0])
    if any(len(piece) != b for piece in P) or any(len(piece) != a for piece in Q):
        raise LampcoarseError("pieces of a partition must all have the same size")
    if sorted(map(vertex_key, itertools.chain(*P))) != sorted(map(vertex_key, X.vertices)):
        raise LampcoarseError("P does not partition the source window")
    if sorted(map(vertex_key, itertools.chain(*Q))) != sorted(map(vertex_key, Y.vertices)):
        raise LampcoarseError("Q does not partition the target window")
    psi = {tuple(k): tuple(v) for k, v in psi.items()}
    if set(psi) != set(P) or sorted(psi.values()) != sorted(Q):
        raise LampcoarseError("psi must be a bijection between the pieces")
    for piece in P:
        image = psi[piece]
        for x in piece:
            if beta(x) not in image:
                raise LampcoarseError(f"beta sends {x!r} to {beta(x)!r}, outside psi({piece})")
    if tuple(sigma((0,) * b)) != (0,) * a:
        raise LampcoarseError("sigma must fix 0")
    piece_of = {x: piece for piece in P for x in piece}

    def alpha(c: Colouring) -> Colouring:
        out = {}
        for piece in {piece_of[x] for x in c.support}:
            values = tuple(sigma(tuple(c[x] for x in piece)))
            out.update(zip(psi[piece], values))
        return Colouring(out, 0)

    source = WreathSpace.lamplighter(q**a, X)
    target = WreathSpace.lamplighter(q**b, Y)
    amap = AptolicMap(source, target, alpha, beta, X.vertices, (beta.A, beta.B), name="piecewise")
    amap.pieces = (P, Q, psi)
    amap.beta_map = beta
    amap.sigma = sigma
    return amap


def hausdorff(g: Graph, s: Iterable, t: Iterable) -> int:
    s, t = set(s), set(t)
    if not s and not t:
        return 0
    if not s or not t:
        raise ValueError("Hausdorff distance between an empty and a nonempty set")
    m = Metric(g)
    return max(max(min(m(x, y) for y in t) for x in s), max(min(m(x, y) for x in s) for y in t))


def verify_amenable(amap: AptolicMap, window_pieces: int, samples: int, seed: int) -> AmenableReport:
    """Conditions (i) bijectivity on a piece window, (ii) QI fit of beta, (iii) Hausdorff support bound."""
    P, Q, psi = amap.pieces
    src_colours = amap.source.colours
    tgt_colours = amap.target.colours
    pieces = P[:window_pieces]
    positions = [x for piece in pieces for x in piece]
    images = set()
    count = 0
    for values in itertools.product(range(src_colours), repeat=len(positions)):
        images.add(amap.alpha(Colouring(zip(positions, values), 0)))
        count += 1
    target_count = tgt_colours ** sum(len(psi[piece]) for piece in pieces)
    bijective = len(images) == count == target_count
    qi = qi_verify(amap.beta_map)
    rng = random.Random(seed)
    worst = 0
    xs = amap.source.base.vertices
    for _ in range(samples):
        c1 = Colouring({x: rng.randrange(src_colours) for x in rng.sample(xs, 3)}, 0)
        c2 = Colouring({x: rng.randrange(src_colours) for x in rng.sample(xs, 3)}, 0)
        diff = c1.differs(c2)
        if not diff:
            continue
        img = amap.alpha(c1).differs(amap.alpha(c2))
        worst = max(worst, hausdorff(amap.target.base, {amap.beta(x) for x in diff}, img))
    return AmenableReport(bijective, count, qi, worst, samples)
