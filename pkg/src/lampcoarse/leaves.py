"""Leaves of lamplighter graphs, squares and ladders of leaves, and aptolic maps.

The leaf X(c) of a lamplighter graph is the copy of the base graph made of
all vertices (c, p) sharing the colouring c. Colour arithmetic below treats
the lamps of L_n(X) as the cyclic group Z_n.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CapExceeded, LampcoarseError, RungError, UnknownVertex, WindowError
from .graph import set_distance, sort_vertices, thicken
from .wreath import (
    HELD_KARP_CAP,
    Colouring,
    LampVertex,
    WreathSpace,
    colour_add,
    colour_sub,
    held_karp,
    lamp_distance,
)


@dataclass(frozen=True)
class Leaf:
    colouring: Colouring

    def __str__(self) -> str:
        return f"X({self.colouring})"

    def sort_key(self) -> tuple:
        return self.colouring.sort_key()


def _colouring(leaf) -> Colouring:
    return leaf.colouring if isinstance(leaf, Leaf) else leaf


def _colours(w: WreathSpace) -> int:
    if not w.colours:
        raise LampcoarseError("colour arithmetic needs a lamplighter space L_n(X)")
    return w.colours


def dist_to_leaf(w: WreathSpace, v: LampVertex, leaf, cap: int = HELD_KARP_CAP) -> int:
    """Distance from v to the leaf: visit every differing lamp, ending anywhere."""
    w.check(v)
    c = _colouring(leaf)
    diff = v.colouring.differs(c)
    ts, _ = held_karp(list(diff), w.base_metric, v.arrow, None, cap)
    return ts + sum(w.lamp_distance(v.colouring[q], c[q]) for q in diff)


def leaf_distance(w: WreathSpace, leaf1, leaf2, cap: int = HELD_KARP_CAP) -> int:
    """Distance between two leaves: a shortest walk through the differing lamps with both ends free."""
    c1, c2 = _colouring(leaf1), _colouring(leaf2)
    diff = c1.differs(c2)
    ts, _ = held_karp(list(diff), w.base_metric, None, None, cap)
    return ts + sum(w.lamp_distance(c1[q], c2[q]) for q in diff)


# ---------------------------------------------------------------- coarse intersections


@dataclass(frozen=True)
class LeafIntersection:
    size: int
    diameter: int | None
    bound: int

    @property
    def empty(self) -> bool:
        return self.size == 0


def leaf_thickening(w: WreathSpace, leaf, K: int) -> list[LampVertex]:
    """Every vertex within K of the leaf whose arrow lies in the base window."""
    c = _colouring(leaf)
    metric = w.base_metric
    lamp_values = w.lamp.vertices
    out = []
    for q in w.base.vertices:
        near = sort_vertices(x for x, d in metric.row(q).items() if d <= K)
        for k in range(K + 1):
            for positions in itertools.combinations(near, k):
                choices = [[x for x in lamp_values if x != c[pos]] for pos in positions]
                for values in itertools.product(*choices):
                    v = LampVertex(Colouring({**c.as_dict(), **dict(zip(positions, values))}, c.default), q)
                    if dist_to_leaf(w, v, c) <= K:
                        out.append(v)
    return out


def leaf_coarse_intersection(w: WreathSpace, leaf1, leaf2, K: int) -> LeafIntersection:
    """Exact diameter of the K-neighbourhood intersection of two distinct leaves on the base window."""
    c1, c2 = _colouring(leaf1), _colouring(leaf2)
    if c1 == c2:
        raise ValueError("leaves must be distinct")
    if K < 0:
        raise ValueError("K must be non-negative")
    members = [v for v in leaf_thickening(w, c1, K) if dist_to_leaf(w, v, c2) <= K]
    bound = (1 + 4 * K) * w.base_degree ** (6 * K)
    rim = w.base.rim
    for v in members:
        if v.arrow in rim:
            raise WindowError(f"intersection reaches the base window rim at {v.arrow!r}")
    if not members:
        return LeafIntersection(0, None, bound)
    diam = max((lamp_distance(w, a, b) for a, b in itertools.combinations(members, 2)), default=0)
    return LeafIntersection(len(members), diam, bound)


# ---------------------------------------------------------------- squares and ladders


@dataclass(frozen=True)
class SquareOfLeaves:
    leaves: tuple
    eps: int
    L: int
    base: Colouring
    first: Colouring
    second: Colouring
    first_ball: tuple
    second_ball: tuple
    ball_distance: int


@dataclass(frozen=True)
class SquareRefutation:
    condition: str
    detail: str

    def __bool__(self) -> bool:
        return False


def contact_region(w: WreathSpace, leaf, other, eps: int) -> frozenset:
    """Arrow positions q with (c, q) within eps of the other leaf."""
    c = _colouring(leaf)
    return frozenset(q for q in w.base.vertices if dist_to_leaf(w, LampVertex(c, q), other) <= eps)


def _support_ball(w: WreathSpace, support: frozenset, eps: int) -> list:
    """Centres whose eps-ball contains the support."""
    metric = w.base_metric
    return [x for x in w.base.vertices if all(metric(x, q) <= eps for q in support)]


def detect_square(w: WreathSpace, leaves: Sequence, eps: int, L: int):
    """Check the square-of-leaves conditions on the base window and decompose.

    Returns a SquareOfLeaves with P_0 = X(c), P_1 = X(c+a), P_2 = X(c+a+b),
    P_3 = X(c+b), or a SquareRefutation naming the first failed condition.
    The spread condition is read inside each leaf: the positions of P_i
    close to P_{i-1} and those close to P_{i+1} are at least L apart.
    """
    if L <= 3 * eps:
        raise ValueError(f"need L > 3*eps, got L={L}, eps={eps}")
    n = _colours(w)
    cs = [_colouring(x) for x in leaves]
    if len(cs) != 4:
        raise ValueError("a square has four leaves")
    if len(set(cs)) != 4:
        return SquareRefutation("distinct", "the four leaves are not distinct")
    c = cs[0]
    a = colour_sub(cs[1], c, n)
    b = colour_sub(cs[3], c, n)
    if colour_add(colour_add(c, a, n), b, n) != cs[2]:
        return SquareRefutation("decomposition", f"P_2 = {cs[2]} differs from c+a+b = {colour_add(colour_add(c, a, n), b, n)}")
    for i in range(4):
        d = leaf_distance(w, cs[i], cs[(i + 1) % 4])
        if d > eps:
            return SquareRefutation("close", f"d(P_{i}, P_{(i + 1) % 4}) = {d} > {eps}")
    for i in range(4):
        before = contact_region(w, cs[i], cs[(i - 1) % 4], eps)
        after = contact_region(w, cs[i], cs[(i + 1) % 4], eps)
        spread = set_distance(w.base, before, after)
        if spread is None or spread < L:
            return SquareRefutation("spread", f"contact regions of P_{i} are {spread} apart, need >= {L}")
        if before & w.base.rim or after & w.base.rim:
            raise WindowError(f"contact regions of P_{i} reach the base window rim")
    centres_a = _support_ball(w, a.support, eps)
    centres_b = _support_ball(w, b.support, eps)
    best = None
    for x in centres_a:
        ball_a = frozenset(q for q, d in w.base_metric.row(x).items() if d <= eps)
        for y in centres_b:
            ball_b = frozenset(q for q, d in w.base_metric.row(y).items() if d <= eps)
            d = set_distance(w.base, ball_a, ball_b)
            if best is None or d > best[0]:
                best = (d, x, y)
    if best is None:
        return SquareRefutation("support", f"increments are not supported in balls of radius {eps}")
    if best[0] < L - 2 * eps:
        return SquareRefutation("support", f"support balls are {best[0]} apart, need >= {L - 2 * eps}")
    return SquareOfLeaves(tuple(Leaf(x) for x in cs), eps, L, c, a, b, (best[1], eps), (best[2], eps), best[0])


@dataclass(frozen=True)
class LadderReport:
    difference: Colouring
    arrow_distance: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.arrow_distance <= self.bound


def ladder_check(
    w: WreathSpace,
    P: Sequence,
    Q: Sequence,
    eps: int,
    L: int,
    eta: int,
    u: LampVertex,
    v: LampVertex,
) -> LadderReport:
    """Verify a ladder of leaves rung by rung and the arrow bound d(p, q) <= 6*eta.

    Rungs are numbered from 1; a failing square between rungs j-1 and j is
    reported as rung j.
    """
    n = _colours(w)
    if len(P) != len(Q) or not P:
        raise ValueError("a ladder needs equally many P and Q leaves, at least one of each")
    ps, qs = [_colouring(x) for x in P], [_colouring(x) for x in Q]
    for j in range(1, len(ps)):
        sq = detect_square(w, (ps[j - 1], ps[j], qs[j], qs[j - 1]), eps, L)
        if not sq:
            raise RungError(f"rung {j + 1}: {sq.condition}: {sq.detail}", j + 1)
    diffs = [colour_sub(q, p, n) for p, q in zip(ps, qs)]
    for j, d in enumerate(diffs[1:], start=2):
        if d != diffs[0]:
            raise RungError(f"rung {j}: difference {d} differs from {diffs[0]}", j)
    for name, x, pair in (("u", u, (ps[0], qs[0])), ("v", v, (ps[-1], qs[-1]))):
        for leaf in pair:
            d = dist_to_leaf(w, x, leaf)
            if d > eta:
                raise ValueError(f"{name} is at distance {d} > {eta} from leaf {Leaf(leaf)}")
    return LadderReport(diffs[0], w.base_metric(u.arrow, v.arrow), 6 * eta)


# ---------------------------------------------------------------- aptolic maps


class AptolicMap:
    """A map (c, p) -> (alpha(c), beta(p)) between lamplighter graphs.

    ``alpha`` acts on colourings supported in ``domain``; other colourings
    are outside the tabulation and rejected.
    """

    def __init__(
        self,
        source: WreathSpace,
        target: WreathSpace,
        alpha: Callable[[Colouring], Colouring] | None,
        beta: Callable | Mapping,
        domain: Iterable | None = None,
        params: tuple = (1, 0),
        name: str = "",
    ):
        self.source = source
        self.target = target
        self._alpha = alpha
        self._beta = beta.__getitem__ if isinstance(beta, Mapping) else beta
        self.domain = frozenset(source.base.vertices if domain is None else domain)
        self.params = params
        self.name = name

    def alpha(self, c: Colouring) -> Colouring:
        if self._alpha is None:
            raise LampcoarseError("this map carries no colouring map")
        if not c.support <= self.domain:
            raise UnknownVertex(f"colouring {c} is outside the tabulated window")
        return self._alpha(c)

    def beta(self, p):
        self.source.base.check(p)
        return self._beta(p)

    def table(self, cap: int = 10**5) -> dict:
        """Tabulate alpha on every colouring supported in the domain and check injectivity."""
        lamp_values = self.source.lamp.vertices
        positions = sort_vertices(self.domain)
        if len(lamp_values) ** len(positions) > cap:
            raise CapExceeded(f"tabulation needs {len(lamp_values) ** len(positions)} colourings, cap is {cap}")
        out = {}
        seen = {}
        for values in itertools.product(lamp_values, repeat=len(positions)):
            c = Colouring(zip(positions, values), self.source.basepoint)
            image = self.alpha(c)
            if image in seen:
                raise LampcoarseError(f"alpha is not injective: {seen[image]} and {c} both map to {image}")
            seen[image] = c
            out[c] = image
        return out


def aptolic_apply(m: AptolicMap, v: LampVertex) -> LampVertex:
    m.source.check(v)
    return LampVertex(m.alpha(v.colouring), m.beta(v.arrow))


def compose(first: AptolicMap, second: AptolicMap) -> AptolicMap:
    """The aptolic map applying ``first`` then ``second``."""
    return AptolicMap(
        first.source,
        second.target,
        lambda c: second.alpha(first.alpha(c)),
        lambda p: second.beta(first.beta(p)),
        first.domain,
        (first.params[0] * second.params[0], second.params[0] * first.params[1] + second.params[1]),
        name=f"{second.name} o {first.name}",
    )


@dataclass(frozen=True)
class QIFit:
    upper: Fraction
    lower: Fraction
    A: Fraction
    B: Fraction
    pairs: int


def fit_pairs(distances: Iterable[tuple[int, int]], A=None) -> QIFit:
    """Tightest affine bounds d2 <= A d1 + B and d1 / A - B <= d2 over distance pairs.

    Without a declared A the multiplicative constant is the worst ratio in
    either direction, which leaves B = 0 unless some pair collapses.
    """
    distances = list(distances)
    upper = max((Fraction(d2, d1) for d1, d2 in distances if d1), default=Fraction(0))
    lower = max((Fraction(d1, d2) for d1, d2 in distances if d2), default=Fraction(0))
    if A is None:
        A = max(upper, lower, Fraction(1))
    A = Fraction(A)
    B = max((max(d2 - A * d1, d1 / A - d2) for d1, d2 in distances), default=Fraction(0))
    return QIFit(upper, lower, A, max(B, Fraction(0)), len(distances))


def aptolic_qi_fit(m: AptolicMap, pairs: Iterable[tuple[LampVertex, LampVertex]], A=None) -> QIFit:
    dists = []
    for u, v in pairs:
        d1 = lamp_distance(m.source, u, v)
        d2 = lamp_distance(m.target, aptolic_apply(m, u), aptolic_apply(m, v))
        dists.append((d1, d2))
    return fit_pairs(dists, A)


@dataclass(frozen=True)
class InclusionVerdict:
    holds: bool
    checked: int
    exhaustive: bool
    counterexample: Colouring | None = None
    region: frozenset = frozenset()

    def __bool__(self) -> bool:
        return self.holds


def alpha_inclusion_test(
    m: AptolicMap,
    c: Colouring,
    S: Iterable,
    K: int,
    budget: int = 4096,
    samples: int = 256,
    seed: int = 0,
) -> InclusionVerdict:
    """Check supp(alpha(c + e) - alpha(c)) within beta(S)^{+K} for colourings e on S."""
    n = _colours(m.source)
    n_target = _colours(m.target)
    S = sort_vertices(set(S))
    region = thicken(m.target.base, {m.beta(q) for q in S}, K)
    base_image = m.alpha(c)
    total = n ** len(S)
    if total <= budget:
        exhaustive = True
        choices = itertools.product(range(n), repeat=len(S))
    else:
        exhaustive = False
        rng = random.Random(seed)
        choices = (tuple(rng.randrange(n) for _ in S) for _ in range(samples))
    checked = 0
    for values in choices:
        e = Colouring(zip(S, values), 0)
        image = m.alpha(colour_add(c, e, n))
        checked += 1
        if not colour_sub(image, base_image, n_target).support <= region:
            return InclusionVerdict(False, checked, exhaustive, e, region)
    return InclusionVerdict(True, checked, exhaustive, None, region)


def prime_factors(k: int) -> dict[int, int]:
    if k < 1:
        raise ValueError("need a positive integer")
    out: dict[int, int] = {}
    p = 2
    while p * p <= k:
        while k % p == 0:
            out[p] = out.get(p, 0) + 1
            k //= p
        p += 1
    if k > 1:
        out[k] = out.get(k, 0) + 1
    return out


@dataclass(frozen=True)
class DivisibilityReport:
    n: int
    n_exponent: int
    m: int
    m_exponent: int
    divides: bool
    valuations: tuple


def divisibility_test(m: AptolicMap, S: Iterable, K: int) -> DivisibilityReport:
    """Decide whether n^|S| divides m^|beta(S)^{+K}| by comparing p-adic valuations."""
    n, mm = _colours(m.source), _colours(m.target)
    S = set(S)
    for q in S:
        m.source.base.check(q)
    image = {m.beta(q) for q in S}
    region = thicken(m.target.base, image, K)
    if any(m.target.base_metric(x, y) < K for y in m.target.base.rim for x in image):
        raise WindowError("thickened image reaches the target window rim")
    fm = prime_factors(mm)
    vals = []
    ok = True
    for p, e in sorted(prime_factors(n).items()):
        lhs = e * len(S)
        rhs = fm.get(p, 0) * len(region)
        vals.append((p, lhs, rhs))
        ok = ok and lhs <= rhs
    return DivisibilityReport(n, len(S), mm, len(region), ok, tuple(vals))
