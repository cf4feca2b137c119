import itertools
import random
from fractions import Fraction

import pytest

from lampcoarse import graph, leaves, wreath
from lampcoarse.cli import build_ladder
from lampcoarse.errors import CapExceeded, LampcoarseError, RungError, UnknownVertex, WindowError
from lampcoarse.leaves import AptolicMap, Leaf
from lampcoarse.wreath import Colouring, LampVertex


def _line(n, lo, hi):
    return wreath.WreathSpace.lamplighter(n, graph.line_window(lo, hi))


def _bfs_to_leaf(g, colouring):
    return graph.distance_field(g, [v for v in g.vertices if v.colouring == colouring])


# ---------------------------------------------------------------- leaves


def test_leaves_partition_the_vertex_set():
    w = wreath.WreathSpace.lamplighter(2, graph.path_graph(4))
    g = wreath.materialize(w)
    by_leaf = {}
    for v in g.vertices:
        by_leaf.setdefault(Leaf(v.colouring), set()).add(v.arrow)
    assert len(by_leaf) == 2**4
    assert all(arrows == set(range(4)) for arrows in by_leaf.values())
    assert Leaf(w.colouring({1: 1})) == Leaf(Colouring({1: 1, 2: 0}))


def test_dist_to_leaf_examples():
    w = _line(2, -10, 10)
    v = w.vertex({}, 0)
    assert leaves.dist_to_leaf(w, v, w.colouring({})) == 0
    assert leaves.dist_to_leaf(w, v, w.colouring({3: 1})) == 4
    assert leaves.dist_to_leaf(w, v, Leaf(w.colouring({-1: 1, 2: 1}))) == 6


def test_dist_to_leaf_matches_bfs():
    w = _line(2, -5, 5)
    g = wreath.materialize(w, range(-3, 4), range(-5, 6))
    rng = random.Random(1)
    for _ in range(30):
        target = w.colouring({q: 1 for q in rng.sample(range(-2, 3), rng.randint(0, 3))})
        field = _bfs_to_leaf(g, target)
        v = w.vertex({q: 1 for q in rng.sample(range(-2, 3), rng.randint(0, 3))}, rng.randint(-2, 2))
        assert leaves.dist_to_leaf(w, v, target) == field[v]


def test_leaf_distance_is_the_least_vertex_distance():
    w = _line(2, -4, 4)
    g = wreath.materialize(w, range(-2, 3), range(-4, 5))
    a, b = w.colouring({-2: 1}), w.colouring({1: 1, 2: 1})
    field = _bfs_to_leaf(g, b)
    best = min(field[v] for v in g.vertices if v.colouring == a)
    assert leaves.leaf_distance(w, a, b) == best == 7


def test_coarse_intersection_examples():
    w = _line(2, -15, 15)
    empty, lit = w.colouring({}), w.colouring({0: 1})
    with pytest.raises(ValueError):
        leaves.leaf_coarse_intersection(w, empty, empty, 1)
    assert leaves.leaf_coarse_intersection(w, empty, lit, 0).empty
    r = leaves.leaf_coarse_intersection(w, empty, lit, 2)
    assert (r.size, r.diameter, r.bound) == (6, 3, 9 * 2**12)


def test_coarse_intersection_members_match_bfs():
    w = _line(2, -8, 8)
    g = wreath.materialize(w, range(-4, 5), range(-6, 7))
    empty, lit = w.colouring({}), w.colouring({0: 1})
    near_empty, near_lit = _bfs_to_leaf(g, empty), _bfs_to_leaf(g, lit)
    expected = {v for v in g.vertices if near_empty[v] <= 2 and near_lit[v] <= 2}
    thick = leaves.leaf_thickening(w, empty, 2)
    ours = {v for v in thick if leaves.dist_to_leaf(w, v, lit) <= 2}
    assert ours == expected and len(ours) == 6


def test_coarse_intersection_window_violation():
    w = _line(2, -2, 2)
    with pytest.raises(WindowError):
        leaves.leaf_coarse_intersection(w, w.colouring({}), w.colouring({2: 1}), 2)


# ---------------------------------------------------------------- squares


def test_typical_square_is_decomposed():
    w = _line(2, -20, 20)
    c1, c2 = w.colouring({-8: 1}), w.colouring({8: 1})
    sq = leaves.detect_square(w, [w.colouring({}), c1, wreath.colour_add(c1, c2, 2), c2], 1, 10)
    assert sq and (sq.base, sq.first, sq.second) == (w.colouring({}), c1, c2)
    assert sq.ball_distance >= 10 - 2


def test_square_refutations():
    w = _line(2, -20, 20)
    c1, c2 = w.colouring({-8: 1}), w.colouring({8: 1})
    wrong = leaves.detect_square(w, [w.colouring({}), c1, w.colouring({-8: 1, 9: 1}), c2], 1, 10)
    assert not wrong and wrong.condition == "decomposition"
    same = leaves.detect_square(w, [w.colouring({})] * 4, 0, 1)
    assert not same and same.condition == "distinct"
    near = leaves.detect_square(w, [w.colouring({}), c1, wreath.colour_add(c1, w.colouring({-3: 1}), 2),
                                    w.colouring({-3: 1})], 1, 10)
    assert not near and near.condition == "spread"
    far = leaves.detect_square(w, [w.colouring({}), w.colouring({-8: 1, -5: 1}),
                                   w.colouring({-8: 1, -5: 1, 8: 1}), c2], 1, 10)
    assert not far and far.condition == "close"
    with pytest.raises(ValueError):
        leaves.detect_square(w, [w.colouring({})] * 4, 1, 3)


def test_square_decomposition_is_unique_on_a_small_window():
    w = _line(2, -6, 6)
    c, a, b = w.colouring({0: 1}), w.colouring({-3: 1}), w.colouring({4: 1})
    corners = [c, wreath.colour_add(c, a, 2), wreath.colour_add(wreath.colour_add(c, a, 2), b, 2),
               wreath.colour_add(c, b, 2)]
    sq = leaves.detect_square(w, corners, 1, 4)
    assert sq
    solutions = []
    positions = list(range(-5, 6))
    for values in itertools.product((0, 1), repeat=len(positions)):
        c0 = Colouring(zip(positions, values))
        a0 = wreath.colour_sub(corners[1], c0, 2)
        b0 = wreath.colour_sub(corners[3], c0, 2)
        if c0 == corners[0] and wreath.colour_add(wreath.colour_add(c0, a0, 2), b0, 2) == corners[2]:
            solutions.append((c0, a0, b0))
    assert solutions == [(sq.base, sq.first, sq.second)]


# ---------------------------------------------------------------- ladders


def test_single_rung_ladder():
    w = _line(2, -20, 20)
    P, Q = [w.colouring({})], [w.colouring({0: 1})]
    u = w.vertex({}, 0)
    report = leaves.ladder_check(w, P, Q, 1, 4, 1, u, u)
    assert report.ok and report.arrow_distance == 0 and report.difference == w.colouring({0: 1})


def test_three_rung_ladder():
    w = _line(2, -30, 30)
    P, Q, u, v = build_ladder(w, 3, 5)
    report = leaves.ladder_check(w, P, Q, 1, 5, 2, u, v)
    assert report.ok and report.difference == w.colouring({0: 1})
    assert report.arrow_distance == 2 <= report.bound == 12


def test_ladder_with_mismatched_difference():
    w = _line(2, -30, 30)
    P, Q, u, v = build_ladder(w, 3, 5)
    Q[1] = wreath.colour_add(P[1], w.colouring({1: 1}), 2)
    with pytest.raises(RungError) as exc:
        leaves.ladder_check(w, P, Q, 1, 5, 2, u, v)
    assert exc.value.rung == 2


def test_ladder_rejects_far_endpoints():
    w = _line(2, -30, 30)
    P, Q, u, v = build_ladder(w, 2, 5)
    with pytest.raises(ValueError, match="distance"):
        leaves.ladder_check(w, P, Q, 1, 5, 2, w.vertex(u.colouring.as_dict(), 9), v)


def test_isometric_images_of_ladders_are_ladders():
    base = graph.line_window(-30, 30)
    w = wreath.WreathSpace.lamplighter(2, base)
    phi = wreath.transport_bilip({0: 1, 1: 0}, {q: -q for q in base.vertices}, w, w)

    def image(c):
        return phi(LampVertex(c, 0)).colouring

    for rungs, L in ((2, 4), (3, 5)):
        P, Q, u, v = build_ladder(w, rungs, L)
        before = leaves.ladder_check(w, P, Q, 1, L, 2, u, v)
        after = leaves.ladder_check(w, [image(c) for c in P], [image(c) for c in Q], 1, L, 2, phi(u), phi(v))
        assert before.ok and after.ok
        assert after.arrow_distance == before.arrow_distance


# ---------------------------------------------------------------- aptolic maps


def _identity_map(w):
    return AptolicMap(w, w, lambda c: c, lambda p: p, name="identity")


def _transported_map(w, alpha, beta):
    phi = wreath.transport_bilip(alpha, beta, w, w)
    anchor = w.base.vertices[0]
    return AptolicMap(w, w, lambda c: phi(LampVertex(c, anchor)).colouring, beta, name="transported")


def _sample_pairs(w, rng, count, positions):
    out = []
    for _ in range(count):
        pair = []
        for _ in range(2):
            lit = {q: rng.randrange(1, w.colours) for q in rng.sample(positions, rng.randint(0, 3))}
            pair.append(w.vertex(lit, rng.choice(positions)))
        out.append(tuple(pair))
    return out


def test_identity_fit_and_apply():
    w = _line(2, -10, 10)
    m = _identity_map(w)
    v = w.vertex({1: 1}, 3)
    assert leaves.aptolic_apply(m, v) == v
    fit = leaves.aptolic_qi_fit(m, _sample_pairs(w, random.Random(2), 50, list(range(-8, 9))))
    assert (fit.A, fit.B) == (1, 0)


def test_transported_fit_matches_bilipschitz_constant():
    base = graph.cycle_graph(12)
    w = wreath.WreathSpace.lamplighter(3, base)
    alpha = {0: 0, 1: 2, 2: 1}
    beta = {q: (5 * q) % 12 for q in base.vertices}
    m = _transported_map(w, alpha, beta)
    pairs = _sample_pairs(w, random.Random(3), 80, list(base.vertices))
    fit = leaves.aptolic_qi_fit(m, pairs)
    phi = wreath.transport_bilip(alpha, beta, w, w)
    assert fit.A == wreath.bilipschitz_constant(phi, pairs, w, w) and fit.A > 1


def test_apply_outside_window_and_injectivity():
    w = _line(2, -10, 10)
    m = AptolicMap(w, w, lambda c: c, lambda p: p, domain=range(-2, 3))
    with pytest.raises(UnknownVertex):
        m.alpha(w.colouring({5: 1}))
    assert len(m.table()) == 2**5
    collapse = AptolicMap(w, w, lambda c: Colouring({}), lambda p: p, domain=range(2))
    with pytest.raises(LampcoarseError, match="not injective"):
        collapse.table()
    with pytest.raises(CapExceeded):
        AptolicMap(w, w, lambda c: c, lambda p: p).table(cap=100)


def test_composition_matches_sequential_application():
    base = graph.cycle_graph(8)
    w = wreath.WreathSpace.lamplighter(2, base)
    first = _transported_map(w, {0: 1, 1: 0}, {q: (q + 1) % 8 for q in base.vertices})
    second = _transported_map(w, {0: 0, 1: 1}, {q: (3 * q) % 8 for q in base.vertices})
    both = leaves.compose(first, second)
    for values in itertools.product((0, 1), repeat=4):
        c = Colouring(zip(range(4), values))
        for p in base.vertices:
            v = LampVertex(c, p)
            assert leaves.aptolic_apply(both, v) == leaves.aptolic_apply(second, leaves.aptolic_apply(first, v))


def test_fit_pairs_with_declared_constant():
    floor = [(d1, abs(a // 2 - b // 2)) for a in range(-10, 11) for b in range(-10, 11) for d1 in [abs(a - b)]]
    fit = leaves.fit_pairs(floor, 2)
    assert fit.B == Fraction(1, 2)


# ---------------------------------------------------------------- arithmetic


def test_inclusion_examples():
    w = _line(2, -10, 10)
    ident = _identity_map(w)
    assert leaves.alpha_inclusion_test(ident, w.colouring({}), [], 0)
    r = leaves.alpha_inclusion_test(ident, w.colouring({4: 1}), [0, 1, 2], 0)
    assert r and r.exhaustive and r.checked == 8
    base = graph.cycle_graph(12)
    wc = wreath.WreathSpace.lamplighter(2, base)
    shift = _transported_map(wc, {0: 0, 1: 1}, {q: (q + 1) % 12 for q in base.vertices})
    r = leaves.alpha_inclusion_test(shift, wc.colouring({7: 1}), [0, 1, 2], 1)
    assert r and r.exhaustive and r.checked == 8


def test_inclusion_counterexample_is_reported():
    w = _line(2, -10, 10)
    spread = AptolicMap(w, w, lambda c: Colouring({q + 5: x for q, x in c.items()} | dict(c.items())), lambda p: p)
    r = leaves.alpha_inclusion_test(spread, w.colouring({}), [0], 1)
    assert not r and r.counterexample == w.colouring({0: 1})


def test_inclusion_sampling_beyond_budget():
    w = _line(3, -20, 20)
    r = leaves.alpha_inclusion_test(_identity_map(w), w.colouring({}), range(-6, 6), 0, budget=100, samples=40)
    assert r and not r.exhaustive and r.checked == 40


def test_divisibility_examples():
    base = graph.line_window(-10, 10)
    same = _identity_map(wreath.WreathSpace.lamplighter(3, base))
    assert leaves.divisibility_test(same, [0, 1], 0).divides
    four_to_two = AptolicMap(wreath.WreathSpace.lamplighter(4, base), wreath.WreathSpace.lamplighter(2, base),
                             None, lambda p: p)
    r = leaves.divisibility_test(four_to_two, [0, 1, 2], 2)
    assert r.divides and (r.n_exponent, r.m_exponent) == (3, 7)
    assert 4**3 % 1 == 0 and 2**7 % 4**3 == 0
    r = leaves.divisibility_test(four_to_two, [0, 1, 2], 0)
    assert not r.divides and r.valuations == ((2, 6, 3),)
    assert 2**3 % 4**3 != 0
    with pytest.raises(WindowError):
        leaves.divisibility_test(four_to_two, [9], 3)


def test_prime_factors():
    assert leaves.prime_factors(360) == {2: 3, 3: 2, 5: 1}
    assert leaves.prime_factors(1) == {}
