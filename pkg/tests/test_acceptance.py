"""Acceptance criteria 1-12, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines are collected in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import random
import time
from fractions import Fraction

from lampcoarse import amenable, graph, homotopy, leaves, wreath
from lampcoarse.cli import build_ladder


def _bfs_all_pairs_agree(w):
    g = wreath.materialize(w)
    mismatches = 0
    for u in g.vertices:
        row = graph.distances_from(g, u)
        for v in g.vertices:
            if wreath.lamp_distance(w, u, v) != row[v]:
                mismatches += 1
    return g, mismatches


def test_criterion_1_distance_formula_matches_bfs(verdict):
    t0 = time.perf_counter()
    sizes, bad = [], 0
    for n, k in ((2, 3), (3, 2)):
        w = wreath.WreathSpace.lamplighter(n, graph.path_graph(k))
        g, mismatches = _bfs_all_pairs_agree(w)
        bad += mismatches
        sizes.append((len(g), n**k * k))
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and all(a == b for a, b in sizes) and elapsed < 30
    verdict(1, "lamp_distance equals BFS on all pairs of L2(P3) and L3(P2)", ok,
            f"sizes {sizes}, mismatches {bad}, {elapsed:.1f}s")


def test_criterion_2_fixture_graphs(verdict):
    k2 = graph.complete_graph(2)
    two_edges = wreath.materialize(wreath.WreathSpace(k2, k2, 0))
    c8 = bool(graph.isomorphic(two_edges, graph.cycle_graph(8)))
    g = wreath.materialize(wreath.WreathSpace.lamplighter(2, graph.complete_graph(3)))
    shape = (len(g), g.num_edges(), {g.degree(v) for v in g.vertices})
    cube = bool(graph.isomorphic(g, graph.truncated_cube()))
    ok = c8 and shape == (24, 36, {3}) and cube
    verdict(2, "(K2,o) wr K2 = C8 and L2(K3) = truncated cube", ok,
            f"C8 {c8}, (|V|, |E|, degrees) {shape}, truncated cube {cube}")


def test_criterion_3_cayley_correspondence(verdict):
    group = wreath.WreathGroup(2, (3,))
    cay = wreath.cayley(group, [wreath.lamp_generator(group), wreath.shift_generator(group)])
    lamp = wreath.materialize(wreath.WreathSpace.lamplighter(2, graph.cycle_graph(3)))
    result = graph.isomorphic(cay, lamp)
    verdict(3, "Cayl(Z2 wr Z3, Z2 u {t}) = L2(C3)", bool(result), result.reason)


def test_criterion_4_diestel_leader_embedding(verdict):
    group = wreath.WreathGroup(2, (0,))
    a, t = wreath.lamp_generator(group), wreath.shift_generator(group)
    cay = wreath.cayley(group, [t, wreath.wreath_mul(a, t)], radius=4)
    psi = {x: wreath.psi_embed(x) for x in cay.vertices}
    injective = len(set(psi.values())) == len(cay)
    adjacent = all(wreath.strong_product_adjacent(psi[x], psi[y]) for x, y in cay.edges())
    levels = all(left[0] + right[0] == 0 for left, right in psi.values())
    dl_ball = set(wreath.dl_graph(2, 4).vertices) == set(psi.values())
    ok = injective and adjacent and levels and dl_ball
    verdict(4, "psi_embed injective, adjacency preserving, levels sum to 0 on a radius-4 ball", ok,
            f"{len(cay)} elements, injective {injective}, adjacent {adjacent}, levels {levels}, "
            f"image is the DL(2) ball {dl_ball}")


WREATH_BOXES = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 2)]


def test_criterion_5_folner_exactness(verdict):
    boxes = {d: amenable.folner_boxes(d, range(1, 7)) for d in (1, 2, 3)}
    boxes_ok = all(cert.exact for cert in boxes.values())
    line = graph.line_window(-10, 10)
    w = wreath.WreathSpace(line, line, 0)
    rows = [(a, b, amenable.folner_wreath(w, range(a), range(b))) for a, b in WREATH_BOXES]
    mismatched = [f"|A|={a},|B|={b}: {r.boundary} vs {r.quoted_formula}" for a, b, r in rows if not r.quoted_matches]
    sizes_ok = all(r.size == r.size_formula for _, _, r in rows)
    ok = boxes_ok and sizes_ok and not mismatched
    detail = f"boxes exact {boxes_ok}, wreath sizes {sizes_ok}, |dF| = |B||dA| + |dB| fails on " + (
        "; ".join(mismatched) if mismatched else "none")
    verdict(5, "Følner boundary formulas for boxes and line-window wreath sets", ok, detail)


def test_criterion_6_tree_boundary(verdict):
    rng = random.Random(6)
    checked = failures = 0
    for d in (3, 4):
        t = graph.tree_window(d, 6)
        for _ in range(100):
            s = amenable.random_subtree(t, rng.randint(1, 25), rng)
            r = amenable.tree_subtree_boundary(t, s, d)
            checked += 1
            failures += r.boundary != r.bound
    verdict(6, "|dT| = (d-2)|T| + 2 on random subtrees of T3 and T4", failures == 0,
            f"{checked} subtrees, {failures} failures")


# (lamp, arrow of u, arrow of v) with both arrows at distance >= 4 from the lamp,
# so neither endpoint lies in the inner part and the certificate must come from the nerve
PERSIST_CERTIFIED = [(0, 4, 4), (0, 6, 5), (1, 5, 5), (1, 6, 5), (2, 6, 6),
                     (4, 0, 0), (5, 0, 1), (5, 1, 1), (6, 2, 2), (6, 0, 1)]
PERSIST_SPIKED = [(1, 5, 5), (2, 6, 6), (4, 0, 0), (6, 1, 1)]


def test_criterion_7_persistence_cross_validation(verdict):
    t0 = time.perf_counter()
    w = wreath.WreathSpace.lamplighter(2, graph.path_graph(7))
    g = wreath.materialize(w)
    metric = graph.Metric(g)
    agree = disagree = 0
    for p, a, b in PERSIST_CERTIFIED:
        u, v = w.vertex({}, a), w.vertex({p: 1}, b)
        path = wreath.lamp_geodesic(w, u, v)
        cov = homotopy.lamp_io_covering(w, p, 1)
        start, end = homotopy.outer_part(cov, u), homotopy.outer_part(cov, v)
        proj = homotopy.nerve_projection(cov, path, start, end)
        inner = next(tag for tag in proj.reduced if tag[0] == "I")
        target = cov.members(inner, g)
        cert = homotopy.persistent_intersection(g, path, target, 1, len(path), 10**5, cov, start, end, metric)
        search = homotopy.avoiding_path_search(g, path, target, 1, len(path) + 3, 10**5, metric)
        from_nerve = inner in cert.nerve_path and u not in target and v not in target
        if cert.verdict == homotopy.CERTIFIED and from_nerve and search.status == homotopy.NO and search.closed:
            agree += 1
        else:
            disagree += 1
    for p, a, b in PERSIST_SPIKED:
        u, v = w.vertex({}, a), w.vertex({p: 1}, b)
        path = wreath.lamp_geodesic(w, u, v)
        first = path[0]
        spike = wreath.LampVertex(first.colouring.updated(first.arrow, 1), first.arrow)
        spiked = (first, spike) + tuple(path)
        cov = homotopy.lamp_io_covering(w, p, 1)
        start, end = homotopy.outer_part(cov, u), homotopy.outer_part(cov, v)
        cert = homotopy.persistent_intersection(g, spiked, {spike}, 1, len(spiked), 10**5, cov, start, end, metric)
        replays = (cert.witness is not None
                   and homotopy.replay(g, spiked, cert.script, 1, metric) == cert.witness
                   and spike not in cert.witness)
        if cert.verdict == homotopy.REFUTED and replays:
            agree += 1
        else:
            disagree += 1
    elapsed = time.perf_counter() - t0
    ok = disagree == 0 and agree >= 10 and elapsed < 300
    verdict(7, "nerve certificate and exhaustive search agree on L2(P7), A1 = E = 1", ok,
            f"{agree} agree, {disagree} disagree, {elapsed:.1f}s")


def _constructed_squares(count):
    rng = random.Random(8)
    W = wreath.WreathSpace.lamplighter(3, graph.line_window(-24, 24))
    out = []
    for k in range(count):
        eps, L, width = (1, 10, 1) if k % 2 == 0 else (3, 12, 2)
        x1 = rng.randint(-18, -6)
        x2 = x1 + L + width + rng.randint(0, 4)
        a = W.colouring({x1 + i: rng.randint(1, 2) for i in range(width)})
        b = W.colouring({x2 + i: rng.randint(1, 2) for i in range(width)})
        c = W.colouring({q: rng.randint(1, 2) for q in rng.sample(range(-20, 21), rng.randint(0, 4))})
        corners = [c, wreath.colour_add(c, a, 3), wreath.colour_add(wreath.colour_add(c, a, 3), b, 3),
                   wreath.colour_add(c, b, 3)]
        out.append((W, corners, eps, L, (c, a, b)))
    return out


def test_criterion_8_squares_and_ladders(verdict):
    recovered = 0
    squares = _constructed_squares(20)
    for W, corners, eps, L, expected in squares:
        sq = leaves.detect_square(W, corners, eps, L)
        recovered += bool(sq) and (sq.base, sq.first, sq.second) == expected
    W = wreath.WreathSpace.lamplighter(2, graph.line_window(-40, 40))
    ladders_ok = 0
    cases = [(rungs, L, anchor, offset) for rungs, L in ((2, 4), (3, 4), (3, 5), (4, 5), (4, 6))
             for anchor, offset in ((0, 0), (-3, 2))]
    for rungs, L, anchor, offset in cases:
        P, Q, u, v = build_ladder(W, rungs, L, anchor, offset)
        report = leaves.ladder_check(W, P, Q, 1, L, 2, u, v)
        ladders_ok += report.ok and report.arrow_distance <= 6 * 2
    ok = recovered == len(squares) and ladders_ok == len(cases)
    verdict(8, "detect_square recovers (c, a, b) and ladders satisfy d(p, q) <= 6 eta", ok,
            f"{recovered}/{len(squares)} squares, {ladders_ok}/{len(cases)} ladders")


def test_criterion_9_nonamenable_aptolic_map(verdict):
    t0 = time.perf_counter()
    t4 = graph.tree_window(4, 5)
    f = amenable.toward_end_map(t4, 4)
    amap = amenable.aptolic_nonamenable(3, 2, 3, t4, f, 1)
    vs = amenable.sample_tree_vertices(amap, 400, 2, 3, 9)
    r = amenable.verify_nonamenable(amap, list(zip(vs[::2], vs[1::2])))
    elapsed = time.perf_counter() - t0
    ok = (r.pairs == 200 and r.first_inclusion and r.second_inclusion
          and r.max_upper <= 3 and r.max_lower <= 7 and elapsed < 120)
    verdict(9, "c-bar map for (m, p, n) = (3, 2, 3): inclusions and ratios in [1/7, 3]", ok,
            f"{r.pairs} pairs, max d2/d1 {r.max_upper}, max d1/d2 {r.max_lower}, {elapsed:.1f}s")


def test_criterion_10_quasi_kappa(verdict):
    src = graph.line_window(-20, 20)
    double = amenable.QIMap(src, graph.line_window(-40, 40), lambda k: 2 * k, 2, 0)
    half = amenable.quasi_kappa_check(double, Fraction(1, 2), 1, 1)
    one = amenable.quasi_kappa_check(double, 1, 1, 1)
    ident = amenable.quasi_kappa_check(amenable.QIMap(src, src, lambda k: k), 1, 1, 1)
    ok = half.passed and not one.passed and ident.passed and ident.worst == 0
    verdict(10, "k -> 2k is quasi-1/2-to-one, not quasi-1-to-one; identity is quasi-1-to-one", ok,
            f"worst residual/boundary: 1/2 -> {half.worst}, 1 -> {one.worst}, identity -> {ident.worst}")


def test_criterion_11_distortion_trend(verdict):
    a, t = wreath.lamp_generator(wreath.ZWRZ), wreath.shift_generator(wreath.ZWRZ)
    ratios = []
    for n in (1, 2, 3):
        e = wreath.distortion_element(n)
        standard = wreath.word_length(e, [a, t], 8 * n + 4)
        other = wreath.word_length(e, wreath.commutator_generators(), 8 * n * n + 8)
        ratios.append(Fraction(other, standard) if standard and other else None)
    ok = None not in ratios and all(x <= y for x, y in zip(ratios, ratios[1:]))
    verdict(11, "word-length ratio {[a,t], t} / {a, t} is non-decreasing for n = 1, 2, 3", ok,
            "ratios " + ", ".join(str(r) for r in ratios))


def _two_lamp_loop(w):
    loop = [w.vertex({}, 0)]

    def walk(to):
        cur = loop[-1]
        step = 1 if to > cur.arrow else -1
        loop.extend(wreath.LampVertex(cur.colouring, x) for x in range(cur.arrow + step, to + step, step))

    def flip():
        cur = loop[-1]
        loop.append(wreath.LampVertex(cur.colouring.updated(cur.arrow, 1 - cur.colouring[cur.arrow]), cur.arrow))

    for _ in range(2):
        walk(3)
        flip()
        walk(0)
        flip()
    return loop


def test_criterion_12_loop_not_coarsely_trivial(verdict):
    w = wreath.WreathSpace.lamplighter(2, graph.path_graph(4))
    g = wreath.materialize(w)
    Z = homotopy.two_lamp_subgraph(g, 0, 3)
    loop = _two_lamp_loop(w)
    zm = graph.Metric(Z)
    lipschitz = all(
        zm(homotopy.two_lamp_retraction(x, 0, 3), homotopy.two_lamp_retraction(y, 0, 3)) <= 1 for x, y in g.edges()
    )
    small = homotopy.is_coarsely_trivial(Z, loop, 2, 20, 10**6)
    large = homotopy.is_coarsely_trivial(Z, loop, 8, 16, 10**6)
    ok = (len(Z), Z.num_edges()) == (16, 16) and lipschitz and small.status == homotopy.NO and large.status == homotopy.YES
    verdict(12, "the 16-step loop in Z is not 2-coarsely trivial but is 8-coarsely trivial", ok,
            f"Z has {len(Z)} vertices, retraction 1-Lipschitz {lipschitz}, E=2: {small.status} "
            f"({small.states} paths, closed), E=8: {large.status}")


if __name__ == "__main__":
    import sys

    failed = 0

    def record(number, label, ok, detail=""):
        global failed
        print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {label}" + (f" ({detail})" if detail else ""))
        failed += not ok

    criteria = [fn for name, fn in globals().items() if name.startswith("test_criterion_")]
    for fn in sorted(criteria, key=lambda fn: int(fn.__name__.split("_")[2])):
        fn(record)
    sys.exit(1 if failed else 0)
