"""Command-line front end.

Every run prints a deterministic plain-text report: the resolved config,
the results, and a trailer with the verdict and exit status. Exit codes:
0 pass, 1 refuted or failed, 2 unknown or inconclusive, 3 usage error.
"""

from __future__ import annotations

import argparse
import ast
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import amenable, graph, homotopy, leaves, wreath
from .errors import CapExceeded, LampcoarseError, WindowError

PASS, FAIL, UNKNOWN, USAGE = 0, 1, 2, 3
STATUS_NAMES = {PASS: "pass", FAIL: "fail", UNKNOWN: "unknown", USAGE: "usage-error"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- config


def _int(text: str) -> int:
    return int(text)


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _literal(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise UsageError(f"cannot parse {text!r} as a Python literal") from None


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _str(text: str) -> str:
    return text


KEYS: dict[str, tuple[Callable, object]] = {
    "n": (_int, 2),
    "base": (_str, "line"),
    "compare": (_str, "auto"),
    "depth": (_int, 3),
    "radius": (_int, 4),
    "u": (_str, "{}@0"),
    "v": (_str, "{-1:1,2:1}@0"),
    "geodesic": (_str, "no"),
    "graph": (_str, "cycle-8"),
    "p1": (_literal, None),
    "p2": (_literal, None),
    "loop": (_literal, None),
    "E": (_int, 1),
    "max_len": (_int, 12),
    "lamp": (_int, 3),
    "A1": (_int, 1),
    "A2": (_int, 3),
    "mode": (_str, ""),
    "leaves": (_literal, None),
    "eps": (_int, 1),
    "L": (_int, 4),
    "eta": (_int, 2),
    "rungs": (_int, 3),
    "d": (_int, 2),
    "sizes": (_ints, (1, 2, 3, 4, 5, 6)),
    "a": (_int, 2),
    "b": (_int, 2),
    "map": (_str, "double"),
    "kappa": (_frac, Fraction(1, 2)),
    "R": (_int, 1),
    "C": (_frac, Fraction(1)),
    "balls": (_int, 3),
    "kind": (_str, "nonamenable"),
    "m": (_int, 3),
    "p": (_int, 2),
    "samples": (_int, 200),
    "n_max": (_int, 3),
    "center": (_literal, 0),
    "radii": (_ints, (1, 2, 3)),
    "margin": (_int, 2),
}

COMMANDS: dict[str, tuple[str, ...]] = {
    "build": ("n", "base", "compare", "depth", "radius"),
    "dist": ("n", "base", "u", "v", "geodesic"),
    "homotopy": ("graph", "p1", "p2", "loop", "E", "max_len"),
    "persist": ("n", "base", "lamp", "u", "v", "A1", "E", "max_len"),
    "leaves": ("n", "base", "mode", "leaves", "eps", "L", "eta", "rungs"),
    "folner": ("mode", "d", "sizes", "a", "b"),
    "kappa": ("map", "kappa", "R", "C", "balls"),
    "aptolic": ("kind", "m", "p", "n", "C", "samples"),
    "distortion": ("n_max",),
    "ends": ("graph", "center", "radii", "margin"),
    "fixtures": (),
}

SPACES = {"build": ("lamplighter", "dl", "cayley", "base")}


@dataclass
class JobConfig:
    command: str
    space: str = ""
    values: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    seed: int = 0
    window: int = 10
    cap_states: int = 100_000
    cap_heldkarp: int = wreath.HELD_KARP_CAP
    dot_out: str | None = None
    report_out: str | None = None

    def __getitem__(self, key: str):
        return self.values[key]

    def lines(self) -> list[str]:
        out = [f"command = {self.command}"]
        if self.space:
            out.append(f"space = {self.space}")
        for key in COMMANDS[self.command]:
            out.append(f"{key} = {self.raw.get(key, _show(self.values[key]))}")
        out += [
            f"seed = {self.seed}",
            f"window = {self.window}",
            f"cap_states = {self.cap_states}",
            f"cap_heldkarp = {self.cap_heldkarp}",
        ]
        return out


def _show(value) -> str:
    if isinstance(value, tuple) and all(isinstance(x, int) for x in value):
        return ",".join(map(str, value))
    return str(value)


def read_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{number}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


FLAG_KEYS = {"seed", "window", "cap_states", "cap_heldkarp"}


def make_config(args: argparse.Namespace) -> JobConfig:
    command = args.command
    raw = read_config_file(args.config) if args.config else {}
    space = ""
    for item in args.overrides:
        if "=" in item:
            key, value = item.split("=", 1)
            raw[key.strip()] = value.strip()
        elif command in SPACES and not space:
            space = item
        else:
            raise UsageError(f"unexpected argument {item!r}; use key=value")
    if command in SPACES:
        space = space or raw.pop("space", SPACES[command][0])
        if space not in SPACES[command]:
            raise UsageError(f"unknown space {space!r}; choose one of {', '.join(SPACES[command])}")
    cfg = JobConfig(command, space)
    for key in FLAG_KEYS:
        if key in raw:
            setattr(cfg, key, _parse_positive(key, raw.pop(key), allow_zero=key == "seed"))
    allowed = COMMANDS[command]
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        hint = ", ".join(allowed) or "none"
        raise UsageError(f"unknown key(s) for {command}: {', '.join(unknown)} (allowed: {hint})")
    for key in allowed:
        parser, default = KEYS[key]
        if key in raw:
            try:
                cfg.values[key] = parser(raw[key])
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"bad value for {key}: {raw[key]!r}") from None
            cfg.raw[key] = raw[key]
        else:
            cfg.values[key] = default
    for flag, key in (("seed", "seed"), ("window", "window"), ("cap_states", "cap_states"),
                      ("cap_heldkarp", "cap_heldkarp")):
        value = getattr(args, flag)
        if value is not None:
            setattr(cfg, key, _parse_positive(key, str(value), allow_zero=key == "seed"))
    cfg.dot_out = args.dot_out
    cfg.report_out = args.report_out
    return cfg


def _parse_positive(key: str, text: str, allow_zero: bool = False) -> int:
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"{key} must be an integer, got {text!r}") from None
    if value < 0 or (value == 0 and not allow_zero):
        raise UsageError(f"{key} must be positive, got {value}")
    return value


# ---------------------------------------------------------------- spaces


def base_graph(desc: str, window: int) -> graph.Graph:
    name, _, arg = desc.partition("-")
    try:
        k = int(arg) if arg else None
    except ValueError:
        k = None
    if desc == "line":
        return graph.line_window(-window, window)
    if desc == "truncated-cube":
        return graph.truncated_cube()
    if k is not None and k >= 1:
        if name == "path":
            return graph.path_graph(k)
        if name == "cycle" and k >= 3:
            return graph.cycle_graph(k)
        if name == "complete":
            return graph.complete_graph(k)
        if name == "grid":
            return graph.grid_window(k, -window, window)
        if name == "tree" and k >= 2:
            return graph.tree_window(k, window)
    raise UsageError(
        f"unknown graph {desc!r}; use line, path-K, cycle-K, complete-K, grid-D, tree-D or truncated-cube"
    )


def lamp_space(cfg: JobConfig) -> wreath.WreathSpace:
    if cfg["n"] < 2:
        raise UsageError("n must be at least 2")
    return wreath.WreathSpace.lamplighter(cfg["n"], base_graph(cfg["base"], cfg.window))


def lamp_vertex(w: wreath.WreathSpace, text: str) -> wreath.LampVertex:
    try:
        v = wreath.parse_lamp_vertex(text, w.basepoint)
    except ValueError as exc:
        raise UsageError(f"bad lamplighter vertex {text!r}: {exc}") from None
    try:
        w.check(v)
    except LampcoarseError as exc:
        raise UsageError(f"vertex {text} is not in {w.name}: {exc}") from None
    return v


# ---------------------------------------------------------------- report


class Report:
    def __init__(self, cfg: JobConfig):
        self.cfg = cfg
        self.lines: list[str] = []
        self.status = PASS

    def add(self, key: str, value) -> None:
        self.lines.append(f"{key}: {value}")

    def check(self, label: str, ok: bool) -> None:
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {label}")
        if not ok:
            self.fail()

    def fail(self) -> None:
        self.status = max(self.status, FAIL) if self.status != UNKNOWN else UNKNOWN

    def unknown(self) -> None:
        if self.status == PASS:
            self.status = UNKNOWN

    def render(self) -> str:
        out = ["# lampcoarse report", "[config]"]
        out += self.cfg.lines()
        out.append("[result]")
        out += self.lines
        out += ["[trailer]", f"status = {STATUS_NAMES[self.status]}", f"exit = {self.status}"]
        return "\n".join(out) + "\n"


# ---------------------------------------------------------------- commands


KNOWN_SHAPES = {
    (2, "complete-3"): ("truncated-cube", graph.truncated_cube),
    (2, "complete-2"): ("cycle-8", lambda: graph.cycle_graph(8)),
}


def cmd_build(cfg: JobConfig, rep: Report) -> graph.Graph:
    n = cfg["n"]
    if cfg.space == "lamplighter":
        w = lamp_space(cfg)
        g = wreath.materialize(w)
        shape = KNOWN_SHAPES.get((n, cfg["base"]))
    elif cfg.space == "dl":
        g = wreath.dl_graph(n, cfg["depth"])
        shape = None
    elif cfg.space == "cayley":
        base = cfg["base"]
        if base == "line":
            group = wreath.WreathGroup(n, (0,))
            radius = cfg["radius"]
        elif base.startswith("cycle-"):
            group = wreath.WreathGroup(n, (int(base.split("-")[1]),))
            radius = None
        else:
            raise UsageError("cayley needs base=line or base=cycle-K")
        gens = [wreath.lamp_generator(group), wreath.shift_generator(group)]
        g = wreath.cayley(group, gens, radius)
        shape = None
        if radius is None:
            w = wreath.WreathSpace.lamplighter(n, base_graph(base, cfg.window))
            shape = (f"L{n}({base})", lambda: wreath.materialize(w))
    else:
        g = base_graph(cfg["base"], cfg.window)
        shape = None
    rep.add("graph", g.name)
    rep.add("vertices", len(g))
    rep.add("edges", g.num_edges())
    rep.add("max degree", g.max_degree())
    rep.add("rim vertices", len(g.rim))
    compare = cfg["compare"]
    if compare != "auto" and compare != "none":
        shape = (compare, lambda: base_graph(compare, cfg.window))
    if shape is not None and compare != "none":
        label, build = shape
        result = graph.isomorphic(g, build())
        rep.check(f"isomorphic to {label}", bool(result))
        if not result:
            rep.add("reason", result.reason)
    return g


def cmd_dist(cfg: JobConfig, rep: Report) -> None:
    w = lamp_space(cfg)
    u, v = lamp_vertex(w, cfg["u"]), lamp_vertex(w, cfg["v"])
    rep.add("distance", wreath.lamp_distance(w, u, v, cfg.cap_heldkarp))
    if cfg["geodesic"] == "yes":
        rep.add("geodesic", " ".join(str(x) for x in wreath.lamp_geodesic(w, u, v, cfg.cap_heldkarp)))


def _path(g: graph.Graph, value, name: str) -> tuple:
    if value is None:
        raise UsageError(f"missing {name}")
    try:
        return homotopy.as_path(g, value)
    except (ValueError, LampcoarseError) as exc:
        raise UsageError(f"bad {name}: {exc}") from None


def _verdict(rep: Report, status: str) -> None:
    if status in (homotopy.YES, homotopy.CERTIFIED):
        return
    if status in (homotopy.NO, homotopy.REFUTED):
        rep.fail()
    else:
        rep.unknown()


def _script_lines(rep: Report, script) -> None:
    for k, (i, j, xi) in enumerate(script, 1):
        rep.add(f"move {k}", f"replace [{i}..{j}] by {' '.join(map(str, xi))}")


def cmd_homotopy(cfg: JobConfig, rep: Report) -> None:
    g = base_graph(cfg["graph"], cfg.window)
    if cfg["loop"] is not None:
        loop = _path(g, cfg["loop"], "loop")
        verdict = homotopy.is_coarsely_trivial(g, loop, cfg["E"], cfg["max_len"], cfg.cap_states)
    else:
        p1, p2 = _path(g, cfg["p1"], "p1"), _path(g, cfg["p2"], "p2")
        if (p1[0], p1[-1]) != (p2[0], p2[-1]):
            raise UsageError("p1 and p2 must share their endpoints")
        verdict = homotopy.coarse_homotopic(g, p1, p2, cfg["E"], cfg["max_len"], cfg.cap_states)
    rep.add("verdict", verdict.status)
    rep.add("states", verdict.states)
    rep.add("detail", verdict.detail)
    _script_lines(rep, verdict.script)
    _verdict(rep, verdict.status)


def cmd_persist(cfg: JobConfig, rep: Report) -> None:
    w = lamp_space(cfg)
    if w.base.rim:
        raise UsageError("persist needs a finite base such as path-7")
    u, v = lamp_vertex(w, cfg["u"]), lamp_vertex(w, cfg["v"])
    g = wreath.materialize(w)
    cov = homotopy.lamp_io_covering(w, cfg["lamp"], cfg["A1"])
    path = wreath.lamp_geodesic(w, u, v)
    start, end = homotopy.outer_part(cov, u), homotopy.outer_part(cov, v)
    proj = homotopy.nerve_projection(cov, path, start, end)
    inner = [tag for tag in proj.reduced if tag[0] == "I"]
    rep.add("geodesic length", len(path) - 1)
    rep.add("reduced nerve path", " ".join(homotopy._show(t) for t in proj.reduced))
    if not inner:
        raise UsageError("the geodesic crosses no inner part; choose u, v differing at the lamp")
    target = cov.members(inner[0], g)
    rep.add("target", f"{homotopy._show(inner[0])} ({len(target)} vertices)")
    cert = homotopy.persistent_intersection(
        g, path, target, cfg["E"], cfg["max_len"], cfg.cap_states, cov, start, end
    )
    rep.add("verdict", cert.verdict)
    for note in cert.notes:
        rep.add("note", note)
    if cert.witness is not None:
        rep.add("witness", " ".join(map(str, cert.witness)))
        _script_lines(rep, cert.script)
    _verdict(rep, cert.verdict)


def cmd_leaves(cfg: JobConfig, rep: Report) -> None:
    w = lamp_space(cfg)
    mode = cfg["mode"] or "ladder"
    if mode == "square":
        if cfg["leaves"] is None or len(cfg["leaves"]) != 4:
            raise UsageError("square mode needs leaves=[{...},{...},{...},{...}]")
        cs = [w.colouring(c) for c in cfg["leaves"]]
        result = leaves.detect_square(w, cs, cfg["eps"], cfg["L"])
        if result:
            rep.add("square", "yes")
            rep.add("base colouring", result.base)
            rep.add("first increment", result.first)
            rep.add("second increment", result.second)
            rep.add("support balls", f"{result.first_ball} {result.second_ball} at distance {result.ball_distance}")
        else:
            rep.add("square", f"refuted at {result.condition}: {result.detail}")
            rep.fail()
    elif mode == "ladder":
        P, Q, u, v = build_ladder(w, cfg["rungs"], cfg["L"])
        report = leaves.ladder_check(w, P, Q, 1, cfg["L"], cfg["eta"], u, v)
        rep.add("rungs", len(P))
        rep.add("common difference", report.difference)
        rep.add("arrow distance", report.arrow_distance)
        rep.check(f"arrow bound {report.arrow_distance} <= {report.bound}", report.ok)
    else:
        raise UsageError("mode must be square or ladder")


def build_ladder(w: wreath.WreathSpace, rungs: int, L: int, anchor=0, offset: int = 0):
    """A (1, L)-ladder: rung j lights lamps b_1..b_j, the Q side also lights the anchor."""
    C = w.colouring
    cur = C({anchor - 2 * L - offset: 1})
    P, Q = [], []
    for j in range(rungs):
        cur = C({**cur.as_dict(), anchor + L + offset + j * L: 1})
        P.append(cur)
        Q.append(C({**cur.as_dict(), anchor: 1}))
    return P, Q, wreath.LampVertex(P[0], anchor + 1), wreath.LampVertex(P[-1], anchor - 1)


def cmd_folner(cfg: JobConfig, rep: Report) -> None:
    mode = cfg["mode"] or "boxes"
    if mode == "boxes":
        cert = amenable.folner_boxes(cfg["d"], cfg["sizes"])
        for e in cert.entries:
            rep.add(e.label, f"|F|={e.size} |dF|={e.boundary} formula={e.predicted} ratio={e.ratio}")
        rep.check("boundary equals 2 d n^(d-1)", cert.exact)
    elif mode == "wreath":
        a, b = cfg["a"], cfg["b"]
        line = graph.line_window(-cfg.window, cfg.window)
        w = wreath.WreathSpace(line, line, 0)
        r = amenable.folner_wreath(w, range(a), range(b))
        rep.add("|F|", f"{r.size} (formula |B| |A|^|B| = {r.size_formula})")
        rep.add("|dF| measured", r.boundary)
        rep.add("|B| |dA| + |dB|", r.quoted_formula)
        rep.add("|B| |A|^(|B|-1) |dA| + |A|^|B| |dB|", r.corrected_formula)
        rep.check("size formula", r.size == r.size_formula)
        rep.check("|dF| = |B| |dA| + |dB|", r.quoted_matches)
        rep.add("corrected count matches", "yes" if r.corrected_matches else "no")
    else:
        raise UsageError("mode must be boxes or wreath")


def kappa_map(name: str, window: int) -> amenable.QIMap:
    src = graph.line_window(-window, window)
    if name == "double":
        return amenable.QIMap(src, graph.line_window(-2 * window, 2 * window), lambda k: 2 * k, 2, 0, name="k->2k")
    if name == "identity":
        return amenable.QIMap(src, src, lambda k: k, name="identity")
    if name == "floor":
        return amenable.QIMap(src, graph.line_window(-((window + 1) // 2), window // 2), lambda k: k // 2, 2, 1,
                              name="k->floor(k/2)")
    raise UsageError("map must be double, identity or floor")


def cmd_kappa(cfg: JobConfig, rep: Report) -> None:
    f = kappa_map(cfg["map"], cfg.window)
    r = amenable.quasi_kappa_check(f, cfg["kappa"], cfg["R"], cfg["C"], cfg["balls"], seed=cfg.seed)
    rep.add("map", f.name)
    rep.add("thick sets", f"{len(r.rows)}{' (sampled)' if r.sampled else ''}")
    rep.add("worst residual / boundary", r.worst)
    rep.check(f"quasi-{r.kappa}-to-one with C={r.C}", r.passed)


def cmd_aptolic(cfg: JobConfig, rep: Report) -> None:
    if cfg["kind"] == "nonamenable":
        # the toward-end map of the (n+1)-regular tree is n-to-one
        depth = min(max(cfg.window, 4), 5)
        t = graph.tree_window(cfg["n"] + 1, depth)
        f = amenable.toward_end_map(t, cfg["n"] + 1)
        amap = amenable.aptolic_nonamenable(cfg["m"], cfg["p"], cfg["n"], t, f, int(cfg["C"]))
        vs = amenable.sample_tree_vertices(amap, 2 * cfg["samples"], depth - 3, 3, cfg.seed)
        r = amenable.verify_nonamenable(amap, list(zip(vs[::2], vs[1::2])))
        rep.add("source", amap.source.name)
        rep.add("target", amap.target.name)
        rep.add("pairs", r.pairs)
        rep.check("support inclusion (first)", r.first_inclusion)
        rep.check("support inclusion (second)", r.second_inclusion)
        rep.check(f"upper ratio {r.max_upper} <= {r.upper_bound}", r.max_upper <= r.upper_bound)
        rep.check(f"lower ratio {r.max_lower} <= {r.lower_bound}", r.max_lower <= r.lower_bound)
    elif cfg["kind"] == "amenable":
        amap = pairs_to_points_map(cfg.window)
        r = amenable.verify_amenable(amap, 3, cfg["samples"], cfg.seed)
        rep.add("source", amap.source.name)
        rep.add("target", amap.target.name)
        rep.check("alpha bijective on the piece window", r.bijective)
        rep.check(f"beta fit B={r.qi.fit.B} within declared {r.qi.declared[1]}", r.qi.ok)
        rep.add("Hausdorff support distance", r.hausdorff)
    else:
        raise UsageError("kind must be nonamenable or amenable")


def pairs_to_points_map(window: int) -> leaves.AptolicMap:
    """L_2(Z) -> L_4(Z): the pair {2k, 2k+1} becomes the point k through (x, y) -> x + 2y."""
    half = max(window // 2, 2)
    X = graph.line_window(-2 * half, 2 * half - 1)
    Y = graph.line_window(-half, half - 1)
    P = [(2 * k, 2 * k + 1) for k in range(-half, half)]
    Q = [(k,) for k in range(-half, half)]
    beta = amenable.QIMap(X, Y, lambda j: j // 2, 2, 1, name="j->floor(j/2)")
    return amenable.aptolic_amenable(X, Y, P, Q, {p: (p[0] // 2,) for p in P}, beta,
                                     lambda v: (v[0] + 2 * v[1],), 2)


def cmd_distortion(cfg: JobConfig, rep: Report) -> None:
    a, t = wreath.lamp_generator(wreath.ZWRZ), wreath.shift_generator(wreath.ZWRZ)
    ratios = []
    for n in range(1, cfg["n_max"] + 1):
        e = wreath.distortion_element(n)
        standard = wreath.word_length(e, [a, t], 8 * n + 4, cfg.cap_states * 10)
        other = wreath.word_length(e, wreath.commutator_generators(), 8 * n * n + 8, cfg.cap_states * 10)
        if standard is None or other is None:
            rep.add(f"n={n}", "length exceeds the search cap")
            rep.unknown()
            return
        ratio = Fraction(other, standard)
        ratios.append(ratio)
        rep.add(f"n={n}", f"length {{a,t}}={standard} length {{[a,t],t}}={other} ratio={ratio}")
    rep.check("ratio non-decreasing in n", all(x <= y for x, y in zip(ratios, ratios[1:])))


def cmd_ends(cfg: JobConfig, rep: Report) -> None:
    g = base_graph(cfg["graph"], cfg.window)
    center = cfg["center"]
    if center not in g:
        raise UsageError(f"center {center!r} is not a vertex of {g.name}")
    try:
        reports = graph.ends_profile(g, center, cfg["radii"], cfg["margin"])
    except WindowError as exc:
        rep.add("ends", str(exc))
        rep.unknown()
        return
    for r in reports:
        rep.add(f"r={r.radius}", f"components={r.components} deep={r.deep_components} sizes={list(r.sizes)}")


def cmd_fixtures(cfg: JobConfig, rep: Report) -> None:
    for label, ok in run_fixtures():
        rep.check(label, ok)


def run_fixtures() -> list[tuple[str, bool]]:
    """Known small values, each recomputed from scratch."""
    out = []
    k2 = graph.complete_graph(2)
    out.append(("(K2, o) wr K2 is the 8-cycle",
                bool(graph.isomorphic(wreath.materialize(wreath.WreathSpace(k2, k2, 0)), graph.cycle_graph(8)))))
    l2k3 = wreath.materialize(wreath.WreathSpace.lamplighter(2, graph.complete_graph(3)))
    out.append(("L2(K3) is the truncated cube", bool(graph.isomorphic(l2k3, graph.truncated_cube()))))
    group = wreath.WreathGroup(2, (3,))
    cay = wreath.cayley(group, [wreath.lamp_generator(group), wreath.shift_generator(group)])
    out.append(("Cayley graph of Z2 wr Z3 is L2(C3)",
                bool(graph.isomorphic(cay, wreath.materialize(wreath.WreathSpace.lamplighter(2, graph.cycle_graph(3)))))))
    out.append(("box boundary 16 for d=2, n=4", amenable.folner_boxes(2, [4]).entries[0].boundary == 16))
    out.append(("box boundary 54 for d=3, n=3", amenable.folner_boxes(3, [3]).entries[0].boundary == 54))
    t3 = graph.tree_window(3, 3)
    out.append(("single tree vertex has boundary d", amenable.tree_subtree_boundary(t3, [()], 3).boundary == 3))
    t4 = graph.tree_window(4, 5)
    f = amenable.toward_end_map(t4, 4)
    out.append(("toward-end map on T4 is 3-to-one", set(amenable.interior_fibre_sizes(f).values()) == {3}))
    amap = amenable.aptolic_nonamenable(3, 2, 3, t4, f, 1)
    vs = amenable.sample_tree_vertices(amap, 100, 2, 3, 0)
    r = amenable.verify_nonamenable(amap, list(zip(vs[::2], vs[1::2])))
    out.append(("c-bar map: inclusions and ratios within 3 and 7", r.ok))
    w = wreath.WreathSpace.lamplighter(2, graph.line_window(-30, 30))
    sw = homotopy.stringy_witness(w, w.vertex({}, 0), w.vertex({10: 1}, 20), 1, 3)
    out.append(("inner part diameter within (1+4A1) deg^(2A1) = 20", sw.diameter <= sw.bound == 20))
    W = wreath.WreathSpace.lamplighter(2, graph.line_window(-20, 20))
    c1, c2 = W.colouring({-8: 1}), W.colouring({8: 1})
    sq = leaves.detect_square(W, [W.colouring({}), c1, wreath.colour_add(c1, c2, 2), c2], 1, 10)
    out.append(("typical square decomposes as (0, c1, c2)",
                bool(sq) and (sq.base, sq.first, sq.second) == (W.colouring({}), c1, c2)))
    P, Q, u, v = build_ladder(W, 3, 4)
    out.append(("ladder arrow bound d(p, q) <= 6 eta", leaves.ladder_check(W, P, Q, 1, 4, 2, u, v).ok))
    line = graph.line_window(-30, 30)
    stair = amenable.QIMap(line, line, lambda k: 2 * (k // 2), 1, 1, name="staircase")
    out.append(("staircase map is a (1,1)-quasi-isometry", amenable.qi_verify(stair).ok))
    return out


HANDLERS = {
    "build": cmd_build,
    "dist": cmd_dist,
    "homotopy": cmd_homotopy,
    "persist": cmd_persist,
    "leaves": cmd_leaves,
    "folner": cmd_folner,
    "kappa": cmd_kappa,
    "aptolic": cmd_aptolic,
    "distortion": cmd_distortion,
    "ends": cmd_ends,
    "fixtures": cmd_fixtures,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lampcoarse", description="Finite-scale coarse geometry of lamplighter graphs.")
    parser.add_argument("command", choices=sorted(HANDLERS))
    parser.add_argument("overrides", nargs="*", help="key=value settings (build also takes a space word)")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--window", type=int, help="window radius for infinite graphs")
    parser.add_argument("--cap-states", type=int, dest="cap_states")
    parser.add_argument("--cap-heldkarp", type=int, dest="cap_heldkarp")
    parser.add_argument("--dot-out", dest="dot_out")
    parser.add_argument("--report-out", dest="report_out")
    return parser


def run(cfg: JobConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    rep = Report(cfg)
    try:
        g = HANDLERS[cfg.command](cfg, rep)
    except CapExceeded as exc:
        rep.add("error", f"cap exceeded: {exc}")
        rep.unknown()
        g = None
    except WindowError as exc:
        rep.add("error", f"inconclusive: {exc}")
        rep.unknown()
        g = None
    if cfg.dot_out:
        if g is None:
            raise UsageError("--dot-out is only available for build")
        Path(cfg.dot_out).write_text(graph.to_dot(g))
    text = rep.render()
    out.write(text)
    if cfg.report_out:
        Path(cfg.report_out).write_text(text)
    return rep.status


def main(argv=None) -> int:
    try:
        args = make_parser().parse_intermixed_args(argv)
        cfg = make_config(args)
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except (LampcoarseError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
