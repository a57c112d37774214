"""Exact planar arrangement of the explicit line family.

The family consists of 2d+2 affine lines in the chart z = 1,

    R_k: (2d+1-k) x + k y - k (2d+1-k) = 0,      k = 0, ..., 2d+1,

split into a numerator group (k <= d, side "P") and a denominator group
(k > d, side "Q").  Optionally the last line is replaced by the parallel
translate (2d+1) y + epsilon = 0.

All incidence computations here run over arbitrary-precision rationals
(`fractions.Fraction`), so vertex counts, face structure and barycenter
signs are exact.  Floating point only enters downstream (critical points,
curve tracing).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import DegenerateIntersectionError, GenericityError, InvalidParameterError
from .jsonio import frac_str

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Line:
    """Affine line a*x + b*y + c = 0 with its family index and side tag."""

    a: Fraction
    b: Fraction
    c: Fraction
    k: int
    side: str  # "P" or "Q"

    def eval_at(self, x, y):
        return self.a * x + self.b * y + self.c

    def direction(self) -> tuple[Fraction, Fraction]:
        return (self.b, -self.a)


@dataclass(frozen=True)
class Vertex:
    point: Point
    lines: tuple[int, int]  # indices into Arrangement.lines, sorted


@dataclass(frozen=True)
class Edge:
    """Maximal piece of a line between consecutive vertices.

    `v0`/`v1` are vertex ids; None marks an unbounded ray end.
    """

    line: int
    v0: int | None
    v1: int | None


@dataclass(frozen=True)
class Face:
    """Bounded cell of the subdivision, stored counterclockwise."""

    vertex_cycle: tuple[int, ...]
    edge_cycle: tuple[int, ...]
    line_ids: frozenset[int]
    barycenter: Point
    sign_p: int
    sign_q: int
    face_class: str  # "P", "Q" or "mixed"


@dataclass
class Arrangement:
    d: int
    epsilon: Fraction
    lines: list[Line]
    vertices: list[Vertex]
    edges: list[Edge]
    bounded_faces: list[Face]
    # edge id -> ids of bounded faces flanking it (0, 1 or 2 entries)
    edge_faces: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def p_lines(self) -> list[Line]:
        return [l for l in self.lines if l.side == "P"]

    @property
    def q_lines(self) -> list[Line]:
        return [l for l in self.lines if l.side == "Q"]

    def faces_sharing_edge(self, f1: int, f2: int) -> list[int]:
        """Edge ids common to two bounded faces."""
        e1 = set(self.bounded_faces[f1].edge_cycle)
        return [e for e in self.bounded_faces[f2].edge_cycle if e in e1]


def build_lines(d: int, epsilon: Fraction = Fraction(0)) -> list[Line]:
    """Construct the 2d+2 lines of the family for the given degree.

    With epsilon != 0 the last denominator line becomes (2d+1) y + epsilon,
    which removes the reducible fiber at value 1 while keeping the family
    generic for small epsilon.
    """
    if d < 1:
        raise InvalidParameterError(f"degree must be >= 1, got {d}")
    epsilon = Fraction(epsilon)
    lines = []
    for k in range(2 * d + 2):
        a = Fraction(2 * d + 1 - k)
        b = Fraction(k)
        c = Fraction(-k * (2 * d + 1 - k))
        if k == 2 * d + 1 and epsilon != 0:
            a, b, c = Fraction(0), Fraction(2 * d + 1), epsilon
        side = "P" if k <= d else "Q"
        lines.append(Line(a, b, c, k, side))
    return lines


def intersect(l1: Line, l2: Line) -> Point:
    """Exact crossing point of two non-parallel lines."""
    det = l1.a * l2.b - l2.a * l1.b
    if det == 0:
        raise DegenerateIntersectionError(
            f"lines k={l1.k} and k={l2.k} are parallel"
        )
    x = (l1.b * l2.c - l2.b * l1.c) / det
    y = (l2.a * l1.c - l1.a * l2.c) / det
    return (x, y)


def genericity_check(arr_or_lines) -> dict:
    """Report parallel pairs and concurrent triples of a line family.

    Returns {"parallel_pairs": [...], "concurrent_triples": [...]}; both
    lists empty exactly when the family is in general position.  Accepts an
    Arrangement or a bare sequence of lines (the latter is what the builder
    uses before any Arrangement can exist).
    """
    lines = arr_or_lines.lines if isinstance(arr_or_lines, Arrangement) else list(arr_or_lines)
    parallel = []
    points: dict[Point, set[int]] = {}
    for i, j in combinations(range(len(lines)), 2):
        li, lj = lines[i], lines[j]
        if li.a * lj.b - lj.a * li.b == 0:
            parallel.append((li.k, lj.k))
            continue
        pt = intersect(li, lj)
        points.setdefault(pt, set()).update((i, j))
    triples = []
    for pt, ids in points.items():
        if len(ids) >= 3:
            for trip in combinations(sorted(lines[i].k for i in ids), 3):
                triples.append(trip)
    return {"parallel_pairs": parallel, "concurrent_triples": sorted(triples)}


# --- angular order of exact directions -------------------------------------

def _dir_half(d: tuple[Fraction, Fraction]) -> int:
    """0 for angles in [0, pi), 1 for [pi, 2pi), measured from +x axis."""
    dx, dy = d
    if dy > 0 or (dy == 0 and dx > 0):
        return 0
    return 1

def _dir_cmp(d1: tuple[Fraction, Fraction], d2: tuple[Fraction, Fraction]) -> int:
    h1, h2 = _dir_half(d1), _dir_half(d2)
    if h1 != h2:
        return -1 if h1 < h2 else 1
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return 0


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


def _polygon_area2(points: list[Point]) -> Fraction:
    """Twice the signed area of a closed polygon (shoelace)."""
    total = Fraction(0)
    for (x1, y1), (x2, y2) in zip(points, points[1:] + points[:1]):
        total += x1 * y2 - x2 * y1
    return total


def point_in_face(arr: Arrangement, face: Face, point: Point) -> bool:
    """Exact strict interior test against a (convex, ccw) bounded face."""
    cyc = face.vertex_cycle
    for i in range(len(cyc)):
        x1, y1 = arr.vertices[cyc[i]].point
        x2, y2 = arr.vertices[cyc[(i + 1) % len(cyc)]].point
        if (x2 - x1) * (point[1] - y1) - (y2 - y1) * (point[0] - x1) <= 0:
            return False
    return True


def build_arrangement(lines: list[Line]) -> Arrangement:
    """Compute the full incidence structure induced by the lines.

    Vertices are all pairwise crossings; edges the maximal segments and rays
    between consecutive crossings along each line; bounded faces are found
    by counterclockwise half-edge traversal of the segment graph.  Raises
    GenericityError if three lines meet in a point (the caller may retry
    with a perturbed family).
    """
    report = genericity_check(lines)
    if report["parallel_pairs"]:
        raise DegenerateIntersectionError(
            f"parallel line pairs: {report['parallel_pairs']}"
        )
    if report["concurrent_triples"]:
        raise GenericityError(
            f"concurrent line triples: {report['concurrent_triples']}"
        )

    sides = {l.side for l in lines}
    d = len(lines) // 2 - 1 if len(sides) == 2 else len(lines) - 1
    epsilon = Fraction(0)
    for l in lines:
        if l.side == "Q" and l.a == 0 and l.c != 0:
            epsilon = l.c

    # vertices, deterministically ordered by coordinates
    raw = []
    for i, j in combinations(range(len(lines)), 2):
        raw.append((intersect(lines[i], lines[j]), (i, j)))
    raw.sort(key=lambda t: t[0])
    vertices = [Vertex(pt, ids) for pt, ids in raw]
    vid_of = {v.point: i for i, v in enumerate(vertices)}

    # edges: per line, consecutive crossings plus the two end rays
    edges: list[Edge] = []
    segs_at: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(vertices))}
    for li, line in enumerate(lines):
        on_line = [vid_of[v.point] for v in vertices if li in v.lines]
        dx, dy = line.direction()
        on_line.sort(key=lambda vid: dx * vertices[vid].point[0] + dy * vertices[vid].point[1])
        edges.append(Edge(li, None, on_line[0]))
        for v0, v1 in zip(on_line, on_line[1:]):
            eid = len(edges)
            edges.append(Edge(li, v0, v1))
            segs_at[v0].append((eid, v1))
            segs_at[v1].append((eid, v0))
        edges.append(Edge(li, on_line[-1], None))

    # ccw-sorted outgoing half-edges per vertex
    def out_key(vid: int):
        px, py = vertices[vid].point

        def cmp(h1, h2):
            (_, w1), (_, w2) = h1, h2
            d1 = (vertices[w1].point[0] - px, vertices[w1].point[1] - py)
            d2 = (vertices[w2].point[0] - px, vertices[w2].point[1] - py)
            return _dir_cmp(d1, d2)

        return sorted(segs_at[vid], key=functools.cmp_to_key(cmp))

    outgoing = {vid: out_key(vid) for vid in segs_at}
    out_pos = {
        vid: {(eid, w): i for i, (eid, w) in enumerate(hs)}
        for vid, hs in outgoing.items()
    }

    # face traversal: next half-edge is the ccw predecessor of the reverse
    visited: set[tuple[int, int, int]] = set()   # (edge, from, to)
    face_cycles: list[tuple[list[int], list[int]]] = []
    half_face: dict[tuple[int, int, int], int] = {}
    for start_v, hs in outgoing.items():
        for eid0, to0 in hs:
            h = (eid0, start_v, to0)
            if h in visited:
                continue
            vcycle, ecycle = [], []
            cur = h
            while cur not in visited:
                visited.add(cur)
                eid, u, v = cur
                vcycle.append(u)
                ecycle.append(eid)
                hs_v = outgoing[v]
                pos = out_pos[v][(eid, u)]
                eid2, w = hs_v[(pos - 1) % len(hs_v)]
                cur = (eid2, v, w)
            if cur == h:
                fid = len(face_cycles)
                face_cycles.append((vcycle, ecycle))
                for eid, u, v in zip(ecycle, vcycle, vcycle[1:] + vcycle[:1]):
                    half_face[(eid, u, v)] = fid

    p_ids = [i for i, l in enumerate(lines) if l.side == "P"]
    q_ids = [i for i, l in enumerate(lines) if l.side == "Q"]

    faces: list[Face] = []
    bounded_fid: dict[int, int] = {}
    for fid, (vcycle, ecycle) in enumerate(face_cycles):
        pts = [vertices[v].point for v in vcycle]
        if _polygon_area2(pts) <= 0:
            continue
        bary = (
            sum((p[0] for p in pts), Fraction(0)) / len(pts),
            sum((p[1] for p in pts), Fraction(0)) / len(pts),
        )
        line_ids = frozenset(edges[e].line for e in ecycle)
        if any(lines[li].eval_at(*bary) == 0 for li in line_ids):
            # cannot happen for a convex cell, but the fallback is cheap
            bary = (
                (pts[0][0] + pts[1][0] + pts[2][0]) / 3,
                (pts[0][1] + pts[1][1] + pts[2][1]) / 3,
            )
        sign_p = 1
        for li in p_ids:
            sign_p *= _sign(lines[li].eval_at(*bary))
        sign_q = 1
        for li in q_ids:
            sign_q *= _sign(lines[li].eval_at(*bary))
        sides = {lines[li].side for li in line_ids}
        face_class = "mixed" if len(sides) > 1 else sides.pop()
        bounded_fid[fid] = len(faces)
        faces.append(Face(tuple(vcycle), tuple(ecycle), line_ids, bary, sign_p, sign_q, face_class))

    # deterministic face order (by barycenter), remap ids
    order = sorted(range(len(faces)), key=lambda i: faces[i].barycenter)
    remap = {old: new for new, old in enumerate(order)}
    faces = [faces[i] for i in order]
    edge_faces: dict[int, list[int]] = {}
    for (eid, _, _), fid in half_face.items():
        if fid in bounded_fid:
            edge_faces.setdefault(eid, []).append(remap[bounded_fid[fid]])
    edge_faces_t = {e: tuple(sorted(set(fs))) for e, fs in edge_faces.items()}

    return Arrangement(
        d=d,
        epsilon=epsilon,
        lines=list(lines),
        vertices=vertices,
        edges=edges,
        bounded_faces=faces,
        edge_faces=edge_faces_t,
    )


def build_side_arrangement(arr: Arrangement, side: str) -> Arrangement:
    """Sub-arrangement of the P-lines alone (or the Q-lines alone)."""
    return build_arrangement([l for l in arr.lines if l.side == side])


def arrangement_to_json(arr: Arrangement) -> dict:
    return {
        "d": arr.d,
        "epsilon": frac_str(arr.epsilon),
        "lines": [
            {"k": l.k, "side": l.side, "a": frac_str(l.a), "b": frac_str(l.b), "c": frac_str(l.c)}
            for l in arr.lines
        ],
        "vertices": [
            {"x": frac_str(v.point[0]), "y": frac_str(v.point[1]),
             "lines": [arr.lines[i].k for i in v.lines]}
            for v in arr.vertices
        ],
        "edges": [
            {"line": arr.lines[e.line].k, "v0": e.v0, "v1": e.v1}
            for e in arr.edges
        ],
        "bounded_faces": [
            {
                "vertices": list(f.vertex_cycle),
                "lines": sorted(arr.lines[i].k for i in f.line_ids),
                "barycenter": [frac_str(f.barycenter[0]), frac_str(f.barycenter[1])],
                "sign_p": f.sign_p,
                "sign_q": f.sign_q,
                "class": f.face_class,
            }
            for f in arr.bounded_faces
        ],
    }
