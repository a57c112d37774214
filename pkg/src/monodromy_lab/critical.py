"""Critical and indeterminacy points of the quotient map F = P/Q.

The critical points fall into three kinds with exact census for degree d:

  * saddles on two P-lines (value exactly 0) or two Q-lines (value
    infinite): d(d+1)/2 each, read off the arrangement vertices;
  * extrema inside bounded cells of the P-only (or Q-only) sub-arrangement:
    d(d-1)/2 each, located numerically;
  * saddles inside mixed bounded cells: d*d, located numerically.

Indeterminacy points are the (d+1)^2 crossings of a P-line with a Q-line,
where P = Q = 0 and F is undefined.

Interior points solve grad(log F) = sum_k s_k (a_k, b_k) / R_k = 0 with
s_k = +1 on numerator lines and -1 on denominator lines; Newton iteration
on this sum of reciprocals is well conditioned away from the lines.  Seeds
are the barycenter of every bounded cell of the full arrangement plus a
deterministic scatter inside each cell, deduplicated afterwards.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arrangement import Arrangement, Face, build_side_arrangement
from .errors import CountMismatchError
from .jsonio import fmt_float

log = logging.getLogger(__name__)

NEWTON_TOL = 1e-12
MAX_ITER = 100
DEDUP_TOL = 1e-9
VALUE_GROUP_TOL = 1e-9
SCATTER_SEEDS = 8

KIND_SADDLE_P = "SaddleP"
KIND_SADDLE_Q = "SaddleQ"
KIND_CENTER_P = "CenterP"
KIND_CENTER_Q = "CenterQ"
KIND_SADDLE_3 = "Saddle3"


@dataclass(frozen=True)
class CriticalPoint:
    kind: str
    x: float
    y: float
    value: float            # math.inf marks the denominator saddles
    exact: tuple[Fraction, Fraction] | None = None
    vertex: int | None = None       # arrangement vertex id (type-1 saddles)
    face: int | None = None         # containing bounded cell of the full arrangement
    side_face: int | None = None    # containing cell of the P-only/Q-only sub-arrangement

    @property
    def coords(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class IndeterminacyPoint:
    point: tuple[Fraction, Fraction]
    p_line: int      # family index k of the numerator line
    q_line: int


@dataclass
class ValueGroup:
    value: float                 # representative; math.inf for the pole group
    members: list[int]           # indices into the critical-point catalog
    tol: float
    ambiguous: bool = False


def _line_float_data(arr: Arrangement):
    a = np.array([float(l.a) for l in arr.lines])
    b = np.array([float(l.b) for l in arr.lines])
    c = np.array([float(l.c) for l in arr.lines])
    s = np.array([1.0 if l.side == "P" else -1.0 for l in arr.lines])
    return a, b, c, s


def eval_f(arr: Arrangement, x: float, y: float) -> float:
    """F = P/Q at a float point."""
    a, b, c, s = _line_float_data(arr)
    r = a * x + b * y + c
    num = np.prod(r[s > 0])
    den = np.prod(r[s < 0])
    return float(num / den)


def grad_log_f(arr: Arrangement, x: float, y: float) -> np.ndarray:
    a, b, c, s = _line_float_data(arr)
    r = a * x + b * y + c
    w = s / r
    return np.array([float(w @ a), float(w @ b)])


def hessian_log_f(arr: Arrangement, x: float, y: float) -> np.ndarray:
    a, b, c, s = _line_float_data(arr)
    r = a * x + b * y + c
    w = s / r**2
    g = np.stack([a, b], axis=1)
    return -(g.T * w) @ g


def saddle_points_exact(arr: Arrangement) -> list[CriticalPoint]:
    """Type-1 saddles: P-P crossings (value 0) and Q-Q crossings (value inf)."""
    out = []
    for vid, v in enumerate(arr.vertices):
        s1 = arr.lines[v.lines[0]].side
        s2 = arr.lines[v.lines[1]].side
        if s1 != s2:
            continue
        kind = KIND_SADDLE_P if s1 == "P" else KIND_SADDLE_Q
        value = 0.0 if s1 == "P" else math.inf
        out.append(CriticalPoint(
            kind=kind,
            x=float(v.point[0]), y=float(v.point[1]),
            value=value, exact=v.point, vertex=vid,
        ))
    return out


def indeterminacy_points(arr: Arrangement) -> list[IndeterminacyPoint]:
    """The (d+1)^2 base points P = Q = 0, one per P-line x Q-line crossing."""
    out = []
    for v in arr.vertices:
        l1, l2 = (arr.lines[i] for i in v.lines)
        if l1.side == l2.side:
            continue
        p, q = (l1, l2) if l1.side == "P" else (l2, l1)
        out.append(IndeterminacyPoint(point=v.point, p_line=p.k, q_line=q.k))
    return out


def _face_polygon(arr: Arrangement, face: Face) -> np.ndarray:
    return np.array([[float(arr.vertices[v].point[0]), float(arr.vertices[v].point[1])]
                     for v in face.vertex_cycle])


def _inside(poly: np.ndarray, x: float, y: float) -> bool:
    """Strict interior test for a convex ccw polygon."""
    nxt = np.roll(poly, -1, axis=0)
    cross = (nxt[:, 0] - poly[:, 0]) * (y - poly[:, 1]) - (nxt[:, 1] - poly[:, 1]) * (x - poly[:, 0])
    return bool(np.all(cross > 0))


def _face_seeds(poly: np.ndarray, face_id: int) -> list[tuple[float, float]]:
    """Barycenter plus a fixed scatter of interior points, seeded per face."""
    seeds = [tuple(poly.mean(axis=0))]
    rng = np.random.default_rng(face_id)
    for _ in range(SCATTER_SEEDS):
        w = rng.random(len(poly)) + 0.05
        w /= w.sum()
        seeds.append(tuple(w @ poly))
    return seeds


def _newton(arr, x0: float, y0: float, tol: float, max_iter: int):
    x = np.array([x0, y0])
    for _ in range(max_iter):
        g = grad_log_f(arr, x[0], x[1])
        j = hessian_log_f(arr, x[0], x[1])
        try:
            step = np.linalg.solve(j, -g)
        except np.linalg.LinAlgError:
            return None
        x = x + step
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e6:
            return None
        if np.linalg.norm(step) < 1e-14 * (1.0 + np.linalg.norm(x)):
            break
    g = grad_log_f(arr, x[0], x[1])
    fval = eval_f(arr, x[0], x[1])
    if not np.isfinite(fval) or fval == 0.0:
        return None
    # gradient tolerance in whichever chart (F or 1/F) is well conditioned;
    # grad(1/F) = -grad(F)/F^2, and both equal F-powers times grad(log F)
    if min(abs(fval), 1.0 / abs(fval)) * np.linalg.norm(g) > tol:
        return None
    return float(x[0]), float(x[1])


def find_interior_critical(
    arr: Arrangement,
    p_sub: Arrangement | None = None,
    q_sub: Arrangement | None = None,
    newton_tol: float = NEWTON_TOL,
    max_iter: int = MAX_ITER,
    dedup_tol: float = DEDUP_TOL,
) -> list[CriticalPoint]:
    """Locate and classify all interior critical points by Newton multistart.

    Every bounded cell of the full arrangement is seeded (no assumption that
    a cell holds at most one critical point); results are deduplicated and
    classified through the Hessian of log F, whose determinant sign is the
    definiteness sign of the Hessian of F at a critical point.  Extrema are
    split into the P and Q families by containment in the bounded cells of
    the corresponding single-side sub-arrangement.

    Raises CountMismatchError when the census deviates from d(d-1)/2 extrema
    per side and d*d interior saddles.
    """
    d = arr.d
    p_sub = p_sub or build_side_arrangement(arr, "P")
    q_sub = q_sub or build_side_arrangement(arr, "Q")
    polys = [_face_polygon(arr, f) for f in arr.bounded_faces]

    found: list[tuple[float, float]] = []
    for fid, poly in enumerate(polys):
        for sx, sy in _face_seeds(poly, fid):
            res = _newton(arr, sx, sy, newton_tol, max_iter)
            if res is None:
                log.debug("seed (%g, %g) in face %d did not converge", sx, sy, fid)
                continue
            if not any(abs(res[0] - px) + abs(res[1] - py) < dedup_tol for px, py in found):
                found.append(res)

    p_polys = [_face_polygon(p_sub, f) for f in p_sub.bounded_faces]
    q_polys = [_face_polygon(q_sub, f) for f in q_sub.bounded_faces]

    points: list[CriticalPoint] = []
    for x, y in found:
        face = next((i for i, poly in enumerate(polys) if _inside(poly, x, y)), None)
        if face is None:
            continue
        h = hessian_log_f(arr, x, y)
        det = float(np.linalg.det(h))
        value = eval_f(arr, x, y)
        if det > 0:
            pf = next((i for i, poly in enumerate(p_polys) if _inside(poly, x, y)), None)
            qf = next((i for i, poly in enumerate(q_polys) if _inside(poly, x, y)), None)
            if (pf is None) == (qf is None):
                raise CountMismatchError(
                    f"extremum at ({x:.6g}, {y:.6g}) lies in "
                    f"{'both' if pf is not None else 'neither'} single-side cell"
                )
            kind = KIND_CENTER_P if pf is not None else KIND_CENTER_Q
            side_face = pf if pf is not None else qf
        else:
            kind = KIND_SADDLE_3
            side_face = None
        points.append(CriticalPoint(
            kind=kind, x=x, y=y, value=value, face=face, side_face=side_face,
        ))

    census = {
        KIND_CENTER_P: d * (d - 1) // 2,
        KIND_CENTER_Q: d * (d - 1) // 2,
        KIND_SADDLE_3: d * d,
    }
    actual = {k: sum(1 for p in points if p.kind == k) for k in census}
    if actual != census:
        missing_p = [i for i in range(len(p_polys))
                     if not any(p.kind == KIND_CENTER_P and p.side_face == i for p in points)]
        missing_q = [i for i in range(len(q_polys))
                     if not any(p.kind == KIND_CENTER_Q and p.side_face == i for p in points)]
        raise CountMismatchError(
            f"interior census {actual} != expected {census} at d={d}; "
            f"P-cells without extremum: {missing_p}, Q-cells without extremum: {missing_q}"
        )

    points.sort(key=lambda p: (p.kind, p.x, p.y))
    return points


def critical_catalog(arr: Arrangement, **kwargs) -> list[CriticalPoint]:
    """Type-1 saddles followed by interior points, in deterministic order."""
    return saddle_points_exact(arr) + find_interior_critical(arr, **kwargs)


def group_values(points: list[CriticalPoint], tol: float = VALUE_GROUP_TOL) -> list[ValueGroup]:
    """Cluster critical values; 0 and infinity always stand alone.

    Finite nonzero values are clustered at relative tolerance `tol`.  If two
    clusters are separated by less than ten times the merge tolerance the
    grouping is flagged as ambiguous (reported, never fatal).
    """
    zero = [i for i, p in enumerate(points) if p.kind == KIND_SADDLE_P]
    pole = [i for i, p in enumerate(points) if p.kind == KIND_SADDLE_Q]
    finite = [(p.value, i) for i, p in enumerate(points)
              if p.kind not in (KIND_SADDLE_P, KIND_SADDLE_Q)]
    finite.sort()

    groups: list[ValueGroup] = [ValueGroup(0.0, zero, tol)]
    cluster: list[tuple[float, int]] = []

    def flush():
        if cluster:
            rep = float(np.mean([v for v, _ in cluster]))
            groups.append(ValueGroup(rep, [i for _, i in cluster], tol))
            cluster.clear()

    for v, i in finite:
        if cluster and abs(v - cluster[-1][0]) > tol * max(1.0, abs(v), abs(cluster[-1][0])):
            flush()
        cluster.append((v, i))
    flush()
    groups.append(ValueGroup(math.inf, pole, tol))

    reps = [g.value for g in groups[1:-1]]
    for g1, g2, v1, v2 in zip(groups[1:-1], groups[2:-1], reps, reps[1:]):
        if abs(v2 - v1) < 10 * tol * max(1.0, abs(v1), abs(v2)):
            g1.ambiguous = g2.ambiguous = True
    return groups


def count_summary(arr: Arrangement, points: list[CriticalPoint],
                  indet: list[IndeterminacyPoint]) -> dict:
    """Census of every point kind plus the homology bookkeeping identity."""
    d = arr.d
    kinds = {k: sum(1 for p in points if p.kind == k)
             for k in (KIND_SADDLE_P, KIND_SADDLE_Q, KIND_CENTER_P, KIND_CENTER_Q, KIND_SADDLE_3)}
    return {
        "d": d,
        "kinds": kinds,
        "type1": kinds[KIND_SADDLE_P] + kinds[KIND_SADDLE_Q],
        "type2": kinds[KIND_CENTER_P] + kinds[KIND_CENTER_Q],
        "type3": kinds[KIND_SADDLE_3],
        "total": len(points),
        "indeterminacy": len(indet),
        "h1_dim": d * (2 * d + 1),
        "boundary_kernel_dim": 3 * d * d - d * (2 * d + 1),
    }


def critical_to_json(points: list[CriticalPoint], indet: list[IndeterminacyPoint],
                     groups: list[ValueGroup]) -> dict:
    def value_field(p: CriticalPoint):
        if p.kind == KIND_SADDLE_Q:
            return "inf"
        if p.kind == KIND_SADDLE_P:
            return "0"
        return fmt_float(p.value)

    return {
        "critical_points": [
            {"kind": p.kind, "x": fmt_float(p.x), "y": fmt_float(p.y),
             "value": value_field(p), "exact": p.exact is not None}
            for p in points
        ],
        "indeterminacy": [
            {"x": fmt_float(float(q.point[0])), "y": fmt_float(float(q.point[1])),
             "p_line": q.p_line, "q_line": q.q_line}
            for q in indet
        ],
        "value_groups": [
            {"value": "inf" if math.isinf(g.value) else fmt_float(g.value),
             "members": list(g.members), "tol": g.tol, "ambiguous": g.ambiguous}
            for g in groups
        ],
    }
