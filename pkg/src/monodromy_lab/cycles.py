"""Vanishing-cycle catalog and the skew intersection matrix.

One cycle is attached to every critical point, in five families:

  deltaP_i / deltaQ_i   saddles on two numerator / two denominator lines,
  DeltaP_j / DeltaQ_j   extrema inside bounded cells of one side,
  sigma_k               saddles inside mixed bounded cells.

The symbol space is ordered deltaP, DeltaP, deltaQ, DeltaQ, sigma, giving a
3d^2-dimensional lattice.  Inside the deltaP block the order walks the
numerator lines: along R_0 against R_d, ..., R_1, then along R_1 against
R_d, ..., R_2, and so on; the deltaQ block mirrors this through the index
involution k -> 2d+1-k.

Intersection numbers follow the combinatorial rules:

  <Delta_j, delta_i> = +1   when the saddle vertex of delta_i is a corner of
                            the cell of Delta_j (same side only);
  <Delta_j1, Delta_j2> = +-1 when the two cells share an edge;
  all other pairs vanish,

which makes the matrix block-diagonal with a d^2 x d^2 zero block for the
sigma family.  Orientations are normalized so that every corner incidence
is exactly +1; for an edge adjacency the entry is +1 when the cell on which
the side polynomial is positive carries the smaller cycle id.  The sign
choice is concentrated in `_edge_adjacency_sign` so alternatives stay a
one-line change; it is validated a posteriori by the rank identity
rank = d(d-1) per side block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arrangement import Arrangement
from .critical import (
    KIND_CENTER_P,
    KIND_CENTER_Q,
    KIND_SADDLE_3,
    KIND_SADDLE_Q,
    CriticalPoint,
    ValueGroup,
)
from .errors import CountMismatchError
from .jsonio import fmt_float
from .linalg import exact_rank, kernel_basis, mat_vec


@dataclass(frozen=True)
class VanishingCycle:
    id: int
    family: str        # "deltaP", "DeltaP", "deltaQ", "DeltaQ", "sigma"
    index: int         # 1-based position within the family
    point: int         # index into the critical-point catalog
    group: int | None = None   # value-group id once grouping is known

    @property
    def name(self) -> str:
        return f"{self.family}_{self.index}"


@dataclass
class SkewIntMatrix:
    n: int
    entries: list[list[int]]
    blocks: dict[str, range]   # family name -> index range in the ordering

    def block_indices(self, block: str) -> list[int]:
        if block == "full":
            return list(range(self.n))
        if block in ("P", "Q"):
            fams = ("deltaP", "DeltaP") if block == "P" else ("deltaQ", "DeltaQ")
            return [i for f in fams for i in self.blocks[f]]
        return list(self.blocks[block])

    def submatrix(self, block: str) -> list[list[int]]:
        idx = self.block_indices(block)
        return [[self.entries[i][j] for j in idx] for i in idx]


def _degree_of(n: int) -> int:
    d = round((n / 3) ** 0.5)
    assert 3 * d * d == n
    return d


def _delta_pair_order(d: int) -> list[tuple[int, int]]:
    """Numerator saddle order: R_0 against R_d..R_1, then R_1 against R_d..R_2, ..."""
    return [(i, j) for i in range(d) for j in range(d, i, -1)]


def enumerate_cycles(
    arr: Arrangement,
    points: list[CriticalPoint],
    groups: list[ValueGroup] | None = None,
) -> list[VanishingCycle]:
    """Build the ordered cycle catalog from the critical-point catalog."""
    d = arr.d
    by_vertex_lines: dict[tuple[int, int], int] = {}
    for pid, p in enumerate(points):
        if p.vertex is not None:
            ks = tuple(sorted(arr.lines[i].k for i in arr.vertices[p.vertex].lines))
            by_vertex_lines[ks] = pid

    group_of: dict[int, int] = {}
    if groups is not None:
        for gid, g in enumerate(groups):
            for pid in g.members:
                group_of[pid] = gid

    def centers(kind: str) -> list[int]:
        ids = [i for i, p in enumerate(points) if p.kind == kind]
        ids.sort(key=lambda i: points[i].side_face)
        return ids

    p_pairs = _delta_pair_order(d)
    q_pairs = [(2 * d + 1 - i, 2 * d + 1 - j) for i, j in p_pairs]

    ordered: list[tuple[str, int]] = []
    for i, j in p_pairs:
        ordered.append(("deltaP", by_vertex_lines[tuple(sorted((i, j)))]))
    ordered.extend(("DeltaP", pid) for pid in centers(KIND_CENTER_P))
    for i, j in q_pairs:
        ordered.append(("deltaQ", by_vertex_lines[tuple(sorted((i, j)))]))
    ordered.extend(("DeltaQ", pid) for pid in centers(KIND_CENTER_Q))
    ordered.extend(("sigma", pid) for pid, p in enumerate(points) if p.kind == KIND_SADDLE_3)

    if len(ordered) != 3 * d * d:
        raise CountMismatchError(f"{len(ordered)} cycles enumerated, expected {3 * d * d}")

    cycles = []
    counter: dict[str, int] = {}
    for family, pid in ordered:
        counter[family] = counter.get(family, 0) + 1
        cycles.append(VanishingCycle(
            id=len(cycles), family=family, index=counter[family],
            point=pid, group=group_of.get(pid),
        ))
    return cycles


def _blocks(cycles: list[VanishingCycle]) -> dict[str, range]:
    blocks = {}
    for fam in ("deltaP", "DeltaP", "deltaQ", "DeltaQ", "sigma"):
        ids = [c.id for c in cycles if c.family == fam]
        blocks[fam] = range(ids[0], ids[-1] + 1) if ids else range(0, 0)
    return blocks


def _edge_adjacency_sign(positive_id: int, negative_id: int) -> int:
    """Entry <Delta_a, Delta_b> for adjacent cells, a < b in cycle order.

    +1 when the cell where the side polynomial is positive has the smaller
    cycle id, -1 otherwise.
    """
    return 1 if positive_id < negative_id else -1


def build_intersection_matrix(
    arr: Arrangement,
    cycles: list[VanishingCycle],
    points: list[CriticalPoint],
    p_sub: Arrangement,
    q_sub: Arrangement,
) -> SkewIntMatrix:
    """Assemble the full skew matrix from cell incidences of both sides."""
    n = len(cycles)
    m = [[0] * n for _ in range(n)]

    for side, sub, dfam, cfam, center_kind in (
        ("P", p_sub, "deltaP", "DeltaP", KIND_CENTER_P),
        ("Q", q_sub, "deltaQ", "DeltaQ", KIND_CENTER_Q),
    ):
        deltas = [c for c in cycles if c.family == dfam]
        regions = [c for c in cycles if c.family == cfam]

        # corner incidences: every <Delta, delta> equals +1
        vertex_points = {}
        for vid, v in enumerate(sub.vertices):
            vertex_points[v.point] = vid
        for reg in regions:
            face = sub.bounded_faces[points[reg.point].side_face]
            corner_vids = set(face.vertex_cycle)
            for dc in deltas:
                pt = points[dc.point].exact
                vid = vertex_points.get(pt)
                if vid is not None and vid in corner_vids:
                    m[reg.id][dc.id] = 1
                    m[dc.id][reg.id] = -1

        # edge adjacencies between cells of the same side
        region_by_face = {points[reg.point].side_face: reg for reg in regions}
        seen = set()
        for eid, fids in sub.edge_faces.items():
            if len(fids) != 2 or fids in seen:
                continue
            seen.add(fids)
            f1, f2 = fids
            r1, r2 = region_by_face[f1], region_by_face[f2]
            s1 = sub.bounded_faces[f1].sign_p if side == "P" else sub.bounded_faces[f1].sign_q
            s2 = sub.bounded_faces[f2].sign_p if side == "P" else sub.bounded_faces[f2].sign_q
            if s1 == s2:
                raise CountMismatchError(
                    f"adjacent {side}-cells {f1},{f2} have equal sign {s1}"
                )
            pos, neg = (r1, r2) if s1 > 0 else (r2, r1)
            lo, hi = min(r1.id, r2.id), max(r1.id, r2.id)
            val = _edge_adjacency_sign(pos.id, neg.id)
            m[lo][hi] = val
            m[hi][lo] = -val

    return SkewIntMatrix(n=n, entries=m, blocks=_blocks(cycles))


def rank_of_block(matrix: SkewIntMatrix, block: str) -> int:
    """Exact rational rank of the P block, Q block, or the whole matrix."""
    return exact_rank(matrix.submatrix(block))


def radical(matrix: SkewIntMatrix) -> list[list[int]]:
    """Exact basis of {v : <v, w> = 0 for all w}, i.e. the kernel of the matrix."""
    return kernel_basis(matrix.entries)


def in_radical(matrix: SkewIntMatrix, vector: list[int]) -> bool:
    return not any(mat_vec(matrix.entries, vector))


def alternating_line_sums(
    arr: Arrangement,
    cycles: list[VanishingCycle],
    points: list[CriticalPoint],
    matrix: SkewIntMatrix,
) -> list[dict]:
    """Alternating sums of the saddle cycles along each line, with radical flags.

    The saddles on a line are taken in their order along the line; signs
    alternate starting at -1.  Reversing the traversal only flips the sum
    globally, so both sign phases necessarily agree on radical membership;
    both flags are still computed independently as a sanity check.
    """
    by_line: dict[int, list[tuple]] = {k: [] for k in range(len(arr.lines))}
    cycle_of_point = {c.point: c for c in cycles}
    for pid, p in enumerate(points):
        if p.vertex is None:
            continue
        for li in arr.vertices[p.vertex].lines:
            by_line[li].append((p.exact, cycle_of_point[pid]))

    report = []
    for li, line in enumerate(arr.lines):
        dx, dy = line.direction()
        entries = sorted(by_line[li], key=lambda t: dx * t[0][0] + dy * t[0][1])
        vec = [0] * matrix.n
        for j, (_, cyc) in enumerate(entries, start=1):
            vec[cyc.id] = (-1) ** j
        rev = [0] * matrix.n
        for j, (_, cyc) in enumerate(reversed(entries), start=1):
            rev[cyc.id] = (-1) ** j
        report.append({
            "k": line.k,
            "side": line.side,
            "cycles": [cyc.name for _, cyc in entries],
            "vector": vec,
            "vector_reversed": rev,
            "in_radical": in_radical(matrix, vec),
            "in_radical_reversed": in_radical(matrix, rev),
        })
    return report


def center_pair_consistency(
    matrix: SkewIntMatrix,
    cycles: list[VanishingCycle],
    points: list[CriticalPoint],
) -> list[dict]:
    """Half-sum transport check for extremum pairs separated only by the saddle value.

    For two same-side extremum cycles whose critical values (in the chart
    where the side's saddles sit at 0: F for the numerator side, 1/F for the
    denominator side) have opposite signs with no other critical value in
    between, monodromy transport predicts

        <Delta_neg, Delta_pos> = 1/2 * sum_delta <Delta_pos, delta><Delta_neg, delta>

    over the saddle cycles at 0.  Reported only: path hypotheses beyond the
    value ordering cannot be certified from the matrix alone.
    """
    out = []
    for dfam, cfam, kind in (("deltaP", "DeltaP", KIND_CENTER_P),
                             ("deltaQ", "DeltaQ", KIND_CENTER_Q)):
        regions = [c for c in cycles if c.family == cfam]
        deltas = [c for c in cycles if c.family == dfam]

        def chart(v: float) -> float:
            return v if kind == KIND_CENTER_P else 1.0 / v

        chart_values = sorted(chart(p.value) for p in points
                              if p.kind == kind or p.kind == KIND_SADDLE_3) + [0.0]
        for i, r1 in enumerate(regions):
            for r2 in regions[i + 1:]:
                v1, v2 = chart(points[r1.point].value), chart(points[r2.point].value)
                if v1 * v2 >= 0:
                    continue
                neg, pos = (r1, r2) if v1 < 0 else (r2, r1)
                lo, hi = min(v1, v2), max(v1, v2)
                between = [v for v in chart_values if lo < v < hi and v != 0.0]
                if between:
                    continue
                half_sum = Fraction(
                    sum(matrix.entries[pos.id][dl.id] * matrix.entries[neg.id][dl.id]
                        for dl in deltas), 2)
                actual = matrix.entries[neg.id][pos.id]
                out.append({
                    "pair": [neg.name, pos.name],
                    "predicted": float(half_sum),
                    "entry": actual,
                    "consistent": half_sum == actual,
                })
    return out


def matrix_to_csv(matrix: SkewIntMatrix, cycles: list[VanishingCycle]) -> str:
    header = ",".join(c.name for c in cycles)
    rows = [",".join(str(v) for v in row) for row in matrix.entries]
    return header + "\n" + "\n".join(rows) + "\n"


def catalog_to_json(
    matrix: SkewIntMatrix,
    cycles: list[VanishingCycle],
    points: list[CriticalPoint],
) -> dict:
    rad = radical(matrix)
    d = _degree_of(matrix.n)
    return {
        "n": matrix.n,
        "cycles": [
            {"id": c.id, "symbol": c.name, "family": c.family, "index": c.index,
             "point": c.point, "group": c.group,
             "value": "inf" if points[c.point].kind == KIND_SADDLE_Q
                      else fmt_float(points[c.point].value)}
            for c in cycles
        ],
        "blocks": {k: [r.start, r.stop] for k, r in matrix.blocks.items()},
        "rank": {
            "P": rank_of_block(matrix, "P"),
            "Q": rank_of_block(matrix, "Q"),
            "full": rank_of_block(matrix, "full"),
        },
        # the symbol-space pairing has twice the rank of the compact-fiber
        # pairing; both numbers are reported side by side, never conflated
        "compact_fiber_h1_dim": d * (d - 1),
        "radical_basis": rad,
        "radical_dim": len(rad),
    }
