"""Monodromy operators on cycle-symbol space and their orbit spans.

Going around one critical value acts on a cycle x by the composition of
the reflections x -> x + <x, delta> delta over the cycles delta vanishing
there.  Cycles sharing a critical value pair to zero, so the composition is
order-independent and collapses to the closed form

    M_g = 1 - D_g Psi,

where D_g selects the coordinates of the group's cycles.  Operators are
unimodular, preserve the pairing exactly, and act as the identity on
everything the group's cycles cannot see (in particular the pole-value
operator fixes the whole numerator block).

Orbit spans are computed over the rationals by a worklist closure: apply
every generator (group operators and their inverses) to each new basis
vector, insert the images into an exact echelon basis, and stop when
nothing independent appears.  Homological statements are read modulo the
radical of the pairing: the quotient rank of an orbit is
rank(span + radical) - rank(radical).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .critical import CriticalPoint, ValueGroup
from .cycles import SkewIntMatrix, VanishingCycle, radical as radical_basis_of
from .errors import NonOrthogonalGroupError
from .linalg import IntSpan, identity, mat_mul


@dataclass
class MonodromyOperator:
    matrix: list[list[int]]
    rows: tuple[int, ...]            # coordinates touched by the update
    sign: int                        # +1 for the operator, -1 for its inverse
    group: int | None = None         # value-group id, when built from one
    _srows: list[tuple[int, list[tuple[int, int]]]] = field(default_factory=list, repr=False)

    def apply(self, vec: list[int]) -> list[int]:
        """Fast exact action using only the touched rows of the pairing."""
        out = list(vec)
        for i, nz in self._srows:
            t = sum(v * vec[j] for j, v in nz)
            out[i] -= self.sign * t
        return out

    def inverse(self) -> "MonodromyOperator":
        inv = identity(len(self.matrix))
        for i, nz in self._srows:
            for j, v in nz:
                inv[i][j] += self.sign * v
        return MonodromyOperator(inv, self.rows, -self.sign, self.group, self._srows)


def _build_update_operator(psi: SkewIntMatrix, row_ids: list[int],
                           group: int | None = None) -> MonodromyOperator:
    srows = []
    for i in row_ids:
        nz = [(j, v) for j, v in enumerate(psi.entries[i]) if v]
        if nz:
            srows.append((i, nz))
    mat = identity(psi.n)
    for i, nz in srows:
        for j, v in nz:
            mat[i][j] -= v
    return MonodromyOperator(mat, tuple(row_ids), 1, group, srows)


def picard_lefschetz_operator(delta: VanishingCycle, psi: SkewIntMatrix) -> MonodromyOperator:
    """The single-cycle reflection x -> x + <x, delta> delta, as a matrix.

    In the symbol basis this is the identity with row c replaced by
    e_c - Psi[c], where c is the cycle's coordinate.  Cycles in the radical
    (every sigma) give the identity.
    """
    return _build_update_operator(psi, [delta.id])


def value_group_operator(
    group: ValueGroup,
    psi: SkewIntMatrix,
    cycles: list[VanishingCycle],
    group_id: int | None = None,
) -> MonodromyOperator:
    """Composition of the reflections of all cycles sharing one critical value.

    Raises NonOrthogonalGroupError if two member cycles pair nontrivially,
    which would make the composition order-dependent.
    """
    by_point = {c.point: c.id for c in cycles}
    ids = sorted(by_point[p] for p in group.members)
    for a in ids:
        for b in ids:
            if a < b and psi.entries[a][b] != 0:
                raise NonOrthogonalGroupError(
                    f"cycles {cycles[a].name} and {cycles[b].name} share a value "
                    f"group but pair to {psi.entries[a][b]}"
                )
    return _build_update_operator(psi, ids, group_id)


def monodromy_generators(
    psi: SkewIntMatrix,
    cycles: list[VanishingCycle],
    groups: list[ValueGroup],
) -> list[MonodromyOperator]:
    """One operator per critical-value group plus all inverses."""
    ops = [value_group_operator(g, psi, cycles, gid) for gid, g in enumerate(groups)]
    return ops + [op.inverse() for op in ops]


def preserves_pairing(op: MonodromyOperator, psi: SkewIntMatrix) -> bool:
    mt = [list(col) for col in zip(*op.matrix)]
    return mat_mul(mat_mul(mt, psi.entries), op.matrix) == psi.entries


@dataclass
class OrbitResult:
    start: int
    start_name: str
    span_basis: list[list[int]]
    span_rank: int
    quotient_rank: int
    applications: int


def orbit_span(
    start: VanishingCycle,
    generators: list[MonodromyOperator],
    radical_vectors: list[list[int]],
    n: int,
) -> OrbitResult:
    """Closure of the rational span of a start cycle under the generators.

    Breadth-first over generator applications with exact elimination; the
    span rank is bounded by n and grows strictly on insertion, so the loop
    terminates.  The quotient rank counts dimensions gained over the
    radical, which is where homology statements live.
    """
    e = [0] * n
    e[start.id] = 1
    span = IntSpan(n, [e])
    queue = [e]
    applications = 0
    while queue:
        v = queue.pop()
        for op in generators:
            w = op.apply(v)
            applications += 1
            if span.add(w):
                queue.append(w)

    rad_span = IntSpan(n, radical_vectors)
    rad_rank = rad_span.rank
    for row in span.rows:
        rad_span.add(row)
    return OrbitResult(
        start=start.id,
        start_name=start.name,
        span_basis=[list(r) for r in span.rows],
        span_rank=span.rank,
        quotient_rank=rad_span.rank - rad_rank,
        applications=applications,
    )


def verify_orbit_generation(
    psi: SkewIntMatrix,
    cycles: list[VanishingCycle],
    groups: list[ValueGroup],
    points: list[CriticalPoint],
) -> dict:
    """Check that every non-sigma orbit fills the compact-fiber homology.

    Runs the orbit closure from every start cycle: the quotient rank over
    the radical must be d(d-1) for each deltaP/DeltaP/deltaQ/DeltaQ start
    and 0 for each sigma start.  Value groups mixing critical-point kinds
    are flagged (informational; every group is treated uniformly).
    """
    n = psi.n
    d = round((n / 3) ** 0.5)
    expected = d * (d - 1)
    generators = monodromy_generators(psi, cycles, groups)
    rad = radical_basis_of(psi)

    starts = []
    ok = True
    for c in cycles:
        res = orbit_span(c, generators, rad, n)
        want = 0 if c.family == "sigma" else expected
        passed = res.quotient_rank == want
        ok = ok and passed
        starts.append({
            "cycle": c.name,
            "span_rank": res.span_rank,
            "quotient_rank": res.quotient_rank,
            "expected": want,
            "pass": passed,
        })

    mixed = []
    for gid, g in enumerate(groups):
        kinds = {points[p].kind for p in g.members}
        if len(kinds) > 1:
            mixed.append({"group": gid, "kinds": sorted(kinds)})

    return {
        "d": d,
        "expected_quotient_rank": expected,
        "starts": starts,
        "mixed_kind_groups": mixed,
        "pass": ok,
    }
