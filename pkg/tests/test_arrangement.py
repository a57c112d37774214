from fractions import Fraction
from math import comb

import pytest

from monodromy_lab.arrangement import (
    Line,
    arrangement_to_json,
    build_arrangement,
    build_lines,
    build_side_arrangement,
    genericity_check,
    intersect,
    point_in_face,
)
from monodromy_lab.errors import (
    DegenerateIntersectionError,
    GenericityError,
    InvalidParameterError,
)


def eval_product(lines, side, x, y):
    prod = Fraction(1)
    for l in lines:
        if l.side == side:
            prod *= l.eval_at(x, y)
    return prod


class TestBuildLines:
    def test_d1_coefficients(self):
        lines = build_lines(1)
        assert [(l.a, l.b, l.c) for l in lines] == [
            (3, 0, 0), (2, 1, -2), (1, 2, -2), (0, 3, 0)]
        assert [l.side for l in lines] == ["P", "P", "Q", "Q"]

    def test_d1_quotient_matches_reduced_form(self):
        # scalar factors cancel: P/Q == x(2x+y-2) / (y(x+2y-2)) exactly
        lines = build_lines(1)
        for x, y in [(Fraction(1, 3), Fraction(5, 7)), (Fraction(-2), Fraction(9, 4))]:
            lhs = eval_product(lines, "P", x, y) / eval_product(lines, "Q", x, y)
            rhs = (x * (2 * x + y - 2)) / (y * (x + 2 * y - 2))
            assert lhs == rhs

    def test_d2_line_k1(self):
        l = build_lines(2)[1]
        assert (l.a, l.b, l.c) == (4, 1, -4)

    def test_perturbed_last_line(self):
        l = build_lines(1, Fraction(1, 10))[-1]
        assert (l.a, l.b, l.c) == (0, 3, Fraction(1, 10))

    def test_invalid_degree(self):
        with pytest.raises(InvalidParameterError):
            build_lines(0)

    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
    def test_axis_crossings(self, d):
        # line k passes through (k, 0) and (0, 2d+1-k)
        lines = build_lines(d)
        for k in range(1, 2 * d + 1):
            assert lines[k].eval_at(Fraction(k), Fraction(0)) == 0
            assert lines[k].eval_at(Fraction(0), Fraction(2 * d + 1 - k)) == 0


class TestIntersect:
    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_origin(self, d):
        lines = build_lines(d)
        assert intersect(lines[0], lines[-1]) == (0, 0)

    def test_d1_hand_elimination(self):
        # 2x + y = 2 and x + 2y = 2 give (2/3, 2/3)
        lines = build_lines(1)
        assert intersect(lines[1], lines[2]) == (Fraction(2, 3), Fraction(2, 3))

    def test_d2_hand_elimination(self):
        # 4x + y = 4 and 3x + 2y = 6 give (2/5, 12/5)
        lines = build_lines(2)
        assert intersect(lines[1], lines[2]) == (Fraction(2, 5), Fraction(12, 5))

    def test_parallel_rejected(self):
        l1 = Line(Fraction(1), Fraction(2), Fraction(0), 0, "P")
        l2 = Line(Fraction(2), Fraction(4), Fraction(5), 1, "P")
        with pytest.raises(DegenerateIntersectionError):
            intersect(l1, l2)


class TestGenericity:
    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
    def test_family_is_generic(self, d):
        rep = genericity_check(build_lines(d))
        assert rep["parallel_pairs"] == []
        assert rep["concurrent_triples"] == []

    def test_duplicated_line_reported(self):
        lines = build_lines(2)
        rep = genericity_check(lines + [lines[0]])
        assert rep["parallel_pairs"]

    def test_concurrent_triple_reported(self):
        synthetic = [
            Line(Fraction(1), Fraction(0), Fraction(0), 0, "P"),
            Line(Fraction(0), Fraction(1), Fraction(0), 1, "P"),
            Line(Fraction(1), Fraction(1), Fraction(0), 2, "Q"),
        ]
        rep = genericity_check(synthetic)
        assert rep["concurrent_triples"] == [(0, 1, 2)]
        with pytest.raises(GenericityError):
            build_arrangement(synthetic)


class TestArrangement:
    def test_d1_structure(self, pipelines):
        arr = pipelines(1).arr
        assert len(arr.vertices) == 6
        # hand enumeration of the 4 explicit lines: one quadrilateral between
        # the sides plus two triangles, three bounded cells in total
        assert len(arr.bounded_faces) == 3
        two_two = [f for f in arr.bounded_faces
                   if sum(arr.lines[i].side == "P" for i in f.line_ids) == 2
                   and sum(arr.lines[i].side == "Q" for i in f.line_ids) == 2]
        assert len(two_two) == 1
        quad_pts = {tuple(arr.vertices[v].point) for v in two_two[0].vertex_cycle}
        assert quad_pts == {(0, 0), (1, 0), (Fraction(2, 3), Fraction(2, 3)), (0, 1)}

    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
    def test_counts(self, d, pipelines):
        data = pipelines(d)
        n = 2 * d + 2
        assert len(data.arr.vertices) == comb(n, 2)
        assert len(data.p_sub.bounded_faces) == d * (d - 1) // 2
        assert len(data.q_sub.bounded_faces) == d * (d - 1) // 2

    @pytest.mark.parametrize("d", [1, 2, 3, 4, 5])
    def test_barycenter_signs_nonzero(self, d, pipelines):
        arr = pipelines(d).arr
        for f in arr.bounded_faces:
            assert f.sign_p in (-1, 1)
            assert f.sign_q in (-1, 1)
            assert eval_product(arr.lines, "P", *f.barycenter) != 0
            assert eval_product(arr.lines, "Q", *f.barycenter) != 0
            assert point_in_face(arr, f, f.barycenter)

    def test_adjacent_faces_share_edges(self, pipelines):
        arr = pipelines(2).arr
        shared = [fids for fids in arr.edge_faces.values() if len(fids) == 2]
        assert shared, "interior edges must flank two bounded cells"

    def test_perturbation_preserves_counts(self):
        arr = build_arrangement(build_lines(2, Fraction(1, 1000)))
        assert len(arr.vertices) == comb(6, 2)
        assert len(arr.bounded_faces) == 10
        assert len(build_side_arrangement(arr, "P").bounded_faces) == 1
        assert len(build_side_arrangement(arr, "Q").bounded_faces) == 1


class TestJson:
    def test_round_trip_fields(self, pipelines):
        doc = arrangement_to_json(pipelines(2).arr)
        assert doc["d"] == 2
        assert doc["epsilon"] == "0/1"
        assert len(doc["lines"]) == 6
        assert doc["lines"][1] == {"k": 1, "side": "P", "a": "4/1", "b": "1/1", "c": "-4/1"}
        assert len(doc["vertices"]) == 15
        assert len(doc["bounded_faces"]) == 10
        assert all(Fraction(v["x"]) is not None for v in doc["vertices"])
