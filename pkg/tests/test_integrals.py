import math
from fractions import Fraction

import numpy as np
import pytest

from monodromy_lab.arrangement import Line, point_in_face
from monodromy_lab.errors import InvalidParameterError, PoleProximityError
from monodromy_lab.integrals import (
    ExactDifferential,
    FDifferential,
    LogFamilyForm,
    Poly2,
    PolynomialForm,
    check_center_vanishing,
    form_scale,
    integrate,
    random_admissible_lambdas,
    trace_oval,
    winding_oracle,
)


class _LineLog:
    """dR/R for a single line; inline fixture for the winding consistency check."""

    def __init__(self, line):
        self.a, self.b, self.c = float(line.a), float(line.b), float(line.c)

    def components(self, x, y):
        r = self.a * np.asarray(x) + self.b * np.asarray(y) + self.c
        return self.a / r, self.b / r


def center_of(data, kind, index=0):
    return [p for p in data.points if p.kind == kind][index]


@pytest.fixture(scope="module")
def d2_trace(pipelines):
    data = pipelines(2)
    return trace_oval(data.arr, data.points, center_of(data, "CenterP"), s=0.1)


class TestTraceOval:
    def test_closed_on_level_inside_triangle(self, pipelines, d2_trace):
        data = pipelines(2)
        trace = d2_trace
        assert trace.closed
        assert np.array_equal(trace.nodes[0], trace.nodes[-1])
        # every node on the level set, relative tolerance
        from monodromy_lab.critical import eval_f
        for x, y in trace.nodes[:: max(1, len(trace.nodes) // 64)]:
            assert abs(eval_f(data.arr, x, y) - trace.t) <= 1e-10 * abs(trace.t)
        # strictly inside the numerator triangle (0,4), (0,3), (2/5, 12/5)
        face = data.arr.bounded_faces[trace.face]
        tri = {tuple(data.arr.vertices[v].point) for v in face.vertex_cycle}
        assert tri == {(0, 4), (0, 3), (Fraction(2, 5), Fraction(12, 5))}
        for x, y in trace.nodes:
            assert point_in_face(data.arr, face, (Fraction(x).limit_denominator(10**12),
                                                  Fraction(y).limit_denominator(10**12)))

    def test_line_clearance(self, pipelines, d2_trace):
        data = pipelines(2)
        for line in data.arr.lines:
            a, b, c = float(line.a), float(line.b), float(line.c)
            dist = np.abs(a * d2_trace.nodes[:, 0] + b * d2_trace.nodes[:, 1] + c)
            dist /= math.hypot(a, b)
            assert dist.min() > 1e-6

    def test_reflection_is_the_mirrored_denominator_oval(self, pipelines, d2_trace):
        # (x,y) -> (y,x) conjugates F to 1/F, so the reflected trace is a
        # level oval of the CenterQ cell at the reciprocal level
        data = pipelines(2)
        from monodromy_lab.critical import eval_f
        mirrored_t = 1.0 / d2_trace.t
        cq = center_of(data, "CenterQ")
        face = data.arr.bounded_faces[cq.face]
        for x, y in d2_trace.nodes[:: max(1, len(d2_trace.nodes) // 64)]:
            val = eval_f(data.arr, y, x)
            assert abs(val - mirrored_t) <= 1e-8 * abs(mirrored_t)
            assert point_in_face(data.arr, face, (Fraction(y).limit_denominator(10**12),
                                                  Fraction(x).limit_denominator(10**12)))

    def test_rejects_bad_inputs(self, pipelines):
        data = pipelines(2)
        saddle = center_of(data, "Saddle3")
        with pytest.raises(InvalidParameterError):
            trace_oval(data.arr, data.points, saddle)
        with pytest.raises(InvalidParameterError):
            trace_oval(data.arr, data.points, center_of(data, "CenterP"), s=0.7)


class TestQuadratureSelfTests:
    def test_df_vanishes(self, pipelines, d2_trace):
        val, err = integrate(FDifferential(pipelines(2).arr), d2_trace)
        assert abs(val) <= 1e-8

    def test_dg_polynomial_vanishes(self, pipelines, d2_trace):
        g = Poly2({(1, 0): 2, (0, 1): -1, (1, 1): 3, (2, 0): 1})
        val, _ = integrate(ExactDifferential(pipelines(2).arr, g), d2_trace)
        assert abs(val) <= 1e-8

    def test_dg_meromorphic_vanishes(self, pipelines, d2_trace):
        g = Poly2({(0, 0): 1, (1, 0): -2, (0, 2): 1})
        val, _ = integrate(ExactDifferential(pipelines(2).arr, g, power=1), d2_trace)
        assert abs(val) <= 1e-8

    def test_area_form_matches_shoelace(self, d2_trace):
        half = PolynomialForm(Poly2({(0, 1): Fraction(-1, 2)}), Poly2({(1, 0): Fraction(1, 2)}))
        val, _ = integrate(half, d2_trace)
        nodes = d2_trace.nodes
        shoelace = 0.5 * float(np.sum(nodes[:-1, 0] * nodes[1:, 1]
                                      - nodes[1:, 0] * nodes[:-1, 1]))
        assert val.real > 0
        assert abs(val.real - shoelace) <= 1e-5 * max(1.0, abs(shoelace))

    def test_step_halving_stability(self, pipelines):
        data = pipelines(2)
        center = center_of(data, "CenterP")
        coarse = trace_oval(data.arr, data.points, center, s=0.1, n_target=512)
        fine = trace_oval(data.arr, data.points, center, s=0.1, n_target=1024)
        forms = [
            FDifferential(data.arr),
            PolynomialForm(Poly2({(0, 1): -1}), Poly2({(1, 0): 1})),
            LogFamilyForm(data.arr, random_admissible_lambdas(np.random.default_rng(2), 2)),
        ]
        for form in forms:
            v1, _ = integrate(form, coarse)
            v2, _ = integrate(form, fine)
            scale = max(1.0, form_scale(form, coarse))
            assert abs(v1 - v2) <= 1e-7 * scale

    def test_orientation_reversal_negates(self, pipelines, d2_trace):
        data = pipelines(2)
        forms = [
            PolynomialForm(Poly2({(0, 1): -1, (0, 2): 2}), Poly2({(1, 0): 1})),
            LogFamilyForm(data.arr, random_admissible_lambdas(np.random.default_rng(4), 2),
                          Poly2({(1, 1): 1})),
        ]
        rev = d2_trace.reversed()
        for form in forms:
            v1, _ = integrate(form, d2_trace)
            v2, _ = integrate(form, rev)
            scale = max(1.0, form_scale(form, d2_trace), abs(v1))
            assert abs(v1 + v2) <= 1e-12 * scale


class TestLogFamily:
    def test_constraint_enforced(self, pipelines):
        data = pipelines(2)
        with pytest.raises(InvalidParameterError):
            LogFamilyForm(data.arr, [Fraction(1)] * 4)
        with pytest.raises(InvalidParameterError):
            LogFamilyForm(data.arr, [Fraction(1)] * 3)

    def test_pure_log_vanishes(self, pipelines, d2_trace):
        data = pipelines(2)
        rng = np.random.default_rng(0)
        for _ in range(5):
            form = LogFamilyForm(data.arr, random_admissible_lambdas(rng, 2))
            val, _ = integrate(form, d2_trace)
            assert abs(val) <= 1e-8 * max(1.0, form_scale(form, d2_trace))

    def test_with_potential_vanishes(self, pipelines, d2_trace):
        data = pipelines(2)
        rng = np.random.default_rng(1)
        form = LogFamilyForm(data.arr, random_admissible_lambdas(rng, 2),
                             Poly2({(1, 0): 1, (0, 2): 2}))
        val, _ = integrate(form, d2_trace)
        assert abs(val) <= 1e-8 * max(1.0, form_scale(form, d2_trace))


class TestWinding:
    def test_real_ovals_never_wind(self, pipelines, d2_trace):
        data = pipelines(2)
        for line in data.arr.lines:
            assert winding_oracle(d2_trace, line) == 0

    def test_synthetic_circle(self):
        theta = np.linspace(0.0, 2 * math.pi, 181)
        circle = [(complex(math.cos(a), math.sin(a)), 0.0) for a in theta]
        x_axis = Line(Fraction(1), Fraction(0), Fraction(0), 0, "P")
        assert winding_oracle(circle, x_axis) == 1
        assert winding_oracle(circle[::-1], x_axis) == -1

    def test_node_on_line_rejected(self):
        nodes = [(0.0, 0.5), (1.0, 0.5), (0.0, 0.5)]
        x_axis = Line(Fraction(1), Fraction(0), Fraction(0), 0, "P")
        with pytest.raises(PoleProximityError):
            winding_oracle(nodes, x_axis)

    def test_quadrature_agrees_with_winding(self, pipelines, d2_trace):
        data = pipelines(2)
        for line in data.arr.lines[:3]:
            form = _LineLog(line)
            val, _ = integrate(form, d2_trace)
            predicted = 2j * math.pi * winding_oracle(d2_trace, line)
            assert abs(val - predicted) <= 1e-8 * max(1.0, form_scale(form, d2_trace))


class TestCenterVanishing:
    def test_d1_rejected(self, pipelines):
        data = pipelines(1)
        with pytest.raises(InvalidParameterError):
            check_center_vanishing(data.arr, data.points)

    def test_d2_smoke(self, pipelines):
        data = pipelines(2)
        rep = check_center_vanishing(data.arr, data.points, trials=3, seed=0)
        assert rep["pass"]
        assert len(rep["centers"]) == 2
        for c in rep["centers"]:
            assert c["winding_all_zero"]
            assert c["log_pass_count"] == 3
            assert c["control_nonzero_count"] >= 3 * 0.9 - 1

    def test_deterministic_given_seed(self, pipelines):
        data = pipelines(2)
        r1 = check_center_vanishing(data.arr, data.points, trials=2, seed=9)
        r2 = check_center_vanishing(data.arr, data.points, trials=2, seed=9)
        assert r1 == r2

    def test_thread_cap_does_not_change_results(self, pipelines, monkeypatch):
        data = pipelines(2)
        serial = check_center_vanishing(data.arr, data.points, trials=2, seed=9)
        monkeypatch.setenv("MONODROMY_LAB_THREADS", "4")
        threaded = check_center_vanishing(data.arr, data.points, trials=2, seed=9)
        assert threaded == serial
