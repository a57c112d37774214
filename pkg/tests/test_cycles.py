import pytest

from monodromy_lab.cycles import (
    alternating_line_sums,
    center_pair_consistency,
    in_radical,
    matrix_to_csv,
    radical,
    rank_of_block,
)
from monodromy_lab.linalg import mat_vec


def cycle_named(cycles, name):
    return next(c for c in cycles if c.name == name)


class TestCatalog:
    def test_d1_catalog(self, pipelines):
        assert [c.name for c in pipelines(1).cycles] == ["deltaP_1", "deltaQ_1", "sigma_1"]

    def test_d2_block_sizes(self, pipelines):
        cycles = pipelines(2).cycles
        assert len(cycles) == 12
        sizes = {}
        for c in cycles:
            sizes[c.family] = sizes.get(c.family, 0) + 1
        assert sizes == {"deltaP": 3, "DeltaP": 1, "deltaQ": 3, "DeltaQ": 1, "sigma": 4}

    def test_d3_total(self, pipelines):
        assert len(pipelines(3).cycles) == 27

    @pytest.mark.parametrize("d", [2, 3])
    def test_delta_order_walks_the_lines(self, d, pipelines):
        # deltaP_1..deltaP_d sit on R_0 against R_d, ..., R_1
        data = pipelines(d)
        for idx in range(d):
            c = cycle_named(data.cycles, f"deltaP_{idx + 1}")
            v = data.arr.vertices[data.points[c.point].vertex]
            ks = sorted(data.arr.lines[i].k for i in v.lines)
            assert ks == [0, d - idx]

    def test_cycles_carry_value_groups(self, pipelines):
        data = pipelines(2)
        for c in data.cycles:
            assert c.group is not None
            assert c.point in data.groups[c.group].members


class TestIntersectionMatrix:
    def test_d1_zero_matrix(self, pipelines):
        m = pipelines(1).matrix
        assert m.entries == [[0, 0, 0], [0, 0, 0], [0, 0, 0]]

    def test_d2_p_block(self, pipelines):
        # single bounded numerator cell, a triangle whose corners are the
        # three saddles: every corner incidence is +1, no cell adjacencies
        data = pipelines(2)
        m = data.matrix
        delta_ids = [cycle_named(data.cycles, f"deltaP_{i}").id for i in (1, 2, 3)]
        region = cycle_named(data.cycles, "DeltaP_1")
        assert [m.entries[region.id][i] for i in delta_ids] == [1, 1, 1]
        sub = m.submatrix("P")
        flat = sorted(v for row in sub for v in row)
        assert flat == [-1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1]

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_antisymmetric_small_entries(self, d, pipelines):
        m = pipelines(d).matrix
        for i in range(m.n):
            assert m.entries[i][i] == 0
            for j in range(m.n):
                assert m.entries[i][j] == -m.entries[j][i]
                assert abs(m.entries[i][j]) <= 1

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_sigma_rows_zero(self, d, pipelines):
        m = pipelines(d).matrix
        for i in m.blocks["sigma"]:
            assert not any(m.entries[i])

    @pytest.mark.parametrize("d", [2, 3])
    def test_cross_blocks_zero(self, d, pipelines):
        m = pipelines(d).matrix
        p_ids = m.block_indices("P")
        q_ids = m.block_indices("Q")
        assert all(m.entries[i][j] == 0 for i in p_ids for j in q_ids)

    @pytest.mark.parametrize("d", [2, 3])
    def test_region_incidences_count_cell_corners(self, d, pipelines):
        data = pipelines(d)
        m = data.matrix
        for c in data.cycles:
            if c.family != "DeltaP":
                continue
            face = data.p_sub.bounded_faces[data.points[c.point].side_face]
            row = m.entries[c.id]
            incidences = sum(1 for j in m.blocks["deltaP"] if row[j] != 0)
            assert incidences == len(face.vertex_cycle)


class TestRankAndRadical:
    @pytest.mark.parametrize("d,expected", [(1, 0), (2, 2), (3, 6), (4, 12)])
    def test_block_ranks(self, d, expected, pipelines):
        m = pipelines(d).matrix
        assert rank_of_block(m, "P") == expected
        assert rank_of_block(m, "Q") == expected
        assert rank_of_block(m, "full") == 2 * expected

    def test_d1_radical_is_everything(self, pipelines):
        assert len(radical(pipelines(1).matrix)) == 3

    def test_d2_radical_dimension(self, pipelines):
        assert len(radical(pipelines(2).matrix)) == 12 - 4

    @pytest.mark.parametrize("d", [2, 3])
    def test_sigma_vectors_in_radical(self, d, pipelines):
        m = pipelines(d).matrix
        for i in m.blocks["sigma"]:
            e = [0] * m.n
            e[i] = 1
            assert in_radical(m, e)

    @pytest.mark.parametrize("d", [2, 3])
    def test_radical_basis_is_exact_kernel(self, d, pipelines):
        m = pipelines(d).matrix
        basis = radical(m)
        assert len(basis) == m.n - rank_of_block(m, "full")
        for v in basis:
            assert not any(mat_vec(m.entries, v))


class TestLineSums:
    def test_d1_sum_is_minus_delta(self, pipelines):
        data = pipelines(1)
        report = alternating_line_sums(data.arr, data.cycles, data.points, data.matrix)
        assert len(report) == 4
        first = report[0]
        assert first["k"] == 0
        assert first["cycles"] == ["deltaP_1"]
        assert first["vector"] == [-1, 0, 0]
        assert first["in_radical"]

    def test_d2_vectors_alternate(self, pipelines):
        data = pipelines(2)
        report = alternating_line_sums(data.arr, data.cycles, data.points, data.matrix)
        r0 = report[0]
        ids = [cycle_named(data.cycles, name).id for name in r0["cycles"]]
        assert sorted(r0["vector"][i] for i in ids) == [-1, 1]
        assert all(v == 0 for i, v in enumerate(r0["vector"]) if i not in ids)
        assert r0["vector_reversed"] == [-v for v in r0["vector"]] or \
            r0["vector_reversed"] == r0["vector"]

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_all_sums_in_radical(self, d, pipelines):
        data = pipelines(d)
        report = alternating_line_sums(data.arr, data.cycles, data.points, data.matrix)
        assert len(report) == 2 * d + 2
        assert all(len(r["cycles"]) == d for r in report)
        assert all(r["in_radical"] and r["in_radical_reversed"] for r in report)


class TestPerturbation:
    @pytest.mark.parametrize("d", [2, 3])
    def test_small_epsilon_keeps_catalog_and_matrix(self, d, pipelines):
        from fractions import Fraction
        from monodromy_lab.pipeline import build_pipeline
        base = pipelines(d)
        pert = build_pipeline(d, Fraction(1, 1000))
        assert [c.name for c in pert.cycles] == [c.name for c in base.cycles]
        assert pert.matrix.entries == base.matrix.entries

    def test_epsilon_splits_the_reducible_fiber_group(self, pipelines):
        # the perturbation makes the fiber at value 1 irreducible, so its
        # mixed saddles no longer share one critical value
        from fractions import Fraction
        from monodromy_lab.pipeline import build_pipeline
        base = pipelines(2)
        pert = build_pipeline(2, Fraction(1, 1000))
        base_sizes = sorted(len(g.members) for g in base.groups)
        pert_sizes = sorted(len(g.members) for g in pert.groups)
        assert base_sizes == [1, 1, 1, 1, 2, 3, 3]
        assert pert_sizes == [1, 1, 1, 1, 1, 1, 3, 3]

    def test_perturbed_orbits_still_generate(self):
        from fractions import Fraction
        from monodromy_lab.monodromy import verify_orbit_generation
        from monodromy_lab.pipeline import build_pipeline
        pert = build_pipeline(2, Fraction(1, 1000))
        rep = verify_orbit_generation(pert.matrix, pert.cycles, pert.groups, pert.points)
        assert rep["pass"]


class TestDiagnosticsAndExport:
    def test_center_pair_report_shape(self, pipelines):
        data = pipelines(3)
        rep = center_pair_consistency(data.matrix, data.cycles, data.points)
        for item in rep:
            assert set(item) == {"pair", "predicted", "entry", "consistent"}
            assert item["entry"] in (-1, 0, 1)

    def test_csv_shape(self, pipelines):
        data = pipelines(2)
        text = matrix_to_csv(data.matrix, data.cycles)
        rows = text.strip().split("\n")
        assert len(rows) == 13
        assert rows[0].split(",")[0] == "deltaP_1"
        sigma_rows = rows[1 + data.matrix.blocks["sigma"].start:]
        assert all(set(r.split(",")) == {"0"} for r in sigma_rows)
