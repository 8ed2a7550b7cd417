"""Synthetic models, Haar transform, experiment driver, CSV round trip."""

import numpy as np
import pytest

import structsparse as ss
from structsparse import haar
from structsparse.experiments import (CSV_HEADER, ExperimentSpec, ResultRecord,
                                      default_rho_grid, gaussian_design,
                                      generate_output, make_region_model_1d,
                                      make_region_model_2d, model_error,
                                      prox_benchmark, read_csv, run_experiment,
                                      summarize, write_csv)


def region_runs(beta):
    """Lengths of the maximal nonzero runs of a 1D vector."""
    runs, current = [], 0
    for b in beta:
        if b != 0:
            current += 1
        elif current:
            runs.append(current)
            current = 0
    if current:
        runs.append(current)
    return runs


class TestRegionModels:
    def test_1d_preset_lengths(self):
        rng = np.random.default_rng(0)
        for regions, length in [(1, 20), (2, 10), (3, 7), (4, 5)]:
            beta = make_region_model_1d(200, regions, 20, rng)
            assert region_runs(beta) == [length] * regions
            assert set(np.unique(beta)) <= {-1.0, 0.0, 1.0}

    def test_1d_gaps_between_regions(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            beta = make_region_model_1d(60, 3, 12, rng)
            assert region_runs(beta) == [4, 4, 4]

    def test_1d_rejects_impossible_packing(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            make_region_model_1d(10, 2, 20, rng)
        with pytest.raises(ValueError):
            make_region_model_1d(100, 3, 2, rng)

    def test_2d_preset_cell_counts(self):
        rng = np.random.default_rng(3)
        for preset, count in [("one_5x5", 25), ("two_4x4_3x3", 25),
                              ("three_3x3", 27), ("four_3x2", 24)]:
            beta = make_region_model_2d(20, 20, preset, rng)
            assert int(np.sum(beta != 0)) == count

    def test_2d_regions_separated(self):
        # a one-cell halo means no two distinct regions touch
        rng = np.random.default_rng(4)
        from scipy.ndimage import label
        for _ in range(20):
            beta = make_region_model_2d(20, 20, "two_4x4_3x3", rng)
            _, n_components = label(beta != 0)
            assert n_components == 2

    def test_2d_unknown_preset(self):
        with pytest.raises(ValueError):
            make_region_model_2d(20, 20, "nope", np.random.default_rng(0))


class TestDataGeneration:
    def test_design_shape_and_determinism(self):
        X1 = gaussian_design(5, 3, np.random.default_rng(7))
        X2 = gaussian_design(5, 3, np.random.default_rng(7))
        assert X1.shape == (5, 3)
        np.testing.assert_array_equal(X1, X2)

    def test_noiseless_output_exact(self):
        rng = np.random.default_rng(8)
        X = gaussian_design(6, 4, rng)
        beta = np.array([1.0, 0.0, -2.0, 0.5])
        np.testing.assert_array_equal(generate_output(X, beta, 0.0, rng), X @ beta)

    def test_model_error_scale_free(self):
        beta = np.array([1.0, 2.0])
        assert model_error(beta, beta) == 0.0
        assert np.isclose(model_error(np.zeros(2), beta), 1.0)

    def test_default_rho_grid_monotone(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((10, 5))
        y = rng.standard_normal(10)
        grid = default_rho_grid(X, y)
        assert len(grid) == 8 and all(np.diff(grid) > 0)


class TestHaar:
    def test_round_trip_identity(self):
        rng = np.random.default_rng(10)
        for side in (2, 4, 8, 16):
            image = rng.standard_normal((side, side))
            np.testing.assert_allclose(haar.ihaar2d(haar.haar2d(image)), image,
                                       atol=1e-10)

    def test_orthonormal(self):
        rng = np.random.default_rng(11)
        image = rng.standard_normal((8, 8))
        assert np.isclose(np.linalg.norm(haar.haar2d(image)),
                          np.linalg.norm(image))

    def test_constant_image_single_coefficient(self):
        coeffs = haar.haar2d(np.ones((8, 8)))
        assert np.isclose(coeffs[0, 0], 8.0)
        assert np.sum(np.abs(coeffs) > 1e-12) == 1

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            haar.haar2d(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            haar.haar2d(np.zeros((4, 6)))

    def test_quadtree_parent_structure(self):
        side = 8
        parents = haar.quadtree_parents(side)
        assert parents[0] == 0  # root is its own parent
        # the three coarsest details hang off the root
        for (i, j) in ((0, 1), (1, 0), (1, 1)):
            assert parents[i * side + j] == 0
        # every non-root strictly decreases in flat index toward the root
        for i in range(1, side * side):
            assert parents[i] < i
        emap = ss.tree_edge_map(parents)
        assert emap.k == side * side - 1

    def test_quadtree_children_share_subband(self):
        # the four children of a detail coefficient sit one level finer
        side = 8
        parents = haar.quadtree_parents(side)
        p = 2 * side + 3  # detail at (2, 3), coarse level
        children = np.flatnonzero(parents == p)
        assert len(children) == 4
        for c in children:
            i, j = divmod(int(c), side)
            assert (i // 2, j // 2) == (2, 3)

    def test_piecewise_constant_coefficients_sparse(self):
        rng = np.random.default_rng(12)
        beta, tree = haar.haar_tree_setup(16, rng)
        assert beta.shape == (256,)
        assert tree.k == 255
        sparsity = int(np.sum(np.abs(beta) > 1e-10))
        assert 0 < sparsity < 256 // 2


class TestExperimentSpec:
    def test_defaults_per_kind(self):
        spec = ExperimentSpec(kind="regions1d")
        assert spec.methods == ["lasso", "grid_c"]
        assert spec.sample_sizes == [22, 40, 60, 80, 100]
        spec2 = ExperimentSpec(kind="scaling")
        assert spec2.methods == ["grid_c"]

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            ExperimentSpec(kind="mystery")

    def test_json_round_trip(self):
        spec = ExperimentSpec(kind="regions2d", runs=3, seed=5)
        clone = ExperimentSpec.from_json(spec.to_json())
        assert clone == spec

    def test_record_rejects_negative_error(self):
        with pytest.raises(ValueError):
            ResultRecord("lasso", 10, 0, -0.1, 1.0, 5.0, 0.1)


class TestExperimentDriver:
    def tiny_spec(self, seed=0):
        return ExperimentSpec(kind="regions1d", n=40, sparsity=8,
                              region_count=2, sample_sizes=[30], runs=2,
                              rho_grid=[0.05, 0.5], alpha_grid=[1.0],
                              max_outer=400, seed=seed)

    def test_record_layout(self):
        records = run_experiment(self.tiny_spec())
        assert len(records) == 4  # 2 methods x 2 runs
        methods = {r.method for r in records}
        assert methods == {"lasso", "grid_c"}
        for r in records:
            assert r.m == 30 and r.model_error >= 0.0
            if r.method == "grid_c":
                assert r.alpha_selected == 1.0
            else:
                assert r.alpha_selected is None

    def test_determinism_of_non_timing_fields(self):
        a = run_experiment(self.tiny_spec(seed=3))
        b = run_experiment(self.tiny_spec(seed=3))
        for ra, rb in zip(a, b):
            assert (ra.method, ra.m, ra.run) == (rb.method, rb.m, rb.run)
            assert ra.model_error == rb.model_error
            assert ra.rho_selected == rb.rho_selected

    def test_seed_changes_data(self):
        a = run_experiment(self.tiny_spec(seed=3))
        b = run_experiment(self.tiny_spec(seed=4))
        assert any(ra.model_error != rb.model_error for ra, rb in zip(a, b))

    def test_validation_selection_runs(self):
        spec = self.tiny_spec()
        spec.selection = "validation"
        records = run_experiment(spec)
        assert len(records) == 4

    def test_scaling_kind(self):
        spec = ExperimentSpec(kind="scaling", sample_sizes=[64], runs=2)
        records = run_experiment(spec)
        assert len(records) == 1
        assert records[0].m == 64
        assert records[0].inner_iters_mean > 0

    def test_scaling_rejects_non_square(self):
        spec = ExperimentSpec(kind="scaling", sample_sizes=[60], runs=1)
        with pytest.raises(ValueError):
            run_experiment(spec)

    def test_wavelet_kind_smoke(self):
        spec = ExperimentSpec(kind="wavelet_tree", rows=8, cols=8, runs=1,
                              rho_grid=[0.1], max_outer=200, seed=1)
        records = run_experiment(spec)
        assert {r.method for r in records} == {"lasso", "tree_c"}
        for r in records:
            assert r.m > 0  # three times the per-run model sparsity

    def test_prox_benchmark_output(self):
        cons = ss.grid_constraint_1d(50, 1.0)
        iters, ms, std = prox_benchmark(cons, 0.25, 3, np.random.default_rng(0))
        assert iters >= 1.0 and ms > 0.0 and std >= 0.0


class TestCsvRoundTrip:
    def test_round_trip(self, tmp_path):
        records = [
            # values chosen to survive the 10-significant-digit CSV format
            ResultRecord("lasso", 40, 0, 0.5123456789, 12.5, 0.0, 0.1, None),
            ResultRecord("grid_c", 40, 1, 0.25, 80.0, 33.5, 0.05, 2.0),
        ]
        path = tmp_path / "out.csv"
        write_csv(records, path)
        back = read_csv(path)
        assert back == records

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_csv(path)

    def test_summary_lines(self):
        records = [ResultRecord("lasso", 40, r, 0.5, 1.0, 0.0, 0.1) for r in range(3)]
        lines = summarize(records)
        assert len(lines) == 1
        assert "lasso m=40" in lines[0] and "0.5000" in lines[0]
