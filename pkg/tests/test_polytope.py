import numpy as np
import pytest

from locallearn import polytope
from locallearn.polytope import ProblemDims, PseudoMomentMatrix


def labeling_matrix(dims, labels):
    v = np.zeros(dims.side)
    for i, a in enumerate(labels):
        v[dims.index(i, a)] = 1.0
    return PseudoMomentMatrix(dims, np.outer(v, v))


class TestDims:
    def test_side_and_index(self):
        dims = ProblemDims(3, 4)
        assert dims.side == 12
        assert dims.index(0, 0) == 0
        assert dims.index(2, 3) == 11

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            ProblemDims(0, 2)
        with pytest.raises(ValueError):
            ProblemDims(2, 0)


class TestFeasibility:
    def test_uniform_is_feasible(self):
        for n in (1, 2, 4):
            for L in (1, 2, 3):
                M = polytope.uniform_matrix(ProblemDims(n, L))
                assert polytope.is_feasible(M)

    def test_labeling_matrices_are_feasible(self):
        dims = ProblemDims(3, 2)
        for labels in [(0, 0, 0), (1, 0, 1), (0, 1, 1)]:
            assert polytope.is_feasible(labeling_matrix(dims, labels))

    def test_detects_each_violation(self):
        dims = ProblemDims(2, 2)
        M = polytope.uniform_matrix(dims)

        bad = M.copy()
        bad.entries[0, 1] += 0.5  # asymmetric
        assert polytope.is_feasible(bad).max_asymmetry > 0.1

        bad = M.copy()
        bad.entries += 0.5  # block sums off
        assert polytope.is_feasible(bad).block_sum_violation > 0.1

        bad = PseudoMomentMatrix(dims, np.diag([1.0, -0.5, 0.25, 0.25]))
        rep = polytope.is_feasible(bad)
        assert rep.box_violation > 0.1 and rep.min_eigenvalue < -0.1
        assert not rep

    def test_rejects_negative_tol(self):
        M = polytope.uniform_matrix(ProblemDims(2, 2))
        with pytest.raises(ValueError):
            polytope.is_feasible(M, tol=-1.0)


class TestProjection:
    def test_feasible_point_is_fixed(self):
        dims = ProblemDims(2, 3)
        M = polytope.uniform_matrix(dims)
        res = polytope.project(M.entries, dims)
        assert res.converged
        assert np.allclose(res.matrix.entries, M.entries, atol=1e-8)

    def test_output_is_feasible(self):
        rng = np.random.default_rng(5)
        for dims in (ProblemDims(2, 2), ProblemDims(3, 2), ProblemDims(2, 3)):
            raw = rng.uniform(-1.0, 1.5, size=(dims.side, dims.side))
            raw = 0.5 * (raw + raw.T)
            res = polytope.project(raw, dims)
            assert res.converged
            assert polytope.is_feasible(res.matrix, tol=1e-6)

    def test_projection_is_nearest_among_probes(self):
        # no feasible probe point may be closer to the input than the output
        dims = ProblemDims(2, 2)
        rng = np.random.default_rng(6)
        raw = 0.5 * rng.standard_normal((4, 4))
        raw = 0.5 * (raw + raw.T)
        proj = polytope.project(raw, dims).matrix.entries
        d_proj = np.linalg.norm(proj - raw)
        for labels in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            probe = labeling_matrix(dims, labels).entries
            assert np.linalg.norm(probe - raw) >= d_proj - 1e-9

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            polytope.project(np.eye(3), ProblemDims(2, 2))

    def test_forced_kernel(self):
        # feasible matrices annihilate u_i - u_j for item indicators u_i
        dims = ProblemDims(3, 2)
        rng = np.random.default_rng(7)
        raw = rng.uniform(-0.5, 1.0, size=(6, 6))
        M = polytope.project(0.5 * (raw + raw.T), dims).matrix.entries
        u = np.zeros((3, 6))
        for i in range(3):
            u[i, 2 * i:2 * i + 2] = 1.0
        for i in range(3):
            for j in range(i + 1, 3):
                assert np.linalg.norm(M @ (u[i] - u[j])) < 1e-7


class TestSampling:
    def test_distribution_matches_block(self):
        dims = ProblemDims(2, 2)
        M = labeling_matrix(dims, (0, 1))
        rng = np.random.default_rng(0)
        draws = {polytope.sample_block(M, 0, 1, rng)[:2] for _ in range(20)}
        assert draws == {(0, 1)}

    def test_negative_entries_clamped(self):
        dims = ProblemDims(2, 2)
        M = polytope.uniform_matrix(dims)
        M.entries[0, 2] = -0.3
        rng = np.random.default_rng(1)
        for _ in range(50):
            s = polytope.sample_block(M, 0, 1, rng)
            assert (s.a, s.b) != (0, 0)
            assert not s.uniform_fallback

    def test_uniform_fallback_flag(self):
        dims = ProblemDims(2, 2)
        M = PseudoMomentMatrix(dims, np.zeros((4, 4)))
        rng = np.random.default_rng(2)
        assert polytope.sample_block(M, 0, 1, rng).uniform_fallback

    def test_same_item_rejected(self):
        M = polytope.uniform_matrix(ProblemDims(2, 2))
        with pytest.raises(ValueError):
            polytope.sample_block(M, 1, 1, np.random.default_rng(0))


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        dims = ProblemDims(3, 2)
        rng = np.random.default_rng(9)
        raw = rng.uniform(0.0, 1.0, size=(6, 6))
        M = polytope.project(0.5 * (raw + raw.T), dims).matrix
        path = tmp_path / "m.txt"
        polytope.save_matrix(M, path)
        back = polytope.load_matrix(path)
        assert back.dims == dims
        assert np.array_equal(back.entries, M.entries)
