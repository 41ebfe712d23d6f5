import numpy as np
import pytest

from rflt.errors import ExtrapolationError, ToolkitError
from rflt.netlist import Polyline3D
from rflt.nonideal import MU0, MutualMatrix, mutual_fit, neumann_mutual, spiral_path
from rflt.nonideal.mutual import mutual_matrix_from_json, mutual_matrix_from_paths, mutual_matrix_to_json


def straight_filament(x0, y0, length, n):
    z = np.linspace(0.0, length, n + 1)
    return Polyline3D(np.column_stack([np.full(n + 1, x0), np.full(n + 1, y0), z]))


def parallel_filament_analytic(length, d):
    r = length / d
    return (
        MU0
        * length
        / (2 * np.pi)
        * (np.log(r + np.sqrt(1 + r**2)) - np.sqrt(1 + 1 / r**2) + 1 / r)
    )


class TestNeumann:
    def test_parallel_filaments_vs_analytic(self):
        length, d = 1e-3, 0.1e-3
        exact = parallel_filament_analytic(length, d)
        assert abs(exact - 0.4186e-9) < 1e-13  # ~0.42 nH sanity anchor
        m = neumann_mutual(straight_filament(0, 0, length, 64), straight_filament(d, 0, length, 64))
        assert abs(m - exact) / exact < 0.01

    def test_refinement_convergence_order(self):
        length, d = 1e-3, 0.1e-3
        exact = parallel_filament_analytic(length, d)
        errs = [
            abs(neumann_mutual(straight_filament(0, 0, length, n),
                               straight_filament(d, 0, length, n)) - exact)
            for n in (16, 32, 64)
        ]
        ratios = [errs[0] / errs[1], errs[1] / errs[2]]
        # consistent convergence order across three levels (second order)
        assert all(2.5 < r < 6.0 for r in ratios)

    def test_orientation_flip_negates_exactly(self):
        a = straight_filament(0, 0, 1e-3, 32)
        b = straight_filament(0.2e-3, 0.1e-3, 1e-3, 48)
        assert neumann_mutual(a, b.reversed()) == -neumann_mutual(a, b)

    def test_symmetry(self):
        a = straight_filament(0, 0, 1e-3, 17)
        b = straight_filament(0.3e-3, 0, 0.7e-3, 23)
        assert neumann_mutual(a, b) == neumann_mutual(b, a)

    def test_perpendicular_cross_is_zero(self):
        a = Polyline3D(np.array([[-0.5e-3, 0, 0], [0.5e-3, 0, 0]]))
        b = Polyline3D(np.array([[0, -0.5e-3, 1e-4], [0, 0.5e-3, 1e-4]]))
        assert neumann_mutual(a, b) == 0.0

    def test_uniform_scaling_law(self):
        a = straight_filament(0, 0, 1e-3, 20)
        b = straight_filament(0.15e-3, 0, 1e-3, 20)
        m1 = neumann_mutual(a, b)
        m3 = neumann_mutual(a.scaled(3.0), b.scaled(3.0))
        assert np.isclose(m3, 3.0 * m1, rtol=1e-12)

    def test_near_singular_pair_rejected(self):
        a = straight_filament(0, 0, 1e-3, 8)
        b = straight_filament(1e-12, 0, 1e-3, 8)
        with pytest.raises(ToolkitError, match="filament approximation"):
            neumann_mutual(a, b)


class TestSpiral:
    def test_vertex_count(self):
        sp = spiral_path(3, 20e-6, 200e-6, segments_per_turn=8)
        assert sp.vertices.shape == (3 * 8 + 1, 3)

    def test_handedness_flip_negates(self):
        other = spiral_path(2, 15e-6, 150e-6, 8, center=(400e-6, 50e-6, 0))
        ccw = spiral_path(3, 20e-6, 200e-6, 8)
        cw = spiral_path(3, 20e-6, 200e-6, 8, handedness="cw")
        assert neumann_mutual(cw, other) == -neumann_mutual(ccw, other)

    def test_monotone_decay_with_distance(self):
        base = spiral_path(3, 20e-6, 200e-6, 8)
        dists = np.linspace(350e-6, 1.5e-3, 9)
        mags = [
            abs(neumann_mutual(base, spiral_path(3, 20e-6, 200e-6, 8, center=(d, 0, 0))))
            for d in dists
        ]
        assert all(np.diff(mags) < 0)

    def test_plane_orientation(self):
        sp = spiral_path(2, 10e-6, 100e-6, 4, plane="xz")
        assert np.allclose(sp.vertices[:, 1], 0.0)

    def test_self_intersection_rejected(self):
        with pytest.raises(ToolkitError, match="self-intersect"):
            spiral_path(6, 50e-6, 120e-6, 4)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            spiral_path(2, 10e-6, 100e-6, segments_per_turn=6)
        with pytest.raises(ValueError):
            spiral_path(0, 10e-6, 100e-6)


class TestMutualFit:
    def grid_samples(self):
        base = spiral_path(3, 20e-6, 200e-6, 8)
        dxs = np.linspace(300e-6, 750e-6, 7)
        dys = np.linspace(0.0, 400e-6, 5)
        samples = []
        for dx in dxs:
            for dy in dys:
                m = neumann_mutual(base, spiral_path(3, 20e-6, 200e-6, 8, center=(dx, dy, 0)))
                samples.append((dx, dy, m))
        return samples

    def test_nodes_reproduced_exactly(self):
        samples = self.grid_samples()
        fit = mutual_fit(samples)
        for dx, dy, m in samples:
            assert fit(dx, dy) == pytest.approx(m, rel=1e-14)

    def test_cell_midpoint_is_corner_average(self):
        samples = [(0.0, 0.0, 1.0), (0.0, 1.0, 2.0), (1.0, 0.0, 3.0), (1.0, 1.0, 4.0)]
        fit = mutual_fit(samples)
        assert fit(0.5, 0.5) == pytest.approx(2.5, rel=1e-14)

    def test_extrapolation_rejected(self):
        fit = mutual_fit(self.grid_samples())
        with pytest.raises(ExtrapolationError):
            fit(1e-3, 0.0)

    def test_held_out_accuracy(self):
        samples = self.grid_samples()
        fit = mutual_fit(samples)
        base = spiral_path(3, 20e-6, 200e-6, 8)
        for dx, dy in ((520e-6, 100e-6), (400e-6, 300e-6)):
            truth = neumann_mutual(base, spiral_path(3, 20e-6, 200e-6, 8, center=(dx, dy, 0)))
            assert abs(fit(dx, dy) - truth) / abs(truth) < 0.05

    def test_degenerate_samples_rejected(self):
        with pytest.raises(ValueError):
            mutual_fit([(0, 0, 1.0), (0, 1, 2.0), (0, 2, 3.0), (0, 3, 4.0)])
        with pytest.raises(ValueError):
            mutual_fit([(0, 0, 1.0), (1, 1, 2.0), (0, 1, 3.0)])


class TestMutualMatrix:
    def test_symmetry_enforced(self):
        with pytest.raises(ValueError, match="symmetric"):
            MutualMatrix(("a", "b"), np.array([[0.0, 1e-12], [2e-12, 0.0]]))

    def test_from_paths_and_json_round_trip(self):
        paths = [
            spiral_path(2, 15e-6, 150e-6, 8, center=(i * 400e-6, 0, 0)) for i in range(3)
        ]
        mm = mutual_matrix_from_paths(("a", "b", "c"), paths)
        assert mm.value("a", "b") == mm.value("b", "a") != 0.0
        back = mutual_matrix_from_json(mutual_matrix_to_json(mm))
        assert back.labels == mm.labels
        assert np.array_equal(back.m, mm.m)

    def test_pairs_threshold(self):
        m = np.array([[0, 1e-12, 5e-12], [1e-12, 0, 2e-13], [5e-12, 2e-13, 0]])
        mm = MutualMatrix(("a", "b", "c"), m)
        assert len(mm.pairs(0.0)) == 3
        assert len(mm.pairs(5e-13)) == 2
        assert len(mm.pairs(1e-11)) == 0
