import numpy as np
import pytest

from rflt.errors import GridMismatchError, PortMismatchError
from rflt.network import (
    FrequencyGrid,
    NetworkData,
    connect_ports,
    ideal_thru,
    insertion_loss_db,
    matched_attenuator,
    modes_from_symmetric_two_port,
    passivity_margin,
    return_loss_db,
    self_connect,
    symmetric_two_port_from_modes,
    terminate_port,
)

GRID = FrequencyGrid.linear(1e9, 10e9, 16)


def rand_network(rng, grid, nports, passive=True):
    s = rng.normal(size=(len(grid), nports, nports)) + 1j * rng.normal(
        size=(len(grid), nports, nports)
    )
    if passive:
        # scale so the largest singular value stays below 1
        smax = np.linalg.norm(s, ord=2, axis=(1, 2)).max()
        s = 0.8 * s / smax
    return NetworkData(grid, s, np.full(nports, 50.0))


class TestFrequencyGrid:
    def test_invariants(self):
        with pytest.raises(ValueError):
            FrequencyGrid(np.array([]))
        with pytest.raises(ValueError):
            FrequencyGrid(np.array([0.0, 1e9]))
        with pytest.raises(ValueError):
            FrequencyGrid(np.array([2e9, 1e9]))
        with pytest.raises(ValueError):
            FrequencyGrid(np.array([1e9, 1e9]))

    def test_log_linear(self):
        g = FrequencyGrid.log(1e8, 1e10, 5)
        assert np.allclose(np.diff(np.log(g.points)), np.log(100) / 4)
        g2 = FrequencyGrid.linear(1e9, 2e9, 3)
        assert np.allclose(g2.points, [1e9, 1.5e9, 2e9])

    def test_immutable(self):
        g = FrequencyGrid.linear(1e9, 2e9, 3)
        with pytest.raises(ValueError):
            g.points[0] = 5.0


class TestNetworkData:
    def test_shape_checks(self):
        with pytest.raises(ValueError):
            NetworkData(GRID, np.zeros((3, 2, 2)), [50, 50])
        bad = np.zeros((len(GRID), 2, 2), dtype=complex)
        bad[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            NetworkData(GRID, bad, [50, 50])
        with pytest.raises(ValueError):
            NetworkData(GRID, np.zeros((len(GRID), 2, 2)), [50, -50])

    def test_param_indexing(self):
        thru = ideal_thru(GRID)
        assert np.all(thru.param(2, 1) == 1.0)
        assert np.all(thru.param(1, 1) == 0.0)


class TestConnect:
    def test_thru_identity(self):
        rng = np.random.default_rng(0)
        a = rand_network(rng, GRID, 3)
        for port in range(3):
            joined = connect_ports(a, port, ideal_thru(GRID), 0)
            # moved port sits at the end of the ordering; restore it
            order = list(range(2))
            order.insert(port, 2)
            back = joined.renumbered(order)
            assert np.allclose(back.s, a.s, atol=1e-12)

    def test_attenuator_cascade(self):
        c = connect_ports(matched_attenuator(GRID, 3.0), 1, matched_attenuator(GRID, 3.0), 0)
        assert np.allclose(np.abs(c.param(2, 1)), 10 ** (-6.0 / 20.0), atol=1e-12)
        assert np.allclose(c.param(1, 1), 0.0, atol=1e-12)

    def test_associativity(self):
        rng = np.random.default_rng(1)
        a = rand_network(rng, GRID, 2)
        b = rand_network(rng, GRID, 2)
        c = rand_network(rng, GRID, 2)
        left = connect_ports(connect_ports(a, 1, b, 0), 1, c, 0)
        right = connect_ports(a, 1, connect_ports(b, 1, c, 0), 0)
        assert np.allclose(left.s, right.s, atol=1e-10)

    def test_grid_and_z0_mismatch(self):
        other = ideal_thru(FrequencyGrid.linear(1e9, 10e9, 17))
        with pytest.raises(GridMismatchError):
            connect_ports(ideal_thru(GRID), 1, other, 0)
        mixed = NetworkData(GRID, ideal_thru(GRID).s, [50.0, 75.0])
        with pytest.raises(PortMismatchError):
            connect_ports(ideal_thru(GRID), 1, mixed, 1)

    def test_self_connect_parallel_thrus(self):
        # two independent thrus as a 4-port; joining one output to the other
        # input leaves an ideal thru between the remaining ports
        nf = len(GRID)
        s = np.zeros((nf, 4, 4), dtype=complex)
        s[:, 0, 1] = s[:, 1, 0] = 1.0
        s[:, 2, 3] = s[:, 3, 2] = 1.0
        four = NetworkData(GRID, s, np.full(4, 50.0))
        two = self_connect(four, 1, 2)
        assert np.allclose(two.param(2, 1), 1.0, atol=1e-12)
        assert np.allclose(two.param(1, 1), 0.0, atol=1e-12)

    def test_self_connect_matches_connect(self):
        rng = np.random.default_rng(2)
        a = rand_network(rng, GRID, 2)
        b = rand_network(rng, GRID, 2)
        via_connect = connect_ports(a, 1, b, 0)
        nf = len(GRID)
        comp = np.zeros((nf, 4, 4), dtype=complex)
        comp[:, :2, :2] = a.s
        comp[:, 2:, 2:] = b.s
        via_self = self_connect(NetworkData(GRID, comp, np.full(4, 50.0)), 1, 2)
        assert np.allclose(via_connect.s, via_self.s, atol=1e-12)


class TestModes:
    def test_empty_plane_is_thru(self):
        nf = len(GRID)
        nd = symmetric_two_port_from_modes(GRID, np.ones(nf), -np.ones(nf))
        assert np.allclose(nd.s, ideal_thru(GRID).s)

    def test_antisymmetric_modes_reflectionless(self):
        rng = np.random.default_rng(3)
        g = 0.7 * (rng.normal(size=len(GRID)) + 1j * rng.normal(size=len(GRID)))
        g /= max(1.0, np.abs(g).max() / 0.9)
        nd = symmetric_two_port_from_modes(GRID, g, -g)
        assert np.allclose(nd.param(1, 1), 0.0)
        assert np.allclose(nd.param(2, 1), g)

    def test_identical_modes_fully_reflective(self):
        g = 0.5 * np.exp(1j * np.linspace(0, 3, len(GRID)))
        nd = symmetric_two_port_from_modes(GRID, g, g)
        assert np.allclose(nd.param(1, 1), g)
        assert np.allclose(nd.param(2, 1), 0.0)

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        ge = 0.4 * (rng.normal(size=len(GRID)) + 1j * rng.normal(size=len(GRID)))
        go = 0.4 * (rng.normal(size=len(GRID)) + 1j * rng.normal(size=len(GRID)))
        nd = symmetric_two_port_from_modes(GRID, ge, go)
        ge2, go2 = modes_from_symmetric_two_port(nd)
        assert np.allclose(ge2, ge) and np.allclose(go2, go)


class TestPassivityAndLoss:
    def test_thru_margin_zero(self):
        assert np.allclose(passivity_margin(ideal_thru(GRID)), 0.0, atol=1e-12)

    def test_attenuator_margin(self):
        m = passivity_margin(matched_attenuator(GRID, 6.0))
        assert np.allclose(m, 1.0 - 10 ** (-0.6), atol=1e-12)

    def test_return_and_insertion_loss(self):
        nf = len(GRID)
        s = np.zeros((nf, 2, 2), dtype=complex)
        s[:, 0, 0] = 0.31622776601683794
        s[:, 1, 0] = s[:, 0, 1] = 0.5011872336272722
        nd = NetworkData(GRID, s, [50.0, 50.0])
        assert np.allclose(return_loss_db(nd, 1), 10.0)
        assert np.allclose(insertion_loss_db(nd, 1, 2), 6.0)
        assert np.all(np.isinf(return_loss_db(ideal_thru(GRID), 1)))
        assert np.allclose(insertion_loss_db(ideal_thru(GRID), 1, 2), 0.0)


class TestTerminate:
    def test_short_on_thru_reflects(self):
        one = terminate_port(ideal_thru(GRID), 1, -1.0)
        assert np.allclose(one.s[:, 0, 0], -1.0)
