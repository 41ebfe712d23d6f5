import warnings

import numpy as np
import pytest

from rflt.mna import evaluate_netlist
from rflt.netlist import Inductor, MutualCoupling, Netlist, Port
from rflt.network import FrequencyGrid, passivity_margin, terminate_port
from rflt.nonideal import (
    MutualMatrix,
    apply_mutual_couplings,
    coupled_pair_count,
    coupled_tee_block,
    series_tee,
    winding_search,
)
from rflt.nonideal.coupling import _series_tee_node_pair

GRID = FrequencyGrid.log(0.5e9, 15e9, 21)


def stamp_pair_4port(l_aux, m, grid, z0=50.0):
    """Nodal oracle: two coupled inductors, all four terminals as ports."""
    nl = Netlist(
        (
            Inductor("La", ("n1", "n2"), l_aux),
            Inductor("Lb", ("n3", "n4"), l_aux),
            MutualCoupling("K", "La", "Lb", m / l_aux),
        ),
        tuple(Port((n, "0"), z0) for n in ("n1", "n2", "n3", "n4")),
    )
    return evaluate_netlist(nl, grid)


class TestSeriesTee:
    def test_is_unitary_junction(self):
        tee = series_tee(GRID)
        margin = passivity_margin(tee)
        assert np.abs(margin).max() < 1e-12  # lossless boundary

    def test_matrix_values(self):
        s = series_tee(GRID).s[0].real
        assert np.allclose(np.diag(s), 1.0 / 3.0, atol=1e-12)
        off = s[~np.eye(3, dtype=bool)]
        assert np.allclose(np.abs(off), 2.0 / 3.0, atol=1e-12)

    def test_short_on_port3_gives_thru(self):
        tee = _series_tee_node_pair(GRID, 50.0)
        thru = terminate_port(tee, 2, -1.0)
        assert np.allclose(thru.s[:, 0, 0], 0.0, atol=1e-12)
        assert np.allclose(np.abs(thru.s[:, 1, 0]), 1.0, atol=1e-12)
        # open on port 3 breaks the path entirely
        opened = terminate_port(tee, 2, 1.0)
        assert np.allclose(np.abs(opened.s[:, 0, 0]), 1.0, atol=1e-12)

    def test_short_via_port_reduction(self):
        # same thru behavior through the cascade machinery: connect a
        # reflective one-port (a tiny through-resistor to ground) to port 3
        from rflt.netlist import Resistor
        from rflt.network import NetworkData, connect_ports

        tee = _series_tee_node_pair(GRID, 50.0)
        short = NetworkData(
            GRID, -np.ones((len(GRID), 1, 1), dtype=complex), [50.0]
        )
        thru = connect_ports(tee, 2, short, 0)
        assert np.allclose(thru.s[:, 0, 0], 0.0, atol=1e-12)
        assert np.allclose(np.abs(thru.s[:, 1, 0]), 1.0, atol=1e-12)

    def test_known_impedance_on_port3_matches_netlist(self):
        # loading the series port with a 50-ohm one-port is electrically a
        # series 50-ohm resistor between the through ports: the classic
        # 1/3-2/3 divider, cross-checked by direct nodal evaluation
        from rflt.mna import evaluate_netlist as ev
        from rflt.netlist import Resistor
        from rflt.network import NetworkData, connect_ports, self_connect

        tee = _series_tee_node_pair(GRID, 50.0)
        r_load = Netlist(
            (Resistor("R", ("p", "0"), 50.0),), (Port(("p", "0"), 50.0),)
        )
        r_one_port = ev(r_load, GRID)
        via_connect = connect_ports(tee, 2, r_one_port, 0)
        divider = ev(
            Netlist(
                (Resistor("R", ("p1", "p2"), 50.0),),
                (Port(("p1", "0"), 50.0), Port(("p2", "0"), 50.0)),
            ),
            GRID,
        )
        assert np.abs(via_connect.s - divider.s).max() < 1e-12

        # the same join expressed through self_connect on a composite block
        comp = np.zeros((len(GRID), 4, 4), dtype=complex)
        comp[:, :3, :3] = tee.s
        comp[:, 3, 3] = r_one_port.s[:, 0, 0]
        block = NetworkData(GRID, comp, np.full(4, 50.0))
        via_self = self_connect(block, 2, 3)
        assert np.abs(via_self.s - divider.s).max() < 1e-12


class TestCoupledTeeBlock:
    def test_matches_nodal_stamp(self):
        rng = np.random.default_rng(3)
        for _ in range(40):
            l_aux = 10.0 ** rng.uniform(-12, -10)
            m = rng.uniform(-0.95, 0.95) * l_aux
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                blk = coupled_tee_block(100 * l_aux, 100 * l_aux, m, l_aux, GRID)
            ref = stamp_pair_4port(l_aux, m, GRID)
            assert np.abs(blk.s - ref.s).max() < 1e-6

    def test_zero_coupling_decouples(self):
        l_aux = 5e-12
        blk = coupled_tee_block(1e-9, 1e-9, 0.0, l_aux, GRID)
        # cross terms vanish: nothing couples path 1-2 to path 3-4
        assert np.abs(blk.s[:, :2, 2:]).max() < 1e-12
        ref = stamp_pair_4port(l_aux, 0.0, GRID)
        assert np.abs(blk.s - ref.s).max() < 1e-9

    @pytest.mark.parametrize("frac,limit", [(0.01, 1e-2), (0.001, 1e-3)])
    def test_small_insertion_perturbation(self, bp_netlist, frac, limit):
        # the block adds L_aux in series with the host inductor; the response
        # shift scales linearly with L_aux/L and stays a small perturbation
        host = next(e for e in bp_netlist.elements if e.name == "Ls_top1")
        l_aux = frac * host.henries
        grid = FrequencyGrid.linear(1e9, 14e9, 51)
        base = evaluate_netlist(bp_netlist, grid)
        modified = Netlist(
            tuple(
                Inductor(e.name, e.nodes, e.henries + l_aux)
                if e.name == "Ls_top1"
                else e
                for e in bp_netlist.elements
            ),
            bp_netlist.ports,
        )
        nd = evaluate_netlist(modified, grid)
        assert np.abs(nd.s - base.s).max() < limit

    def test_l_aux_bound(self):
        with pytest.raises(ValueError, match="l_aux"):
            coupled_tee_block(1e-9, 1e-9, 6e-12, 5e-12, GRID)

    def test_warns_when_l_aux_large(self):
        with pytest.warns(UserWarning, match="1%"):
            coupled_tee_block(1e-10, 1e-10, 1e-12, 5e-12, GRID)


def synthetic_matrix(netlist, scale, seed):
    labels = tuple(e.name for e in netlist.inductors())
    rng = np.random.default_rng(seed)
    n = len(labels)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = rng.uniform(-1.0, 1.0) * scale
    return MutualMatrix(labels, m)


class TestApplyCouplings:
    def test_infinite_threshold_is_identity(self, bp_netlist):
        mm = synthetic_matrix(bp_netlist, 2e-11, 0)
        out = apply_mutual_couplings(bp_netlist, mm, [1] * 8, threshold=np.inf)
        assert len(out.elements) == len(bp_netlist.elements)

    def test_global_sign_flip_is_gauge(self, bp_netlist):
        mm = synthetic_matrix(bp_netlist, 2e-11, 0)
        grid = FrequencyGrid.linear(2e9, 12e9, 31)
        signs = [1, -1, 1, 1, -1, 1, -1, 1]
        a = evaluate_netlist(apply_mutual_couplings(bp_netlist, mm, signs), grid)
        b = evaluate_netlist(
            apply_mutual_couplings(bp_netlist, mm, [-s for s in signs]), grid
        )
        assert np.abs(a.s - b.s).max() < 1e-14

    def test_winding_signs_recorded(self, bp_netlist):
        mm = synthetic_matrix(bp_netlist, 1e-11, 0)
        signs = [1, -1, 1, 1, -1, 1, -1, 1]
        out = apply_mutual_couplings(bp_netlist, mm, signs)
        got = [e.winding_sign for e in out.inductors()]
        assert got == signs

    def test_label_mismatch_rejected(self, bp_netlist):
        mm = MutualMatrix(("nope", "Ls_top1"), np.zeros((2, 2)))
        with pytest.raises(ValueError, match="not found"):
            apply_mutual_couplings(bp_netlist, mm, [1, 1])

    def test_threshold_truncates_search_space(self, bp_netlist):
        mm = synthetic_matrix(bp_netlist, 2e-11, 5)
        full = coupled_pair_count(mm, 0.0)
        assert full == 28  # all 8-choose-2 pairs
        # raising the threshold cuts the retained couplings sharply, the
        # step that shrinks the winding search space
        strong = coupled_pair_count(mm, 1.5e-11)
        assert 0 < strong < full
        assert strong == 10  # frozen for this seeded matrix


class TestWindingSearch:
    def test_zero_matrix_all_patterns_equal(self, bp_netlist):
        labels = tuple(e.name for e in bp_netlist.inductors())
        mm = MutualMatrix(labels[:4], np.zeros((4, 4)))
        grid = FrequencyGrid.linear(3e9, 11e9, 21)
        best, obj, table = winding_search(bp_netlist, mm, grid, objective_band=(4e9, 10e9))
        assert len(table) == 2 ** 3
        objs = [o for _, o in table]
        assert np.ptp(objs) < 1e-15
        assert best == (1, 1, 1, 1)

    def test_best_dominates_all_plus(self, bp_netlist):
        mm = synthetic_matrix(bp_netlist, 1.5e-11, 2)
        grid = FrequencyGrid.linear(3e9, 11e9, 41)
        best, obj, table = winding_search(bp_netlist, mm, grid, objective_band=(4.8e9, 10e9))
        all_plus = dict((tuple(s), o) for s, o in table)[(1,) * 8]
        assert obj <= all_plus
        assert obj == min(o for _, o in table)
        # couplings visibly degrade the worst pattern relative to the best
        assert max(o for _, o in table) > 1.5 * obj

    def test_search_size_and_gauge(self, bp_netlist):
        mm = synthetic_matrix(bp_netlist, 1e-11, 3)
        grid = FrequencyGrid.linear(3e9, 11e9, 21)
        _, _, table = winding_search(bp_netlist, mm, grid, objective_band=(4.8e9, 10e9))
        assert len(table) == 2 ** 7
        assert all(s[0] == 1 for s, _ in table)

    def test_active_only_shrinks_enumeration(self, bp_netlist):
        mm = synthetic_matrix(bp_netlist, 2e-11, 5)
        grid = FrequencyGrid.linear(3e9, 11e9, 11)
        thr = 1.8e-11
        active = set()
        for a, b, _ in mm.pairs(thr):
            active.update((a, b))
        assert 1 < len(active) < 8  # the threshold really prunes inductors
        _, _, table = winding_search(
            bp_netlist, mm, grid, objective_band=(4.8e9, 10e9),
            threshold=thr, active_only=True,
        )
        assert len(table) == 2 ** (len(active) - 1)

    def test_relabeling_invariance(self, bp_netlist):
        # permuting matrix labels permutes the best pattern identically
        mm = synthetic_matrix(bp_netlist, 1.5e-11, 7)
        grid = FrequencyGrid.linear(3e9, 11e9, 31)
        best, obj, _ = winding_search(bp_netlist, mm, grid, objective_band=(4.8e9, 10e9))
        perm = list(range(len(mm.labels)))[::-1]
        mm2 = MutualMatrix(
            tuple(mm.labels[i] for i in perm), mm.m[np.ix_(perm, perm)]
        )
        best2, obj2, _ = winding_search(bp_netlist, mm2, grid, objective_band=(4.8e9, 10e9))
        assert np.isclose(obj, obj2, rtol=1e-12)
        by_label = dict(zip(mm2.labels, best2))
        remapped = tuple(by_label[lab] for lab in mm.labels)
        # equal up to the global gauge flip
        assert remapped == best or tuple(-s for s in remapped) == best
