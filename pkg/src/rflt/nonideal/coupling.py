"""Inductive cross-coupling: tee insertion blocks and the winding-sign search.

Coupled inductor pairs enter the analysis by two equivalent routes that are
cross-checked against each other:

* the nodal route: a ``MutualCoupling`` element stamps the inductance matrix
  [[L1, M], [M, L2]] directly into the branch equations;
* the cascade route: a four-port built from two ideal series-tee junctions
  bridged by the tee {L_aux - M, L_aux - M, shunt M}, inserted in series with
  each physical inductor by pure S-parameter connection.

Note on the series-tee junction matrix: the only lossless, reciprocal,
matched-diagonal junctions have off-diagonal signs whose product is negative.
The matrix printed in the source material has sign pattern (-, -, +) at
(1,2)/(1,3)/(2,3), whose product is positive; that matrix violates the
passivity bound I - S^H S >= 0 (its gram matrix has eigenvalue 25/9) and is
taken to carry a sign typo.  :func:`series_tee` returns the self-consistent
all-minus form S = I - (2/3) ones, which matches the printed magnitudes in
every entry and the printed signs in all but the (2,3)/(3,2) pair.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import replace

import numpy as np

from ..mna import evaluate_netlist
from ..netlist import MutualCoupling, Netlist
from ..network import FrequencyGrid, NetworkData, connect_ports
from ..synth import passband_window
from .mutual import MutualMatrix


def series_tee(grid: FrequencyGrid, z0: float = 50.0) -> NetworkData:
    """Ideal three-port series junction: S = I - (2/3) * ones, all frequencies."""
    s1 = np.full((3, 3), -2.0 / 3.0) + np.eye(3)
    s = np.broadcast_to(s1, (len(grid), 3, 3)).astype(complex)
    return NetworkData(grid, s, [z0, z0, z0])


def _series_tee_node_pair(grid: FrequencyGrid, z0: float) -> NetworkData:
    """Series junction in node-pair orientation: ports (a,g), (b,g), (a,b).

    Polarity variant of :func:`series_tee` used internally so that the
    assembled four-port inserts with positive M sense; the two differ only by
    port polarity flips.
    """
    s1 = np.array(
        [
            [1.0, 2.0, 2.0],
            [2.0, 1.0, -2.0],
            [2.0, -2.0, 1.0],
        ]
    ) / 3.0
    s = np.broadcast_to(s1, (len(grid), 3, 3)).astype(complex)
    return NetworkData(grid, s, [z0, z0, z0])


def _tee_network_two_port(l_leg: float, m: float, grid: FrequencyGrid,
                          z0: float) -> NetworkData:
    """Two-port of the tee {l_leg, l_leg, shunt m} via its Z-matrix.

    Z = jw [[l_leg + m, m], [m, l_leg + m]]; the shunt inductance may be
    negative (tee equivalents of opposing windings), which has no meaning as
    a physical element but is perfectly valid here.
    """
    w = grid.omega
    z = np.zeros((len(grid), 2, 2), dtype=complex)
    z[:, 0, 0] = z[:, 1, 1] = 1j * w * (l_leg + m)
    z[:, 0, 1] = z[:, 1, 0] = 1j * w * m
    eye = np.broadcast_to(np.eye(2), z.shape)
    zn = z / z0
    s = np.linalg.solve(zn + eye, zn - eye)
    return NetworkData(grid, s, [z0, z0])


def coupled_tee_block(l1: float, l2: float, m: float, l_aux: float,
                      grid: FrequencyGrid, z0: float = 50.0) -> NetworkData:
    """Four-port insertion block realizing mutual inductance M between two paths.

    Ports 1/2 are the cut terminals of the first inductor branch, ports 3/4
    of the second.  Each path picks up a small series inductance ``l_aux``
    (so the tee legs l_aux - M stay positive); keep l_aux at or below 1% of
    the physical inductances for a negligible perturbation.

    Equivalent by construction to a coupled pair with self-inductances l_aux
    and mutual M, which is exactly what the nodal cross-check asserts.
    """
    if l_aux <= abs(m):
        raise ValueError("l_aux must exceed |M| so the tee legs stay positive")
    if l_aux > 0.01 * min(l1, l2):
        warnings.warn(
            "l_aux above 1% of the coupled inductances; insertion is no longer "
            "a small perturbation",
            stacklevel=2,
        )
    tee_a = _series_tee_node_pair(grid, z0)
    tee_b = _series_tee_node_pair(grid, z0)
    bridge = _tee_network_two_port(l_aux - m, m, grid, z0)
    # tee_a ports after join: [a1, a2, bridge_beta]
    half = connect_ports(tee_a, 2, bridge, 0)
    # final ports: [a1, a2, b1, b2]
    return connect_ports(half, 2, tee_b, 2)


def apply_mutual_couplings(netlist: Netlist, mm: MutualMatrix, signs,
                           threshold: float = 0.0) -> Netlist:
    """Augment a netlist with MutualCoupling elements from a mutual matrix.

    ``signs`` (one per matrix label, +1/-1) are the winding directions; each
    pair coupling is M_ij * sign_i * sign_j, and pairs with |M| below
    ``threshold`` are dropped.  Only the sign product matters, so a global
    flip leaves the response unchanged.
    """
    signs = list(signs)
    if len(signs) != len(mm.labels):
        raise ValueError("signs length must equal the mutual-matrix label count")
    if any(s not in (1, -1) for s in signs):
        raise ValueError("signs must be +1 or -1")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    by_name = {e.name: e for e in netlist.inductors()}
    missing = [lab for lab in mm.labels if lab not in by_name]
    if missing:
        raise ValueError(f"mutual matrix labels not found as inductors: {missing}")

    sign_of = dict(zip(mm.labels, signs))
    elements = [
        replace(e, winding_sign=sign_of[e.name]) if e.name in sign_of else e
        for e in netlist.elements
    ]
    for a, b, m in mm.pairs(threshold):
        la, lb = by_name[a], by_name[b]
        k = sign_of[a] * sign_of[b] * m / np.sqrt(la.henries * lb.henries)
        if not abs(k) < 1.0:
            raise ValueError(f"coupling {a}-{b} gives |k| >= 1 (M too large)")
        elements.append(MutualCoupling(f"K_{a}_{b}", a, b, k))
    return Netlist(tuple(elements), netlist.ports)


def coupled_pair_count(mm: MutualMatrix, threshold: float) -> int:
    """Number of couplings retained at a threshold (search-space sizing aid)."""
    return len(mm.pairs(threshold))


def winding_search(netlist: Netlist, mm: MutualMatrix, grid: FrequencyGrid,
                   objective_band=None, threshold: float = 0.0,
                   active_only: bool = False):
    """Exhaustive winding-direction search minimizing in-band |S11|.

    Evaluates every sign pattern with the first inductor's sign fixed to +1
    (global flips are gauge), i.e. 2^(n-1) patterns over the matrix labels,
    or 2^(a-1) over only the inductors participating in retained couplings
    when ``active_only`` is set.  The objective is the maximum in-band |S11|
    magnitude; the band defaults to the -3 dB pass band of the uncoupled
    netlist.  Ties break toward the lexicographically first pattern
    (+1 before -1), making the result deterministic.

    Returns ``(best_signs, best_objective, table)`` where ``table`` lists
    ``(signs, objective)`` for every pattern in enumeration order.
    """
    if len(mm.labels) > 16:
        raise ValueError("exhaustive search is bounded at 16 inductors")
    if objective_band is None:
        objective_band = passband_window(evaluate_netlist(netlist, grid))
    f_lo, f_hi = objective_band
    mask = (grid.points >= f_lo) & (grid.points <= f_hi)
    if not np.any(mask):
        raise ValueError("objective band contains no grid points")

    if active_only:
        active = set()
        for a, b, _ in mm.pairs(threshold):
            active.update((a, b))
        free = [lab for lab in mm.labels if lab in active]
    else:
        free = list(mm.labels)
    if not free:
        free = list(mm.labels[:1])

    table = []
    best = None
    for tail in itertools.product((1, -1), repeat=len(free) - 1):
        pattern = dict(zip(free, (1,) + tail))
        signs = [pattern.get(lab, 1) for lab in mm.labels]
        coupled = apply_mutual_couplings(netlist, mm, signs, threshold)
        nd = evaluate_netlist(coupled, grid)
        objective = float(np.abs(nd.param(1, 1))[mask].max())
        table.append((tuple(signs), objective))
        if best is None or objective < best[1]:
            best = (tuple(signs), objective)
    return best[0], best[1], table
