"""Frequency-domain evaluation of netlists by modified nodal analysis.

Per frequency point the solver assembles complex admittance stamps for R, C,
ideal lossless lines and embedded S-parameter blocks, plus branch-current
equations for inductors (which is what lets mutually coupled inductors stamp
through their inductance matrix).  Ports are realized as Norton sources with
their reference impedance; S-parameters come out column by column from the
incident/reflected wave definitions.

All frequency points are assembled into one stacked system and solved with
batched LAPACK calls; points are fully independent so results do not depend
on evaluation order.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularNetworkError
from .netlist import (
    GROUND,
    Capacitor,
    Inductor,
    MutualCoupling,
    Netlist,
    Resistor,
    SParamBlock,
    TransmissionLine,
)
from .network import FrequencyGrid, NetworkData, s_to_y


def _node_index(netlist: Netlist) -> dict:
    nodes = sorted(n for n in netlist.nodes() if n != GROUND)
    return {n: i for i, n in enumerate(nodes)}


class _Assembler:
    """Stacked (nfreq, dim, dim) system with incremental stamps."""

    def __init__(self, nf: int, n_nodes: int, n_branch: int):
        self.dim = n_nodes + n_branch
        self.n_nodes = n_nodes
        self.a = np.zeros((nf, self.dim, self.dim), dtype=complex)

    def add(self, i: int, j: int, v):
        if i >= 0 and j >= 0:
            self.a[:, i, j] += v

    def add_admittance(self, ni: int, nj: int, y):
        """Two-terminal admittance between node indices (-1 = ground)."""
        self.add(ni, ni, y)
        self.add(nj, nj, y)
        self.add(ni, nj, -y)
        self.add(nj, ni, -y)


def evaluate_netlist(netlist: Netlist, grid: FrequencyGrid) -> NetworkData:
    """Compute N-port S-parameters of a netlist over a frequency grid.

    Raises :class:`SingularNetworkError` (with the offending frequency) when
    the nodal system is degenerate, e.g. for a floating subgraph.
    """
    idx = _node_index(netlist)
    nf = len(grid)
    omega = grid.omega

    inductors = netlist.inductors()
    branch = {e.name: i for i, e in enumerate(inductors)}
    n_nodes = len(idx)
    asm = _Assembler(nf, n_nodes, len(inductors))

    def node(n: str) -> int:
        return idx.get(n, -1)

    for e in netlist.elements:
        if isinstance(e, Resistor):
            asm.add_admittance(node(e.nodes[0]), node(e.nodes[1]), 1.0 / e.ohms)
        elif isinstance(e, Capacitor):
            asm.add_admittance(node(e.nodes[0]), node(e.nodes[1]), 1j * omega * e.farads)
        elif isinstance(e, Inductor):
            ib = n_nodes + branch[e.name]
            n1, n2 = node(e.nodes[0]), node(e.nodes[1])
            asm.add(n1, ib, 1.0)
            asm.add(n2, ib, -1.0)
            asm.add(ib, n1, 1.0)
            asm.add(ib, n2, -1.0)
            asm.add(ib, ib, -1j * omega * e.henries)
        elif isinstance(e, MutualCoupling):
            la = netlist.element(e.inductor_a)
            lb = netlist.element(e.inductor_b)
            m = e.k * np.sqrt(la.henries * lb.henries)
            ia = n_nodes + branch[e.inductor_a]
            ib = n_nodes + branch[e.inductor_b]
            asm.add(ia, ib, -1j * omega * m)
            asm.add(ib, ia, -1j * omega * m)
        elif isinstance(e, TransmissionLine):
            theta = e.theta(grid.points)
            sin = np.sin(theta)
            bad = np.abs(sin) < 1e-9
            if np.any(bad):
                f_bad = grid.points[int(np.argmax(bad))]
                raise SingularNetworkError(
                    f_bad, f"line {e.name}: electrical length hits a multiple of pi"
                )
            y11 = -1j * np.cos(theta) / (e.z_line * sin)
            y12 = 1j / (e.z_line * sin)
            n1, n2 = node(e.nodes[0]), node(e.nodes[1])
            _stamp_two_port_y(asm, n1, n2, y11, y12)
        elif isinstance(e, SParamBlock):
            if e.data.grid != grid:
                raise ValueError(
                    f"{e.name}: embedded S-parameter block grid differs from evaluation grid"
                )
            try:
                y = s_to_y(e.data.s, e.data.z0)
            except np.linalg.LinAlgError:
                raise SingularNetworkError(
                    grid.points[0],
                    f"{e.name}: block has no admittance representation (I+S singular)",
                ) from None
            if not np.all(np.isfinite(y)):
                f_bad = grid.points[int(np.argmax(~np.isfinite(y).all(axis=(1, 2))))]
                raise SingularNetworkError(
                    f_bad, f"{e.name}: block has no admittance representation"
                )
            pairs = [(node(p), node(m)) for p, m in e.port_nodes]
            for p, (pi, mi) in enumerate(pairs):
                for q, (pj, mj) in enumerate(pairs):
                    ypq = y[:, p, q]
                    asm.add(pi, pj, ypq)
                    asm.add(pi, mj, -ypq)
                    asm.add(mi, pj, -ypq)
                    asm.add(mi, mj, ypq)
        else:
            raise TypeError(f"unknown element type: {type(e).__name__}")

    # ports: Norton source conductance always present
    nports = len(netlist.ports)
    root_z0 = np.array([np.sqrt(p.z0) for p in netlist.ports])
    for p in netlist.ports:
        asm.add_admittance(node(p.nodes[0]), node(p.nodes[1]), 1.0 / p.z0)

    rhs = np.zeros((nf, asm.dim, nports), dtype=complex)
    for j, p in enumerate(netlist.ports):
        for n, sign in ((p.nodes[0], 1.0), (p.nodes[1], -1.0)):
            ni = node(n)
            if ni >= 0:
                rhs[:, ni, j] += sign * 2.0 / root_z0[j]

    x = _solve_stacked(asm.a, rhs, grid)

    s = np.empty((nf, nports, nports), dtype=complex)
    for k, p in enumerate(netlist.ports):
        vp = x[:, node(p.nodes[0]), :] if node(p.nodes[0]) >= 0 else 0.0
        vm = x[:, node(p.nodes[1]), :] if node(p.nodes[1]) >= 0 else 0.0
        s[:, k, :] = (vp - vm) / root_z0[k]
        s[:, k, k] -= 1.0
    return NetworkData(grid, s, [p.z0 for p in netlist.ports])


def _stamp_two_port_y(asm: _Assembler, n1: int, n2: int, y11, y12):
    """Symmetric two-port admittance between two single-ended nodes."""
    asm.add(n1, n1, y11)
    asm.add(n2, n2, y11)
    asm.add(n1, n2, y12)
    asm.add(n2, n1, y12)


def _solve_stacked(a: np.ndarray, rhs: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        bad = ~np.isfinite(a).all(axis=(1, 2))
        raise SingularNetworkError(
            grid.points[int(np.argmax(bad))], "non-finite admittance stamp"
        )
    try:
        x = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError:
        x = _solve_reporting(a, rhs, grid)
    if not np.all(np.isfinite(x)):
        bad = ~np.isfinite(x).all(axis=(1, 2))
        raise SingularNetworkError(
            grid.points[int(np.argmax(bad))], "solution overflow (near-singular system)"
        )
    return x


def _solve_reporting(a, rhs, grid):
    """Per-frequency fallback identifying which point is singular."""
    x = np.empty_like(rhs)
    for i in range(a.shape[0]):
        try:
            x[i] = np.linalg.solve(a[i], rhs[i])
        except np.linalg.LinAlgError:
            raise SingularNetworkError(
                grid.points[i], "nodal matrix is singular (floating subgraph?)"
            ) from None
    return x
