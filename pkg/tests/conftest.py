import numpy as np
import pytest

from rflt.mna import evaluate_netlist
from rflt.netlist import Capacitor, Inductor, Netlist, Port, Resistor, TransmissionLine
from rflt.network import FrequencyGrid
from rflt.synth import BandpassSpec, build_bandpass_netlist, synth_bandpass


@pytest.fixture(scope="session")
def bp_spec():
    return BandpassSpec.from_hz(4e9, 12e9, 50.0)


@pytest.fixture(scope="session")
def bp_elements(bp_spec):
    return synth_bandpass(bp_spec)


@pytest.fixture(scope="session")
def bp_netlist(bp_elements):
    return build_bandpass_netlist(bp_elements)


@pytest.fixture(scope="session")
def grid_wide():
    return FrequencyGrid.linear(0.5e9, 20e9, 201)


@pytest.fixture(scope="session")
def bp_response(bp_netlist, grid_wide):
    return evaluate_netlist(bp_netlist, grid_wide)


# -- independent ABCD-chain oracle ------------------------------------------
#
# Builds two-ports as cascades of series/shunt impedances and ideal lines,
# evaluated by 2x2 ABCD products per frequency; stays independent of the
# nodal solver it cross-checks.


def abcd_series(z):
    nf = len(z)
    m = np.zeros((nf, 2, 2), dtype=complex)
    m[:, 0, 0] = m[:, 1, 1] = 1.0
    m[:, 0, 1] = z
    return m


def abcd_shunt(y):
    nf = len(y)
    m = np.zeros((nf, 2, 2), dtype=complex)
    m[:, 0, 0] = m[:, 1, 1] = 1.0
    m[:, 1, 0] = y
    return m


def abcd_line(theta, z_line):
    nf = len(theta)
    m = np.zeros((nf, 2, 2), dtype=complex)
    m[:, 0, 0] = m[:, 1, 1] = np.cos(theta)
    m[:, 0, 1] = 1j * z_line * np.sin(theta)
    m[:, 1, 0] = 1j * np.sin(theta) / z_line
    return m


def abcd_to_s(m, z0):
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    den = a + b / z0 + c * z0 + d
    nf = len(a)
    s = np.empty((nf, 2, 2), dtype=complex)
    s[:, 0, 0] = (a + b / z0 - c * z0 - d) / den
    s[:, 0, 1] = 2.0 * (a * d - b * c) / den
    s[:, 1, 0] = 2.0 / den
    s[:, 1, 1] = (-a + b / z0 - c * z0 + d) / den
    return s


def random_chain(rng, grid, max_elements=4, z0=50.0):
    """Random ladder: returns (netlist, oracle S-matrix)."""
    w = grid.omega
    n_el = rng.integers(1, max_elements + 1)
    abcd = np.broadcast_to(np.eye(2), (len(grid), 2, 2)).astype(complex).copy()
    elements = []
    left = "p1"
    counter = 0
    for _ in range(n_el):
        kind = rng.choice(["R", "L", "C", "TL"])
        orient = rng.choice(["series", "shunt"])
        counter += 1
        name = f"E{counter}"
        if kind == "R":
            v = rng.uniform(5.0, 200.0)
            z = np.full(len(grid), v, dtype=complex)
            make = lambda nodes, v=v, name=name: Resistor(name, nodes, v)
        elif kind == "L":
            v = 10.0 ** rng.uniform(-10.0, -8.0)
            z = 1j * w * v
            make = lambda nodes, v=v, name=name: Inductor(name, nodes, v)
        elif kind == "C":
            v = 10.0 ** rng.uniform(-13.5, -11.5)
            z = -1j / (w * v)
            make = lambda nodes, v=v, name=name: Capacitor(name, nodes, v)
        else:
            zl = rng.uniform(20.0, 120.0)
            th = rng.uniform(0.1, 1.2)
            fr = rng.uniform(2e9, 8e9)
            theta = th * grid.points / fr
            if np.any(np.abs(np.sin(theta)) < 1e-3):
                continue
            abcd = abcd @ abcd_line(theta, zl)
            mid = f"n{counter}"
            elements.append(
                TransmissionLine(name, (left, mid), zl, th, fr)
            )
            left = mid
            continue
        if orient == "series":
            abcd = abcd @ abcd_series(z)
            mid = f"n{counter}"
            elements.append(make((left, mid)))
            left = mid
        else:
            abcd = abcd @ abcd_shunt(1.0 / z)
            elements.append(make((left, "0")))
    if not elements:
        elements.append(Resistor("E0", (left, "n_end"), 75.0))
        abcd = abcd @ abcd_series(np.full(len(grid), 75.0, dtype=complex))
        left = "n_end"
    netlist = Netlist(
        tuple(elements), (Port(("p1", "0"), z0), Port((left, "0"), z0))
    )
    return netlist, abcd_to_s(abcd, z0)
