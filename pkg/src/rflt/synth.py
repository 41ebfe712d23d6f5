"""Reflectionless filter synthesis and the resistor noise-transfer analysis.

Two topologies are produced: the single-element low-pass (two half-circuits
joined at a symmetry plane) and the band-pass ladder specified by its two
transmission-zero frequencies.  Element values follow directly from the
zero placement:

    omega_s = wp2 - wp1          omega_x = wp1 wp2 / (wp2 - wp1)
    L_s = Z0/omega_s             L_x = Z0/omega_x
    C_s = 1/(Z0 omega_s)         C_x = 1/(Z0 omega_x)
    R   = Z0

The band-pass node/element layout is frozen here as a golden construction,
including the mirror-asymmetric intermediate branches (left branch inductor
first, right branch capacitor first).  The asymmetry is electrically inert:
the two series chains commute, so the network response is symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mna import evaluate_netlist
from .netlist import Capacitor, Inductor, Netlist, Port, Resistor
from .network import FrequencyGrid, NetworkData, magnitude_db


@dataclass(frozen=True)
class BandpassSpec:
    """Transmission-zero placement: lower/upper zero (rad/s) and system impedance."""

    omega_p1: float
    omega_p2: float
    z0: float = 50.0

    def __post_init__(self):
        if not 0 < self.omega_p1 < self.omega_p2:
            raise ValueError("need 0 < omega_p1 < omega_p2")
        if self.z0 <= 0:
            raise ValueError("z0 must be > 0")

    @classmethod
    def from_hz(cls, f_p1: float, f_p2: float, z0: float = 50.0) -> "BandpassSpec":
        return cls(2 * np.pi * f_p1, 2 * np.pi * f_p2, z0)


@dataclass(frozen=True)
class BandpassElements:
    omega_s: float
    omega_x: float
    l_s: float
    l_x: float
    c_s: float
    c_x: float
    r: float

    def __post_init__(self):
        for name in ("omega_s", "omega_x", "l_s", "l_x", "c_s", "c_x", "r"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if abs(self.l_s * self.c_s * self.omega_s**2 - 1.0) > 1e-12:
            raise ValueError("L_s C_s omega_s^2 must equal 1")
        if abs(self.l_x * self.c_x * self.omega_x**2 - 1.0) > 1e-12:
            raise ValueError("L_x C_x omega_x^2 must equal 1")


@dataclass(frozen=True)
class LowpassElements:
    omega_p: float
    l: float
    c: float
    r: float

    @classmethod
    def from_cutoff(cls, omega_p: float, r: float = 50.0) -> "LowpassElements":
        if omega_p <= 0 or r <= 0:
            raise ValueError("cutoff and impedance must be > 0")
        return cls(omega_p=omega_p, l=r / omega_p, c=1.0 / (r * omega_p), r=r)


def synth_bandpass(spec: BandpassSpec) -> BandpassElements:
    """Element values of the reflectionless band-pass from its transmission zeros."""
    ws = spec.omega_p2 - spec.omega_p1
    wx = spec.omega_p2 * spec.omega_p1 / (spec.omega_p2 - spec.omega_p1)
    return BandpassElements(
        omega_s=ws,
        omega_x=wx,
        l_s=spec.z0 / ws,
        l_x=spec.z0 / wx,
        c_s=1.0 / (spec.z0 * ws),
        c_x=1.0 / (spec.z0 * wx),
        r=spec.z0,
    )


def build_bandpass_netlist(e: BandpassElements) -> Netlist:
    """Two-port band-pass netlist (8 L, 8 C, 2 R) in the frozen ladder layout.

    Node names: ports p1/p2; top chain internals t1/t2/t3; mid nodes ml/mr;
    intermediate branch internals lb/rb; shared bottom rail ``rail``.
    """
    ls, lx, cs, cx, r = e.l_s, e.l_x, e.c_s, e.c_x, e.r
    elements = (
        # top series chain p1 - Ls - Cx - Ls - Cx - p2
        Inductor("Ls_top1", ("p1", "t1"), ls),
        Capacitor("Cx_top1", ("t1", "t2"), cx),
        Inductor("Ls_top2", ("t2", "t3"), ls),
        Capacitor("Cx_top2", ("t3", "p2"), cx),
        # shunt pairs from the port nodes down to the mid nodes
        Capacitor("Cs_port1", ("p1", "ml"), cs),
        Inductor("Lx_port1", ("p1", "ml"), lx),
        Capacitor("Cs_port2", ("p2", "mr"), cs),
        Inductor("Lx_port2", ("p2", "mr"), lx),
        # intermediate branches to ground (left: L then C; right: C then L)
        Inductor("Ls_mid1", ("ml", "lb"), ls),
        Capacitor("Cx_mid1", ("lb", "0"), cx),
        Capacitor("Cx_mid2", ("mr", "rb"), cx),
        Inductor("Ls_mid2", ("rb", "0"), ls),
        # terminations into the shared bottom rail
        Resistor("R1", ("ml", "rail"), r),
        Resistor("R2", ("mr", "rail"), r),
        Inductor("Lx_rail1", ("rail", "0"), lx),
        Inductor("Lx_rail2", ("rail", "0"), lx),
        Capacitor("Cs_rail1", ("rail", "0"), cs),
        Capacitor("Cs_rail2", ("rail", "0"), cs),
    )
    ports = (Port(("p1", "0"), e.r), Port(("p2", "0"), e.r))
    return Netlist(elements, ports)


def build_lowpass_netlist(e: LowpassElements) -> Netlist:
    """Two-port single-element reflectionless low-pass.

    Symmetric layout: series L from each port to the symmetry-plane node sp,
    and an R-to-C branch from each port meeting at the plane node m (the C of
    each branch shunts m to ground).
    """
    elements = (
        Inductor("L1", ("p1", "sp"), e.l),
        Inductor("L2", ("p2", "sp"), e.l),
        Resistor("R1", ("p1", "m"), e.r),
        Resistor("R2", ("p2", "m"), e.r),
        Capacitor("C1", ("m", "0"), e.c),
        Capacitor("C2", ("m", "0"), e.c),
    )
    ports = (Port(("p1", "0"), e.r), Port(("p2", "0"), e.r))
    return Netlist(elements, ports)


def dual_element(kind: str, value: float, z0: float) -> tuple:
    """Exchange a reactance with its z0-normalized reciprocal.

    L -> C with C = L/z0^2 and C -> L with L = C z0^2, so that
    Z_dual(w) * Z_orig(w) = z0^2 at every frequency.
    """
    if value <= 0:
        raise ValueError("element value must be > 0")
    if kind == "L":
        return "C", value / z0**2
    if kind == "C":
        return "L", value * z0**2
    raise ValueError("kind must be 'L' or 'C'")


def resistor_noise_transfer(netlist: Netlist, grid: FrequencyGrid) -> NetworkData:
    """Expose every resistor as a port to obtain thermal-photon transfer functions.

    Each resistor is removed and replaced by a port whose reference impedance
    equals the resistor value, appended after the original external ports.
    Columns from the resistor ports into the external ports are the noise
    transfer functions; the result is lossless, hence passive with margin ~ 0.
    """
    resistors = [e for e in netlist.elements if isinstance(e, Resistor)]
    if not resistors:
        raise ValueError("netlist contains no resistors")
    elements = tuple(e for e in netlist.elements if not isinstance(e, Resistor))
    ports = netlist.ports + tuple(Port(r.nodes, r.ohms) for r in resistors)
    return evaluate_netlist(Netlist(elements, ports), grid)


def band_summary(n: NetworkData, il_core_fraction: float = 0.8) -> dict:
    """Table-style pass-band metrics of a two-port response.

    Finds the -3 dB edges of |S21| around its maximum (linear interpolation
    between grid points), and reports arithmetic center, 3 dB bandwidth, the
    worst insertion loss over the central ``il_core_fraction`` of the band,
    and the worst return loss over the whole grid.
    """
    if n.nports != 2:
        raise ValueError("band summary expects a two-port")
    f = n.grid.points
    s21_db = magnitude_db(n.param(2, 1))
    s11_db = magnitude_db(n.param(1, 1))
    ipk = int(np.argmax(s21_db))
    edge = s21_db[ipk] - 3.0

    def cross(lo_side: bool) -> float:
        rng = range(ipk, 0, -1) if lo_side else range(ipk, len(f) - 1)
        for i in rng:
            j = i - 1 if lo_side else i + 1
            if s21_db[j] <= edge <= s21_db[i] or s21_db[i] <= edge <= s21_db[j]:
                if s21_db[j] == s21_db[i]:
                    return f[j]
                t = (edge - s21_db[i]) / (s21_db[j] - s21_db[i])
                return f[i] + t * (f[j] - f[i])
        return f[0] if lo_side else f[-1]

    f_lo, f_hi = cross(True), cross(False)
    bw = f_hi - f_lo
    margin = 0.5 * (1.0 - il_core_fraction) * bw
    core = (f >= f_lo + margin) & (f <= f_hi - margin)
    il = float(np.max(-s21_db[core])) if np.any(core) else float("nan")
    return {
        "center_hz": 0.5 * (f_lo + f_hi),
        "bw_3db_hz": bw,
        "band_lo_hz": f_lo,
        "band_hi_hz": f_hi,
        "max_inband_il_db": il,
        "min_return_loss_db": float(np.min(-s11_db)),
    }


def passband_window(n: NetworkData) -> tuple:
    """(f_lo, f_hi) of the -3 dB pass band of |S21|."""
    summ = band_summary(n)
    return summ["band_lo_hz"], summ["band_hi_hz"]
