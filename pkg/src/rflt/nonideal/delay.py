"""Closed-form reflection of the low-pass prototype with symmetry-plane delay.

Ideal lines of impedance Z_l and electrical length theta are inserted where
the two half-circuits meet.  The even mode sees them open-circuited, the odd
mode short-circuited:

    Z_sc = j Z_l tan(theta)            Z_oc = -j Z_l cot(theta)
    Z_1a = j w L + Z_sc                Z_2a = R + (Z_C || Z_sc)
    Z_odd = Z_1a || Z_2a
    Z_1b = R + (Z_C || Z_oc)           Z_2b = j w L + Z_oc
    Z_even = Z_1b || Z_2b
    G_od = (Z_odd - R)/(Z_odd + R)     G_ed = (Z_even - R)/(Z_even + R)
    G_d = (G_od + G_ed)/2

The open-circuit combinations are algebraically rearranged so theta -> 0 is
regular and collapses exactly to the lumped network (G_d = 0 for
reflectionless element values).  theta scales linearly with frequency from
its reference value (dispersionless lines).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ToolkitError
from ..netlist import Capacitor, Inductor, Netlist, Port, Resistor, TransmissionLine
from ..network import FrequencyGrid
from ..synth import LowpassElements


@dataclass(frozen=True)
class DelayModelInput:
    """Low-pass element values plus the symmetry-plane line parameters.

    ``theta_ref`` is the electrical length in radians at ``ref_hz``; it is
    scaled linearly over the evaluation grid.  ``theta_ref = 0`` is allowed
    and reproduces the lumped network.
    """

    lowpass: LowpassElements
    z_line: float
    theta_ref: float
    ref_hz: float

    def __post_init__(self):
        if self.z_line <= 0:
            raise ValueError("line impedance must be > 0")
        if self.theta_ref < 0:
            raise ValueError("electrical length must be >= 0")
        if self.ref_hz <= 0:
            raise ValueError("reference frequency must be > 0")


def delay_reflection(inp: DelayModelInput, grid: FrequencyGrid) -> np.ndarray:
    """Per-frequency reflection coefficient Gamma_d of the delayed prototype."""
    w = grid.omega
    lp = inp.lowpass
    r, ll, cc, zl = lp.r, lp.l, lp.c, inp.z_line
    theta = inp.theta_ref * grid.points / inp.ref_hz
    bad = np.abs(np.cos(theta)) < 1e-9
    if np.any(bad):
        f_bad = grid.points[int(np.argmax(bad))]
        raise ToolkitError(f"tan singularity (theta = pi/2 + n pi) at {f_bad:.6g} Hz")
    t = np.tan(theta)

    zc = -1j / (w * cc)
    zsc = 1j * zl * t

    # odd mode: plane shorted
    z1a = 1j * w * ll + zsc
    z2a = r + zc * zsc / (zc + zsc)
    z_odd = z1a * z2a / (z1a + z2a)

    # even mode: plane open; cot form rewritten so theta = 0 stays finite:
    #   a || Z_oc = -j a Z_l / (a t - j Z_l)
    #   Z_even   = Z_1b (j w L t - j Z_l) / (Z_1b t + j w L t - j Z_l)
    z1b = r + zc * (-1j * zl) / (zc * t - 1j * zl)
    num = 1j * w * ll * t - 1j * zl
    z_even = z1b * num / (z1b * t + num)

    g_od = (z_odd - r) / (z_odd + r)
    g_ed = (z_even - r) / (z_even + r)
    gamma = 0.5 * (g_od + g_ed)
    if not np.all(np.isfinite(gamma)):
        f_bad = grid.points[int(np.argmax(~np.isfinite(gamma)))]
        raise ToolkitError(f"delay model singular at {f_bad:.6g} Hz")
    return gamma


def build_delayed_lowpass_netlist(inp: DelayModelInput) -> Netlist:
    """Full two-port of the delayed prototype with explicit symmetry-plane lines.

    Used as the nodal-analysis cross-check of :func:`delay_reflection`; needs
    ``theta_ref > 0`` since zero-length lines have no admittance stamp (use
    the plain low-pass netlist for that limit).
    """
    if inp.theta_ref <= 0:
        raise ValueError("explicit-line netlist requires theta_ref > 0")
    lp = inp.lowpass
    elements = (
        Inductor("L1", ("p1", "lt1"), lp.l),
        TransmissionLine("TL_top1", ("lt1", "sp_top"), inp.z_line, inp.theta_ref, inp.ref_hz),
        Inductor("L2", ("p2", "lt2"), lp.l),
        TransmissionLine("TL_top2", ("lt2", "sp_top"), inp.z_line, inp.theta_ref, inp.ref_hz),
        Resistor("R1", ("p1", "m1"), lp.r),
        Capacitor("C1", ("m1", "0"), lp.c),
        TransmissionLine("TL_bot1", ("m1", "sp_bot"), inp.z_line, inp.theta_ref, inp.ref_hz),
        Resistor("R2", ("p2", "m2"), lp.r),
        Capacitor("C2", ("m2", "0"), lp.c),
        TransmissionLine("TL_bot2", ("m2", "sp_bot"), inp.z_line, inp.theta_ref, inp.ref_hz),
    )
    ports = (Port(("p1", "0"), lp.r), Port(("p2", "0"), lp.r))
    return Netlist(elements, ports)
