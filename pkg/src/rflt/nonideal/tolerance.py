"""Monte Carlo component-tolerance analysis of netlist responses.

Monolithic fabrication makes tolerances move together per layer: one common
scale factor is drawn for all inductors and one for all capacitors (each
uniform within +/- the common fraction).  A single factor shared by L and C
together would only shift the response in frequency and leave a reflectionless
network reflectionless, so the group factors are drawn independently.
Optional independent per-element perturbations model local variation on top.

Trials use pre-split RNG streams derived from the seed, so results are
reproducible and independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..mna import evaluate_netlist
from ..netlist import Capacitor, Inductor, Netlist
from ..network import FrequencyGrid

QUANTILES = (0.05, 0.50, 0.95)


@dataclass(frozen=True)
class ToleranceSpec:
    """Tolerance model: common L/C group fractions plus per-element spread."""

    common_fraction: float
    per_element_fraction: float = 0.0
    trials: int = 500
    seed: int = 0

    def __post_init__(self):
        for name in ("common_fraction", "per_element_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v < 0.5:
                raise ValueError(f"{name} must be in [0, 0.5)")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class ToleranceSummary:
    grid: FrequencyGrid
    quantiles: tuple
    s11_q: np.ndarray  # (len(quantiles), nfreq) of |S11|
    s21_q: np.ndarray
    worst_inband_s11: Optional[float]
    band: Optional[tuple]

    @property
    def worst_inband_return_loss_db(self) -> Optional[float]:
        if self.worst_inband_s11 is None or self.worst_inband_s11 == 0.0:
            return None
        return float(-20.0 * np.log10(self.worst_inband_s11))


def _trial_factors(netlist: Netlist, spec: ToleranceSpec, rng: np.random.Generator):
    a = spec.common_fraction
    sl = rng.uniform(1.0 - a, 1.0 + a)
    sc = rng.uniform(1.0 - a, 1.0 + a)
    per = {}
    if spec.per_element_fraction > 0.0:
        b = spec.per_element_fraction
        for e in netlist.elements:
            if isinstance(e, (Inductor, Capacitor)):
                per[e.name] = rng.uniform(1.0 - b, 1.0 + b)
    return sl, sc, per


def tolerance_mc(netlist: Netlist, spec: ToleranceSpec, grid: FrequencyGrid,
                 band: Optional[tuple] = None) -> ToleranceSummary:
    """Seeded tolerance Monte Carlo returning 5/50/95% |S11|/|S21| quantiles.

    When ``band`` = (f_lo, f_hi) is given, the summary also carries the worst
    in-band |S11| over all trials, i.e. the worst-case in-band return loss.
    """
    streams = [np.random.default_rng(s) for s in
               np.random.SeedSequence(spec.seed).spawn(spec.trials)]
    nf = len(grid)
    s11 = np.empty((spec.trials, nf))
    s21 = np.empty((spec.trials, nf))
    for t, rng in enumerate(streams):
        sl, sc, per = _trial_factors(netlist, spec, rng)
        nd = evaluate_netlist(netlist.scaled(sl, sc, per), grid)
        s11[t] = np.abs(nd.param(1, 1))
        s21[t] = np.abs(nd.param(2, 1))

    q = np.asarray(QUANTILES)
    worst = None
    if band is not None:
        mask = (grid.points >= band[0]) & (grid.points <= band[1])
        if not np.any(mask):
            raise ValueError("band contains no grid points")
        worst = float(s11[:, mask].max())
    return ToleranceSummary(
        grid=grid,
        quantiles=QUANTILES,
        s11_q=np.quantile(s11, q, axis=0),
        s21_q=np.quantile(s21, q, axis=0),
        worst_inband_s11=worst,
        band=band,
    )
