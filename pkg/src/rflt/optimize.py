"""Bound-constrained least-squares tuning of netlist element values.

Component values span orders of magnitude, so parameters are optimized in
log-space (bounds transform accordingly) with forward-difference Jacobians.
The solver is SciPy's trust-region reflective least squares; the residual
vector carries one entry per (target, in-band grid point):

    sense <=   weight * max(0, value_db - goal_db)
    sense >=   weight * max(0, goal_db - value_db)
    sense ==   weight * (value_db - goal_db)

Results are deterministic for a fixed configuration; the objective trace
records the best cost seen at each solver evaluation, so it is non-increasing
by construction and bottoms out at the actual residual floor (infeasible
targets are visible, never silently absorbed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from .mna import evaluate_netlist
from .netlist import Capacitor, Inductor, Netlist, Resistor
from .network import FrequencyGrid, magnitude_db

_DB_FLOOR = -300.0

SENSES = ("le", "ge", "eq")
QUANTITIES = ("s11_db", "s21_db")


@dataclass(frozen=True)
class Target:
    """Goal on |S11| or |S21| (dB) over a frequency band."""

    band: tuple
    quantity: str
    goal_db: float
    weight: float = 1.0
    sense: str = "le"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"quantity must be one of {QUANTITIES}")
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}")
        if not self.band[0] < self.band[1]:
            raise ValueError("band must be (f_lo, f_hi) with f_lo < f_hi")
        if self.weight <= 0:
            raise ValueError("weight must be > 0")


@dataclass(frozen=True)
class FreeParameter:
    element: str
    lower: float
    upper: float

    def __post_init__(self):
        if not 0 < self.lower < self.upper < np.inf:
            raise ValueError(f"{self.element}: need finite 0 < lower < upper")


@dataclass(frozen=True)
class OptimizationProblem:
    netlist: Netlist
    free: tuple
    targets: tuple
    grid: FrequencyGrid

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(self.free))
        object.__setattr__(self, "targets", tuple(self.targets))
        if not self.targets:
            raise ValueError("need at least one target")
        if not self.free:
            raise ValueError("need at least one free parameter")
        names = {e.name for e in self.netlist.elements
                 if isinstance(e, (Resistor, Inductor, Capacitor))}
        for p in self.free:
            if p.element not in names:
                raise ValueError(f"free parameter references unknown element {p.element!r}")
        for t in self.targets:
            mask = self._band_mask(t)
            if not np.any(mask):
                raise ValueError(f"target band {t.band} contains no grid points")

    def _band_mask(self, t: Target) -> np.ndarray:
        f = self.grid.points
        return (f >= t.band[0]) & (f <= t.band[1])

    def apply(self, values) -> Netlist:
        nl = self.netlist
        for p, v in zip(self.free, values):
            nl = nl.with_element_value(p.element, float(v))
        return nl


def residuals(values, problem: OptimizationProblem) -> np.ndarray:
    """Residual vector at the given element values (natural units)."""
    for p, v in zip(problem.free, values):
        if not p.lower <= v <= p.upper:
            raise ValueError(f"{p.element}: value {v:g} outside bounds")
    nd = evaluate_netlist(problem.apply(values), problem.grid)
    out = []
    for t in problem.targets:
        ij = (1, 1) if t.quantity == "s11_db" else (2, 1)
        vals_db = np.maximum(magnitude_db(nd.param(*ij)), _DB_FLOOR)
        sel = vals_db[problem._band_mask(t)]
        if t.sense == "le":
            r = np.maximum(0.0, sel - t.goal_db)
        elif t.sense == "ge":
            r = np.maximum(0.0, t.goal_db - sel)
        else:
            r = sel - t.goal_db
        out.append(t.weight * r)
    return np.concatenate(out)


@dataclass(frozen=True)
class SolveConfig:
    max_iterations: int = 100
    tolerance: float = 1e-10
    initial: Optional[dict] = None  # element name -> starting value
    diff_step: float = 1e-6


@dataclass
class SolveResult:
    values: dict
    cost: float
    residual_norm: float
    trace: list
    converged: bool
    iterations: int
    message: str


def _initial_vector(problem: OptimizationProblem, config: SolveConfig) -> np.ndarray:
    given = config.initial or {}
    x0 = []
    for p in problem.free:
        if p.element in given:
            v = given[p.element]
        else:
            e = problem.netlist.element(p.element)
            v = getattr(e, "ohms", None) or getattr(e, "henries", None) or e.farads
        if not p.lower <= v <= p.upper:
            raise ValueError(f"{p.element}: initial value {v:g} outside bounds")
        x0.append(v)
    return np.asarray(x0, dtype=float)


def solve(problem: OptimizationProblem, config: SolveConfig = SolveConfig()) -> SolveResult:
    """Tune the free element values against the targets.

    Returns the best values found, the (monotone) objective trace, and a
    convergence flag; non-convergence is reported in the result, not raised.
    """
    x0 = _initial_vector(problem, config)
    lb = np.log([p.lower for p in problem.free])
    ub = np.log([p.upper for p in problem.free])
    trace: list = []

    def fun(p_log):
        r = residuals(np.exp(p_log), problem)
        cost = 0.5 * float(r @ r)
        if not trace or cost < trace[-1]:
            trace.append(cost)
        return r

    res = least_squares(
        fun,
        np.log(x0),
        bounds=(lb, ub),
        method="trf",
        diff_step=config.diff_step,
        xtol=config.tolerance,
        ftol=config.tolerance,
        gtol=config.tolerance,
        max_nfev=config.max_iterations,
    )
    best = np.exp(res.x)
    values = {p.element: float(v) for p, v in zip(problem.free, best)}
    return SolveResult(
        values=values,
        cost=float(res.cost),
        residual_norm=float(np.linalg.norm(res.fun)),
        trace=trace,
        converged=bool(res.status > 0),
        iterations=int(res.njev if res.njev is not None else res.nfev),
        message=str(res.message),
    )


# -- JSON interchange ------------------------------------------------------

SCHEMA_PROBLEM = "rflt/problem/1"


def problem_to_dict(problem: OptimizationProblem) -> dict:
    from .netlist import netlist_to_dict

    return {
        "schema": SCHEMA_PROBLEM,
        "netlist": netlist_to_dict(problem.netlist),
        "free": [
            {"element": p.element, "lower": p.lower, "upper": p.upper}
            for p in problem.free
        ],
        "targets": [
            {
                "band_hz": list(t.band),
                "quantity": t.quantity,
                "goal_db": t.goal_db,
                "weight": t.weight,
                "sense": t.sense,
            }
            for t in problem.targets
        ],
        "grid_hz": problem.grid.points.tolist(),
    }


def problem_from_dict(d: dict) -> OptimizationProblem:
    from .netlist import netlist_from_dict

    if d.get("schema") != SCHEMA_PROBLEM:
        raise ValueError(f"unsupported problem schema: {d.get('schema')!r}")
    return OptimizationProblem(
        netlist=netlist_from_dict(d["netlist"]),
        free=tuple(
            FreeParameter(p["element"], p["lower"], p["upper"]) for p in d["free"]
        ),
        targets=tuple(
            Target(
                tuple(t["band_hz"]),
                t["quantity"],
                t["goal_db"],
                t.get("weight", 1.0),
                t.get("sense", "le"),
            )
            for t in d["targets"]
        ),
        grid=FrequencyGrid(np.asarray(d["grid_hz"])),
    )
