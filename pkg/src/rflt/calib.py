"""One-port vector calibration: 3-term error model, correction, error gain,
and the switched-path tracking/matching Monte Carlo.

The reflectometer model is the bilinear three-term box

    Gm = e00 + (Gamma * Gm) e11 - Gamma * De        (solved per frequency)
    Gamma_corrected = (Gm - e00) / (Gm e11 - De)

with De the error-box determinant, so the identity box is (0, 0, -1).  With
three standards the system is exactly determined; more standards are solved
in the least-squares sense (normal equations, switching to an orthogonal
solve when the design matrix condition exceeds 1e6).

The Monte Carlo measures how path tracking and matching between the switched
standards spoil the correction: each trial perturbs every switch path's
two-port within the configured spans (uniform draws), embeds each standard
and the DUT behind its own perturbed path, adds VNA magnitude noise, solves,
corrects, and records the corrected DUT reflection.  Phase tracking is
modeled as a relative length error, so it grows with both frequency and the
path's electrical delay; the configured span is the phase error of the
median-delay path at the grid's median frequency.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ToolkitError
from .network import FrequencyGrid, NetworkData

COND_SWITCH = 1e6
DENOM_FLOOR = 1e-12


# -- standards -------------------------------------------------------------


@dataclass(frozen=True)
class CalStandard:
    """A named one-port standard with its true per-frequency reflection."""

    name: str
    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=complex)
        if g.ndim != 1:
            raise ValueError("gamma must be per-frequency 1-D")
        if np.any(np.abs(g) > 1.0 + 1e-6):
            raise ValueError(f"{self.name}: |Gamma| exceeds 1 (active standard?)")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)


def standard_open(grid: FrequencyGrid) -> CalStandard:
    return CalStandard("open", np.ones(len(grid), dtype=complex))


def standard_short(grid: FrequencyGrid) -> CalStandard:
    return CalStandard("short", -np.ones(len(grid), dtype=complex))


def standard_load(grid: FrequencyGrid) -> CalStandard:
    return CalStandard("load", np.zeros(len(grid), dtype=complex))


def standard_term2(grid: FrequencyGrid, return_loss_db: float = 6.0,
                   phase_deg: float = 0.0) -> CalStandard:
    """Partial reflect standard, default 6 dB return loss."""
    mag = 10.0 ** (-return_loss_db / 20.0)
    g = mag * np.exp(1j * np.deg2rad(phase_deg)) * np.ones(len(grid))
    return CalStandard("term2", g)


def standard_offset_short(grid: FrequencyGrid, delay_s: float) -> CalStandard:
    """Short behind a lossless delay: Gamma = -exp(-j 2 w tau)."""
    g = -np.exp(-2j * grid.omega * delay_s)
    return CalStandard("offset_short", g)


# -- error terms -----------------------------------------------------------


@dataclass(frozen=True)
class ErrorTerms:
    grid: FrequencyGrid
    e00: np.ndarray
    e11: np.ndarray
    delta: np.ndarray
    condition: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("e00", "e11", "delta"):
            v = np.asarray(getattr(self, name), dtype=complex)
            if v.shape != (len(self.grid),):
                raise ValueError(f"{name} must match the grid length")
            v.setflags(write=False)
            object.__setattr__(self, name, v)


def identity_error_terms(grid: FrequencyGrid) -> ErrorTerms:
    nf = len(grid)
    return ErrorTerms(grid, np.zeros(nf), np.zeros(nf), -np.ones(nf))


def error_terms_of_two_port(path: NetworkData) -> ErrorTerms:
    """Three-term box of an explicit two-port (port 1 toward the instrument)."""
    s = path.s
    e00 = s[:, 0, 0]
    e11 = s[:, 1, 1]
    delta = e00 * e11 - s[:, 0, 1] * s[:, 1, 0]
    return ErrorTerms(path.grid, e00, e11, delta)


def embed_reflection(et: ErrorTerms, gamma) -> np.ndarray:
    """Forward model: raw reflection measured through the error box."""
    gamma = np.asarray(gamma, dtype=complex)
    num = gamma * et.delta - et.e00
    den = gamma * et.e11 - 1.0
    return num / den


def solve_error_terms(standards, measured, grid: FrequencyGrid) -> ErrorTerms:
    """Least-squares 3-term solve from >= 3 (standard, raw measurement) pairs.

    The per-frequency rows are [1, Gk*Gmk, -Gk] . (e00, e11, De) = Gmk.  The
    returned terms carry the per-frequency design-matrix condition number;
    rank deficiency (e.g. duplicated standards) raises with the frequency.
    """
    if len(standards) < 3:
        raise ValueError("need at least 3 calibration standards")
    if len(measured) != len(standards):
        raise ValueError("measured list must align with standards")
    nf = len(grid)
    n = len(standards)
    a = np.empty((nf, n, 3), dtype=complex)
    b = np.empty((nf, n), dtype=complex)
    for k, (std, gm) in enumerate(zip(standards, measured)):
        g = np.asarray(std.gamma, dtype=complex)
        gm = np.asarray(gm, dtype=complex)
        if g.shape != (nf,) or gm.shape != (nf,):
            raise ValueError(f"standard {std.name}: arrays must match the grid")
        a[:, k, 0] = 1.0
        a[:, k, 1] = g * gm
        a[:, k, 2] = -g
        b[:, k] = gm

    sv = np.linalg.svd(a, compute_uv=False)
    rank_def = sv[:, -1] <= sv[:, 0] * np.finfo(float).eps * max(n, 3) * 10
    if np.any(rank_def):
        f_bad = grid.points[int(np.argmax(rank_def))]
        raise ToolkitError(
            f"rank-deficient calibration system at {f_bad:.6g} Hz "
            "(duplicate or degenerate standards)"
        )
    cond = sv[:, 0] / sv[:, -1]

    ah = np.conjugate(np.swapaxes(a, 1, 2))
    x = np.empty((nf, 3), dtype=complex)
    normal_ok = cond <= COND_SWITCH
    if np.any(normal_ok):
        idx = np.flatnonzero(normal_ok)
        gram = ah[idx] @ a[idx]
        rhs = (ah[idx] @ b[idx, :, None])[:, :, 0]
        x[idx] = np.linalg.solve(gram, rhs[:, :, None])[:, :, 0]
    for i in np.flatnonzero(~normal_ok):
        x[i] = np.linalg.lstsq(a[i], b[i], rcond=None)[0]
    return ErrorTerms(grid, x[:, 0], x[:, 1], x[:, 2], condition=cond)


def apply_correction(et: ErrorTerms, gamma_m) -> np.ndarray:
    """Corrected reflection (Gm - e00) / (Gm e11 - De)."""
    gm = np.asarray(gamma_m, dtype=complex)
    den = gm * et.e11 - et.delta
    bad = np.abs(den) <= DENOM_FLOOR
    if np.any(bad):
        f_bad = et.grid.points[int(np.argmax(bad))]
        raise ToolkitError(f"correction denominator vanishes at {f_bad:.6g} Hz")
    return (gm - et.e00) / den


def error_gain(two_port: NetworkData, gamma_l, delta_1m) -> np.ndarray:
    """Error-locus growth through a cascaded two-port.

    d2M = |(1 - Gl S22)^2 / (S11 S22 - D)| d1M with D = S11 S22 - S12 S21,
    i.e. the denominator is the transmission product S12 S21.
    """
    gl = np.asarray(gamma_l, dtype=complex)
    d1 = np.asarray(delta_1m, dtype=float)
    s = two_port.s
    trans = s[:, 0, 1] * s[:, 1, 0]
    bad = np.abs(trans) == 0.0
    if np.any(bad):
        f_bad = two_port.grid.points[int(np.argmax(bad))]
        raise ToolkitError(f"error gain undefined (zero transmission) at {f_bad:.6g} Hz")
    return np.abs((1.0 - gl * s[:, 1, 1]) ** 2 / trans) * d1


# -- path models and the uncertainty Monte Carlo ---------------------------


@dataclass(frozen=True)
class UncertaintyConfig:
    """Monte Carlo spans (all uniform +/-): VNA magnitude noise, path phase
    tracking, path return-loss and insertion-loss matching.

    ``phase_deg`` is the tracking span of a path with delay ``ref_delay_s``
    at the grid's median frequency; longer paths scale up proportionally
    (length-fraction tracking).  Leaving ``ref_delay_s`` unset normalizes to
    the median delay of the supplied paths.
    """

    trials: int = 500
    seed: int = 0
    vna_mag_db: float = 0.4
    phase_deg: float = 10.0
    path_rl_db: float = 10.0
    path_il_db: float = 0.5
    ref_delay_s: Optional[float] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for name in ("vna_mag_db", "phase_deg", "path_rl_db", "path_il_db"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.ref_delay_s is not None and self.ref_delay_s <= 0:
            raise ValueError("ref_delay_s must be > 0")


def switch_path(grid: FrequencyGrid, delay_s: float, il_db: float = 0.5,
                rl_db: float = 20.0, z0: float = 50.0) -> NetworkData:
    """Synthetic switch-path two-port: matched-ish delay line with loss.

    ``il_db`` is the insertion loss at the top of the grid (scaling as
    sqrt(f), a cable-like profile); ``rl_db`` sets the reflection magnitude
    seen at both ends.
    """
    f = grid.points
    nf = len(grid)
    theta = grid.omega * delay_s
    mag21 = 10.0 ** (-(il_db * np.sqrt(f / f[-1])) / 20.0)
    s = np.zeros((nf, 2, 2), dtype=complex)
    s[:, 0, 1] = s[:, 1, 0] = mag21 * np.exp(-1j * theta)
    refl = 10.0 ** (-rl_db / 20.0)
    s[:, 0, 0] = refl * np.exp(-2j * theta * 0.35)
    s[:, 1, 1] = refl * np.exp(-2j * theta * 0.65)
    return NetworkData(grid, s, [z0, z0])


def path_delay(path: NetworkData) -> float:
    """Mean group delay of S21 (phase-slope estimate), seconds."""
    phase = np.unwrap(np.angle(path.s[:, 1, 0]))
    w = path.grid.omega
    return float(-np.polyfit(w, phase, 1)[0])


def _perturb_path(path: NetworkData, cfg: UncertaintyConfig, rng,
                  tau: float, tau_ref: float, f_ref: float) -> ErrorTerms:
    """One trial's perturbed three-term box for a switch path."""
    f = path.grid.points
    u_il, u_ph, u_rl1, u_rl2 = rng.uniform(-1.0, 1.0, 4)
    # tracking phase: relative length error, so it scales with f and delay
    scale = (tau / tau_ref) if tau_ref > 0 else 1.0
    dphi = u_ph * np.deg2rad(cfg.phase_deg) * (f / f_ref) * scale
    gain = 10.0 ** (u_il * cfg.path_il_db / 20.0)
    s21 = path.s[:, 1, 0] * gain * np.exp(-1j * dphi)
    s12 = path.s[:, 0, 1] * gain * np.exp(-1j * dphi)
    s11 = path.s[:, 0, 0] * 10.0 ** (u_rl1 * cfg.path_rl_db / 20.0)
    s22 = path.s[:, 1, 1] * 10.0 ** (u_rl2 * cfg.path_rl_db / 20.0) * np.exp(-2j * dphi)
    e00 = s11
    e11 = s22
    delta = s11 * s22 - s12 * s21
    return ErrorTerms(path.grid, e00, e11, delta)


@dataclass(frozen=True)
class CalibrationMCResult:
    grid: FrequencyGrid
    dut_true: np.ndarray
    corrected: np.ndarray  # (trials, nfreq) complex corrected DUT reflection
    quantiles: tuple
    mag_q: np.ndarray  # (len(quantiles), nfreq) of |corrected|

    def error_quantile(self, q: float = 0.95) -> np.ndarray:
        """Per-frequency q-quantile of |corrected - true|."""
        err = np.abs(self.corrected - self.dut_true[None, :])
        return np.quantile(err, q, axis=0)

    def observability_crossover(self, threshold: float = 0.316,
                                q: float = 0.95) -> Optional[float]:
        """Lowest frequency where the correction error quantile exceeds the
        threshold; None when it never does on this grid."""
        errq = self.error_quantile(q)
        above = errq > threshold
        if not np.any(above):
            return None
        return float(self.grid.points[int(np.argmax(above))])

    def histogram_db(self, bins_db=None):
        """2-D histogram of corrected return loss: (counts, freq, bin_edges_db)."""
        mags = np.abs(self.corrected)
        db = -20.0 * np.log10(np.maximum(mags, 1e-12))
        if bins_db is None:
            bins_db = np.linspace(0.0, 60.0, 61)
        counts = np.empty((len(self.grid), len(bins_db) - 1), dtype=int)
        for i in range(len(self.grid)):
            counts[i] = np.histogram(db[:, i], bins=bins_db)[0]
        return counts, self.grid.points, np.asarray(bins_db)


def calibration_mc(standards, dut_true, path_models, cfg: UncertaintyConfig,
                   grid: FrequencyGrid) -> CalibrationMCResult:
    """Tracking/matching Monte Carlo of the switched-standards reflectometer.

    ``path_models`` holds one two-port per switch position: one per standard
    plus one for the DUT, in that order.  Every trial redraws each path's
    perturbation independently (paths track independently; the paper gives no
    correlation model), embeds the true reflections, adds VNA magnitude
    noise per frequency point, then solves and corrects.
    """
    if len(path_models) != len(standards) + 1:
        raise ValueError("need one path model per standard plus one for the DUT")
    for p in path_models:
        if p.grid != grid:
            raise ValueError("path models must share the evaluation grid")
        if p.nports != 2:
            raise ValueError("path models must be two-ports")
    dut_true = np.asarray(dut_true, dtype=complex)
    if dut_true.shape != (len(grid),):
        raise ValueError("dut_true must match the grid")

    taus = [max(path_delay(p), 0.0) for p in path_models]
    if cfg.ref_delay_s is not None:
        tau_ref = cfg.ref_delay_s
    else:
        tau_ref = float(np.median(taus)) or 1.0
    f_ref = float(np.median(grid.points))

    streams = [np.random.default_rng(s) for s in
               np.random.SeedSequence(cfg.seed).spawn(cfg.trials)]
    corrected = np.empty((cfg.trials, len(grid)), dtype=complex)
    for t, rng in enumerate(streams):
        measured = []
        for std, path, tau in zip(standards, path_models[:-1], taus[:-1]):
            box = _perturb_path(path, cfg, rng, tau, tau_ref, f_ref)
            raw = embed_reflection(box, std.gamma)
            noise = 10.0 ** (rng.uniform(-1, 1, len(grid)) * cfg.vna_mag_db / 20.0)
            measured.append(raw * noise)
        box = _perturb_path(path_models[-1], cfg, rng, taus[-1], tau_ref, f_ref)
        raw = embed_reflection(box, dut_true)
        noise = 10.0 ** (rng.uniform(-1, 1, len(grid)) * cfg.vna_mag_db / 20.0)
        et = solve_error_terms(standards, measured, grid)
        corrected[t] = apply_correction(et, raw * noise)

    q = (0.05, 0.50, 0.95)
    mag_q = np.quantile(np.abs(corrected), q, axis=0)
    return CalibrationMCResult(grid, dut_true, corrected, q, mag_q)


def standards_verification_error(standards, path_models, cfg: UncertaintyConfig,
                                 grid: FrequencyGrid, q: float = 0.95) -> np.ndarray:
    """Per-frequency error quantile of re-corrected standards across trials.

    Each trial draws two independent tracking/matching states per path: the
    calibration state (used to solve the error terms) and a verification
    state (the paths after drift).  The standards measured in the verify
    state are corrected with the cal-state solution; the reported error is
    the worst |corrected - true| over the standards.  The frequency where
    this crosses a reflection threshold bounds the observable return loss.
    """
    if len(path_models) < len(standards):
        raise ValueError("need at least one path model per standard")
    paths = path_models[: len(standards)]
    taus = [max(path_delay(p), 0.0) for p in paths]
    tau_ref = cfg.ref_delay_s if cfg.ref_delay_s is not None else (
        float(np.median(taus)) or 1.0
    )
    f_ref = float(np.median(grid.points))
    streams = [np.random.default_rng(s) for s in
               np.random.SeedSequence(cfg.seed).spawn(cfg.trials)]
    err = np.empty((cfg.trials, len(grid)))
    for t, rng in enumerate(streams):
        cal_meas, ver_meas = [], []
        for std, path, tau in zip(standards, paths, taus):
            box_cal = _perturb_path(path, cfg, rng, tau, tau_ref, f_ref)
            box_ver = _perturb_path(path, cfg, rng, tau, tau_ref, f_ref)
            noise = 10.0 ** (rng.uniform(-1, 1, len(grid)) * cfg.vna_mag_db / 20.0)
            cal_meas.append(embed_reflection(box_cal, std.gamma) * noise)
            noise = 10.0 ** (rng.uniform(-1, 1, len(grid)) * cfg.vna_mag_db / 20.0)
            ver_meas.append(embed_reflection(box_ver, std.gamma) * noise)
        et = solve_error_terms(standards, cal_meas, grid)
        worst = np.zeros(len(grid))
        for std, gm in zip(standards, ver_meas):
            gc = apply_correction(et, gm)
            worst = np.maximum(worst, np.abs(gc - std.gamma))
        err[t] = worst
    return np.quantile(err, q, axis=0)


def crossover_frequency(grid: FrequencyGrid, error_q: np.ndarray,
                        threshold: float = 0.316) -> Optional[float]:
    """Lowest grid frequency where an error curve exceeds the threshold."""
    above = np.asarray(error_q) > threshold
    if not np.any(above):
        return None
    return float(grid.points[int(np.argmax(above))])
