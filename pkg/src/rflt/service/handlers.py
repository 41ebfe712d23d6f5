"""Request handlers shared by the HTTP service and the CLI.

Each handler is a pure function from a request model to a response model;
the FastAPI app and the command-line client both delegate here, so results
are identical no matter which surface invoked them.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .. import calib
from ..mna import evaluate_netlist
from ..netlist import netlist_from_dict, netlist_to_dict
from ..network import FrequencyGrid, magnitude_db
from ..nonideal import (
    DelayModelInput,
    ToleranceSpec,
    delay_reflection,
    mutual_matrix_from_json,
    mutual_matrix_from_paths,
    spiral_path,
    tolerance_mc,
    winding_search,
)
from ..nonideal.mutual import mutual_matrix_to_json
from ..optimize import SolveConfig, problem_from_dict, solve
from ..synth import (
    BandpassSpec,
    LowpassElements,
    band_summary,
    build_bandpass_netlist,
    build_lowpass_netlist,
    resistor_noise_transfer,
    synth_bandpass,
)
from ..touchstone import read_touchstone, write_response_csv
from . import models


def make_grid(spec: models.GridSpec) -> FrequencyGrid:
    if spec.spacing == "log":
        return FrequencyGrid.log(spec.start_hz, spec.stop_hz, spec.points)
    return FrequencyGrid.linear(spec.start_hz, spec.stop_hz, spec.points)


def synth(req: models.SynthRequest) -> models.SynthResponse:
    if req.topology == "bandpass":
        spec = BandpassSpec.from_hz(req.fp1_hz, req.fp2_hz, req.z0)
        e = synth_bandpass(spec)
        nl = build_bandpass_netlist(e)
        elements = {
            "omega_s_rad_s": e.omega_s,
            "omega_x_rad_s": e.omega_x,
            "l_s_h": e.l_s,
            "l_x_h": e.l_x,
            "c_s_f": e.c_s,
            "c_x_f": e.c_x,
            "r_ohm": e.r,
        }
    else:
        e = LowpassElements.from_cutoff(2.0 * np.pi * req.fp_hz, req.z0)
        nl = build_lowpass_netlist(e)
        elements = {"omega_p_rad_s": e.omega_p, "l_h": e.l, "c_f": e.c, "r_ohm": e.r}
    response_csv = None
    if req.grid is not None:
        nd = evaluate_netlist(nl, make_grid(req.grid))
        response_csv = write_response_csv(nd, pairs=((1, 1), (2, 1)))
    return models.SynthResponse(
        elements=elements, netlist=netlist_to_dict(nl), response_csv=response_csv
    )


def analyze(req: models.AnalyzeRequest) -> models.AnalyzeResponse:
    if req.netlist is not None:
        nd = evaluate_netlist(netlist_from_dict(req.netlist), make_grid(req.grid))
    else:
        nd = read_touchstone(req.touchstone)
    out_csv = write_response_csv(nd, pairs=tuple(req.pairs), db=req.db, phase=req.phase)
    summary = band_summary(nd) if req.summary else None
    return models.AnalyzeResponse(response_csv=out_csv, summary=summary)


def delay(req: models.DelayRequest) -> models.DelayResponse:
    lp = LowpassElements.from_cutoff(2.0 * np.pi * req.fp_hz, req.r)
    inp = DelayModelInput(lp, req.z_line, req.theta_ref_rad, req.ref_hz)
    grid = make_grid(req.grid)
    gamma = delay_reflection(inp, grid)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["freq_hz", "gamma_re", "gamma_im", "gamma_db"])
    db = magnitude_db(np.where(np.abs(gamma) > 0, gamma, 1e-30))
    for f, g, d in zip(grid.points, gamma, db):
        w.writerow([f"{f:.12e}", f"{g.real:.12e}", f"{g.imag:.12e}", f"{d:.6f}"])
    return models.DelayResponse(csv=buf.getvalue(), max_reflection=float(np.abs(gamma).max()))


def mutual(req: models.MutualRequest) -> models.MutualResponse:
    labels = [s.label for s in req.spirals]
    if len(set(labels)) != len(labels):
        raise ValueError("spiral labels must be unique")
    paths = [
        spiral_path(
            s.turns,
            s.pitch_m,
            s.outer_size_m,
            s.segments_per_turn,
            center=s.center_m,
            plane=s.plane,
            handedness=s.handedness,
        )
        for s in req.spirals
    ]
    mm = mutual_matrix_from_paths(labels, paths)
    return models.MutualResponse(matrix=json.loads(mutual_matrix_to_json(mm)))


def windings(req: models.WindingsRequest) -> models.WindingsResponse:
    nl = netlist_from_dict(req.netlist)
    mm = mutual_matrix_from_json(json.dumps(req.matrix))
    grid = make_grid(req.grid)
    band = (req.band.f_lo_hz, req.band.f_hi_hz) if req.band else None
    best_signs, best_obj, table = winding_search(
        nl, mm, grid, objective_band=band, threshold=req.threshold_h,
        active_only=req.active_only,
    )
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(list(mm.labels) + ["max_inband_s11", "max_inband_s11_db"])
    for signs, obj in table:
        w.writerow(list(signs) + [f"{obj:.9e}", f"{20*np.log10(max(obj, 1e-30)):.4f}"])
    return models.WindingsResponse(
        best_signs=list(best_signs),
        best_objective=best_obj,
        best_objective_db=float(20 * np.log10(max(best_obj, 1e-30))),
        table_csv=buf.getvalue(),
    )


def tolerance(req: models.ToleranceRequest) -> models.ToleranceResponse:
    nl = netlist_from_dict(req.netlist)
    grid = make_grid(req.grid)
    spec = ToleranceSpec(
        common_fraction=req.common_fraction,
        per_element_fraction=req.per_element_fraction,
        trials=req.trials,
        seed=req.seed,
    )
    band = (req.band.f_lo_hz, req.band.f_hi_hz) if req.band else None
    summ = tolerance_mc(nl, spec, grid, band=band)
    buf = io.StringIO()
    w = csv.writer(buf)
    header = ["freq_hz"]
    for name in ("s11", "s21"):
        for q in summ.quantiles:
            header.append(f"{name}_q{int(round(q * 100)):02d}")
    w.writerow(header)
    for i, f in enumerate(grid.points):
        row = [f"{f:.12e}"]
        row += [f"{summ.s11_q[k, i]:.9e}" for k in range(len(summ.quantiles))]
        row += [f"{summ.s21_q[k, i]:.9e}" for k in range(len(summ.quantiles))]
        w.writerow(row)
    return models.ToleranceResponse(
        quantile_csv=buf.getvalue(),
        worst_inband_return_loss_db=summ.worst_inband_return_loss_db,
    )


def _standards_for(req: models.CalMcRequest, grid: FrequencyGrid):
    factories = {
        "open": lambda: calib.standard_open(grid),
        "short": lambda: calib.standard_short(grid),
        "load": lambda: calib.standard_load(grid),
        "term2": lambda: calib.standard_term2(grid, req.term2_rl_db, req.term2_phase_deg),
        "offset_short": lambda: calib.standard_offset_short(grid, req.offset_short_delay_s),
    }
    return [factories[name]() for name in req.standards]


def calmc(req: models.CalMcRequest) -> models.CalMcResponse:
    grid = make_grid(req.grid)
    standards = _standards_for(req, grid)
    paths = [calib.switch_path(grid, p.delay_s, p.il_db, p.rl_db) for p in req.paths]
    if req.dut_touchstone is not None:
        dut_nd = read_touchstone(req.dut_touchstone)
        if dut_nd.grid != grid:
            raise ValueError("DUT touchstone grid must match the requested grid")
        dut = dut_nd.s[:, 0, 0]
    else:
        dut = 10.0 ** (-req.dut_rl_db / 20.0) * np.exp(-2j * grid.omega * req.dut_delay_s)
    cfg = calib.UncertaintyConfig(
        trials=req.trials,
        seed=req.seed,
        vna_mag_db=req.vna_mag_db,
        phase_deg=req.phase_deg,
        path_rl_db=req.path_rl_db,
        path_il_db=req.path_il_db,
        ref_delay_s=req.ref_delay_s,
    )
    result = calib.calibration_mc(standards, dut, paths, cfg, grid)
    err_q = calib.standards_verification_error(standards, paths[:-1], cfg, grid)
    crossover = calib.crossover_frequency(grid, err_q)

    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(
        ["freq_hz"]
        + [f"corrected_mag_q{int(round(q * 100)):02d}" for q in result.quantiles]
        + ["true_mag", "standards_err_q95"]
    )
    for i, f in enumerate(grid.points):
        w.writerow(
            [f"{f:.12e}"]
            + [f"{result.mag_q[k, i]:.9e}" for k in range(len(result.quantiles))]
            + [f"{abs(result.dut_true[i]):.9e}", f"{err_q[i]:.9e}"]
        )
    quantile_csv = buf.getvalue()

    bins = np.linspace(0.0, 60.0, req.histogram_bins_db + 1)
    counts, freqs, edges = result.histogram_db(bins)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["freq_hz"] + [f"rl_{edges[k]:.2f}_{edges[k + 1]:.2f}_db"
                              for k in range(len(edges) - 1)])
    for i, f in enumerate(freqs):
        w.writerow([f"{f:.12e}"] + [str(int(c)) for c in counts[i]])
    return models.CalMcResponse(
        quantile_csv=quantile_csv,
        histogram_csv=buf.getvalue(),
        crossover_hz=crossover,
    )


def optimize(req: models.OptimizeRequest) -> models.OptimizeResponse:
    problem = problem_from_dict(req.problem)
    config = SolveConfig(
        max_iterations=req.max_iterations,
        tolerance=req.tolerance,
        initial=req.initial,
    )
    result = solve(problem, config)
    tuned = problem.apply([result.values[p.element] for p in problem.free])
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["step", "cost"])
    for i, c in enumerate(result.trace):
        w.writerow([i, f"{c:.12e}"])
    return models.OptimizeResponse(
        netlist=netlist_to_dict(tuned),
        values=result.values,
        cost=result.cost,
        residual_norm=result.residual_norm,
        converged=result.converged,
        iterations=result.iterations,
        trace_csv=buf.getvalue(),
        message=result.message,
    )


def noise(req: models.NoiseRequest) -> models.NoiseResponse:
    nl = netlist_from_dict(req.netlist)
    grid = make_grid(req.grid)
    nd = resistor_noise_transfer(nl, grid)
    n_ext = len(nl.ports)
    resistor_names = [e.name for e in nl.elements if type(e).__name__ == "Resistor"]
    pairs = []
    for ext in range(1, n_ext + 1):
        for rp in range(n_ext + 1, nd.nports + 1):
            pairs.append((ext, rp))
    out_csv = write_response_csv(nd, pairs=tuple(pairs))
    return models.NoiseResponse(response_csv=out_csv, resistor_ports=resistor_names)
