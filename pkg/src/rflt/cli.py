"""Command-line client for the filter toolkit.

Every subcommand builds the same request document the HTTP service accepts
and either executes it in-process (default) or posts it to a running service
(``--server http://host:port``), then writes the returned artifacts.  All
inputs are SI units (Hz, H, F, Ohm); dB appears only in outputs.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _grid_spec(text: str):
    parts = text.split(",")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError(
            "grid must be start_hz,stop_hz,points[,log|linear]"
        )
    spacing = parts[3] if len(parts) == 4 else "linear"
    if spacing not in ("linear", "log"):
        raise argparse.ArgumentTypeError("grid spacing must be 'linear' or 'log'")
    return {
        "start_hz": float(parts[0]),
        "stop_hz": float(parts[1]),
        "points": int(parts[2]),
        "spacing": spacing,
    }


def _band_spec(text: str):
    lo, hi = text.split(",")
    return {"f_lo_hz": float(lo), "f_hi_hz": float(hi)}


def _pairs(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if len(tok) != 2 or not tok.isdigit():
            raise argparse.ArgumentTypeError("pairs look like 11,21,22")
        out.append((int(tok[0]), int(tok[1])))
    return out


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write(path, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


class Client:
    """Dispatches request models in-process or to a remote service."""

    def __init__(self, server: str | None):
        self.server = server.rstrip("/") if server else None

    def call(self, name: str, request, response_model):
        if self.server is None:
            from .service import handlers

            return getattr(handlers, name)(request)
        import httpx

        r = httpx.post(
            f"{self.server}/{name}", json=request.model_dump(mode="json"), timeout=600.0
        )
        if r.status_code != 200:
            detail = r.json().get("detail", r.text) if r.headers.get(
                "content-type", ""
            ).startswith("application/json") else r.text
            raise RuntimeError(f"service error ({r.status_code}): {detail}")
        return response_model.model_validate(r.json())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rflt",
        description="Reflectionless filter synthesis, analysis and calibration toolkit.",
    )
    p.add_argument("--server", help="URL of a running rflt service (default: in-process)")
    p.add_argument("--threads", type=int, default=0,
                   help="cap numeric threads (results are identical for any value)")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="synthesize a reflectionless filter netlist")
    sp.add_argument("--topology", choices=("bandpass", "lowpass"), default="bandpass")
    sp.add_argument("--fp1", type=float, help="lower transmission zero, Hz")
    sp.add_argument("--fp2", type=float, help="upper transmission zero, Hz")
    sp.add_argument("--fp", type=float, help="low-pass cutoff, Hz")
    sp.add_argument("--z0", type=float, default=50.0)
    sp.add_argument("--grid", type=_grid_spec, help="start,stop,points[,log]")
    sp.add_argument("-o", "--output", help="netlist JSON path (default stdout)")
    sp.add_argument("--response-csv", help="ideal response CSV path (needs --grid)")

    ap = sub.add_parser("analyze", help="evaluate a netlist or Touchstone file")
    ap.add_argument("--netlist", help="netlist JSON path or - for stdin")
    ap.add_argument("--touchstone", help="Touchstone path or - for stdin")
    ap.add_argument("--grid", type=_grid_spec)
    ap.add_argument("--pairs", type=_pairs, default=[(1, 1), (2, 1)])
    ap.add_argument("--phase", action="store_true")
    ap.add_argument("--linear", action="store_true", help="magnitudes instead of dB")
    ap.add_argument("--summary", action="store_true",
                    help="print center/bandwidth/IL/RL summary to stderr as JSON")
    ap.add_argument("-o", "--output")

    dp = sub.add_parser("delay", help="symmetry-plane delay reflection model")
    dp.add_argument("--fp", type=float, required=True, help="low-pass cutoff, Hz")
    dp.add_argument("--r", type=float, default=50.0)
    dp.add_argument("--z-line", type=float, default=50.0)
    dp.add_argument("--theta", type=float, required=True,
                    help="electrical length at --ref-freq, radians")
    dp.add_argument("--ref-freq", type=float, required=True, help="Hz")
    dp.add_argument("--grid", type=_grid_spec, required=True)
    dp.add_argument("-o", "--output")

    mp = sub.add_parser("mutual", help="mutual-inductance matrix of spiral layouts")
    mp.add_argument("--spirals", required=True,
                    help="JSON file: list of spiral specs (or - for stdin)")
    mp.add_argument("-o", "--output")

    wp = sub.add_parser("windings", help="exhaustive winding-direction search")
    wp.add_argument("--netlist", required=True)
    wp.add_argument("--matrix", required=True)
    wp.add_argument("--grid", type=_grid_spec, required=True)
    wp.add_argument("--band", type=_band_spec, help="objective band lo_hz,hi_hz")
    wp.add_argument("--threshold", type=float, default=0.0, help="drop |M| below, H")
    wp.add_argument("--active-only", action="store_true",
                    help="enumerate only inductors with retained couplings")
    wp.add_argument("-o", "--output", help="full table CSV")
    wp.add_argument("--best-out", help="best signs JSON")

    tp = sub.add_parser("tolerance", help="component-tolerance Monte Carlo")
    tp.add_argument("--netlist", required=True)
    tp.add_argument("--grid", type=_grid_spec, required=True)
    tp.add_argument("--common", type=float, required=True,
                    help="common L/C group scale fraction (e.g. 0.1)")
    tp.add_argument("--per-element", type=float, default=0.0)
    tp.add_argument("--trials", type=int, default=500)
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--band", type=_band_spec)
    tp.add_argument("-o", "--output")

    cp = sub.add_parser("calmc", help="calibration tracking/matching Monte Carlo")
    cp.add_argument("--grid", type=_grid_spec, required=True)
    cp.add_argument("--standards", default="open,short,load",
                    help="comma list from open,short,load,term2,offset_short")
    cp.add_argument("--paths", required=True,
                    help="JSON file: list of {delay_s, il_db, rl_db}")
    cp.add_argument("--dut-touchstone")
    cp.add_argument("--dut-rl", type=float, default=20.0, help="synthetic DUT RL, dB")
    cp.add_argument("--dut-delay", type=float, default=0.0, help="synthetic DUT delay, s")
    cp.add_argument("--trials", type=int, default=500)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--vna-mag", type=float, default=0.4, help="VNA noise span, dB")
    cp.add_argument("--phase", type=float, default=10.0, help="phase tracking span, deg")
    cp.add_argument("--path-rl", type=float, default=10.0, help="RL matching span, dB")
    cp.add_argument("--path-il", type=float, default=0.5, help="IL matching span, dB")
    cp.add_argument("--ref-delay", type=float, help="tracking reference delay, s")
    cp.add_argument("-o", "--output", help="quantile CSV")
    cp.add_argument("--histogram", help="heat-map histogram CSV")

    op = sub.add_parser("optimize", help="tune netlist values against targets")
    op.add_argument("--problem", required=True, help="problem JSON (or - for stdin)")
    op.add_argument("--max-iterations", type=int, default=200)
    op.add_argument("--tolerance", type=float, default=1e-12)
    op.add_argument("--initial", help="JSON file of element->value starting point")
    op.add_argument("-o", "--output", help="tuned netlist JSON")
    op.add_argument("--trace", help="objective trace CSV")

    np_ = sub.add_parser("noise", help="resistor-port noise transfer functions")
    np_.add_argument("--netlist", required=True)
    np_.add_argument("--grid", type=_grid_spec, required=True)
    np_.add_argument("-o", "--output")

    vp = sub.add_parser("serve", help="run the HTTP service")
    vp.add_argument("--host", default="127.0.0.1")
    vp.add_argument("--port", type=int, default=8421)

    return p


def run_command(args, client: Client) -> int:
    from .service import models

    if args.command == "synth":
        req = models.SynthRequest(
            topology=args.topology,
            fp1_hz=args.fp1,
            fp2_hz=args.fp2,
            fp_hz=args.fp,
            z0=args.z0,
            grid=args.grid,
        )
        resp = client.call("synth", req, models.SynthResponse)
        _write(args.output, json.dumps(resp.netlist, indent=2))
        if args.response_csv:
            if resp.response_csv is None:
                raise ValueError("--response-csv needs --grid")
            _write(args.response_csv, resp.response_csv)
        print(json.dumps(resp.elements, indent=2), file=sys.stderr)
        return 0

    if args.command == "analyze":
        req = models.AnalyzeRequest(
            netlist=json.loads(_read(args.netlist)) if args.netlist else None,
            touchstone=_read(args.touchstone) if args.touchstone else None,
            grid=args.grid,
            pairs=args.pairs,
            db=not args.linear,
            phase=args.phase,
            summary=args.summary,
        )
        resp = client.call("analyze", req, models.AnalyzeResponse)
        _write(args.output, resp.response_csv)
        if resp.summary is not None:
            print(json.dumps(resp.summary, indent=2), file=sys.stderr)
        return 0

    if args.command == "delay":
        req = models.DelayRequest(
            fp_hz=args.fp, r=args.r, z_line=args.z_line,
            theta_ref_rad=args.theta, ref_hz=args.ref_freq, grid=args.grid,
        )
        resp = client.call("delay", req, models.DelayResponse)
        _write(args.output, resp.csv)
        print(f"max |Gamma_d| = {resp.max_reflection:.6g}", file=sys.stderr)
        return 0

    if args.command == "mutual":
        spirals = json.loads(_read(args.spirals))
        req = models.MutualRequest(spirals=spirals)
        resp = client.call("mutual", req, models.MutualResponse)
        _write(args.output, json.dumps(resp.matrix, indent=2))
        return 0

    if args.command == "windings":
        req = models.WindingsRequest(
            netlist=json.loads(_read(args.netlist)),
            matrix=json.loads(_read(args.matrix)),
            grid=args.grid,
            band=args.band,
            threshold_h=args.threshold,
            active_only=args.active_only,
        )
        resp = client.call("windings", req, models.WindingsResponse)
        _write(args.output, resp.table_csv)
        if args.best_out:
            _write(args.best_out, json.dumps(
                {"signs": resp.best_signs, "max_inband_s11": resp.best_objective,
                 "max_inband_s11_db": resp.best_objective_db}, indent=2))
        print(f"best signs {resp.best_signs} -> {resp.best_objective_db:.2f} dB",
              file=sys.stderr)
        return 0

    if args.command == "tolerance":
        req = models.ToleranceRequest(
            netlist=json.loads(_read(args.netlist)),
            grid=args.grid,
            common_fraction=args.common,
            per_element_fraction=args.per_element,
            trials=args.trials,
            seed=args.seed,
            band=args.band,
        )
        resp = client.call("tolerance", req, models.ToleranceResponse)
        _write(args.output, resp.quantile_csv)
        if resp.worst_inband_return_loss_db is not None:
            print(f"worst in-band return loss: {resp.worst_inband_return_loss_db:.2f} dB",
                  file=sys.stderr)
        return 0

    if args.command == "calmc":
        req = models.CalMcRequest(
            grid=args.grid,
            standards=args.standards.split(","),
            paths=json.loads(_read(args.paths)),
            dut_touchstone=_read(args.dut_touchstone) if args.dut_touchstone else None,
            dut_rl_db=args.dut_rl,
            dut_delay_s=args.dut_delay,
            trials=args.trials,
            seed=args.seed,
            vna_mag_db=args.vna_mag,
            phase_deg=args.phase,
            path_rl_db=args.path_rl,
            path_il_db=args.path_il,
            ref_delay_s=args.ref_delay,
        )
        resp = client.call("calmc", req, models.CalMcResponse)
        _write(args.output, resp.quantile_csv)
        if args.histogram:
            _write(args.histogram, resp.histogram_csv)
        co = "none on grid" if resp.crossover_hz is None else f"{resp.crossover_hz:.4g} Hz"
        print(f"10 dB observability crossover: {co}", file=sys.stderr)
        return 0

    if args.command == "optimize":
        req = models.OptimizeRequest(
            problem=json.loads(_read(args.problem)),
            max_iterations=args.max_iterations,
            tolerance=args.tolerance,
            initial=json.loads(_read(args.initial)) if args.initial else None,
        )
        resp = client.call("optimize", req, models.OptimizeResponse)
        _write(args.output, json.dumps(resp.netlist, indent=2))
        if args.trace:
            _write(args.trace, resp.trace_csv)
        print(
            f"cost {resp.cost:.6g} after {resp.iterations} iterations "
            f"(converged={resp.converged}): {resp.message}",
            file=sys.stderr,
        )
        return 0

    if args.command == "noise":
        req = models.NoiseRequest(netlist=json.loads(_read(args.netlist)), grid=args.grid)
        resp = client.call("noise", req, models.NoiseResponse)
        _write(args.output, resp.response_csv)
        return 0

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    raise AssertionError(f"unhandled command {args.command}")


def _check_usage(parser: argparse.ArgumentParser, args):
    """Flag-completeness checks that are usage errors (exit 2), not domain ones."""
    if args.command == "synth":
        if args.topology == "bandpass" and (args.fp1 is None or args.fp2 is None):
            parser.error("synth --topology bandpass requires --fp1 and --fp2")
        if args.topology == "lowpass" and args.fp is None:
            parser.error("synth --topology lowpass requires --fp")
    if args.command == "analyze":
        if (args.netlist is None) == (args.touchstone is None):
            parser.error("analyze needs exactly one of --netlist or --touchstone")
        if args.netlist is not None and args.grid is None:
            parser.error("analyze --netlist requires --grid")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_usage(parser, args)
    if args.threads and args.threads > 0:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(args.threads))
    client = Client(args.server)
    try:
        return run_command(args, client)
    except Exception as exc:  # noqa: BLE001 - single CLI boundary
        from pydantic import ValidationError

        from .errors import ToolkitError

        if isinstance(exc, (ToolkitError, ValueError, KeyError, OSError,
                            ValidationError, RuntimeError, json.JSONDecodeError)):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
