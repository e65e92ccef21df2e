"""Command-line front end.

Times are in units of the rms delay spread (``tau_ds = 1``), so
``--bandwidth`` is ``B * tau_ds``.  SNRs are entered in dB.  Output is CSV
(or JSON with ``--format json``) on stdout or ``--out``; failures print one
line ``error: <category>: <message>`` to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .bounds import SoundingConfig, bound_curve
from .covariance import TapGrid, build_covariance, min_window, tap_energies
from .errors import CalibrationError, TdlBoundsError
from .montecarlo import TrialConfig, run_trials
from .pdp import PdpKind, PdpSpec, pdp_peak
from .pilots import PilotKind, folded_psd, gen_pilot, read_pilot_csv, sample_autocorr

EXIT_USAGE = 2
EXIT_FAILURE = 1
TABLE_KINDS = ("exponential", "gaussian", "uniform", "trunc_exponential")


class UsageError(Exception):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


# -- argument parsing ---------------------------------------------------------

def parse_snr_list(text):
    """``"0,10,20"`` or ``"start:step:stop"`` (stop inclusive)."""
    text = text.strip()
    try:
        if ":" in text:
            start, step, stop = (float(v) for v in text.split(":"))
            if step == 0 or (stop - start) / step < 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [start + i * step for i in range(n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError("--snr-db", f"cannot parse {text!r}") from None


def parse_window(text):
    if text is None or text.strip().lower() == "auto":
        return None
    try:
        L1, L2 = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError("--window", f"expected 'L1,L2' or 'auto', got {text!r}") from None
    if L1 < 0 or L2 < 0:
        raise UsageError("--window", "L1 and L2 must be nonnegative")
    return L1, L2


def parse_pdp(text, tau_m=None):
    """A kind name or a JSON object ``{"kind": ..., "tau_ds": ..., "tau_m": ...}``."""
    if text is None:
        text = "exponential"
    try:
        if text.lstrip().startswith("{"):
            obj = json.loads(text)
            if tau_m is not None and "tau_m" not in obj:
                obj["tau_m"] = tau_m
            return PdpSpec.from_json(obj)
        return PdpSpec(text, 1.0, tau_m)
    except json.JSONDecodeError as exc:
        raise UsageError("--pdp", f"invalid JSON ({exc.msg})") from None
    except CalibrationError:
        raise
    except ValueError as exc:
        raise UsageError("--pdp", str(exc)) from None


def parse_float_list(text, field):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(field, f"cannot parse {text!r}") from None


def _positive(field, value):
    if not value > 0:
        raise UsageError(field, f"must be positive, got {value}")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # defaults differ per subcommand; parent actions are shared, so they are
    # resolved in the command functions instead of with set_defaults
    common.add_argument("--pdp", default=None,
                        help="PDP name or JSON object (default: exponential)")
    common.add_argument("--bandwidth", default=None,
                        help="bandwidth B in units of 1/tau_ds (default 1; table1: 1,10)")
    common.add_argument("--window", default="auto", help="'L1,L2' or 'auto' (default)")
    common.add_argument("--n", type=int, default=100, help="observation length N")
    common.add_argument("--snr-db", default=None,
                        help="comma list or start:step:stop, in dB "
                             "(default -20:10:30; simulate: -10,0,10)")
    common.add_argument("--px", type=float, default=1.0, help="pilot power Px")
    common.add_argument("--trials", type=int, default=10000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threshold", type=float, default=0.9,
                        help="energy fraction for automatic windows (default 0.9)")
    common.add_argument("--min-side", type=int, default=1,
                        help="least taps on each side of tap 0 in automatic windows")
    common.add_argument("--tau-m", type=float, default=None,
                        help="truncated-exponential maximum delay (default 6)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output path or '-' for stdout")

    p = argparse.ArgumentParser(prog="tdlbounds", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table1", parents=[common],
                       help="minimal tap windows per PDP and bandwidth")
    t.add_argument("--kinds", default=",".join(TABLE_KINDS),
                   help="comma list of PDP kinds (ignored when --pdp is given)")
    t.set_defaults(func=cmd_table1)

    b = sub.add_parser("bounds", parents=[common], help="CRB/BCRB curves versus SNR")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo LS/LMMSE validation")
    s.add_argument("--estimators", default="ls,mmse")
    s.add_argument("--pilot", default="zadoff_chu",
                   help="zadoff_chu | constant_modulus | gaussian_white")
    s.add_argument("--pilot-seed", type=int, default=None,
                   help="seed for random pilots (default: --seed)")
    s.add_argument("--pilot-file", default=None, help="CSV of 're,im' pilot samples")
    s.add_argument("--redraw-pilot", action="store_true",
                   help="draw a fresh pilot in every trial")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    ps = sub.add_parser("pilot-spectrum", parents=[common],
                        help="sample autocorrelation and folded PSD of a pilot")
    ps.add_argument("--pilot", default="constant_modulus")
    ps.add_argument("--pilot-file", default=None)
    ps.add_argument("--length", type=int, default=100000)
    ps.add_argument("--maxlag", type=int, default=32)
    ps.add_argument("--freqs", type=int, default=65, help="number of PSD samples")
    ps.set_defaults(func=cmd_pilot_spectrum)

    c = sub.add_parser("covariance", parents=[common], help="export the tap covariance")
    c.set_defaults(func=cmd_covariance)
    return p


# -- helpers ------------------------------------------------------------------

def _single_bandwidth(args):
    values = parse_float_list(args.bandwidth or "1", "--bandwidth")
    if len(values) != 1:
        raise UsageError("--bandwidth", "expected a single value")
    return _positive("--bandwidth", values[0])


def _grid(args, spec, B):
    window = parse_window(args.window)
    if window is None:
        if not 0 < args.threshold < 1:
            raise UsageError("--threshold", "must lie in (0, 1)")
        window = min_window(spec, B, args.threshold, args.min_side)
    return TapGrid(B, *window)


def _emit(args, text):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _csv(rows, header):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _g(v):
    return f"{v:.12g}"


# -- subcommands --------------------------------------------------------------

def cmd_table1(args):
    bands = [_positive("--bandwidth", b)
             for b in parse_float_list(args.bandwidth or "1,10", "--bandwidth")]
    if not 0 < args.threshold < 1:
        raise UsageError("--threshold", "must lie in (0, 1)")
    if args.pdp is not None:
        specs_src = [args.pdp]
    else:
        specs_src = [k.strip() for k in args.kinds.split(",") if k.strip()]
    records = []
    for src in specs_src:
        for B in bands:
            rec = {"kind": None, "bandwidth": B, "L1": None, "L2": None,
                   "captured": None, "status": "ok"}
            try:
                spec = parse_pdp(src, args.tau_m)
                rec["kind"] = spec.kind.value
                L1, L2 = min_window(spec, B, args.threshold, args.min_side)
                cap = float(tap_energies(spec, B, np.arange(-L1, L2 + 1)).sum())
                rec.update(L1=L1, L2=L2, captured=cap)
            except UsageError:
                raise
            except (TdlBoundsError, ValueError) as exc:
                # one bad cell does not abort the others
                rec["kind"] = rec["kind"] or src
                category = getattr(exc, "category", "value")
                rec["status"] = f"{category}: {exc}".replace(",", ";")
            records.append(rec)
    _print_table(records, sys.stderr)
    if args.format == "json":
        _emit(args, json.dumps({"threshold": args.threshold, "cells": records}) + "\n")
    else:
        rows = [[r["kind"], _g(r["bandwidth"]),
                 "" if r["L1"] is None else r["L1"], "" if r["L2"] is None else r["L2"],
                 "" if r["captured"] is None else _g(r["captured"]), r["status"]]
                for r in records]
        _emit(args, _csv(rows, ["kind", "bandwidth", "L1", "L2", "captured", "status"]))
    return 0


def _print_table(records, stream):
    kinds = list(dict.fromkeys(r["kind"] for r in records))
    bands = list(dict.fromkeys(r["bandwidth"] for r in records))
    cell = {(r["kind"], r["bandwidth"]): r for r in records}
    width = max(12, *(len(k) + 2 for k in kinds))
    stream.write("B*tau_ds".ljust(10) + "".join(k.rjust(width) for k in kinds) + "\n")
    for B in bands:
        parts = []
        for k in kinds:
            r = cell.get((k, B))
            txt = "-" if r is None else (f"({r['L1']},{r['L2']})" if r["status"] == "ok" else "n/a")
            parts.append(txt.rjust(width))
        stream.write(f"{B:<10g}" + "".join(parts) + "\n")


def cmd_bounds(args):
    spec = parse_pdp(args.pdp, args.tau_m)
    B = _single_bandwidth(args)
    _positive("--n", args.n)
    _positive("--px", args.px)
    grid = _grid(args, spec, B)
    Rh = build_covariance(spec, grid)
    Ph0 = None if spec.kind is PdpKind.DELTA else pdp_peak(spec)
    curve = bound_curve(Rh, parse_snr_list(args.snr_db or "-20:10:30"), args.n, Ph0, args.px)
    curve.meta["pdp"] = spec.to_json()
    _emit(args, curve.to_json() + "\n" if args.format == "json" else curve.to_csv())
    return 0


def cmd_simulate(args):
    spec = parse_pdp(args.pdp, args.tau_m)
    B = _single_bandwidth(args)
    _positive("--n", args.n)
    _positive("--trials", args.trials)
    _positive("--px", args.px)
    grid = _grid(args, spec, B)
    Rh = build_covariance(spec, grid)
    estimators = tuple(e.strip().lower() for e in args.estimators.split(",") if e.strip())
    try:
        kind = PilotKind.parse(args.pilot)
    except ValueError:
        raise UsageError("--pilot", f"unknown pilot kind {args.pilot!r}") from None
    pilot = None
    if args.pilot_file:
        pilot = read_pilot_csv(args.pilot_file, fs=2 * B, first=1 - grid.L2)
    pilot_seed = args.seed if args.pilot_seed is None else args.pilot_seed
    rows, out = [], []
    for snr_db in parse_snr_list(args.snr_db or "-10,0,10"):
        cfg = SoundingConfig.from_snr_db(args.n, snr_db, args.px, B)
        try:
            tc = TrialConfig(cfg, grid, args.trials, kind, pilot_seed, args.seed,
                             estimators, args.redraw_pilot)
        except ValueError as exc:
            raise UsageError("--estimators", str(exc)) from None
        res = run_trials(tc, Rh, pilot=pilot, workers=args.workers)
        curve = bound_curve(Rh, [snr_db], args.n, None, args.px)
        for name, st in res.stats.items():
            bound = curve.beta[0] if name == "ls" else curve.bcrb_eigen[0]
            rows.append([_g(snr_db), name, _g(st.mse), _g(st.stderr), res.trials,
                         _g(st.theory), _g(bound)])
            out.append({"snr_db": snr_db, "estimator": name, "mse": st.mse,
                        "stderr": st.stderr, "trials": res.trials,
                        "theory": st.theory, "bound": float(bound)})
    if args.format == "json":
        _emit(args, json.dumps({"L1": grid.L1, "L2": grid.L2, "rows": out}) + "\n")
    else:
        _emit(args, _csv(rows, ["snr_db", "estimator", "mse", "stderr", "trials",
                                "theory", "bound"]))
    return 0


def cmd_pilot_spectrum(args):
    B = _single_bandwidth(args)
    fs = 2 * B
    if args.pilot_file:
        x = read_pilot_csv(args.pilot_file, Px=None, fs=fs)
    else:
        _positive("--length", args.length)
        _positive("--px", args.px)
        try:
            kind = PilotKind.parse(args.pilot)
        except ValueError:
            raise UsageError("--pilot", f"unknown pilot kind {args.pilot!r}") from None
        x = gen_pilot(kind, args.length, args.px, args.seed, fs=fs)
    if args.maxlag < 0:
        raise UsageError("--maxlag", "must be nonnegative")
    lags = sample_autocorr(x, args.maxlag)
    freqs = np.linspace(-fs / 2, fs / 2, max(args.freqs, 2))
    psd = folded_psd(lags, freqs, fs)
    if args.format == "json":
        _emit(args, json.dumps({
            "Px": x.Px, "fs": fs, "length": len(x),
            "lags": [[k, z.real, z.imag] for k, z in enumerate(lags)],
            "psd": [[f, s] for f, s in zip(freqs.tolist(), psd.tolist())],
        }) + "\n")
    else:
        rows = [["lag", k, _g(z.real), _g(z.imag)] for k, z in enumerate(lags)]
        rows += [["psd", _g(f), _g(s), "0"] for f, s in zip(freqs, psd)]
        _emit(args, _csv(rows, ["quantity", "x", "value", "imag"]))
    return 0


def cmd_covariance(args):
    spec = parse_pdp(args.pdp, args.tau_m)
    B = _single_bandwidth(args)
    Rh = build_covariance(spec, _grid(args, spec, B))
    _emit(args, Rh.to_json() + "\n" if args.format == "json" else Rh.to_csv())
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: usage: {exc}\n")
        return EXIT_USAGE
    except TdlBoundsError as exc:
        sys.stderr.write(f"error: {exc.category}: {exc}\n")
        return EXIT_FAILURE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__.lower()}: {exc}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
