"""Command-line front end: every analysis as a subcommand with file outputs.

Exit codes: 0 success (a no-solution or empty-window finding is still a
result), 2 usage/configuration error, 3 domain error raised inside a
computation. All numeric output goes through the deterministic 12-digit
formatters, so identical configs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import datapath, defaults, eye as eye_mod, formats, pam, ring, search
from .errors import DomainError

ENCODING_CHOICES = {"three-seg": defaults.THREE_SEGMENT, "two-seg": defaults.TWO_SEGMENT}


def _setup_from_args(args):
    if getattr(args, "config", None):
        return defaults.load_run_config(args.config)
    kind = ENCODING_CHOICES[getattr(args, "encoding", "three-seg")]
    cfg, resp = defaults.default_setup(kind)
    enc = (
        {"kind": pam.THREE_SEGMENT_THERMOMETER, "v1": 2.0}
        if kind == defaults.THREE_SEGMENT
        else {"kind": pam.TWO_SEGMENT_BINARY}
    )
    return cfg, resp, enc


def _parse_bounds(text: str) -> search.VoltageBounds:
    lo, _, hi = text.partition(":")
    return search.VoltageBounds(lo=float(lo), hi=float(hi))


def _parse_drive(text: str):
    return tuple(float(v) for v in text.split(","))


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _lambda_grid_from_args(args) -> np.ndarray:
    if args.lambda_stop < args.lambda_start:
        raise ValueError("--lambda-stop must not precede --lambda-start")
    return ring.wavelength_grid(args.lambda_start, args.lambda_stop, args.lambda_step)


def cmd_spectrum(args) -> int:
    cfg, resp, _ = _setup_from_args(args)
    drive = _parse_drive(args.drive) if args.drive else (0.0,) * cfg.n_segments
    grid = _lambda_grid_from_args(args)
    t = ring.transmission_grid(cfg, resp, grid, drive)
    pts = list(zip(grid, np.atleast_1d(t)))
    if args.format == "json":
        doc = [{"lambda_nm": l, "transmission": v} for l, v in pts]
        _emit(formats.to_json(doc) + "\n", args.out)
    else:
        lines = ["lambda_nm,transmission"]
        lines += [formats.csv_row(p) for p in pts]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_levels(args) -> int:
    cfg, resp, enc_doc = _setup_from_args(args)
    encoding = _encoding_from(args, enc_doc)
    if args.lam is not None:
        lams = [args.lam]
    else:
        if args.lambda_start is None or args.lambda_stop is None:
            raise ValueError("need --lambda or --lambda-start/--lambda-stop")
        lams = list(_lambda_grid_from_args(args))
    records = []
    for lam in lams:
        levels = pam.levels_for(cfg, resp, lam, encoding)
        metrics = pam.linearity_metrics(levels, cfg.p_in)
        records.append(pam.metrics_record(lam, levels, metrics))
    if args.format == "json":
        doc = records[0] if args.lam is not None else records
        _emit(formats.to_json(doc) + "\n", args.out)
    else:
        header = list(records[0].keys())
        lines = [",".join(header)]
        lines += [formats.csv_row([r[k] for k in header]) for r in records]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _encoding_from(args, enc_doc: dict):
    kind = enc_doc.get("kind", pam.THREE_SEGMENT_THERMOMETER)
    if getattr(args, "encoding", None):
        kind = (
            pam.THREE_SEGMENT_THERMOMETER
            if args.encoding == "three-seg"
            else pam.TWO_SEGMENT_BINARY
        )
    if kind == pam.THREE_SEGMENT_THERMOMETER:
        volts = getattr(args, "drive", None)
        if volts:
            v1, v2, v3 = _parse_drive(volts)
        else:
            v1 = getattr(args, "v1", None) or enc_doc.get("v1", 2.0)
            v2 = enc_doc.get("v2", v1)
            v3 = enc_doc.get("v3", v1)
        return pam.ThermometerEncoding(v1=v1, v2=v2, v3=v3)
    volts = getattr(args, "drive", None)
    if volts:
        vm, vl = _parse_drive(volts)
    else:
        vm = enc_doc.get("v_msb", 2.0)
        vl = enc_doc.get("v_lsb", 2.0)
    return pam.BinaryEncoding(v_msb=vm, v_lsb=vl)


def cmd_solve(args) -> int:
    cfg, resp, _ = _setup_from_args(args)
    bounds = _parse_bounds(args.bounds)
    if args.encoding == "three-seg":
        res = search.solve_three_segment(cfg, resp, args.lam, args.v1, bounds)
    else:
        res = search.best_rlm_two_segment(cfg, resp, args.lam, bounds)
    doc = res.to_dict()
    if args.format == "csv":
        header = list(doc.keys())
        metrics = doc.pop("metrics") or {}
        for k, v in metrics.items():
            doc[f"metrics_{k}"] = v
        header = list(doc.keys())
        text = ",".join(header) + "\n" + formats.csv_row([doc[k] for k in header]) + "\n"
        _emit(text, args.out)
    else:
        _emit(formats.to_json(doc) + "\n", args.out)
    return 0


RANGE_CSV_HEADER = ["lambda_nm", "best_rlm", "v2", "v3", "il_db", "er_db", "tp_db"]


def cmd_range(args) -> int:
    cfg, resp, _ = _setup_from_args(args)
    bounds = _parse_bounds(args.bounds)
    grid = _lambda_grid_from_args(args)
    kind = (
        pam.THREE_SEGMENT_THERMOMETER
        if args.encoding == "three-seg"
        else pam.TWO_SEGMENT_BINARY
    )
    report = search.linear_range(
        cfg,
        resp,
        kind,
        bounds,
        grid,
        threshold=args.threshold,
        v1_fixed=args.v1,
        threads=args.threads,
    )
    _emit(formats.to_json(report.to_dict()) + "\n", args.out)
    csv_out = args.csv_out
    if csv_out is None and args.out:
        csv_out = str(Path(args.out).with_suffix(".csv"))
    if csv_out:
        rows = [
            (e.lambda_nm, e.best_rlm, e.voltages[0], e.voltages[1], e.il_db, e.er_db, e.tp_db)
            for e in report.entries
        ]
        formats.dump_csv(csv_out, RANGE_CSV_HEADER, rows)
    return 0


def cmd_eye(args) -> int:
    cfg, resp, enc_doc = _setup_from_args(args)
    if args.symbols % 16 != 0 or args.symbols < 64:
        raise ValueError("--symbols must be a multiple of 16 and at least 64")
    prbs_cfg = datapath.PrbsConfig(order=args.order, seed=args.seed)
    bits = datapath.prbs_sequence(prbs_cfg, 2 * args.symbols)
    words = datapath.bits_to_words(bits)
    msb, lsb = datapath.serialize(words)

    codes = 2 * msb.astype(np.int64) + lsb.astype(np.int64)
    swing_codes = [int(c) for c in args.swing_codes.split(",")]
    if args.encoding == "three-seg":
        if len(swing_codes) != 3:
            raise ValueError("three-seg eye needs three swing codes")
        lut = datapath.LutConfig.pam4()
        seg_bits = datapath.pam4_segment_bits(msb, lsb, lut)
    else:
        if len(swing_codes) != 2:
            raise ValueError("two-seg eye needs two swing codes")
        seg_bits = [msb, lsb]
    drivers = [
        datapath.DriverConfig(sw_p=c, sw_n=c, bandwidth_ghz=args.bandwidth)
        for c in swing_codes
    ]
    wave = datapath.drive_waveform(seg_bits, drivers, args.ui_ps, args.sample_rate)
    trace = eye_mod.optical_trace(wave, cfg, resp, args.lam)
    raster = eye_mod.fold_eye(trace, args.ui_ps, args.sample_rate, args.power_bins)
    metrics = eye_mod.eye_metrics(trace, codes, args.sample_rate)

    swings = [drv.swing_vpp for drv in drivers]
    if args.encoding == "three-seg":
        enc = pam.ThermometerEncoding(*swings)
    else:
        enc = pam.BinaryEncoding(*swings)
    static_levels = pam.levels_for(cfg, resp, args.lam, enc)
    static_rlm = pam.rlm(static_levels)

    base = args.out
    doc = metrics.to_dict()
    doc["lambda_nm"] = args.lam
    doc["realized_swings_vpp"] = swings
    doc["static_rlm"] = static_rlm
    doc["static_levels"] = list(static_levels.as_tuple())
    formats.dump_json(doc, base + "_metrics.json")
    if args.waveform_out:
        header, rows = datapath.waveform_csv_rows(wave)
        formats.dump_csv(args.waveform_out, header, rows)
    if args.raster == "pgm":
        with open(base + "_raster.pgm", "w", newline="\n") as fh:
            fh.write(eye_mod.raster_to_pgm(raster))
    else:
        formats.dump_csv(
            base + "_raster.csv",
            [f"t{j}" for j in range(raster.n_time_bins)],
            raster.counts.tolist(),
        )
    return 0


def cmd_prbs(args) -> int:
    cfg = datapath.PrbsConfig(order=args.order, seed=args.seed)
    bits = datapath.prbs_sequence(cfg, args.count)
    if args.pack == "hex":
        padded = np.pad(bits, (0, (-bits.size) % 8))
        by = np.packbits(padded)
        text = by.tobytes().hex() + "\n"
    else:
        text = "\n".join(str(int(b)) for b in bits) + "\n"
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ringtx",
        description="Segmented micro-ring PAM-4 transmitter analyses",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=False, lam=False):
        sp.add_argument("--config", help="run-config JSON (default: packaged device)")
        sp.add_argument(
            "--encoding",
            choices=("three-seg", "two-seg"),
            default="three-seg",
            help="segment layout / code mapping",
        )
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        if grid:
            sp.add_argument("--lambda-start", dest="lambda_start", type=float, required=True)
            sp.add_argument("--lambda-stop", dest="lambda_stop", type=float, required=True)
            sp.add_argument("--lambda-step", dest="lambda_step", type=float, default=0.0005)
        if lam:
            sp.add_argument("--lambda", dest="lam", type=float, required=True)

    sp = sub.add_parser("spectrum", help="transmission vs wavelength CSV")
    common(sp, grid=True)
    sp.add_argument("--drive", help="per-segment voltages, e.g. 2.0,1.8,1.9")
    sp.set_defaults(fn=cmd_spectrum, format="csv")

    sp = sub.add_parser("levels", help="PAM-4 levels and linearity metrics")
    common(sp)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--lambda-start", dest="lambda_start", type=float)
    sp.add_argument("--lambda-stop", dest="lambda_stop", type=float)
    sp.add_argument("--lambda-step", dest="lambda_step", type=float, default=0.0005)
    sp.add_argument("--drive", help="encoding ON voltages (3 or 2 values)")
    sp.add_argument("--v1", type=float, help="thermometer first-segment voltage")
    sp.set_defaults(fn=cmd_levels)

    sp = sub.add_parser("solve", help="drive voltages for linear output at one wavelength")
    common(sp, lam=True)
    sp.add_argument("--v1", type=float, default=2.0)
    sp.add_argument("--bounds", default="1.5:3.0", help="LO:HI volts")
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("range", help="qualifying wavelength window under bounds")
    common(sp, grid=True)
    sp.add_argument("--v1", type=float, default=2.0)
    sp.add_argument("--bounds", default="1.5:3.0", help="LO:HI volts")
    sp.add_argument("--threshold", type=float, default=0.95)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--csv-out", dest="csv_out", help="per-wavelength CSV path")
    sp.set_defaults(fn=cmd_range)

    sp = sub.add_parser("eye", help="PRBS-driven optical eye raster and metrics")
    common(sp, lam=True)
    sp.add_argument("--order", type=int, default=7, choices=(7, 15, 31))
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--symbols", type=int, default=2048)
    sp.add_argument("--sample-rate", dest="sample_rate", type=int, default=16)
    sp.add_argument("--ui-ps", dest="ui_ps", type=float, default=31.25)
    sp.add_argument("--bandwidth", type=float, default=40.0, help="driver pole, GHz")
    sp.add_argument(
        "--swing-codes",
        dest="swing_codes",
        default="3,3,3",
        help="per-segment driver codes 0..15",
    )
    sp.add_argument("--power-bins", dest="power_bins", type=int, default=128)
    sp.add_argument("--raster", choices=("csv", "pgm"), default="csv")
    sp.set_defaults(fn=cmd_eye)
    # eye writes files under a base path
    for action in sp._actions:
        if action.dest == "out":
            action.required = True
            action.help = "output base path (writes _metrics.json and _raster.*)"

    sp = sub.add_parser("prbs", help="dump a PRBS bit stream")
    sp.add_argument("--order", type=int, default=7, choices=(7, 15, 31))
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--count", type=int, default=127)
    sp.add_argument("--pack", choices=("bits", "hex"), default="bits")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_prbs)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
