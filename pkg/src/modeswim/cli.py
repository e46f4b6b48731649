"""Batch command-line front end.

    modeswim beam-validate --config paper_beam --out OUT [--tolerance PCT]
    modeswim modes         --config CFG --out OUT
    modeswim sweep         --config CFG --out OUT [--verify-reversal] [--threads N]
    modeswim atlas         --m 1 --n 2 --a 1 --b 1 --gammas 0,45,90 --out OUT

--config accepts a path or the name of a bundled fixture (paper_beam,
rect_robot, circ_robot). Exit codes: 0 pass, 1 validation fail,
2 configuration error, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (AnalyticPlate, ModeIndex, cantilever_frequencies,
                       ss_mode_shape, superpose_degenerate)
from .config import config_digest, parse
from .drive import find_swap_mirror, movement_map, verify_reversal
from .eigensolver import detect_degenerate_pairs
from .errors import ConfigurationError, ModeswimError, SolverError
from .fluid import beam_added_mass_per_length, calibrate
from .gridio import FieldSampler, format_float, write_grid
from .model import PlateRunModel

FIXTURE_NAMES = ("paper_beam", "rect_robot", "circ_robot")


def fixture_text(name):
    if name not in FIXTURE_NAMES:
        raise ConfigurationError(f"unknown fixture '{name}'; "
                                 f"bundled: {', '.join(FIXTURE_NAMES)}")
    return resources.files("modeswim.fixtures").joinpath(f"{name}.cfg").read_text(
        encoding="utf-8")


def load_config_arg(arg):
    """Path or bundled fixture name -> (text, source label)."""
    path = Path(arg)
    if path.exists():
        return path.read_text(encoding="utf-8"), str(path)
    if arg in FIXTURE_NAMES:
        return fixture_text(arg), f"fixture:{arg}"
    raise ConfigurationError(f"config '{arg}' is neither a file nor a bundled fixture")


def write_manifest(outdir: Path, command, digest, outputs, extras=None):
    manifest_path = outdir / "manifest.json"
    if manifest_path.exists():
        previous = json.loads(manifest_path.read_text(encoding="utf-8"))
        if previous.get("config_digest") != digest:
            raise ConfigurationError(
                f"output directory {outdir} holds results for a different "
                f"config (digest mismatch); use a fresh directory")
    data = {
        "tool": "modeswim",
        "version": __version__,
        "command": command,
        "config_digest": digest,
        "outputs": sorted(outputs),
    }
    if extras:
        data.update(extras)
    manifest_path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")


def _check(lines, name, value, target, tol_pct):
    ok = abs(value - target) <= tol_pct / 100.0 * abs(target)
    lines.append(f"{name}: {format_float(value)} Hz vs {format_float(target)} Hz "
                 f"(tolerance {format_float(tol_pct)}%) -> {'PASS' if ok else 'FAIL'}")
    return ok


def cmd_beam_validate(args):
    text, source = load_config_arg(args.config)
    cfg = parse(text)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    model = PlateRunModel(cfg)
    model.require_cantilever()
    section = model.body_section
    length, width = cfg.geometry.a, cfg.geometry.b
    analytic = cantilever_frequencies(section, length, width, 2)
    fem_basis = model.dry_basis()
    fem = list(fem_basis.elastic_frequencies()[:2])

    v = dict(cfg.validate)
    tol = args.tolerance if args.tolerance is not None else v.get("tolerance_pct", 5.0)
    lines = [f"beam-validate: {source}",
             f"air f1: analytic {format_float(analytic[0])} Hz, "
             f"fem {format_float(fem[0])} Hz",
             f"air f2: analytic {format_float(analytic[1])} Hz, "
             f"fem {format_float(fem[1])} Hz"]
    ok = True
    if "air_f1_hz" in v:
        ok &= _check(lines, "air f1 vs target", analytic[0], v["air_f1_hz"], tol)
    if "air_f2_hz" in v:
        ok &= _check(lines, "air f2 vs target", analytic[1], v["air_f2_hz"], tol)
    mtol = v.get("measured_air_tolerance_pct")
    if mtol is not None and "measured_air_f1_hz" in v:
        for i, key in enumerate(("measured_air_f1_hz", "measured_air_f2_hz")):
            meas = v[key]
            good = abs(meas - analytic[i]) <= mtol / 100.0 * analytic[i]
            lines.append(
                f"measured air f{i + 1} {format_float(meas)} Hz within "
                f"{format_float(mtol)}% of model -> {'PASS' if good else 'FAIL'}")
            ok &= good

    extras = {}
    if cfg.fluid.density == 0:
        lines.append("fluid density 0: wet frequencies equal air frequencies")
        extras["calibration_factor"] = 0.0
    elif "wet_f1_target_hz" in v:
        base = beam_added_mass_per_length(width, type(cfg.fluid)(cfg.fluid.density, 1.0))
        beta0 = base / (section.mass_per_area * width)
        lam = calibrate(analytic[0], v["wet_f1_target_hz"], beta0)
        factor = math.sqrt(1.0 + lam * beta0)
        wet2 = analytic[1] / factor
        lines.append(f"calibrated lambda: {format_float(lam)} "
                     f"(baseline mass ratio {format_float(beta0)})")
        lines.append(f"wet f1: {format_float(analytic[0] / factor)} Hz (calibrated)")
        extras["calibration_factor"] = lam
        if "wet_f2_hz" in v:
            ok &= _check(lines, "wet f2 prediction", wet2, v["wet_f2_hz"], tol)
        wfac = v.get("measured_wet_factor")
        if wfac is not None and "measured_wet_f2_hz" in v:
            pred = {"measured_wet_f1_hz": analytic[0] / factor,
                    "measured_wet_f2_hz": wet2}
            for key, p in pred.items():
                if key not in v:
                    continue
                meas = v[key]
                ratio = max(p / meas, meas / p)
                good = ratio <= wfac
                lines.append(f"{key.replace('_', ' ')} {format_float(meas)} Hz vs "
                             f"{format_float(p)} Hz: factor {format_float(ratio)} "
                             f"<= {format_float(wfac)} -> {'PASS' if good else 'FAIL'}")
                ok &= good

    lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    report = "\n".join(lines) + "\n"
    (outdir / "beam_validate.txt").write_text(report, encoding="utf-8")
    sys.stdout.write(report)
    write_manifest(outdir, "beam-validate", config_digest(text),
                   ["beam_validate.txt"], extras)
    return 0 if ok else 1


def _grid_shape(cfg):
    x0, y0, x1, y1 = cfg.geometry.bounding_box()
    nx = max(2, round((x1 - x0) / cfg.element_size)) + 1
    ny = max(2, round((y1 - y0) / cfg.element_size)) + 1
    return nx, ny


def cmd_modes(args):
    text, _ = load_config_arg(args.config)
    cfg = parse(text)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    model = PlateRunModel(cfg)
    basis = model.active_basis()
    pairs = detect_degenerate_pairs(basis, cfg.degenerate_tol)
    pair_of = {}
    for pid, (i, j) in enumerate(pairs, start=1):
        pair_of[i] = pid
        pair_of[j] = pid

    outputs = ["modes.csv"]
    with open(outdir / "modes.csv", "w", encoding="utf-8") as fh:
        fh.write("order,frequency_hz,medium,degenerate_pair\n")
        for k, f in enumerate(basis.frequencies, start=1):
            pid = pair_of.get(k - 1, "")
            fh.write(f"{k},{format_float(f)},{basis.medium},{pid}\n")

    sampler = FieldSampler(model.mesh, model.elements)
    nx, ny = _grid_shape(cfg)
    for k in range(len(basis)):
        values, dx, dy, _ = sampler.regular_grid(basis.shapes[:, k], nx, ny)
        name = f"mode_{k + 1:03d}.csv"
        write_grid(outdir / name, values, dx, dy)
        outputs.append(name)

    model.mesh.write_csv(outdir / "mesh_nodes.csv", outdir / "mesh_elements.csv")
    outputs += ["mesh_nodes.csv", "mesh_elements.csv"]
    write_manifest(outdir, "modes", config_digest(text), outputs,
                   {"medium": basis.medium, "mode_count": len(basis),
                    "degenerate_pairs": len(pairs)})
    sys.stdout.write(f"wrote {len(basis)} modes ({basis.medium}), "
                     f"{len(pairs)} degenerate pairs\n")
    return 0


def cmd_sweep(args):
    text, _ = load_config_arg(args.config)
    cfg = parse(text)
    if not cfg.frequencies or not cfg.phases:
        raise ConfigurationError("sweep needs a [drive] section with both axes")
    if len(cfg.patches) != 2:
        raise ConfigurationError("sweep needs exactly two [patch] sections")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    model = PlateRunModel(cfg)
    basis = model.active_basis()
    axis = cfg.forward_axis()
    mmap = movement_map(basis, tuple(cfg.patches), cfg.fluid, cfg.damping_ratio,
                        cfg.frequencies, cfg.phases, axis=axis,
                        elements=model.elements, threads=args.threads)

    with open(outdir / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write("frequency_hz,phase_deg,thrust_x,thrust_y,moment,label\n")
        for cell in mmap.cells:
            e = cell.estimate
            fh.write(f"{format_float(cell.frequency)},{format_float(cell.phase_deg)},"
                     f"{format_float(e.thrust[0])},{format_float(e.thrust[1])},"
                     f"{format_float(e.yaw_moment)},{e.label}\n")

    extras = {"cells": len(mmap.cells), "medium": basis.medium}
    status = 0
    if args.verify_reversal:
        mirror = find_swap_mirror(model.mesh, cfg.patches)
        if mirror is None:
            raise ConfigurationError(
                "reversal check needs a mirror-symmetric two-patch fixture")
        report = verify_reversal(mmap, mirror)
        extras["reversal_mirror"] = mirror
        extras["reversal_max_deviation"] = report.max_relative_deviation
        verdict = "PASS" if report.passed else "FAIL"
        sys.stdout.write(
            f"reversal check ({mirror} mirror): max deviation "
            f"{format_float(report.max_relative_deviation)}, labels "
            f"{'consistent' if report.labels_consistent else 'INCONSISTENT'}, "
            f"zero-phase {'clean' if report.zero_phase_ok else 'DIRTY'} "
            f"-> {verdict}\n")
        if not report.passed:
            status = 1

    write_manifest(outdir, "sweep", config_digest(text), ["sweep.csv"], extras)
    sys.stdout.write(f"wrote {len(mmap.cells)} sweep cells\n")
    return status


def cmd_atlas(args):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    idx = ModeIndex(args.m, args.n)
    plate = AnalyticPlate(a=args.a, b=args.b, D=1.0, mu=1.0)
    gammas = [float(g) for g in args.gammas.split(",")]
    ns = args.samples
    xs = np.linspace(0.0, plate.a, ns)
    ys = np.linspace(0.0, plate.b, ns)
    xx, yy = np.meshgrid(xs, ys, indexing="xy")
    w_mn = ss_mode_shape(idx, plate, xx, yy)
    w_nm = ss_mode_shape(idx.swapped(), plate, xx, yy)
    dx = plate.a / (ns - 1)
    dy = plate.b / (ns - 1)

    outputs = []
    index_rows = []
    for k, gamma in enumerate(gammas):
        field = superpose_degenerate(w_mn, w_nm, math.radians(gamma))
        name = f"atlas_m{args.m}_n{args.n}_{k:03d}.csv"
        write_grid(outdir / name, field, dx, dy)
        outputs.append(name)
        index_rows.append((name, gamma))
    with open(outdir / "atlas_index.csv", "w", encoding="utf-8") as fh:
        fh.write("file,gamma_deg\n")
        for name, gamma in index_rows:
            fh.write(f"{name},{format_float(gamma)}\n")
    outputs.append("atlas_index.csv")

    digest = config_digest(
        f"atlas m={args.m} n={args.n} a={args.a!r} b={args.b!r} "
        f"gammas={args.gammas} samples={ns}")
    write_manifest(outdir, "atlas", digest, outputs)
    sys.stdout.write(f"wrote {len(gammas)} atlas grids\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="modeswim",
        description="Modal analysis and propulsion prediction for flexible "
                    "planar underwater robots")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True,
                       help="config file path or bundled fixture name")
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("beam-validate", help="reproduce the beam frequency table")
    add_common(p)
    p.add_argument("--tolerance", type=float, default=None,
                   help="override the configured tolerance [%%]")
    p.set_defaults(func=cmd_beam_validate)

    p = sub.add_parser("modes", help="mode table and shape grids")
    add_common(p)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("sweep", help="movement map over drive frequency and phase")
    add_common(p)
    p.add_argument("--verify-reversal", action="store_true",
                   help="check the phase-reversal mirror property")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("atlas", help="degenerate-mode superposition grids")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--gammas", required=True, help="comma-separated angles [deg]")
    p.add_argument("--samples", type=int, default=41)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_atlas)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return 3
    except (ConfigurationError, ModeswimError) as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
