"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -v to see them)."""

import math
import time

import numpy as np
import pytest

from modeswim.analytic import (AnalyticPlate, cantilever_frequencies,
                               ss_frequency_table)
from modeswim.cli import fixture_text, main
from modeswim.config import parse
from modeswim.drive import (MotionQuadrature, find_swap_mirror, movement_map,
                            verify_reversal)
from modeswim.eigensolver import detect_degenerate_pairs, solve_modes
from modeswim.fem import apply_boundary, assemble
from modeswim.fluid import FluidModel, beam_added_mass_per_length, calibrate
from modeswim.laminate import Layer, section_properties
from modeswim.mesh import Rectangle, generate_mesh
from modeswim.model import PlateRunModel


def _report(name, ok, detail=""):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name} failed: {detail}"


@pytest.fixture(scope="module")
def beam_cfg():
    return parse(fixture_text("paper_beam"))


@pytest.fixture(scope="module")
def rect_model():
    return PlateRunModel(parse(fixture_text("rect_robot")))


@pytest.fixture(scope="module")
def circ_model():
    return PlateRunModel(parse(fixture_text("circ_robot")))


def test_criterion_1_beam_in_air(beam_cfg, tmp_path):
    start = time.perf_counter()
    section = section_properties(beam_cfg.layers)
    f_air = cantilever_frequencies(section, beam_cfg.geometry.a,
                                   beam_cfg.geometry.b, 2)
    model = PlateRunModel(beam_cfg)
    fem = model.dry_basis().elastic_frequencies()[:2]
    elapsed = time.perf_counter() - start

    ok_f1 = abs(f_air[0] - 22.7) <= 0.05 * 22.7
    ok_f2 = abs(f_air[1] - 142.4) <= 0.05 * 142.4
    ok_m1 = abs(23.0 - f_air[0]) <= 0.07 * f_air[0]
    ok_m2 = abs(141.0 - f_air[1]) <= 0.07 * f_air[1]
    ok_time = elapsed < 1.0
    detail = (f"(analytic {f_air[0]:.2f}/{f_air[1]:.2f} Hz, "
              f"fem {fem[0]:.2f}/{fem[1]:.2f} Hz, {elapsed * 1e3:.0f} ms)")
    _report("1 beam-in-air", ok_f1 and ok_f2 and ok_m1 and ok_m2 and ok_time,
            detail)
    exit_code = main(["beam-validate", "--config", "paper_beam",
                      "--out", str(tmp_path)])
    assert exit_code == 0


def test_criterion_2_fluid_calibration(beam_cfg):
    section = section_properties(beam_cfg.layers)
    width = beam_cfg.geometry.b
    f_air = cantilever_frequencies(section, beam_cfg.geometry.a, width, 2)
    base = beam_added_mass_per_length(width, FluidModel(1830.0, 1.0))
    beta0 = base / (section.mass_per_area * width)
    lam = calibrate(f_air[0], 4.2, beta0)
    factor = math.sqrt(1.0 + lam * beta0)
    wet = [f / factor for f in f_air]
    ok_f1 = abs(wet[0] - 4.2) <= 1e-9
    ok_f2 = abs(wet[1] - 26.6) <= 0.05 * 26.6
    ok_meas = (max(wet[0] / 3.0, 3.0 / wet[0]) <= 1.6
               and max(wet[1] / 27.0, 27.0 / wet[1]) <= 1.6)
    _report("2 fluid-calibration", ok_f1 and ok_f2 and ok_meas,
            f"(lambda {lam:.3f}, wet f2 {wet[1]:.2f} Hz)")


def test_criterion_3_fem_vs_analytic(unit_section):
    start = time.perf_counter()
    mesh = generate_mesh(Rectangle(1.0, 1.0), 1.0 / 32)
    mats = apply_boundary(assemble(mesh, unit_section), "simply_supported")
    basis = solve_modes(mats, 6)
    elapsed = time.perf_counter() - start
    ref = np.array([f for f, _ in ss_frequency_table(
        AnalyticPlate(1.0, 1.0, 1.0, 1.0), 6)])
    rel = np.abs(basis.frequencies - ref) / ref
    pair_gap = abs(basis.frequencies[2] - basis.frequencies[1]) / basis.frequencies[1]
    ok = rel.max() < 0.02 and pair_gap < 0.005 and elapsed < 30.0
    _report("3 fem-vs-analytic",
            ok, f"(max err {rel.max() * 100:.3f}%, pair gap {pair_gap:.2e}, "
                f"{elapsed:.1f} s)")


def test_criterion_4_rigid_body_contract(rect_model, circ_model):
    ok_all = True
    details = []
    for name, model in (("rect", rect_model), ("circ", circ_model)):
        basis = model.dry_basis()
        lam = (2 * np.pi * basis.frequencies) ** 2
        first_elastic = lam[3]
        below = int((lam < 1e-6 * first_elastic).sum())
        ok_all &= below == 3
        details.append(f"{name}:{below}")
    _report("4 rigid-body", ok_all, f"(eigenvalues below threshold: "
                                    f"{', '.join(details)})")


def test_criterion_5_degeneracy_structure(rect_model):
    basis = rect_model.wet_basis()
    wet10 = basis.frequencies[: basis.rigid_count() + 10]
    import dataclasses
    trimmed = dataclasses.replace(basis, frequencies=wet10,
                                  shapes=basis.shapes[:, : len(wet10)])
    pairs = detect_degenerate_pairs(trimmed, 0.02)
    fundamental = basis.elastic_frequencies()[0]
    ok = len(pairs) >= 2 and 0.5 <= fundamental <= 5.0
    _report("5 degeneracy-structure", ok,
            f"({len(pairs)} pairs across first 10 wet modes, "
            f"fundamental {fundamental:.3f} Hz)")


def test_criterion_6_standing_wave_null(rect_model):
    cfg = rect_model.config
    basis = rect_model.wet_basis()
    quad = MotionQuadrature(rect_model.mesh, rect_model.elements)
    mmap = movement_map(basis, tuple(cfg.patches), cfg.fluid, cfg.damping_ratio,
                        [2.0, 5.0], [-90.0, 0.0, 90.0, 180.0],
                        elements=rect_model.elements)
    worst = 0.0
    for k in range(3, min(8, len(basis))):
        shape = basis.shapes[:, k].astype(complex)
        thrust, moment = quad.thrust_and_moment(shape, cfg.fluid.density, 5.0)
        worst = max(worst, math.hypot(*thrust), abs(moment) / mmap.char_length)
    ok = worst <= 1e-9 * mmap.scale
    _report("6 standing-wave-null", ok,
            f"(worst residual {worst:.2e} vs map max {mmap.scale:.2e})")


def test_criterion_7_reversal_antisymmetry(rect_model):
    cfg = rect_model.config
    basis = rect_model.wet_basis()
    mirror = find_swap_mirror(rect_model.mesh, cfg.patches)
    assert mirror is not None
    mmap = movement_map(basis, tuple(cfg.patches), cfg.fluid, cfg.damping_ratio,
                        cfg.frequencies, cfg.phases, axis=cfg.forward_axis(),
                        elements=rect_model.elements)
    report = verify_reversal(mmap, mirror)
    has_rotation = any("rotate" in c.estimate.label for c in mmap.cells)
    ok = report.passed and has_rotation
    _report("7 reversal-antisymmetry", ok,
            f"(mirror {mirror}, max dev {report.max_relative_deviation:.2e}, "
            f"labels {'swap' if report.labels_consistent else 'broken'}, "
            f"rotation cells {'present' if has_rotation else 'absent'})")


def test_criterion_8_oracle_equivalence(beam_cfg, rect_model, circ_model,
                                        unit_section):
    fixtures = {
        "beam": PlateRunModel(beam_cfg).matrices,
        "rect": rect_model.matrices,
        "circ": circ_model.matrices,
    }
    mesh = generate_mesh(Rectangle(1.0, 1.0), 1.0 / 16)
    fixtures["ss_square"] = apply_boundary(assemble(mesh, unit_section),
                                           "simply_supported")
    worst = 0.0
    details = []
    for name, mats in fixtures.items():
        assert mats.n_active <= 3000
        sparse = solve_modes(mats, 10)
        dense = solve_modes(mats, 10, method="dense")
        assert sparse.rigid_count() == dense.rigid_count()
        el_s = sparse.elastic_frequencies()
        el_d = dense.elastic_frequencies()
        rel = np.abs(el_s - el_d) / el_d
        worst = max(worst, rel.max())
        details.append(f"{name}:{rel.max():.1e}")
    ok = worst <= 1e-8
    _report("8 oracle-equivalence", ok, f"({', '.join(details)})")


def test_criterion_9_determinism(tmp_path):
    out1 = tmp_path / "t1"
    out2 = tmp_path / "tn"
    assert main(["sweep", "--config", "rect_robot", "--out", str(out1),
                 "--threads", "1"]) == 0
    assert main(["sweep", "--config", "rect_robot", "--out", str(out2),
                 "--threads", "8"]) == 0
    b1 = (out1 / "sweep.csv").read_bytes()
    b2 = (out2 / "sweep.csv").read_bytes()
    ok = b1 == b2
    _report("9 determinism", ok, f"({len(b1)} bytes, thread counts 1 vs 8)")
