"""Two-patch phased actuation, steady-state response, and motion estimates.

Two rectangular actuator patches at right angles are driven sinusoidally
with a phase difference. The steady-state operating deflection shape comes
from modal superposition over the (usually wet) basis; a phase-gradient
surrogate then converts the complex shape into a net thrust vector and yaw
moment: traveling waves push the body opposite their propagation direction,
standing waves push nothing.

Sign convention: a positive phase difference means patch 2 lags patch 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (ConfigurationError, DomainError, ModeswimError,
                     SingularityError)
from .eigensolver import ModalBasis
from .fem import build_elements
from .fluid import FluidModel
from .mesh import Mesh

PHASE_GRADIENT_FLOOR = 1e-6   # rad/m below which a wave counts as standing
MOTION_EPS_RATIO = 1e-3       # of the map's largest thrust magnitude
AXIS_CONE_DEG = 15.0
MOMENT_DOMINANCE = 2.0


@dataclass(frozen=True)
class ActuatorPatch:
    """Rectangular actuation footprint with drive amplitude and phase [rad]."""

    footprint: tuple  # (x0, y0, x1, y1) in plate coordinates
    amplitude: float = 1.0
    phase: float = 0.0
    orientation: tuple = (1.0, 0.0)

    def __post_init__(self):
        x0, y0, x1, y1 = self.footprint
        if x0 >= x1 or y0 >= y1:
            raise DomainError(f"degenerate patch footprint {self.footprint}")
        if self.amplitude < 0:
            raise DomainError(f"patch amplitude must be >= 0, got {self.amplitude}")

    @property
    def area(self):
        x0, y0, x1, y1 = self.footprint
        return (x1 - x0) * (y1 - y0)


@dataclass(frozen=True)
class DriveCondition:
    """Drive frequency [Hz], patch phase difference [deg], modal damping."""

    frequency: float
    phase_difference: float = 0.0
    damping_ratio: float = 0.02
    waveform: str = "sine"

    def __post_init__(self):
        if self.frequency <= 0:
            raise DomainError(f"drive frequency must be > 0, got {self.frequency}")
        if not -180.0 < self.phase_difference <= 180.0:
            raise DomainError(
                f"phase difference must lie in (-180, 180], got {self.phase_difference}")
        if not 0.0 <= self.damping_ratio < 1.0:
            raise DomainError(
                f"damping ratio must lie in [0, 1), got {self.damping_ratio}")
        if self.waveform != "sine":
            raise DomainError(f"only sine drive is supported, got {self.waveform!r}")


@dataclass
class OperatingShape:
    """Complex steady-state deflection on the full DOF numbering."""

    dofs: np.ndarray
    mesh: Mesh
    drive: DriveCondition


@dataclass(frozen=True)
class MotionEstimate:
    thrust: tuple
    yaw_moment: float
    label: str

    @property
    def thrust_magnitude(self):
        return math.hypot(*self.thrust)


def patch_load_vector(mesh: Mesh, patch: ActuatorPatch, elements=None):
    """Consistent complex nodal loads of a uniform patch pressure.

    The total transverse load equals amplitude x footprint area x e^(i phase);
    on curvilinear (disk) elements the quadrature total is normalized to
    that exact value.
    """
    x0, y0, x1, y1 = patch.footprint
    if mesh.geometry is not None:
        for cx, cy in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
            if not mesh.geometry.contains(cx, cy):
                raise ConfigurationError(
                    f"patch corner ({cx:g}, {cy:g}) lies outside the planform")
    if elements is None:
        elements = build_elements(mesh)

    f = np.zeros(mesh.n_dofs)
    for elem, conn in zip(elements, mesh.elements):
        fe = elem.pressure_load(patch.footprint)
        if fe is None:
            continue
        dofs = np.repeat(conn * 3, 3) + np.tile(np.arange(3), 4)
        f[dofs] += fe

    covered = float(f[0::3].sum())
    if covered <= 0:
        raise ConfigurationError("patch footprint covers no mesh elements")
    f *= patch.area / covered
    return f * (patch.amplitude * complex(math.cos(patch.phase), math.sin(patch.phase)))


def harmonic_response(basis: ModalBasis, loads, drive: DriveCondition):
    """Modal superposition response at the drive frequency.

    q_k = F_k / (w_k^2 - w^2 + 2 i zeta w w_k) with all computed modes kept.
    """
    loads = np.asarray(loads, dtype=complex)
    if loads.shape != (basis.mesh.n_dofs,):
        raise DomainError(
            f"load vector has {loads.shape}, basis expects ({basis.mesh.n_dofs},)")
    w = 2.0 * math.pi * drive.frequency
    wk = 2.0 * np.pi * basis.frequencies
    if drive.damping_ratio == 0.0:
        gap = np.abs(wk**2 - w**2)
        scale = max(w**2, wk.max() ** 2 if len(wk) else 0.0)
        if np.any(gap < 1e-12 * scale):
            k = int(np.argmin(gap))
            raise SingularityError(
                f"undamped drive at {drive.frequency:g} Hz coincides with mode "
                f"{k} at {basis.frequencies[k]:g} Hz")
    fk = basis.shapes.T @ loads
    q = fk / (wk**2 - w**2 + 2j * drive.damping_ratio * w * wk)
    return OperatingShape(dofs=basis.shapes @ q, mesh=basis.mesh, drive=drive)


def project_onto_pair(shape: OperatingShape, basis: ModalBasis, pair):
    """Complex modal amplitudes on a degenerate pair and the energy fraction
    of the shape they explain (M-weighted, mass-normalized modes)."""
    i, j = pair
    ci = basis.mass_inner(basis.shapes[:, i], shape.dofs)
    cj = basis.mass_inner(basis.shapes[:, j], shape.dofs)
    norm2 = basis.mass_inner(shape.dofs, shape.dofs).real
    fraction = (abs(ci) ** 2 + abs(cj) ** 2) / norm2 if norm2 > 0 else 0.0
    return ci, cj, fraction


def fit_mixing_angle(shape: OperatingShape, basis: ModalBasis, pair):
    """Mixing angle gamma of the realized combination within a degenerate pair.

    gamma = atan2(|<shape, phi_nm>_M|, |<shape, phi_mn>_M|); invariant to
    global complex rescaling of the shape.
    """
    ci, cj, _ = project_onto_pair(shape, basis, pair)
    norm = math.sqrt(abs(basis.mass_inner(shape.dofs, shape.dofs).real))
    if max(abs(ci), abs(cj)) < 1e-12 * norm:
        raise DomainError(
            "mixing angle undefined: shape has no projection on the pair")
    return math.atan2(abs(cj), abs(ci))


class MotionQuadrature:
    """Reusable Gauss-point operators for phase-gradient thrust integrals."""

    def __init__(self, mesh: Mesh, elements=None):
        if elements is None:
            elements = build_elements(mesh)
        rows_w, rows_x, rows_y = [], [], []
        points, weights = [], []
        row_idx, col_idx = [], []
        g = 0
        for elem, conn in zip(elements, mesh.elements):
            n = elem.shape_matrix(elem.gauss_points)
            gx, gy = elem.gradient_matrices(elem.gauss_points)
            dofs = np.repeat(conn * 3, 3) + np.tile(np.arange(3), 4)
            npts = len(elem.gauss_points)
            rows_w.append(n)
            rows_x.append(gx)
            rows_y.append(gy)
            points.append(elem.gauss_points)
            weights.append(elem.gauss_weights)
            row_idx.append(np.repeat(np.arange(g, g + npts), 12))
            col_idx.append(np.tile(dofs, npts))
            g += npts

        rix = np.concatenate(row_idx)
        cix = np.concatenate(col_idx)
        shape = (g, mesh.n_dofs)
        self.n_w = sp.coo_matrix(
            (np.concatenate([r.ravel() for r in rows_w]), (rix, cix)), shape).tocsr()
        self.n_x = sp.coo_matrix(
            (np.concatenate([r.ravel() for r in rows_x]), (rix, cix)), shape).tocsr()
        self.n_y = sp.coo_matrix(
            (np.concatenate([r.ravel() for r in rows_y]), (rix, cix)), shape).tocsr()
        self.points = np.concatenate(points)
        self.weights = np.concatenate(weights)
        area = self.weights.sum()
        self.centroid = (self.weights @ self.points) / area

    def thrust_and_moment(self, dofs, rho, frequency):
        """Integrated thrust vector and yaw moment about the area centroid."""
        w = self.n_w @ dofs
        wx = self.n_x @ dofs
        wy = self.n_y @ dofs
        a2 = (w * w.conjugate()).real
        # Im(conj(w) grad w) = a2 * grad(phase); both sides of the unit
        # direction share the a2 factor, so the ratio never divides by a2.
        gx = (w.conjugate() * wx).imag
        gy = (w.conjugate() * wy).imag
        gnorm = np.hypot(gx, gy)
        moving = gnorm > PHASE_GRADIENT_FLOOR * a2
        if not moving.any():
            return np.zeros(2), 0.0
        omega2 = (2.0 * math.pi * frequency) ** 2
        mag = rho * omega2 * a2[moving] * self.weights[moving]
        ux = -gx[moving] / gnorm[moving]
        uy = -gy[moving] / gnorm[moving]
        tx = mag * ux
        ty = mag * uy
        r = self.points[moving] - self.centroid
        thrust = np.array([tx.sum(), ty.sum()])
        moment = float((r[:, 0] * ty - r[:, 1] * tx).sum())
        return thrust, moment


def _char_length(mesh):
    if mesh.geometry is not None:
        return mesh.geometry.min_span
    span = mesh.nodes.max(axis=0) - mesh.nodes.min(axis=0)
    return float(span.min())


def classify(thrust, moment, axis, char_length, scale):
    """Label a (thrust, moment) pair relative to the symmetry axis.

    scale is the largest thrust magnitude on the map the estimate belongs
    to; the static threshold is MOTION_EPS_RATIO times it.
    """
    eps = MOTION_EPS_RATIO * scale
    t = math.hypot(*thrust)
    mt = abs(moment) / char_length
    if t <= eps and mt <= eps:
        return "static"
    if mt > MOMENT_DOMINANCE * t:
        return "rotate_ccw" if moment > 0 else "rotate_cw"
    ax = np.asarray(axis, dtype=float)
    ax = ax / np.linalg.norm(ax)
    along = thrust[0] * ax[0] + thrust[1] * ax[1]
    lateral = ax[0] * thrust[1] - ax[1] * thrust[0]
    angle = math.degrees(math.atan2(abs(lateral), along))
    if angle <= AXIS_CONE_DEG:
        return "forward"
    if angle >= 180.0 - AXIS_CONE_DEG:
        return "backward"
    side = "left" if lateral > 0 else "right"
    return f"turning_{side}" if mt > eps else f"translate_{side}"


MIRRORED_LABELS = {
    "static": "static", "forward": "forward", "backward": "backward",
    "rotate_cw": "rotate_ccw", "rotate_ccw": "rotate_cw",
    "translate_left": "translate_right", "translate_right": "translate_left",
    "turning_left": "turning_right", "turning_right": "turning_left",
}


def estimate_motion(shape: OperatingShape, mesh: Mesh, fluid: FluidModel,
                    frequency, axis=(1.0, 0.0), scale=None, quad=None):
    """Net thrust, yaw moment, and movement label for one operating shape.

    Without a surrounding map, the estimate is normalized against its own
    thrust magnitude.
    """
    if quad is None:
        quad = MotionQuadrature(mesh)
    thrust, moment = quad.thrust_and_moment(
        np.asarray(shape.dofs, dtype=complex), fluid.density, frequency)
    if scale is None:
        scale = math.hypot(*thrust)
    label = classify(thrust, moment, axis, _char_length(mesh), scale)
    return MotionEstimate(thrust=(float(thrust[0]), float(thrust[1])),
                          yaw_moment=moment, label=label)


@dataclass(frozen=True)
class MovementCell:
    frequency: float
    phase_deg: float
    estimate: MotionEstimate


@dataclass
class MovementMap:
    cells: list
    frequencies: list
    phases_deg: list
    axis: tuple
    char_length: float
    scale: float

    def cell(self, frequency, phase_deg):
        for c in self.cells:
            if c.frequency == frequency and c.phase_deg == phase_deg:
                return c
        raise KeyError((frequency, phase_deg))


def movement_map(basis: ModalBasis, patches, fluid: FluidModel, damping_ratio,
                 frequencies, phase_differences, axis=(1.0, 0.0),
                 elements=None, threads=1):
    """Motion estimates over a (frequency, phase difference) grid.

    Cells are evaluated independently (optionally across threads) and
    merged frequency-major; labels use one map-wide static threshold.
    """
    if len(patches) != 2:
        raise ConfigurationError(f"cross-mode drive needs 2 patches, got {len(patches)}")
    frequencies = list(frequencies)
    phase_differences = list(phase_differences)
    if not frequencies or not phase_differences:
        raise ConfigurationError("sweep axes must be non-empty")

    mesh = basis.mesh
    if elements is None:
        elements = build_elements(mesh)
    quad = MotionQuadrature(mesh, elements)
    f1 = patch_load_vector(mesh, patches[0], elements)
    f2 = patch_load_vector(mesh, patches[1], elements)

    grid = [(f, dphi) for f in frequencies for dphi in phase_differences]

    def run_cell(args):
        f, dphi = args
        try:
            drive = DriveCondition(frequency=f, phase_difference=dphi,
                                   damping_ratio=damping_ratio)
            if dphi == 0.0:
                lag = complex(1.0, 0.0)
            elif abs(dphi) == 180.0:
                # exactly inverted drive; sin(pi) would leave 1e-16 of phase
                lag = complex(-1.0, 0.0)
            else:
                lag = complex(math.cos(math.radians(dphi)),
                              -math.sin(math.radians(dphi)))
            shape = harmonic_response(basis, f1 + f2 * lag, drive)
            return quad.thrust_and_moment(shape.dofs, fluid.density, f)
        except ModeswimError as exc:
            raise type(exc)(
                f"at sweep cell (f={f:g} Hz, dphi={dphi:g} deg): {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(run_cell, grid))
    else:
        raw = [run_cell(g) for g in grid]

    scale = max(math.hypot(*t) for t, _ in raw)
    char_length = _char_length(mesh)
    cells = []
    for (f, dphi), (thrust, moment) in zip(grid, raw):
        label = classify(thrust, moment, axis, char_length, scale)
        est = MotionEstimate(thrust=(float(thrust[0]), float(thrust[1])),
                             yaw_moment=moment, label=label)
        cells.append(MovementCell(frequency=f, phase_deg=dphi, estimate=est))
    return MovementMap(cells=cells, frequencies=frequencies,
                       phases_deg=phase_differences, axis=tuple(axis),
                       char_length=char_length, scale=scale)


# --- mirror symmetry of a two-patch configuration ----------------------------

def _mirror_point(kind, center, x, y):
    cx, cy = center
    if kind == "x":
        return x, 2.0 * cy - y
    if kind == "y":
        return 2.0 * cx - x, y
    return cx + (y - cy), cy + (x - cx)  # transpose


def _mirror_footprint(kind, center, footprint):
    x0, y0, x1, y1 = footprint
    xa, ya = _mirror_point(kind, center, x0, y0)
    xb, yb = _mirror_point(kind, center, x1, y1)
    return (min(xa, xb), min(ya, yb), max(xa, xb), max(ya, yb))


def mirror_thrust(kind, thrust):
    tx, ty = thrust
    if kind == "x":
        return (tx, -ty)
    if kind == "y":
        return (-tx, ty)
    return (ty, tx)


def find_swap_mirror(mesh: Mesh, patches):
    """Mirror kind under which the planform is symmetric and the two
    patches swap; None when the configuration has no such symmetry."""
    from .mesh import mirror_map

    lo = mesh.nodes.min(axis=0)
    hi = mesh.nodes.max(axis=0)
    center = ((lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0)
    tol = 1e-9 * max(hi - lo)
    fp1, fp2 = patches[0].footprint, patches[1].footprint
    for kind in ("x", "y", "transpose"):
        try:
            mirror_map(mesh, kind)
        except Exception:
            continue
        image = _mirror_footprint(kind, center, fp1)
        if all(abs(a - b) <= tol for a, b in zip(image, fp2)):
            return kind
    return None


@dataclass
class ReversalReport:
    mirror: str
    max_relative_deviation: float
    labels_consistent: bool
    zero_phase_ok: bool

    @property
    def passed(self):
        return (self.max_relative_deviation <= 1e-6 and self.labels_consistent
                and self.zero_phase_ok)


def verify_reversal(mmap: MovementMap, mirror_kind, tolerance=1e-6):
    """Check the reversal antisymmetry of a sweep on a symmetric fixture.

    For every phase pair (+d, -d): the -d estimate must equal the mirror of
    the +d estimate (thrust mirrored, moment negated, labels chirality
    swapped). At zero phase difference the lateral thrust and the moment
    must vanish below the map's static threshold.
    """
    scale = max(mmap.scale, 1e-300)
    mscale = scale * mmap.char_length
    worst = 0.0
    labels_ok = True
    zero_ok = True
    ax = np.asarray(mmap.axis, dtype=float)
    ax = ax / np.linalg.norm(ax)
    for f in mmap.frequencies:
        for dphi in mmap.phases_deg:
            if dphi <= 0 or -dphi not in mmap.phases_deg:
                continue
            plus = mmap.cell(f, dphi).estimate
            minus = mmap.cell(f, -dphi).estimate
            mt = mirror_thrust(mirror_kind, plus.thrust)
            dev = math.hypot(mt[0] - minus.thrust[0], mt[1] - minus.thrust[1]) / scale
            dev = max(dev, abs(plus.yaw_moment + minus.yaw_moment) / mscale)
            worst = max(worst, dev)
            if MIRRORED_LABELS[plus.label] != minus.label:
                labels_ok = False
        if 0 in mmap.phases_deg or 0.0 in mmap.phases_deg:
            est = mmap.cell(f, 0.0 if 0.0 in mmap.phases_deg else 0).estimate
            lateral = abs(ax[0] * est.thrust[1] - ax[1] * est.thrust[0])
            eps = MOTION_EPS_RATIO * scale
            if lateral > eps or abs(est.yaw_moment) / mmap.char_length > eps:
                zero_ok = False
    return ReversalReport(mirror=mirror_kind, max_relative_deviation=worst,
                          labels_consistent=labels_ok, zero_phase_ok=zero_ok)
