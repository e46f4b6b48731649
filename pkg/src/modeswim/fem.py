"""Thin-plate bending finite elements and global assembly.

The element is the classic 12-DOF non-conforming quadrilateral with cubic
deflection interpolation (generalized coordinates 1, x, y, x^2, xy, y^2,
x^3, x^2 y, x y^2, y^3, x^3 y, x y^3) and consistent mass. It is formulated
in element-local scaled coordinates, so axis-aligned rectangles reproduce
the standard rectangular element exactly and the mildly distorted quads of
the disk mesh are integrated through their bilinear geometric map.

Rigid motions (w constant or linear) are exactly in the interpolation
space, so they carry zero strain energy on any non-degenerate element.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from .errors import AssemblyError, ConfigurationError
from .laminate import LaminateSection
from .mesh import Mesh, Rectangle

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(4)
_COND_LIMIT = 1e10


def _poly_rows(xi, eta):
    """Basis values and derivatives at (xi, eta); xi/eta may be arrays.

    Returns dict with keys p, px, py, pxx, pyy, pxy, each (..., 12).
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    one = np.ones_like(xi)
    zero = np.zeros_like(xi)
    p = np.stack(
        [one, xi, eta, xi**2, xi * eta, eta**2, xi**3, xi**2 * eta,
         xi * eta**2, eta**3, xi**3 * eta, xi * eta**3], axis=-1)
    px = np.stack(
        [zero, one, zero, 2 * xi, eta, zero, 3 * xi**2, 2 * xi * eta,
         eta**2, zero, 3 * xi**2 * eta, eta**3], axis=-1)
    py = np.stack(
        [zero, zero, one, zero, xi, 2 * eta, zero, xi**2, 2 * xi * eta,
         3 * eta**2, xi**3, 3 * xi * eta**2], axis=-1)
    pxx = np.stack(
        [zero, zero, zero, 2 * one, zero, zero, 6 * xi, 2 * eta, zero,
         zero, 6 * xi * eta, zero], axis=-1)
    pyy = np.stack(
        [zero, zero, zero, zero, zero, 2 * one, zero, zero, 2 * xi,
         6 * eta, zero, 6 * xi * eta], axis=-1)
    pxy = np.stack(
        [zero, zero, zero, zero, one, zero, zero, 2 * xi, 2 * eta, zero,
         3 * xi**2, 3 * eta**2], axis=-1)
    return {"p": p, "px": px, "py": py, "pxx": pxx, "pyy": pyy, "pxy": pxy}


class PlateElement:
    """Geometry-dependent element data for one quadrilateral.

    Section-independent: stiffness and mass take the constitutive data as
    arguments, so one element table serves every section assignment.
    """

    def __init__(self, coords, index=0):
        coords = np.asarray(coords, dtype=float)
        self.coords = coords
        self.index = index
        self.center = coords.mean(axis=0)
        half = (coords.max(axis=0) - coords.min(axis=0)) / 2.0
        if half.min() <= 0:
            raise AssemblyError(f"element {index} has zero extent")
        self.scale = half

        xi_nodes = (coords[:, 0] - self.center[0]) / self.scale[0]
        eta_nodes = (coords[:, 1] - self.center[1]) / self.scale[1]
        rows = _poly_rows(xi_nodes, eta_nodes)
        a = np.empty((12, 12))
        a[0::3] = rows["p"]
        a[1::3] = rows["px"] / self.scale[0]
        a[2::3] = rows["py"] / self.scale[1]
        if np.linalg.cond(a) > _COND_LIMIT:
            raise AssemblyError(f"element {index} is too distorted (singular DOF map)")
        self.a_inv = np.linalg.inv(a)

        # Tensor-product Gauss rule mapped through the bilinear geometry.
        ref_xi, ref_eta = np.meshgrid(_GAUSS_X, _GAUSS_X, indexing="ij")
        wx, wy = np.meshgrid(_GAUSS_W, _GAUSS_W, indexing="ij")
        ref_xi = ref_xi.ravel()
        ref_eta = ref_eta.ravel()
        weights = (wx * wy).ravel()

        shp = 0.25 * np.column_stack([
            (1 - ref_xi) * (1 - ref_eta),
            (1 + ref_xi) * (1 - ref_eta),
            (1 + ref_xi) * (1 + ref_eta),
            (1 - ref_xi) * (1 + ref_eta),
        ])
        d_xi = 0.25 * np.column_stack([
            -(1 - ref_eta), (1 - ref_eta), (1 + ref_eta), -(1 + ref_eta)])
        d_eta = 0.25 * np.column_stack([
            -(1 - ref_xi), -(1 + ref_xi), (1 + ref_xi), (1 - ref_xi)])

        pts = shp @ coords
        j11 = d_xi @ coords[:, 0]
        j12 = d_xi @ coords[:, 1]
        j21 = d_eta @ coords[:, 0]
        j22 = d_eta @ coords[:, 1]
        det = j11 * j22 - j12 * j21
        if det.min() <= 0:
            raise AssemblyError(f"element {index} has a non-positive Jacobian")

        self.gauss_points = pts
        self.gauss_weights = weights * det
        self.area = float(self.gauss_weights.sum())

        local = (pts - self.center) / self.scale
        g = _poly_rows(local[:, 0], local[:, 1])
        sx, sy = self.scale
        self._p = g["p"]
        self._px = g["px"] / sx
        self._py = g["py"] / sy
        self._curv = np.stack(
            [g["pxx"] / sx**2, g["pyy"] / sy**2, 2.0 * g["pxy"] / (sx * sy)], axis=1)

    def stiffness(self, bending_matrix):
        """12x12 element stiffness for a 3x3 plate bending matrix."""
        kc = np.einsum("gik,ij,gjl,g->kl", self._curv, bending_matrix,
                       self._curv, self.gauss_weights)
        return self.a_inv.T @ kc @ self.a_inv

    def mass(self, mass_per_area):
        """12x12 consistent mass for a uniform mass per area."""
        mc = np.einsum("gi,gj,g->ij", self._p, self._p, self.gauss_weights)
        return mass_per_area * (self.a_inv.T @ mc @ self.a_inv)

    # --- interpolation ------------------------------------------------------

    def _local(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - self.center) / self.scale

    def shape_matrix(self, points):
        """(n_points, 12) matrix mapping element DOFs to deflections."""
        loc = self._local(points)
        return _poly_rows(loc[:, 0], loc[:, 1])["p"] @ self.a_inv

    def gradient_matrices(self, points):
        """Pair of (n_points, 12) matrices for (dw/dx, dw/dy)."""
        loc = self._local(points)
        rows = _poly_rows(loc[:, 0], loc[:, 1])
        return (rows["px"] / self.scale[0] @ self.a_inv,
                rows["py"] / self.scale[1] @ self.a_inv)

    def is_axis_aligned_rectangle(self, tol=1e-9):
        x = self.coords[:, 0]
        y = self.coords[:, 1]
        ref = max(self.scale)
        return (abs(x[0] - x[3]) < tol * ref and abs(x[1] - x[2]) < tol * ref
                and abs(y[0] - y[1]) < tol * ref and abs(y[2] - y[3]) < tol * ref)

    def pressure_load(self, footprint):
        """Consistent nodal loads of a unit pressure over footprint ∩ element.

        footprint: (x0, y0, x1, y1). Exact for axis-aligned rectangular
        elements; quadrature with indicator sampling otherwise.
        """
        x0, y0, x1, y1 = footprint
        if self.is_axis_aligned_rectangle():
            xl = max(self.coords[:, 0].min(), x0)
            xh = min(self.coords[:, 0].max(), x1)
            yl = max(self.coords[:, 1].min(), y0)
            yh = min(self.coords[:, 1].max(), y1)
            if xl >= xh or yl >= yh:
                return None
            # 2x2 Gauss on the intersection rectangle is exact (cubic basis).
            gx = np.array([-1.0, 1.0]) / np.sqrt(3.0)
            xs = 0.5 * (xl + xh) + 0.5 * (xh - xl) * gx
            ys = 0.5 * (yl + yh) + 0.5 * (yh - yl) * gx
            pts = np.array([(x, y) for y in ys for x in xs])
            n = self.shape_matrix(pts)
            w = 0.25 * (xh - xl) * (yh - yl)
            return w * n.sum(axis=0)
        inside = ((self.gauss_points[:, 0] >= x0) & (self.gauss_points[:, 0] <= x1)
                  & (self.gauss_points[:, 1] >= y0) & (self.gauss_points[:, 1] <= y1))
        if not inside.any():
            return None
        n = self.shape_matrix(self.gauss_points[inside])
        return self.gauss_weights[inside] @ n


def build_elements(mesh: Mesh):
    """Element table for a mesh; reuses geometry for congruent elements."""
    elements = []
    cache = {}
    scale = max(mesh.nodes.max(axis=0) - mesh.nodes.min(axis=0))
    for e, conn in enumerate(mesh.elements):
        coords = mesh.nodes[conn]
        offsets = coords - coords.mean(axis=0)
        key = tuple(np.round(offsets.ravel() / scale, 12))
        proto = cache.get(key)
        if proto is None:
            elem = PlateElement(coords, index=e)
            cache[key] = elem
            elements.append(elem)
        else:
            elem = _translated_element(proto, coords, e)
            elements.append(elem)
    return elements


def _translated_element(proto, coords, index):
    """Clone of a congruent element shifted to new coordinates."""
    elem = PlateElement.__new__(PlateElement)
    elem.coords = coords
    elem.index = index
    elem.center = coords.mean(axis=0)
    elem.scale = proto.scale
    elem.a_inv = proto.a_inv
    shift = elem.center - proto.center
    elem.gauss_points = proto.gauss_points + shift
    elem.gauss_weights = proto.gauss_weights
    elem.area = proto.area
    elem._p = proto._p
    elem._px = proto._px
    elem._py = proto._py
    elem._curv = proto._curv
    return elem


@dataclass(frozen=True)
class SectionRegion:
    """Axis-aligned footprint (x0, y0, x1, y1) carrying its own section."""

    footprint: tuple
    section: LaminateSection

    def contains(self, x, y):
        x0, y0, x1, y1 = self.footprint
        # Tolerant bounds keep element selection stable when a footprint
        # edge lands exactly on an element center (mirror-image centers
        # round differently).
        tol = 1e-9 * max(x1 - x0, y1 - y0)
        return x0 - tol <= x <= x1 + tol and y0 - tol <= y <= y1 + tol


@dataclass
class SystemMatrices:
    """Assembled global stiffness and mass with boundary bookkeeping.

    active_dofs indexes the retained DOFs in the full 3-per-node numbering;
    K and M are the reduced (active x active) matrices.
    """

    K: sp.csr_matrix
    M: sp.csr_matrix
    mesh: Mesh
    bc: str = "free"
    active_dofs: np.ndarray = None

    def __post_init__(self):
        if self.active_dofs is None:
            self.active_dofs = np.arange(self.mesh.n_dofs)

    @property
    def n_active(self):
        return len(self.active_dofs)

    def expand(self, reduced):
        """Scatter reduced-space vectors back to the full DOF numbering."""
        reduced = np.asarray(reduced)
        full = np.zeros((self.mesh.n_dofs,) + reduced.shape[1:], dtype=reduced.dtype)
        full[self.active_dofs] = reduced
        return full

    def restrict(self, full):
        return np.asarray(full)[self.active_dofs]


def assemble(mesh: Mesh, section: LaminateSection, regions=None, elements=None):
    """Assemble global stiffness and mass matrices.

    regions: optional list of SectionRegion; an element whose center falls
    inside a region uses that region's section (last match wins). This is
    how actuator footprints carry the full stack on an otherwise uniform
    body plate.
    """
    if elements is None:
        elements = build_elements(mesh)

    matrix_cache = {}
    rows, cols, kvals, mvals = [], [], [], []
    for elem, conn in zip(elements, mesh.elements):
        active_section = section
        if regions:
            cx, cy = elem.center
            for region in regions:
                if region.contains(cx, cy):
                    active_section = region.section
        # Congruent elements share their a_inv array (see build_elements),
        # so its identity keys the per-section element matrices.
        key = (id(active_section), id(elem.a_inv))
        cached = matrix_cache.get(key)
        if cached is None:
            ke = elem.stiffness(active_section.plate_bending_matrix())
            me = elem.mass(active_section.mass_per_area)
            matrix_cache[key] = (ke, me)
        else:
            ke, me = cached
        dofs = np.repeat(conn * 3, 3) + np.tile(np.arange(3), 4)
        rr, cc = np.meshgrid(dofs, dofs, indexing="ij")
        rows.append(rr.ravel())
        cols.append(cc.ravel())
        kvals.append(ke.ravel())
        mvals.append(me.ravel())

    n = mesh.n_dofs
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    k = sp.coo_matrix((np.concatenate(kvals), (rows, cols)), shape=(n, n)).tocsr()
    m = sp.coo_matrix((np.concatenate(mvals), (rows, cols)), shape=(n, n)).tocsr()
    k = (k + k.T) * 0.5
    m = (m + m.T) * 0.5
    return SystemMatrices(K=k, M=m, mesh=mesh)


_EDGES = ("left", "right", "bottom", "top")


def apply_boundary(matrices: SystemMatrices, bc, edge=None):
    """Constrain DOFs by row/column removal.

    bc: 'free' (identity), 'simply_supported' (boundary w removed, slopes
    retained), or 'clamped_edge' with edge in {left,right,bottom,top}
    (rectangles only; w and both slopes removed along that edge).
    """
    mesh = matrices.mesh
    if bc == "free":
        return replace(matrices, bc="free")

    if bc == "simply_supported":
        fixed = set(3 * int(i) for i in mesh.boundary_node_ids())
    elif bc == "clamped_edge":
        if not isinstance(mesh.geometry, Rectangle):
            raise ConfigurationError("clamped_edge requires a rectangular planform")
        if edge not in _EDGES:
            raise ConfigurationError(f"edge must be one of {_EDGES}, got {edge!r}")
        a, b = mesh.geometry.a, mesh.geometry.b
        x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
        tol = 1e-9 * max(a, b)
        on_edge = {
            "left": abs(x) < tol,
            "right": abs(x - a) < tol,
            "bottom": abs(y) < tol,
            "top": abs(y - b) < tol,
        }[edge]
        fixed = set()
        for node in np.flatnonzero(on_edge):
            fixed.update((3 * node, 3 * node + 1, 3 * node + 2))
    else:
        raise ConfigurationError(f"unknown boundary condition {bc!r}")

    keep = np.array([d for d in matrices.active_dofs if d not in fixed], dtype=int)
    if len(keep) == matrices.n_active:
        raise ConfigurationError(f"boundary '{bc}' constrained no DOFs")
    # active_dofs currently spans the full numbering after assemble().
    local = np.flatnonzero(~np.isin(matrices.active_dofs, list(fixed)))
    k = matrices.K[np.ix_(local, local)].tocsr()
    m = matrices.M[np.ix_(local, local)].tocsr()
    tag = bc if edge is None else f"{bc}:{edge}"
    return SystemMatrices(K=k, M=m, mesh=mesh, bc=tag, active_dofs=keep)
