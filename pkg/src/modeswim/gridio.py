"""Structured-grid sampling of nodal fields and the grid file format.

Grid files are plain text: one header line `nx,ny,dx,dy`, then ny rows of
nx comma-separated values (row-major, y increasing row by row), every float
printed with 9 significant digits. Points outside the planform sample as 0.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .fem import build_elements
from .mesh import Mesh


def format_float(x):
    return f"{x:.9g}"


def write_grid(path, values, dx, dy):
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise DomainError(f"grid values must be 2-D, got shape {values.shape}")
    ny, nx = values.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{nx},{ny},{format_float(dx)},{format_float(dy)}\n")
        for row in values:
            fh.write(",".join(format_float(v) for v in row) + "\n")


def read_grid(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        nx, ny = int(header[0]), int(header[1])
        dx, dy = float(header[2]), float(header[3])
        values = np.array([[float(v) for v in fh.readline().strip().split(",")]
                           for _ in range(ny)])
    if values.shape != (ny, nx):
        raise DomainError(f"grid file {path} is inconsistent with its header")
    return values, dx, dy


def _point_in_quad(quad, x, y, tol):
    for k in range(4):
        x1, y1 = quad[k]
        x2, y2 = quad[(k + 1) % 4]
        if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) < -tol:
            return False
    return True


class FieldSampler:
    """Evaluates nodal DOF fields of a mesh on arbitrary points."""

    def __init__(self, mesh: Mesh, elements=None):
        self.mesh = mesh
        self.elements = elements if elements is not None else build_elements(mesh)
        self._boxes = np.array([
            [e.coords[:, 0].min(), e.coords[:, 1].min(),
             e.coords[:, 0].max(), e.coords[:, 1].max()]
            for e in self.elements])
        span = mesh.nodes.max(axis=0) - mesh.nodes.min(axis=0)
        self._tol = 1e-9 * float(span.max())

    def _locate(self, x, y):
        boxes = self._boxes
        candidates = np.flatnonzero(
            (boxes[:, 0] - self._tol <= x) & (x <= boxes[:, 2] + self._tol)
            & (boxes[:, 1] - self._tol <= y) & (y <= boxes[:, 3] + self._tol))
        for e in candidates:
            if _point_in_quad(self.elements[e].coords, x, y, self._tol):
                return e
        return -1

    def sample(self, dofs, points):
        """Deflection values at the given points; 0 outside the mesh."""
        dofs = np.asarray(dofs)
        out = np.zeros(len(points), dtype=dofs.dtype)
        for i, (x, y) in enumerate(points):
            e = self._locate(x, y)
            if e < 0:
                continue
            elem = self.elements[e]
            conn = self.mesh.elements[e]
            edofs = np.repeat(conn * 3, 3) + np.tile(np.arange(3), 4)
            n = elem.shape_matrix(np.array([[x, y]]))
            out[i] = (n @ dofs[edofs])[0]
        return out

    def regular_grid(self, dofs, nx, ny):
        """Sample onto a regular grid spanning the mesh bounding box.

        Returns (values[ny, nx], dx, dy, origin).
        """
        lo = self.mesh.nodes.min(axis=0)
        hi = self.mesh.nodes.max(axis=0)
        xs = np.linspace(lo[0], hi[0], nx)
        ys = np.linspace(lo[1], hi[1], ny)
        pts = [(x, y) for y in ys for x in xs]
        values = self.sample(dofs, pts).reshape(ny, nx)
        dx = (hi[0] - lo[0]) / (nx - 1) if nx > 1 else 0.0
        dy = (hi[1] - lo[1]) / (ny - 1) if ny > 1 else 0.0
        return values, dx, dy, (lo[0], lo[1])
