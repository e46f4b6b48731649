"""Planform geometries and structured quadrilateral meshing.

Rectangles get a regular grid; crosses a masked grid whose lines are snapped
to the arm boundaries; circles use the elliptical square-to-disk mapping
(x = u sqrt(1 - v^2/2), y = v sqrt(1 - u^2/2)), which places boundary nodes
exactly on the circle while keeping a single element type.

Node ordering is deterministic (row-major over the generating grid) and
element connectivity is counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("rectangle sides must be > 0")

    @property
    def min_span(self):
        return min(self.a, self.b)

    def bounding_box(self):
        return 0.0, 0.0, self.a, self.b

    def contains(self, x, y, tol=1e-12):
        return (-tol <= x <= self.a + tol) and (-tol <= y <= self.b + tol)


@dataclass(frozen=True)
class Circle:
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("circle radius must be > 0")

    @property
    def min_span(self):
        return 2.0 * self.radius

    def bounding_box(self):
        r = self.radius
        return -r, -r, r, r

    def contains(self, x, y, tol=1e-9):
        return math.hypot(x, y) <= self.radius * (1.0 + tol)


@dataclass(frozen=True)
class Cross:
    """Two centered orthogonal bars: overall_length x arm_width horizontal,
    arm_width x overall_width vertical."""

    overall_length: float
    overall_width: float
    arm_width: float

    def __post_init__(self):
        if min(self.overall_length, self.overall_width, self.arm_width) <= 0:
            raise DomainError("cross dimensions must be > 0")
        if self.arm_width > min(self.overall_length, self.overall_width):
            raise DomainError("cross arm_width must not exceed the overall dimensions")

    @property
    def min_span(self):
        return self.arm_width

    def bounding_box(self):
        return (
            -self.overall_length / 2.0,
            -self.overall_width / 2.0,
            self.overall_length / 2.0,
            self.overall_width / 2.0,
        )

    def contains(self, x, y, tol=1e-12):
        t = self.arm_width / 2.0
        in_h = abs(x) <= self.overall_length / 2.0 + tol and abs(y) <= t + tol
        in_v = abs(y) <= self.overall_width / 2.0 + tol and abs(x) <= t + tol
        return in_h or in_v


PlateGeometry = Rectangle | Circle | Cross


class Mesh:
    """Quadrilateral mesh with 3 DOFs per node: (w, dw/dx, dw/dy).

    Attributes
    ----------
    nodes : (n_nodes, 2) float array
    elements : (n_elements, 4) int array, counterclockwise connectivity
    """

    def __init__(self, nodes, elements, geometry=None):
        self.nodes = np.asarray(nodes, dtype=float)
        self.elements = np.asarray(elements, dtype=int)
        self.geometry = geometry
        if self.elements.size and self.elements.max() >= len(self.nodes):
            raise ConfigurationError("element connectivity references missing nodes")
        self._check_orientation()

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_dofs(self):
        return 3 * len(self.nodes)

    def element_coords(self, index):
        return self.nodes[self.elements[index]]

    def element_centers(self):
        return self.nodes[self.elements].mean(axis=1)

    def _check_orientation(self):
        for e, conn in enumerate(self.elements):
            xy = self.nodes[conn]
            area = 0.0
            for k in range(4):
                x1, y1 = xy[k]
                x2, y2 = xy[(k + 1) % 4]
                area += x1 * y2 - x2 * y1
            if area <= 0:
                raise ConfigurationError(f"element {e} is degenerate or clockwise")

    def boundary_node_ids(self):
        """Nodes on edges used by exactly one element."""
        counts = {}
        for conn in self.elements:
            for k in range(4):
                edge = tuple(sorted((conn[k], conn[(k + 1) % 4])))
                counts[edge] = counts.get(edge, 0) + 1
        ids = set()
        for edge, c in counts.items():
            if c == 1:
                ids.update(edge)
        return np.array(sorted(ids), dtype=int)

    def write_csv(self, node_path, element_path):
        """Write node table (id,x,y) and element table (id,n1,n2,n3,n4)."""
        with open(node_path, "w", encoding="utf-8") as fh:
            fh.write("id,x,y\n")
            for i, (x, y) in enumerate(self.nodes):
                fh.write(f"{i},{x:.9g},{y:.9g}\n")
        with open(element_path, "w", encoding="utf-8") as fh:
            fh.write("id,n1,n2,n3,n4\n")
            for i, conn in enumerate(self.elements):
                fh.write(f"{i},{conn[0]},{conn[1]},{conn[2]},{conn[3]}\n")


def _segment_counts(breaks, target):
    """Per-segment subdivision counts so grid lines hit every breakpoint."""
    counts = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        counts.append(max(1, round((hi - lo) / target)))
    return counts


def _grid_lines(breaks, counts):
    lines = [breaks[0]]
    for lo, hi, c in zip(breaks[:-1], breaks[1:], counts):
        step = (hi - lo) / c
        lines.extend(lo + step * k for k in range(1, c + 1))
    return np.array(lines)


def _structured(xs, ys):
    nx, ny = len(xs) - 1, len(ys) - 1
    nodes = np.array([(x, y) for y in ys for x in xs])
    elements = []
    for j in range(ny):
        for i in range(nx):
            n0 = j * (nx + 1) + i
            elements.append((n0, n0 + 1, n0 + nx + 2, n0 + nx + 1))
    return nodes, np.array(elements, dtype=int)


def _masked(xs, ys, keep):
    """Keep cells whose centers satisfy `keep`; renumber surviving nodes."""
    nx = len(xs) - 1
    nodes, elements = _structured(xs, ys)
    centers = nodes[elements].mean(axis=1)
    mask = np.array([keep(cx, cy) for cx, cy in centers])
    elements = elements[mask]
    used = np.unique(elements)
    renumber = -np.ones(len(nodes), dtype=int)
    renumber[used] = np.arange(len(used))
    return nodes[used], renumber[elements]


def generate_mesh(geometry: PlateGeometry, target_element_size):
    """Mesh a planform with quadrilaterals of roughly the requested size.

    At least two elements must fit across the smallest span; coarser
    requests raise a ConfigurationError.
    """
    if target_element_size <= 0:
        raise ConfigurationError("target_element_size must be > 0")
    if target_element_size > geometry.min_span / 2.0:
        raise ConfigurationError(
            f"element size {target_element_size:g} too coarse: need at least two "
            f"elements across the smallest span {geometry.min_span:g}"
        )

    if isinstance(geometry, Rectangle):
        nx = max(2, round(geometry.a / target_element_size))
        ny = max(2, round(geometry.b / target_element_size))
        nodes, elements = _structured(
            np.linspace(0.0, geometry.a, nx + 1), np.linspace(0.0, geometry.b, ny + 1)
        )
        return Mesh(nodes, elements, geometry)

    if isinstance(geometry, Cross):
        hl, hw, t = geometry.overall_length / 2.0, geometry.overall_width / 2.0, geometry.arm_width / 2.0
        xb = sorted({-hl, -t, t, hl})
        yb = sorted({-hw, -t, t, hw})
        xs = _grid_lines(xb, _segment_counts(xb, target_element_size))
        ys = _grid_lines(yb, _segment_counts(yb, target_element_size))
        nodes, elements = _masked(xs, ys, geometry.contains)
        return Mesh(nodes, elements, geometry)

    if isinstance(geometry, Circle):
        n = max(4, round(2.0 * geometry.radius / target_element_size))
        u = np.linspace(-1.0, 1.0, n + 1)
        uu, vv = np.meshgrid(u, u, indexing="xy")
        x = geometry.radius * uu * np.sqrt(1.0 - vv**2 / 2.0)
        y = geometry.radius * vv * np.sqrt(1.0 - uu**2 / 2.0)
        nodes = np.column_stack([x.ravel(), y.ravel()])
        _, elements = _structured(np.arange(n + 1), np.arange(n + 1))
        return Mesh(nodes, elements, geometry)

    raise ConfigurationError(f"unsupported geometry {geometry!r}")


# --- symmetry maps -----------------------------------------------------------

def _node_lookup(mesh, scale):
    table = {}
    for i, (x, y) in enumerate(mesh.nodes):
        table[(round(x / scale), round(y / scale))] = i
    return table


def _coord_scale(mesh):
    x0, y0 = mesh.nodes.min(axis=0)
    x1, y1 = mesh.nodes.max(axis=0)
    span = max(x1 - x0, y1 - y0)
    if span <= 0:
        raise ConfigurationError("mesh has no spatial extent")
    return span * 1e-9


def mirror_map(mesh, kind):
    """Node permutation and per-DOF sign flips for a mesh symmetry.

    kind: 'x' reflects across the horizontal centerline (y -> -y about the
    mesh center), 'y' across the vertical centerline, 'transpose' swaps x
    and y (square planforms). Returns (dof_permutation, dof_signs); raises
    ConfigurationError when the mesh lacks the symmetry.

    Slope DOFs transform as gradients: 'x' negates dw/dy, 'y' negates
    dw/dx, 'transpose' swaps the two slopes.
    """
    scale = _coord_scale(mesh)
    table = _node_lookup(mesh, scale)
    x0, y0 = mesh.nodes.min(axis=0)
    x1, y1 = mesh.nodes.max(axis=0)
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0

    if kind == "x":
        image = lambda x, y: (x, 2.0 * cy - y)
        dof_order, signs = (0, 1, 2), (1.0, 1.0, -1.0)
    elif kind == "y":
        image = lambda x, y: (2.0 * cx - x, y)
        dof_order, signs = (0, 1, 2), (1.0, -1.0, 1.0)
    elif kind == "transpose":
        image = lambda x, y: (cx + (y - cy), cy + (x - cx))
        dof_order, signs = (0, 2, 1), (1.0, 1.0, 1.0)
    else:
        raise ConfigurationError(f"unknown mirror kind '{kind}'")

    n = mesh.n_nodes
    perm = np.empty(3 * n, dtype=int)
    sgn = np.empty(3 * n)
    for i, (x, y) in enumerate(mesh.nodes):
        mx, my = image(x, y)
        j = table.get((round(mx / scale), round(my / scale)))
        if j is None:
            raise ConfigurationError(f"mesh is not symmetric under '{kind}' mirror")
        for d in range(3):
            perm[3 * i + d] = 3 * j + dof_order[d]
            sgn[3 * i + d] = signs[d]
    return perm, sgn


def apply_mirror(vector, perm, signs):
    """Pull a DOF vector back through a mirror map."""
    out = np.asarray(vector)[perm].astype(vector.dtype, copy=True)
    return out * signs
