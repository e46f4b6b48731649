"""Homogenized section properties of layered plate/beam cross-sections.

A section is an ordered stack of isotropic layers (bottom to top). The
per-width flexural rigidity follows classical lamination theory about the
modulus-weighted neutral axis; the beam rigidity deliberately omits the
1/(1 - nu^2) plate correction, which the plate bending matrix applies per
layer instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Layer:
    """One isotropic layer: thickness [m], density [kg/m^3], modulus [Pa]."""

    thickness: float
    density: float
    elastic_modulus: float
    poisson_ratio: float

    def __post_init__(self):
        for name in ("thickness", "density", "elastic_modulus"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"layer {name} must be finite and > 0, got {value}")
        nu = self.poisson_ratio
        if not math.isfinite(nu) or not 0 <= nu < 0.5:
            raise DomainError(f"poisson_ratio must lie in [0, 0.5), got {nu}")


def bending_stiffness(elastic_modulus, thickness, poisson_ratio):
    """Isotropic plate bending stiffness D = E h^3 / (12 (1 - nu^2)) [N m]."""
    for name, value in (("elastic_modulus", elastic_modulus), ("thickness", thickness)):
        if not math.isfinite(value) or value <= 0:
            raise DomainError(f"{name} must be finite and > 0, got {value}")
    if not math.isfinite(poisson_ratio) or not 0 <= poisson_ratio < 0.5:
        raise DomainError(f"poisson_ratio must lie in [0, 0.5), got {poisson_ratio}")
    return elastic_modulus * thickness**3 / (12.0 * (1.0 - poisson_ratio**2))


class LaminateSection:
    """Layered cross-section with homogenized bending and inertia properties.

    Parameters
    ----------
    layers : sequence of Layer
        Stack ordered bottom to top.

    Attributes
    ----------
    neutral_axis_offset : float
        Height of the modulus-weighted centroid above the bottom face [m].
    flexural_rigidity_per_width : float
        Sum of E_i (t_i^3/12 + t_i d_i^2) over layers [N m], beam convention.
    mass_per_area : float
        Sum of rho_i t_i [kg/m^2].
    """

    def __init__(self, layers):
        layers = tuple(layers)
        if not layers:
            raise DomainError("a section needs at least one layer")
        self.layers = layers

        z = 0.0
        et_sum = 0.0
        et_z_sum = 0.0
        mass = 0.0
        centroids = []
        for layer in layers:
            zc = z + layer.thickness / 2.0
            centroids.append(zc)
            et = layer.elastic_modulus * layer.thickness
            et_sum += et
            et_z_sum += et * zc
            mass += layer.density * layer.thickness
            z += layer.thickness

        self.total_thickness = z
        self.mass_per_area = mass
        self.neutral_axis_offset = et_z_sum / et_sum

        rigidity = 0.0
        for layer, zc in zip(layers, centroids):
            d = zc - self.neutral_axis_offset
            inertia = layer.thickness**3 / 12.0 + layer.thickness * d * d
            rigidity += layer.elastic_modulus * inertia
        self.flexural_rigidity_per_width = rigidity

    def plate_bending_matrix(self):
        """3x3 bending stiffness matrix for plate elements [N m].

        Each layer contributes its isotropic constitutive matrix, with the
        1/(1 - nu^2) correction applied per layer, integrated about the
        section's neutral axis.
        """
        d = np.zeros((3, 3))
        z = 0.0
        for layer in self.layers:
            zc = z + layer.thickness / 2.0
            off = zc - self.neutral_axis_offset
            inertia = layer.thickness**3 / 12.0 + layer.thickness * off * off
            e, nu = layer.elastic_modulus, layer.poisson_ratio
            factor = e * inertia / (1.0 - nu * nu)
            d[0, 0] += factor
            d[1, 1] += factor
            d[0, 1] += factor * nu
            d[1, 0] += factor * nu
            d[2, 2] += factor * (1.0 - nu) / 2.0
            z += layer.thickness
        return d

    def __repr__(self):
        return (
            f"LaminateSection({len(self.layers)} layers, "
            f"mass_per_area={self.mass_per_area:.6g} kg/m^2, "
            f"rigidity_per_width={self.flexural_rigidity_per_width:.6g} N m)"
        )


def section_properties(layers):
    """Build a LaminateSection from an ordered (bottom to top) layer list."""
    return LaminateSection(layers)
