"""Incompressible added-mass surrogate for fluid loading.

Submerging a thin structure in a dense fluid lowers every natural frequency
by 1/sqrt(1 + beta), where beta is the ratio of fluid added mass to
structural mass. The added mass follows flat-strip potential-flow theory
scaled by a calibration factor, so one measured (or externally computed)
wet frequency pins the whole spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import CalibrationError, DomainError
from .eigensolver import ModalBasis


@dataclass(frozen=True)
class FluidModel:
    """Fluid density [kg/m^3] and dimensionless added-mass calibration factor."""

    density: float
    calibration_factor: float = 1.0

    def __post_init__(self):
        if self.density < 0:
            raise DomainError(f"fluid density must be >= 0, got {self.density}")
        if self.calibration_factor < 0:
            raise DomainError(
                f"calibration_factor must be >= 0, got {self.calibration_factor}")


def beam_added_mass_per_length(width, fluid: FluidModel):
    """Strip-theory added mass of a flat strip, Lambda * rho * pi * w^2 / 4 [kg/m]."""
    if width <= 0:
        raise DomainError(f"width must be > 0, got {width}")
    return fluid.calibration_factor * fluid.density * math.pi * width**2 / 4.0


def plate_added_mass_per_area(char_length, fluid: FluidModel):
    """Added mass per area for a plate, Lambda * rho * (pi/4) * L_char [kg/m^2].

    char_length is the shortest planform span unless overridden in the
    configuration; the calibration factor absorbs the geometry error.
    """
    if char_length <= 0:
        raise DomainError(f"char_length must be > 0, got {char_length}")
    return fluid.calibration_factor * fluid.density * math.pi / 4.0 * char_length


def added_mass_ratio(structural_mass, added_mass):
    if structural_mass <= 0:
        raise DomainError("structural mass must be > 0")
    if added_mass < 0:
        raise DomainError("added mass must be >= 0")
    return added_mass / structural_mass


def wet_frequencies(dry: ModalBasis, structural_mass, added_mass):
    """Map a dry basis to its in-fluid counterpart.

    Every frequency scales by 1/sqrt(1 + beta); shapes are unchanged and
    the medium tag flips to 'wet'. Masses may be per unit length (beams)
    or per unit area (plates) as long as both use the same convention.
    """
    beta = added_mass_ratio(structural_mass, added_mass)
    factor = 1.0 / math.sqrt(1.0 + beta)
    return replace(dry, frequencies=dry.frequencies * factor, medium="wet")


def calibrate(dry_frequency, target_wet_frequency, baseline_ratio):
    """Calibration factor Lambda making the wet fundamental hit its target.

    baseline_ratio is the added/structural mass ratio at Lambda = 1.
    """
    if dry_frequency <= 0 or target_wet_frequency <= 0:
        raise DomainError("frequencies must be > 0")
    if baseline_ratio <= 0:
        raise DomainError("baseline_ratio must be > 0")
    if target_wet_frequency >= dry_frequency:
        raise CalibrationError(
            f"target {target_wet_frequency:g} Hz >= dry {dry_frequency:g} Hz: "
            "added mass cannot raise a frequency")
    return ((dry_frequency / target_wet_frequency) ** 2 - 1.0) / baseline_ratio
