"""Closed-form references: simply-supported plate modes and frequencies,
degenerate-mode superposition, and clamped-free composite beam frequencies.

These serve as oracles for the finite-element path and drive the mode-atlas
export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .laminate import LaminateSection

# Roots of 1 + cos(bl) cosh(bl) = 0, clamped-free beam.
CLAMPED_FREE_ROOTS = (1.87510407, 4.69409113, 7.85475744, 10.9955407, 14.1371684)


@dataclass(frozen=True)
class ModeIndex:
    """Half-wave counts (m along x, n along y), both >= 1."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DomainError(f"mode indices must be >= 1, got ({self.m}, {self.n})")

    def swapped(self):
        return ModeIndex(self.n, self.m)


@dataclass(frozen=True)
class AnalyticPlate:
    """Rectangular plate a x b with bending stiffness D and mass per area mu."""

    a: float
    b: float
    D: float
    mu: float

    def __post_init__(self):
        for name in ("a", "b", "D", "mu"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"plate {name} must be finite and > 0, got {value}")


def ss_mode_shape(idx: ModeIndex, plate: AnalyticPlate, x, y):
    """Simply-supported mode shape sin(m pi x / a) sin(n pi y / b).

    Accepts scalars or arrays for x and y; every point must lie on the plate.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(x > plate.a) or np.any(y < 0) or np.any(y > plate.b):
        raise DomainError("evaluation point outside the plate")
    w = np.sin(idx.m * np.pi * x / plate.a) * np.sin(idx.n * np.pi * y / plate.b)
    return float(w) if w.ndim == 0 else w


def ss_eigenfrequency(idx: ModeIndex, plate: AnalyticPlate):
    """Angular eigenfrequency pi^2 (m^2/a^2 + n^2/b^2) sqrt(D/mu) [rad/s]."""
    k = idx.m**2 / plate.a**2 + idx.n**2 / plate.b**2
    return math.pi**2 * k * math.sqrt(plate.D / plate.mu)


def ss_eigenfrequency_hz(idx: ModeIndex, plate: AnalyticPlate):
    """Eigenfrequency in Hz (public interfaces report Hz throughout)."""
    return ss_eigenfrequency(idx, plate) / (2.0 * math.pi)


def ss_frequency_table(plate: AnalyticPlate, count, max_index=12):
    """Lowest `count` simply-supported frequencies [Hz], ascending,
    with their mode indices. Used as a brute-force oracle for FEM checks."""
    entries = []
    for m in range(1, max_index + 1):
        for n in range(1, max_index + 1):
            entries.append((ss_eigenfrequency_hz(ModeIndex(m, n), plate), (m, n)))
    entries.sort()
    return entries[:count]


def superpose_degenerate(w_mn, w_nm, gamma):
    """Pointwise combination w_mn cos(gamma) + w_nm sin(gamma)."""
    w_mn = np.asarray(w_mn, dtype=float)
    w_nm = np.asarray(w_nm, dtype=float)
    if w_mn.shape != w_nm.shape:
        raise DomainError(
            f"field grids differ: {w_mn.shape} vs {w_nm.shape}"
        )
    return w_mn * math.cos(gamma) + w_nm * math.sin(gamma)


def cantilever_frequencies(section: LaminateSection, length, width, count):
    """First `count` clamped-free bending frequencies [Hz] of a uniform
    composite beam.

    EI is the section rigidity per width times the beam width; the running
    mass is mass per area times width.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if length <= 0 or width <= 0:
        raise DomainError("beam length and width must be > 0")
    ei = section.flexural_rigidity_per_width * width
    mu_len = section.mass_per_area * width
    roots = list(CLAMPED_FREE_ROOTS)
    while len(roots) < count:
        # Higher roots approach (2k - 1) pi / 2 to well past 8 digits.
        roots.append((2 * len(roots) + 1) * math.pi / 2.0)
    base = math.sqrt(ei / (mu_len * length**4)) / (2.0 * math.pi)
    return [r * r * base for r in roots[:count]]
