"""Pipeline from a RunConfig to meshes, matrices, and modal bases."""

from __future__ import annotations

from .config import RunConfig
from .eigensolver import solve_modes
from .errors import ConfigurationError
from .fem import SectionRegion, apply_boundary, assemble, build_elements
from .fluid import plate_added_mass_per_area, wet_frequencies
from .laminate import section_properties
from .mesh import generate_mesh


class PlateRunModel:
    """Mesh, sections, and assembled system for one configuration.

    Bases are computed lazily and cached; the wet basis applies the
    added-mass frequency scaling against the body section's mass per area.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.body_section = section_properties(config.layers)
        self.patch_section = (section_properties(config.patch_layers)
                              if config.patch_layers else None)
        self.mesh = generate_mesh(config.geometry, config.element_size)
        self.elements = build_elements(self.mesh)
        regions = None
        if config.patches and self.patch_section is not None:
            regions = [SectionRegion(p.footprint, self.patch_section)
                       for p in config.patches]
        raw = assemble(self.mesh, self.body_section, regions=regions,
                       elements=self.elements)
        self.matrices = apply_boundary(raw, config.boundary,
                                       edge=config.boundary_edge)
        self._dry = None
        self._wet = None

    def dry_basis(self, method="shift_invert"):
        if self._dry is None:
            self._dry = solve_modes(self.matrices, self.config.mode_count,
                                    shift_hz=self.config.shift_hz, method=method)
        return self._dry

    def added_mass_per_area(self):
        if self.config.fluid.density == 0:
            return 0.0
        return plate_added_mass_per_area(self.config.body_char_length(),
                                         self.config.fluid)

    def wet_basis(self, method="shift_invert"):
        """In-fluid basis; identical to the dry one when density is zero."""
        if self._wet is None:
            dry = self.dry_basis(method=method)
            added = self.added_mass_per_area()
            if added == 0.0:
                self._wet = dry
            else:
                self._wet = wet_frequencies(dry, self.body_section.mass_per_area,
                                            added)
        return self._wet

    def active_basis(self, method="shift_invert"):
        """Wet basis when fluid is configured, dry otherwise."""
        if self.config.fluid.density > 0:
            return self.wet_basis(method=method)
        return self.dry_basis(method=method)

    def require_cantilever(self):
        if self.config.boundary != "clamped_edge":
            raise ConfigurationError(
                "beam validation needs a clamped_edge boundary condition")
