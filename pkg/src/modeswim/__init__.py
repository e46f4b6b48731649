"""Modal analysis and propulsion prediction for flexible planar underwater
robots driven by phased piezoelectric patch pairs."""

__version__ = "0.1.0"

from .analytic import (AnalyticPlate, ModeIndex, cantilever_frequencies,
                       ss_eigenfrequency, ss_eigenfrequency_hz, ss_mode_shape,
                       superpose_degenerate)
from .drive import (ActuatorPatch, DriveCondition, MotionEstimate,
                    OperatingShape, estimate_motion, fit_mixing_angle,
                    harmonic_response, movement_map, patch_load_vector)
from .eigensolver import ModalBasis, detect_degenerate_pairs, solve_modes
from .fem import SectionRegion, SystemMatrices, apply_boundary, assemble
from .fluid import (FluidModel, beam_added_mass_per_length, calibrate,
                    plate_added_mass_per_area, wet_frequencies)
from .laminate import LaminateSection, Layer, bending_stiffness, section_properties
from .mesh import Circle, Cross, Mesh, Rectangle, generate_mesh
from .model import PlateRunModel
