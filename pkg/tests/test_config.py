import pytest

from modeswim.config import config_digest, parse, serialize
from modeswim.errors import ConfigurationError, ParseError
from modeswim.mesh import Circle, Cross, Rectangle

MINIMAL = """
[geometry]
planform = rectangle
length = 0.2
width = 0.1

[mesh]
element_size = 0.02

[layer]
thickness = 0.001
density = 1200
elastic_modulus = 2e9
poisson_ratio = 0.3
"""

ROBOT = """
[geometry]
planform = rectangle
length = 0.16
width = 0.16

[mesh]
element_size = 0.01

[boundary]
condition = free

[layer]
thickness = 0.2e-3
density = 1643
elastic_modulus = 20.5e9
poisson_ratio = 0.3

[patch_layer]
thickness = 0.3e-3
density = 4750
elastic_modulus = 15.9e9
poisson_ratio = 0.31

[patch]
x0 = 0.01
y0 = 0.01
x1 = 0.095
y1 = 0.017

[patch]
x0 = 0.01
y0 = 0.01
x1 = 0.017
y1 = 0.095

[fluid]
density = 1830
calibration_factor = 1.5

[solver]
mode_count = 10

[drive]
frequencies_hz = 1,2,3
phases_deg = -90,0,90,180
damping_ratio = 0.03
"""


class TestParse:
    def test_minimal(self):
        cfg = parse(MINIMAL)
        assert isinstance(cfg.geometry, Rectangle)
        assert cfg.geometry.a == 0.2
        assert cfg.boundary == "free"
        assert len(cfg.layers) == 1
        assert cfg.fluid.density == 0.0
        assert cfg.mode_count == 12

    def test_robot(self):
        cfg = parse(ROBOT)
        assert len(cfg.patches) == 2
        assert len(cfg.patch_layers) == 1
        assert cfg.fluid.calibration_factor == 1.5
        assert cfg.frequencies == [1.0, 2.0, 3.0]
        assert len(cfg.phases) == 4

    def test_circle_and_cross(self):
        circle = MINIMAL.replace(
            "planform = rectangle\nlength = 0.2\nwidth = 0.1",
            "planform = circle\nradius = 0.08")
        assert isinstance(parse(circle).geometry, Circle)
        cross = MINIMAL.replace(
            "planform = rectangle\nlength = 0.2\nwidth = 0.1",
            "planform = cross\nlength = 0.3\nwidth = 0.3\narm_width = 0.1")
        assert isinstance(parse(cross).geometry, Cross)

    def test_comments_and_blanks_ignored(self):
        cfg = parse("# leading comment\n" + MINIMAL + "\n# trailing\n")
        assert cfg.element_size == 0.02

    def test_unknown_key_rejected_with_location(self):
        bad = MINIMAL + "\n[mesh2]\n"
        with pytest.raises(ParseError):
            parse(bad)
        bad = MINIMAL.replace("element_size = 0.02",
                              "element_size = 0.02\nrefinement = 3")
        with pytest.raises(ParseError) as err:
            parse(bad)
        assert "refinement" in str(err.value)

    def test_duplicate_singleton_section_rejected(self):
        with pytest.raises(ParseError):
            parse(MINIMAL + "\n[mesh]\nelement_size = 0.01\n")

    def test_missing_geometry_rejected(self):
        with pytest.raises(ConfigurationError):
            parse("[mesh]\nelement_size = 0.02\n")

    def test_patch_outside_planform_rejected(self):
        bad = ROBOT.replace("x1 = 0.095", "x1 = 0.25", 1)
        with pytest.raises(ConfigurationError):
            parse(bad)

    def test_patch_without_stack_rejected(self):
        bad = ROBOT.replace("[patch_layer]", "[layer]")
        with pytest.raises(ConfigurationError):
            parse(bad)

    def test_phase_out_of_range_rejected(self):
        bad = ROBOT.replace("phases_deg = -90,0,90,180",
                            "phases_deg = -180,0")
        with pytest.raises(ConfigurationError):
            parse(bad)

    def test_calibration_target_ordering(self):
        bad = MINIMAL + (
            "\n[validate]\nair_f1_hz = 5\nwet_f1_target_hz = 6\n")
        with pytest.raises(ConfigurationError):
            parse(bad)

    def test_clamped_edge_needs_edge(self):
        bad = MINIMAL + "\n[boundary]\ncondition = clamped_edge\n"
        with pytest.raises(ParseError):
            parse(bad)

    def test_malformed_line_reports_number(self):
        bad = "[geometry]\nplanform rectangle\n"
        with pytest.raises(ParseError) as err:
            parse(bad)
        assert "line 2" in str(err.value)


class TestRoundTrip:
    @pytest.mark.parametrize("text", [MINIMAL, ROBOT])
    def test_serialize_parse_idempotent(self, text):
        cfg = parse(text)
        again = parse(serialize(cfg))
        assert again == cfg
        assert serialize(again) == serialize(cfg)

    def test_digest_changes_with_content(self):
        assert config_digest(MINIMAL) != config_digest(ROBOT)
        assert config_digest(MINIMAL) == config_digest(MINIMAL)


class TestForwardAxis:
    def test_auto_axis_points_to_center(self):
        cfg = parse(ROBOT)
        ax = cfg.forward_axis()
        assert ax[0] == pytest.approx(ax[1])
        assert ax[0] > 0

    def test_explicit_axis_wins(self):
        text = ROBOT.replace("damping_ratio = 0.03",
                             "damping_ratio = 0.03\naxis = 0,1")
        cfg = parse(text)
        assert cfg.forward_axis() == (0.0, 1.0)
