import numpy as np
import pytest
from hypothesis import given, strategies as st

from modeswim.errors import DomainError
from modeswim.laminate import Layer, bending_stiffness, section_properties


def oracle_section(layers, n_sub=20000):
    """Brute-force z-integration of the stack, independent of the
    closed-form parallel-axis path."""
    zs, e, rho = [], [], []
    z = 0.0
    for layer in layers:
        sub = np.linspace(z, z + layer.thickness, n_sub, endpoint=False)
        sub += layer.thickness / (2 * n_sub)
        zs.append(sub)
        e.append(np.full(n_sub, layer.elastic_modulus))
        rho.append(np.full(n_sub, layer.density))
        z += layer.thickness
    zs = np.concatenate(zs)
    e = np.concatenate(e)
    rho = np.concatenate(rho)
    dz = z / len(zs) * len(layers) / len(layers)
    dz = np.concatenate([np.full(n_sub, l.thickness / n_sub) for l in layers])
    z_bar = np.sum(e * zs * dz) / np.sum(e * dz)
    rigidity = np.sum(e * (zs - z_bar) ** 2 * dz)
    mass = np.sum(rho * dz)
    return z_bar, rigidity, mass


class TestBendingStiffness:
    def test_unit_identity(self):
        assert bending_stiffness(12.0, 1.0, 0.0) == pytest.approx(1.0)

    def test_carbon_plate(self):
        assert bending_stiffness(20.5e9, 0.2e-3, 0.3) == pytest.approx(
            1.50183150e-2, rel=1e-8)

    def test_pzt_layer(self):
        assert bending_stiffness(15.9e9, 0.3e-3, 0.31) == pytest.approx(
            3.95784932e-2, rel=1e-8)

    @pytest.mark.parametrize("e,h,nu", [
        (-1.0, 1.0, 0.3), (1.0, 0.0, 0.3), (1.0, 1.0, 0.5),
        (1.0, 1.0, -0.1), (float("nan"), 1.0, 0.3), (1.0, float("inf"), 0.3),
    ])
    def test_rejects_bad_inputs(self, e, h, nu):
        with pytest.raises(DomainError):
            bending_stiffness(e, h, nu)


class TestSectionProperties:
    def test_single_layer_is_symmetric(self):
        sec = section_properties([Layer(0.01, 1000.0, 2.0e9, 0.3)])
        assert sec.flexural_rigidity_per_width == pytest.approx(2.0e9 * 0.01**3 / 12)
        assert sec.neutral_axis_offset == pytest.approx(0.005)

    def test_table_stack_against_oracle(self, table_layers, table_section):
        z_bar, rigidity, mass = oracle_section(table_layers)
        assert table_section.neutral_axis_offset == pytest.approx(z_bar, rel=1e-6)
        assert table_section.flexural_rigidity_per_width == pytest.approx(
            rigidity, rel=1e-6)
        assert table_section.mass_per_area == pytest.approx(mass, rel=1e-9)

    def test_table_stack_frozen_values(self, table_section):
        # Frozen from the oracle above.
        assert table_section.mass_per_area == pytest.approx(1.8106, rel=1e-4)
        assert table_section.neutral_axis_offset == pytest.approx(
            0.26069e-3, rel=1e-3)
        assert table_section.flexural_rigidity_per_width == pytest.approx(
            0.24812, rel=1e-3)

    def test_two_identical_layers_merge(self):
        layer = Layer(0.003, 1200.0, 5.0e9, 0.25)
        doubled = Layer(0.006, 1200.0, 5.0e9, 0.25)
        split = section_properties([layer, layer])
        merged = section_properties([doubled])
        assert split.flexural_rigidity_per_width == pytest.approx(
            merged.flexural_rigidity_per_width, rel=1e-12)
        assert split.mass_per_area == pytest.approx(merged.mass_per_area)
        assert split.neutral_axis_offset == pytest.approx(merged.neutral_axis_offset)

    def test_empty_stack_rejected(self):
        with pytest.raises(DomainError):
            section_properties([])

    def test_symmetric_stack_flip_invariant(self, table_layers):
        sym = [table_layers[0], table_layers[1], table_layers[0]]
        fwd = section_properties(sym)
        rev = section_properties(sym[::-1])
        assert fwd.flexural_rigidity_per_width == pytest.approx(
            rev.flexural_rigidity_per_width, rel=1e-12)
        assert fwd.mass_per_area == pytest.approx(rev.mass_per_area)
        assert fwd.neutral_axis_offset == pytest.approx(rev.neutral_axis_offset)


positive = st.floats(min_value=1e-4, max_value=1e3, allow_nan=False)


@given(t1=positive, t2=positive, c=st.floats(min_value=1e-3, max_value=1e3))
def test_modulus_scaling_property(t1, t2, c):
    layers = [Layer(t1, 1000.0, 1e9, 0.3), Layer(t2, 2000.0, 3e9, 0.2)]
    scaled = [Layer(t1, 1000.0, c * 1e9, 0.3), Layer(t2, 2000.0, c * 3e9, 0.2)]
    base = section_properties(layers)
    up = section_properties(scaled)
    assert up.flexural_rigidity_per_width == pytest.approx(
        c * base.flexural_rigidity_per_width, rel=1e-9)
    assert up.neutral_axis_offset == pytest.approx(base.neutral_axis_offset, rel=1e-9)


@given(ts=st.lists(positive, min_size=1, max_size=5))
def test_mass_additivity_property(ts):
    layers = [Layer(t, 1500.0, 2e9, 0.3) for t in ts]
    sec = section_properties(layers)
    assert sec.mass_per_area == pytest.approx(1500.0 * sum(ts), rel=1e-9)


def test_plate_bending_matrix_single_layer():
    sec = section_properties([Layer(0.01, 1000.0, 2.0e9, 0.3)])
    d = sec.plate_bending_matrix()
    d0 = bending_stiffness(2.0e9, 0.01, 0.3)
    assert d[0, 0] == pytest.approx(d0)
    assert d[0, 1] == pytest.approx(0.3 * d0)
    assert d[2, 2] == pytest.approx(d0 * (1 - 0.3) / 2)
    assert np.allclose(d, d.T)
