from math import pi, sqrt

import numpy as np
import pytest
from scipy.integrate import quad

from dquant.boson_algebra import FockSpace, to_matrix
from dquant.fields import (
    FieldOperator,
    electric_field_from_D,
    expand_fields,
    field_power,
    integrate_density,
    sinc,
    vacuum_pair_correlation,
)
from dquant.modes import make_uniform_medium_modes
from dquant.susceptibility import SusceptibilityTensor
from dquant.units import UnitSystem

NAT = UnitSystem()


def eta_scalars(values):
    return [SusceptibilityTensor.scalar(n, v, role="eta") for n, v in enumerate(values, 1)]


class TestSinc:
    def test_unity_at_zero(self):
        assert sinc(0.0) == 1.0

    def test_exact_zero_at_pi(self):
        assert sinc(pi) == 0.0
        assert sinc(-3 * pi) == 0.0

    def test_half_pi_against_quadrature(self):
        # sinc(dk L/2) must reproduce the top-hat overlap integral
        L, dk = 2.0, pi / 2.0
        oracle = quad(lambda z: np.cos(dk * z) / L, -L / 2, L / 2)[0]
        assert sinc(dk * L / 2) == pytest.approx(oracle, abs=1e-12)
        assert sinc(pi / 2) == pytest.approx(2 / pi, abs=1e-12)


class TestExpandFields:
    def test_single_mode_coefficient(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [1], NAT)
        d_field, b_field = expand_fields(ms, NAT)
        mode = ms.modes[0]
        expected = sqrt(NAT.hbar * mode.omega / 2.0) * sqrt(ms.w) * abs(mode.profile.d_value())
        coeff = d_field.component(1).coefficient({mode.label: (0, 1)})
        assert abs(coeff) == pytest.approx(expected, rel=1e-14)
        assert b_field.component(1).coefficient({mode.label: (0, 1)}) != 0

    def test_weight_scales_with_box(self):
        ms = make_uniform_medium_modes(1.0, 8 * pi, [4], NAT)  # k = 1 again
        d_field, _ = expand_fields(ms, NAT)
        mode = ms.modes[0]
        expected = sqrt(NAT.hbar * mode.omega / 2.0) * sqrt(ms.w) * abs(mode.profile.d_value())
        coeff = d_field.component(4).coefficient({mode.label: (0, 1)})
        assert abs(coeff) == pytest.approx(expected, rel=1e-14)

    def test_hermitian_field_invariant(self):
        ms = make_uniform_medium_modes(1.5, 2 * pi, [-2, -1, 1, 2], NAT)
        d_field, b_field = expand_fields(ms, NAT)
        assert d_field.is_hermitian_field()
        assert b_field.is_hermitian_field()

    def test_degree_one_per_component(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [-1, 1], NAT)
        d_field, _ = expand_fields(ms, NAT)
        assert d_field.max_degree() == 1

    def test_linearity_zero_field_addition(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [1], NAT)
        d_field, _ = expand_fields(ms, NAT)
        unchanged = d_field + FieldOperator({}, d_field.w)
        for m in d_field.wavevectors():
            assert unchanged.component(m).isclose(d_field.component(m))

    def test_two_mode_expansion_is_sum_of_singles(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [1, 2], NAT)
        d_two, _ = expand_fields(ms, NAT)
        for mode in ms.modes:
            single = make_uniform_medium_modes(1.0, 2 * pi, [mode.m], NAT,
                                               label_start=mode.label)
            d_one, _ = expand_fields(single, NAT)
            assert d_two.component(mode.m).isclose(d_one.component(mode.m))


class TestElectricFieldFromD:
    def setup_method(self):
        self.ms = make_uniform_medium_modes(1.0, 2 * pi, [-1, 1], NAT)
        self.d_field, _ = expand_fields(self.ms, NAT)

    def test_vacuum_identity(self):
        e = electric_field_from_D(self.d_field, eta_scalars([1.0]), 1)
        for m in self.d_field.wavevectors():
            assert e.component(m).isclose(self.d_field.component(m))

    def test_linear_medium(self):
        e = electric_field_from_D(self.d_field, eta_scalars([0.3, 0.0]), 2)
        assert e.max_degree() == 1
        assert e.component(1).isclose(0.3 * self.d_field.component(1))

    def test_quadratic_components_hand_convolution(self):
        eta2 = 0.25
        e = electric_field_from_D(self.d_field, eta_scalars([1.0, eta2]), 2)
        assert sorted(e.wavevectors()) == [-2, -1, 0, 1, 2]
        d1 = self.d_field.component(1)
        hand = eta2 / sqrt(2 * pi) * (d1 * d1)
        assert e.component(2).isclose(hand, tol=1e-14)
        # matrix oracle: the k=+2 coefficient equals eta2/sqrt(2 pi) * M(D_1)^2
        space = FockSpace(modes=tuple(self.ms.labels()), cutoff=4)
        lhs = to_matrix(e.component(2), space).toarray()
        md1 = to_matrix(d1, space).toarray()
        assert np.allclose(lhs, eta2 / sqrt(2 * pi) * md1 @ md1, atol=1e-13)

    def test_degree_two_for_quadratic_medium(self):
        e = electric_field_from_D(self.d_field, eta_scalars([1.0, 0.1]), 2)
        assert e.max_degree() == 2

    def test_leakage_tracked_not_dropped(self):
        retained = {-1, 1}
        e = electric_field_from_D(self.d_field, eta_scalars([1.0, 0.1]), 2, retained_k=retained)
        assert sorted(e.wavevectors()) == [-1, 1]
        assert set(e.leakage) == {-2, 0, 2}
        assert e.leakage_norm > 0

    def test_hermiticity_survives_nonlinearity(self):
        e = electric_field_from_D(self.d_field, eta_scalars([1.0, 0.1]), 2)
        assert e.is_hermitian_field(tol=1e-13)


class TestIntegrateDensity:
    def test_box_integral_selects_zero_component(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [-1, 1], NAT)
        d_field, _ = expand_fields(ms, NAT)
        sq = d_field * d_field
        h = integrate_density(sq, ms.l_box)
        expected = (ms.l_box / sqrt(2 * pi)) * sq.component(0)
        assert h.isclose(expected)

    def test_region_integral_uses_sinc(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [1], NAT)
        d_field, _ = expand_fields(ms, NAT)
        length = 1.3
        h = integrate_density(d_field, ms.l_box, region_length=length)
        # sinc is even, so both +k and -k components of the one mode survive
        expected = (length / sqrt(2 * pi)) * sinc(1.0 * length / 2) * (
            d_field.component(1) + d_field.component(-1)
        )
        assert h.isclose(expected)

    def test_field_power_matches_repeated_product(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [-1, 1], NAT)
        d_field, _ = expand_fields(ms, NAT)
        cube = field_power(d_field, 3)
        manual = d_field * d_field * d_field
        for m in manual.wavevectors():
            assert cube.component(m).isclose(manual.component(m))


class TestCorrelationConsistency:
    def test_table_matches_operator_expectation(self):
        ms = make_uniform_medium_modes(1.0, 2 * pi, [-2, -1, 1, 2], NAT)
        d_field, _ = expand_fields(ms, NAT)
        dz = 0.4
        space = FockSpace(modes=tuple(ms.labels()), cutoff=2)
        vac = space.vacuum()
        val = 0.0 + 0.0j
        for m1 in d_field.wavevectors():
            for m2 in d_field.wavevectors():
                # phi_{m1}(z+dz) phi_{m2}(z) at z = 0
                phase = np.exp(1j * d_field.k(m1) * dz) / (2 * pi)
                mat = (to_matrix(d_field.component(m1), space)
                       @ to_matrix(d_field.component(m2), space))
                val += phase * (vac.conj() @ (mat @ vac))
        table = vacuum_pair_correlation(ms, dz, NAT)
        assert val == pytest.approx(table, abs=1e-12)

    def test_box_doubling_leaves_windowed_correlator_invariant(self):
        # smeared two-point function converges under k-grid refinement
        window = lambda k: np.exp(-((k - 3.0) ** 2) / (2 * 0.7**2))
        values = []
        for l_box in (4000.0, 8000.0):
            w = 2 * pi / l_box
            m_lo, m_hi = int(np.ceil(0.2 / w)), int(np.floor(6.2 / w))
            ms = make_uniform_medium_modes(1.0, l_box, range(m_lo, m_hi + 1), NAT)
            values.append(vacuum_pair_correlation(ms, 0.3, NAT, window=window))
        assert abs(values[0] - values[1]) < 1e-6
