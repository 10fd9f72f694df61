from math import pi, sinh

import numpy as np
import pytest

from dquant.boson_algebra import BosonicPolynomial, FockSpace, number
from dquant.dynamics import (
    EvolutionConfig,
    beamsplitter,
    coherent_state,
    compare_schemes,
    conversion_series,
    evolve,
    frequency_conversion,
    occupation_expectation,
    spdc_squeezing,
    squeezing_series,
    two_mode_squeezer,
)
from dquant.hamiltonian import InteractionParams


def params_with(theta=0.05, phi=1.0):
    return InteractionParams(theta=theta, delta_k=0.0, delta=0.0, phi=phi)


class TestEvolve:
    def test_eigenstate_stays_put(self):
        space = FockSpace(modes=(0,), cutoff=6)
        h = 1.3 * number(0)
        psi0 = space.basis_state([1])
        res = evolve(h, space, psi0, t=2.7, steps=4)
        assert abs(np.vdot(space.basis_state([1]), res.state)) == pytest.approx(1.0, abs=1e-12)

    def test_zero_hamiltonian(self):
        space = FockSpace(modes=(0,), cutoff=4)
        psi0 = space.basis_state([2])
        res = evolve(BosonicPolynomial.zero(), space, psi0, t=5.0)
        assert np.allclose(res.state, psi0)

    def test_two_mode_squeezing_matches_sinh(self):
        g, t = 1.0, 0.1
        space = FockSpace(modes=(0, 1), cutoff=12)
        res = evolve(two_mode_squeezer(g), space, space.vacuum(), t, steps=2)
        n_a = occupation_expectation(space, res.state, 0)
        assert n_a == pytest.approx(sinh(g * t) ** 2, abs=1e-6)

    def test_norm_and_energy_preserved(self):
        space = FockSpace(modes=(0, 1), cutoff=10)
        res = evolve(two_mode_squeezer(0.8), space, space.vacuum(), 0.3, steps=6)
        assert res.norm_drift < 1e-10
        assert res.energy_drift < 1e-10

    def test_truncation_flag_raised_when_cutoff_reached(self):
        space = FockSpace(modes=(0, 1), cutoff=3)
        res = evolve(two_mode_squeezer(1.0), space, space.vacuum(), 2.0, steps=4)
        assert res.edge_population > 1e-6
        assert not res.truncation_safe

    def test_rejects_non_hermitian(self):
        space = FockSpace(modes=(0,), cutoff=3)
        with pytest.raises(ValueError):
            evolve(BosonicPolynomial.from_ops("0"), space, space.vacuum(), 1.0)

    def test_rejects_unnormalized_state(self):
        space = FockSpace(modes=(0,), cutoff=3)
        with pytest.raises(ValueError):
            evolve(number(0), space, 2.0 * space.vacuum(), 1.0)


class TestSpdcSqueezing:
    def test_recovers_closed_form_r(self):
        params = params_with(theta=0.05)
        cfg = EvolutionConfig(n_max=16, t_final=4.0, steps=8, pump=1.0)
        pair = spdc_squeezing(params, cfg)
        assert pair.correct == pytest.approx(0.2, abs=1e-4)
        assert pair.truncation_safe

    def test_r_linear_in_theta(self):
        cfg = EvolutionConfig(n_max=16, t_final=2.0, steps=6, pump=1.0)
        r1 = spdc_squeezing(params_with(theta=0.05), cfg).correct
        r2 = spdc_squeezing(params_with(theta=0.10), cfg).correct
        assert r2 / r1 == pytest.approx(2.0, abs=1e-6)

    def test_wrong_scheme_doubles_r(self):
        params = params_with(theta=0.05)
        cfg = EvolutionConfig(n_max=16, t_final=3.0, steps=8, pump=1.0)
        pair = spdc_squeezing(params, cfg)
        assert abs(pair.ratio) == pytest.approx(2.0, abs=1e-6)

    def test_pair_production_symmetry(self):
        g, t = 0.7, 0.35
        space = FockSpace(modes=(0, 1), cutoff=14)
        res = evolve(two_mode_squeezer(g), space, space.vacuum(), t, steps=7)
        for state in res.states:
            n_a = occupation_expectation(space, state, 0)
            n_b = occupation_expectation(space, state, 1)
            assert n_a == pytest.approx(n_b, abs=1e-8)

    def test_quantum_pump_agrees_with_parametric_limit(self):
        params = params_with(theta=0.02)
        beta = 2.0  # matches the quantum-pump default amplitude
        cfg_q = EvolutionConfig(n_max=6, t_final=1.0, steps=5, pump="quantum")
        cfg_c = EvolutionConfig(n_max=6, t_final=1.0, steps=5, pump=beta)
        r_quantum = spdc_squeezing(params, cfg_q).correct
        r_classical = spdc_squeezing(params, cfg_c).correct
        # undepleted regime: agreement at the percent level, not exact
        assert r_quantum == pytest.approx(r_classical, rel=0.05)


class TestFrequencyConversion:
    def test_complete_conversion_at_half_period(self):
        g = 0.2
        params = params_with(theta=g)
        cfg = EvolutionConfig(n_max=4, t_final=(pi / 2) / g, steps=8, pump=1.0)
        pair = frequency_conversion(params, cfg)
        assert pair.correct == pytest.approx(1.0, abs=1e-9)

    def test_zero_coupling_never_converts(self):
        params = InteractionParams(theta=0.0, delta_k=0.0, delta=0.0, phi=1.0)
        cfg = EvolutionConfig(n_max=4, t_final=3.0, steps=4, pump=1.0)
        pair = frequency_conversion(params, cfg)
        assert pair.correct == pytest.approx(0.0, abs=1e-12)

    def test_rabi_law(self):
        g = 0.3
        params = params_with(theta=g)
        t = 0.8
        cfg = EvolutionConfig(n_max=4, t_final=t, steps=4, pump=1.0)
        pair = frequency_conversion(params, cfg)
        assert pair.correct == pytest.approx(np.sin(g * t) ** 2, abs=1e-10)
        assert pair.wrong == pytest.approx(np.sin(2 * g * t) ** 2, abs=1e-10)

    def test_small_t_ratio_approaches_four(self):
        g = 1.0
        params = params_with(theta=g)
        cfg = EvolutionConfig(n_max=4, t_final=0.01, steps=2, pump=1.0)
        pair = frequency_conversion(params, cfg)
        assert pair.ratio == pytest.approx(4.0, abs=1e-3)

    def test_excitation_conserved(self):
        space = FockSpace(modes=(0, 1), cutoff=3)
        res = evolve(beamsplitter(0.9), space, space.basis_state([1, 0]), 1.7, steps=9)
        for state in res.states:
            total = (occupation_expectation(space, state, 0)
                     + occupation_expectation(space, state, 1))
            assert total == pytest.approx(1.0, abs=1e-8)


class TestSeries:
    def test_conversion_series_shape_and_endpoints(self):
        params = params_with(theta=0.2)
        cfg = EvolutionConfig(n_max=4, t_final=1.0, steps=5, pump=1.0)
        rows = conversion_series(params, cfg)
        assert len(rows) == 6
        assert rows[0][1] == pytest.approx(0.0, abs=1e-12)
        assert rows[-1][1] == pytest.approx(np.sin(0.2) ** 2, abs=1e-10)

    def test_squeezing_series_monotone(self):
        params = params_with(theta=0.1)
        cfg = EvolutionConfig(n_max=12, t_final=1.5, steps=5, pump=1.0)
        rows = squeezing_series(params, cfg)
        values = [r[1] for r in rows]
        assert values == sorted(values)
        assert all(w >= c for _, c, w in rows[1:])


class TestCompareSchemes:
    def test_coefficient_order_two(self):
        report = compare_schemes("coefficient", 2)
        assert report.passed
        assert report.ratio == pytest.approx(-2.0, abs=1e-12)

    def test_coefficient_order_three(self):
        report = compare_schemes("coefficient", 3)
        assert report.passed
        assert report.ratio == pytest.approx(-3.0, abs=1e-12)

    def test_conversion_ratio_four(self):
        report = compare_schemes("conversion", 2)
        assert report.passed
        assert report.ratio == pytest.approx(4.0, abs=1e-3)

    def test_squeezing_ratio_two(self):
        report = compare_schemes("squeezing", 2)
        assert report.passed
        assert report.ratio == pytest.approx(2.0, abs=1e-4)

    def test_ratio_invariant_under_theta_rescaling(self):
        for scale in (0.1, 10.0):
            params = params_with(theta=0.05 * scale)
            cfg = EvolutionConfig(n_max=16, t_final=0.2 / abs(params.theta), steps=6)
            report = compare_schemes("squeezing", 2, params=params, cfg=cfg)
            assert report.ratio == pytest.approx(2.0, abs=1e-4)

    def test_unknown_observable(self):
        with pytest.raises(ValueError):
            compare_schemes("wigner", 2)

    def test_report_serializable(self):
        doc = compare_schemes("coefficient", 2).to_dict()
        assert doc["passed"] is True
        assert doc["expected_ratio"] == -2.0


class TestCoherentState:
    def test_mean_occupation(self):
        space = FockSpace(modes=(0,), cutoff=30)
        psi = coherent_state(space, 0, 1.5)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
        assert occupation_expectation(space, psi, 0) == pytest.approx(1.5**2, abs=1e-6)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EvolutionConfig(n_max=1)
        with pytest.raises(ValueError):
            EvolutionConfig(steps=0)
        with pytest.raises(ValueError):
            EvolutionConfig(pump="semiclassical")
