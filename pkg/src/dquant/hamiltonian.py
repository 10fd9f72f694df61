"""Hamiltonians of the two quantization routes and their wave-mixing sectors.

The correct route integrates the D-series energy density,
sum_n eta_n D^(n+1) / (n+1); the incorrect route keeps only the linear
constitutive relation E~ = eta1 D inside the chi-series density with its
n/(n+1) weights. For an order-n nonlinearity the resonant coefficients of
the two routes differ by a factor of exactly -n, and the cubic-in-D part
of the quadratic chi-series term restores the difference.

All nonlinear builders work in the resonant (rotating-wave) sector
a_A^dag a_B^dag a_C + H.c. by default; anti-resonant terms are constructed
and counted, never silently lost.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import pi, sqrt

import numpy as np

from .boson_algebra import BosonicPolynomial, number
from .fields import expand_fields, field_power, integrate_density, sinc
from .modes import Mode, ModeSet, flat_profile
from .susceptibility import (
    MediumSpec,
    SusceptibilityTensor,
    check_permutation_symmetry,
    invert_series,
)
from .units import UnitSystem

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
#: generous phase-matching budget: |delta_k| L / 2 below this many radians
MATCHING_BUDGET = 10 * pi


class PermutationSymmetryError(ValueError):
    """The 3! collection of orderings needs a fully symmetric tensor."""


class DegenerateTripleError(ValueError):
    """Degenerate mixing (equal families) changes the combinatorics; rejected."""


class MatchingBudgetError(ValueError):
    """Phase or energy mismatch beyond the stated detuning budget."""


@dataclass(frozen=True)
class ModeTriple:
    """Three phase- and energy-matched modes plus the interaction length."""

    mode_a: Mode
    mode_b: Mode
    mode_c: Mode
    length: float

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("interaction length must be positive")
        families = {self.mode_a.family, self.mode_b.family, self.mode_c.family}
        if len(families) != 3:
            raise DegenerateTripleError(
                "three-wave construction requires three distinct mode families"
            )
        if abs(self.delta_k) * self.length / 2 >= MATCHING_BUDGET:
            logger.warning("triple exceeds the phase-matching budget: |dk| L/2 = %.3g",
                           abs(self.delta_k) * self.length / 2)

    @property
    def delta_k(self) -> float:
        return self.mode_c.k - self.mode_b.k - self.mode_a.k

    @property
    def delta_omega(self) -> float:
        return self.mode_a.omega + self.mode_b.omega - self.mode_c.omega

    def modes(self) -> tuple[Mode, Mode, Mode]:
        return (self.mode_a, self.mode_b, self.mode_c)


@dataclass(frozen=True)
class InteractionParams:
    """Coupling theta, mismatches and the phase-matching amplitude."""

    theta: complex
    delta_k: float
    delta: float
    phi: float

    def __post_init__(self):
        if abs(self.phi) > 1.0 + 1e-12:
            raise ValueError("phase-matching amplitude cannot exceed one")


@dataclass(frozen=True)
class HamiltonianSpec:
    """Assembled linear + nonlinear operator with provenance and audit."""

    linear: BosonicPolynomial
    nonlinear: BosonicPolynomial
    provenance: str
    order: int
    dropped_terms: int = 0
    dropped_norm: float = 0.0

    def __post_init__(self):
        if self.provenance not in (
            "D-based", "E-based-wrong", "E-based-corrected", "interaction-picture",
        ):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for part, name in ((self.linear, "linear"), (self.nonlinear, "nonlinear")):
            if not part.is_hermitian(HERMITICITY_TOL):
                raise ValueError(f"{name} part is not Hermitian")
        for key in self.linear.terms:
            if any(c != a for _, c, a in key):
                raise ValueError("linear part must be diagonal in the number basis")

    @property
    def total(self) -> BosonicPolynomial:
        return self.linear + self.nonlinear


def build_linear(ms: ModeSet, units: UnitSystem) -> BosonicPolynomial:
    """Diagonal free Hamiltonian sum_m hbar omega_m n_m (zero point dropped)."""
    h = BosonicPolynomial.zero()
    for mode in ms.modes:
        h = h + (units.hbar * mode.omega) * number(mode.label)
    return h


def linear_from_energy_density(
    ms: ModeSet, eta1: SusceptibilityTensor, units: UnitSystem
) -> BosonicPolynomial:
    """Evaluate integral of B^2/(2 mu0) + eta1 D^2 / 2 and drop the constant.

    For a mode set solving the dispersion of the same eta1 this reproduces
    :func:`build_linear` exactly; it is the quadratic-form cross-check.
    """
    d_field, b_field = expand_fields(ms, units)
    density = (1.0 / (2 * units.mu0)) * (b_field * b_field) + (
        eta1.item() / 2.0
    ) * (d_field * d_field)
    h = integrate_density(density, ms.l_box)
    return h - BosonicPolynomial.identity(h.coefficient({}))


# ---------------------------------------------------------------------------
# cubic three-wave builders (ordered-leg expansion with transverse overlaps)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Leg:
    family: str
    label: int
    k: float
    amplitude: complex
    profile_samples: np.ndarray
    weights: np.ndarray
    is_creation: bool
    op: BosonicPolynomial


def _field_legs(modes, ms: ModeSet, units: UnitSystem, scale: float = 1.0) -> list[_Leg]:
    """Both legs (annihilation at +k, creation at -k) of each mode's field."""
    from .boson_algebra import annihilation, creation

    legs = []
    for mode in modes:
        amp = scale * sqrt(units.hbar * mode.omega / 2.0) * sqrt(ms.w)
        legs.append(_Leg(mode.family, mode.label, mode.k, amp * 1.0,
                         mode.profile.d, mode.profile.weights, False,
                         annihilation(mode.label)))
        legs.append(_Leg(mode.family, mode.label, -mode.k, np.conj(amp),
                         np.conj(mode.profile.d), mode.profile.weights, True,
                         creation(mode.label)))
    return legs


def _cubic_hamiltonian(
    legs: list[_Leg],
    tensor_value,
    prefactor: float,
    length: float,
    resonant_families: tuple[str, str, str],
):
    """Sum over ordered leg triples of the cubic density integral.

    Returns (resonant, anti_resonant) polynomials; the resonant sector is
    the leg content {A^dag, B^dag, C} and its conjugate.
    """
    fam_a, fam_b, fam_c = resonant_families
    res_content = frozenset([(fam_a, True), (fam_b, True), (fam_c, False)])
    conj_content = frozenset([(fam_a, False), (fam_b, False), (fam_c, True)])
    resonant = BosonicPolynomial.zero()
    anti = BosonicPolynomial.zero()
    for l1 in legs:
        for l2 in legs:
            for l3 in legs:
                if not np.array_equal(l1.weights, l2.weights) or not np.array_equal(
                    l1.weights, l3.weights
                ):
                    raise ValueError("leg profiles must share a transverse grid")
                overlap = np.dot(
                    l1.weights,
                    tensor_value * l1.profile_samples * l2.profile_samples * l3.profile_samples,
                )
                k_total = l1.k + l2.k + l3.k
                z_factor = length * sinc(k_total * length / 2.0) / (2 * pi) ** 1.5
                coeff = prefactor * l1.amplitude * l2.amplitude * l3.amplitude
                coeff = coeff * overlap * z_factor
                if coeff == 0.0:
                    continue
                term = coeff * (l1.op * l2.op * l3.op)
                content = frozenset(
                    (leg.family, leg.is_creation) for leg in (l1, l2, l3)
                )
                if content == res_content or content == conj_content:
                    resonant = resonant + term
                else:
                    anti = anti + term
    return resonant, anti


def _triple_modes_in(ms: ModeSet, triple: ModeTriple) -> list[Mode]:
    modes = []
    for mode in triple.modes():
        if mode.label not in ms.labels():
            raise ValueError(f"triple mode {mode.label} is not part of the mode set")
        modes.append(mode)
    return modes


def _require_symmetric(tensor: SusceptibilityTensor):
    ok, dev = check_permutation_symmetry(tensor)
    if not ok:
        raise PermutationSymmetryError(
            f"tensor breaks full permutation symmetry by {dev:.3e}; "
            "the 3! collection of orderings would be invalid"
        )


def build_nonlinear_D(
    ms: ModeSet,
    eta2: SusceptibilityTensor,
    triple: ModeTriple,
    units: UnitSystem,
    resonant_only: bool = True,
):
    """(1/3) integral eta2 D^3 reduced to the three-wave sector.

    The six orderings of the distinct legs collect into an overall factor
    3!/3 = 2 on the mode-overlap integral.
    """
    _require_symmetric(eta2)
    modes = _triple_modes_in(ms, triple)
    legs = _field_legs(modes, ms, units)
    families = (triple.mode_a.family, triple.mode_b.family, triple.mode_c.family)
    resonant, anti = _cubic_hamiltonian(
        legs, eta2.item(), 1.0 / 3.0, triple.length, families
    )
    if resonant_only:
        _audit_dropped(anti, "D-based")
        return resonant
    return resonant + anti


def build_nonlinear_E_wrong(
    ms: ModeSet,
    chi2: SusceptibilityTensor,
    eta1: SusceptibilityTensor,
    triple: ModeTriple,
    units: UnitSystem,
    resonant_only: bool = True,
):
    """(2/3) eps0 integral chi2 E~^3 with E~ = eta1 D kept (wrongly) linear.

    Equals -(2/3) integral eta2 D^3 in the resonant sector: wrong sign and
    twice the magnitude of :func:`build_nonlinear_D`.
    """
    _require_symmetric(chi2)
    modes = _triple_modes_in(ms, triple)
    legs = _field_legs(modes, ms, units, scale=eta1.item())
    families = (triple.mode_a.family, triple.mode_b.family, triple.mode_c.family)
    resonant, anti = _cubic_hamiltonian(
        legs, units.eps0 * chi2.item(), 2.0 / 3.0, triple.length, families
    )
    if resonant_only:
        _audit_dropped(anti, "E-based-wrong")
        return resonant
    return resonant + anti


def quadratic_E_correction(
    eta1: SusceptibilityTensor,
    eta2: SusceptibilityTensor,
    ms: ModeSet,
    triple: ModeTriple,
    units: UnitSystem,
    resonant_only: bool = True,
):
    """Cubic-in-D part of eps0 (1 + chi1) E_full^2 / 2 with E_full = eta1 D + eta2 D^2.

    The cross terms give exactly +1 * integral eta2 D^3, which added to the
    wrong Hamiltonian restores the correct one.
    """
    _require_symmetric(eta2)
    modes = _triple_modes_in(ms, triple)
    legs = _field_legs(modes, ms, units)
    families = (triple.mode_a.family, triple.mode_b.family, triple.mode_c.family)
    # eps0 (1 + chi1) eta1 = 1 written out through the given eta1
    one_plus_chi1 = 1.0 / (units.eps0 * eta1.item())
    factor = units.eps0 * one_plus_chi1 * eta1.item() * eta2.item()
    resonant, anti = _cubic_hamiltonian(legs, factor, 1.0, triple.length, families)
    if resonant_only:
        _audit_dropped(anti, "quadratic-E correction")
        return resonant
    return resonant + anti


def _audit_dropped(anti: BosonicPolynomial, provenance: str):
    if anti.terms:
        logger.debug(
            "%s: filtered %d anti-resonant terms (norm %.3e)",
            provenance, len(anti.terms), anti.norm(),
        )


def resonant_coefficient(poly: BosonicPolynomial, triple: ModeTriple) -> complex:
    """Coefficient of a_A^dag a_B^dag a_C in a three-wave Hamiltonian."""
    return poly.coefficient(
        {
            triple.mode_a.label: (1, 0),
            triple.mode_b.label: (1, 0),
            triple.mode_c.label: (0, 1),
        }
    )


# ---------------------------------------------------------------------------
# order-n comparison of the two routes
# ---------------------------------------------------------------------------


def prefactor_ratio(order: int) -> Fraction:
    """(wrong / correct) resonant-coefficient ratio for a pure order-n medium."""
    if order < 2:
        raise ValueError("the routes differ only for nonlinear orders n >= 2")
    return Fraction(-order, 1)


def _pure_order_modeset(order: int, chi1: float, units: UnitSystem) -> tuple[ModeSet, dict]:
    """n signal modes at m = 1..n plus the matched pump at m = n(n+1)/2."""
    n_index = sqrt(1.0 + chi1)
    l_box = 2 * pi
    w = 1.0
    modes = []
    for i in range(1, order + 1):
        k = w * i
        omega = units.c * k / n_index
        modes.append(Mode(label=i - 1, family=f"W{i}", m=i, k=k, omega=omega,
                          profile=flat_profile(n_index, omega, k, units)))
    m_pump = order * (order + 1) // 2
    k_pump = w * m_pump
    omega_pump = units.c * k_pump / n_index
    modes.append(Mode(label=order, family="P", m=m_pump, k=k_pump, omega=omega_pump,
                      profile=flat_profile(n_index, omega_pump, k_pump, units)))
    ms = ModeSet(modes=tuple(modes), l_box=l_box)
    monomial = {i: (1, 0) for i in range(order)}
    monomial[order] = (0, 1)
    return ms, monomial


def scheme_resonant_coefficients(order: int, chi1: float = 0.5,
                                 chi_n: float = 0.37,
                                 units: UnitSystem | None = None) -> tuple[complex, complex]:
    """Resonant (correct, wrong) coefficients of a pure order-n medium.

    A pure order-n scalar medium (all intermediate nonlinear orders zero)
    drives an (n+1)-wave process with n signal modes and one pump; the
    coefficients of a_1^dag .. a_n^dag a_pump in the two energy densities
    are extracted from the exact operator power D^(n+1).
    """
    if order < 2:
        raise ValueError("the routes differ only for nonlinear orders n >= 2")
    units = units or UnitSystem()
    chis = [chi1] + [0.0] * (order - 2) + [chi_n]
    medium = MediumSpec.from_scalars(chis, units=units)
    etas = invert_series(medium, order)
    eta1 = etas[0].item()
    eta_n = etas[order - 1].item()

    ms, monomial = _pure_order_modeset(order, chi1, units)
    d_field, _ = expand_fields(ms, units)
    d_power = field_power(d_field, order + 1)
    base = integrate_density(d_power, ms.l_box)

    correct = (eta_n / (order + 1)) * base
    e_tilde_power = (eta1 ** (order + 1)) * base
    wrong = (order / (order + 1)) * units.eps0 * chi_n * e_tilde_power

    c_correct = correct.coefficient(monomial)
    c_wrong = wrong.coefficient(monomial)
    if c_correct == 0:
        raise RuntimeError("resonant coefficient vanished; mode construction broken")
    return c_correct, c_wrong


def constructed_prefactor_ratio(order: int, chi1: float = 0.5,
                                chi_n: float = 0.37,
                                units: UnitSystem | None = None) -> complex:
    """Measure the wrong/correct ratio by building both Hamiltonians."""
    c_correct, c_wrong = scheme_resonant_coefficients(order, chi1, chi_n, units)
    return c_wrong / c_correct


# ---------------------------------------------------------------------------
# interaction picture
# ---------------------------------------------------------------------------


def build_interaction(
    triple: ModeTriple,
    profiles,
    eta2: SusceptibilityTensor,
    units: UnitSystem,
) -> tuple[InteractionParams, BosonicPolynomial]:
    """Single-wavevector interaction Hamiltonian theta * Phi * a_A^dag a_B^dag a_C + H.c.

    theta = 2 L sqrt(prod hbar omega / 4 pi) * integral eta2 dA* dB* dC over
    the shared transverse grid; Phi = sinc(delta_k L / 2). The frequency
    mismatch is exposed for the dynamics layer (the builder itself is the
    t = 0 snapshot of the e^(i Delta t) phase).
    """
    _require_symmetric(eta2)
    p_a, p_b, p_c = profiles
    if not (np.array_equal(p_a.x, p_b.x) and np.array_equal(p_a.x, p_c.x)):
        raise ValueError("interaction profiles must share a transverse grid")
    length = triple.length
    delta_k = triple.delta_k
    if abs(delta_k) * length / 2 >= MATCHING_BUDGET:
        raise MatchingBudgetError(
            f"|delta_k| L/2 = {abs(delta_k) * length / 2:.3g} exceeds the budget"
        )
    overlap = complex(
        np.dot(p_a.weights, eta2.item() * np.conj(p_a.d) * np.conj(p_b.d) * p_c.d)
    )
    omegas = (triple.mode_a.omega, triple.mode_b.omega, triple.mode_c.omega)
    theta = 2.0 * length * sqrt(
        units.hbar * omegas[0] / (4 * pi)
        * units.hbar * omegas[1] / (4 * pi)
        * units.hbar * omegas[2] / (4 * pi)
    ) * overlap
    phi = sinc(delta_k * length / 2.0)
    params = InteractionParams(theta=theta, delta_k=delta_k,
                               delta=triple.delta_omega, phi=phi)
    term = BosonicPolynomial.monomial(
        {
            triple.mode_a.label: (1, 0),
            triple.mode_b.label: (1, 0),
            triple.mode_c.label: (0, 1),
        },
        coeff=theta * phi,
    )
    return params, term + term.dagger()


def phase_matching_curve(length: float, delta_k_grid) -> list[tuple[float, float]]:
    """|Phi|^2 = sinc^2(delta_k L / 2) tabulated over a wavevector-mismatch grid."""
    if length <= 0:
        raise ValueError("interaction length must be positive")
    return [(float(dk), sinc(dk * length / 2.0) ** 2) for dk in np.asarray(delta_k_grid)]


# ---------------------------------------------------------------------------
# convenience constructions
# ---------------------------------------------------------------------------


def make_three_wave_modes(
    m_a: int,
    m_b: int,
    n_index: float,
    l_box: float,
    units: UnitSystem,
    length: float | None = None,
) -> tuple[ModeSet, ModeTriple]:
    """Exactly matched uniform-medium triple: k_C = k_A + k_B on the box grid.

    The linear dispersion omega = c k / n makes energy matching automatic.
    """
    if m_a <= 0 or m_b <= 0 or m_a == m_b:
        raise ValueError("signal indices must be positive and distinct")
    w = 2 * pi / l_box
    modes = []
    for label, (family, m) in enumerate(
        [("A", m_a), ("B", m_b), ("C", m_a + m_b)]
    ):
        k = w * m
        omega = units.c * k / n_index
        modes.append(Mode(label=label, family=family, m=m, k=k, omega=omega,
                          profile=flat_profile(n_index, omega, k, units)))
    ms = ModeSet(modes=tuple(modes), l_box=l_box)
    triple = ModeTriple(mode_a=modes[0], mode_b=modes[1], mode_c=modes[2],
                        length=length if length is not None else l_box)
    return ms, triple


def assemble(
    ms: ModeSet,
    medium: MediumSpec,
    triple: ModeTriple,
    scheme: str,
    units: UnitSystem,
) -> HamiltonianSpec:
    """Linear plus three-wave nonlinear Hamiltonian with provenance and audit."""
    linear = build_linear(ms, units)
    etas = invert_series(medium, 2)
    if scheme == "interaction-picture":
        profiles = tuple(m.profile for m in triple.modes())
        _, nonlinear = build_interaction(triple, profiles, etas[1], units)
        return HamiltonianSpec(linear=linear, nonlinear=nonlinear, provenance=scheme,
                               order=medium.highest_order)

    builders = {
        "D-based": lambda only: build_nonlinear_D(ms, etas[1], triple, units,
                                                  resonant_only=only),
        "E-based-wrong": lambda only: build_nonlinear_E_wrong(
            ms, medium.chi(2), etas[0], triple, units, resonant_only=only),
        "E-based-corrected": lambda only: build_nonlinear_E_wrong(
            ms, medium.chi(2), etas[0], triple, units, resonant_only=only)
        + quadratic_E_correction(etas[0], etas[1], ms, triple, units, resonant_only=only),
    }
    if scheme not in builders:
        raise ValueError(f"unknown scheme {scheme!r}")
    resonant = builders[scheme](True)
    dropped = builders[scheme](False) - resonant
    return HamiltonianSpec(linear=linear, nonlinear=resonant, provenance=scheme,
                           order=medium.highest_order,
                           dropped_terms=len(dropped.terms), dropped_norm=dropped.norm())
