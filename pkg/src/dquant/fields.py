"""Operator-valued field expansions on the discrete wavevector grid.

A :class:`FieldOperator` maps integer grid indices m (wavevector k = w*m)
to operator coefficients with respect to the continuum-normalized plane
waves phi_k(z) = (2*pi)**-0.5 * exp(i k z). In that basis

* the expansion coefficient of mode (J, m) is sqrt(hbar*omega/2) * sqrt(w)
  times the transverse profile amplitude,
* a pointwise product of fields convolves coefficients with one extra
  factor (2*pi)**-0.5 per multiplication,
* integrating a product of fields over the box picks the zero-frequency
  component times (2*pi)**-0.5 * l_box, and over a centred region of length
  L contributes (2*pi)**-0.5 * L * sinc(k L / 2) per component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .boson_algebra import BosonicPolynomial, annihilation, creation, degree
from .modes import ModeSet
from .susceptibility import SusceptibilityTensor
from .units import UnitSystem


def sinc(x: float) -> float:
    """Unnormalized sinc: sin(x)/x with exact zeros at nonzero multiples of pi."""
    y = x / pi
    if y == int(y):
        return 1.0 if y == 0 else 0.0
    return float(np.sinc(y))


@dataclass
class FieldOperator:
    """Fourier-component map of one (possibly composite) field."""

    components: dict
    w: float
    kind: str = "derived"
    #: coefficient norms of components dropped by a basis restriction
    leakage: dict = field(default_factory=dict)

    def k(self, m: int) -> float:
        return self.w * m

    def wavevectors(self) -> list[int]:
        return sorted(self.components)

    def component(self, m: int) -> BosonicPolynomial:
        return self.components.get(m, BosonicPolynomial.zero())

    def __add__(self, other: "FieldOperator") -> "FieldOperator":
        self._check_compatible(other)
        acc = dict(self.components)
        for m, poly in other.components.items():
            acc[m] = acc[m] + poly if m in acc else poly
        return FieldOperator(_prune(acc), self.w, kind=self.kind if self.kind == other.kind else "derived")

    def __rmul__(self, scalar) -> "FieldOperator":
        return FieldOperator({m: scalar * p for m, p in self.components.items()}, self.w,
                             kind=self.kind)

    def __mul__(self, other):
        if np.isscalar(other):
            return self.__rmul__(other)
        self._check_compatible(other)
        acc: dict[int, BosonicPolynomial] = {}
        norm = 1.0 / sqrt(2 * pi)
        for m1, p1 in self.components.items():
            for m2, p2 in other.components.items():
                term = norm * (p1 * p2)
                m = m1 + m2
                acc[m] = acc[m] + term if m in acc else term
        return FieldOperator(_prune(acc), self.w, kind="derived")

    def _check_compatible(self, other: "FieldOperator"):
        if abs(self.w - other.w) > 1e-12 * max(self.w, other.w):
            raise ValueError("field operators live on different wavevector grids")

    def is_hermitian_field(self, tol: float = 1e-12) -> bool:
        """The component at -k must be the dagger of the component at +k."""
        for m, poly in self.components.items():
            if not self.component(-m).isclose(poly.dagger(), tol=tol):
                return False
        return True

    def max_degree(self) -> int:
        return max((degree(p) for p in self.components.values()), default=-1)

    def restrict(self, retained: set[int]) -> "FieldOperator":
        """Drop out-of-basis components, recording their norms as leakage."""
        kept, leaked = {}, dict(self.leakage)
        for m, poly in self.components.items():
            if m in retained:
                kept[m] = poly
            else:
                leaked[m] = leaked.get(m, 0.0) + poly.norm()
        return FieldOperator(kept, self.w, kind=self.kind, leakage=leaked)

    @property
    def leakage_norm(self) -> float:
        return float(np.sqrt(sum(v**2 for v in self.leakage.values())))


def _prune(components: dict) -> dict:
    return {m: p for m, p in components.items() if not p.is_zero}


def expand_fields(ms: ModeSet, units: UnitSystem) -> tuple[FieldOperator, FieldOperator]:
    """Displacement and induction fields of a mode set.

    Per mode: coefficient sqrt(hbar*omega/2)*sqrt(w)*d at +m on the
    annihilation operator, plus the conjugate at -m, and likewise with the
    induction amplitude b. Requires flat profiles (the operator-valued
    Fourier algebra carries no transverse structure).
    """
    if not ms.modes:
        raise ValueError("cannot expand fields of an empty mode set")
    w = ms.w
    d_comp: dict[int, BosonicPolynomial] = {}
    b_comp: dict[int, BosonicPolynomial] = {}
    for mode in ms.modes:
        amp = sqrt(units.hbar * mode.omega / 2.0) * sqrt(w)
        cd = amp * mode.profile.d_value()
        cb = amp * mode.profile.b_value()
        a_op = annihilation(mode.label)
        ad_op = creation(mode.label)
        for comp, c in ((d_comp, cd), (b_comp, cb)):
            plus = c * a_op
            minus = np.conj(c) * ad_op
            comp[mode.m] = comp[mode.m] + plus if mode.m in comp else plus
            comp[-mode.m] = comp[-mode.m] + minus if -mode.m in comp else minus
    return (FieldOperator(d_comp, w, kind="D"), FieldOperator(b_comp, w, kind="B"))


def _scalar_tensor_value(t: SusceptibilityTensor) -> float:
    if t.dim != 1:
        raise ValueError("field-operator contractions support dim=1 tensors only")
    return t.item()


def electric_field_from_D(
    d_field: FieldOperator,
    etas: list[SusceptibilityTensor],
    max_order: int,
    retained_k: set[int] | None = None,
) -> FieldOperator:
    """E = sum_n eta_n D^n as Fourier-space convolutions of coefficients.

    All intermediate products keep every generated component; when
    ``retained_k`` is given, out-of-basis components of the result are
    moved into the field's leakage record rather than silently dropped.
    """
    if max_order > len(etas):
        raise ValueError("not enough eta tensors for the requested order")
    acc: FieldOperator | None = None
    power = d_field
    for n in range(1, max_order + 1):
        coeff = _scalar_tensor_value(etas[n - 1])
        if coeff != 0.0:
            term = coeff * power
            acc = term if acc is None else acc + term
        if n < max_order:
            power = power * d_field
    if acc is None:
        acc = FieldOperator({}, d_field.w, kind="E")
    acc.kind = "E"
    if retained_k is not None:
        acc = acc.restrict(set(retained_k))
        acc.kind = "E"
    return acc


def integrate_density(f: FieldOperator, l_box: float,
                      region_length: float | None = None) -> BosonicPolynomial:
    """Integrate an operator density over the box or a centred region.

    Over the full box only the zero-wavevector component survives (the
    k-grid makes exp(ikz) average to zero exactly); over a top-hat region
    of length L each component picks up sinc(k L / 2).
    """
    if region_length is None:
        return (l_box / sqrt(2 * pi)) * f.component(0)
    total = BosonicPolynomial.zero()
    for m, poly in f.components.items():
        phi = sinc(f.k(m) * region_length / 2.0)
        if phi != 0.0:
            total = total + (region_length / sqrt(2 * pi)) * phi * poly
    return total


def field_power(f: FieldOperator, n: int) -> FieldOperator:
    """n-fold pointwise operator product of a field with itself."""
    if n < 1:
        raise ValueError("power must be >= 1")
    out = f
    for _ in range(n - 1):
        out = out * f
    return out


def vacuum_pair_correlation(ms: ModeSet, dz: float, units: UnitSystem,
                            window=None) -> complex:
    """<0| D(z+dz) D(z) |0> from the mode table, optionally k-windowed.

    Equals sum_m W(k_m) (hbar omega_m / 2) w |d_m|^2 exp(i k_m dz) / (2 pi)
    with W the squared window (1 when absent); a smooth window makes the
    smeared correlator converge under grid refinement. Vectorized so large
    mode sets stay cheap.
    """
    omega = np.array([m.omega for m in ms.modes])
    dvals = np.array([m.profile.d_value() for m in ms.modes])
    k = np.array([m.k for m in ms.modes])
    weights = np.ones_like(k) if window is None else np.abs(window(k)) ** 2
    terms = weights * (units.hbar * omega / 2.0) * ms.w * np.abs(dvals) ** 2 * np.exp(1j * k * dz)
    return complex(np.sum(terms) / (2 * pi))
