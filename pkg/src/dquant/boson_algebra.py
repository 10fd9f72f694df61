"""Exact multi-mode bosonic operator polynomials and their Fock-space matrices.

A polynomial is stored as a map from normally-ordered monomials to complex
coefficients. A monomial is a sorted tuple of ``(mode, cre, ann)`` triples,
one per participating mode; the empty tuple is the identity. Products are
reordered exactly with the per-mode identity

    a^p (a†)^q = sum_k k! C(p,k) C(q,k) (a†)^(q-k) a^(p-k),

so every polynomial handed out by the algebra is already in canonical form.
Coefficients are complex doubles; terms below ``PRUNE_TOL`` are dropped to
keep term counts bounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

#: absolute coefficient threshold below which a term is discarded
PRUNE_TOL = 1e-15

#: tolerance for Hermiticity checks on Hamiltonians
HERMITICITY_TOL = 1e-12

Monomial = tuple  # tuple[(mode, cre, ann), ...] sorted by mode


class NotHermitianError(ValueError):
    """Raised when a Hamiltonian fails its Hermiticity precondition."""


def _merge_mode(entries: Iterable[tuple[int, int, int]]) -> Monomial:
    return tuple((m, c, a) for m, c, a in entries if c or a)


class BosonicPolynomial:
    """Normally-ordered polynomial in multi-mode ladder operators."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, complex] | None = None, prune: bool = True):
        self.terms: dict[Monomial, complex] = {}
        if terms:
            for key, coef in terms.items():
                coef = complex(coef)
                if not prune or abs(coef) > PRUNE_TOL:
                    self.terms[key] = coef

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls) -> "BosonicPolynomial":
        return cls()

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "BosonicPolynomial":
        return cls({(): complex(coeff)})

    @classmethod
    def monomial(cls, powers: Mapping[int, tuple[int, int]], coeff: complex = 1.0):
        key = _merge_mode((m, c, a) for m, (c, a) in sorted(powers.items()))
        return cls({key: complex(coeff)})

    @classmethod
    def from_ops(cls, ops: str, coeff: complex = 1.0) -> "BosonicPolynomial":
        """Build from a left-to-right operator string, e.g. ``"1^ 0"`` = ad(1) a(0).

        The factors are multiplied in the given order, so the result comes
        out normally ordered whatever order the string uses.
        """
        out = cls.identity(coeff)
        for token in ops.split():
            if token.endswith("^"):
                out = out * creation(int(token[:-1]))
            else:
                out = out * annihilation(int(token))
        return out

    # -- algebra ------------------------------------------------------
    def __add__(self, other):
        other = _as_poly(other)
        acc = dict(self.terms)
        for key, coef in other.terms.items():
            acc[key] = acc.get(key, 0.0) + coef
        return BosonicPolynomial(acc)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return self + (-1.0) * _as_poly(other)

    def __rsub__(self, other):
        return _as_poly(other) + (-1.0) * self

    def __neg__(self):
        return (-1.0) * self

    def __rmul__(self, scalar):
        return BosonicPolynomial({k: scalar * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if np.isscalar(other):
            return BosonicPolynomial({k: other * v for k, v in self.terms.items()})
        acc: dict[Monomial, complex] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                base = c1 * c2
                for key, weight in _reorder_product(k1, k2):
                    acc[key] = acc.get(key, 0.0) + base * weight
        return BosonicPolynomial(acc)

    def dagger(self) -> "BosonicPolynomial":
        """Hermitian conjugate; stays normally ordered term by term."""
        return BosonicPolynomial(
            {tuple((m, a, c) for m, c, a in key): np.conj(v) for key, v in self.terms.items()}
        )

    # -- queries ------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, powers: Mapping[int, tuple[int, int]]) -> complex:
        key = _merge_mode((m, c, a) for m, (c, a) in sorted(powers.items()))
        return self.terms.get(key, 0.0 + 0.0j)

    def modes(self) -> set[int]:
        return {m for key in self.terms for m, _, _ in key}

    def norm(self) -> float:
        """L2 norm of the coefficient vector."""
        if not self.terms:
            return 0.0
        return float(np.sqrt(sum(abs(v) ** 2 for v in self.terms.values())))

    def max_abs_coeff(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def isclose(self, other, tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= tol for k in keys)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return self.isclose(self.dagger(), tol=tol)

    def __repr__(self):
        n = len(self.terms)
        return f"BosonicPolynomial({n} term{'s' if n != 1 else ''}, degree {degree(self)})"

    def dump(self) -> str:
        """Deterministic text form, one line per term, for golden comparisons."""
        if not self.terms:
            return "0"
        lines = []
        for key in sorted(self.terms, key=_sort_key):
            coef = self.terms[key]
            ops = " ".join(
                " ".join(filter(None, [f"ad({m})^{c}" if c else "", f"a({m})^{a}" if a else ""]))
                for m, c, a in key
            )
            body = f"({coef.real:+.12e}{coef.imag:+.12e}j)"
            lines.append(body if not ops else f"{body} * {ops}")
        return "\n".join(lines)


def _sort_key(key: Monomial):
    return (sum(c + a for _, c, a in key), key)


def _as_poly(x) -> BosonicPolynomial:
    if isinstance(x, BosonicPolynomial):
        return x
    if np.isscalar(x):
        return BosonicPolynomial.identity(x)
    raise TypeError(f"cannot interpret {x!r} as a bosonic polynomial")


def _reorder_product(k1: Monomial, k2: Monomial):
    """All normally-ordered monomials of k1*k2 with combinatorial weights."""
    d1 = {m: (c, a) for m, c, a in k1}
    d2 = {m: (c, a) for m, c, a in k2}
    modes = sorted(set(d1) | set(d2))
    options = []
    for m in modes:
        c1, a1 = d1.get(m, (0, 0))
        c2, a2 = d2.get(m, (0, 0))
        choices = []
        for k in range(min(a1, c2) + 1):
            weight = factorial(k) * comb(a1, k) * comb(c2, k)
            choices.append(((m, c1 + c2 - k, a1 + a2 - k), weight))
        options.append(choices)
    for combo in product(*options):
        key = _merge_mode(entry for entry, _ in combo)
        weight = 1
        for _, w in combo:
            weight *= w
        yield key, weight


def creation(mode: int) -> BosonicPolynomial:
    return BosonicPolynomial.monomial({mode: (1, 0)})


def annihilation(mode: int) -> BosonicPolynomial:
    return BosonicPolynomial.monomial({mode: (0, 1)})


def number(mode: int) -> BosonicPolynomial:
    return BosonicPolynomial.monomial({mode: (1, 1)})


def normal_order(p) -> BosonicPolynomial:
    """Canonical normally-ordered form.

    Accepts a polynomial (idempotent: terms are already canonical, zeros are
    pruned), an operator string like ``"0 0^"``, or a sequence of
    ``(mode, is_creation)`` factors which are multiplied left to right.
    """
    if isinstance(p, BosonicPolynomial):
        return BosonicPolynomial(p.terms)
    if isinstance(p, str):
        return BosonicPolynomial.from_ops(p)
    out = BosonicPolynomial.identity()
    for mode, is_creation in p:
        out = out * (creation(mode) if is_creation else annihilation(mode))
    return out


def commutator(p: BosonicPolynomial, q: BosonicPolynomial) -> BosonicPolynomial:
    return p * q - q * p


def heisenberg_derivative(
    o: BosonicPolynomial, h: BosonicPolynomial, hbar: float = 1.0
) -> BosonicPolynomial:
    """dO/dt = [O, H] / (i hbar) for a Hermitian generator."""
    if not h.is_hermitian():
        raise NotHermitianError("Hamiltonian not Hermitian")
    return (-1j / hbar) * commutator(o, h)


def degree(p: BosonicPolynomial) -> int:
    """Max total operator power; -1 for the zero polynomial."""
    if not p.terms:
        return -1
    return max(sum(c + a for _, c, a in key) for key in p.terms)


@dataclass(frozen=True)
class FockSpace:
    """Truncated multi-mode number basis with cached sparse ladder matrices.

    ``cutoff`` is the max occupation per mode (same for all modes when an
    int). Basis states enumerate occupations row-major with the first mode
    slowest, matching the kron order of the operator matrices.
    """

    modes: tuple
    cutoff: int | Mapping[int, int] = 2
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if len(set(self.modes)) != len(self.modes):
            raise ValueError("mode labels must be unique")

    def n_max(self, mode: int) -> int:
        if isinstance(self.cutoff, Mapping):
            return int(self.cutoff[mode])
        return int(self.cutoff)

    @property
    def dim(self) -> int:
        d = 1
        for m in self.modes:
            d *= self.n_max(m) + 1
        return d

    def occupations(self) -> np.ndarray:
        """(dim, n_modes) array of basis-state occupation numbers."""
        if "occ" not in self._cache:
            grids = np.meshgrid(
                *[np.arange(self.n_max(m) + 1) for m in self.modes], indexing="ij"
            )
            occ = np.stack([g.ravel() for g in grids], axis=1) if grids else np.zeros((1, 0))
            self._cache["occ"] = occ
        return self._cache["occ"]

    def index(self, occs: Sequence[int]) -> int:
        idx = 0
        for m, n in zip(self.modes, occs):
            if not 0 <= n <= self.n_max(m):
                raise ValueError(f"occupation {n} outside cutoff for mode {m}")
            idx = idx * (self.n_max(m) + 1) + n
        return idx

    def basis_state(self, occs: Sequence[int]) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=complex)
        psi[self.index(occs)] = 1.0
        return psi

    def vacuum(self) -> np.ndarray:
        return self.basis_state([0] * len(self.modes))

    def _local_ladders(self, mode: int) -> tuple[np.ndarray, np.ndarray]:
        n = self.n_max(mode)
        a = np.diag(np.sqrt(np.arange(1, n + 1)), k=1)
        return a.T, a  # (creation, annihilation)

    def annihilation_matrix(self, mode: int) -> sp.csr_matrix:
        key = ("a", mode)
        if key not in self._cache:
            self._cache[key] = to_matrix(annihilation(mode), self)
        return self._cache[key]


def to_matrix(p: BosonicPolynomial, space: FockSpace) -> sp.csr_matrix:
    """Matrix of p in the truncated number basis.

    Exact on the subspace whose occupations stay at least degree(p) below
    every cutoff; edge states feel the truncation.
    """
    unknown = p.modes() - set(space.modes)
    if unknown:
        raise KeyError(f"polynomial uses modes {sorted(unknown)} absent from the space")
    dim = space.dim
    total = sp.csr_matrix((dim, dim), dtype=complex)
    locals_ = {m: space._local_ladders(m) for m in space.modes}
    for key, coef in p.terms.items():
        powers = {m: (c, a) for m, c, a in key}
        mat = sp.identity(1, dtype=complex, format="csr")
        for m in space.modes:
            c, a = powers.get(m, (0, 0))
            ad_loc, a_loc = locals_[m]
            local = np.linalg.matrix_power(ad_loc, c) @ np.linalg.matrix_power(a_loc, a)
            mat = sp.kron(mat, sp.csr_matrix(local), format="csr")
        total = total + coef * mat
    return total.tocsr()


def interior_indices(space: FockSpace, margin: int) -> np.ndarray:
    """Basis indices whose occupations are all <= n_max - margin."""
    occ = space.occupations()
    limits = np.array([space.n_max(m) - margin for m in space.modes])
    return np.nonzero(np.all(occ <= limits, axis=1))[0]
