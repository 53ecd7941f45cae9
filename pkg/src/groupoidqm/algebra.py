"""The convolution *-algebra of a measured groupoid and its left-regular action.

Elements are complex functions on the morphisms.  With a measure μ (fiber
weights ν, modular ratios δ) the operations are

    (f ⋆ g)(α) = Σ_{β ∈ G^{t(α)}} f(β) · g(β⁻¹∘α) · ν^{t(α)}(β)
    f*(α)      = δ(α)⁻¹ · conj(f(α⁻¹))

and the left-regular representation π(f)ψ = f⋆ψ acts on L²(G, μ) with inner
product ⟨ψ, χ⟩ = Σ_α conj(ψ(α)) χ(α) μ(α).  On a pair groupoid with counting
measure the basis map δ_(j,k) -> e_jk identifies everything with the full
matrix algebra.

Values may be ints, Fractions, floats or complex; with rational inputs the
algebraic identities are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .eigen import hermitian_defect, hermitian_eigh
from .groupoid import FiniteGroupoid, GroupoidError
from .measure import GroupoidMeasure

PSD_TOL = 1e-10


class NormalizationError(GroupoidError):
    """A state vector family is not normalized."""


class AlgebraElement:
    """A complex-valued function on the morphisms of a fixed groupoid."""

    __slots__ = ("groupoid", "values")

    def __init__(self, groupoid: FiniteGroupoid, values: Sequence):
        if len(values) != groupoid.n_morphisms:
            raise ValueError("need one value per morphism")
        self.groupoid = groupoid
        self.values = list(values)

    @classmethod
    def zeros(cls, g: FiniteGroupoid) -> "AlgebraElement":
        return cls(g, [0] * g.n_morphisms)

    @classmethod
    def delta(cls, g: FiniteGroupoid, m: int) -> "AlgebraElement":
        f = cls.zeros(g)
        f.values[m] = 1
        return f

    @classmethod
    def units_indicator(cls, g: FiniteGroupoid) -> "AlgebraElement":
        """χ_Ω, the indicator of the unit morphisms: the algebra unit."""
        f = cls.zeros(g)
        for x in g.objects():
            f.values[g.unit(x)] = 1
        return f

    @classmethod
    def constant(cls, g: FiniteGroupoid, value=1) -> "AlgebraElement":
        return cls(g, [value] * g.n_morphisms)

    def __getitem__(self, m: int):
        return self.values[m]

    def copy(self) -> "AlgebraElement":
        return AlgebraElement(self.groupoid, self.values)

    def support(self):
        return [(m, v) for m, v in enumerate(self.values) if v != 0]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same_parent(other)
        return AlgebraElement(self.groupoid, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._same_parent(other)
        return AlgebraElement(self.groupoid, [a - b for a, b in zip(self.values, other.values)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.groupoid, [-a for a in self.values])

    def __mul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.groupoid, [v * scalar for v in self.values])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and self.groupoid.n_morphisms == other.groupoid.n_morphisms
            and all(a == b for a, b in zip(self.values, other.values))
        )

    def allclose(self, other: "AlgebraElement", tol: float = 1e-12) -> bool:
        self._same_parent(other)
        return all(abs(a - b) <= tol for a, b in zip(self.values, other.values))

    def max_abs(self) -> float:
        return max((abs(v) for v in self.values), default=0.0)

    def _same_parent(self, other: "AlgebraElement") -> None:
        if self.groupoid is not other.groupoid and (
            self.groupoid.n_morphisms != other.groupoid.n_morphisms
        ):
            raise GroupoidError("algebra elements live on different groupoids")

    def to_json(self) -> dict:
        vals = []
        for v in self.values:
            c = complex(v)
            vals.append([c.real, c.imag])
        return {"values": vals}

    def __repr__(self) -> str:
        nz = self.support()
        return f"AlgebraElement({len(nz)} nonzero of {self.groupoid.n_morphisms})"


def element_from_json(data: dict, g: FiniteGroupoid) -> AlgebraElement:
    try:
        vals = data["values"]
        values = [complex(re, im) for re, im in vals]
    except (KeyError, TypeError, ValueError) as exc:
        raise GroupoidError(f"malformed function JSON: {exc}") from exc
    return AlgebraElement(g, values)


def load_element(path: str, g: FiniteGroupoid) -> AlgebraElement:
    with open(path) as fh:
        return element_from_json(json.load(fh), g)


def convolve(f: AlgebraElement, g: AlgebraElement, m: GroupoidMeasure) -> AlgebraElement:
    """(f ⋆ g)(α) = Σ_{β ∈ G^{t(α)}} f(β) g(β⁻¹∘α) ν^{t(α)}(β)."""
    G = m.groupoid
    out = AlgebraElement.zeros(G)
    fv, gv = f.values, g.values
    for alpha in G.morphisms():
        acc = 0
        for beta in G.target_fiber(G.target[alpha]):
            w = fv[beta]
            if w == 0:
                continue
            acc += w * gv[G.compose(G.inv(beta), alpha)] * m.nu_target(beta)
        out.values[alpha] = acc
    return out


def involute(f: AlgebraElement, m: GroupoidMeasure) -> AlgebraElement:
    """f*(α) = δ(α)⁻¹ conj(f(α⁻¹)); an antilinear involution with (f⋆g)* = g*⋆f*."""
    G = m.groupoid
    out = AlgebraElement.zeros(G)
    for alpha in G.morphisms():
        ai = G.inv(alpha)
        # δ(α)⁻¹ = μ(α⁻¹)/μ(α), computed directly so rational weights stay exact
        out.values[alpha] = (m.weights[ai] / m.weights[alpha]) * f.values[ai].conjugate()
    return out


def left_regular_matrix(f: AlgebraElement, m: GroupoidMeasure) -> np.ndarray:
    """Matrix of ψ -> f⋆ψ in the basis {δ_α} of L²(G, μ)."""
    G = m.groupoid
    n = G.n_morphisms
    mat = np.zeros((n, n), dtype=np.complex128)
    for col in range(n):
        column = convolve(f, AlgebraElement.delta(G, col), m)
        mat[:, col] = [complex(v) for v in column.values]
    return mat


def inner(psi: AlgebraElement, chi: AlgebraElement, m: GroupoidMeasure) -> complex:
    """⟨ψ, χ⟩ = Σ_α conj(ψ(α)) χ(α) μ(α), antilinear in the first slot."""
    return sum(
        psi.values[a].conjugate() * chi.values[a] * m.weights[a]
        for a in m.groupoid.morphisms()
    )


def norm_sq(psi: AlgebraElement, m: GroupoidMeasure):
    return sum(abs(psi.values[a]) ** 2 * m.weights[a] for a in m.groupoid.morphisms())


@dataclass
class PositiveTypeResult:
    """Verdict of a positive-type check with a witness for failures.

    When ok is False, either ``hermitian_defect`` exceeded tolerance on the
    reported block, or ``min_eigenvalue`` is the offending negative eigenvalue
    and ``witness`` the corresponding eigenvector over the fiber ``fiber``.
    """

    ok: bool
    min_eigenvalue: float
    object_index: int | None = None
    fiber: tuple[int, ...] | None = None
    block: np.ndarray | None = None
    witness: np.ndarray | None = None
    hermitian_defect: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


def is_positive_type(phi: AlgebraElement, tol: float = PSD_TOL) -> PositiveTypeResult:
    """Decide whether phi is of positive type.

    For every object x the matrix M[j, k] = phi(α_j ∘ α_k⁻¹) over the source
    fiber α_j, α_k ∈ G_x must be positive semidefinite (these blocks exhaust
    the defining quadratic form, which only pairs morphisms with equal
    sources).  Fails with the offending block and an eigenvector witness.
    """
    G = phi.groupoid
    worst = PositiveTypeResult(ok=True, min_eigenvalue=float("inf"))
    seen: set[bytes] = set()
    for x in G.objects():
        fiber = G.source_fiber(x)
        if not fiber:
            continue
        k = len(fiber)
        block = np.zeros((k, k), dtype=np.complex128)
        for i, a in enumerate(fiber):
            for j, b in enumerate(fiber):
                block[i, j] = complex(phi.values[G.compose(a, G.inv(b))])
        key = block.tobytes()
        if key in seen:
            continue
        seen.add(key)
        defect = hermitian_defect(block)
        if defect > tol:
            return PositiveTypeResult(
                ok=False,
                min_eigenvalue=float("nan"),
                object_index=x,
                fiber=fiber,
                block=block,
                hermitian_defect=defect,
            )
        w, v = hermitian_eigh(block)
        if w[0] < worst.min_eigenvalue:
            worst = PositiveTypeResult(
                ok=w[0] >= -tol,
                min_eigenvalue=float(w[0]),
                object_index=x,
                fiber=fiber,
                block=block,
                witness=v[:, 0],
            )
        if not worst.ok:
            return worst
    return worst


def state_normalization(phi: AlgebraElement, m: GroupoidMeasure):
    """Σ_x phi(1_x)·μ_Ω(x): equals one for trace-one states on pair groupoids."""
    G = phi.groupoid
    return sum(phi.values[G.unit(x)] * m.object_weights[x] for x in G.objects())


class StateFunction:
    """A positive-type function normalized to Σ_x φ(1_x) μ_Ω(x) = 1."""

    __slots__ = ("function", "measure")

    def __init__(self, function: AlgebraElement, measure: GroupoidMeasure, tol: float = 1e-10):
        check = is_positive_type(function, tol)
        if not check.ok:
            raise GroupoidError(
                f"not a positive-type function (min eigenvalue {check.min_eigenvalue})"
            )
        norm = state_normalization(function, measure)
        if abs(norm - 1) > tol:
            raise NormalizationError(f"state normalization is {norm}, expected 1")
        self.function = function
        self.measure = measure


def evaluate_state(
    xi_list: Sequence[AlgebraElement],
    f: AlgebraElement,
    m: GroupoidMeasure,
    tol: float = 1e-12,
) -> complex:
    """ω(f) = Σ_i ⟨ξ_i, π(f) ξ_i⟩ for a normal state given by L² vectors ξ_i.

    Requires Σ_i ‖ξ_i‖² = 1 within tol.
    """
    total = sum(norm_sq(xi, m) for xi in xi_list)
    if abs(total - 1) > tol:
        raise NormalizationError(f"Σ‖ξ‖² = {total}, expected 1")
    return sum(inner(xi, convolve(f, xi, m), m) for xi in xi_list)


def state_function(
    xi_list: Sequence[AlgebraElement], m: GroupoidMeasure, tol: float = 1e-12
) -> AlgebraElement:
    """The function α -> ω(δ_α) attached to the normal state of ξ_list."""
    G = m.groupoid
    values = [
        evaluate_state(xi_list, AlgebraElement.delta(G, a), m, tol) for a in G.morphisms()
    ]
    return AlgebraElement(G, values)
