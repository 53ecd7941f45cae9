"""The measured symmetroid and its convolution algebra.

A Haar measure μ on the base groupoid induces a measure on the symmetroid.
The 2-target fiber S^β is identified with G^{t(β)} x G^{s(β)} by
Γ = (α, ·, γ) -> (α, γ), and carries the product fiber measure

    ν₂(Γ) = ν^{t(α)}(α) · ν^{t(γ)}(γ).

Summing the fibers against the weight μ_Ω(t(β))·μ_Ω(s(β)) on the base point
β = t1(Γ) gives the atoms

    μ₂(Γ) = μ(α) · μ(γ),        Δ₂(Γ) = δ(α) · δ(γ),

where Δ₂ is exactly the modular function of μ₂ (μ₂(Γ⁻¹) = μ₂(Γ)/Δ₂(Γ)
atom by atom) and a homomorphism for the vertical composition.  On a counting
base all three collapse to 1 and the fiber weight on the base equals μ, the
convention in which C₀ of the quotient is M_n(C) ⊗ M_n(C) on the nose.

The convolution product, involution and left-regular operators are

    (f ⋆_S g)(Γ) = Σ_{Γ₁ ∈ S^{t1(Γ)}} ν₂(Γ₁) f(Γ₁) g(Γ₁⁻¹ ∘_V Γ)
    f*(Γ) = Δ₂(Γ)⁻¹ conj(f(Γ⁻¹))
    A_f ψ = f ⋆_S ψ,

with A_f A_g = A_{f⋆g} and A_f† = A_{f*} on L²(S, μ₂).  The quotient over a
pair groupoid gets a fast path indexed by (z, y, x, w) quadruples in
row-major order; that order is the package-wide flattening for every matrix
export.
"""

from __future__ import annotations

import csv
import json
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, convolve
from .groupoid import FiniteGroupoid, GroupoidError, pair_groupoid
from .measure import (
    DEFAULT_TOL,
    GroupoidMeasure,
    NotHaarError,
    modular,
    verify_left_invariance,
)
from .reports import ViolationReport
from .symmetroid import (
    QClass,
    Symmetroid,
    Transformation,
    enumerate_quotient,
    q_from_index,
    q_index,
    q_vertical_inverse,
)


class NotPullbackError(GroupoidError):
    """A function expected to be constant along 2-target fibers is not."""


# -- induced measure on a general symmetroid --


class SymmetroidMeasure:
    """Induced weights μ₂, fiber weights ν₂ and modular values Δ₂ on S(G)."""

    __slots__ = ("symmetroid", "base", "weights", "fiber_weights", "modular")

    def __init__(self, symmetroid: Symmetroid, base: GroupoidMeasure):
        self.symmetroid = symmetroid
        self.base = base
        w, nu, dl = {}, {}, {}
        for t in symmetroid.transformations:
            w[t] = base.weights[t.alpha] * base.weights[t.gamma]
            nu[t] = base.nu_target(t.alpha) * base.nu_target(t.gamma)
            dl[t] = base.delta(t.alpha) * base.delta(t.gamma)
        self.weights = w
        self.fiber_weights = nu
        self.modular = dl

    def mu2(self, t: Transformation):
        return self.weights[t]

    def nu2(self, t: Transformation):
        return self.fiber_weights[t]

    def delta2(self, t: Transformation):
        return self.modular[t]


def induce_measure(sym: Symmetroid, m: GroupoidMeasure, tol: float = DEFAULT_TOL) -> SymmetroidMeasure:
    """Induce the symmetroid measure from a Haar measure on the base.

    Verifies that m is Haar (left-invariant fibers, multiplicative modular
    function) and raises NotHaarError otherwise.
    """
    g = sym.groupoid
    rep = verify_left_invariance(g, m, tol)
    if not rep.ok:
        raise NotHaarError(f"base measure is not left-invariant: {rep}")
    modular(g, m, tol)  # raises NotHaarError when not multiplicative
    return SymmetroidMeasure(sym, m)


def verify_induced_equivariance(m2: SymmetroidMeasure, tol: float = DEFAULT_TOL) -> ViolationReport:
    """Check (L_Γ)⋆ν₂^{s1(Γ)} = ν₂^{t1(Γ)} for every transformation Γ.

    Atomically: ν₂(Λ) == ν₂(Γ⁻¹ ∘_V Λ) for every Λ in the 2-target fiber of
    t1(Γ).
    """
    sym = m2.symmetroid
    rep = ViolationReport()
    for t in sym.transformations:
        ti = sym.vertical_inverse(t)
        for lam in sym.t1_fiber(sym.t1(t)):
            rep.checks += 1
            lhs = m2.nu2(lam)
            rhs = m2.nu2(sym.vertical_compose(ti, lam))
            defect = abs(lhs - rhs)
            if defect > tol:
                rep.add("equivariance", (t, lam), f"fiber weight moved by {t}", defect)
    return rep


def verify_modular_formula(
    m2: SymmetroidMeasure, functions: Sequence[dict] | None = None, tol: float = DEFAULT_TOL
) -> ViolationReport:
    """Check Σ_Γ μ₂(Γ) f(Γ⁻¹) == Σ_Γ μ₂(Γ) Δ₂(Γ)⁻¹ f(Γ).

    Defaults to the basis of indicator functions, for which the check is the
    atomwise identity μ₂(Γ⁻¹) == μ₂(Γ)/Δ₂(Γ).  Extra functions may be given
    as {Transformation: value} dicts.
    """
    sym = m2.symmetroid
    rep = ViolationReport()
    for t in sym.transformations:
        rep.checks += 1
        ti = sym.vertical_inverse(t)
        defect = abs(m2.mu2(ti) - m2.mu2(t) / m2.delta2(t))
        if defect > tol:
            rep.add("modular-atom", (t,), f"μ₂(Γ⁻¹) != μ₂(Γ)/Δ₂(Γ) at Γ={t}", defect)
    for i, f in enumerate(functions or []):
        rep.checks += 1
        lhs = sum(m2.mu2(t) * f.get(sym.vertical_inverse(t), 0) for t in sym.transformations)
        rhs = sum(m2.mu2(t) * f.get(t, 0) / m2.delta2(t) for t in sym.transformations)
        defect = abs(lhs - rhs)
        if defect > tol:
            rep.add("modular-sum", (i,), f"Σ μ₂ f(Γ⁻¹) != Σ μ₂ Δ₂⁻¹ f for function {i}", defect)
    return rep


def verify_modular_homomorphism(m2: SymmetroidMeasure, tol: float = DEFAULT_TOL) -> ViolationReport:
    """Δ₂(Γ₂ ∘_V Γ₁) == Δ₂(Γ₂)·Δ₂(Γ₁) over all vertically composable pairs."""
    sym = m2.symmetroid
    rep = ViolationReport()
    by_s1: dict[int, list[Transformation]] = {}
    for t in sym.transformations:
        by_s1.setdefault(t.beta, []).append(t)
    for t1_ in sym.transformations:
        for t2 in by_s1.get(sym.t1(t1_), []):
            rep.checks += 1
            prod = sym.vertical_compose(t2, t1_)
            defect = abs(m2.delta2(prod) - m2.delta2(t2) * m2.delta2(t1_))
            if defect > tol:
                rep.add("modular-hom", (t2, t1_), "Δ₂ not multiplicative", defect)
    return rep


# -- functions on a general symmetroid --


class SymFunction:
    """A complex function on the transformations of a Symmetroid."""

    __slots__ = ("symmetroid", "values")

    def __init__(self, symmetroid: Symmetroid, values: Sequence):
        if len(values) != len(symmetroid):
            raise ValueError("need one value per transformation")
        self.symmetroid = symmetroid
        self.values = list(values)

    @classmethod
    def zeros(cls, sym: Symmetroid) -> "SymFunction":
        return cls(sym, [0] * len(sym))

    @classmethod
    def delta(cls, sym: Symmetroid, t: Transformation) -> "SymFunction":
        f = cls.zeros(sym)
        f.values[sym.index[t]] = 1
        return f

    def __getitem__(self, t: Transformation):
        return self.values[self.symmetroid.index[t]]

    def allclose(self, other: "SymFunction", tol: float = 1e-12) -> bool:
        return all(abs(a - b) <= tol for a, b in zip(self.values, other.values))


def convolve_general(f: SymFunction, g: SymFunction, m2: SymmetroidMeasure) -> SymFunction:
    """⋆_S on a general symmetroid: sum over the 2-target fiber of the output."""
    sym = f.symmetroid
    out = SymFunction.zeros(sym)
    for i, t in enumerate(sym.transformations):
        acc = 0
        for t1_ in sym.t1_fiber(sym.t1(t)):
            fv = f[t1_]
            if fv == 0:
                continue
            acc += m2.nu2(t1_) * fv * g[sym.vertical_compose(sym.vertical_inverse(t1_), t)]
        out.values[i] = acc
    return out


def involute_general(f: SymFunction, m2: SymmetroidMeasure) -> SymFunction:
    sym = f.symmetroid
    out = SymFunction.zeros(sym)
    for i, t in enumerate(sym.transformations):
        ti = sym.vertical_inverse(t)
        out.values[i] = f[ti].conjugate() / m2.delta2(t)
    return out


# -- quotient fast path over a pair groupoid --


class QuotientMeasure:
    """Per-transition data of an induced measure, specialized to the quotient.

    For the class ((z, y), (x, w)) the two translation legs are the
    transitions (z, y) and (w, x) of the base pair groupoid, so μ₂, ν₂ and Δ₂
    are products of per-transition tables.
    """

    __slots__ = ("n", "base", "mu", "nu", "dl")

    def __init__(self, base: GroupoidMeasure):
        g = base.groupoid
        n = g.n_objects
        if g.n_morphisms != n * n:
            raise GroupoidError("QuotientMeasure needs a pair-groupoid base")
        self.n = n
        self.base = base
        self.mu = list(base.weights)
        self.nu = [base.nu_target(m) for m in g.morphisms()]
        self.dl = [base.delta(m) for m in g.morphisms()]

    @classmethod
    def counting(cls, n: int) -> "QuotientMeasure":
        return cls(GroupoidMeasure.counting(pair_groupoid(n)))

    def mu2(self, q: QClass):
        n = self.n
        return self.mu[q.z * n + q.y] * self.mu[q.w * n + q.x]

    def nu2(self, q: QClass):
        n = self.n
        return self.nu[q.z * n + q.y] * self.nu[q.w * n + q.x]

    def delta2(self, q: QClass):
        n = self.n
        return self.dl[q.z * n + q.y] * self.dl[q.w * n + q.x]


class QuotientFunction:
    """A function on the n⁴ quotient classes, stored row-major in (z, y, x, w).

    That storage order is the canonical flattening used by every matrix
    export in this package.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: Sequence):
        if len(values) != n**4:
            raise ValueError(f"need n⁴ = {n**4} values, got {len(values)}")
        self.n = n
        self.values = list(values)

    @classmethod
    def zeros(cls, n: int) -> "QuotientFunction":
        return cls(n, [0] * n**4)

    @classmethod
    def delta(cls, n: int, q: QClass) -> "QuotientFunction":
        f = cls.zeros(n)
        f.values[q_index(n, q)] = 1
        return f

    @classmethod
    def vertical_unit_indicator(cls, n: int) -> "QuotientFunction":
        """Indicator of the classes ((y, y), (x, x)); the ⋆_S unit."""
        f = cls.zeros(n)
        for y in range(n):
            for x in range(n):
                f.values[q_index(n, QClass(y, y, x, x))] = 1
        return f

    @classmethod
    def from_callable(cls, n: int, fn) -> "QuotientFunction":
        return cls(n, [fn(q) for q in enumerate_quotient(n)])

    def __getitem__(self, q: QClass):
        return self.values[q_index(self.n, q)]

    def get(self, z: int, y: int, x: int, w: int):
        return self.values[((z * self.n + y) * self.n + x) * self.n + w]

    def support(self):
        return [(q_from_index(self.n, i), v) for i, v in enumerate(self.values) if v != 0]

    def __add__(self, other: "QuotientFunction") -> "QuotientFunction":
        return QuotientFunction(self.n, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other: "QuotientFunction") -> "QuotientFunction":
        return QuotientFunction(self.n, [a - b for a, b in zip(self.values, other.values)])

    def __mul__(self, scalar) -> "QuotientFunction":
        return QuotientFunction(self.n, [v * scalar for v in self.values])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuotientFunction)
            and self.n == other.n
            and all(a == b for a, b in zip(self.values, other.values))
        )

    def allclose(self, other: "QuotientFunction", tol: float = 1e-12) -> bool:
        if self.n != other.n:
            raise GroupoidError("quotient functions live over different bases")
        return all(abs(a - b) <= tol for a, b in zip(self.values, other.values))

    def max_abs(self) -> float:
        return max((abs(v) for v in self.values), default=0.0)

    def to_json(self) -> dict:
        vals = []
        for v in self.values:
            c = complex(v)
            vals.append([c.real, c.imag])
        return {"n": self.n, "values": vals}


def quotient_function_from_json(data: dict) -> QuotientFunction:
    try:
        n = data["n"]
        values = [complex(re, im) for re, im in data["values"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GroupoidError(f"malformed quotient-function JSON: {exc}") from exc
    return QuotientFunction(n, values)


def convolve_S(
    f: QuotientFunction, g: QuotientFunction, qm: QuotientMeasure | None = None
) -> QuotientFunction:
    """(f ⋆_S g)((l,j),(k,m)) = Σ_{r,s} ν(l,r) ν(m,s) f((l,r),(s,m)) g((r,j),(k,s)).

    With a counting base the fiber weights are 1 and this is multiplication in
    M_n ⊗ M_n under the matrix-unit identification.
    """
    n = f.n
    if g.n != n:
        raise GroupoidError("quotient functions live over different bases")
    out = QuotientFunction.zeros(n)
    counting = qm is None
    nu = None if counting else qm.nu
    gv, ov = g.values, out.values
    n2, n3 = n * n, n * n * n
    for (l, r, s, m), fv in ((q, v) for q, v in f.support()):
        weight = fv if counting else fv * nu[l * n + r] * nu[m * n + s]
        g_base = r * n3 + s  # g index for (r, j, k, s) is r·n³ + j·n² + k·n + s
        o_base = l * n3 + m  # out index for (l, j, k, m)
        for j in range(n):
            for k in range(n):
                ov[o_base + j * n2 + k * n] += weight * gv[g_base + j * n2 + k * n]
    return out


def involute_S(f: QuotientFunction, qm: QuotientMeasure | None = None) -> QuotientFunction:
    """f*((l,j),(k,m)) = Δ₂⁻¹ conj(f((j,l),(m,k)))."""
    n = f.n
    out = QuotientFunction.zeros(n)
    for i, q in enumerate(enumerate_quotient(n)):
        qi = q_vertical_inverse(q)
        v = f[qi].conjugate()
        if qm is not None:
            v = v / qm.delta2(q)
        out.values[i] = v
    return out


def modular_involution(psi: QuotientFunction) -> QuotientFunction:
    """(Jψ)(Γ) = conj(ψ(Γ⁻¹)); the antilinear modular involution."""
    n = psi.n
    out = QuotientFunction.zeros(n)
    for i, q in enumerate(enumerate_quotient(n)):
        out.values[i] = psi[q_vertical_inverse(q)].conjugate()
    return out


def rep_operator(f: QuotientFunction, qm: QuotientMeasure | None = None) -> np.ndarray:
    """Matrix of A_f: ψ -> f ⋆_S ψ in the basis {δ_Γ}, canonical class order."""
    n4 = f.n**4
    mat = np.zeros((n4, n4), dtype=np.complex128)
    for col, q in enumerate(enumerate_quotient(f.n)):
        column = convolve_S(f, QuotientFunction.delta(f.n, q), qm)
        mat[:, col] = [complex(v) for v in column.values]
    return mat


def pullback_embed(psi: AlgebraElement) -> QuotientFunction:
    """t1-pullback: value at ((l, j), (k, m)) is ψ(l, m); constant on 2-target fibers."""
    g = psi.groupoid
    n = g.n_objects
    if g.n_morphisms != n * n:
        raise GroupoidError("pullback_embed expects a function on a pair groupoid")
    out = QuotientFunction.zeros(n)
    for i, q in enumerate(enumerate_quotient(n)):
        out.values[i] = psi.values[q.z * n + q.w]
    return out


def fiber_restrict(f: QuotientFunction, base: FiniteGroupoid | None = None, tol: float = 1e-12) -> AlgebraElement:
    """Inverse of pullback_embed; raises NotPullbackError when f is not
    constant along the 2-target fibers."""
    n = f.n
    g = base if base is not None else pair_groupoid(n)
    values = [0] * (n * n)
    for l in range(n):
        for m in range(n):
            fiber_vals = [f.get(l, j, k, m) for j in range(n) for k in range(n)]
            ref = fiber_vals[0]
            spread = max(abs(v - ref) for v in fiber_vals)
            if spread > tol:
                raise NotPullbackError(
                    f"not constant along the 2-target fiber of ({l}, {m}): spread {spread}"
                )
            values[l * n + m] = ref
    return AlgebraElement(g, values)


def horizontal_convolve(
    f1: QuotientFunction,
    f2: QuotientFunction,
    base_measure: GroupoidMeasure,
) -> QuotientFunction:
    """⋆_H on pullbacks: (t1*ψ₁) ⋆_H (t1*ψ₂) = t1*(ψ₁ ⋆ ψ₂).

    Both inputs must lie in the pullback subspace (NotPullbackError
    otherwise); the product is computed through the base convolution, the
    unambiguous finite-dimensional form of the horizontal structure.
    """
    g = base_measure.groupoid
    psi1 = fiber_restrict(f1, g)
    psi2 = fiber_restrict(f2, g)
    return pullback_embed(convolve(psi1, psi2, base_measure))


def tensor_matrix(f: QuotientFunction) -> np.ndarray:
    """Image of f under δ_((l,j),(k,m)) -> e_lj ⊗ e_mk in M_n ⊗ M_n.

    An algebra isomorphism for the counting base: it is the same matrix as
    the left-regular action restricted to a 2-target fiber.
    """
    n = f.n
    mat = np.zeros((n * n, n * n), dtype=np.complex128)
    for (l, j, k, m), v in f.support():
        mat[l * n + m, j * n + k] += complex(v)
    return mat


# -- matrix exports --


def matrix_to_json(mat: np.ndarray) -> dict:
    return {
        "shape": list(mat.shape),
        "entries": [[float(c.real), float(c.imag)] for row in mat for c in row],
    }


def write_matrix_csv(mat: np.ndarray, path: str) -> None:
    """Row-major CSV with alternating re, im columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in mat:
            cells = []
            for c in row:
                cells.append(repr(float(c.real)))
                cells.append(repr(float(c.imag)))
            writer.writerow(cells)


def write_matrix_json(mat: np.ndarray, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_json(mat), fh, indent=1, sort_keys=True)
        fh.write("\n")
