"""Dynamical maps on the pair-groupoid algebra.

A channel is a function f on the quotient symmetroid classes ((l, j), (k, m)).
It acts on base functions by

    (K ψ)(l, m) = Σ_{r,s} f((l, r), (s, m)) ψ(r, s),

the fiber-constant part of f ⋆_S (t1-pullback of ψ).  Three reshapes of the
same rank-4 tensor represent the map in matrix form under the row-major
flattening (a, b) -> a·n + b:

    A[(l,m), (r,s)]   = f((l,r),(s,m))    (the superoperator: vec out = A vec in)
    B[(l,m), (j,k)]   = f((l,j),(k,m))    (output basis x input pairing)
    Choi[(l,j), (m,k)] = f((l,j),(k,m))

Kraus families give f((l,j),(k,m)) = Σ_p V_p(l,j) conj(V_p(m,k)), equivalently
ψ -> Σ_p V_p ⋆ ψ ⋆ V_p*; such maps are completely positive, and complete
positivity in general is decided by positive semidefiniteness of the Choi
matrix.  The same condition reappears intrinsically as flat positive
semidefiniteness: the Gram matrices f(Γ_j ∘_H Γ_k^{-H}) over horizontally
compatible tuples of classes are positive semidefinite.
"""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    PSD_TOL,
    convolve,
    element_from_json,
    involute,
    is_positive_type,
)
from .eigen import hermitian_defect, hermitian_eigh
from .groupoid import GroupoidError, pair_groupoid
from .measure import GroupoidMeasure
from .symmetroid import (
    FlatBisection,
    QClass,
    enumerate_quotient,
    q_horizontal_compose,
    q_horizontal_inverse,
    q_index,
)
from .symalgebra import QuotientFunction, quotient_function_from_json


class DimensionMismatchError(GroupoidError):
    """Channel and state dimensions disagree."""


class TooManyKrausError(GroupoidError):
    """A Kraus family over n outcomes can have at most n² members."""


class Channel:
    """A dynamical map given by its kernel on the quotient symmetroid."""

    __slots__ = ("n", "kernel")

    def __init__(self, kernel: QuotientFunction):
        self.n = kernel.n
        self.kernel = kernel

    def __repr__(self) -> str:
        return f"Channel(n={self.n})"

    def to_json(self) -> dict:
        return self.kernel.to_json()


def channel_from_json(data: dict) -> Channel:
    return Channel(quotient_function_from_json(data))


def load_channel(path: str) -> Channel:
    with open(path) as fh:
        return channel_from_json(json.load(fh))


class KrausFamily:
    """At most n² base functions V_p defining ψ -> Σ_p V_p ⋆ ψ ⋆ V_p*."""

    __slots__ = ("n", "members")

    def __init__(self, n: int, members: Sequence[AlgebraElement]):
        if len(members) > n * n:
            raise TooManyKrausError(
                f"{len(members)} members over {n} outcomes; at most {n * n} allowed"
            )
        for v in members:
            if v.groupoid.n_morphisms != n * n:
                raise DimensionMismatchError("Kraus member has the wrong dimension")
        self.n = n
        self.members = list(members)

    def to_json(self) -> dict:
        return {"n": self.n, "members": [v.to_json() for v in self.members]}


def kraus_from_json(data: dict) -> KrausFamily:
    try:
        n = data["n"]
        members = data["members"]
    except (KeyError, TypeError) as exc:
        raise GroupoidError(f"malformed Kraus JSON: {exc}") from exc
    g = pair_groupoid(n)
    return KrausFamily(n, [element_from_json(m, g) for m in members])


def load_kraus(path: str) -> KrausFamily:
    with open(path) as fh:
        return kraus_from_json(json.load(fh))


# -- construction --


def from_kraus(ks: KrausFamily) -> Channel:
    """Kernel f((l,j),(k,m)) = Σ_p V_p(l,j) conj(V_p(m,k))."""
    n = ks.n
    kernel = QuotientFunction.zeros(n)
    for v in ks.members:
        vals = v.values
        for q in enumerate_quotient(n):
            kernel.values[q_index(n, q)] += (
                vals[q.z * n + q.y] * vals[q.w * n + q.x].conjugate()
            )
    return Channel(kernel)


def from_flat_bisection(b: FlatBisection) -> Channel:
    """The unitary channel of a flat bisection: conjugation by the permutation
    matrix of σ (single Kraus member χ_b, the indicator of {(σj, j)})."""
    return from_kraus(KrausFamily(b.n, [bisection_indicator(b)]))


def bisection_indicator(b: FlatBisection) -> AlgebraElement:
    """χ_b on the base pair groupoid; its left-regular matrix is the
    permutation matrix of σ."""
    g = pair_groupoid(b.n)
    chi = AlgebraElement.zeros(g)
    for j in range(b.n):
        chi.values[b.perm[j] * b.n + j] = 1
    return chi


def identity_channel(n: int) -> Channel:
    g = pair_groupoid(n)
    return from_kraus(KrausFamily(n, [AlgebraElement.units_indicator(g)]))


def transpose_channel(n: int) -> Channel:
    """ψ -> ψᵀ; positive but not completely positive (Choi = SWAP)."""
    kernel = QuotientFunction.from_callable(
        n, lambda q: 1 if (q.y == q.w and q.x == q.z) else 0
    )
    return Channel(kernel)


# -- action --


def apply(ch: Channel, psi: AlgebraElement) -> AlgebraElement:
    """out(l, m) = Σ_{r,s} f((l,r),(s,m)) ψ(r, s)."""
    n = ch.n
    g = psi.groupoid
    if g.n_morphisms != n * n:
        raise DimensionMismatchError(
            f"channel over {n} outcomes applied to a function on {g.n_morphisms} transitions"
        )
    out = AlgebraElement.zeros(g)
    kv = ch.kernel.values
    pv = psi.values
    n2, n3 = n * n, n * n * n
    for l in range(n):
        for m in range(n):
            acc = 0
            base = l * n3 + m
            for r in range(n):
                for s in range(n):
                    acc += kv[base + r * n2 + s * n] * pv[r * n + s]
            out.values[l * n + m] = acc
    return out


def compose_channels(ch2: Channel, ch1: Channel) -> Channel:
    """The map ψ -> ch2(ch1(ψ)); kernel given by A-matrix multiplication."""
    if ch2.n != ch1.n:
        raise DimensionMismatchError("composed channels must share a dimension")
    a = to_a_matrix(ch2).matrix @ to_a_matrix(ch1).matrix
    return channel_from_a_matrix(AMatrix(ch1.n, a))


def extend_with_identity(ch: Channel, m_ancilla: int) -> Channel:
    """id_M ⊗ K on the product of pair groupoids over M·n points.

    The product point (a, p) is flattened to a·n + p; the extended kernel
    carries f across the second factor and the identity across the first.
    """
    n, M = ch.n, m_ancilla
    if M < 1:
        raise ValueError("ancilla dimension must be at least 1")
    N = M * n
    big = QuotientFunction.zeros(N)
    for (l, j, k, m), v in ch.kernel.support():
        for a in range(M):
            for b in range(M):
                q = QClass(a * n + l, a * n + j, b * n + k, b * n + m)
                big.values[q_index(N, q)] = v
    return Channel(big)


def zero_pad(ch: Channel, n_to: int) -> Channel:
    """Extend a channel by zeroes to a larger outcome set (explicit, never implicit)."""
    if n_to < ch.n:
        raise DimensionMismatchError("can only pad to a larger dimension")
    big = QuotientFunction.zeros(n_to)
    for q, v in ch.kernel.support():
        big.values[q_index(n_to, q)] = v
    return Channel(big)


def pad_element(psi: AlgebraElement, n_to: int) -> AlgebraElement:
    n = psi.groupoid.n_objects
    if n_to < n:
        raise DimensionMismatchError("can only pad to a larger dimension")
    g = pair_groupoid(n_to)
    out = AlgebraElement.zeros(g)
    for j in range(n):
        for k in range(n):
            out.values[j * n_to + k] = psi.values[j * n + k]
    return out


# -- matrix representations --


@dataclass(frozen=True)
class AMatrix:
    n: int
    matrix: np.ndarray


@dataclass(frozen=True)
class BMatrix:
    n: int
    matrix: np.ndarray


@dataclass(frozen=True)
class ChoiMatrix:
    n: int
    matrix: np.ndarray


def to_a_matrix(ch: Channel) -> AMatrix:
    """A[(l,m),(r,s)] = f((l,r),(s,m)); vec(out) = A·vec(in)."""
    n = ch.n
    mat = np.zeros((n * n, n * n), dtype=np.complex128)
    for (l, r, s, m), v in ch.kernel.support():
        mat[l * n + m, r * n + s] = complex(v)
    return AMatrix(n, mat)


def to_b_matrix(ch: Channel) -> BMatrix:
    """B[(l,m),(j,k)] = f((l,j),(k,m)); the output-basis/input-pairing reshuffle."""
    n = ch.n
    mat = np.zeros((n * n, n * n), dtype=np.complex128)
    for (l, j, k, m), v in ch.kernel.support():
        mat[l * n + m, j * n + k] = complex(v)
    return BMatrix(n, mat)


def to_choi(ch: Channel) -> ChoiMatrix:
    """Choi[(l,j),(m,k)] = f((l,j),(k,m)); PSD exactly for completely positive maps."""
    n = ch.n
    mat = np.zeros((n * n, n * n), dtype=np.complex128)
    for (l, j, k, m), v in ch.kernel.support():
        mat[l * n + j, m * n + k] = complex(v)
    return ChoiMatrix(n, mat)


def channel_from_a_matrix(a: AMatrix) -> Channel:
    n = a.n
    kernel = QuotientFunction.from_callable(
        n, lambda q: a.matrix[q.z * n + q.w, q.y * n + q.x]
    )
    return Channel(kernel)


def channel_from_b_matrix(b: BMatrix) -> Channel:
    n = b.n
    kernel = QuotientFunction.from_callable(
        n, lambda q: b.matrix[q.z * n + q.w, q.y * n + q.x]
    )
    return Channel(kernel)


def channel_from_choi(c: ChoiMatrix) -> Channel:
    n = c.n
    kernel = QuotientFunction.from_callable(
        n, lambda q: c.matrix[q.z * n + q.y, q.w * n + q.x]
    )
    return Channel(kernel)


def choi_kraus_decomposition(ch: Channel, tol: float = PSD_TOL) -> KrausFamily:
    """Kraus members from the eigendecomposition of the Choi matrix.

    Requires the Choi matrix to be Hermitian PSD within tol.
    """
    n = ch.n
    choi = to_choi(ch).matrix
    defect = hermitian_defect(choi)
    if defect > tol:
        raise GroupoidError(f"Choi matrix is not Hermitian (defect {defect:.3e})")
    w, v = hermitian_eigh(choi)
    if w[0] < -tol:
        raise GroupoidError(f"Choi matrix is not PSD (min eigenvalue {w[0]:.3e})")
    g = pair_groupoid(n)
    members = []
    for i in range(len(w) - 1, -1, -1):
        if w[i] <= tol:
            continue
        scale = float(np.sqrt(w[i]))
        vec = v[:, i]
        member = AlgebraElement(
            g, [scale * complex(vec[l * n + j]) for l in range(n) for j in range(n)]
        )
        members.append(member)
    return KrausFamily(n, members)


# -- positivity diagnostics --


@dataclass
class CPResult:
    ok: bool
    min_eigenvalue: float
    hermitian_defect: float
    witness: np.ndarray | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_cp(ch: Channel, tol: float = PSD_TOL) -> CPResult:
    """Complete positivity: the Choi matrix is Hermitian with min eigenvalue >= -tol.

    By channel-state duality this decides positivity of every ancilla
    extension at once.
    """
    choi = to_choi(ch).matrix
    defect = hermitian_defect(choi)
    if defect > tol:
        return CPResult(False, float("nan"), defect)
    w, v = hermitian_eigh(choi)
    return CPResult(bool(w[0] >= -tol), float(w[0]), defect, v[:, 0])


@dataclass
class FlatPSDResult:
    ok: bool
    min_eigenvalue: float
    hermitian_defect: float
    block_label: tuple | None = None
    witness: np.ndarray | None = None

    def __bool__(self) -> bool:
        return self.ok


def is_flat_psd(ch: Channel, tol: float = PSD_TOL) -> FlatPSDResult:
    """Flat positive semidefiniteness of the kernel.

    Classes are grouped by horizontal compatibility: Γ_j ∘_H Γ_k^{-H} is
    defined exactly when Γ_j and Γ_k share the lower pair (x, w).  For each
    such group the Gram matrix G[j, k] = f(Γ_j ∘_H Γ_k^{-H}) must be
    Hermitian PSD.
    """
    n = ch.n
    worst = FlatPSDResult(ok=True, min_eigenvalue=float("inf"), hermitian_defect=0.0)
    classes = enumerate_quotient(n)
    seen: set[bytes] = set()
    for x in range(n):
        for w in range(n):
            group = [q for q in classes if q.x == x and q.w == w]
            k = len(group)
            gram = np.zeros((k, k), dtype=np.complex128)
            for i, qj in enumerate(group):
                for j2, qk in enumerate(group):
                    prod = q_horizontal_compose(qj, q_horizontal_inverse(qk))
                    gram[i, j2] = complex(ch.kernel[prod])
            key = gram.tobytes()
            if key in seen:
                continue
            seen.add(key)
            defect = hermitian_defect(gram)
            if defect > tol:
                return FlatPSDResult(False, float("nan"), defect, (x, w))
            vals, vecs = hermitian_eigh(gram)
            if vals[0] < worst.min_eigenvalue:
                worst = FlatPSDResult(
                    ok=bool(vals[0] >= -tol),
                    min_eigenvalue=float(vals[0]),
                    hermitian_defect=defect,
                    block_label=(x, w),
                    witness=vecs[:, 0],
                )
            if not worst.ok:
                return worst
    return worst


def kernel_positive_type(ch: Channel, tol: float = PSD_TOL):
    """Positive-typeness of the kernel along the vertical composition.

    Blocks are indexed by the shared 2-source (j, k); the entry at
    ((z, w), (z', w')) is f(Γ ∘_V Γ'⁻¹) = f((z, z'), (w', w)), the same
    matrix for every 2-source.  Returns (ok, min_eigenvalue).
    """
    n = ch.n
    gram = np.zeros((n * n, n * n), dtype=np.complex128)
    for z in range(n):
        for w in range(n):
            for z2 in range(n):
                for w2 in range(n):
                    gram[z * n + w, z2 * n + w2] = complex(ch.kernel.get(z, z2, w2, w))
    if hermitian_defect(gram) > tol:
        return False, float("nan")
    vals, _ = hermitian_eigh(gram)
    return bool(vals[0] >= -tol), float(vals[0])


def is_unital(obj, tol: float = 1e-12) -> bool:
    """Σ_p V_p ⋆ V_p* = χ_Ω; for kernel-only channels, equivalently K(χ_Ω) = χ_Ω."""
    if isinstance(obj, KrausFamily):
        g = pair_groupoid(obj.n)
        m = GroupoidMeasure.counting(g)
        total = AlgebraElement.zeros(g)
        for v in obj.members:
            total = total + convolve(v, involute(v, m), m)
        return total.allclose(AlgebraElement.units_indicator(g), tol)
    if isinstance(obj, Channel):
        g = pair_groupoid(obj.n)
        chi = AlgebraElement.units_indicator(g)
        return apply(obj, chi).allclose(chi, tol)
    raise TypeError("is_unital expects a Channel or a KrausFamily")


def dsf_check(v: AlgebraElement, tol: float = 1e-12) -> bool:
    """Self-adjoint convolution idempotents: V ⋆ V = V and V* = V.

    The product condition reads Σ_k V(j,k) V(k,l) = V(j,l) for all j, l
    (counting measure); such functions are exactly the projector-valued
    states generating decoherence channels.
    """
    g = v.groupoid
    n = g.n_objects
    if g.n_morphisms != n * n:
        raise GroupoidError("dsf_check expects a function on a pair groupoid")
    vals = v.values
    for j in range(n):
        for l in range(n):
            acc = sum(vals[j * n + k] * vals[k * n + l] for k in range(n))
            if abs(acc - vals[j * n + l]) > tol:
                return False
    for j in range(n):
        for k in range(n):
            if abs(vals[j * n + k].conjugate() - vals[k * n + j]) > tol:
                return False
    return True


# -- the decoherence example --


def fourier_family(n: int) -> KrausFamily:
    """V_l(j, k) = (1/n) e^{2πi l (j-k)/n} for l = 0..n-1: rank-one projectors
    onto the Fourier basis; a family of self-adjoint convolution idempotents."""
    if n < 1:
        raise ValueError("need n >= 1")
    g = pair_groupoid(n)
    members = []
    for l in range(n):
        vals = [
            cmath.exp(2j * cmath.pi * l * (j - k) / n) / n
            for j in range(n)
            for k in range(n)
        ]
        members.append(AlgebraElement(g, vals))
    return KrausFamily(n, members)


def fourier_channel(n: int) -> Channel:
    return from_kraus(fourier_family(n))


def tomogram(psi: AlgebraElement, n: int, tol: float = PSD_TOL) -> list[float]:
    """Expectations ⟨v_l| ψ |v_l⟩ against the Fourier basis, l = 0..n-1.

    ⟨ψ⟩_l = Σ_{r,s} (1/n) e^{-2πi l r/n} ψ(r, s) e^{2πi l s/n}.  Values must
    be real within tol (they are for positive-type inputs).
    """
    if psi.groupoid.n_morphisms != n * n:
        raise DimensionMismatchError("tomogram dimension mismatch")
    out = []
    for l in range(n):
        acc = 0
        for r in range(n):
            for s in range(n):
                acc += (
                    cmath.exp(-2j * cmath.pi * l * r / n)
                    * psi.values[r * n + s]
                    * cmath.exp(2j * cmath.pi * l * s / n)
                )
        acc = complex(acc) / n
        if abs(acc.imag) > tol:
            raise GroupoidError(f"tomogram value {l} is not real: {acc}")
        out.append(acc.real)
    return out


# -- randomized positivity falsification --


@dataclass
class PositivityWitness:
    """A positive-type input whose image fails the positive-type check."""

    trial: int
    ancilla: int
    state: AlgebraElement
    output: AlgebraElement
    min_eigenvalue: float


def random_positive_type(n: int, rng: np.random.Generator, rank: int | None = None) -> AlgebraElement:
    """Gram construction: ψ(j, k) = Σ_i ξ_i(j) conj(ξ_i(k)), trace one."""
    if rank is None:
        rank = int(rng.integers(1, n + 1))
    vecs = rng.normal(size=(rank, n)) + 1j * rng.normal(size=(rank, n))
    mat = sum(np.outer(v, v.conj()) for v in vecs)
    mat = mat / np.trace(mat).real
    g = pair_groupoid(n)
    return AlgebraElement(g, [mat[j, k] for j in range(n) for k in range(n)])


def random_kraus_channel(n: int, rng: np.random.Generator, members: int | None = None) -> Channel:
    """A random completely positive channel with the given Kraus rank."""
    if members is None:
        members = int(rng.integers(1, n * n + 1))
    g = pair_groupoid(n)
    fam = []
    for _ in range(members):
        vals = (rng.normal(size=n * n) + 1j * rng.normal(size=n * n)) / np.sqrt(n)
        fam.append(AlgebraElement(g, list(vals)))
    return from_kraus(KrausFamily(n, fam))


def random_choi_hermitian_channel(
    n: int, rng: np.random.Generator, psd: bool = False
) -> Channel:
    """A random kernel whose Choi matrix is Hermitian (PSD when psd=True)."""
    d = n * n
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (h + h.conj().T) / 2
    if psd:
        h = h @ h.conj().T / d
    return channel_from_choi(ChoiMatrix(n, h))


def positivity_falsifier(
    ch: Channel,
    trials: int,
    seed: int,
    ancilla: int = 1,
    tol: float = PSD_TOL,
) -> PositivityWitness | None:
    """Search for a positive-type input mapped to a non-positive-type output.

    Random positive-type states are drawn on the product of the channel's
    base with an ancilla pair groupoid of the given size and fed through the
    trivially extended channel id_M ⊗ K.  This falsifies complete positivity
    without the Choi matrix; it is a sampler, never a verifier.  Trial ranks
    cycle from one (pure, maximally falsifying for entanglement-breaking
    failures) upward.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    extended = extend_with_identity(ch, ancilla) if ancilla > 1 else ch
    dim = extended.n
    for trial in range(trials):
        rank = (trial % dim) + 1
        psi = random_positive_type(dim, rng, rank=rank)
        out = apply(extended, psi)
        verdict = is_positive_type(out, tol)
        if not verdict.ok:
            return PositivityWitness(
                trial=trial,
                ancilla=ancilla,
                state=psi,
                output=out,
                min_eigenvalue=verdict.min_eigenvalue,
            )
    return None
