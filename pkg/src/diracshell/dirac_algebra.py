"""Finite-dimensional algebra of the free and δ-shell perturbed Dirac operator.

Everything here is exact matrix algebra or closed-form special functions:
the Pauli/Dirac matrices, the coupling matrix of the shell interaction,
the spectral parameter functions k(z), ζ(z), the free Green's functions in
one, two and three dimensions, and the classification of interaction
strengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)

CRITICAL_RTOL = 1e-12
NORMAL_TOL = 1e-12


class SpectralParameterError(ValueError):
    """Raised when z lies on the essential spectrum (−∞, −m] ∪ [m, ∞)."""


@dataclass(frozen=True)
class DiracRepresentation:
    """Matrices α₀, α₁, …, α_q acting on C^N."""

    q: int
    alphas: tuple

    @property
    def N(self) -> int:
        return self.alphas[0].shape[0]

    @property
    def alpha0(self) -> np.ndarray:
        return self.alphas[0]

    def alpha_dot(self, v) -> np.ndarray:
        """Return α·v = Σ_j α_j v_j for a real or complex vector v of length q."""
        v = np.atleast_1d(np.asarray(v))
        if v.shape != (self.q,):
            raise ValueError(f"expected a vector of length {self.q}, got shape {v.shape}")
        out = np.zeros((self.N, self.N), dtype=complex)
        for j in range(self.q):
            out += v[j] * self.alphas[j + 1]
        return out


def build_dirac_matrices(q: int) -> DiracRepresentation:
    """Pauli matrices for q ∈ {1, 2}, 4×4 Dirac matrices for q = 3.

    For q = 1 only α₁ = σ₁ is used as derivative coefficient and α₀ = σ₃.
    """
    if q == 1:
        alphas = (SIGMA_3, SIGMA_1)
    elif q == 2:
        alphas = (SIGMA_3, SIGMA_1, SIGMA_2)
    elif q == 3:
        zero = np.zeros((2, 2), dtype=complex)
        eye = np.eye(2, dtype=complex)
        a0 = np.block([[eye, zero], [zero, -eye]])
        alphas = (a0,) + tuple(np.block([[zero, s], [s, zero]]) for s in PAULI)
    else:
        raise ValueError("dimension out of range: q must be 1, 2 or 3")
    return DiracRepresentation(q=q, alphas=tuple(a.copy() for a in alphas))


def verify_anticommutation(rep: DiracRepresentation) -> float:
    """Max over k, j of the entrywise defect of ½(α_kα_j + α_jα_k) = δ_kj I."""
    eye = np.eye(rep.N)
    worst = 0.0
    for k, ak in enumerate(rep.alphas):
        for j, aj in enumerate(rep.alphas):
            dev = 0.5 * (ak @ aj + aj @ ak) - (eye if k == j else 0.0)
            worst = max(worst, float(np.max(np.abs(dev))))
    return worst


def symbol_factorization_check(rep: DiracRepresentation, m: float, z: complex, xi) -> float:
    """Residual of (α·ξ + mα₀ − z)(α·ξ + mα₀ + z) = (|ξ|² + m² − z²) I."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if xi.shape != (rep.q,):
        raise ValueError(f"dimension mismatch: ξ has shape {xi.shape}, expected ({rep.q},)")
    eye = np.eye(rep.N)
    h = rep.alpha_dot(xi) + m * rep.alpha0
    lhs = (h - z * eye) @ (h + z * eye)
    rhs = (xi @ xi + m * m - z * z) * eye
    return float(np.linalg.norm(lhs - rhs, 2))


# ---------------------------------------------------------------------------
# spectral parameter


def sqrt_upper(w: complex) -> complex:
    """Square root with Im √w > 0 off [0, ∞); on [0, ∞) the nonnegative root."""
    r = complex(np.sqrt(complex(w)))
    if r.imag < 0 or (r.imag == 0 and r.real < 0):
        r = -r
    return r


@dataclass(frozen=True)
class SpectralParameters:
    z: complex
    m: float
    k: complex
    zeta: complex


def in_gap(z: complex, m: float) -> bool:
    z = complex(z)
    return z.imag != 0 or abs(z.real) < m


def spectral_parameters(z: complex, m: float) -> SpectralParameters:
    """k(z) = √(z² − m²) with Im k > 0 and ζ(z) = (z + m)/k(z)."""
    z = complex(z)
    if not in_gap(z, m):
        raise SpectralParameterError(f"spectral parameter on branch cut: z={z}, m={m}")
    # (z − m)(z + m) keeps relative accuracy near the branch points
    k = sqrt_upper((z - m) * (z + m))
    return SpectralParameters(z=z, m=float(m), k=k, zeta=(z + m) / k)


# ---------------------------------------------------------------------------
# interaction strengths


@dataclass(frozen=True)
class InteractionStrengths:
    """Electrostatic η, Lorentz scalar τ, anomalous magnetic λ, mass m."""

    eta: float = 0.0
    tau: float = 0.0
    lam: float = 0.0
    m: float = 1.0

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("mass must be nonnegative")

    @property
    def d(self) -> float:
        return self.eta**2 - self.tau**2 - self.lam**2

    @property
    def criticality(self) -> float:
        return (self.d / 4.0 - 1.0) ** 2 - self.lam**2

    @property
    def is_zero(self) -> bool:
        return self.eta == 0 and self.tau == 0 and self.lam == 0

    def flipped(self) -> "InteractionStrengths":
        """(η, −τ, −λ), the partner with P_{η,−τ,−λ}P_{η,τ,λ} = dI."""
        return InteractionStrengths(self.eta, -self.tau, -self.lam, self.m)


def coupling_matrix(s: InteractionStrengths, rep: DiracRepresentation, nu=None) -> np.ndarray:
    """P = ηI + τα₀ + iλ(α·ν)α₀.

    For q = 1 the normal is ν = −1, giving ηI₂ + τσ₃ − λσ₂.
    """
    if rep.q == 1:
        nu = np.array([-1.0]) if nu is None else np.atleast_1d(np.asarray(nu, dtype=float))
    else:
        if nu is None:
            raise ValueError("a unit normal is required for q > 1")
        nu = np.asarray(nu, dtype=float)
    if abs(np.linalg.norm(nu) - 1.0) > NORMAL_TOL:
        raise ValueError(f"normal vector is not a unit vector: |ν| = {np.linalg.norm(nu)!r}")
    eye = np.eye(rep.N, dtype=complex)
    a0 = rep.alpha0
    return s.eta * eye + s.tau * a0 + 1j * s.lam * rep.alpha_dot(nu) @ a0


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class StrengthClassification:
    regime: str
    confinement: bool
    zigzag: bool
    d: float
    criticality: float
    extra_essential_point: Optional[float]
    essential_spectrum: str
    gap: Optional[tuple]
    notes: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "regime": self.regime,
            "confinement": self.confinement,
            "zigzag": self.zigzag,
            "d": self.d,
            "criticality": self.criticality,
            "extra_essential_point": self.extra_essential_point,
            "essential_spectrum": self.essential_spectrum,
            "gap": list(self.gap) if self.gap is not None else None,
            "notes": list(self.notes),
        }


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def classify_strengths(s: InteractionStrengths) -> StrengthClassification:
    """Trivial / non-critical / critical regime plus confinement and zigzag flags."""
    d = s.d
    c = s.criticality
    m = s.m
    notes = []
    if s.is_zero:
        regime = "trivial"
    elif abs(c) <= CRITICAL_RTOL * max(1.0, d * d):
        regime = "critical"
    else:
        regime = "non_critical"
    confinement = abs(d + 4.0) <= CRITICAL_RTOL * max(1.0, abs(d))
    zigzag = confinement and abs(s.lam**2 - 4.0) <= CRITICAL_RTOL * max(1.0, s.lam**2)

    extra = None
    if regime == "critical" and s.eta != 0 and not confinement:
        extra = -m * s.tau / s.eta
        if extra == 0:
            extra = 0.0
    if m > 0:
        ess = f"(-inf,{_fmt(-m)}] U [{_fmt(m)},inf)"
        if extra is not None:
            ess = f"(-inf,{_fmt(-m)}] U {{{_fmt(extra)}}} U [{_fmt(m)},inf)"
        gap = (-m, m)
    else:
        ess = "(-inf,inf)"
        gap = None
        notes.append("m = 0: empty spectral gap, no discrete spectrum")

    if regime == "critical" and not confinement:
        if s.eta == 0:
            notes.append("critical with eta = 0: no extra essential point reported")
        notes.append("critical: domain not contained in H^s for any s > 0")
    if confinement:
        notes.append("confinement: operator decouples into interior and exterior parts")
        if zigzag:
            sign = 1.0 if s.lam > 0 else -1.0
            if s.eta == 0 and s.tau == 0:
                notes.append(
                    f"zigzag: interior operator has eigenvalue {_fmt(-sign * m)} "
                    "with infinite multiplicity"
                )
                notes.append(
                    f"zigzag: exterior operator has spectrum (-inf,{_fmt(-m)}] U [{_fmt(m)},inf)"
                )
            else:
                side = "interior" if s.eta * s.tau * s.lam > 0 else "exterior"
                notes.append(
                    f"zigzag: {side} operator coincides with the eta=tau=0 zigzag operator; "
                    "the other side is equivalent to a non-critical confinement operator"
                )
        else:
            notes.append("confinement (non-critical): interior spectrum purely discrete")
            notes.append("confinement (non-critical): exterior discrete spectrum finite")
    return StrengthClassification(
        regime=regime,
        confinement=confinement,
        zigzag=zigzag,
        d=d,
        criticality=c,
        extra_essential_point=extra,
        essential_spectrum=ess,
        gap=gap,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# free Green's function


def bessel_k01(w):
    """K₀(w), K₁(w) for arrays with Re w > 0 (complex w allowed)."""
    w = np.asarray(w)
    if np.iscomplexobj(w) and np.any(w.imag != 0):
        if np.any(w.real <= 0):
            raise SpectralParameterError("unsupported spectral parameter: Bessel argument with Re ≤ 0")
        return special.kv(0, w), special.kv(1, w)
    w = w.real if np.iscomplexobj(w) else w
    if np.any(w <= 0):
        raise SpectralParameterError("unsupported spectral parameter: Bessel argument with Re ≤ 0")
    return special.k0(w), special.k1(w)


def fundamental_solution(rep: DiracRepresentation, s: InteractionStrengths, z: complex, x) -> np.ndarray:
    """Integral kernel G_{z,q}(x) of (A₀ − z)⁻¹ at x ≠ 0."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (rep.q,):
        raise ValueError(f"expected a point in R^{rep.q}")
    r = float(np.linalg.norm(x))
    if r == 0:
        raise ValueError("singular point: G is not defined at x = 0")
    sp = spectral_parameters(z, s.m)
    k, zeta, m = sp.k, sp.zeta, s.m
    z = sp.z
    if rep.q == 1:
        sg = math.copysign(1.0, x[0])
        return 0.5j * np.exp(1j * k * r) * np.array([[zeta, sg], [sg, 1.0 / zeta]])
    if rep.q == 2:
        k0, k1 = bessel_k01(-1j * k * r)
        eye = np.eye(2)
        return (k / (2 * np.pi)) * k1 * rep.alpha_dot(x) / r + (k0 / (2 * np.pi)) * (
            z * eye + m * rep.alpha0
        )
    eye = np.eye(4)
    return (
        (z * eye + m * rep.alpha0 + (1 - 1j * k * r) * 1j * rep.alpha_dot(x) / r**2)
        * np.exp(1j * k * r)
        / (4 * np.pi * r)
    )


def apply_free_dirac_fd(field_fn, rep: DiracRepresentation, m: float, z: complex, x, h: float):
    """(−iα·∇ + mα₀ − z) applied to a matrix- or vector-valued field by central differences."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    f0 = np.asarray(field_fn(x))
    out = (m * rep.alpha0 - z * np.eye(rep.N)) @ f0
    for j in range(rep.q):
        e = np.zeros(rep.q)
        e[j] = h
        df = (np.asarray(field_fn(x + e)) - np.asarray(field_fn(x - e))) / (2 * h)
        out = out - 1j * rep.alphas[j + 1] @ df
    return out


def fundamental_solution_residual(
    rep: DiracRepresentation, s: InteractionStrengths, z: complex, x, h: float
) -> float:
    """Finite-difference norm of (−iα·∇ + mα₀ − z)G_{z,q} at x; O(h²)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.linalg.norm(x) <= 10 * h:
        raise ValueError("sample point too close to the origin for the given step")
    res = apply_free_dirac_fd(lambda p: fundamental_solution(rep, s, z, p), rep, s.m, z, x, h)
    return float(np.linalg.norm(res, 2))


def random_unit_vector(q: int, rng: np.random.Generator) -> np.ndarray:
    if q == 1:
        return np.array([-1.0])
    v = rng.normal(size=q)
    return v / np.linalg.norm(v)


__all__: Sequence[str] = [
    "DiracRepresentation",
    "InteractionStrengths",
    "SpectralParameterError",
    "SpectralParameters",
    "StrengthClassification",
    "apply_free_dirac_fd",
    "bessel_k01",
    "build_dirac_matrices",
    "classify_strengths",
    "coupling_matrix",
    "fundamental_solution",
    "fundamental_solution_residual",
    "in_gap",
    "spectral_parameters",
    "sqrt_upper",
    "symbol_factorization_check",
    "verify_anticommutation",
]
