"""One-dimensional Dirac operator with a δ-interaction at the origin.

The boundary triple {C², Γ₀, Γ₁} with Γ₀f = −iσ₁(f(0+) − f(0−)) and
Γ₁f = (f(0+) + f(0−))/2 gives a diagonal Weyl function, so the discrete
spectrum is available in closed form.  A matrix-determinant root scan is
provided as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy import optimize
from scipy.special import roots_laguerre

from .dirac_algebra import (
    SIGMA_1,
    SIGMA_3,
    InteractionStrengths,
    SpectralParameterError,
    build_dirac_matrices,
    coupling_matrix,
    fundamental_solution,
    spectral_parameters,
)

D4_TOL = 1e-10
EDGE_RTOL = 1e-12
_REP1 = build_dirac_matrices(1)


class EmptyGapError(ValueError):
    """Raised when m ≤ 0, so there is no gap (−m, m) to search."""


@dataclass(frozen=True)
class WeylValue1D:
    z: complex
    M: np.ndarray


@dataclass(frozen=True)
class Eigenvalue1D:
    value: float
    branch: str  # "d_equals_4", "z_plus", "z_minus" or "numeric"
    admissible: bool
    residual: float

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "branch": self.branch,
            "admissible": self.admissible,
            "residual": self.residual,
        }


def weyl_1d(z: complex, m: float) -> WeylValue1D:
    sp = spectral_parameters(z, m)
    return WeylValue1D(z=sp.z, M=0.5j * np.diag([sp.zeta, 1.0 / sp.zeta]))


def gamma_field_1d(z: complex, m: float, xi, x: float) -> np.ndarray:
    """γ(z)ξ evaluated at x ≠ 0."""
    if x == 0:
        raise ValueError("γ-field is evaluated off the interaction point")
    s = InteractionStrengths(m=m)
    return fundamental_solution(_REP1, s, z, [x]) @ np.asarray(xi, dtype=complex)


def coupling_1d(s: InteractionStrengths) -> np.ndarray:
    return coupling_matrix(s, _REP1)


def bs_matrix_1d(z: complex, s: InteractionStrengths) -> np.ndarray:
    return np.eye(2) + coupling_1d(s) @ weyl_1d(z, s.m).M


def bs_residual_1d(z: float, s: InteractionStrengths) -> float:
    """|det(I₂ + P M(z))| for z in the gap."""
    if s.m <= 0:
        raise EmptyGapError("empty gap: m must be positive")
    if abs(z) >= s.m:
        raise SpectralParameterError("z must lie in the open gap (−m, m)")
    return float(abs(np.linalg.det(bs_matrix_1d(z, s))))


def eigen_equation_residual(z: float, s: InteractionStrengths) -> float:
    """|(d/4 − 1)√(m² − z²) − (mτ + ηz)|."""
    m = s.m
    return abs((s.d / 4.0 - 1.0) * math.sqrt((m - z) * (m + z)) - (m * s.tau + s.eta * z))


def quadratic_residual(z: float, s: InteractionStrengths) -> float:
    a = s.d / 4.0 - 1.0
    m = s.m
    return abs(
        (s.eta**2 + a * a) * z * z + 2 * m * s.tau * s.eta * z + m * m * (s.tau**2 - a * a)
    )


def discrete_spectrum_1d_closed_form(s: InteractionStrengths) -> List[Eigenvalue1D]:
    m = s.m
    if m <= 0:
        raise EmptyGapError("empty gap: m must be positive")
    if s.is_zero:
        return []
    d = s.d
    if abs(d - 4.0) < D4_TOL:
        z = -m * s.tau / s.eta + 0.0
        return [Eigenvalue1D(z, "d_equals_4", True, eigen_equation_residual(z, s))]
    a = d / 4.0 - 1.0
    root = abs(a) * math.sqrt(s.lam**2 + (d / 4.0 + 1.0) ** 2)
    denom = s.eta**2 + a * a
    out = []
    seen = []
    for branch, sign in (("z_plus", 1.0), ("z_minus", -1.0)):
        z = m * (-s.eta * s.tau + sign * root) / denom
        # roots at ±m up to rounding are thresholds, not eigenvalues
        admissible = (d - 4.0) * (m * s.tau + s.eta * z) > 0 and abs(z) < m * (1.0 - EDGE_RTOL)
        if not admissible or any(abs(z - w) <= 1e-14 * m for w in seen):
            continue
        seen.append(z)
        out.append(Eigenvalue1D(z, branch, True, eigen_equation_residual(z, s)))
    return sorted(out, key=lambda e: e.value)


def _scaled_det(theta, s: InteractionStrengths):
    """det(I + P M(z)) · sin θ at z = −m cos θ; real and smooth on [0, π].

    With κ = √(m² − z²) one has iζ/2 = (z + m)/(2κ) and i/(2ζ) = −κ/(2(z + m)),
    so the determinant is real in the gap.
    """
    theta = np.asarray(theta, dtype=float)
    m = s.m
    z = -m * np.cos(theta)
    kappa = m * np.sin(theta)
    a = s.eta + s.tau
    b = s.eta - s.tau
    # (1 + a(z+m)/(2κ))(1 − bκ/(2(z+m))) + λ²/4, multiplied by sin θ = κ/m
    zp = z + m
    return ((kappa + 0.5 * a * zp) * (1.0 - 0.5 * b * kappa / zp) + 0.25 * s.lam**2 * kappa) / m


def discrete_spectrum_1d_numeric(
    s: InteractionStrengths, resolution: int = 4000, tol: float = 1e-8
) -> List[Eigenvalue1D]:
    """Roots of det(I₂ + P M(z)) in the gap by scanning and bracketing.

    The scan runs in the angle θ with z = −m cos θ so that points near the
    branch points ±m are resolved; the determinant is multiplied by sin θ,
    which is positive inside the gap and removes the 1/√(m² − z²) blow-up.
    """
    m = s.m
    if m <= 0:
        raise EmptyGapError("empty gap: m must be positive")
    if s.is_zero:
        return []
    thetas = np.linspace(0.0, math.pi, resolution + 1)[1:-1]
    vals = _scaled_det(thetas, s)

    def f(t):
        return float(_scaled_det(t, s))

    roots = []
    for i in np.nonzero(vals[:-1] * vals[1:] <= 0)[0]:
        if vals[i] == 0.0:
            roots.append(thetas[i])
        elif vals[i + 1] != 0.0:
            roots.append(optimize.brentq(f, thetas[i], thetas[i + 1],
                                         xtol=1e-15, rtol=4 * np.finfo(float).eps))
    # tangential zeros do not change sign: look at small local minima of |f|
    absval = np.abs(vals)
    inner = np.arange(1, len(thetas) - 1)
    cand = inner[(absval[inner] <= absval[inner - 1]) & (absval[inner] <= absval[inner + 1])
                 & (vals[inner - 1] * vals[inner + 1] > 0)]
    for i in cand:
        res = optimize.minimize_scalar(lambda t: abs(f(t)), bounds=(thetas[i - 1], thetas[i + 1]),
                                       method="bounded", options={"xatol": 1e-14})
        if abs(res.fun) < tol:
            roots.append(res.x)
    out = []
    for th in sorted(roots):
        z = -m * math.cos(th)
        if any(abs(z - e.value) <= 1e-12 * m for e in out):
            continue
        out.append(Eigenvalue1D(z, "numeric", True, eigen_equation_residual(z, s)))
    return out


def resolvent_kernel_1d(z: complex, s: InteractionStrengths, x: float, y: float,
                        pole_tol: float = 1e-12) -> np.ndarray:
    """Kernel of (A_{η,τ,λ} − z)⁻¹ − (A₀ − z)⁻¹ at (x, y), both nonzero.

    K(x, y) = −G_{z,1}(x)(I + PM(z))⁻¹P G_{z,1}(−y).
    """
    if x == 0 or y == 0:
        raise ValueError("kernel is evaluated off the interaction point")
    free = InteractionStrengths(m=s.m)
    B = bs_matrix_1d(z, s)
    if abs(np.linalg.det(B)) <= pole_tol:
        raise ValueError(f"pole of resolvent at z = {z}")
    P = coupling_1d(s)
    Gx = fundamental_solution(_REP1, free, z, [x])
    Gy = fundamental_solution(_REP1, free, z, [-y])
    return -Gx @ np.linalg.solve(B, P) @ Gy


def full_resolvent_kernel_1d(z: complex, s: InteractionStrengths, x: float, y: float) -> np.ndarray:
    free = InteractionStrengths(m=s.m)
    return fundamental_solution(_REP1, free, z, [x - y]) + resolvent_kernel_1d(z, s, x, y)


# ---------------------------------------------------------------------------
# Green's identity


@dataclass
class PiecewiseSpinor:
    """A C²-valued function smooth on (−∞, 0) and (0, ∞), given piecewise.

    Each callable takes an array of points and returns an array of shape
    (len(x), 2).  Pieces should decay exponentially at infinity.
    """

    minus: Callable
    plus: Callable
    dminus: Callable
    dplus: Callable

    def gamma0(self) -> np.ndarray:
        jump = self.plus(np.array([0.0]))[0] - self.minus(np.array([0.0]))[0]
        return -1j * SIGMA_1 @ jump

    def gamma1(self) -> np.ndarray:
        return 0.5 * (self.plus(np.array([0.0]))[0] + self.minus(np.array([0.0]))[0])


def exponential_spinor(c_sgn, c_even, rate: float = 1.0) -> PiecewiseSpinor:
    """f(x) = c_sgn sgn(x) e^{−rate|x|} + c_even e^{−rate|x|}."""
    a = np.asarray(c_sgn, dtype=complex)
    b = np.asarray(c_even, dtype=complex)

    def plus(x):
        return np.exp(-rate * np.abs(x))[:, None] * (a + b)[None, :]

    def minus(x):
        return np.exp(-rate * np.abs(x))[:, None] * (b - a)[None, :]

    def dplus(x):
        return -rate * plus(x)

    def dminus(x):
        return rate * minus(x)

    return PiecewiseSpinor(minus, plus, dminus, dplus)


def surjectivity_witness(c) -> PiecewiseSpinor:
    """f with Γ₀f = (c₁, c₂), Γ₁f = (c₃, c₄)."""
    c1, c2, c3, c4 = c
    return exponential_spinor(0.5j * np.array([c2, c1]), np.array([c3, c4]))


def _apply_S_star(f_vals, df_vals, m: float):
    # −iσ₁ f' + mσ₃ f, row-wise
    return -1j * df_vals @ SIGMA_1.T + m * f_vals @ SIGMA_3.T


def green_identity_residual_1d(
    f: PiecewiseSpinor, g: PiecewiseSpinor, m: float, n_nodes: int = 60, scale: float = 1.0
) -> float:
    """|(Tf, g) − (f, Tg) − (Γ₁f, Γ₀g) + (Γ₀f, Γ₁g)| by Gauss–Laguerre quadrature.

    ``scale`` is the decay rate used to weight the Laguerre rule on each half-line.
    """
    t, w = roots_laguerre(n_nodes)
    x = t / scale
    wt = np.exp(t + np.log(w)) / scale

    def inner(u, v):
        return np.sum(wt * np.sum(u * np.conj(v), axis=1))

    total = 0j
    for piece_f, piece_df, piece_g, piece_dg, sign in (
        (f.plus, f.dplus, g.plus, g.dplus, 1.0),
        (f.minus, f.dminus, g.minus, g.dminus, -1.0),
    ):
        pts = sign * x
        fv, dfv = piece_f(pts), piece_df(pts)
        gv, dgv = piece_g(pts), piece_dg(pts)
        Tf = _apply_S_star(fv, dfv, m)
        Tg = _apply_S_star(gv, dgv, m)
        total += inner(Tf, gv) - inner(fv, Tg)
    boundary = np.vdot(g.gamma0(), f.gamma1()) - np.vdot(g.gamma1(), f.gamma0())
    return float(abs(total - boundary))
