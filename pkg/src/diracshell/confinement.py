"""Transmission and boundary-condition matrices for the confinement case d = −4."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dirac_algebra import (
    DiracRepresentation,
    InteractionStrengths,
    apply_free_dirac_fd,
    coupling_matrix,
)

CONFINEMENT_TOL = 1e-12


@dataclass(frozen=True)
class TransmissionData:
    """R = (i/2)(α·ν)P and either Q (d ≠ −4) or the decoupled conditions (d = −4).

    Traces of functions in the operator domain satisfy (I − R)γ⁺f = (I + R)γ⁻f.
    """

    R: np.ndarray
    d: float
    Q: Optional[np.ndarray] = None
    bc_plus: Optional[np.ndarray] = None
    bc_minus: Optional[np.ndarray] = None

    @property
    def confinement(self) -> bool:
        return self.Q is None


def transmission_data(
    s: InteractionStrengths, rep: DiracRepresentation, nu
) -> TransmissionData:
    P = coupling_matrix(s, rep, nu)
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    an = rep.alpha_dot(nu)
    R = 0.5j * an @ P
    d = s.d
    eye = np.eye(rep.N, dtype=complex)
    if abs(d + 4.0) <= CONFINEMENT_TOL * max(1.0, abs(d)):
        return TransmissionData(
            R=R,
            d=d,
            bc_plus=2 * eye - 1j * an @ P,
            bc_minus=2 * eye + 1j * an @ P,
        )
    # polynomial form of (I − R)⁻¹(I + R), valid because R² = −(d/4)I
    IR = eye + R
    return TransmissionData(R=R, d=d, Q=(4.0 / (d + 4.0)) * IR @ IR)


def transmission_residuals(td: TransmissionData) -> dict:
    """Spectral-norm defects of the algebraic identities satisfied by ``td``."""
    N = td.R.shape[0]
    eye = np.eye(N)
    out = {"R_squared": float(np.linalg.norm(td.R @ td.R + (td.d / 4.0) * eye, 2))}
    if td.Q is not None:
        out["transmission"] = float(np.linalg.norm((eye - td.R) @ td.Q - (eye + td.R), 2))
    else:
        out["decoupling_plus"] = float(np.linalg.norm((eye - td.R) @ (eye + td.R), 2))
        out["decoupling_minus"] = float(np.linalg.norm((eye + td.R) @ (eye - td.R), 2))
    return out


def zigzag_kernel_function(c: complex, n: int):
    """f_n(x) = (x₁ − ix₂ − c₁ + ic₂)^{−n} e₂ as a callable on R²."""
    cbar = np.conj(complex(c))

    def f(x):
        w = complex(x[0], -x[1]) - cbar
        return np.array([0.0, w ** (-n)], dtype=complex)

    return f


def zigzag_kernel_check(
    rep: DiracRepresentation, m: float, c: complex, n: int, points, h: float
) -> float:
    """Max over samples of |(−iα·∇ + mα₀ + m) f_n| by central differences.

    In exact arithmetic f_n lies in the kernel; the returned value is the
    O(h²) truncation error of the difference quotient.
    """
    if rep.q != 2:
        raise ValueError("zigzag kernel elements are only available for q = 2")
    if n <= 2:
        raise ValueError("n must be larger than 2")
    f = zigzag_kernel_function(c, n)
    worst = 0.0
    for p in np.atleast_2d(np.asarray(points, dtype=float)):
        dist = abs(complex(p[0], p[1]) - complex(c))
        if dist <= 10 * h:
            raise ValueError("sample point too close to the pole")
        # shift −z = +m
        res = apply_free_dirac_fd(f, rep, m, -m, p, h)
        worst = max(worst, float(np.linalg.norm(res)))
    return worst


def boundary_condition_rank(bc: np.ndarray, tol: float = 1e-10) -> int:
    sv = np.linalg.svd(bc, compute_uv=False)
    return int(np.sum(sv > tol * max(1.0, sv[0])))
