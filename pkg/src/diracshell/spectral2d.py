"""Birman–Schwinger eigenvalue search in the gap for δ-shell interactions on curves.

z ∈ (−m, m) is an eigenvalue iff I + P𝒞_z is not injective; numerically we
track the smallest singular value of I + diag(P(ν_j))𝒞_z^N in the
L²(Σ)-orthonormal frame.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg, optimize

from .bem2d import (
    LayerPotentialError,
    apply_alpha_nu,
    assemble_C,
    evaluate_layer_potential,
    free_green_2d,
    one_sided_traces,
)
from .dirac_algebra import (
    InteractionStrengths,
    apply_free_dirac_fd,
    build_dirac_matrices,
    classify_strengths,
)
from .geometry2d import ClosedCurve, QuadratureGrid, build_grid

DEFAULT_RESOLUTION = 400
EDGE_MARGIN = 1e-3
TOL_BS = 1e-6
TOL_CONV = 1e-6
TOL_JUMP = 1e-4
CANDIDATE_LEVEL = 0.25
REFINE_XTOL = 1e-10
_REP2 = build_dirac_matrices(2)


class EmptyGapError(ValueError):
    pass


class ResolventPoleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Birman–Schwinger matrix


def coupling_blocks(s: InteractionStrengths, grid: QuadratureGrid):
    """Entries of P(ν_j) = ηI + τσ₃ + iλ(α·ν_j)σ₃ at every node."""
    n = grid.normal_complex
    one = np.ones(grid.N)
    return (
        (s.eta + s.tau) * one,
        -1j * s.lam * np.conj(n),
        1j * s.lam * n,
        (s.eta - s.tau) * one,
    )


def apply_coupling(s: InteractionStrengths, grid: QuadratureGrid, A: np.ndarray) -> np.ndarray:
    """diag(P(ν_j)) @ A for A with 2N rows."""
    p11, p12, p21, p22 = coupling_blocks(s, grid)
    shape = (-1,) + (1,) * (A.ndim - 1)
    out = np.empty_like(A, dtype=complex)
    out[0::2] = p11.reshape(shape) * A[0::2] + p12.reshape(shape) * A[1::2]
    out[1::2] = p21.reshape(shape) * A[0::2] + p22.reshape(shape) * A[1::2]
    return out


def bs_matrix(z: float, s: InteractionStrengths, grid: QuadratureGrid) -> np.ndarray:
    """I + P𝒞_z^N in the L²(Σ)-orthonormal frame (P commutes with the weights)."""
    C = assemble_C(z, s.m, grid)
    return np.eye(2 * grid.N) + apply_coupling(s, grid, C.symmetrized())


def sigma_min(z: float, s: InteractionStrengths, grid: QuadratureGrid) -> float:
    if s.is_zero:
        return 1.0
    return float(linalg.svdvals(bs_matrix(z, s, grid), check_finite=False)[-1])


# ---------------------------------------------------------------------------
# scan


@dataclass(frozen=True)
class ScanResult:
    z: np.ndarray
    sigma_min: np.ndarray
    N: int

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["z", "sigma_min"])
            for a, b in zip(self.z, self.sigma_min):
                w.writerow([f"{a:.17g}", f"{b:.17g}"])

    def local_minima(self, level: float = CANDIDATE_LEVEL) -> List[int]:
        s = self.sigma_min
        out = []
        for i in range(len(s)):
            left = s[i - 1] if i > 0 else math.inf
            right = s[i + 1] if i + 1 < len(s) else math.inf
            if s[i] <= left and s[i] <= right and s[i] < level:
                if not (s[i] == left and out and out[-1] == i - 1):
                    out.append(i)
        return out


def scan_grid(m: float, resolution: int = DEFAULT_RESOLUTION, margin: float = EDGE_MARGIN) -> np.ndarray:
    if m <= 0:
        raise EmptyGapError("empty gap: m must be positive")
    if resolution < 2:
        raise ValueError("scan resolution must be at least 2")
    return np.linspace(-m * (1 - margin), m * (1 - margin), resolution)


def bs_scan(s: InteractionStrengths, grid: QuadratureGrid, resolution: int = DEFAULT_RESOLUTION,
            margin: float = EDGE_MARGIN, zs: Optional[Sequence[float]] = None) -> ScanResult:
    if s.m <= 0:
        raise EmptyGapError("empty gap: m must be positive")
    zs = scan_grid(s.m, resolution, margin) if zs is None else np.asarray(zs, dtype=float)
    vals = np.array([sigma_min(z, s, grid) for z in zs])
    return ScanResult(np.asarray(zs, dtype=float), vals, grid.N)


# ---------------------------------------------------------------------------
# eigenpairs


@dataclass
class EigenpairReport:
    value: float
    sigma_min: float
    convergence: float
    jump_residual: float
    density: np.ndarray = field(repr=False)
    N: int = 0
    value_2N: float = math.nan
    multiplicity: int = 1
    accepted: bool = False
    flags: List[str] = field(default_factory=list)
    strengths: Optional[InteractionStrengths] = field(default=None, repr=False)
    grid: Optional[QuadratureGrid] = field(default=None, repr=False)

    def as_dict(self, include_density: bool = False) -> dict:
        out = {
            "value": self.value,
            "value_2n": self.value_2N,
            "n": self.N,
            "certificate": {
                "sigma_min": self.sigma_min,
                "convergence": self.convergence,
                "jump_residual": self.jump_residual,
            },
            "multiplicity": self.multiplicity,
            "accepted": self.accepted,
            "flags": list(self.flags),
        }
        if include_density:
            out["density_re"] = self.density.real.tolist()
            out["density_im"] = self.density.imag.tolist()
        return out

    def to_json(self, include_density: bool = False) -> str:
        return json.dumps(self.as_dict(include_density), indent=2)


def _refine(s: InteractionStrengths, grid: QuadratureGrid, lo: float, hi: float) -> float:
    """Minimize sigma_min² on [lo, hi]; the square is smooth at a simple zero."""
    res = optimize.minimize_scalar(
        lambda z: sigma_min(z, s, grid) ** 2,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": REFINE_XTOL * s.m, "maxiter": 200},
    )
    return float(res.x)


def _density(z: float, s: InteractionStrengths, grid: QuadratureGrid, tol_bs: float):
    B = bs_matrix(z, s, grid)
    _, sv, vh = linalg.svd(B, check_finite=False)
    v = vh[-1].conj()
    phi = v / np.sqrt(np.repeat(grid.weights, 2))
    mult = int(np.sum(sv < 10 * tol_bs))
    return phi, float(sv[-1]), max(mult, 1)


def jump_condition_residual(z: float, s: InteractionStrengths, grid: QuadratureGrid, phi) -> float:
    """max_j |i(α·ν)(γ⁺u − γ⁻u) + P(γ⁺u + γ⁻u)/2| for u = Φ_zφ, γ⁺ interior."""
    inner, outer = one_sided_traces(z, s.m, grid, phi)
    jump = (inner - outer).reshape(-1)
    mean = 0.5 * (inner + outer).reshape(-1)
    res = 1j * apply_alpha_nu(grid, jump) + apply_coupling(s, grid, mean)
    return float(np.max(np.linalg.norm(res.reshape(-1, 2), axis=1)))


def find_eigenvalues(
    s: InteractionStrengths,
    curve: ClosedCurve,
    N: int = 256,
    tol_bs: float = TOL_BS,
    tol_conv: float = TOL_CONV,
    tol_jump: float = TOL_JUMP,
    resolution: int = DEFAULT_RESOLUTION,
    scan_N: Optional[int] = None,
    check_jump: bool = True,
    scan: Optional[ScanResult] = None,
    max_candidates: Optional[int] = None,
) -> List[EigenpairReport]:
    """Locate, refine and certify eigenvalues in (−m, m).

    The scan runs on a coarser grid (``scan_N``, default min(N, 128)); every
    local minimum of sigma_min below 0.25 is refined on the N grid and again
    on the 2N grid.  ``max_candidates`` limits refinement to the deepest
    minima.
    """
    if s.m <= 0:
        raise EmptyGapError("empty gap: m must be positive")
    if s.is_zero:
        return []
    m = s.m
    cls = classify_strengths(s)
    grid = build_grid(curve, N)
    grid2 = build_grid(curve, 2 * N)
    if scan is None:
        sgrid = build_grid(curve, scan_N or min(N, 128))
        scan = bs_scan(s, sgrid, resolution)
    zs = scan.z
    step = float(zs[1] - zs[0]) if len(zs) > 1 else m
    reports = []
    candidates = scan.local_minima()
    if max_candidates is not None:
        candidates = sorted(sorted(candidates, key=lambda i: scan.sigma_min[i])[:max_candidates])
    for i in candidates:
        lo = max(zs[max(i - 1, 0)], -m * (1 - 1e-9))
        hi = min(zs[min(i + 1, len(zs) - 1)], m * (1 - 1e-9))
        flags = []
        if i <= 1 or i >= len(zs) - 2:
            flags.append("branch-point proximity")
            warnings.warn(f"candidate near the gap edge at z ≈ {zs[i]:.6g}: branch-point proximity")
        zN = _refine(s, grid, lo, hi)
        z2N = _refine(s, grid2, max(zN - step, -m * (1 - 1e-9)), min(zN + step, m * (1 - 1e-9)))
        phi, smin, mult = _density(zN, s, grid, tol_bs)
        if cls.regime == "critical" and s.eta != 0:
            if abs(zN - (-m * s.tau / s.eta)) <= 2 * step:
                flags.append("possible essential-spectrum point, not an isolated eigenvalue")
        conv = abs(zN - z2N)
        jump = math.nan
        if check_jump and smin < tol_bs:
            try:
                jump = jump_condition_residual(zN, s, grid, phi)
            except LayerPotentialError as exc:
                flags.append(f"jump residual unavailable: {exc}")
        accepted = bool(smin < tol_bs and conv < tol_conv * m and (not check_jump or jump < tol_jump))
        reports.append(EigenpairReport(
            value=zN, sigma_min=smin, convergence=conv, jump_residual=jump, density=phi, N=N,
            value_2N=z2N, multiplicity=mult, accepted=accepted, flags=flags, strengths=s, grid=grid,
        ))
    return reports


def reconstruct_eigenfunction(report: EigenpairReport, points) -> np.ndarray:
    """u = Φ_{z*}φ at the given points, shape (P, 2)."""
    s, grid = report.strengths, report.grid
    if s is None or grid is None:
        raise ValueError("report lacks strengths or grid")
    return evaluate_layer_potential(report.value, s.m, grid, report.density, points)


def eigenfunction_jump_residual(report: EigenpairReport) -> float:
    return jump_condition_residual(report.value, report.strengths, report.grid, report.density)


def defect_residual(field_fn, z: complex, m: float, x, h: float) -> float:
    """|(−iα·∇ + mα₀ − z)u(x)| by central differences of step h."""
    return float(np.linalg.norm(apply_free_dirac_fd(field_fn, _REP2, m, z, np.asarray(x, float), h)))


# ---------------------------------------------------------------------------
# Krein resolvent correction


def _green_at(z: complex, m: float, delta: np.ndarray) -> np.ndarray:
    """G_{z,2}(Δ) for complex offsets, shape (len(Δ), 2, 2)."""
    g11, g12, g21, g22 = free_green_2d(z, m, np.asarray(delta, dtype=complex))
    return np.stack([np.stack([g11, g12], -1), np.stack([g21, g22], -1)], -2)


class ResolventCorrection:
    """Discretized −Φ_z(I + P𝒞_z)⁻¹PΦ_z̄* for repeated kernel evaluations.

    K(x, y) = −Σ_{j,l} w_j G_z(x − x_j) [(I + P𝒞_z^N)⁻¹ P]_{jl} G_z(x_l − y);
    the quadrature weight enters once, through Φ_z.
    """

    def __init__(self, s: InteractionStrengths, grid: QuadratureGrid, z: complex,
                 pole_tol: float = 1e-8):
        self.s, self.grid, self.z = s, grid, complex(z)
        N = grid.N
        self.zero = s.is_zero
        if self.zero:
            return
        C = assemble_C(z, s.m, grid)
        B = np.eye(2 * N) + apply_coupling(s, grid, C.symmetrized())
        smin = linalg.svdvals(B, check_finite=False)[-1]
        if smin < pole_tol:
            raise ResolventPoleError(f"resolvent pole proximity at z = {z}: sigma_min = {smin:.3e}")
        self.sigma_min = float(smin)
        self._lu = linalg.lu_factor(np.eye(2 * N) + apply_coupling(s, grid, C.matrix))
        self._safe = 2 * math.pi * grid.length / N

    def _check(self, p: complex) -> None:
        if np.min(np.abs(self.grid.zpts - p)) < self._safe:
            raise LayerPotentialError("kernel point inside the near-field zone of the curve")

    def __call__(self, x, y) -> np.ndarray:
        if self.zero:
            return np.zeros((2, 2), dtype=complex)
        grid, N = self.grid, self.grid.N
        xc, yc = complex(x[0], x[1]), complex(y[0], y[1])
        self._check(xc)
        self._check(yc)
        row = _green_at(self.z, self.s.m, xc - grid.zpts) * grid.weights[:, None, None]
        col = _green_at(self.z, self.s.m, grid.zpts - yc)
        R = row.transpose(1, 0, 2).reshape(2, 2 * N)
        rhs = apply_coupling(self.s, grid, col.reshape(2 * N, 2))
        return -R @ linalg.lu_solve(self._lu, rhs)


def resolvent_correction_kernel(s: InteractionStrengths, grid: QuadratureGrid, z: complex,
                                x, y, pole_tol: float = 1e-8) -> np.ndarray:
    return ResolventCorrection(s, grid, z, pole_tol)(x, y)
