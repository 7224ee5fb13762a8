"""Nyström discretization of boundary integral operators for the 2D Dirac operator.

Layout: unknowns are node-major spinors, index 2j + a for node j and spinor
component a.  Representation q = 2 with α₁ = σ₁, α₂ = σ₂, α₀ = σ₃, so for a
planar vector v with complex form V = v₁ + iv₂ one has α·v = [[0, V̄], [V, 0]].

The kernel of 𝒞_z is split as

    G_z(x − y) = i(α·(x−y))/(2π|x−y|²)                       (Cauchy part)
               + (k/2π)(K₁(κr) − 1/(κr))(α·(x−y))/r          (log-singular)
               + (1/2π)K₀(κr)(z + mσ₃)                        (log-singular)

with κ = −ik.  The Cauchy part is reduced to the periodic Hilbert kernel
π cot(π(s − t)) plus a smooth remainder; the log-singular parts use Kress
product quadrature for ln(4 sin²(π(t − s))).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .dirac_algebra import (
    InteractionStrengths,
    bessel_k01,
    build_dirac_matrices,
    fundamental_solution,
    spectral_parameters,
)
from .geometry2d import QuadratureGrid

EULER_GAMMA = float(np.euler_gamma)
SIGMA_3 = np.diag([1.0, -1.0]).astype(complex)
_REP2 = build_dirac_matrices(2)

# Nyquist-mode conventions for the discrete Hilbert transform in the two
# off-diagonal spinor blocks of 𝒟_α (see ``hilbert_weights``).
NYQUIST_UPPER = -1.0
NYQUIST_LOWER = 1.0


class LayerPotentialError(ValueError):
    pass


# ---------------------------------------------------------------------------
# quadrature weights


def hilbert_weights(N: int, nyquist: float = 0.0) -> np.ndarray:
    """Matrix W with (Wf)_i ≈ PV∫₀¹ π cot(π(s − t_i)) f(s) ds.

    Exact for trigonometric polynomials of degree < N/2, where the symbol is
    πi·sgn(n).  The Nyquist mode (−1)^j is mapped to πi·nyquist·(−1)^i.
    """
    p = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    W = np.zeros((N, N), dtype=complex)
    odd = p % 2 == 1
    W[odd] = -(2.0 * math.pi / N) / np.tan(math.pi * p[odd] / N)
    if nyquist:
        W += nyquist * (1j * math.pi / N) * np.where(p % 2 == 0, 1.0, -1.0)
    return W


def kress_weights(N: int) -> np.ndarray:
    """Matrix R with (Rf)_i ≈ ∫₀¹ ln(4 sin²(π(t_i − s))) f(s) ds (spectral)."""
    n = N // 2
    p = np.arange(N)
    m = np.arange(1, n)
    row = -(1.0 / n) * (np.cos(2 * math.pi * np.outer(p, m) / N) @ (1.0 / m))
    row -= (1.0 / (2.0 * n * n)) * np.cos(math.pi * p)
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    return row[idx]


# ---------------------------------------------------------------------------
# geometry cache


@dataclass
class _Geometry:
    N: int
    delta: np.ndarray  # X_i − Y_j (complex), zero diagonal
    r: np.ndarray  # |X_i − Y_j|, diagonal set to 1 to keep arithmetic finite
    log4sin2: np.ndarray  # ln(4 sin²(π(t_i − s_j))), diagonal 0
    H: np.ndarray  # smooth remainder of γ'(s)/(γ(s) − γ(t)) − π cot(π(s − t))
    speed: np.ndarray
    u: np.ndarray  # |γ'|/γ'
    n: np.ndarray  # ν₁ + iν₂
    kress: np.ndarray
    hilbert_upper: np.ndarray
    hilbert_lower: np.ndarray
    hilbert_riesz: np.ndarray
    offdiag: np.ndarray
    cache: dict = field(default_factory=dict)


def _geometry(grid: QuadratureGrid) -> _Geometry:
    geo = getattr(grid, "_bem_geometry", None)
    if geo is not None:
        return geo
    N = grid.N
    X = grid.zpts
    delta = X[:, None] - X[None, :]
    off = ~np.eye(N, dtype=bool)
    r = np.abs(delta)
    r[~off] = 1.0
    t = grid.t
    sdiff = t[None, :] - t[:, None]  # s_j − t_i
    sin2 = np.sin(math.pi * sdiff) ** 2
    log4sin2 = np.zeros((N, N))
    log4sin2[off] = np.log(4.0 * sin2[off])
    H = np.empty((N, N), dtype=complex)
    dz = grid.dz
    with np.errstate(divide="ignore", invalid="ignore"):
        full = dz[None, :] / (-delta) - math.pi / np.tan(math.pi * sdiff)
    H[off] = full[off]
    H[~off] = grid.ddz / (2.0 * dz)
    speed = np.abs(dz)
    geo = _Geometry(
        N=N,
        delta=delta,
        r=r,
        log4sin2=log4sin2,
        H=H,
        speed=speed,
        u=speed / dz,
        n=-1j * dz / speed,
        kress=kress_weights(N),
        hilbert_upper=hilbert_weights(N, NYQUIST_UPPER),
        hilbert_lower=hilbert_weights(N, NYQUIST_LOWER),
        hilbert_riesz=hilbert_weights(N, NYQUIST_UPPER),
        offdiag=off,
    )
    object.__setattr__(grid, "_bem_geometry", geo)
    return geo


def _interleave(b11, b12, b21, b22) -> np.ndarray:
    N = b11.shape[0]
    A = np.empty((2 * N, 2 * N), dtype=complex)
    A[0::2, 0::2] = b11
    A[0::2, 1::2] = b12
    A[1::2, 0::2] = b21
    A[1::2, 1::2] = b22
    return A


def spinor_blocks(A: np.ndarray):
    return A[0::2, 0::2], A[0::2, 1::2], A[1::2, 0::2], A[1::2, 1::2]


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True)
class DiscretizedOperator:
    label: str
    N: int
    matrix: np.ndarray
    grid: QuadratureGrid = field(repr=False)
    z: complex = 0.0
    m: float = 0.0

    @property
    def scalar(self) -> bool:
        return self.matrix.shape[0] == self.N

    def weights_vector(self) -> np.ndarray:
        w = self.grid.weights
        return w if self.scalar else np.repeat(w, 2)

    def symmetrized(self) -> np.ndarray:
        """W^{1/2} A W^{−1/2}: the matrix of the operator in an L²(Σ)-orthonormal frame."""
        s = np.sqrt(self.weights_vector())
        return s[:, None] * self.matrix / s[None, :]

    def hermiticity_defect(self) -> float:
        S = self.symmetrized()
        return float(np.linalg.norm(S - S.conj().T, 2))

    def norm(self) -> float:
        return float(np.linalg.norm(self.symmetrized(), 2))


def _cauchy_blocks(geo: _Geometry):
    """Upper and lower off-diagonal blocks of 𝒟_α.

    The upper block is (1/4)𝓡^N diag(|γ'|/γ'); the lower block is its adjoint
    in the weighted inner product, which keeps 𝒟_α^N exactly Hermitian while
    −4(𝒟_α^N(α·ν))² = I holds to the accuracy of (𝓡^N)² = 4I.
    """
    if "cauchy" not in geo.cache:
        c = -1j / (2.0 * math.pi)
        upper = c * (geo.hilbert_riesz + geo.H / geo.N) * geo.u[None, :]
        w = geo.speed
        lower = upper.conj().T * w[None, :] / w[:, None]
        geo.cache["cauchy"] = (upper, lower)
    return geo.cache["cauchy"]


def assemble_D_alpha(grid: QuadratureGrid) -> DiscretizedOperator:
    geo = _geometry(grid)
    if "D" not in geo.cache:
        upper, lower = _cauchy_blocks(geo)
        zero = np.zeros_like(upper)
        geo.cache["D"] = _interleave(zero, upper, lower, zero)
    return DiscretizedOperator("D_alpha", grid.N, geo.cache["D"].copy(), grid)


def _bessel_terms(kappa: complex, x: np.ndarray):
    """K₀, K₁, I₀, I₁ at κx; real special functions when κ > 0."""
    if isinstance(kappa, float):
        w = kappa * x
        return special.k0(w), special.k1(w), special.i0(w), special.i1(w)
    w = kappa * x
    return special.kv(0, w), special.kv(1, w), special.iv(0, w), special.iv(1, w)


def interpolation_matrix(N: int, M: int, shift: int) -> np.ndarray:
    """Trigonometric interpolation from N to M equispaced samples on [0, 1).

    Frequencies −N/2 + shift, ..., N/2 − 1 + shift are used, so the Nyquist
    mode is assigned to −N/2 (shift 0) or +N/2 (shift 1).
    """
    freqs = np.arange(-N // 2, N // 2) + shift
    tc = np.arange(N) / N
    tf = np.arange(M) / M
    F = np.exp(-2j * math.pi * np.outer(freqs, tc)) / N  # coefficients from samples
    E = np.exp(2j * math.pi * np.outer(tf, freqs))
    return E @ F


@dataclass
class _FineGeometry:
    """Coarse-row, fine-column geometry for the compact part of 𝒞_z."""

    delta: np.ndarray
    r: np.ndarray
    log4sin2: np.ndarray
    kress: np.ndarray
    speed: np.ndarray
    diag_mask: np.ndarray
    interp1: np.ndarray
    interp2: np.ndarray
    M: int


def _fine_geometry(grid: QuadratureGrid, factor: int) -> _FineGeometry:
    geo = _geometry(grid)
    key = ("fine", factor)
    if key in geo.cache:
        return geo.cache[key]
    N = grid.N
    M = factor * N
    tf = np.arange(M) / M
    Zf = grid.curve.z(tf)
    dzf = grid.curve.dz(tf)
    rows = np.arange(N) * factor
    delta = grid.zpts[:, None] - Zf[None, :]
    diag_mask = np.zeros((N, M), dtype=bool)
    diag_mask[np.arange(N), rows] = True
    r = np.abs(delta)
    r[diag_mask] = 1.0
    sdiff = tf[None, :] - grid.t[:, None]
    log4sin2 = np.zeros((N, M))
    off = ~diag_mask
    log4sin2[off] = np.log(4.0 * np.sin(math.pi * sdiff[off]) ** 2)
    fg = _FineGeometry(
        delta=delta,
        r=r,
        log4sin2=log4sin2,
        kress=kress_weights(M)[rows],
        speed=np.abs(dzf),
        diag_mask=diag_mask,
        interp1=interpolation_matrix(N, M, 0),
        interp2=interpolation_matrix(N, M, 1),
        M=M,
    )
    geo.cache[key] = fg
    return fg


OVERSAMPLING = 2


def compact_blocks(z: complex, m: float, grid: QuadratureGrid, oversample: int = OVERSAMPLING):
    """Blocks of 𝒞_z − 𝒟_α as (K₀-part weight, upper, lower) acting on coarse samples.

    The kernel is integrated on a grid refined by ``oversample`` after
    trigonometric interpolation of the density, which removes aliasing of
    kernel-density products at the highest resolved modes.
    """
    sp = spectral_parameters(z, m)
    k = sp.k
    kappa = -1j * k
    if abs(kappa.imag) <= 1e-15 * abs(kappa):
        kappa = float(kappa.real)
    fg = _fine_geometry(grid, oversample)
    M = fg.M
    off = ~fg.diag_mask
    r = fg.r
    K0, K1, I0, I1 = _bessel_terms(kappa, r)
    two_pi = 2.0 * math.pi

    # α·(x−y)/r part: scalar f(r) multiplying [[0, Δ̄/r], [Δ/r, 0]]; both the
    # log coefficient and the smooth remainder vanish on the diagonal
    LB = np.where(off, (k / two_pi) * 0.5 * I1, 0.0)
    SB = np.where(off, (k / two_pi) * (K1 - 1.0 / (kappa * r)) - LB * fg.log4sin2, 0.0)
    weightB = (fg.kress * LB + SB / M) * fg.speed[None, :]
    unit = fg.delta / r
    up_B = weightB * np.conj(unit)
    lo_B = weightB * unit

    # K₀ part: scalar g(r) multiplying (z + mσ₃)
    speed_c = np.abs(grid.dz)
    LC = np.where(off, -(0.5 / two_pi) * I0, -(0.5 / two_pi))
    SC = (1.0 / two_pi) * K0 - LC * fg.log4sin2
    diag = (1.0 / two_pi) * (-np.log(kappa / 2.0) - EULER_GAMMA - np.log(speed_c / two_pi))
    SC[fg.diag_mask] = diag
    weightC = (fg.kress * LC + SC / M) * fg.speed[None, :]

    # spinor component 1 uses frequencies [−N/2, N/2), component 2 uses (−N/2, N/2]
    return weightC @ fg.interp1, weightC @ fg.interp2, up_B @ fg.interp2, lo_B @ fg.interp1


def _weighted_adjoint(A: np.ndarray, w: np.ndarray) -> np.ndarray:
    return A.conj().T * w[None, :] / w[:, None]


def assemble_C(z: complex, m: float, grid: QuadratureGrid,
               oversample: int = OVERSAMPLING) -> DiscretizedOperator:
    """Nyström matrix of 𝒞_z.

    The compact part is averaged with the weighted adjoint of its value at z̄,
    so that 𝒞_z̄^N = (𝒞_z^N)* holds exactly in L²(Σ) and 𝒞_z^N is self-adjoint
    for z in the gap.  Both terms are consistent discretizations.
    """
    z = complex(z)
    c11, c22, up_B, lo_B = compact_blocks(z, m, grid, oversample)
    K = _interleave((z + m) * c11, up_B, lo_B, (z - m) * c22)
    w2 = np.repeat(grid.weights, 2)
    if z.imag == 0.0:
        Kbar = K
    else:
        d11, d22, up_b, lo_b = compact_blocks(z.conjugate(), m, grid, oversample)
        Kbar = _interleave((z.conjugate() + m) * d11, up_b, lo_b, (z.conjugate() - m) * d22)
    K = 0.5 * (K + _weighted_adjoint(Kbar, w2))
    upper, lower = _cauchy_blocks(_geometry(grid))
    K[0::2, 1::2] += upper
    K[1::2, 0::2] += lower
    return DiscretizedOperator("C", grid.N, K, grid, z=z, m=float(m))


def alpha_nu_matrix(grid: QuadratureGrid) -> np.ndarray:
    """blockdiag(α·ν_j) as a 2N×2N matrix."""
    n = _geometry(grid).n
    N = grid.N
    A = np.zeros((2 * N, 2 * N), dtype=complex)
    idx = np.arange(N)
    A[2 * idx, 2 * idx + 1] = np.conj(n)
    A[2 * idx + 1, 2 * idx] = n
    return A


def apply_alpha_nu(grid: QuadratureGrid, phi: np.ndarray) -> np.ndarray:
    n = _geometry(grid).n
    out = np.empty_like(phi, dtype=complex)
    out[0::2] = np.conj(n) * phi[1::2]
    out[1::2] = n * phi[0::2]
    return out


def alpha0_matrix(N: int) -> np.ndarray:
    return np.diag(np.tile([1.0, -1.0], N)).astype(complex)


def cinv_residual(z: complex, m: float, grid: QuadratureGrid,
                  C: Optional[DiscretizedOperator] = None) -> float:
    """‖4(𝒞_z^N diag(α·ν_j))² + I‖₂."""
    if C is None:
        C = assemble_C(z, m, grid)
    A = C.matrix @ alpha_nu_matrix(grid)
    # α·ν is unitary pointwise, so the weighted frame leaves the norm as is
    s = np.sqrt(C.weights_vector())
    E = 4.0 * A @ A + np.eye(A.shape[0])
    E = s[:, None] * E / s[None, :]
    return float(np.linalg.norm(E, 2))


def assemble_riesz(grid: QuadratureGrid) -> DiscretizedOperator:
    geo = _geometry(grid)
    R = -(2j / math.pi) * (geo.hilbert_riesz + geo.H / grid.N)
    return DiscretizedOperator("Riesz", grid.N, R, grid)


def riesz_square_residual(grid: QuadratureGrid) -> float:
    R = assemble_riesz(grid)
    S = R.symmetrized()
    return float(np.linalg.norm(S @ S - 4.0 * np.eye(grid.N), 2))


def alpha0_anticommutator(D: DiscretizedOperator) -> float:
    a0 = alpha0_matrix(D.N)
    return float(np.max(np.abs(a0 @ D.matrix + D.matrix @ a0)))


# ---------------------------------------------------------------------------
# CSV dump


def dump_matrix_csv(op: DiscretizedOperator, path) -> None:
    """Header "label,N,z_re,z_im,m", then one row per matrix row of re,im pairs."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "N", "z_re", "z_im", "m"])
        w.writerow([op.label, op.N, repr(op.z.real), repr(op.z.imag), repr(op.m)])
        for row in op.matrix:
            pairs = np.empty(2 * row.size)
            pairs[0::2] = row.real
            pairs[1::2] = row.imag
            w.writerow([repr(float(v)) for v in pairs])


def load_matrix_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    label, N, zr, zi, m = rows[1]
    data = np.array([[float(v) for v in r] for r in rows[2:]])
    mat = data[:, 0::2] + 1j * data[:, 1::2]
    return {"label": label, "N": int(N), "z": complex(float(zr), float(zi)), "m": float(m), "matrix": mat}


def band_limited_cinv_residual(z: complex, m: float, grid: QuadratureGrid, band: float = 0.25,
                               C: Optional[DiscretizedOperator] = None) -> float:
    """cinv residual restricted to spinor Fourier modes |n| ≤ band·N.

    Diagnostic only: it separates the resolved part of the spectrum from
    the highest discrete modes.
    """
    if C is None:
        C = assemble_C(z, m, grid)
    N = grid.N
    A = C.matrix @ alpha_nu_matrix(grid)
    E = 4.0 * A @ A + np.eye(2 * N)
    freqs = np.arange(-N // 2, N // 2)
    freqs = freqs[np.abs(freqs) <= band * N]
    basis = np.exp(2j * math.pi * np.outer(grid.t, freqs)) / math.sqrt(N)
    Q = np.zeros((2 * N, 2 * len(freqs)), dtype=complex)
    Q[0::2, : len(freqs)] = basis
    Q[1::2, len(freqs):] = basis
    s = np.sqrt(C.weights_vector())
    Es = s[:, None] * E / s[None, :]
    return float(np.linalg.norm(Es @ Q, 2))


# ---------------------------------------------------------------------------
# layer potential


def free_green_2d(z: complex, m: float, delta: np.ndarray):
    """Blocks of G_{z,2} at complex offsets Δ: returns (g11, g12, g21, g22)."""
    sp = spectral_parameters(z, m)
    k = sp.k
    kappa = -1j * k
    if abs(kappa.imag) <= 1e-15 * abs(kappa):
        kappa = float(kappa.real)
    r = np.abs(delta)
    if np.any(r == 0):
        raise LayerPotentialError("point on the curve: use the jump relation")
    K0, K1, _, _ = _bessel_terms(kappa, r)
    a = (k / (2.0 * math.pi)) * K1 / r
    b = K0 / (2.0 * math.pi)
    return (z + m) * b, a * np.conj(delta), a * delta, (z - m) * b


def upsample_density(phi: np.ndarray, N: int, M: int) -> np.ndarray:
    """Trigonometric interpolation of a node-major spinor density to M nodes."""
    out = np.empty(2 * M, dtype=complex)
    for comp, shift in ((0, 0), (1, 1)):
        c = np.fft.fft(phi[comp::2]) / N
        freqs = np.fft.fftfreq(N, 1.0 / N).astype(int)
        if shift:
            freqs[freqs == -N // 2] = N // 2
        full = np.zeros(M, dtype=complex)
        full[freqs % M] = c
        out[comp::2] = np.fft.ifft(full) * M
    return out


def _distance_to_curve(grid: QuadratureGrid, pts: np.ndarray) -> np.ndarray:
    M = max(4 * grid.N, 1024)
    tf = np.arange(M) / M
    Zf = grid.curve.z(tf)
    d = np.abs(pts[:, None] - Zf[None, :])
    return np.min(d, axis=1)


def evaluate_layer_potential(z: complex, m: float, grid: QuadratureGrid, phi, points,
                             min_distance_ratio: float = 1e-3, digits: float = 36.0) -> np.ndarray:
    """Φ_zφ(x) = ∫_Σ G_z(x − y)φ(y) dσ(y) at off-curve points; returns shape (P, 2).

    Points closer than 2π·len/N are evaluated on a refined grid: the density
    is interpolated trigonometrically and the curve is evaluated exactly, with
    the refinement chosen so that the trapezoid error e^{−2π d/h} is below
    e^{−digits}.  Points closer than ``min_distance_ratio``·len are refused.
    """
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (2 * grid.N,):
        raise ValueError(f"density must have shape ({2 * grid.N},)")
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    P = pts[:, 0] + 1j * pts[:, 1]
    length = grid.length
    dist = _distance_to_curve(grid, P)
    if np.any(dist < min_distance_ratio * length):
        raise LayerPotentialError(
            "point too close to the curve (use the jump relation for boundary values)")
    vmax = float(np.max(grid.speed))
    out = np.zeros((len(P), 2), dtype=complex)
    factor = np.ones(len(P), dtype=int)
    need = digits * vmax / (2.0 * math.pi * dist)
    for i, n in enumerate(need):
        f = 1
        while f * grid.N < n:
            f *= 2
        factor[i] = f
    for f in np.unique(factor):
        sel = factor == f
        M = int(f) * grid.N
        if f == 1:
            Y, w, dens = grid.zpts, grid.weights, phi
        else:
            tf = np.arange(M) / M
            Y = grid.curve.z(tf)
            w = np.abs(grid.curve.dz(tf)) / M
            dens = upsample_density(phi, grid.N, M)
        for start in range(0, int(np.sum(sel)), max(1, 2_000_000 // M)):
            idx = np.nonzero(sel)[0][start: start + max(1, 2_000_000 // M)]
            g11, g12, g21, g22 = free_green_2d(z, m, P[idx, None] - Y[None, :])
            p1 = w * dens[0::2]
            p2 = w * dens[1::2]
            out[idx, 0] = g11 @ p1 + g12 @ p2
            out[idx, 1] = g21 @ p1 + g22 @ p2
    return out


def _extrapolate_to_zero(hs: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Polynomial (Lagrange) extrapolation of values(h) to h = 0 along axis 0."""
    out = np.zeros(values.shape[1:], dtype=complex)
    for i, hi in enumerate(hs):
        li = 1.0
        for j, hj in enumerate(hs):
            if j != i:
                li *= (0.0 - hj) / (hi - hj)
        out = out + li * values[i]
    return out


def one_sided_traces(z: complex, m: float, grid: QuadratureGrid, phi,
                     h0: Optional[float] = None, levels: int = 6):
    """Interior (x − hν) and exterior (x + hν) limits of Φ_zφ at the nodes.

    Evaluated at h = h0, 2h0, ..., levels·h0 and extrapolated to h = 0.
    The default h0 keeps the offsets well inside the smallest radius of
    curvature but not below the near-field refusal distance.
    Returns arrays of shape (N, 2).
    """
    if h0 is None:
        length = grid.length
        r_min = 1.0 / max(float(np.max(np.abs(grid.curvature))), 1e-300)
        h0 = max(1.05e-3 * length, min(2e-3 * length, r_min / (3.0 * levels)))
    nu = grid.normals[:, 0] + 1j * grid.normals[:, 1]
    hs = h0 * np.arange(1, levels + 1)
    res = []
    for sign in (-1.0, 1.0):
        vals = []
        for h in hs:
            pts = grid.zpts + sign * h * nu
            vals.append(evaluate_layer_potential(z, m, grid, phi, np.stack([pts.real, pts.imag], -1)))
        res.append(_extrapolate_to_zero(hs, np.array(vals)))
    return res[0], res[1]


def expected_traces(z: complex, m: float, grid: QuadratureGrid, phi,
                    C: Optional[DiscretizedOperator] = None):
    """∓(i/2)(α·ν)φ + 𝒞_zφ at the nodes: (interior, exterior), each shape (N, 2)."""
    if C is None:
        C = assemble_C(z, m, grid)
    phi = np.asarray(phi, dtype=complex)
    Cphi = C.matrix @ phi
    an = apply_alpha_nu(grid, phi)
    inner = -0.5j * an + Cphi
    outer = 0.5j * an + Cphi
    return inner.reshape(-1, 2), outer.reshape(-1, 2)


@dataclass(frozen=True)
class JumpReport:
    residual: float
    interior: float
    exterior: float
    difference: float
    mean: float

    def as_dict(self) -> dict:
        return dict(residual=self.residual, interior=self.interior, exterior=self.exterior,
                    difference=self.difference, mean=self.mean)


def jump_relation_report(z: complex, m: float, grid: QuadratureGrid, phi, **kw) -> JumpReport:
    inner, outer = one_sided_traces(z, m, grid, phi, **kw)
    e_in, e_out = expected_traces(z, m, grid, phi)

    def err(a, b):
        return float(np.max(np.linalg.norm(a - b, axis=1)))

    ri, ro = err(inner, e_in), err(outer, e_out)
    return JumpReport(
        residual=max(ri, ro),
        interior=ri,
        exterior=ro,
        difference=err(inner - outer, e_in - e_out),
        mean=err(0.5 * (inner + outer), 0.5 * (e_in + e_out)),
    )


def jump_relation_residual(z: complex, m: float, grid: QuadratureGrid, phi, **kw) -> float:
    return jump_relation_report(z, m, grid, phi, **kw).residual


def trigonometric_density(grid: QuadratureGrid, coeffs1, coeffs2) -> np.ndarray:
    """Spinor density with components Σ_n c_n e^{2πint}, coefficients given as {n: c}."""
    phi = np.zeros(2 * grid.N, dtype=complex)
    for comp, coeffs in ((0, coeffs1), (1, coeffs2)):
        for n, c in dict(coeffs).items():
            phi[comp::2] += c * np.exp(2j * math.pi * n * grid.t)
    return phi


# ---------------------------------------------------------------------------
# ω-bounds and self-adjointness conditions


@dataclass(frozen=True)
class OmegaBounds:
    omega_min: float
    omega_max: float
    spectrum: np.ndarray = field(repr=False)
    outliers_removed: int = 0

    def as_dict(self) -> dict:
        return {"omega_min": self.omega_min, "omega_max": self.omega_max,
                "outliers_removed": self.outliers_removed}


def default_outlier_budget(N: int) -> int:
    return int(math.ceil(N / 64))


def omega_bounds(grid: QuadratureGrid, k: Optional[int] = None,
                 D: Optional[DiscretizedOperator] = None) -> OmegaBounds:
    """Range of |𝒟_α^N| after removing the k smallest and k largest eigenvalues."""
    if k is None:
        k = default_outlier_budget(grid.N)
    if D is None:
        D = assemble_D_alpha(grid)
    S = D.symmetrized()
    S = 0.5 * (S + S.conj().T)
    ev = np.sort(np.abs(np.linalg.eigvalsh(S)))
    if 2 * k >= ev.size:
        raise ValueError("outlier budget removes the whole spectrum")
    kept = ev[k: ev.size - k]
    return OmegaBounds(float(kept[0]), float(kept[-1]), ev, 2 * k)


@dataclass(frozen=True)
class ConditionResult:
    name: str
    holds: bool
    lhs: float
    rhs: float
    note: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "holds": self.holds, "lhs": self.lhs, "rhs": self.rhs,
                "note": self.note}


@dataclass(frozen=True)
class ConditionReport:
    conditions: tuple
    certified: bool
    smooth_noncritical: bool
    verdict: str
    omega_min: float
    omega_max: float
    normC: float

    def as_dict(self) -> dict:
        return {
            "conditions": [c.as_dict() for c in self.conditions],
            "certified": self.certified,
            "smooth_noncritical": self.smooth_noncritical,
            "verdict": self.verdict,
            "omega_min": self.omega_min,
            "omega_max": self.omega_max,
            "normC": self.normC,
        }


def _min_abs_affine(d: float, lo: float, hi: float) -> float:
    """min of |1 − dω²| over ω ∈ [lo, hi]."""
    a, b = 1 - d * lo * lo, 1 - d * hi * hi
    if a * b <= 0:
        return 0.0
    return min(abs(a), abs(b))


def check_selfadjointness_conditions(s: InteractionStrengths, bounds: OmegaBounds,
                                     normC: float) -> ConditionReport:
    eta, tau, lam, d = s.eta, s.tau, s.lam, s.d
    wmin, wmax = bounds.omega_min, bounds.omega_max
    total = abs(eta) + abs(tau) + abs(lam)
    out = []

    # (i)
    mn = _min_abs_affine(d, wmin, wmax)
    lhs = math.inf if mn == 0 else abs(2 * lam * wmax) / mn
    out.append(ConditionResult("i", mn > 0 and lhs < 1, lhs, 1.0, "1 − dω² ≠ 0 and |2λω_max/(1 − dω²)| < 1"))

    # (ii)
    if lam != 0:
        mx = max(abs(1 - d * wmin**2), abs(1 - d * wmax**2))
        lhs = mx / abs(lam * wmin * (1 + 4 * wmin**2))
    else:
        lhs = math.inf
    out.append(ConditionResult("ii", lam != 0 and lhs < 1, lhs, 1.0, "λ ≠ 0 and |(1 − dω²)/(λω_min(1 + 4ω_min²))| < 1"))

    # (iii)
    if lam * lam != 4:
        lhs = 4 * abs(d + 4) * (1 + wmax * abs(lam)) * wmax**2 / (abs(4 - lam * lam) * (1 + 4 * wmin**2))
    else:
        lhs = math.inf
    out.append(ConditionResult("iii", lam * lam != 4 and lhs < 1, lhs, 1.0, "λ² ≠ 4 and the |d + 4| bound < 1"))

    # (iv)
    out.append(ConditionResult("iv", eta == 0 and tau == 0 and lam * lam != 4, abs(eta) + abs(tau),
                               0.0, "η = τ = 0 and λ² ≠ 4"))

    # (v)
    out.append(ConditionResult("v", total < 1.0 / wmax, total, 1.0 / wmax, "|η| + |τ| + |λ| < 1/ω_max"))

    # (vi)
    lhs = abs(d) / total if total else 0.0
    out.append(ConditionResult("vi", total != 0 and lhs > 4 * wmax, lhs, 4 * wmax, "|d|/(|η| + |τ| + |λ|) > 4ω_max"))

    # remark conditions, λ = 0
    out.append(ConditionResult("benhellal1", lam == 0 and d < 1.0 / normC**2, d, 1.0 / normC**2,
                               "λ = 0 and d < 1/‖𝒞_z‖²"))
    out.append(ConditionResult("benhellal2", lam == 0 and d > 16.0 * normC**2, d, 16.0 * normC**2,
                               "λ = 0 and d > 16‖𝒞_z‖²"))

    certified = any(c.holds for c in out)
    crit = (d / 4 - 1) ** 2 - lam**2
    return ConditionReport(
        conditions=tuple(out),
        certified=certified,
        smooth_noncritical=abs(crit) > 1e-12 * max(1.0, d * d),
        verdict=("self-adjointness certified" if certified else "no sufficient condition holds"),
        omega_min=wmin,
        omega_max=wmax,
        normC=float(normC),
    )
