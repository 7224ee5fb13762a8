"""Smooth closed planar curves on [0, 1) and their periodic trapezoid grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np
from scipy import integrate

TWO_PI = 2.0 * math.pi
MIN_NODES = 16


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class ClosedCurve:
    """1-periodic, counter-clockwise parametrization t ↦ γ(t) ∈ R².

    ``z``, ``dz`` and ``ddz`` return γ, γ' and γ'' as complex numbers
    x₁ + i x₂ for an array of parameters.
    """

    name: str
    z: Callable[[np.ndarray], np.ndarray]
    dz: Callable[[np.ndarray], np.ndarray]
    ddz: Callable[[np.ndarray], np.ndarray]
    params: Dict[str, float] = field(default_factory=dict)
    analytic: bool = True

    def point(self, t) -> np.ndarray:
        w = self.z(np.atleast_1d(np.asarray(t, dtype=float)))
        return np.stack([w.real, w.imag], axis=-1)

    def speed(self, t) -> np.ndarray:
        return np.abs(self.dz(np.atleast_1d(np.asarray(t, dtype=float))))

    def normal(self, t) -> np.ndarray:
        d = self.dz(np.atleast_1d(np.asarray(t, dtype=float)))
        d = d / np.abs(d)
        return np.stack([d.imag, -d.real], axis=-1)

    def length(self) -> float:
        val, _ = integrate.quad(lambda t: float(self.speed(t)[0]), 0.0, 1.0,
                                limit=200, epsabs=1e-13, epsrel=1e-13)
        return val

    def spec(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v:g}" for k, v in self.params.items())

    def rotated(self, angle: float, shift: complex = 0.0) -> "ClosedCurve":
        """Rigid motion x ↦ e^{i angle} x + shift."""
        rot = complex(math.cos(angle), math.sin(angle))
        z, dz, ddz = self.z, self.dz, self.ddz
        return ClosedCurve(
            name=self.name,
            z=lambda t: rot * z(t) + shift,
            dz=lambda t: rot * dz(t),
            ddz=lambda t: rot * ddz(t),
            params=dict(self.params),
            analytic=self.analytic,
        )


def _positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise CurveError(f"degenerate curve parameter {k}={v}")


def circle(r: float = 1.0) -> ClosedCurve:
    _positive(r=r)
    w = TWO_PI
    return ClosedCurve(
        "circle",
        z=lambda t: r * np.exp(1j * w * t),
        dz=lambda t: 1j * w * r * np.exp(1j * w * t),
        ddz=lambda t: -(w**2) * r * np.exp(1j * w * t),
        params={"r": r},
    )


def ellipse(a: float = 2.0, b: float = 1.0) -> ClosedCurve:
    _positive(a=a, b=b)
    w = TWO_PI
    return ClosedCurve(
        "ellipse",
        z=lambda t: a * np.cos(w * t) + 1j * b * np.sin(w * t),
        dz=lambda t: w * (-a * np.sin(w * t) + 1j * b * np.cos(w * t)),
        ddz=lambda t: -(w**2) * (a * np.cos(w * t) + 1j * b * np.sin(w * t)),
        params={"a": a, "b": b},
    )


def kite() -> ClosedCurve:
    """(cos s + 0.65 cos 2s − 0.65, 1.5 sin s), s = 2πt."""
    w = TWO_PI
    return ClosedCurve(
        "kite",
        z=lambda t: np.cos(w * t) + 0.65 * np.cos(2 * w * t) - 0.65 + 1.5j * np.sin(w * t),
        dz=lambda t: w * (-np.sin(w * t) - 1.3 * np.sin(2 * w * t) + 1.5j * np.cos(w * t)),
        ddz=lambda t: w * w * (-np.cos(w * t) - 2.6 * np.cos(2 * w * t) - 1.5j * np.sin(w * t)),
    )


def star(eps: float = 0.2, k: int = 5) -> ClosedCurve:
    """Polar curve ρ(s) = 1 + eps cos(k s), s = 2πt."""
    _positive(eps=eps)
    if int(k) != k or k < 1:
        raise CurveError("star requires a positive integer k")
    k = int(k)
    if eps >= 1.0 / k:
        raise CurveError("star requires eps < 1/k")
    w = TWO_PI

    def rho(t):
        return 1 + eps * np.cos(k * w * t)

    def drho(t):
        return -eps * k * w * np.sin(k * w * t)

    def ddrho(t):
        return -eps * (k * w) ** 2 * np.cos(k * w * t)

    def z(t):
        return rho(t) * np.exp(1j * w * t)

    def dz(t):
        e = np.exp(1j * w * t)
        return (drho(t) + 1j * w * rho(t)) * e

    def ddz(t):
        e = np.exp(1j * w * t)
        return (ddrho(t) + 2j * w * drho(t) - w * w * rho(t)) * e

    return ClosedCurve("star", z, dz, ddz, params={"eps": eps, "k": k})


_BUILDERS = {"circle": circle, "ellipse": ellipse, "kite": kite, "star": star}


def builtin_curve(kind: str, **params) -> ClosedCurve:
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise CurveError(f"unknown curve kind {kind!r}; choose from {sorted(_BUILDERS)}")
    try:
        return builder(**params)
    except TypeError as exc:
        raise CurveError(f"bad parameters for {kind}: {exc}") from exc


def parse_curve(text: str) -> ClosedCurve:
    """Parse strings such as "circle:r=1.0", "ellipse:a=2,b=1" or "kite"."""
    kind, _, rest = text.strip().partition(":")
    params = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise CurveError(f"malformed curve parameter {item!r}")
            params[key.strip()] = float(val)
    if kind.strip() == "star" and "k" in params:
        params["k"] = int(params["k"]) if float(params["k"]).is_integer() else params["k"]
    return builtin_curve(kind.strip(), **params)


@dataclass(frozen=True)
class QuadratureGrid:
    curve: ClosedCurve
    N: int
    t: np.ndarray
    zpts: np.ndarray  # complex nodes
    dz: np.ndarray
    ddz: np.ndarray
    weights: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return np.stack([self.zpts.real, self.zpts.imag], axis=-1)

    @property
    def speed(self) -> np.ndarray:
        return np.abs(self.dz)

    @property
    def normals(self) -> np.ndarray:
        u = self.dz / np.abs(self.dz)
        return np.stack([u.imag, -u.real], axis=-1)

    @property
    def normal_complex(self) -> np.ndarray:
        """ν₁ + iν₂ = −iγ'/|γ'|."""
        return -1j * self.dz / np.abs(self.dz)

    @property
    def length(self) -> float:
        return float(np.sum(self.weights))

    @property
    def curvature(self) -> np.ndarray:
        """Signed curvature, positive where the curve bends towards the interior."""
        return np.imag(np.conj(self.dz) * self.ddz) / np.abs(self.dz) ** 3

    def flux(self) -> np.ndarray:
        return self.weights @ self.normals

    def signed_area(self) -> float:
        # (1/2)∮ x dy − y dx on the trapezoid rule
        x, y = self.zpts.real, self.zpts.imag
        return float(0.5 * np.sum(x * self.dz.imag - y * self.dz.real) / self.N)


def build_grid(curve: ClosedCurve, N: int) -> QuadratureGrid:
    if int(N) != N:
        raise CurveError("N must be an integer")
    N = int(N)
    if N % 2:
        raise CurveError(f"N must be even, got {N}")
    if N < MIN_NODES:
        raise CurveError(f"N must be at least {MIN_NODES}, got {N}")
    t = np.arange(N) / N
    dz = curve.dz(t)
    if np.min(np.abs(dz)) <= 0:
        raise CurveError("parametrization is not regular")
    return QuadratureGrid(
        curve=curve,
        N=N,
        t=t,
        zpts=curve.z(t),
        dz=dz,
        ddz=curve.ddz(t),
        weights=np.abs(dz) / N,
    )
