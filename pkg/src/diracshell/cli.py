"""Command-line front end: classify, spec1d, spec2d and verify."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import bem2d, confinement, spectral2d, triple_1d
from .dirac_algebra import (
    DiracRepresentation,
    InteractionStrengths,
    build_dirac_matrices,
    classify_strengths,
    fundamental_solution_residual,
    random_unit_vector,
    symbol_factorization_check,
    verify_anticommutation,
)
from .geometry2d import CurveError, build_grid, parse_curve

SCHEMA = "dirac-shell/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
QUICK_N = 64
QUICK_RELAX = 100.0


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    eta: float = 0.0
    tau: float = 0.0
    lam: float = 0.0
    m: float = 1.0
    q: Optional[int] = None
    curve: str = "circle:r=1.0"
    N: int = 256
    zgrid: int = spectral2d.DEFAULT_RESOLUTION
    tol_bs: float = spectral2d.TOL_BS
    tol_conv: float = spectral2d.TOL_CONV
    tol_jump: float = spectral2d.TOL_JUMP
    out: Optional[str] = None
    format: str = "json"
    quick: bool = False
    verify_only: bool = False
    corrupt_representation: bool = False

    def validate(self) -> None:
        for name in ("tol_bs", "tol_conv", "tol_jump"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive, got {v}")
        if self.N < 16 or self.N % 2:
            raise ConfigError(f"N must be even and at least 16, got {self.N}")
        if self.zgrid < 2:
            raise ConfigError("zgrid must be at least 2")
        for name in ("eta", "tau", "lam", "m"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.q is not None and self.q not in (1, 2, 3):
            raise ConfigError("dimension out of range: q must be 1, 2 or 3")

    @property
    def strengths(self) -> InteractionStrengths:
        return InteractionStrengths(self.eta, self.tau, self.lam, m=self.m)

    def resolved(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["n"] = d.pop("N")
        d.pop("corrupt_representation")
        return d


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _report(cfg: RunConfig, body: dict) -> dict:
    return {"schema": SCHEMA, "command": cfg.command, "config": cfg.resolved(), **body}


# ---------------------------------------------------------------------------
# commands


def cmd_classify(cfg: RunConfig) -> dict:
    s = cfg.strengths
    cls = classify_strengths(s)
    body = cls.as_dict()
    q = cfg.q or 2
    rep = build_dirac_matrices(q)
    nu = np.zeros(q)
    nu[0] = 1.0 if q > 1 else -1.0
    td = confinement.transmission_data(s, rep, nu)
    body["transmission_residuals"] = confinement.transmission_residuals(td)
    if q == 2 and cfg.m > 0:
        grid = build_grid(parse_curve(cfg.curve), cfg.N)
        bounds = bem2d.omega_bounds(grid)
        normC = bem2d.assemble_C(0.0, cfg.m, grid).norm()
        rep_c = bem2d.check_selfadjointness_conditions(s, bounds, normC)
        body["selfadjointness"] = rep_c.as_dict()
        body["selfadjointness"]["reference_z"] = 0.0
    return _report(cfg, body)


def cmd_spec1d(cfg: RunConfig) -> dict:
    if cfg.q not in (None, 1):
        raise ConfigError("spec1d requires q = 1")
    if cfg.m <= 0:
        raise ConfigError("empty gap: m must be positive")
    s = cfg.strengths
    closed = triple_1d.discrete_spectrum_1d_closed_form(s)
    numeric = triple_1d.discrete_spectrum_1d_numeric(s)
    return _report(cfg, {
        "classification": classify_strengths(s).as_dict(),
        "eigenvalues": [e.value for e in closed],
        "closed_form": [dict(e.as_dict(), bs_residual=triple_1d.bs_residual_1d(e.value, s)) for e in closed],
        "numeric": [e.as_dict() for e in numeric],
    })


def _oracles(cfg: RunConfig, grid) -> dict:
    C = bem2d.assemble_C(0.0, cfg.m, grid)
    return {
        "z": 0.0,
        "cinv_residual": bem2d.cinv_residual(0.0, cfg.m, grid, C),
        "band_limited_cinv_residual": bem2d.band_limited_cinv_residual(0.0, cfg.m, grid, C=C),
        "riesz_square_residual": bem2d.riesz_square_residual(grid),
        "hermiticity": C.hermiticity_defect(),
    }


def cmd_spec2d(cfg: RunConfig) -> tuple:
    if cfg.q not in (None, 2):
        raise ConfigError("spec2d requires q = 2")
    if cfg.m <= 0:
        raise ConfigError("empty gap: m must be positive")
    curve = parse_curve(cfg.curve)
    grid = build_grid(curve, cfg.N)
    s = cfg.strengths
    body = {"classification": classify_strengths(s).as_dict(), "oracles": _oracles(cfg, grid)}
    scan = None
    if not cfg.verify_only:
        scan_grid = build_grid(curve, min(cfg.N, 128))
        scan = spectral2d.bs_scan(s, scan_grid, cfg.zgrid)
        reports = spectral2d.find_eigenvalues(
            s, curve, cfg.N, cfg.tol_bs, cfg.tol_conv, cfg.tol_jump, scan=scan)
        body["scan_n"] = scan.N
        body["eigenvalues"] = [r.value for r in reports if r.accepted]
        body["eigenpairs"] = [r.as_dict() for r in reports]
        body["scan_min_sigma"] = float(np.min(scan.sigma_min))
    return _report(cfg, body), scan


@dataclass
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: dict = field(default_factory=dict)


def _corrupted(rep: DiracRepresentation) -> DiracRepresentation:
    alphas = list(rep.alphas)
    alphas[1] = alphas[1] + 1e-3 * np.eye(rep.N)
    return DiracRepresentation(rep.q, tuple(alphas))


def verification_suite(cfg: RunConfig) -> List[CheckResult]:
    relax = QUICK_RELAX if cfg.quick else 1.0
    N = QUICK_N if cfg.quick else cfg.N
    m = cfg.m if cfg.m > 0 else 1.0
    rng = np.random.default_rng(20240601)
    out = []

    def add(name, value, tol, **detail):
        out.append(CheckResult(name, float(value), tol, bool(value <= tol), detail))

    worst_ac = worst_sym = 0.0
    for q in (1, 2, 3):
        rep = build_dirac_matrices(q)
        if cfg.corrupt_representation:
            rep = _corrupted(rep)
        worst_ac = max(worst_ac, verify_anticommutation(rep))
        for _ in range(20):
            xi = rng.normal(size=q)
            z = complex(rng.uniform(-m, m), rng.uniform(-1, 1))
            worst_sym = max(worst_sym, symbol_factorization_check(rep, m, z, xi) / (1 + xi @ xi + m * m))
    add("anticommutation", worst_ac, 1e-13 * relax)
    add("symbol_factorization", worst_sym, 1e-13 * relax)

    ratios = []
    free = InteractionStrengths(m=m)
    for q in (1, 2, 3):
        rep = build_dirac_matrices(q)
        x = random_unit_vector(q, rng) * 0.8
        r1 = fundamental_solution_residual(rep, free, 0.3 * m, x, 1e-3)
        r2 = fundamental_solution_residual(rep, free, 0.3 * m, x, 5e-4)
        ratios.append(r1 / r2)
    dev = max(abs(r - 4.0) for r in ratios)
    add("fundamental_solution_order", dev, 0.5, ratios=ratios)

    f = triple_1d.surjectivity_witness([1.0, 2j, -0.5, 1.5])
    g = triple_1d.exponential_spinor([0.3, 1j], [1.0, 0.5], rate=2.0)
    add("green_identity_1d", triple_1d.green_identity_residual_1d(f, g, m), 1e-10 * relax)

    grid = build_grid(parse_curve("circle:r=1.0"), N)
    C = bem2d.assemble_C(0.0, m, grid)
    add("cinv_residual", bem2d.cinv_residual(0.0, m, grid, C), 1e-6 * relax, n=N)
    add("riesz_square_residual", bem2d.riesz_square_residual(grid), 1e-6 * relax, n=N)
    add("hermiticity", C.hermiticity_defect(), 1e-8 * relax, n=N)
    phi = bem2d.trigonometric_density(grid, {0: 1.0, 2: 0.5}, {1: 1j})
    add("jump_relation", bem2d.jump_relation_residual(0.0, m, grid, phi), 1e-4 * relax, n=N)

    worst_conf = worst_trans = 0.0
    rep2 = build_dirac_matrices(2)
    for _ in range(50):
        nu = random_unit_vector(2, rng)
        eta, tau = rng.normal(size=2)
        lam2 = eta**2 - tau**2 + 4.0
        if lam2 > 0:
            sc = InteractionStrengths(eta, tau, math.sqrt(lam2), m=m)
            worst_conf = max(worst_conf, max(confinement.transmission_residuals(
                confinement.transmission_data(sc, rep2, nu)).values()))
        sn = InteractionStrengths(*rng.normal(size=3), m=m)
        if abs(sn.d + 4) > 1e-3:
            worst_trans = max(worst_trans, max(confinement.transmission_residuals(
                confinement.transmission_data(sn, rep2, nu)).values()))
    add("confinement_decoupling", worst_conf, 1e-12 * relax)
    add("transmission_identity", worst_trans, 1e-12 * relax)

    pts = [[2.0, 0.0], [0.0, 2.0], [-1.4, 1.4]]
    z1 = confinement.zigzag_kernel_check(rep2, m, 0.0, 3, pts, 1e-3)
    z2 = confinement.zigzag_kernel_check(rep2, m, 0.0, 3, pts, 5e-4)
    add("zigzag_kernel_order", abs(z1 / z2 - 4.0), 0.5, residuals=[z1, z2])
    return out


def cmd_verify(cfg: RunConfig) -> tuple:
    t0 = time.time()
    checks = verification_suite(cfg)
    passed = all(c.passed for c in checks)
    body = {
        "passed": passed,
        "checks": [asdict(c) for c in checks],
        "elapsed_seconds": time.time() - t0,
    }
    return _report(cfg, body), passed


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diracshell", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("classify", "classify interaction strengths and report sufficient conditions"),
        ("spec1d", "discrete spectrum of the one-dimensional δ-interaction"),
        ("spec2d", "Birman–Schwinger eigenvalue search on a closed curve"),
        ("verify", "run the identity verification suite"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--eta", type=float, default=0.0)
        p.add_argument("--tau", type=float, default=0.0)
        p.add_argument("--lambda", dest="lam", type=float, default=0.0)
        p.add_argument("--m", type=float, default=1.0)
        p.add_argument("--q", type=int, default=None)
        p.add_argument("--curve", default="circle:r=1.0")
        p.add_argument("--N", type=int, default=256)
        p.add_argument("--zgrid", type=int, default=spectral2d.DEFAULT_RESOLUTION)
        p.add_argument("--tol-bs", dest="tol_bs", type=float, default=spectral2d.TOL_BS)
        p.add_argument("--tol-conv", dest="tol_conv", type=float, default=spectral2d.TOL_CONV)
        p.add_argument("--tol-jump", dest="tol_jump", type=float, default=spectral2d.TOL_JUMP)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--quick", action="store_true")
        p.add_argument("--verify-only", dest="verify_only", action="store_true")
        p.add_argument("--corrupt-representation", dest="corrupt_representation",
                       action="store_true", help=argparse.SUPPRESS)
    return parser


def _emit(cfg: RunConfig, report: dict, scan=None, stream=None) -> None:
    stream = stream or sys.stdout
    text = json.dumps(_jsonable(report), indent=2, ensure_ascii=False)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        with open(os.path.join(cfg.out, f"{cfg.command}.json"), "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        if scan is not None:
            scan.to_csv(os.path.join(cfg.out, "scan.csv"))
    if cfg.format == "csv" and scan is not None:
        stream.write("z,sigma_min\n")
        for a, b in zip(scan.z, scan.sigma_min):
            stream.write(f"{a:.17g},{b:.17g}\n")
    else:
        stream.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(**vars(args))
    try:
        cfg.validate()
        if cfg.command == "classify":
            _emit(cfg, cmd_classify(cfg))
            return EXIT_OK
        if cfg.command == "spec1d":
            _emit(cfg, cmd_spec1d(cfg))
            return EXIT_OK
        if cfg.command == "spec2d":
            report, scan = cmd_spec2d(cfg)
            _emit(cfg, report, scan)
            return EXIT_OK
        report, passed = cmd_verify(cfg)
        _emit(cfg, report)
        return EXIT_OK if passed else EXIT_FAIL
    except (ConfigError, CurveError, triple_1d.EmptyGapError, spectral2d.EmptyGapError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
