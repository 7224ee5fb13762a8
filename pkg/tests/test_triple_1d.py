import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracshell.dirac_algebra import InteractionStrengths, SpectralParameterError, apply_free_dirac_fd, build_dirac_matrices
from diracshell.triple_1d import (
    EmptyGapError,
    bs_residual_1d,
    discrete_spectrum_1d_closed_form,
    discrete_spectrum_1d_numeric,
    eigen_equation_residual,
    exponential_spinor,
    green_identity_residual_1d,
    quadratic_residual,
    resolvent_kernel_1d,
    surjectivity_witness,
    weyl_1d,
)

EQ_TOL = 1e-12
AGREE_TOL = 1e-10
GREEN_TOL = 1e-10
FD_RATIO = (3.5, 4.5)


def _values(eigs):
    return [e.value for e in eigs]


@pytest.mark.parametrize(
    "triple, expected",
    [((1.0, 0.0, 0.0), [-0.6]), ((-1.0, 0.0, 0.0), [0.6]), ((2.0, 0.0, 0.0), [0.0]), ((0.0, 0.0, 0.0), [])],
)
def test_closed_form_examples(triple, expected):
    eigs = discrete_spectrum_1d_closed_form(InteractionStrengths(*triple, m=1.0))
    assert _values(eigs) == pytest.approx(expected, abs=1e-15)
    for e in eigs:
        assert e.residual <= EQ_TOL
        assert bs_residual_1d(e.value, InteractionStrengths(*triple, m=1.0)) <= EQ_TOL


def test_d4_branch_label():
    e = discrete_spectrum_1d_closed_form(InteractionStrengths(2.5, 1.5, 0.0))
    assert [x.branch for x in e] == ["d_equals_4"]
    assert e[0].value == pytest.approx(-0.6)


def test_numeric_agrees_with_closed_form():
    rng = np.random.default_rng(7)
    count = 0
    while count < 100:
        m = rng.uniform(0.5, 2.0)
        s = InteractionStrengths(*rng.uniform(-3, 3, 3), m=m)
        if abs(s.d - 4) <= 1e-3:
            continue
        count += 1
        a = _values(discrete_spectrum_1d_closed_form(s))
        b = _values(discrete_spectrum_1d_numeric(s))
        assert len(a) == len(b)
        assert np.allclose(a, b, atol=AGREE_TOL * m, rtol=0)


@settings(max_examples=100)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_closed_form_roots_satisfy_equations(eta, tau, lam):
    s = InteractionStrengths(eta, tau, lam)
    for e in discrete_spectrum_1d_closed_form(s):
        assert abs(e.value) < 1
        assert e.residual <= 1e-10 * (1 + abs(s.d))
        assert quadratic_residual(e.value, s) <= 1e-10 * (1 + s.d**2 + eta**2)


def test_empty_gap():
    with pytest.raises(EmptyGapError, match="empty gap"):
        discrete_spectrum_1d_closed_form(InteractionStrengths(1, 0, 0, m=0.0))
    with pytest.raises(EmptyGapError):
        discrete_spectrum_1d_numeric(InteractionStrengths(1, 0, 0, m=0.0))
    with pytest.raises(SpectralParameterError):
        bs_residual_1d(1.5, InteractionStrengths(1, 0, 0))


def test_weyl_at_zero():
    assert np.allclose(weyl_1d(0.0, 1.0).M, np.diag([0.5, -0.5]), atol=1e-15)


def test_weyl_nevanlinna():
    rng = np.random.default_rng(3)
    for _ in range(50):
        z = complex(rng.uniform(-3, 3), rng.uniform(1e-3, 3))
        M = weyl_1d(z, 1.0).M
        Im = (M - M.conj().T) / (2j * z.imag)
        assert np.allclose(Im, Im.conj().T)
        assert np.min(np.linalg.eigvalsh(Im)) >= -1e-12


def test_green_identity():
    rng = np.random.default_rng(4)
    for _ in range(10):
        f = exponential_spinor(rng.normal(size=2) + 1j * rng.normal(size=2), rng.normal(size=2), rate=1.0)
        g = exponential_spinor(rng.normal(size=2), rng.normal(size=2) + 1j * rng.normal(size=2), rate=1.0)
        assert green_identity_residual_1d(f, g, m=1.0, scale=2.0) <= GREEN_TOL


def test_surjectivity():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        f = surjectivity_witness(c)
        assert np.allclose(f.gamma0(), c[:2])
        assert np.allclose(f.gamma1(), c[2:])


def test_resolvent_pole():
    s = InteractionStrengths(1.0, 0, 0)
    with pytest.raises(ValueError, match="pole"):
        resolvent_kernel_1d(-0.6, s, 0.5, -0.5)


@pytest.mark.parametrize("z", [0.2, -0.3])
def test_resolvent_symmetry(z):
    s = InteractionStrengths(0.7, -0.4, 0.9)
    for x, y in [(0.5, -0.8), (1.2, 0.3), (-0.4, -1.1)]:
        K1 = resolvent_kernel_1d(z, s, x, y)
        K2 = resolvent_kernel_1d(z, s, y, x)
        assert np.allclose(K1.conj().T, K2, atol=1e-13)


def test_resolvent_kernel_solves_free_equation():
    rep = build_dirac_matrices(1)
    s = InteractionStrengths(0.7, -0.4, 0.9)
    z, y = 0.2 + 0.1j, -0.7
    for x in (0.6, -1.3):
        fn = lambda p: resolvent_kernel_1d(z, s, float(p[0]), y)
        r1 = np.linalg.norm(apply_free_dirac_fd(fn, rep, 1.0, z, [x], 1e-2))
        r2 = np.linalg.norm(apply_free_dirac_fd(fn, rep, 1.0, z, [x], 5e-3))
        assert FD_RATIO[0] <= r1 / r2 <= FD_RATIO[1]


def test_eigen_equation_residual_zero_at_root():
    assert eigen_equation_residual(-0.6, InteractionStrengths(1, 0, 0)) <= EQ_TOL
