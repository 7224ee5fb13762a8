import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracshell.dirac_algebra import (
    InteractionStrengths,
    SpectralParameterError,
    build_dirac_matrices,
    classify_strengths,
    coupling_matrix,
    fundamental_solution,
    fundamental_solution_residual,
    random_unit_vector,
    spectral_parameters,
    symbol_factorization_check,
    verify_anticommutation,
)

ALGEBRA_TOL = 1e-13
FD_RATIO = (3.5, 4.5)

finite = st.floats(-5, 5, allow_nan=False)


@pytest.mark.parametrize("q, size", [(1, 2), (2, 2), (3, 4)])
def test_representation_sizes_and_anticommutation(q, size):
    rep = build_dirac_matrices(q)
    assert rep.N == size
    assert len(rep.alphas) == q + 1
    assert verify_anticommutation(rep) <= ALGEBRA_TOL
    for a in rep.alphas:
        assert np.allclose(a, a.conj().T)


@pytest.mark.parametrize("q", [0, 4, -1])
def test_dimension_out_of_range(q):
    with pytest.raises(ValueError, match="dimension"):
        build_dirac_matrices(q)


def test_symbol_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        symbol_factorization_check(build_dirac_matrices(2), 1.0, 0.3, [1.0, 2.0, 3.0])


@pytest.mark.parametrize("q", [1, 2, 3])
def test_symbol_factorization_random(q):
    rng = np.random.default_rng(q)
    rep = build_dirac_matrices(q)
    for _ in range(100):
        xi = rng.normal(size=q)
        m = rng.uniform(0, 2)
        z = complex(rng.normal(), rng.normal())
        assert symbol_factorization_check(rep, m, z, xi) <= ALGEBRA_TOL * max(1.0, xi @ xi + m * m + abs(z) ** 2)


@given(z=finite, m=st.floats(0.1, 3))
def test_branch_cut_rejected(z, m):
    if abs(z) >= m:
        with pytest.raises(SpectralParameterError, match="branch cut"):
            spectral_parameters(z, m)
    else:
        sp = spectral_parameters(z, m)
        assert sp.k.imag > 0
        assert abs(sp.k.real) < 1e-12


@given(x=finite, y=st.floats(1e-3, 5), m=st.floats(0, 3))
def test_k_in_upper_half_plane(x, y, m):
    sp = spectral_parameters(complex(x, y), m)
    assert sp.k.imag > 0
    assert abs(sp.k**2 - (complex(x, y) ** 2 - m * m)) <= 1e-9 * max(1.0, abs(sp.k) ** 2)


@settings(max_examples=60)
@given(eta=finite, tau=finite, lam=finite, angle=st.floats(0, 2 * math.pi))
def test_coupling_partner_product(eta, tau, lam, angle):
    rep = build_dirac_matrices(2)
    s = InteractionStrengths(eta, tau, lam)
    nu = [math.cos(angle), math.sin(angle)]
    prod = coupling_matrix(s.flipped(), rep, nu) @ coupling_matrix(s, rep, nu)
    assert np.allclose(prod, s.d * np.eye(2), atol=1e-12 * max(1, abs(s.d)))


def test_coupling_requires_unit_normal():
    rep = build_dirac_matrices(2)
    with pytest.raises(ValueError, match="unit"):
        coupling_matrix(InteractionStrengths(1, 0, 0), rep, [1.0, 1.0])


def test_coupling_1d_normal():
    rep = build_dirac_matrices(1)
    P = coupling_matrix(InteractionStrengths(1.0, 2.0, 3.0), rep)
    expected = np.eye(2) + 2.0 * np.diag([1, -1]) - 3.0 * np.array([[0, -1j], [1j, 0]])
    assert np.allclose(P, expected)


def test_negative_mass_rejected():
    with pytest.raises(ValueError):
        InteractionStrengths(1, 0, 0, m=-1)


def _fd_ratio(rep, s, z, x, h=2e-3):
    r1 = fundamental_solution_residual(rep, s, z, x, h)
    r2 = fundamental_solution_residual(rep, s, z, x, h / 2)
    return r1 / r2


@pytest.mark.parametrize("q", [1, 2, 3])
@pytest.mark.parametrize("z", [0.3, 0.5 + 0.4j])
def test_fundamental_solution_second_order(q, z):
    rng = np.random.default_rng(10 + q)
    rep = build_dirac_matrices(q)
    s = InteractionStrengths(m=1.0)
    for _ in range(10):
        x = rng.uniform(0.4, 1.5) * random_unit_vector(q, rng) * rng.choice([-1, 1])
        assert FD_RATIO[0] <= _fd_ratio(rep, s, z, x) <= FD_RATIO[1]


def test_fundamental_solution_errors():
    rep = build_dirac_matrices(2)
    s = InteractionStrengths(m=1.0)
    with pytest.raises(ValueError, match="singular"):
        fundamental_solution(rep, s, 0.2, [0.0, 0.0])
    with pytest.raises(ValueError, match="too close"):
        fundamental_solution_residual(rep, s, 0.2, [1e-3, 0.0], 1e-3)


def test_fundamental_solution_decays_in_gap():
    rep = build_dirac_matrices(2)
    s = InteractionStrengths(m=1.0)
    g1 = np.linalg.norm(fundamental_solution(rep, s, 0.0, [5.0, 0.0]))
    g2 = np.linalg.norm(fundamental_solution(rep, s, 0.0, [10.0, 0.0]))
    assert g2 < g1 * math.exp(-4)


# (eta, tau, lam) -> regime, confinement, zigzag, extra point (m = 1)
CLASSIFIER_TABLE = [
    ((0.0, 0.0, 0.0), "trivial", False, False, None),
    ((1.0, 0.0, 0.0), "non_critical", False, False, None),
    ((-1.0, 0.0, 0.0), "non_critical", False, False, None),
    ((2.0, 0.0, 0.0), "critical", False, False, 0.0),
    ((2.5, 1.5, 0.0), "critical", False, False, -0.6),
    ((3.0, 0.0, 1.0), "critical", False, False, 0.0),
    ((math.sqrt(2), 1.0, 1.0), "critical", False, False, -1 / math.sqrt(2)),
    ((0.0, 0.0, 1.0), "non_critical", False, False, None),
    ((0.0, 1.0, 0.0), "non_critical", False, False, None),
    ((0.0, 0.0, 2.0), "critical", True, True, None),
    ((1.0, 1.0, 2.0), "critical", True, True, None),
    ((1.0, math.sqrt(3), math.sqrt(2)), "non_critical", True, False, None),
]


@pytest.mark.parametrize("triple, regime, conf, zig, extra", CLASSIFIER_TABLE)
def test_classifier_table(triple, regime, conf, zig, extra):
    c = classify_strengths(InteractionStrengths(*triple, m=1.0))
    assert c.regime == regime
    assert c.confinement is conf
    assert c.zigzag is zig
    if extra is None:
        assert c.extra_essential_point is None
    else:
        assert c.extra_essential_point == pytest.approx(extra, abs=1e-12)


def test_zigzag_notes():
    c = classify_strengths(InteractionStrengths(0, 0, 2, m=1.0))
    assert any("infinite multiplicity" in n for n in c.notes)
    assert any("-1" in n for n in c.notes)


def test_classification_massless_has_empty_gap():
    c = classify_strengths(InteractionStrengths(1, 0, 0, m=0.0))
    assert c.gap is None
    assert any("empty spectral gap" in n for n in c.notes)
