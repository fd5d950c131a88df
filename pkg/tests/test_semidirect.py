import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taulift import catalog
from taulift.lie_core import BilinearForm, LieAlgebra, SplitDoubleAlgebra
from taulift.semidirect import (
    SemidirectAlgebra, gamma, gamma_inverse, h_bracket, h_form, halves, hvec, jacobi_residual,
    manin_decompose, verify_ad_invariance,
)

E4 = np.eye(4)
Z4 = np.zeros(4)
E6 = np.eye(6)
Z6 = np.zeros(6)


def span_equal(a, b):
    ra = np.linalg.matrix_rank(a)
    return ra == np.linalg.matrix_rank(b) == np.linalg.matrix_rank(np.hstack([a, b]))


def test_nilpotent_bracket_table():
    h = catalog.load("nilpotent3").h
    assert np.allclose(h_bracket(h, hvec(E4[1], Z4), hvec(Z4, E4[0])), hvec(Z4, -E4[3]))
    # the tau-table gives ad^tau_{e4} e1 = e2, hence (0, +e2)
    assert np.allclose(h_bracket(h, hvec(E4[3], Z4), hvec(Z4, E4[0])), hvec(Z4, E4[1]))


def test_a6_bracket():
    h = catalog.load("a6_34").h
    assert np.allclose(h_bracket(h, hvec(E6[5], Z6), hvec(Z6, E6[4])), hvec(Z6, E6[3]))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=12, max_size=12))
def test_self_bracket_vanishes(v):
    h = catalog.load("sl2c").h
    assert np.allclose(h_bracket(h, v, v), 0, atol=1e-12)


def test_bracket_components(example, rng):
    h = example.h
    u, v = rng.normal(size=(2, h.dim))
    (x, y), (x2, y2) = halves(u), halves(v)
    want = hvec(example.algebra.bracket(x, x2), h.tau_ad(x) @ y2 - h.tau_ad(x2) @ y)
    assert np.allclose(h_bracket(h, u, v), want)


def test_form_fixtures():
    h = catalog.load("nilpotent3").h
    assert h_form(h, hvec(E4[1], Z4), hvec(Z4, E4[1])) == 1.0
    assert h_form(h, hvec(E4[3], Z4), hvec(Z4, E4[3])) == 1.0
    assert h_form(h, hvec(E4[0], Z4), hvec(Z4, E4[2])) == -1.0
    assert h_form(h, hvec(E4[2], Z4), hvec(Z4, E4[0])) == -1.0


def test_form_off_diagonal(example, rng):
    h = example.h
    n = h.n
    x, x2 = rng.normal(size=(2, n))
    assert h_form(h, hvec(x, np.zeros(n)), hvec(x2, np.zeros(n))) == 0.0
    u, v = rng.normal(size=(2, h.dim))
    assert np.isclose(h_form(h, u, v), h_form(h, v, u))
    assert abs(np.linalg.det(h.gram)) > 1e-12


def test_ad_invariance_abelian():
    s = SplitDoubleAlgebra(LieAlgebra(np.zeros((2, 2, 2))), BilinearForm(np.eye(2)), (0,), (1,))
    assert verify_ad_invariance(SemidirectAlgebra(s)) == 0.0


def test_ad_invariance_catalog(example, rng):
    tol = 1e-12 if example.name == "nilpotent3" else 1e-10
    assert verify_ad_invariance(example.h, 100, rng) < tol


def test_nilpotent_manin_bases():
    h = catalog.load("nilpotent3").h
    hp, hm, rep = manin_decompose(h)
    want_p = np.stack([hvec(E4[1], Z4), hvec(E4[2], Z4), hvec(E4[3], Z4), hvec(Z4, E4[2])], axis=1)
    want_m = np.stack([hvec(E4[0], Z4), hvec(Z4, E4[0]), hvec(Z4, E4[1]), hvec(Z4, E4[3])], axis=1)
    assert span_equal(hp, want_p) and span_equal(hm, want_m)
    assert rep.ok()


def test_sl2c_manin_bases():
    h = catalog.load("sl2c").h
    hp, hm, _ = manin_decompose(h)
    su2 = E6[:, :3]
    b = E6[:, 3:]
    zero = np.zeros((6, 3))
    assert span_equal(hp, np.vstack([np.hstack([su2, zero]), np.hstack([zero, b])]))
    assert span_equal(hm, np.vstack([np.hstack([b, zero]), np.hstack([zero, su2])]))


def test_manin_ordering(example):
    h = example.h
    n = h.n
    for side, gpart in (("+", example.split.g_plus), ("-", example.split.g_minus)):
        basis = h.part(side).basis
        k = gpart.dim
        assert np.allclose(basis[n:, :k], 0) and np.allclose(basis[:n, k:], 0)


def test_manin_report_exact(example):
    _, _, rep = manin_decompose(example.h)
    assert rep.closure_plus < 1e-12 and rep.closure_minus < 1e-12
    assert rep.isotropy_plus == 0.0 and rep.isotropy_minus == 0.0
    assert rep.gamma_rank_plus == rep.gamma_rank_minus == example.h.n


def test_h_projectors(example):
    h = example.h
    assert np.allclose(h.pi("+") + h.pi("-"), np.eye(h.dim))
    assert np.allclose(h.pi1.T @ h.pi1 + h.pi2.T @ h.pi2, np.eye(h.dim))


def test_gamma(example, rng):
    h = example.h
    assert np.array_equal(gamma(h, np.zeros(h.dim)), np.zeros(h.dim))
    for _ in range(100):
        v = rng.normal(size=h.dim)
        assert np.allclose(gamma_inverse(h, gamma(h, v)), v, atol=1e-12)
    # gamma(h+) is the dual of h-: zero on h+, nondegenerate against h-
    hp, hm = h.part("+").basis, h.part("-").basis
    gp = np.stack([gamma(h, c) for c in hp.T])
    assert np.allclose(gp @ hp, 0)
    assert np.linalg.matrix_rank(gp @ hm) == h.n


def test_gamma_nilpotent_e2():
    h = catalog.load("nilpotent3").h
    g = gamma(h, hvec(E4[1], Z4))
    want = np.zeros(8)
    want[5] = 1.0
    assert np.allclose(g, want)


def test_jacobi(example):
    assert jacobi_residual(example.h) < 1e-12


def test_phi_tilde(example, rng):
    h = example.h
    z = rng.normal(size=h.n)
    m = h.phi_tilde(z)
    for i in range(h.n):
        assert np.allclose(m[:, i], h.tau_ad(np.eye(h.n)[i]) @ z)
    assert np.array_equal(h.phi_tilde(np.zeros(h.n)), np.zeros((h.n, h.n)))


def test_phi_tilde_nilpotent():
    h = catalog.load("nilpotent3").h
    assert np.allclose(h.phi_tilde(E4[0]) @ E4[1], -E4[3])
