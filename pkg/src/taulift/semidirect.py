"""The lifted algebra h = g x_tau g with its invariant pairing and Manin split.

Elements of h are stacked vectors ``[X; Y]`` of length ``2 * dim g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lie_core import LieError, SplitDoubleAlgebra, Subspace, _sign, complement_projector


def hvec(x, y) -> np.ndarray:
    """Stack first and second slots into an h-vector."""
    return np.concatenate([np.asarray(x, float), np.asarray(y, float)])


def halves(v) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(v, float)
    n = v.shape[0] // 2
    return v[:n], v[n:]


@dataclass(frozen=True)
class ManinReport:
    closure_plus: float
    closure_minus: float
    isotropy_plus: float
    isotropy_minus: float
    gamma_rank_plus: int
    gamma_rank_minus: int
    dim_g: int

    def ok(self, tol: float = 1e-12) -> bool:
        return (
            max(self.closure_plus, self.closure_minus, self.isotropy_plus, self.isotropy_minus) < tol
            and self.gamma_rank_plus == self.dim_g
            and self.gamma_rank_minus == self.dim_g
        )


@dataclass(frozen=True, eq=False)
class SemidirectAlgebra:
    base: SplitDoubleAlgebra
    tau_tensor: np.ndarray = field(init=False, repr=False)
    gram: np.ndarray = field(init=False, repr=False)
    h_plus: Subspace = field(init=False)
    h_minus: Subspace = field(init=False)

    def __post_init__(self):
        s = self.base
        n = s.dim
        eye = np.eye(n)
        # tau_tensor[i] is the matrix of ad^tau_{e_i}
        tt = np.stack([s.tau_ad_matrix(eye[i]) for i in range(n)])
        b = s.form.gram
        z = np.zeros((n, n))
        gram = np.block([[z, b], [b, z]])
        zp, zm = np.zeros((n, len(s.plus))), np.zeros((n, len(s.minus)))
        up = np.vstack([
            np.hstack([eye[:, list(s.plus)], np.zeros((n, s.plus_perp.dim))]),
            np.hstack([zp, s.plus_perp.basis]),
        ])
        um = np.vstack([
            np.hstack([eye[:, list(s.minus)], np.zeros((n, s.minus_perp.dim))]),
            np.hstack([zm, s.minus_perp.basis]),
        ])
        if up.shape[1] != n or um.shape[1] != n:
            raise LieError("h+ and h- must each have dimension dim g")
        p = complement_projector(up, um)
        object.__setattr__(self, "tau_tensor", tt)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "h_plus", Subspace(up, p))
        object.__setattr__(self, "h_minus", Subspace(um, np.eye(2 * n) - p))

    @property
    def n(self) -> int:
        return self.base.dim

    @property
    def dim(self) -> int:
        return 2 * self.base.dim

    def part(self, side) -> Subspace:
        return self.h_plus if _sign(side) > 0 else self.h_minus

    def pi(self, side) -> np.ndarray:
        return self.part(side).projector

    @property
    def pi1(self) -> np.ndarray:
        n = self.n
        return np.hstack([np.eye(n), np.zeros((n, n))])

    @property
    def pi2(self) -> np.ndarray:
        n = self.n
        return np.hstack([np.zeros((n, n)), np.eye(n)])

    @property
    def manin_basis(self) -> np.ndarray:
        """Columns: h+ basis (g+ part then g+perp part), then the h- basis."""
        return np.hstack([self.h_plus.basis, self.h_minus.basis])

    def tau_ad(self, x) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(x, float), self.tau_tensor)

    def phi_tilde(self, z) -> np.ndarray:
        """Matrix of X -> ad^tau_X Z."""
        return np.einsum("ijk,k->ji", self.tau_tensor, np.asarray(z, float))

    def ad(self, v) -> np.ndarray:
        """Matrix of ad^h_(X,Y)."""
        x, y = halves(v)
        z = np.zeros((self.n, self.n))
        return np.block([[self.base.algebra.ad(x), z], [-self.phi_tilde(y), self.tau_ad(x)]])

    def bracket(self, u, v) -> np.ndarray:
        x, y = halves(u)
        x2, y2 = halves(v)
        g = self.base.algebra
        return hvec(g.bracket(x, x2), self.tau_ad(x) @ y2 - self.tau_ad(x2) @ y)

    def form(self, u, v) -> float:
        return float(np.asarray(u, float) @ self.gram @ np.asarray(v, float))

    def gamma(self, v) -> np.ndarray:
        """Covector w -> (v, w)_h."""
        return self.gram @ np.asarray(v, float)

    def gamma_inverse(self, xi) -> np.ndarray:
        return np.linalg.solve(self.gram, np.asarray(xi, float))


def h_bracket(h: SemidirectAlgebra, u, v) -> np.ndarray:
    return h.bracket(u, v)


def h_form(h: SemidirectAlgebra, u, v) -> float:
    return h.form(u, v)


def gamma(h: SemidirectAlgebra, v) -> np.ndarray:
    return h.gamma(v)


def gamma_inverse(h: SemidirectAlgebra, xi) -> np.ndarray:
    return h.gamma_inverse(xi)


def verify_ad_invariance(h: SemidirectAlgebra, samples: int = 100, rng=None) -> float:
    """Max |([W,U],V)_h + (U,[W,V])_h| over random triples."""
    rng = np.random.default_rng(rng)
    worst = 0.0
    for _ in range(samples):
        w, u, v = rng.standard_normal((3, h.dim))
        res = abs(h.form(h.bracket(w, u), v) + h.form(u, h.bracket(w, v)))
        worst = max(worst, res)
    return worst


def _closure(h: SemidirectAlgebra, sub: Subspace) -> float:
    worst = 0.0
    for a in sub.basis.T:
        for b in sub.basis.T:
            worst = max(worst, sub.residual(h.bracket(a, b)))
    return worst


def _isotropy(h: SemidirectAlgebra, sub: Subspace) -> float:
    return float(np.max(np.abs(sub.basis.T @ h.gram @ sub.basis), initial=0.0))


def manin_decompose(h: SemidirectAlgebra) -> tuple[np.ndarray, np.ndarray, ManinReport]:
    hp, hm = h.h_plus, h.h_minus
    cross = hm.basis.T @ h.gram @ hp.basis
    report = ManinReport(
        closure_plus=_closure(h, hp),
        closure_minus=_closure(h, hm),
        isotropy_plus=_isotropy(h, hp),
        isotropy_minus=_isotropy(h, hm),
        gamma_rank_plus=int(np.linalg.matrix_rank(cross)),
        gamma_rank_minus=int(np.linalg.matrix_rank(cross.T)),
        dim_g=h.n,
    )
    return hp.basis.copy(), hm.basis.copy(), report


def jacobi_residual(h: SemidirectAlgebra) -> float:
    """Jacobi residual of the lifted bracket on all basis triples."""
    eye = np.eye(h.dim)
    worst = 0.0
    for a in eye:
        for b in eye:
            ab = h.bracket(a, b)
            for c in eye:
                r = h.bracket(ab, c) + h.bracket(h.bracket(b, c), a) + h.bracket(h.bracket(c, a), b)
                worst = max(worst, float(np.max(np.abs(r))))
    return worst
