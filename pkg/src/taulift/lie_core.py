"""Structure-constant Lie algebras, bilinear forms, splits and the tau-action.

Coordinates are always numpy vectors in the original basis of the algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

DEFAULT_TOL = 1e-10


class LieError(ValueError):
    """Raised for malformed algebras, forms or splits."""


class FormError(LieError):
    """Raised when a bilinear form is not symmetric or is degenerate."""


def _vec(x, dim: int, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (dim,):
        raise LieError(f"{name} has shape {v.shape}, expected ({dim},)")
    return v


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Lie algebra given by structure constants ``c[i, j, k]``.

    ``[e_i, e_j] = sum_k c[i, j, k] e_k``.  Antisymmetry is enforced when
    ``check`` is true; Jacobi is only reported by :func:`validate`.
    """

    c: np.ndarray
    labels: tuple[str, ...] = ()
    check: bool = True

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 3 or c.shape[0] != c.shape[1] or c.shape[0] != c.shape[2]:
            raise LieError(f"structure constants must be (n, n, n), got {c.shape}")
        if self.check and not np.array_equal(c, -c.transpose(1, 0, 2)):
            raise LieError("structure constants are not antisymmetric")
        labels = tuple(self.labels) or tuple(f"e{i + 1}" for i in range(c.shape[0]))
        if len(labels) != c.shape[0]:
            raise LieError("labels length does not match dimension")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_brackets(
        cls,
        dim: int,
        brackets: Mapping[tuple[int, int], Mapping[int, float]],
        labels: Sequence[str] = (),
    ) -> "LieAlgebra":
        """Build from nonvanishing brackets ``{(i, j): {k: coeff}}`` (0-based)."""
        c = np.zeros((dim, dim, dim))
        for (i, j), coeffs in brackets.items():
            if i == j:
                raise LieError(f"bracket [e{i + 1}, e{i + 1}] must vanish")
            for k, v in coeffs.items():
                c[i, j, k] += v
                c[j, i, k] -= v
        return cls(c, tuple(labels))

    def bracket(self, x, y) -> np.ndarray:
        x = _vec(x, self.dim, "X")
        y = _vec(y, self.dim, "Y")
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def ad(self, x) -> np.ndarray:
        """Matrix of ad_X: column j is [X, e_j]."""
        x = _vec(x, self.dim, "X")
        return np.einsum("i,ijk->kj", x, self.c)


def bracket(algebra: LieAlgebra, x, y) -> np.ndarray:
    return algebra.bracket(x, y)


def ad_matrix(algebra: LieAlgebra, x) -> np.ndarray:
    return algebra.ad(x)


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry: float
    jacobi: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.antisymmetry < self.tol and self.jacobi < self.tol


def validate(algebra: LieAlgebra | np.ndarray, tol: float = 1e-12) -> ValidationReport:
    """Antisymmetry and Jacobi residuals of a structure-constant tensor."""
    c = algebra.c if isinstance(algebra, LieAlgebra) else np.asarray(algebra, float)
    anti = float(np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0))
    # J[i,j,k,l] = sum_m c_ij^m c_mk^l + cyclic
    t = np.einsum("ijm,mkl->ijkl", c, c)
    jac = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return ValidationReport(anti, float(np.max(np.abs(jac), initial=0.0)), tol)


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """Symmetric nondegenerate form ``(X, Y) = X^T B Y``."""

    gram: np.ndarray

    def __post_init__(self):
        b = np.array(self.gram, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise FormError(f"gram matrix must be square, got {b.shape}")
        bad = np.argwhere(b != b.T)
        if bad.size:
            i, j = bad[0]
            raise FormError(f"form not symmetric at entries ({i}, {j}) and ({j}, {i})")
        if abs(np.linalg.det(b)) <= 1e-12:
            raise FormError("form is degenerate (|det B| <= 1e-12)")
        b.setflags(write=False)
        inv = np.linalg.inv(b)
        inv.setflags(write=False)
        object.__setattr__(self, "gram", b)
        object.__setattr__(self, "_inv", inv)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        return self._inv

    def pair(self, x, y) -> float:
        return float(np.asarray(x, float) @ self.gram @ np.asarray(y, float))

    def flat(self, x) -> np.ndarray:
        """psi: g -> g*, the covector Y -> (X, Y)."""
        return self.gram @ np.asarray(x, float)

    def sharp(self, xi) -> np.ndarray:
        """Inverse of :meth:`flat`."""
        return self._inv @ np.asarray(xi, float)


def null_space(a: np.ndarray, rel_tol: float = 1e-10) -> np.ndarray:
    """Columns spanning ker(a), rank decided relative to the largest singular value."""
    a = np.atleast_2d(np.asarray(a, float))
    n = a.shape[1]
    if a.size == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rel_tol * smax)) if smax > 0 else 0
    return vt[rank:].T.copy()


def canonical_basis(basis: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Reduced column-echelon form: coordinate subspaces come out as unit vectors."""
    m = np.asarray(basis, float).T.copy()
    rows, cols = m.shape
    r = 0
    for col in range(cols):
        if r == rows:
            break
        piv = r + int(np.argmax(np.abs(m[r:, col])))
        if abs(m[piv, col]) <= tol:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] /= m[r, col]
        for k in range(rows):
            if k != r:
                m[k] -= m[k, col] * m[r]
        r += 1
    m[np.abs(m) < tol] = 0.0
    return m[:r].T.copy()


def complement_projector(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Projector onto span(u) along span(v); u, v are column bases of a direct sum."""
    w = np.hstack([u, v])
    if w.shape[0] != w.shape[1] or np.linalg.matrix_rank(w) < w.shape[0]:
        raise LieError("subspaces do not form a direct sum")
    k = u.shape[1]
    d = np.zeros(w.shape[0])
    d[:k] = 1.0
    return (w * d) @ np.linalg.inv(w)


@dataclass(frozen=True, eq=False)
class Subspace:
    basis: np.ndarray
    projector: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def residual(self, x) -> float:
        """Distance-like measure of x from the subspace."""
        x = np.asarray(x, float)
        return float(np.max(np.abs(x - self.projector @ x), initial=0.0))


def _subspace_pair(u: np.ndarray, v: np.ndarray) -> tuple[Subspace, Subspace]:
    p = complement_projector(u, v)
    return Subspace(u, p), Subspace(v, np.eye(p.shape[0]) - p)


@dataclass(frozen=True, eq=False)
class SplitDoubleAlgebra:
    """Double Lie algebra g = g+ (+) g- with a (possibly non-invariant) form."""

    algebra: LieAlgebra
    form: BilinearForm
    plus: tuple[int, ...]
    minus: tuple[int, ...]
    tol: float = 1e-12
    g_plus: Subspace = field(init=False)
    g_minus: Subspace = field(init=False)
    plus_perp: Subspace = field(init=False)
    minus_perp: Subspace = field(init=False)

    def __post_init__(self):
        n = self.algebra.dim
        if self.form.dim != n:
            raise LieError("form and algebra dimensions differ")
        plus, minus = tuple(int(i) for i in self.plus), tuple(int(i) for i in self.minus)
        if sorted(plus + minus) != list(range(n)):
            raise LieError("plus and minus must partition the basis indices")
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        eye = np.eye(n)
        up, um = eye[:, list(plus)], eye[:, list(minus)]
        for name, idx in (("plus", plus), ("minus", minus)):
            res = _closure_residual(self.algebra, eye[:, list(idx)], set(idx))
            if res >= self.tol:
                raise LieError(f"g_{name} is not a subalgebra (residual {res:.3e})")
        gp, gm = _subspace_pair(up, um)
        b = self.form.gram
        pp = canonical_basis(null_space(up.T @ b))
        mp = canonical_basis(null_space(um.T @ b))
        if pp.shape[1] + mp.shape[1] != n:
            raise LieError("annihilators do not have complementary dimensions")
        ppp, mpp = _subspace_pair(pp, mp)
        object.__setattr__(self, "g_plus", gp)
        object.__setattr__(self, "g_minus", gm)
        object.__setattr__(self, "plus_perp", ppp)
        object.__setattr__(self, "minus_perp", mpp)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def pi(self, side: str) -> np.ndarray:
        return (self.g_plus if _sign(side) > 0 else self.g_minus).projector

    def pi_perp(self, side: str) -> np.ndarray:
        return (self.plus_perp if _sign(side) > 0 else self.minus_perp).projector

    def tau_ad_matrix(self, x) -> np.ndarray:
        """ad^tau_X = -B^{-1} ad_X^T B."""
        b = self.form.gram
        return -self.form.inverse @ self.algebra.ad(x).T @ b

    def tau_group(self, adg: np.ndarray) -> np.ndarray:
        """tau_g = B^{-1} (Ad_{g^{-1}})^T B given the matrix of Ad_g."""
        adg = np.asarray(adg, float)
        return self.form.inverse @ np.linalg.inv(adg).T @ self.form.gram


def _sign(side) -> int:
    if side in ("+", 1, "plus"):
        return 1
    if side in ("-", -1, "minus"):
        return -1
    raise LieError(f"side must be '+' or '-', got {side!r}")


def _closure_residual(algebra: LieAlgebra, basis: np.ndarray, idx: set[int]) -> float:
    mask = np.array([i not in idx for i in range(algebra.dim)])
    worst = 0.0
    for a in basis.T:
        for b in basis.T:
            worst = max(worst, float(np.max(np.abs(algebra.bracket(a, b)[mask]), initial=0.0)))
    return worst


def tau_ad(split: SplitDoubleAlgebra, x, z) -> np.ndarray:
    return split.tau_ad_matrix(x) @ _vec(z, split.dim, "Z")


def tau_group(split: SplitDoubleAlgebra, adg: np.ndarray, x) -> np.ndarray:
    return split.tau_group(adg) @ _vec(x, split.dim)


def tilde_tau(split: SplitDoubleAlgebra, side: str, adg: np.ndarray, zperp, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Pi_{g(side)perp} tau(h) Z for h in the opposite factor and Z in g(side)perp."""
    perp = split.plus_perp if _sign(side) > 0 else split.minus_perp
    z = _vec(zperp, split.dim, "Zperp")
    if perp.residual(z) > tol:
        raise LieError(f"Zperp is not in the annihilator of g{side}")
    return perp.projector @ split.tau_group(adg) @ z


def orbit_symplectic(split: SplitDoubleAlgebra, adg: np.ndarray, x, y, z) -> float:
    """(tau(g) X, [Y, Z])_g."""
    return split.form.pair(tau_group(split, adg, x), split.algebra.bracket(y, z))


def antihomomorphism_residual(split: SplitDoubleAlgebra, x, y) -> float:
    """|| ad^tau_[X,Y] + [ad^tau_X, ad^tau_Y] ||_inf.

    The commutator on End(g) is taken as [A, B] = BA - AB, the bracket of
    endomorphisms composed as right actions.  With the ordinary commutator
    AB - BA the same identity reads ad^tau_[X,Y] = [ad^tau_X, ad^tau_Y].
    """
    a, b = split.tau_ad_matrix(x), split.tau_ad_matrix(y)
    lhs = split.tau_ad_matrix(split.algebra.bracket(x, y))
    return float(np.max(np.abs(lhs + (b @ a - a @ b)), initial=0.0))


def invariance_residual(split: SplitDoubleAlgebra, x, y, z) -> float:
    """|([X,Y],Z) + (Y,[X,Z])| for the base form (nonzero when not Ad-invariant)."""
    f, g = split.form, split.algebra
    return abs(f.pair(g.bracket(x, y), z) + f.pair(y, g.bracket(x, z)))
