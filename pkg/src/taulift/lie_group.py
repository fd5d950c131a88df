"""Matrix groups G and H = G x_tau g: products, exponentials, factorization, dressing."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .lie_core import LieAlgebra, LieError, _sign
from .semidirect import SemidirectAlgebra, halves, hvec


class RepresentationError(LieError):
    """A conjugated generator left the span of the representation."""


class NumericError(ArithmeticError):
    """A series or iteration failed to converge."""


class FactorizationError(NumericError):
    """An element could not be written as g+ g-."""


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential; exact truncated series when m is nilpotent."""
    m = np.asarray(m, float)
    r = m.shape[0]
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    terms = [np.eye(r)]
    p = np.eye(r)
    for k in range(1, r + 1):
        p = p @ m
        if float(np.max(np.abs(p), initial=0.0)) <= 1e-15 * scale**k:
            return np.sum(terms, axis=0)
        terms.append(terms[-1] @ m / k)
    # scipy uses scaling and squaring around a degree-13 Pade approximant
    return scipy.linalg.expm(m)


@dataclass(frozen=True, eq=False)
class MatrixRep:
    """Faithful matrices rho(e_i), stacked as an (n, r, r) array."""

    rho: np.ndarray
    span_tol: float = 1e-8
    _solve: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.ndim != 3 or rho.shape[1] != rho.shape[2]:
            raise RepresentationError(f"rho must be (n, r, r), got {rho.shape}")
        flat = rho.reshape(rho.shape[0], -1).T
        if np.linalg.matrix_rank(flat) < rho.shape[0]:
            raise RepresentationError("representation is not faithful")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "_solve", np.linalg.pinv(flat))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def rep_dim(self) -> int:
        return self.rho.shape[1]

    def matrix(self, x) -> np.ndarray:
        return np.einsum("i,ijk->jk", np.asarray(x, float), self.rho)

    def coords(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, float)
        x = self._solve @ m.ravel()
        res = float(np.max(np.abs(self.matrix(x) - m), initial=0.0))
        if res > self.span_tol * max(1.0, float(np.max(np.abs(m), initial=0.0))):
            raise RepresentationError(f"matrix leaves the span of the representation (residual {res:.3e})")
        return x

    def exp(self, x) -> np.ndarray:
        return expm(self.matrix(x))

    def homomorphism_residual(self, algebra: LieAlgebra) -> float:
        worst = 0.0
        for i in range(self.dim):
            for j in range(self.dim):
                a, b = self.rho[i], self.rho[j]
                lhs = self.matrix(algebra.c[i, j])
                worst = max(worst, float(np.max(np.abs(lhs - (a @ b - b @ a)))))
        return worst


def adjoint(rep: MatrixRep, g: np.ndarray) -> np.ndarray:
    """Matrix of Ad_g in algebra coordinates."""
    g = np.asarray(g, float)
    gi = np.linalg.inv(g)
    return np.stack([rep.coords(g @ r @ gi) for r in rep.rho], axis=1)


@dataclass(frozen=True, eq=False)
class HElement:
    """Element (g, X) of H; g is a representation matrix, X a vector in g."""

    g: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g", np.asarray(self.g, float))
        object.__setattr__(self, "x", np.asarray(self.x, float))

    def distance(self, other: "HElement") -> float:
        return max(
            float(np.max(np.abs(self.g - other.g))),
            float(np.max(np.abs(self.x - other.x))),
        )


@dataclass(frozen=True)
class ClosedForm:
    """Factorization g -> (g+, g-) given by an explicit formula."""

    name: str
    func: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class Newton:
    """Damped Gauss-Newton on second-kind coordinates, seeded at zero."""

    max_iter: int = 50
    tol: float = 1e-12


FactorizationStrategy = ClosedForm | Newton


def _product_of_exps(mats: Sequence[np.ndarray], coeffs: np.ndarray) -> list[np.ndarray]:
    return [expm(c * m) for c, m in zip(coeffs, mats)]


def newton_factorize(rep: MatrixRep, plus: Sequence[int], minus: Sequence[int], g: np.ndarray,
                     max_iter: int = 50, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Solve exp(a1 xi1)...exp(ak xik) exp(b1 eta1)... = g for (a, b)."""
    mats = [rep.rho[i] for i in plus] + [rep.rho[i] for i in minus]
    k = len(plus)
    r = rep.rep_dim
    coef = np.zeros(len(mats))

    def residual(c):
        fs = _product_of_exps(mats, c)
        prod = np.eye(r)
        for f in fs:
            prod = prod @ f
        return prod - g, fs

    res, fs = residual(coef)
    err = float(np.max(np.abs(res)))
    bound = tol * max(1.0, float(np.max(np.abs(g))))
    for _ in range(max_iter):
        if err < bound:
            break
        cols = []
        for i in range(len(mats)):
            left = np.eye(r)
            for f in fs[:i]:
                left = left @ f
            right = np.eye(r)
            for f in fs[i:]:
                right = right @ f
            cols.append((left @ mats[i] @ right).ravel())
        jac = np.stack(cols, axis=1)
        step = np.linalg.lstsq(jac, -res.ravel(), rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            trial = coef + lam * step
            tres, tfs = residual(trial)
            terr = float(np.max(np.abs(tres)))
            if terr < err:
                coef, res, fs, err = trial, tres, tfs, terr
                break
            lam *= 0.5
        else:
            break
    if err >= bound:
        raise FactorizationError(f"Newton factorization did not converge (residual {err:.3e})")
    gp = np.eye(r)
    for f in fs[:k]:
        gp = gp @ f
    gm = np.eye(r)
    for f in fs[k:]:
        gm = gm @ f
    return gp, gm


@dataclass(frozen=True, eq=False)
class SemidirectGroup:
    """H = G x_tau g realized through a matrix representation of G."""

    h: SemidirectAlgebra
    rep: MatrixRep
    strategy: FactorizationStrategy = Newton()

    def __post_init__(self):
        if self.rep.dim != self.h.n:
            raise RepresentationError("representation size does not match the algebra")

    @property
    def split(self):
        return self.h.base

    def identity(self) -> HElement:
        return HElement(np.eye(self.rep.rep_dim), np.zeros(self.h.n))

    def element(self, g, x=None) -> HElement:
        return HElement(g, np.zeros(self.h.n) if x is None else x)

    def Ad(self, g) -> np.ndarray:
        return adjoint(self.rep, g)

    def tau(self, g) -> np.ndarray:
        return self.split.tau_group(self.Ad(g))

    def multiply(self, a: HElement, b: HElement) -> HElement:
        """(g, X)(k, Y) = (gk, tau_{k^-1} X + Y)."""
        return HElement(a.g @ b.g, self.tau(np.linalg.inv(b.g)) @ a.x + b.x)

    def inverse(self, a: HElement) -> HElement:
        return HElement(np.linalg.inv(a.g), -self.tau(a.g) @ a.x)

    def exp(self, v, t: float = 1.0) -> HElement:
        """Exp(t (X, Y)) = (exp(tX), phi(t ad^tau_X) tY), phi(z) = (1 - e^{-z}) / z."""
        x, y = halves(v)
        g = self.rep.exp(t * x)
        a = self.h.tau_ad(x)
        term = t * y
        acc = term.copy()
        for n in range(2, 61):
            term = -t * (a @ term) / n
            acc = acc + term
            tn = float(np.max(np.abs(term), initial=0.0))
            if tn == 0.0 or tn < 1e-16 * float(np.max(np.abs(acc), initial=0.0)):
                break
        else:
            if float(np.max(np.abs(term))) > 1e-12 * max(1.0, float(np.max(np.abs(acc)))):
                raise NumericError("exponential series did not converge in 60 terms")
        return HElement(g, acc)

    def adjoint(self, a: HElement, v) -> np.ndarray:
        """Ad^H_(g,Z)(X, Y) = (Ad_g X, tau_g (Y - ad^tau_X Z))."""
        x, y = halves(v)
        return hvec(self.Ad(a.g) @ x, self.tau(a.g) @ (y - self.h.tau_ad(x) @ a.x))

    def adjoint_matrix(self, a: HElement) -> np.ndarray:
        return np.stack([self.adjoint(a, e) for e in np.eye(self.h.dim)], axis=1)

    # factorization -------------------------------------------------------

    def membership(self, g, side) -> float:
        """Residual of Ad_g preserving g(side); zero for members of G(side)."""
        sub = self.split.g_plus if _sign(side) > 0 else self.split.g_minus
        adg = self.Ad(g)
        normal = max(sub.residual(c) for c in (adg @ sub.basis).T)
        # normalizing g(side) is not enough when it is an ideal, so also factorize
        try:
            gp, gm = self.factorize_g(g)
        except (FactorizationError, np.linalg.LinAlgError):
            return float("inf")
        other = gm if _sign(side) > 0 else gp
        return max(normal, float(np.max(np.abs(other - np.eye(len(other))))))

    def h_membership(self, a: HElement, side) -> float:
        perp = self.split.plus_perp if _sign(side) > 0 else self.split.minus_perp
        return max(self.membership(a.g, side), perp.residual(a.x))

    def factorize_g(self, g) -> tuple[np.ndarray, np.ndarray]:
        g = np.asarray(g, float)
        s = self.strategy
        if isinstance(s, ClosedForm):
            gp, gm = s.func(g)
        else:
            gp, gm = newton_factorize(self.rep, self.split.plus, self.split.minus, g, s.max_iter, s.tol)
        res = float(np.max(np.abs(gp @ gm - g)))
        if not np.all(np.isfinite(res)) or res > 1e-10 * max(1.0, float(np.max(np.abs(g)))):
            raise FactorizationError(f"factorization residual {res:.3e}")
        return gp, gm

    def factorize(self, a: HElement) -> tuple[HElement, HElement]:
        """(g, X) = (g+, X+perp)(g-, X-perp)."""
        s = self.split
        gp, gm = self.factorize_g(a.g)
        pp, pm = s.pi_perp("+"), s.pi_perp("-")
        xp = pp @ self.tau(gm) @ (pp @ a.x)
        xm = pm @ (a.x - self.tau(np.linalg.inv(gm)) @ xp)
        return HElement(gp, xp), HElement(gm, xm)

    def dressing(self, a: HElement, b: HElement, side="+") -> HElement:
        """Dressing of ``a`` (in H(side)) by ``b`` (in the opposite factor).

        Both dressed factors come from refactorizing b- a+ = a+^{b-} b-^{a+}.
        """
        if _sign(side) > 0:
            ap, bm = self.factorize(self.multiply(b, a))
            return ap
        ap, bm = self.factorize(self.multiply(a, b))
        return bm

    def dressing_infinitesimal(self, a: HElement, v, side="+") -> np.ndarray:
        """Generator of the dressing of ``a`` by Exp(t v) at t = 0.

        Returned as (g' g^{-1}, X'): right-trivialized group velocity and the
        derivative of the fiber vector.
        """
        h = self.h
        if _sign(side) > 0:
            w = h.pi("+") @ self.adjoint(self.inverse(a), v)
            w1, w2 = halves(w)
            return hvec(self.Ad(a.g) @ w1, w2 - h.tau_ad(w1) @ a.x)
        w = h.pi("-") @ self.adjoint(a, v)
        w1, w2 = halves(w)
        return hvec(w1, self.tau(np.linalg.inv(a.g)) @ w2)

    def tangent_at(self, curve: Callable[[float], HElement], step: float = 1e-5) -> np.ndarray:
        """Central-difference tangent of a curve at t = 0 in the same trivialization."""
        p, m, c = curve(step), curve(-step), curve(0.0)
        gdot = (p.g - m.g) / (2 * step)
        xdot = (p.x - m.x) / (2 * step)
        return hvec(self.rep.coords(gdot @ np.linalg.inv(c.g)), xdot)


def h_multiply(group: SemidirectGroup, a: HElement, b: HElement) -> HElement:
    return group.multiply(a, b)


def h_inverse(group: SemidirectGroup, a: HElement) -> HElement:
    return group.inverse(a)


def h_exp(group: SemidirectGroup, t: float, v) -> HElement:
    return group.exp(v, t)


def h_adjoint(group: SemidirectGroup, a: HElement, v) -> np.ndarray:
    return group.adjoint(a, v)


def factorize_g(group: SemidirectGroup, g) -> tuple[np.ndarray, np.ndarray]:
    return group.factorize_g(g)


def factorize_h(group: SemidirectGroup, a: HElement) -> tuple[HElement, HElement]:
    return group.factorize(a)


def dressing(group: SemidirectGroup, a: HElement, b: HElement, side="+") -> HElement:
    return group.dressing(a, b, side)


def dressing_infinitesimal(group: SemidirectGroup, a: HElement, v, side="+") -> np.ndarray:
    return group.dressing_infinitesimal(a, v, side)
