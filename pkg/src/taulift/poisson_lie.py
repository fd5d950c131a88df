"""Cobrackets of h+ and h-, and Poisson-Lie bivectors on H+ and H-.

Tensors live in h (x) h in stacked h-coordinates: ``T[p, q]`` is the coefficient
of ``e_p (x) e_q``.  Covectors are paired with tensors directly and vectors are
turned into covectors through the h-form, so ``<a (x) b, T> = (Ja)^T T (Jb)``.
Wedges follow a ^ b = a (x) b - b (x) a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lie_core import LieError, _sign
from .lie_group import HElement, SemidirectGroup
from .semidirect import SemidirectAlgebra, halves, hvec


def wedge(a, b) -> np.ndarray:
    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.outer(a, b) - np.outer(b, a)


def tensor_pairing(h: SemidirectAlgebra, t: np.ndarray, a, b) -> float:
    """<gamma(a) (x) gamma(b), T> for vectors a, b of h."""
    return float(h.gamma(a) @ t @ h.gamma(b))


@dataclass(frozen=True, eq=False)
class CobracketValue:
    element: np.ndarray
    tensor: np.ndarray


@dataclass(frozen=True, eq=False)
class BivectorValue:
    point: HElement
    operator: np.ndarray  # h(opp) -> h(side), extended by zero on h(side)
    tensor: np.ndarray

    @property
    def antisymmetry(self) -> float:
        return float(np.max(np.abs(self.tensor + self.tensor.T), initial=0.0))


def _opp(side) -> str:
    return "-" if _sign(side) > 0 else "+"


def cobracket(h: SemidirectAlgebra, side, xi, tol: float = 1e-10) -> CobracketValue:
    """delta(xi) in h(side) ^ h(side), dual to the bracket of h(opp)."""
    xi = np.asarray(xi, float)
    own, other = h.part(side), h.part(_opp(side))
    if own.residual(xi) > tol:
        raise LieError(f"xi is not in h{side}")
    m, n = own.basis, other.basis
    g = n.T @ h.gram @ m
    r = np.array([[h.form(h.bracket(a, b), xi) for b in n.T] for a in n.T])
    gi = np.linalg.inv(g)
    c = gi @ r @ gi.T
    return CobracketValue(xi, m @ c @ m.T)


def cobracket_constants(h: SemidirectAlgebra, side) -> np.ndarray:
    """D[i, j, k]: coefficient of m_i (x) m_j in delta(m_k), in the Manin basis of h(side).

    Read as structure constants they define the dual Lie algebra h(side)*.
    """
    m = h.part(side).basis
    minv = np.linalg.pinv(m)
    out = np.zeros((m.shape[1],) * 3)
    for k, col in enumerate(m.T):
        out[:, :, k] = minv @ cobracket(h, side, col).tensor @ minv.T
    return out


def projector_A(group: SemidirectGroup, g, sign) -> np.ndarray:
    """A(g) = Ad_{g^-1} Pi_{g(sign)} Ad_g."""
    adg = group.Ad(g)
    return np.linalg.inv(adg) @ group.split.pi(sign) @ adg


def phi_tilde(h: SemidirectAlgebra, z) -> np.ndarray:
    return h.phi_tilde(z)


def _from_operator(h: SemidirectAlgebra, point: HElement, op: np.ndarray) -> BivectorValue:
    return BivectorValue(point, op, op @ np.linalg.inv(h.gram))


def _check_member(group: SemidirectGroup, a: HElement, side, tol: float = 1e-9) -> None:
    res = group.h_membership(a, side)
    if res > tol:
        raise LieError(f"point is not in H{side} (membership residual {res:.3e})")


def bivector_plus(group: SemidirectGroup, a: HElement) -> BivectorValue:
    """Right-trivialized pi+ from (u', pi u'')_h = (Pi- Ad_{a^-1} u', Pi+ Ad_{a^-1} u'')_h."""
    _check_member(group, a, "+")
    h = group.h
    ad_a = group.adjoint_matrix(a)
    ad_ai = group.adjoint_matrix(group.inverse(a))
    op = ad_a @ h.pi("+") @ ad_ai @ h.pi("-")
    return _from_operator(h, a, op)


def bivector_plus_block(group: SemidirectGroup, a: HElement) -> np.ndarray:
    """The same operator assembled blockwise from A+, phi~ and tau."""
    s, h = group.split, group.h
    g, z = a.g, a.x
    gi = np.linalg.inv(g)
    ad_gi = group.Ad(gi)
    tg, tgi = group.tau(g), group.tau(gi)
    pp = s.pi_perp("+")
    a11 = projector_A(group, gi, "+")
    a21 = tg @ pp @ h.phi_tilde(z) @ s.pi("-") @ ad_gi
    a22 = tg @ pp @ tgi
    blk = np.block([[a11, np.zeros_like(a11)], [a21, a22]])
    return blk @ h.pi("-")


def bivector_minus(group: SemidirectGroup, b: HElement) -> BivectorValue:
    """Left-trivialized pi- from (u', pi u'')_h = (Pi+ Ad_b u', Pi- Ad_b u'')_h."""
    _check_member(group, b, "-")
    h = group.h
    ad_b = group.adjoint_matrix(b)
    op = np.linalg.inv(ad_b) @ h.pi("-") @ ad_b @ h.pi("+")
    return _from_operator(h, b, op)


def bivector(group: SemidirectGroup, point: HElement, side) -> BivectorValue:
    return bivector_plus(group, point) if _sign(side) > 0 else bivector_minus(group, point)


def defining_relation_residual(group: SemidirectGroup, bv: BivectorValue, side) -> float:
    """Max gap between <.,pi> and the crossed-adjoint right-hand side on basis pairs."""
    h = group.h
    pts = h.part(_opp(side)).basis.T
    if _sign(side) > 0:
        ad = group.adjoint_matrix(group.inverse(bv.point))
        first, second = h.pi("-"), h.pi("+")
    else:
        ad = group.adjoint_matrix(bv.point)
        first, second = h.pi("+"), h.pi("-")
    worst = 0.0
    for u1 in pts:
        for u2 in pts:
            lhs = h.form(u1, bv.operator @ u2)
            rhs = h.form(first @ ad @ u1, second @ ad @ u2)
            worst = max(worst, abs(lhs - rhs), abs(tensor_pairing(h, bv.tensor, u1, u2) - lhs))
    return worst


def dressing_from_bivector(group: SemidirectGroup, point: HElement, v, side) -> np.ndarray:
    """Dressing generator as (g' g^{-1}, X') from the translated bivector contraction."""
    bv = bivector(group, point, side)
    w1, w2 = halves(bv.operator @ np.asarray(v, float))
    if _sign(side) > 0:
        # s -> Exp(s w) a
        return hvec(w1, group.tau(np.linalg.inv(point.g)) @ w2)
    # s -> b Exp(s w)
    return hvec(group.Ad(point.g) @ w1, w2 - group.h.tau_ad(w1) @ point.x)


def translated_differential(group: SemidirectGroup, f, point: HElement, side, step: float = 1e-6) -> np.ndarray:
    """Covector xi -> d/ds f(Exp(s xi) a) (H+) or f(b Exp(s xi)) (H-) by central differences."""
    h = group.h
    out = np.zeros(h.dim)
    pi = h.pi(side)
    # step only along the factor so every sample stays in H(side)
    for i, e in enumerate(pi.T):
        if _sign(side) > 0:
            fp = f(group.multiply(group.exp(e, step), point))
            fm = f(group.multiply(group.exp(e, -step), point))
        else:
            fp = f(group.multiply(point, group.exp(e, step)))
            fm = f(group.multiply(point, group.exp(e, -step)))
        out[i] = (fp - fm) / (2 * step)
    return out


def pl_function_bracket(group: SemidirectGroup, point: HElement, df, dg, side) -> float:
    """{F, G}(point) = <dF (x) dG, pi(point)> with translated differentials."""
    bv = bivector(group, point, side)
    return float(np.asarray(df, float) @ bv.tensor @ np.asarray(dg, float))
