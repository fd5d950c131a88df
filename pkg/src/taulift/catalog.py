"""The three worked examples: a 3-step nilpotent algebra, A6.34 and sl2(C)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .aks import HamiltonianSpec, InadmissibleError, character_check, quadratic_pairing
from .lie_core import BilinearForm, LieAlgebra, SplitDoubleAlgebra
from .lie_group import ClosedForm, MatrixRep, SemidirectGroup
from .semidirect import SemidirectAlgebra, halves, hvec

NAMES = ("nilpotent3", "a6_34", "sl2c")


@dataclass(frozen=True, eq=False)
class ExampleDefinition:
    name: str
    split: SplitDoubleAlgebra
    h: SemidirectAlgebra
    rep: MatrixRep
    group: SemidirectGroup
    hamiltonian: HamiltonianSpec
    side: str
    K: np.ndarray
    z0: np.ndarray
    admissible: str
    reference: Callable[[np.ndarray, float], np.ndarray] | None = None
    invariant_hamiltonian: HamiltonianSpec | None = None

    @property
    def algebra(self) -> LieAlgebra:
        return self.split.algebra

    @property
    def form(self) -> BilinearForm:
        return self.split.form

    def check_admissible(self, z0) -> None:
        z0 = np.asarray(z0, float)
        opp = "-" if self.side == "+" else "+"
        k = self.h.pi(opp) @ z0
        rep = character_check(self.h, k, self.side)
        if not rep.ok:
            raise InadmissibleError(f"inadmissible initial condition: {self.admissible}", rep.components)

    def reference_solution(self, z0, t: float) -> np.ndarray:
        if self.reference is None:
            raise NotImplementedError(f"{self.name} has no closed-form solution")
        self.check_admissible(z0)
        return self.reference(np.asarray(z0, float), float(t))


def _elem(r: int, *entries: tuple[int, int, float]) -> np.ndarray:
    m = np.zeros((r, r))
    for i, j, v in entries:
        m[i - 1, j - 1] += v
    return m


def _nilpotent_log(g: np.ndarray) -> np.ndarray:
    n = g - np.eye(g.shape[0])
    out = np.zeros_like(n)
    p = np.eye(g.shape[0])
    for k in range(1, g.shape[0] + 1):
        p = p @ n
        out += (-1) ** (k + 1) * p / k
    return out


def _assemble(name, algebra, gram, plus, minus, rep, closed_form, side, k, z0, admissible,
              reference, hamiltonian=None):
    split = SplitDoubleAlgebra(algebra, BilinearForm(gram), plus, minus)
    h = SemidirectAlgebra(split)
    group = SemidirectGroup(h, rep, ClosedForm(name, closed_form))
    quad = quadratic_pairing(h)
    ham = quad if hamiltonian is None else hamiltonian(h)
    return ExampleDefinition(
        name, split, h, rep, group, ham, side,
        np.asarray(k, float), np.asarray(z0, float), admissible, reference, quad,
    )


# --- 3-step nilpotent --------------------------------------------------------

def nilpotent3() -> ExampleDefinition:
    alg = LieAlgebra.from_brackets(4, {(3, 0): {1: 1.0}, (3, 1): {2: 1.0}}, ("e1", "e2", "e3", "e4"))
    gram = np.zeros((4, 4))
    gram[1, 1] = gram[3, 3] = 1.0
    gram[0, 2] = gram[2, 0] = -1.0
    rho = np.stack([
        _elem(4, (3, 4, 1)),
        _elem(4, (2, 4, 1)),
        _elem(4, (1, 4, 1)),
        _elem(4, (1, 2, 1), (2, 3, 1)),
    ])
    rep = MatrixRep(rho)

    def factor(g):
        u = rep.coords(_nilpotent_log(g))
        u1, u2, u3, u4 = u
        gp = rep.exp([0.0, u2 - 0.5 * u1 * u4, u3 - u1 * u4**2 / 12.0, u4])
        gm = rep.exp([u1, 0.0, 0.0, 0.0])
        return gp, gm

    def reference(z0, t):
        x, y = halves(z0)
        x, y = x.copy(), y.copy()
        x[1] = x[1] - t * x[0] * x[3]
        y[2] = y[2] - t * x[3] * y[1]
        return hvec(x, y)

    # Z0 = (x1..x4, y2..y4), K = (x1 e1, y2 e2 + y4 e4)
    z0 = hvec([0.7, -0.4, 0.3, 1.1], [0.0, 0.5, -0.2, 0.9])
    k = hvec([0.7, 0, 0, 0], [0.0, 0.5, 0.0, 0.9])
    return _assemble(
        "nilpotent3", alg, gram, (1, 2, 3), (0,), rep, factor, "+", k, z0,
        "the (0, e1) component must vanish", reference,
    )


# --- A6.34 ---------------------------------------------------------------

def a6_group(z, x, y, p, q, th) -> np.ndarray:
    c, s = np.cos(th), np.sin(th)
    return np.array([
        [1, p, 0, 0, 0, q],
        [0, 1, 0, 0, 0, th],
        [0, 0, 1, x * s + y * c, x * c - y * s, z],
        [0, 0, 0, c, -s, x],
        [0, 0, 0, s, c, -y],
        [0, 0, 0, 0, 0, 1],
    ], dtype=float)


def a6_params(g: np.ndarray) -> tuple[float, ...]:
    """(z, x, y, p, q, theta) of a group matrix."""
    # theta enters the (2, 6) entry linearly, so read it there rather than unwrap an angle
    th = float(g[1, 5])
    return float(g[2, 5]), float(g[3, 5]), float(-g[4, 5]), float(g[0, 1]), float(g[0, 5]), th


def _sin_over(w: float, t: float) -> float:
    """sin(w t) / w, regular at w = 0."""
    return t * float(np.sinc(w * t / np.pi))


def _one_minus_cos_over(w: float, t: float) -> float:
    """(1 - cos(w t)) / w, regular at w = 0."""
    u = 0.5 * w * t
    return float(np.sin(u)) * t * float(np.sinc(u / np.pi))


def a6_34() -> ExampleDefinition:
    alg = LieAlgebra.from_brackets(
        6,
        {(1, 2): {0: 1.0}, (1, 5): {2: 1.0}, (2, 5): {1: -1.0}, (3, 5): {4: 1.0}},
        tuple(f"e{i}" for i in range(1, 7)),
    )
    gram = np.zeros((6, 6))
    for i in (1, 2, 3, 4):
        gram[i, i] = 1.0
    gram[0, 5] = gram[5, 0] = 1.0
    rho = np.stack([
        _elem(6, (3, 6, -2)),
        _elem(6, (3, 5, 1), (4, 6, 1)),
        _elem(6, (3, 4, 1), (5, 6, -1)),
        _elem(6, (1, 2, 1)),
        _elem(6, (1, 6, 1)),
        _elem(6, (2, 6, 1), (5, 4, 1), (4, 5, -1)),
    ])
    rep = MatrixRep(rho)

    def factor(g):
        z, x, y, p, q, th = a6_params(g)
        return a6_group(z, x, y, 0, 0, 0), a6_group(0, 0, 0, p, q, th)

    def reference(z0, t):
        x, xp = halves(z0)
        x, xp = x.copy(), xp.copy()
        w = x[5]
        c, s = np.cos(w * t), np.sin(w * t)
        x20, x30 = x[1], x[2]
        x[1] = x20 * c + x30 * s
        x[2] = x30 * c - x20 * s
        i2 = x20 * _sin_over(w, t) + x30 * _one_minus_cos_over(w, t)
        i3 = x30 * _sin_over(w, t) - x20 * _one_minus_cos_over(w, t)
        xp[0] = xp[0] - t * x[3] * xp[4] + xp[2] * i2 - xp[1] * i3
        xp[3] = xp[3] + t * w * xp[4]
        return hvec(x, xp)

    # K = (x4 e4 + x5 e5 + x6 e6, x2' e2 + x3' e3) with x6' = 0
    z0 = hvec([0.3, 0.8, -0.5, 0.4, -0.6, 1.3], [0.2, 0.7, 0.45, -0.35, 0.9, 0.0])
    k = hvec([0, 0, 0, 0.4, -0.6, 1.3], [0, 0.7, 0.45, 0, 0, 0.0])
    return _assemble(
        "a6_34", alg, gram, (0, 1, 2), (3, 4, 5), rep, factor, "+", k, z0,
        "the (0, e6) component must vanish", reference,
    )


# --- sl2(C) ----------------------------------------------------------------

SL2C_LABELS = ("X1", "X2", "X3", "E", "iE", "H")


def sl2c_basis() -> np.ndarray:
    i = 1j
    return np.array([
        [[0, i], [i, 0]],
        [[0, 1], [-1, 0]],
        [[i, 0], [0, -i]],
        [[0, 1], [0, 0]],
        [[0, i], [0, 0]],
        [[1, 0], [0, -1]],
    ], dtype=complex)


def realify(m: np.ndarray) -> np.ndarray:
    a, b = m.real, m.imag
    return np.block([[a, -b], [b, a]])


def complexify(r: np.ndarray) -> np.ndarray:
    n = r.shape[0] // 2
    return r[:n, :n] + 1j * r[n:, :n]


def sl2c_killing_form() -> np.ndarray:
    """k0(X, Y) = -Im tr(XY), the Ad-invariant form."""
    b = sl2c_basis()
    return np.array([[-np.trace(x @ y).imag for y in b] for x in b])


def sl2c_twist() -> np.ndarray:
    """Matrix of the involution X1 -> -E, X2 -> iE, X3 -> -H and back."""
    e = np.zeros((6, 6))
    for src, dst, sign in ((0, 3, -1), (1, 4, 1), (2, 5, -1), (3, 0, -1), (4, 1, 1), (5, 2, -1)):
        e[dst, src] = sign
    return e


def sl2c_iwasawa(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    (mu, nu), (rho, sigma) = complexify(g)
    nrm = np.sqrt(abs(mu) ** 2 + abs(rho) ** 2)
    gp = np.array([[mu, -np.conj(rho)], [rho, np.conj(mu)]]) / nrm
    gm = np.array([[nrm**2, np.conj(mu) * nu + np.conj(rho) * sigma], [0, 1]]) / nrm
    return realify(gp), realify(gm)


def sl2c() -> ExampleDefinition:
    basis = sl2c_basis()
    rho = np.stack([realify(m) for m in basis])
    rep = MatrixRep(rho)
    c = np.zeros((6, 6, 6))
    for i in range(6):
        for j in range(6):
            c[i, j] = rep.coords(rho[i] @ rho[j] - rho[j] @ rho[i])
    c = np.round(c, 14)
    alg = LieAlgebra(c, SL2C_LABELS)
    gram = sl2c_killing_form() @ sl2c_twist()
    def reference(z0, t):
        x, y = halves(z0)
        x, y = x.copy(), y.copy()
        alpha, beta = 2 * x[5], 2 * y[2]
        decay = np.exp(-alpha * t)
        xe, xie = x[3], x[4]
        x[3], x[4] = xe * decay, xie * decay
        y[0] = (y[0] - beta * xe * t) * decay
        y[1] = (y[1] + beta * xie * t) * decay
        return hvec(x, y)

    # K+ = (k3 X3, kH H); Z0 = (xE E + xiE iE + xH H + k3 X3, x1 X1 + x2 X2 + x3 X3 + kH H)
    k3, kh = 0.6, -0.8
    z0 = hvec([0, 0, k3, 0.9, -0.3, 0.45], [0.5, -0.7, 0.25, 0, 0, kh])
    k = hvec([0, 0, k3, 0, 0, 0], [0, 0, 0, 0, 0, kh])
    return _assemble(
        "sl2c", alg, gram, (0, 1, 2), (3, 4, 5), rep, sl2c_iwasawa, "-", k, z0,
        "K+ must be of the form (k3 X3, kH H)", reference, cartan_pairing,
    )


def cartan_pairing(h: SemidirectAlgebra) -> HamiltonianSpec:
    """F(X, Y) = g(P X, P Y) with P the projector onto span{X3, H}.

    Its Legendre map (x_H H + k3 X3, k_H H + x3 X3) is the one whose AKS-form
    field -ad_{Pi_- L(Z)} Z gives decay at rate 2 x_H on the h- slice.  It is not
    Ad^H-invariant; the invariant pairing is kept as ``invariant_hamiltonian``.
    """
    p = np.zeros((6, 6))
    p[2, 2] = p[5, 5] = 1.0
    b = h.base.form.gram

    def evaluate(v):
        x, y = halves(v)
        return float((p @ x) @ b @ (p @ y))

    def legendre(v):
        x, y = halves(v)
        return hvec(p @ x, p @ y)

    return HamiltonianSpec(evaluate, legendre, False, "cartan_pairing")


_BUILDERS = {"nilpotent3": nilpotent3, "a6_34": a6_34, "sl2c": sl2c}
_CACHE: dict[str, ExampleDefinition] = {}


def load(name: str) -> ExampleDefinition:
    if name not in _BUILDERS:
        raise KeyError(f"unknown example {name!r}; known: {', '.join(NAMES)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]


def reference_solution(name: str, z0, t: float) -> np.ndarray:
    return load(name).reference_solution(z0, t)
