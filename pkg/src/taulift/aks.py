"""AKS integrable systems on the lifted algebra h and an independent ODE oracle.

``side`` names the factor carrying the dynamics: ``"+"`` means Z = X+ + K with
X+ in h+ and K in h-; ``"-"`` is the mirrored setup Z = X- + K with K in h+.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lie_core import LieError, _sign
from .lie_group import FactorizationError, SemidirectGroup
from .semidirect import SemidirectAlgebra, halves, hvec


class InadmissibleError(LieError):
    """The shift K is not a character, or Z0 is off the slice."""

    def __init__(self, message: str, components=None):
        super().__init__(message)
        self.components = components or []


class InvarianceError(LieError):
    """A Hamiltonian declared Ad-invariant failed the field self-check."""


class AKSFactorizationError(FactorizationError):
    """Factorization failed partway; ``partial`` holds the states computed so far."""

    def __init__(self, message: str, partial: "Trajectory"):
        super().__init__(message)
        self.partial = partial


def _opp(side) -> str:
    return "-" if _sign(side) > 0 else "+"


@dataclass(frozen=True)
class HamiltonianSpec:
    evaluate: Callable[[np.ndarray], float]
    legendre: Callable[[np.ndarray], np.ndarray]
    ad_invariant: bool = True
    name: str = "custom"


def quadratic_pairing(h: SemidirectAlgebra) -> HamiltonianSpec:
    """H(v) = (v, v)_h / 2 = (X, Y)_g, with Legendre transform the identity."""
    return HamiltonianSpec(
        evaluate=lambda v: 0.5 * h.form(v, v),
        legendre=lambda v: np.array(v, dtype=float),
        name="quadratic_pairing",
    )


def trace_invariant(h: SemidirectAlgebra, rho: np.ndarray, power: int) -> HamiltonianSpec:
    """F(X, Y) = tr(rho(X)^k) / k, an Ad^H-invariant function of the first slot."""
    rho = np.asarray(rho, float)
    binv = h.base.form.inverse

    def mat(v):
        return np.einsum("i,ijk->jk", halves(v)[0], rho)

    def evaluate(v):
        return float(np.trace(np.linalg.matrix_power(mat(v), power))) / power

    def legendre(v):
        p = np.linalg.matrix_power(mat(v), power - 1)
        grad = np.einsum("jk,ikj->i", p, rho)
        return hvec(np.zeros(h.n), binv @ grad)

    return HamiltonianSpec(evaluate, legendre, True, f"trace{power}")


def finite_difference_legendre(h: SemidirectAlgebra, evaluate, step: float = 1e-6):
    """Legendre map synthesized by central differences: (L(v), w)_h = dF(v)[w]."""

    def legendre(v):
        v = np.asarray(v, float)
        grad = np.array([
            (evaluate(v + step * e) - evaluate(v - step * e)) / (2 * step) for e in np.eye(h.dim)
        ])
        return h.gamma_inverse(grad)

    return legendre


def lie_poisson_bracket(h: SemidirectAlgebra, f: HamiltonianSpec, g: HamiltonianSpec, x) -> float:
    """{F, G}(X) = (X, [L_F X, L_G X])_h."""
    return h.form(x, h.bracket(f.legendre(x), g.legendre(x)))


def restricted_bracket(h: SemidirectAlgebra, f: HamiltonianSpec, g: HamiltonianSpec, xs, k, side="+") -> float:
    """(X, [Pi_opp L_F(X + K), Pi_opp L_G(X + K)])_h for X in h(side)."""
    xs = np.asarray(xs, float)
    z = xs + np.asarray(k, float)
    p = h.pi(_opp(side))
    return h.form(xs, h.bracket(p @ f.legendre(z), p @ g.legendre(z)))


@dataclass(frozen=True)
class CharacterReport:
    ok: bool
    residual: float
    components: list[str]


def character_check(h: SemidirectAlgebra, k, side="+", tol: float = 1e-10) -> CharacterReport:
    """K in h(opp) must satisfy Pi_opp ad_X K = 0 for every basis X of h(side)."""
    k = np.asarray(k, float)
    opp = h.part(_opp(side))
    if opp.residual(k) > tol:
        raise InadmissibleError(f"K is not in h{_opp(side)}")
    labels = [f"{lab}.1" for lab in h.base.algebra.labels] + [f"{lab}.2" for lab in h.base.algebra.labels]
    basis = h.part(side).basis.T

    def resid(vec):
        return max(float(np.max(np.abs(opp.projector @ h.bracket(x, vec)), initial=0.0)) for x in basis)

    worst = resid(k)
    # the residual is linear in K: blame the coordinates of K that fail on their own
    comps = [
        labels[i] for i in range(h.dim)
        if abs(k[i]) > tol and resid(np.eye(h.dim)[i] * k[i]) > tol
    ]
    return CharacterReport(worst <= tol, worst, comps)


def hamiltonian_field(h: SemidirectAlgebra, spec: HamiltonianSpec, z, side="+", tol: float = 1e-9) -> np.ndarray:
    """Pi_side ad_{Pi_opp L(Z)} Z, cross-checked against -ad_{Pi_side L(Z)} Z."""
    if not spec.ad_invariant:
        raise InvarianceError("Hamiltonian is not declared Ad-invariant")
    z = np.asarray(z, float)
    lz = spec.legendre(z)
    ps, po = h.pi(side), h.pi(_opp(side))
    v1 = ps @ h.bracket(po @ lz, z)
    v2 = -h.bracket(ps @ lz, z)
    gap = float(np.max(np.abs(v1 - v2), initial=0.0))
    if gap > tol * max(1.0, float(np.max(np.abs(z))) ** 2):
        raise InvarianceError(f"field self-check failed (gap {gap:.3e}); Hamiltonian not invariant or Z off slice")
    return v2


def restrict_g2(h: SemidirectAlgebra, spec: HamiltonianSpec, z, side="+", tol: float = 1e-12) -> np.ndarray:
    """Second-slot field -ad^tau_{Pi_g(side) L_h(Y)} Y for Z = (0, Y)."""
    x, y = halves(z)
    if float(np.max(np.abs(x), initial=0.0)) > tol:
        raise InadmissibleError("Z has a nonzero first slot; not supported in g2")
    lh = halves(spec.legendre(hvec(np.zeros(h.n), y)))[0]
    a = h.base.pi(side) @ lh
    return -h.tau_ad(a) @ y


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AKSProblem:
    hamiltonian: HamiltonianSpec
    K: np.ndarray
    z0: np.ndarray
    times: np.ndarray
    side: str = "+"

    def validate(self, h: SemidirectAlgebra, tol: float = 1e-10) -> None:
        rep = character_check(h, self.K, self.side, tol)
        if not rep.ok:
            raise InadmissibleError(
                f"K is not a character (residual {rep.residual:.3e}); offending components: "
                + ", ".join(rep.components),
                rep.components,
            )
        off = h.part(self.side).residual(np.asarray(self.z0, float) - np.asarray(self.K, float))
        if off > tol:
            raise InadmissibleError(f"z0 - K is not in h{self.side} (residual {off:.3e})")
        t = np.asarray(self.times, float)
        if t.ndim != 1 or np.any(np.diff(t) < 0):
            raise InadmissibleError("times must be a monotone 1-D grid")


def aks_state(group: SemidirectGroup, spec: HamiltonianSpec, z0, t: float, side="+"):
    """State at time t and the dynamical factor of Exp(t L(Z0))."""
    z0 = np.asarray(z0, float)
    e = group.exp(spec.legendre(z0), t)
    if _sign(side) > 0:
        hp, _ = group.factorize(e)
        return group.adjoint(group.inverse(hp), z0), hp
    # Exp = h- h+  <=>  Exp^{-1} = h+^{-1} h-^{-1}
    _, am = group.factorize(group.inverse(e))
    return group.adjoint(am, z0), group.inverse(am)


def energy_drift(spec: HamiltonianSpec, states: np.ndarray) -> float:
    e = np.array([spec.evaluate(s) for s in states])
    return float(np.max(np.abs(e - e[0]), initial=0.0))


def solve_aks(problem: AKSProblem, group: SemidirectGroup, validate: bool = True) -> Trajectory:
    """Z(t) = Ad_{h+(t)^{-1}} Z0 where Exp(t L(Z0)) = h+(t) h-(t)."""
    h = group.h
    if validate:
        problem.validate(h)
    times = np.asarray(problem.times, float)
    z0 = np.asarray(problem.z0, float)
    states = []
    for t in times:
        try:
            z = z0.copy() if t == 0.0 else aks_state(group, problem.hamiltonian, z0, float(t), problem.side)[0]
        except (FactorizationError, LieError, np.linalg.LinAlgError) as exc:
            done = len(states)
            part = Trajectory(times[:done], np.array(states).reshape(done, h.dim), "factorization")
            raise AKSFactorizationError(f"factorization failed at t={t}: {exc}", part) from exc
        states.append(z)
    states = np.array(states).reshape(len(times), h.dim)
    return Trajectory(times, states, "factorization", {"energy_drift": energy_drift(problem.hamiltonian, states)})


def component_rhs(h: SemidirectAlgebra, spec: HamiltonianSpec, z, side="+") -> np.ndarray:
    """-ad^h_{Pi_side L(Z)} Z written slot by slot through g-level operations."""
    g = h.base.algebra
    x, y = halves(z)
    a, c = halves(h.pi(side) @ spec.legendre(z))
    xdot = g.bracket(x, a)
    ydot = h.tau_ad(x) @ c - h.tau_ad(a) @ y
    return hvec(xdot, ydot)


def ode_oracle(problem: AKSProblem, h: SemidirectAlgebra, step: float = 1e-4) -> Trajectory:
    """Classical fixed-step RK4 on the component equations."""
    spec, side = problem.hamiltonian, problem.side
    times = np.asarray(problem.times, float)
    z = np.asarray(problem.z0, float).copy()
    t = times[0] if times.size else 0.0
    states = []

    def f(v):
        return component_rhs(h, spec, v, side)

    for target in times:
        span = target - t
        nsteps = int(np.ceil(abs(span) / step - 1e-9)) if span != 0 else 0
        if nsteps:
            dt = span / nsteps
            for _ in range(nsteps):
                k1 = f(z)
                k2 = f(z + 0.5 * dt * k1)
                k3 = f(z + 0.5 * dt * k2)
                k4 = f(z + dt * k3)
                z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = target
        states.append(z.copy())
    states = np.array(states).reshape(len(times), h.dim)
    return Trajectory(times, states, "oracle", {"energy_drift": energy_drift(spec, states), "step": step})


def ode_residual(problem: AKSProblem, group: SemidirectGroup, t: float, step: float = 1e-5) -> float:
    """Central-difference residual of the AKS curve against the Hamilton equation at t."""
    spec, side = problem.hamiltonian, problem.side
    zp = aks_state(group, spec, problem.z0, t + step, side)[0]
    zm = aks_state(group, spec, problem.z0, t - step, side)[0]
    z = aks_state(group, spec, problem.z0, t, side)[0]
    zdot = (zp - zm) / (2 * step)
    return float(np.max(np.abs(zdot + group.h.bracket(group.h.pi(side) @ spec.legendre(z), z))))


def log_derivative_residual(problem: AKSProblem, group: SemidirectGroup, t: float, step: float = 1e-5) -> float:
    """| h(t)^{-1} h'(t) - Pi_side L(Z(t)) | for the dynamical factor h(t)."""
    spec, side = problem.hamiltonian, problem.side
    z, hc = aks_state(group, spec, problem.z0, t, side)
    hp = aks_state(group, spec, problem.z0, t + step, side)[1]
    hm = aks_state(group, spec, problem.z0, t - step, side)[1]
    inv = group.inverse(hc)
    # left-trivialized velocity from the two one-sided group increments
    up, um = group.multiply(inv, hp), group.multiply(inv, hm)
    gdot = (up.g - um.g) / (2 * step)
    xdot = (up.x - um.x) / (2 * step)
    vel = hvec(group.rep.coords(gdot), xdot)
    target = group.h.pi(side) @ spec.legendre(z)
    return float(np.max(np.abs(vel - target)))
