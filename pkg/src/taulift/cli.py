"""Command line: verify algebras, solve AKS systems, evaluate bivectors and dressing generators.

Exit codes: 0 success, 1 validation failure, 2 inadmissible input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import catalog
from .aks import (
    AKSFactorizationError, AKSProblem, HamiltonianSpec, InadmissibleError, ode_oracle,
    quadratic_pairing, solve_aks, trace_invariant,
)
from .lie_core import (
    BilinearForm, LieAlgebra, LieError, SplitDoubleAlgebra, antihomomorphism_residual,
    invariance_residual, validate,
)
from .lie_group import FactorizationError, MatrixRep, Newton, NumericError, SemidirectGroup
from .poisson_lie import bivector, dressing_from_bivector
from .semidirect import SemidirectAlgebra, hvec, jacobi_residual, manin_decompose, verify_ad_invariance

EXIT_OK, EXIT_INVALID, EXIT_INADMISSIBLE, EXIT_NUMERIC = 0, 1, 2, 3

# verify: residual bound; solve: allowed aks/oracle gap; bivector: zero test; dressing: route gap
DEFAULT_TOL = {"verify": 1e-12, "solve": 1e-6, "bivector": 1e-12, "dressing": 1e-8}

DESCRIPTIONS = {
    "nilpotent3": "4-dimensional 3-step nilpotent algebra with an indefinite metric",
    "a6_34": "6-dimensional solvable algebra A6.34 with a non-invariant metric",
    "sl2c": "sl2(C) as a real algebra, Iwasawa split su2 + b, twisted Killing form",
}


class ConfigError(LieError):
    """Schema violation in an algebra config, located by a JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True, eq=False)
class Setup:
    name: str
    labels: tuple[str, ...]
    split: SplitDoubleAlgebra
    h: SemidirectAlgebra
    group: SemidirectGroup | None
    hamiltonian: HamiltonianSpec
    side: str
    K: np.ndarray
    z0: np.ndarray
    times: np.ndarray | None


def h_labels(labels) -> list[str]:
    return [f"{s}.1" for s in labels] + [f"{s}.2" for s in labels]


def from_example(name: str) -> Setup:
    ex = catalog.load(name)
    labels = ex.algebra.labels or tuple(f"e{i + 1}" for i in range(ex.algebra.dim))
    return Setup(name, tuple(labels), ex.split, ex.h, ex.group, ex.hamiltonian, ex.side,
                 ex.K, ex.z0, None)


def _need(doc: dict, key: str, path: str):
    if key not in doc:
        raise ConfigError(f"{path}.{key}", "missing required key")
    return doc[key]


def _matrix(value, rows: int, cols: int, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != rows:
        raise ConfigError(path, f"expected {rows} rows")
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise ConfigError(f"{path}[{i}]", f"expected {cols} entries")
        for j, v in enumerate(row):
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"{path}[{i}][{j}]", "expected a number")
    return np.array(value, dtype=float)


def _index(labels: list[str], key, path: str) -> int:
    if isinstance(key, int) and not isinstance(key, bool) and 0 <= key < len(labels):
        return key
    if isinstance(key, str) and key in labels:
        return labels.index(key)
    raise ConfigError(path, f"unknown label {key!r}")


def _hmap(value, labels: list[str], path: str) -> np.ndarray:
    if not isinstance(value, dict):
        raise ConfigError(path, "expected an object of '<label>.1' / '<label>.2' coordinates")
    names = h_labels(labels)
    out = np.zeros(len(names))
    for key, v in value.items():
        if key not in names:
            raise ConfigError(f"{path}.{key}", "unknown h-coordinate")
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{path}.{key}", "expected a number")
        out[names.index(key)] = float(v)
    return out


def parse_config(doc: dict) -> Setup:
    """Build a Setup from a decoded JSON config; errors carry JSON paths."""
    if not isinstance(doc, dict):
        raise ConfigError("$", "expected an object")
    n = _need(doc, "dim", "$")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("$.dim", "expected a positive integer")
    labels = doc.get("labels", [f"e{i + 1}" for i in range(n)])
    if not isinstance(labels, list) or len(labels) != n or not all(isinstance(s, str) for s in labels):
        raise ConfigError("$.labels", f"expected {n} strings")
    if len(set(labels)) != n:
        raise ConfigError("$.labels", "labels must be distinct")

    table: dict[tuple[int, int], dict[int, float]] = {}
    for b, entry in enumerate(_need(doc, "brackets", "$")):
        p = f"$.brackets[{b}]"
        if not isinstance(entry, dict):
            raise ConfigError(p, "expected an object with i, j, coeffs")
        i = _index(labels, _need(entry, "i", p), f"{p}.i")
        j = _index(labels, _need(entry, "j", p), f"{p}.j")
        coeffs = _need(entry, "coeffs", p)
        if not isinstance(coeffs, dict):
            raise ConfigError(f"{p}.coeffs", "expected an object label -> number")
        row = table.setdefault((i, j), {})
        for key, v in coeffs.items():
            k = _index(labels, key, f"{p}.coeffs.{key}")
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"{p}.coeffs.{key}", "expected a number")
            row[k] = row.get(k, 0.0) + float(v)
    try:
        alg = LieAlgebra.from_brackets(n, table, tuple(labels))
    except LieError as exc:
        raise ConfigError("$.brackets", str(exc)) from exc

    gram = _matrix(_need(doc, "form", "$"), n, n, "$.form")
    try:
        form = BilinearForm(gram)
    except LieError as exc:
        raise ConfigError("$.form", str(exc)) from exc

    sp = _need(doc, "split", "$")
    if not isinstance(sp, dict):
        raise ConfigError("$.split", "expected an object with plus and minus")
    plus = [_index(labels, s, f"$.split.plus[{i}]") for i, s in enumerate(_need(sp, "plus", "$.split"))]
    minus = [_index(labels, s, f"$.split.minus[{i}]") for i, s in enumerate(_need(sp, "minus", "$.split"))]
    try:
        split = SplitDoubleAlgebra(alg, form, plus, minus)
    except LieError as exc:
        raise ConfigError("$.split", str(exc)) from exc
    h = SemidirectAlgebra(split)

    group = None
    rho = None
    if "representation" in doc:
        rd = doc["representation"]
        p = "$.representation"
        if not isinstance(rd, dict):
            raise ConfigError(p, "expected an object with rep_dim and matrices")
        r = _need(rd, "rep_dim", p)
        if not isinstance(r, int) or isinstance(r, bool) or r < 1:
            raise ConfigError(f"{p}.rep_dim", "expected a positive integer")
        mats = _need(rd, "matrices", p)
        if not isinstance(mats, list) or len(mats) != n:
            raise ConfigError(f"{p}.matrices", f"expected {n} generator matrices")
        rho = np.stack([_matrix(m, r, r, f"{p}.matrices[{i}]") for i, m in enumerate(mats)])
        try:
            rep = MatrixRep(rho)
        except LieError as exc:
            raise ConfigError(f"{p}.matrices", str(exc)) from exc
        res = rep.homomorphism_residual(alg)
        if res > 1e-10:
            raise ConfigError(f"{p}.matrices", f"not a representation (residual {res:.3e})")
        group = SemidirectGroup(h, rep, Newton())

    ham_name = doc.get("hamiltonian", "quadratic_pairing")
    if ham_name == "quadratic_pairing":
        ham = quadratic_pairing(h)
    elif isinstance(ham_name, str) and ham_name.startswith("trace") and ham_name[5:].isdigit():
        if rho is None:
            raise ConfigError("$.hamiltonian", "trace invariants need a representation")
        ham = trace_invariant(h, rho, int(ham_name[5:]))
    else:
        raise ConfigError("$.hamiltonian", f"unknown builtin {ham_name!r}")

    side = doc.get("side", "+")
    if side not in ("+", "-"):
        raise ConfigError("$.side", "expected '+' or '-'")
    k = _hmap(doc.get("K", {}), labels, "$.K")
    z0 = _hmap(doc.get("z0", {}), labels, "$.z0")
    times = None
    if "times" in doc:
        td = doc["times"]
        if not isinstance(td, dict):
            raise ConfigError("$.times", "expected an object with start, stop, steps")
        steps = _need(td, "steps", "$.times")
        if not isinstance(steps, int) or isinstance(steps, bool) or steps < 1:
            raise ConfigError("$.times.steps", "expected a positive integer")
        times = time_grid(float(_need(td, "start", "$.times")), float(_need(td, "stop", "$.times")), steps)
    return Setup("config", tuple(labels), split, h, group, ham, side, k, z0, times)


def load_config(path: str) -> Setup:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from exc
    except OSError as exc:
        raise ConfigError("$", f"cannot read config: {exc}") from exc
    return parse_config(doc)


def time_grid(start: float, stop: float, steps: int) -> np.ndarray:
    """steps intervals, steps + 1 samples."""
    return np.linspace(start, stop, steps + 1)


def parse_t(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("--t expects start:stop:steps")
    return time_grid(float(parts[0]), float(parts[1]), int(parts[2]))


def parse_coords(text: str, labels) -> np.ndarray:
    """'e4.1=1,e3.2=0.5' or a JSON object into an h-vector."""
    text = text.strip()
    if text.startswith("{"):
        return _hmap(json.loads(text), list(labels), "$")
    doc = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, _, val = item.partition("=")
        doc[key.strip()] = float(val)
    return _hmap(doc, list(labels), "$")


# --- output -----------------------------------------------------------------

def _num(x: float) -> str:
    return repr(float(x))


def trajectory_csv(labels, times, states) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *h_labels(labels)])
    for t, row in zip(times, states):
        w.writerow([_num(t), *(_num(v) for v in row)])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> tuple[list[str], np.ndarray, np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return rows[0], data[:, 0], data[:, 1:]


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------

def verify_report(setup: Setup, tol: float, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    split, h = setup.split, setup.h
    n = split.dim
    base = validate(split.algebra, tol)
    _, _, manin = manin_decompose(h)
    lifted = verify_ad_invariance(h, 100, rng)
    anti = max(antihomomorphism_residual(split, rng.normal(size=n), rng.normal(size=n)) for _ in range(20))
    base_inv = max(invariance_residual(split, *rng.normal(size=(3, n))) for _ in range(100))
    checks = {
        "antisymmetry": base.antisymmetry,
        "jacobi": base.jacobi,
        "h_jacobi": jacobi_residual(h),
        "manin_closure_plus": manin.closure_plus,
        "manin_closure_minus": manin.closure_minus,
        "manin_isotropy_plus": manin.isotropy_plus,
        "manin_isotropy_minus": manin.isotropy_minus,
        "lifted_form_invariance": lifted,
        "tau_antihomomorphism": anti,
    }
    if setup.group is not None:
        checks["representation"] = setup.group.rep.homomorphism_residual(split.algebra)
    scaled = {k: v <= tol * 100 if k in ("lifted_form_invariance", "tau_antihomomorphism") else v <= tol
              for k, v in checks.items()}
    ranks_ok = manin.gamma_rank_plus == manin.gamma_rank_minus == n
    notes = []
    if base_inv > 1e-3:
        notes.append("base form not Ad-invariant; lifted form invariant")
    return {
        "name": setup.name,
        "residuals": checks,
        "passed": scaled,
        "gamma_rank_plus": manin.gamma_rank_plus,
        "gamma_rank_minus": manin.gamma_rank_minus,
        "base_form_invariance_witness": base_inv,
        "notes": notes,
        "ok": all(scaled.values()) and ranks_ok,
    }


def _verify_text(rep: dict) -> str:
    lines = [f"verify {rep['name']}"]
    for k, v in rep["residuals"].items():
        mark = "ok" if rep["passed"][k] else "FAIL"
        lines.append(f"  {k:<24} {v:.3e}  {mark}")
    lines.append(f"  gamma ranks              {rep['gamma_rank_plus']}, {rep['gamma_rank_minus']}")
    lines.append(f"  base form witness        {rep['base_form_invariance_witness']:.3e}")
    lines += [f"  note: {s}" for s in rep["notes"]]
    lines.append("PASS" if rep["ok"] else "FAIL")
    return "\n".join(lines) + "\n"


def cmd_verify(setup: Setup, args) -> int:
    rep = verify_report(setup, args.tol, args.seed)
    _emit(dump_json(rep) if args.format == "json" else _verify_text(rep), args.out)
    return EXIT_OK if rep["ok"] else EXIT_INVALID


def cmd_solve(setup: Setup, args) -> int:
    times = parse_t(args.t) if args.t else setup.times
    if times is None:
        times = time_grid(0.0, 2.0, 200)
    problem = AKSProblem(setup.hamiltonian, setup.K, setup.z0, times, setup.side)
    problem.validate(setup.h)
    trajs = {}
    if args.method in ("aks", "both"):
        if setup.group is None:
            raise ConfigError("$.representation", "the factorization method needs a representation")
        trajs["aks"] = solve_aks(problem, setup.group)
    if args.method in ("oracle", "both"):
        trajs["oracle"] = ode_oracle(problem, setup.h, args.step)
    meta = {m: {"method": tr.method, **tr.meta} for m, tr in trajs.items()}
    gap = None
    if len(trajs) == 2:
        gap = float(np.max(np.abs(trajs["aks"].states - trajs["oracle"].states)))
    main = trajs.get("aks") or trajs["oracle"]
    if args.format == "json":
        doc = {
            "name": setup.name,
            "columns": ["t", *h_labels(setup.labels)],
            "times": main.times,
            "trajectories": {m: tr.states for m, tr in trajs.items()},
            "meta": meta,
        }
        if gap is not None:
            doc["max_gap"] = gap
        _emit(dump_json(doc), args.out)
    else:
        _emit(trajectory_csv(setup.labels, main.times, main.states), args.out)
    if gap is not None:
        print(f"max gap aks vs oracle: {gap:.3e}", file=sys.stderr)
        if gap > args.tol:
            return EXIT_INVALID
    return EXIT_OK


def _point(setup: Setup, text: str):
    """Point (exp(sum u_i e_i), Z) from coordinates u = '<label>.1', Z = '<label>.2'."""
    if setup.group is None:
        raise ConfigError("$.representation", "group points need a representation")
    v = parse_coords(text or "", setup.labels)
    n = setup.h.n
    return setup.group.element(setup.group.rep.exp(v[:n]), v[n:])


def _check_point(setup: Setup, point, side, tol: float) -> None:
    res = setup.group.h_membership(point, side)
    if res > tol:
        raise InadmissibleError(f"point is not in H{side} (membership residual {res:.3e})")


def cmd_bivector(setup: Setup, args) -> int:
    point = _point(setup, args.point)
    _check_point(setup, point, args.side, 1e-9)
    bv = bivector(setup.group, point, args.side)
    m = setup.h.manin_basis
    manin = np.linalg.solve(m, bv.operator @ m)
    doc = {
        "name": setup.name,
        "side": args.side,
        "manin_basis": m,
        "operator_manin": manin,
        "tensor": bv.tensor,
        "antisymmetry": bv.antisymmetry,
        "vanishes": bool(np.max(np.abs(bv.tensor), initial=0.0) <= args.tol),
    }
    _emit(dump_json(doc), args.out)
    return EXIT_OK


def cmd_dressing(setup: Setup, args) -> int:
    point = _point(setup, args.point)
    _check_point(setup, point, args.side, 1e-9)
    v = parse_coords(args.vector or "", setup.labels)
    opp = "-" if args.side == "+" else "+"
    off = setup.h.part(opp).residual(v)
    if off > 1e-9:
        raise InadmissibleError(f"vector is not in h{opp} (residual {off:.3e})")
    gen = setup.group.dressing_infinitesimal(point, v, args.side)
    via = dressing_from_bivector(setup.group, point, v, args.side)
    gap = float(np.max(np.abs(gen - via)))
    doc = {
        "name": setup.name,
        "side": args.side,
        "columns": h_labels(setup.labels),
        "generator": gen,
        "from_bivector": via,
        "gap": gap,
    }
    _emit(dump_json(doc), args.out)
    return EXIT_OK if gap <= args.tol else EXIT_INVALID


def cmd_catalog(args) -> int:
    if args.format == "json":
        _emit(dump_json({n: DESCRIPTIONS[n] for n in catalog.NAMES}), args.out)
    else:
        _emit("".join(f"{n}\t{DESCRIPTIONS[n]}\n" for n in catalog.NAMES), args.out)
    return EXIT_OK


def _common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # subcommand copies suppress defaults so flags given before the subcommand survive
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--example", choices=catalog.NAMES, default=d(None))
    parser.add_argument("--config", help="path to an algebra config (JSON)", default=d(None))
    parser.add_argument("--out", help="write output here instead of stdout", default=d(None))
    parser.add_argument("--format", choices=("csv", "json", "text"), default=d(None))
    parser.add_argument("--tol", type=float, default=d(None), help="tolerance (per-command default)")
    parser.add_argument("--seed", type=int, default=d(42))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)

    p = argparse.ArgumentParser(prog="taulift", description=__doc__.splitlines()[0])
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the validation stack")
    s = sub.add_parser("solve", parents=[common], help="integrate the AKS system")
    s.add_argument("--method", choices=("aks", "oracle", "both"), default="aks")
    s.add_argument("--t", help="start:stop:steps")
    s.add_argument("--step", type=float, default=1e-4, help="RK4 step for the oracle")
    for name, helptext in (("bivector", "Poisson-Lie bivector at a point"),
                           ("dressing", "infinitesimal dressing generator at a point")):
        b = sub.add_parser(name, parents=[common], help=helptext)
        b.add_argument("--side", choices=("+", "-"), default="+")
        b.add_argument("--point", default="", help="'<label>.1=u,...,<label>.2=z' exponential/fiber coords")
        if name == "dressing":
            b.add_argument("--vector", default="", help="h-coordinates of the dressing vector")
    c = sub.add_parser("catalog", parents=[common], help="list shipped examples")
    c.add_argument("action", choices=("list",))
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "catalog":
            return cmd_catalog(args)
        if bool(args.example) == bool(args.config):
            parser.error("give exactly one of --example or --config")
        setup = from_example(args.example) if args.example else load_config(args.config)
        if args.tol is None:
            args.tol = DEFAULT_TOL[args.command]
        return {"verify": cmd_verify, "solve": cmd_solve, "bivector": cmd_bivector,
                "dressing": cmd_dressing}[args.command](setup, args)
    except InadmissibleError as exc:
        print(f"inadmissible: {exc}", file=sys.stderr)
        for comp in getattr(exc, "components", []):
            print(f"  failing component: {comp}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except (FactorizationError, AKSFactorizationError, NumericError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LieError, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
