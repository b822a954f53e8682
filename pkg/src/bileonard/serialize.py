"""JSON forms for scalars, matrices, modules and analysis reports.

Every scalar is written as a string (rationals) or as the coefficient object
of an extension element, so nothing passes through floating point.
"""

from __future__ import annotations

import json

from .algebra import Automorphism, RelationReport
from .leonard import AWParams, Expansion, PairAnalysis, TripleAnalysis
from .linalg import LinearSolution, Matrix
from .modules import ModuleRep, ModuleType
from .scalars import UnsupportedExtension, common_field, scalar_from_json, scalar_to_json


class SchemaError(ValueError):
    """Input JSON has the wrong shape; ``path`` locates the offending value."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _scalar(obj, path: str):
    try:
        return scalar_from_json(obj)
    except UnsupportedExtension:
        raise
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError(path, str(exc)) from exc


def _field(obj, key: str, path: str):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(path, f"missing field {key!r}")
    return obj[key]


# matrices ---------------------------------------------------------------------


def matrix_to_json(M: Matrix) -> dict:
    return {"order": M.order, "entries": [[scalar_to_json(c) for c in row] for row in M.rows()]}


def matrix_from_json(obj, path: str = "$") -> Matrix:
    n = _field(obj, "order", path)
    rows = _field(obj, "entries", path)
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError(f"{path}.order", "expected a positive integer")
    if not isinstance(rows, list) or len(rows) != n:
        raise SchemaError(f"{path}.entries", f"expected {n} rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{path}.entries[{i}]", f"expected {n} entries")
        out.append([_scalar(c, f"{path}.entries[{i}][{j}]") for j, c in enumerate(row)])
    return Matrix(out)


# modules ----------------------------------------------------------------------


def type_from_json(obj, path: str = "$.type") -> ModuleType:
    try:
        return ModuleType.from_json(obj)
    except (ValueError, TypeError, KeyError) as exc:
        raise SchemaError(path, str(exc)) from exc


def module_to_json(M: ModuleRep) -> dict:
    basis = M.basis if isinstance(M.basis, str) else list(M.basis)
    return {
        "type": M.type.to_json() if M.type is not None else None,
        "x": matrix_to_json(M.X),
        "y": matrix_to_json(M.Y),
        "z": matrix_to_json(M.Z),
        "basis": basis,
    }


def module_from_json(obj, path: str = "$") -> ModuleRep:
    mats = [matrix_from_json(_field(obj, g, path), f"{path}.{g}") for g in "xyz"]
    if len({m.order for m in mats}) != 1:
        raise SchemaError(path, "x, y, z have different orders")
    common_field(v for m in mats for v in m.flatten())
    t = obj.get("type")
    t = type_from_json(t, f"{path}.type") if t is not None else None
    basis = obj.get("basis", "constructor")
    if isinstance(basis, list):
        basis = tuple(basis)
    return ModuleRep(*mats, t, basis)


def matrices_from_json(obj, keys: tuple[str, ...], path: str = "$") -> list[Matrix]:
    mats = [matrix_from_json(_field(obj, k, path), f"{path}.{k}") for k in keys]
    if len({m.order for m in mats}) != 1:
        raise SchemaError(path, f"{', '.join(keys)} have different orders")
    common_field(v for m in mats for v in m.flatten())
    return mats


def automorphism_to_json(s: Automorphism) -> dict:
    return {**s.to_json(), "cycles": s.cycles()}


# reports ----------------------------------------------------------------------


def scalars(values) -> list:
    return [scalar_to_json(v) for v in values]


def relations_to_json(rep: RelationReport, verbose: bool = False) -> dict:
    out = {"ok": rep.ok, "failing": rep.failing()}
    if verbose:
        out["residuals"] = {k: matrix_to_json(v) for k, v in rep.residuals.items()}
    return out


def aw_to_json(p: AWParams | None):
    if p is None:
        return None
    out = {k: scalar_to_json(v) for k, v in p.as_dict().items()}
    out["unique"] = p.unique
    return out


def solution_to_json(sol: LinearSolution) -> dict:
    out = {"consistent": sol.consistent, "unique": sol.unique}
    if sol.consistent:
        out["solution"] = scalars(sol.solution)
    else:
        out["certificate"] = scalars(sol.certificate)
        out["certificate_value"] = scalar_to_json(sol.certificate_value)
    return out


def expansion_to_json(e: Expansion) -> dict:
    if e.in_span:
        return {"in_span": True, "coefficients": scalars(e.coefficients), "unique": e.unique}
    return {
        "in_span": False,
        "certificate": scalars(e.certificate),
        "certificate_value": scalar_to_json(e.certificate_value),
    }


def pair_analysis_to_json(pa: PairAnalysis, verbose: bool = False) -> dict:
    out = {"d": pa.d, "is_leonard": pa.is_leonard}
    if not pa.is_leonard:
        out["reason"] = pa.reason
        return out
    out.update(
        theta=scalars(pa.theta),
        theta_star=scalars(pa.theta_star),
        orientations=[[scalars(o) for o in side] for side in pa.orientations],
        a=scalars(pa.a_diag),
        a_star=scalars(pa.a_star_diag),
        bip_class=pa.bip_class,
        dual_bip_class=pa.dual_bip_class,
        is_bannai_ito=pa.is_BI,
        aw=aw_to_json(pa.aw),
    )
    if verbose:
        out["A_in_A_star_basis"] = matrix_to_json(pa.dual_side.other)
        out["A_star_in_A_basis"] = matrix_to_json(pa.side.other)
    return out


def triple_analysis_to_json(ta: TripleAnalysis) -> dict:
    out = {"d": ta.d, "is_leonard_triple": ta.is_leonard_triple}
    if not ta.is_leonard_triple:
        out["reason"] = ta.reason
        return out
    out.update(
        eigenvalues={k: scalars(v) for k, v in ta.eigenvalues.items()},
        profiles={f"{a}|{b}": c for (a, b), c in ta.profiles.items()},
        cls=ta.cls,
        is_bannai_ito=ta.is_BI,
    )
    return out


def pair_recognition_to_json(R, choices: list | None = None) -> dict:
    out = {
        "rho": scalar_to_json(R.rho),
        "rho_star": scalar_to_json(R.rho_star),
        "xi": scalar_to_json(R.xi),
        "xi_star": scalar_to_json(R.xi_star),
        "type": R.type.to_json(),
        "module": module_to_json(R.module),
        "choices": R.choice_count,
    }
    if choices is not None:
        out["choice_list"] = [
            {"signs": list(c.signs), "xis": scalars(c.xis), "type": c.type.to_json()} for c in choices
        ]
    return out


def triple_recognition_to_json(R, choices: list | None = None) -> dict:
    out = {
        "zeta": scalar_to_json(R.zeta),
        "zeta_star": scalar_to_json(R.zeta_star),
        "zeta_eps": scalar_to_json(R.zeta_eps),
        "xi": scalar_to_json(R.xi),
        "xi_star": scalar_to_json(R.xi_star),
        "xi_eps": scalar_to_json(R.xi_eps),
        "type": R.type.to_json(),
        "module": module_to_json(R.module),
        "choices": R.choice_count,
    }
    if choices is not None:
        out["choice_list"] = [
            {"signs": list(c.signs), "xis": scalars(c.xis), "type": c.type.to_json()} for c in choices
        ]
    return out


def _invariant(v):
    return v if isinstance(v, (int, str)) else scalar_to_json(v)


def iso_to_json(res) -> dict:
    out = {"isomorphic": res.isomorphic}
    if res.invariants:
        out["invariants"] = [[_invariant(v) for v in inv] for inv in res.invariants]
    if res.types:
        out["types"] = [str(t) for t in res.types]
    if res.isomorphic:
        out["intertwiner"] = matrix_to_json(res.intertwiner)
    else:
        out["discriminant"] = res.discriminant
    return out
