"""Batch command line over JSON files.

Exit codes: 0 success (including negative verdicts), 2 failed precondition,
3 malformed input JSON, 4 scalar outside the supported fields.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebra import Automorphism, GENERATORS, INDEX
from .leonard import (
    NotAWCompatible,
    analyze_pair,
    check_refined_relations,
    fit_AW,
    verify_triple,
    xspace_expand,
)
from .linalg import LinAlgError, rational_eigenvalues
from .modules import (
    InvalidModuleType,
    ModuleRep,
    ModuleType,
    NotCanonicalModule,
    NotConnected,
    all_types,
    canonical_basis,
    classify_by_traces,
    closed_form_rep,
    construct,
    eig_table,
    expected_h_traces,
    expected_traces,
    h_traces,
    is_irreducible,
    is_standard,
    representation_in_basis,
    six_bases,
    spectral_data,
    stabilizer,
    twist,
    twist_type,
)
from .recognition import (
    RecognitionError,
    counterexample_d2,
    extend_pair_to_triple,
    pair_choices,
    pair_isomorphism,
    recognize_pair,
    recognize_triple,
    triple_choices,
    triple_isomorphism,
)
from .scalars import Q, UnsupportedExtension, scalar_from_json
from .serialize import (
    SchemaError,
    automorphism_to_json,
    aw_to_json,
    dumps,
    expansion_to_json,
    iso_to_json,
    matrices_from_json,
    matrix_to_json,
    module_from_json,
    module_to_json,
    pair_analysis_to_json,
    pair_recognition_to_json,
    relations_to_json,
    scalars,
    solution_to_json,
    triple_analysis_to_json,
    triple_recognition_to_json,
)

EXIT_OK, EXIT_PRECONDITION, EXIT_MALFORMED, EXIT_EXTENSION = 0, 2, 3, 4

PAIR_KEYS = ("A", "A_star")
TRIPLE_KEYS = ("A", "A_star", "A_eps")


class UsageError(ValueError):
    pass


# input helpers -------------------------------------------------------------------


def _read_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def parse_scales(text: str | None) -> dict[str, object]:
    """``"3,1/2"`` or ``"x=3,z=-1"``; unspecified generators scale by 1."""
    out = {g: Q(1) for g in GENERATORS}
    if not text:
        return out
    parts = [p.strip() for p in text.split(",") if p.strip()]
    for i, part in enumerate(parts):
        if "=" in part:
            g, value = (s.strip() for s in part.split("=", 1))
        elif i < 3:
            g, value = GENERATORS[i], part
        else:
            raise UsageError(f"too many scale values in {text!r}")
        if g not in GENERATORS:
            raise UsageError(f"unknown generator {g!r} in --scale")
        try:
            out[g] = scalar_from_json(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad scale {value!r}") from exc
        if not out[g]:
            raise UsageError("scales must be nonzero")
    return out


def _module_from_args(args) -> ModuleRep:
    if getattr(args, "input", None):
        return module_from_json(_read_json(args.input))
    if args.kind is None or args.d is None:
        raise UsageError("give --in FILE or --kind and --d")
    return construct(ModuleType(args.kind, args.d, args.n if args.kind == "AB" else None))


def _operators(args, keys: tuple[str, ...], path_attr: str = "input"):
    """Operators from a pair/triple JSON, or ``scale * generator`` of a module JSON."""
    path = getattr(args, path_attr, None)
    if path is None and getattr(args, "kind", None) is None:
        raise UsageError(f"give --{'in' if path_attr == 'input' else 'other'} FILE")
    if path is None:
        M = _module_from_args(args)
    else:
        obj = _read_json(path)
        if isinstance(obj, dict) and "A" in obj:
            return matrices_from_json(obj, keys)
        M = module_from_json(obj)
    s = parse_scales(getattr(args, "scale", None))
    mats = [M.X * s["x"], M.Y * s["y"], M.Z * s["z"]]
    return mats[: len(keys)]


def _ops_json(keys, mats) -> dict:
    return {k: matrix_to_json(m) for k, m in zip(keys, mats)}


# commands ------------------------------------------------------------------------


def cmd_construct(args):
    t = ModuleType(args.kind, args.d, args.n if args.kind == "AB" else None)
    return module_to_json(construct(t))


def cmd_verify(args):
    M = _module_from_args(args)
    out = {
        "order": M.order,
        "relations": relations_to_json(M.relations(), args.verbose),
        "relations_xy": relations_to_json(M.relations_xy(), args.verbose),
        "traces": scalars(M.traces()),
        "h_traces": dict(zip(INDEX, scalars(h_traces(M)))),
        "irreducible": is_irreducible(M),
    }
    if M.type is not None:
        out["type"] = str(M.type)
        out["traces_match_type"] = tuple(Q(v) for v in expected_traces(M.type)) == M.traces()
        out["h_traces_match_type"] = tuple(Q(v) for v in expected_h_traces(M.type)) == h_traces(M)
    return out


def cmd_classify(args):
    M = _module_from_args(args)
    t = classify_by_traces(M)
    cb = canonical_basis(M)
    return {
        "type": t.to_json(),
        "label": str(t),
        "traces": scalars(M.traces()),
        "canonical_type": str(cb.type),
        "canonical_basis": matrix_to_json(cb.P),
    }


def cmd_twist(args):
    if not args.perm:
        raise UsageError("twist needs --perm")
    sigma = Automorphism.from_cycles(args.perm)
    M = _module_from_args(args)
    if M.type is None:
        M.type = classify_by_traces(M)
    T = twist(M, sigma)
    observed = classify_by_traces(T)
    return {
        "automorphism": automorphism_to_json(sigma),
        "source": str(M.type),
        "predicted": str(twist_type(M.type, sigma)),
        "observed": str(observed),
        "module": module_to_json(T),
        "stabilizer_order": len(stabilizer(M.type)),
    }


def cmd_eig(args):
    M = _module_from_args(args)
    t = M.type if M.type is not None else classify_by_traces(M)
    table = eig_table(t)
    out = {"type": str(t), "generators": {}}
    for g in GENERATORS:
        found = sorted(v for v, _ in rational_eigenvalues(M.gen(g)))
        out["generators"][g] = {
            "ordering": scalars(table[g]),
            "standard": is_standard(table[g]),
            "computed_match": found == sorted(table[g]),
        }
    return out


def cmd_idempotents(args):
    M = _module_from_args(args)
    if M.type is None:
        M.type = classify_by_traces(M)
    out = {}
    for g in ([args.gen] if args.gen else GENERATORS):
        sd = spectral_data(M, g)
        out[g] = {
            "eigenvalues": scalars(sd.eigenvalues),
            "identities_hold": sd.check(M.gen(g)),
            "idempotents": [matrix_to_json(e) for e in sd.idempotents] if args.verbose else None,
        }
    return out


def _ab_args(args) -> tuple[str, str]:
    a, b = args.a, args.b
    if a not in GENERATORS or b not in GENERATORS or a == b:
        raise UsageError("--a and --b must be two distinct generators among x, y, z")
    return a, b


def cmd_bases(args):
    M = _module_from_args(args)
    if M.type is None:
        M.type = classify_by_traces(M)
    a, b = _ab_args(args)
    return {"a": a, "b": b, "basis": matrix_to_json(six_bases(M, a, b))}


def cmd_rep(args):
    M = _module_from_args(args)
    if M.type is None:
        M.type = classify_by_traces(M)
    a, b = _ab_args(args)
    R = representation_in_basis(M, a, b)
    C = closed_form_rep(M.type, a, b)
    return {
        "module": module_to_json(R),
        "matches_closed_form": all(R.gen(g) == C.gen(g) for g in GENERATORS),
    }


def cmd_analyze_pair(args):
    A, As = _operators(args, PAIR_KEYS)
    return pair_analysis_to_json(analyze_pair(A, As), args.verbose)


def cmd_fit_aw(args):
    A, As = _operators(args, PAIR_KEYS)
    pa = analyze_pair(A, As, fit=False)
    try:
        return {"aw": aw_to_json(fit_AW(pa)), "d": pa.d}
    except NotAWCompatible as exc:
        raise RecognitionError(str(exc), exc.certificate) from exc


def cmd_analyze_triple(args):
    mats = _operators(args, TRIPLE_KEYS)
    return triple_analysis_to_json(verify_triple(*mats))


def cmd_recognize_pair(args):
    A, As = _operators(args, PAIR_KEYS)
    R = recognize_pair(A, As)
    return pair_recognition_to_json(R, pair_choices(R) if args.verbose else None)


def cmd_recognize_triple(args):
    mats = _operators(args, TRIPLE_KEYS)
    R = recognize_triple(*mats)
    return triple_recognition_to_json(R, triple_choices(R) if args.verbose else None)


def cmd_extend(args):
    A, As = _operators(args, PAIR_KEYS)
    xi_eps = scalar_from_json(args.xi_eps)
    R = recognize_pair(A, As)
    mats = extend_pair_to_triple(R, xi_eps)
    ta = verify_triple(*mats)
    return {**_ops_json(TRIPLE_KEYS, mats), "triple": triple_analysis_to_json(ta)}


def cmd_iso_pair(args):
    A, As = _operators(args, PAIR_KEYS)
    B, Bs = _operators(args, PAIR_KEYS, "other")
    return iso_to_json(pair_isomorphism(A, As, B, Bs))


def cmd_iso_triple(args):
    first = _operators(args, TRIPLE_KEYS)
    second = _operators(args, TRIPLE_KEYS, "other")
    return iso_to_json(triple_isomorphism(*first, *second))


def cmd_counterexample_d2(args):
    mats = counterexample_d2()
    A, As, Ae = mats
    out = _ops_json(TRIPLE_KEYS, mats)
    out["triple"] = triple_analysis_to_json(verify_triple(*mats))
    pairs = {}
    for name, (P, R) in {"A|A*": (A, As), "A*|A^e": (As, Ae), "A^e|A": (Ae, A)}.items():
        fitted = fit_AW(analyze_pair(P, R, fit=False))
        pairs[name] = {
            "aw": aw_to_json(fitted),
            "refined_relations": check_refined_relations(P, R, fitted.rho, fitted.rho_star).ok,
        }
    out["pairs"] = pairs
    out["expansion"] = expansion_to_json(xspace_expand(A, As, Ae))
    try:
        recognize_triple(*mats)
        out["recognition"] = {"succeeded": True}
    except RecognitionError as exc:
        detail = exc.detail or {}
        out["recognition"] = {
            "succeeded": False,
            "message": str(exc),
            "certificate": scalars(exc.certificate) if exc.certificate else None,
            "system": solution_to_json(detail["system"]) if "system" in detail else None,
        }
    return out


def _sweep_row(t: ModuleType) -> dict:
    M = construct(t)
    row = {
        "type": str(t),
        "traces": scalars(M.traces()),
        "relations": M.relations().ok and M.relations_xy().ok,
        "traces_match": tuple(Q(v) for v in expected_traces(t)) == M.traces(),
        "h_traces_match": tuple(Q(v) for v in expected_h_traces(t)) == h_traces(M),
        "classified": str(classify_by_traces(M)),
    }
    pa = analyze_pair(M.X, M.Y)
    row["leonard"] = pa.is_leonard
    row["bannai_ito"] = pa.is_BI
    row["aw"] = aw_to_json(pa.aw)
    row["green"] = (
        row["relations"] and row["traces_match"] and row["h_traces_match"]
        and row["classified"] == str(t) and pa.is_leonard and pa.aw is not None
    )
    return row


def cmd_sweep(args):
    if args.d_max < 0:
        raise UsageError("--d-max must be nonnegative")
    rows = [_sweep_row(t) for d in range(args.d_min, args.d_max + 1) for t in all_types(d)]
    return {"rows": rows, "all_green": all(r["green"] for r in rows)}


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "twist": cmd_twist,
    "eig": cmd_eig,
    "idempotents": cmd_idempotents,
    "bases": cmd_bases,
    "rep": cmd_rep,
    "analyze-pair": cmd_analyze_pair,
    "fit-aw": cmd_fit_aw,
    "analyze-triple": cmd_analyze_triple,
    "recognize-pair": cmd_recognize_pair,
    "recognize-triple": cmd_recognize_triple,
    "extend": cmd_extend,
    "iso-pair": cmd_iso_pair,
    "iso-triple": cmd_iso_triple,
    "counterexample-d2": cmd_counterexample_d2,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bileonard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--in", dest="input", metavar="FILE", help="input JSON ('-' for stdin)")
        p.add_argument("--out", metavar="FILE", help="write the JSON result here")
        p.add_argument("--verbose", action="store_true")
        if name not in ("counterexample-d2", "sweep"):
            p.add_argument("--kind", choices=("B", "AB"))
            p.add_argument("--d", type=int)
            p.add_argument("--n", choices=INDEX, default="0")
            p.add_argument("--scale", help="per-generator scalars, e.g. '3,1/2' or 'y=-2'")
        if name == "twist":
            p.add_argument("--perm", help="cycle notation such as '(0 x)(y z)'")
        if name == "idempotents":
            p.add_argument("--gen", choices=GENERATORS)
        if name in ("bases", "rep"):
            p.add_argument("--a", default="x")
            p.add_argument("--b", default="y")
        if name == "extend":
            p.add_argument("--xi-eps", default="1")
        if name in ("iso-pair", "iso-triple"):
            p.add_argument("--other", metavar="FILE", required=True)
        if name == "sweep":
            p.add_argument("--d-min", type=int, default=0)
            p.add_argument("--d-max", type=int, default=6)
    return parser


def _fail(code: int, kind: str, message: str, **extra) -> int:
    sys.stdout.write(dumps({"error": kind, "message": message, **extra}) + "\n")
    print(f"error: {message}", file=sys.stderr)
    return code


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PRECONDITION
    try:
        result = COMMANDS[args.command](args)
    except SchemaError as exc:
        return _fail(EXIT_MALFORMED, "malformed", str(exc), location=exc.path)
    except UnsupportedExtension as exc:
        return _fail(EXIT_EXTENSION, "unsupported_extension", str(exc))
    except RecognitionError as exc:
        cert = scalars(exc.certificate) if exc.certificate else None
        return _fail(EXIT_PRECONDITION, "precondition", str(exc), certificate=cert)
    except (
        UsageError,
        InvalidModuleType,
        NotCanonicalModule,
        NotConnected,
        NotAWCompatible,
        LinAlgError,
        ValueError,
        ArithmeticError,
    ) as exc:
        return _fail(EXIT_PRECONDITION, "precondition", str(exc))
    text = dumps(result) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.verbose:
        print(f"{args.command}: ok", file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
