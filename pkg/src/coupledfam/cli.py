"""Command-line surface: load family files, run the analyses, print JSON.

Every subcommand prints a single JSON document to standard output.  Reports
are deterministic: identical inputs and identical seeds give byte-identical
output (keys sorted, seeded RNG, no timestamps).  Indices in reports are
1-based, matching the on-disk file format.

Exit status: 0 = completed, 2 = completed but hypothesis-violation findings
are present in the report, 1 = usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .encoding import encode_matrix
from .family import (
    CoupledFamily,
    InvalidFamilyError,
    coupled_normality_violations,
)
from .familyfile import FamilyFileError, parse_family, serialize_family
from .fixtures import FixtureSpec, make_fixture, random_pair
from .graphs import (
    FamilyDigraph,
    LinkedGraph,
    family_digraph,
    is_strongly_connected,
    linked_graph,
    strongly_connected_components,
)
from .linalg import DEFAULT_TOL, TolerancePolicy
from .reduce import (
    BudgetExceededError,
    PreconditionError,
    ReducibilityVerdict,
    Strength,
    chain_classify,
    coupled_irreducible_burnside,
    search_witness,
    verify_reducing,
)
from .sylvester import (
    audit_family,
    audit_hypotheses,
    build_system,
    dichotomy_report,
    solve as solve_system,
)

__all__ = ["main"]

TOL_ENV_VAR = "COUPLEDFAM_TOL"

_RANDOM_KINDS = ("coupled_similar", "coupled_normal_similar", "planted_reducible")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; 2 is reserved for findings
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


def _resolve_tol(args) -> tuple[TolerancePolicy, dict]:
    atol = DEFAULT_TOL.equality_atol
    source = "default"
    env = os.environ.get(TOL_ENV_VAR)
    if env is not None:
        try:
            atol = float(env)
        except ValueError:
            raise _UsageError(f"{TOL_ENV_VAR} must be a float, got {env!r}")
        source = "env"
    if getattr(args, "tol", None) is not None:
        atol = args.tol
        source = "flag"
    if not atol > 0:
        raise _UsageError(f"tolerance must be positive, got {atol}")
    tol = DEFAULT_TOL.with_atol(atol)
    header = {
        "equality_atol": tol.equality_atol,
        "nonsingular_margin": tol.nonsingular_margin,
        "source": source,
    }
    return tol, header


def _load_family(path: str) -> CoupledFamily:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}")
    return parse_family(text)


def _one_based(pairs) -> list[list[int]]:
    return [[i + 1, j + 1] for (i, j) in pairs]


def _one_based_groups(groups) -> list[list[int]]:
    return [[i + 1 for i in group] for group in groups]


def _vertex_labels(k: int) -> tuple[str, ...]:
    return tuple(f"v{i + 1}" for i in range(k))


def _digraph_json(d: FamilyDigraph) -> dict:
    return {
        "edges": _one_based(d.edge_list()),
        "strongly_connected": is_strongly_connected(d),
        "strong_components": _one_based_groups(strongly_connected_components(d)),
    }


def _linked_json(g: LinkedGraph) -> dict:
    return {
        "edges": _one_based(g.edge_list()),
        "connected": g.connected,
        "components": _one_based_groups(g.connected_components()),
    }


def _shift_zero_pattern(table: dict) -> dict:
    """1-based copy of a zero-pattern table for the report boundary."""
    return {
        "zero_indices": [i + 1 for i in table["zero_indices"]],
        "nonsingular_indices": [i + 1 for i in table["nonsingular_indices"]],
        "violations": [
            {
                "block": v["block"],
                "position": [v["position"][0] + 1, v["position"][1] + 1],
                "max_abs": v["max_abs"],
            }
            for v in table["violations"]
        ],
        "ok": table["ok"],
    }


_ROUTE_CONDITIONS = {
    "irreducible-pair": "both families coupled irreducible",
    "not-properly-reducible-pair": "neither family properly reducible",
    "strong-digraphs": "neither family strongly reducible; both digraphs strongly connected",
    "strong-linked": "neither family strongly reducible; equal sizes; linked graph connected",
}


def _hypothesis_summary(hypotheses: dict[str, bool | None]) -> list[str]:
    lines = []
    for route, state in hypotheses.items():
        label = "strong hypotheses" if route.startswith("strong") else f"{route} hypotheses"
        word = "undetermined" if state is None else ("met" if state else "unmet")
        lines.append(f"{label} {word} [{route}: {_ROUTE_CONDITIONS[route]}]")
    return lines


def _has_violations(obj) -> bool:
    if isinstance(obj, dict):
        return any(
            (key == "violations" and bool(value)) or _has_violations(value)
            for key, value in obj.items()
        )
    if isinstance(obj, list):
        return any(_has_violations(item) for item in obj)
    return False


def _require_exact(families: dict[str, CoupledFamily]) -> None:
    for name, fam in families.items():
        if not fam.exact:
            raise _UsageError(
                f"--exact requires rational-backend input, but {name} is floating"
            )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _family_section(fam: CoupledFamily, audit, tol: TolerancePolicy) -> dict:
    bad = coupled_normality_violations(fam, tol)
    return {
        "dims": list(fam.dims),
        "scalar": "rational" if fam.exact else "complex64",
        "digraph": _digraph_json(family_digraph(fam, tol)),
        "reducibility": audit.to_json_dict(),
        "normality": {
            "coupled_normal": len(bad) == 0,
            "failing_pairs": _one_based(bad),
        },
    }


def _cmd_analyze(args, tol: TolerancePolicy, tol_header: dict) -> dict:
    a = _load_family(args.family)
    families = {"A": a}
    if args.B is not None:
        families["B"] = _load_family(args.B)
    if args.exact:
        _require_exact(families)
    allow_float = not args.exact
    budget = args.budget if args.budget is not None else 60
    payload: dict = {
        "command": "analyze",
        "inputs": {"A": args.family, "B": args.B},
        "tolerance": tol_header,
    }
    if args.B is None:
        audit = audit_family(
            a, tol, allow_float=allow_float, search_budget=budget, seed=args.seed
        )
        payload["families"] = {"A": _family_section(a, audit, tol)}
    else:
        b = families["B"]
        hyp = audit_hypotheses(
            a, b, tol, allow_float=allow_float, search_budget=budget, seed=args.seed
        )
        payload["families"] = {
            "A": _family_section(a, hyp.a_audit, tol),
            "B": _family_section(b, hyp.b_audit, tol),
        }
        payload["linked_graph"] = _linked_json(
            linked_graph(family_digraph(a, tol), family_digraph(b, tol))
        )
        payload["theorem_hypotheses"] = hyp.theorem_hypotheses()
        payload["hypothesis_summary"] = _hypothesis_summary(hyp.theorem_hypotheses())
        payload["same_family"] = hyp.same_family
    return payload


def _cmd_solve(args, tol: TolerancePolicy, tol_header: dict) -> dict:
    a = _load_family(args.family_a)
    b = _load_family(args.family_b)
    if args.exact:
        _require_exact({"A": a, "B": b})
    note = None
    if a.exact != b.exact:
        # mixed backends cannot be solved exactly; drop both to floating point
        a, b = a.to_float(), b.to_float()
        note = "mixed scalar backends; solved in floating point"
    samples = 0 if args.exact else 100
    report = dichotomy_report(
        a, b, tol, seed=args.seed, samples=samples, allow_float=not args.exact
    )
    rep_json = report.to_json_dict()
    rep_json["zero_pattern_tables"] = [
        _shift_zero_pattern(t) for t in rep_json["zero_pattern_tables"]
    ]
    space = solve_system(build_system(a, b), tol)
    space_json = {
        "dimension": space.dimension,
        "unknown_shapes": [[n, m] for (n, m) in space.shapes],
        "basis": [[encode_matrix(x) for x in sol] for sol in space.basis],
    }
    payload = {
        "command": "solve",
        "inputs": {"A": args.family_a, "B": args.family_b},
        "tolerance": tol_header,
        "solution_space": space_json,
        "dichotomy": rep_json,
        "hypothesis_summary": _hypothesis_summary(
            report.audit.theorem_hypotheses()
        ),
    }
    if note is not None:
        payload["note"] = note
    return payload


def _search_ladder(
    fam: CoupledFamily, tol: TolerancePolicy, budget: int, seed: int
):
    """Strongest-first witness search; (strength, witness) or (None, None)."""
    for target in (
        Strength.STRONGLY_REDUCIBLE,
        Strength.PROPERLY_REDUCIBLE,
        Strength.REDUCIBLE,
    ):
        witness = search_witness(fam, tol, budget=budget, seed=seed, target=target)
        if witness is not None:
            return verify_reducing(fam, witness, tol), witness
    return None, None


def _classify_auto(fam, tol, args) -> dict:
    try:
        verdict = chain_classify(fam, tol, budget=args.budget or 200_000)
        return {"mode": "chain", "verdict": verdict.to_json_dict(tol)}
    except (PreconditionError, BudgetExceededError) as exc:
        if args.exact:
            raise _UsageError(
                f"chain enumeration unavailable ({exc}); "
                "--exact forbids the floating-point fallback"
            )
        chain_note = str(exc)
    cert = coupled_irreducible_burnside(fam, tol, budget=args.budget or 200_000)
    if cert.irreducible:
        verdict = ReducibilityVerdict(
            strength=Strength.TRIVIAL,
            witness=None,
            reducible=False,
            properly=False,
            strongly=False,
            method="burnside-span-growth",
            detail=cert.to_json_dict(),
        )
    else:
        strength, witness = _search_ladder(
            fam, tol, budget=args.budget or 200, seed=args.seed
        )
        if witness is None:
            # reducible by the algebra-dimension certificate, strength unknown
            verdict = ReducibilityVerdict(
                strength=Strength.REDUCIBLE,
                witness=None,
                reducible=True,
                properly=None,
                strongly=None,
                method="burnside-span-growth",
                detail=cert.to_json_dict(),
            )
        else:
            verdict = ReducibilityVerdict(
                strength=strength,
                witness=witness,
                reducible=True,
                properly=strength >= Strength.PROPERLY_REDUCIBLE or None,
                strongly=strength >= Strength.STRONGLY_REDUCIBLE or None,
                method="burnside-span-growth+witness-search",
                detail=cert.to_json_dict(),
            )
    return {
        "mode": "burnside",
        "chain_unavailable": chain_note,
        "verdict": verdict.to_json_dict(tol),
    }


def _cmd_classify(args, tol: TolerancePolicy, tol_header: dict) -> dict:
    fam = _load_family(args.family)
    if args.exact:
        _require_exact({"A": fam})
    payload = {
        "command": "classify",
        "inputs": {"A": args.family},
        "tolerance": tol_header,
        "requested_mode": args.mode,
    }
    if args.mode == "auto":
        payload.update(_classify_auto(fam, tol, args))
    elif args.mode == "chain":
        verdict = chain_classify(fam, tol, budget=args.budget or 200_000)
        payload.update({"mode": "chain", "verdict": verdict.to_json_dict(tol)})
    elif args.mode == "burnside":
        if args.exact:
            raise _UsageError("--mode burnside is floating-point; drop --exact")
        cert = coupled_irreducible_burnside(fam, tol, budget=args.budget or 200_000)
        payload.update({"mode": "burnside", "certificate": cert.to_json_dict()})
    else:
        if args.exact and not fam.exact:
            raise _UsageError("--exact requires rational-backend input")
        strength, witness = _search_ladder(
            fam, tol, budget=args.budget or 200, seed=args.seed
        )
        found = witness is not None
        payload.update(
            {
                "mode": "search",
                "found": found,
                "strength": strength.label if found else None,
                "witness": witness.to_json(tol) if found else None,
                "note": None if found else "no witness found; not a proof of irreducibility",
            }
        )
    return payload


def _cmd_graph(args, tol: TolerancePolicy, tol_header: dict) -> dict:
    a = _load_family(args.family)
    payload = {
        "command": "graph",
        "inputs": {"A": args.family, "B": args.family_b},
        "tolerance": tol_header,
    }
    da = family_digraph(a, tol)
    payload["digraph_a"] = _digraph_json(da)
    dots = {"digraph_a": da.to_dot("DA", _vertex_labels(da.n))}
    if args.family_b is not None:
        b = _load_family(args.family_b)
        if b.K != a.K:
            raise _UsageError(
                f"families have different index sets ({a.K} vs {b.K} spaces)"
            )
        db = family_digraph(b, tol)
        g = linked_graph(da, db)
        payload["digraph_b"] = _digraph_json(db)
        payload["linked_graph"] = _linked_json(g)
        dots["digraph_b"] = db.to_dot("DB", _vertex_labels(db.n))
        dots["linked_graph"] = g.to_dot("G", _vertex_labels(g.n))
    if args.dot:
        payload["dot"] = dots
    return payload


def _parse_extra_params(rest: list[str]) -> dict:
    """Turn trailing ``--name value`` (or ``--name=value``) pairs into a
    params dict; values are decoded as JSON when possible, else kept as
    strings."""
    params: dict = {}
    i = 0
    while i < len(rest):
        token = rest[i]
        if not token.startswith("--") or token == "--":
            raise _UsageError(f"unexpected argument {token!r}")
        key = token[2:]
        if "=" in key:
            key, raw = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(rest):
                raise _UsageError(f"missing value for --{key}")
            raw = rest[i + 1]
            i += 2
        if not key:
            raise _UsageError(f"unexpected argument {token!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        params[key.replace("-", "_")] = value
    return params


def _fixture_objects(args, params: dict):
    """(families-to-write, meta) for the requested fixture kind."""
    kind = args.kind
    if kind in _RANDOM_KINDS:
        dims = params.pop("dims", None)
        if dims is None:
            raise _UsageError(f"fixture kind {kind!r} requires --dims, e.g. --dims [2,3,2]")
        strength = params.pop("strength", "strongly-reducible")
        normal = bool(params.pop("normal", False))
        if params:
            raise _UsageError(
                f"unknown parameters for {kind!r}: {sorted(params)}"
            )
        result = random_pair(
            kind,
            tuple(int(n) for n in dims),
            seed=args.seed,
            strength=strength,
            normal=normal,
        )
        meta = {
            "kind": kind,
            "seed": args.seed,
            "generator": result.generator,
            "dims": [int(n) for n in dims],
        }
        if kind == "planted_reducible":
            meta["strength"] = strength
            meta["normal"] = normal
        if result.b is None:
            return result.a, meta
        return (result.a, result.b), meta
    if args.exact:
        params.setdefault("exact", True)
    try:
        made = make_fixture(FixtureSpec(kind, params, seed=None))
    except (KeyError, TypeError) as exc:
        raise _UsageError(f"bad parameters for fixture {kind!r}: {exc}")
    meta = {"kind": kind, "params": params}
    if isinstance(made, np.ndarray):
        # bare building-brick block; wrap as a one-space family
        made = CoupledFamily.from_blocks([[made]])
    return made, meta


def _cmd_fixture(args, tol: TolerancePolicy, tol_header: dict) -> dict:
    params = _parse_extra_params(args.extra)
    made, meta = _fixture_objects(args, params)
    out = args.out
    written = []
    if isinstance(made, CoupledFamily):
        _write_family(out, made, meta)
        written.append(out)
    else:
        a, b = made
        stem, ext = os.path.splitext(out)
        ext = ext or ".json"
        path_a, path_b = f"{stem}_A{ext}", f"{stem}_B{ext}"
        _write_family(path_a, a, dict(meta, role="A"))
        _write_family(path_b, b, dict(meta, role="B"))
        written.extend([path_a, path_b])
    return {
        "command": "fixture",
        "kind": args.kind,
        "meta": meta,
        "tolerance": tol_header,
        "written": written,
    }


def _write_family(path: str, family: CoupledFamily, meta: dict) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(serialize_family(family, meta=meta))
            fh.write("\n")
    except OSError as exc:
        raise _UsageError(f"cannot write {path}: {exc}")


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def _add_common_flags(sub) -> None:
    sub.add_argument("--tol", type=float, default=None,
                     help="equality tolerance (overrides defaults and env)")
    sub.add_argument("--seed", type=int, default=0, help="RNG seed")
    sub.add_argument("--budget", type=int, default=None,
                     help="work budget for searches and enumerations")
    sub.add_argument("--exact", action="store_true",
                     help="exact rational arithmetic only; no floating fallback")


def _build_parser() -> _Parser:
    parser = _Parser(prog="coupledfam",
                     description="Analyze coupled matrix families.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="graphs, reducibility audit, normality")
    p.add_argument("family", help="family file (JSON)")
    p.add_argument("--B", default=None, help="second family file")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_analyze)

    p = subs.add_parser("solve", help="solution space and dichotomy report")
    p.add_argument("family_a", help="first family file")
    p.add_argument("family_b", help="second family file")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_solve)

    p = subs.add_parser("classify", help="coupled reducibility classification")
    p.add_argument("family", help="family file (JSON)")
    p.add_argument("--mode", choices=("auto", "chain", "burnside", "search"),
                   default="auto")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_classify)

    p = subs.add_parser("graph", help="coupling digraphs and linked graph")
    p.add_argument("family", help="family file (JSON)")
    p.add_argument("family_b", nargs="?", default=None,
                   help="second family file")
    p.add_argument("--dot", action="store_true", help="include dot renderings")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_graph)

    p = subs.add_parser("fixture", help="emit a named or random fixture")
    p.add_argument("kind", help="fixture kind")
    p.add_argument("-o", "--out", required=True, help="output file")
    _add_common_flags(p)
    p.set_defaults(handler=_cmd_fixture)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
        if args.command == "fixture":
            args.extra = rest
        elif rest:
            raise _UsageError(f"unrecognized arguments: {' '.join(rest)}")
        tol, tol_header = _resolve_tol(args)
        payload = args.handler(args, tol, tol_header)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        # FamilyFileError, InvalidFamilyError, PreconditionError are
        # ValueErrors; BudgetExceededError is a RuntimeError
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 2 if _has_violations(payload) else 0


if __name__ == "__main__":
    sys.exit(main())
