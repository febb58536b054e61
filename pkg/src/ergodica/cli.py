"""Command-line front end.

Subcommands load JSON specs, run the requested analysis, and emit a text or
canonical-JSON report.  JSON reports carry a top-level schema version, use
17-significant-digit floats, and are byte-identical for identical requests.

Exit codes: 0 success (and verification pass), 1 verification failure,
2 malformed input or violated precondition (machine-readable code in JSON
mode).
"""

import argparse
import json
import sys

import numpy as np

from .actions import AutomorphicAction, SingleAutomorphism, average_state, \
    invariant_state_for_automorphism, is_ergodic_action, is_ergodic_state
from .algebra import center_and_blocks, mvn_equivalent
from .classical import (
    IntegerShift,
    PermutationMap,
    is_ergodic_transformation,
    wandering_set_search,
)
from .config import DEFAULT_SEED
from .crossed import (
    build_crossed_product,
    conditional_expectation,
    crossed_type_consistency,
    murray_von_neumann_type,
)
from .equivalence import classify_t_type, t_equivalent, verify_twist_witness
from .errors import ErgodicaError, SpecParseError
from .numerics import ToleranceConfig, hermitian_eigendecomposition, max_abs
from .sections import build_sections_algebra, translation_action
from .serialize import (
    dumps_canonical,
    load_algebra_spec,
    load_action_spec,
    load_crossed_spec,
    load_dyn_spec,
    load_scenario_spec,
    load_state_spec,
    matrix_from_json,
    matrix_to_json,
    witness_to_json,
)
from .states import state_from_density
from .verify import run_all, scenario_suite

SCHEMA_VERSION = 1


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise SpecParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"malformed JSON in {path}: {exc}") from exc


def _block_report(alg, tol):
    central = center_and_blocks(alg, tol)
    mvn = murray_von_neumann_type(alg, tol, central=central)
    return {
        "ambient_dim": alg.ambient_dim,
        "span_dim": alg.dim,
        "center_dim": central.num_blocks,
        "blocks": [{"matrix_dim": d, "multiplicity": m} for d, m in central.block_dims],
        "factor_types": mvn.labels,
        "trace_weights": list(mvn.trace_weights),
    }


def _cmd_analyze(args, tol):
    alg = load_algebra_spec(_read_json(args.algebra), tol)
    report = _block_report(alg, tol)
    if args.action:
        action = load_action_spec(_read_json(args.action), alg, tol)
        if isinstance(action, AutomorphicAction):
            cls = classify_t_type(alg, action, tol)
            report["t_type"] = {
                "label": cls.label,
                "type_label": cls.type_label,
                "conventional": cls.conventional,
                "trace_weights": list(cls.certificate.trace.weights),
            }
    return 0, report


def _cmd_invariant_states(args, tol):
    alg = load_algebra_spec(_read_json(args.algebra), tol)
    action = load_action_spec(_read_json(args.action), alg, tol)
    f = load_state_spec(_read_json(args.state), alg, tol)
    if isinstance(action, SingleAutomorphism):
        h = invariant_state_for_automorphism(f, action, tol)
        method = "mean_ergodic_projection"
    else:
        h = average_state(f, action, tol)
        method = "group_average"
    w, _ = hermitian_eigendecomposition(h.density, tol)
    return 0, {
        "method": method,
        "density": matrix_to_json(h.density),
        "faithful": bool(w[0] > tol.rank_tol),
        "min_eigenvalue": float(w[0]),
    }


def _cmd_ergodic_check(args, tol):
    alg = load_algebra_spec(_read_json(args.algebra), tol)
    action = load_action_spec(_read_json(args.action), alg, tol)
    if isinstance(action, SingleAutomorphism):
        raise SpecParseError("ergodic-check requires a finite group action")
    report = {}
    ergodic, witness = is_ergodic_action(action, tol)
    report["action_ergodic"] = bool(ergodic)
    if witness is not None:
        report["action_witness_projection"] = matrix_to_json(witness)
    if args.state:
        f = load_state_spec(_read_json(args.state), alg, tol)
        res = is_ergodic_state(f, action, tol)
        state_report = {
            "ergodic": bool(res.is_ergodic),
            "joint_commutant_dim": res.joint_commutant_dim,
            "support": matrix_to_json(res.support),
        }
        if res.split is not None:
            lam, f1, f2 = res.split
            state_report["split"] = {
                "weight": float(lam),
                "component_1": matrix_to_json(f1.density),
                "component_2": matrix_to_json(f2.density),
            }
        report["state"] = state_report
    return 0, report


def _cmd_equiv(args, tol):
    alg = load_algebra_spec(_read_json(args.algebra), tol)
    action = load_action_spec(_read_json(args.action), alg, tol)
    if isinstance(action, SingleAutomorphism):
        raise SpecParseError("equiv requires a finite group action")
    pair = _read_json(args.pair)
    if not isinstance(pair, dict) or "E" not in pair or "F" not in pair:
        raise SpecParseError("pair file must carry projections E and F")
    e = matrix_from_json(pair["E"])
    f = matrix_from_json(pair["F"])
    mvn_ok, mvn_witness = mvn_equivalent(alg, e, f, tol, seed=args.seed)
    witness = t_equivalent(alg, action, e, f, tol, seed=args.seed)
    report = {
        "mvn_equivalent": bool(mvn_ok),
        "t_equivalent": witness is not None,
    }
    if mvn_witness is not None:
        report["mvn_witness"] = matrix_to_json(mvn_witness)
    if witness is not None:
        report["twist_witness"] = witness_to_json(witness, action.group)
        report["twist_witness_verified"] = bool(
            verify_twist_witness(alg, action, e, f, witness, tol))
    return 0, report


def _cmd_crossed(args, tol):
    base, action = load_crossed_spec(_read_json(args.crossed), tol)
    cp = build_crossed_product(base, action, dim_cap=args.dim_cap, tol=tol)
    worst_embed = max(
        max_abs(conditional_expectation(cp, cp.embed(b), tol) - b) for b in base.basis)
    worst_shift = 0.0
    for h in cp.group.elements:
        if h == cp.group.identity:
            continue
        img = conditional_expectation(
            cp, cp.shift_unitaries[h] @ cp.embed(base.basis[0]), tol)
        worst_shift = max(worst_shift, max_abs(img))
    consistency = crossed_type_consistency(base, action, dim_cap=args.dim_cap, tol=tol)
    return 0, {
        "space_dim": cp.space_dim,
        "algebra_dim": cp.algebra.dim,
        "crossed_blocks": _block_report(cp.algebra, tol),
        "expectation_inverts_embedding_residual": float(worst_embed),
        "expectation_kills_shifted_residual": float(worst_shift),
        "type_consistency": {
            "consistent": bool(consistency.consistent),
            "base_label": consistency.base_classification.label,
            "crossed_factors": consistency.crossed_type.labels,
            "embedded_projection_trace": float(consistency.embedded_projection_trace),
        },
    }


def _cmd_scenario(args, tol):
    patch, fibre = load_scenario_spec(_read_json(args.scenario), tol)
    sa = build_sections_algebra(patch, fibre, dim_cap=args.dim_cap, tol=tol)
    action = translation_action(sa, tol)
    ergodic, _ = is_ergodic_action(action, tol)
    cls = classify_t_type(sa.algebra, action, tol)
    report = {
        "lattice": list(patch.orders),
        "fibre_dim": fibre.fibre_dim,
        "sites": patch.num_sites,
        "algebra": _block_report(sa.algebra, tol),
        "translation_ergodic": bool(ergodic),
        "t_type": {"label": cls.label, "type_label": cls.type_label},
    }
    if sa.ambient_dim * action.group.order <= args.dim_cap:
        consistency = crossed_type_consistency(sa.algebra, action,
                                               dim_cap=args.dim_cap, tol=tol)
        report["crossed_consistent"] = bool(consistency.consistent)
    return 0, report


def _cmd_verify(args, tol):
    if args.scenario:
        patch, fibre = load_scenario_spec(_read_json(args.scenario), tol)
        checks = scenario_suite(patch, fibre, seed=args.seed, tol=tol)
        results = [{"name": name, "passed": bool(ok), "details": details}
                   for name, ok, details in checks]
        all_passed = all(r["passed"] for r in results)
        return (0 if all_passed else 1), {"checks": results, "passed": all_passed}
    results = run_all(seed=args.seed, tol=tol)
    payload = [{
        "index": r.index, "name": r.name, "passed": bool(r.passed),
        "details": r.details, "elapsed_seconds": round(r.elapsed, 3),
    } for r in results]
    all_passed = all(r.passed for r in results)
    return (0 if all_passed else 1), {"criteria": payload, "passed": all_passed}


def _cmd_dyn(args, tol):
    t, subset, mu = load_dyn_spec(_read_json(args.dyn))
    if isinstance(t, IntegerShift):
        cert = wandering_set_search(t, subset, k=args.orbit)
        report = {"map": "integer_shift", "wandering": cert is not None}
        if cert is not None:
            report["shifts"] = list(cert.shifts)
            report["images"] = [sorted(s) for s in cert.images]
        return 0, report
    if mu is None:
        raise SpecParseError("permutation dynamics need weights")
    ergodic, witness = is_ergodic_transformation(t, mu)
    report = {"map": "permutation", "ergodic": bool(ergodic)}
    if witness is not None:
        report["invariant_witness_set"] = sorted(witness)
    return 0, report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergodica",
        description="Finite-dimensional operator algebras, invariant states, "
                    "and crossed products",
    )
    parser.add_argument("--atol", type=float, default=1e-10,
                        help="absolute arithmetic tolerance (default 1e-10)")
    parser.add_argument("--rank-tol", type=float, default=1e-8,
                        help="rank/support eigenvalue threshold (default 1e-8)")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"seed for every seeded construction (default {DEFAULT_SEED})")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--dim-cap", type=int, default=96,
                        help="dimension cap for crossed products (default 96)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="center, blocks, and type report of an algebra")
    p.add_argument("--algebra", required=True)
    p.add_argument("--action", default=None)

    p = sub.add_parser("invariant-states",
                       help="averaged or mean-ergodic invariant state")
    p.add_argument("--algebra", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--state", required=True)

    p = sub.add_parser("ergodic-check", help="action/state ergodicity with witnesses")
    p.add_argument("--algebra", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--state", default=None)

    p = sub.add_parser("equiv", help="MvN and twisted equivalence with witnesses")
    p.add_argument("--algebra", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--pair", required=True, help="JSON file with projections E and F")

    p = sub.add_parser("crossed", help="crossed product construction and checks")
    p.add_argument("--crossed", required=True)

    p = sub.add_parser("scenario", help="build a lattice scenario and analyze it")
    p.add_argument("--scenario", required=True)

    p = sub.add_parser("verify", help="run the theorem property suite")
    p.add_argument("--scenario", default=None,
                   help="restrict to checks instantiated on one scenario")

    p = sub.add_parser("dyn", help="classical dynamics: ergodicity / wandering sets")
    p.add_argument("--dyn", required=True)
    p.add_argument("--orbit", type=int, default=5)

    return parser


_HANDLERS = {
    "analyze": _cmd_analyze,
    "invariant-states": _cmd_invariant_states,
    "ergodic-check": _cmd_ergodic_check,
    "equiv": _cmd_equiv,
    "crossed": _cmd_crossed,
    "scenario": _cmd_scenario,
    "verify": _cmd_verify,
    "dyn": _cmd_dyn,
}


def _render_text(report, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(report, dict):
        for key in sorted(report):
            value = report[key]
            if isinstance(value, (dict, list)) and not _is_small(value):
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_compact(value)}")
    elif isinstance(report, list):
        for item in report:
            if isinstance(item, (dict, list)) and not _is_small(item):
                lines.append(f"{pad}-")
                lines.extend(_render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_compact(item)}")
    else:
        lines.append(f"{pad}{_compact(report)}")
    return lines


def _is_small(value):
    return isinstance(value, list) and len(value) <= 8 and all(
        isinstance(x, (int, float, str, bool)) for x in value)


def _compact(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        return "[" + ", ".join(_compact(x) for x in value) + "]"
    return str(value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = ToleranceConfig(atol=args.atol, rank_tol=args.rank_tol)
    except ValueError as exc:
        _emit_error(args, "E_PARSE", str(exc))
        return 2
    handler = _HANDLERS[args.command]
    try:
        code, report = handler(args, tol)
    except SpecParseError as exc:
        _emit_error(args, exc.code, str(exc))
        return 2
    except ErgodicaError as exc:
        _emit_error(args, exc.code, str(exc))
        return 2
    payload = {"schema": SCHEMA_VERSION, "command": args.command, "report": report}
    if args.format == "json":
        sys.stdout.write(dumps_canonical(payload) + "\n")
    else:
        print(f"[{args.command}]")
        for line in _render_text(report):
            print(line)
    return code


def _emit_error(args, code, message):
    if getattr(args, "format", "text") == "json":
        sys.stdout.write(dumps_canonical(
            {"schema": SCHEMA_VERSION, "error": {"code": code, "message": message}}) + "\n")
    else:
        print(f"error [{code}]: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
