"""JSON schemas for matrices, algebras, states, actions, dynamics, crossed
products, and lattice scenarios, plus a canonical emitter.

Matrix encoding used repo-wide: a matrix is a list of rows; each entry is a
two-element array [re, im] of decimal floats.  The canonical emitter sorts
object keys and prints floats with 17 significant digits so identical
reports serialize to identical bytes.
"""

import json
import math

import numpy as np

from .actions import AutomorphicAction, SingleAutomorphism, action_from_unitaries
from .algebra import OperatorAlgebra, block_algebra, generate_algebra
from .classical import FiniteProbabilitySpace, IntegerShift, PermutationMap
from .errors import SpecParseError
from .groups import FiniteAbelianGroup
from .numerics import DEFAULT_TOL, ToleranceConfig
from .sections import FibreSpec, LatticePatch
from .states import StateFunctional, state_from_density

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "load_algebra_spec",
    "load_state_spec",
    "load_action_spec",
    "load_dyn_spec",
    "load_crossed_spec",
    "load_scenario_spec",
    "witness_to_json",
    "witness_from_json",
    "dumps_canonical",
]


def matrix_to_json(m) -> list:
    a = np.asarray(m, dtype=np.complex128)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def matrix_from_json(data) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise SpecParseError("matrix must be a non-empty list of rows")
    rows = []
    width = None
    for row in data:
        if not isinstance(row, list):
            raise SpecParseError("matrix row must be a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SpecParseError("matrix rows have inconsistent lengths")
        entries = []
        for entry in row:
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, (int, float)) for v in entry)):
                raise SpecParseError("matrix entry must be a [re, im] pair")
            entries.append(complex(entry[0], entry[1]))
        rows.append(entries)
    return np.array(rows, dtype=np.complex128)


def _require(cond, message):
    if not cond:
        raise SpecParseError(message)


def load_algebra_spec(data, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorAlgebra:
    """AlgebraSpec: {"ambient_dim": n, "generators": [...]} or
    {"blocks": [{"dim": n_i, "multiplicity": m_i}, ...]}."""
    _require(isinstance(data, dict), "algebra spec must be an object")
    if "blocks" in data:
        blocks = data["blocks"]
        _require(isinstance(blocks, list) and blocks, "blocks must be a non-empty list")
        pairs = []
        for b in blocks:
            _require(isinstance(b, dict) and "dim" in b, "each block needs a dim")
            dim = b["dim"]
            mult = b.get("multiplicity", 1)
            _require(isinstance(dim, int) and dim >= 1, "block dim must be a positive int")
            _require(isinstance(mult, int) and mult >= 1, "multiplicity must be a positive int")
            pairs.append((dim, mult))
        return block_algebra(pairs, tol)
    _require("ambient_dim" in data, "algebra spec needs ambient_dim or blocks")
    n = data["ambient_dim"]
    _require(isinstance(n, int) and n >= 1, "ambient_dim must be a positive int")
    gens = data.get("generators", [])
    _require(isinstance(gens, list), "generators must be a list")
    mats = []
    for g in gens:
        m = matrix_from_json(g)
        _require(m.shape == (n, n), f"generator has shape {m.shape}, expected ({n}, {n})")
        mats.append(m)
    return generate_algebra(mats, n, tol)


def load_state_spec(data, alg: OperatorAlgebra,
                    tol: ToleranceConfig = DEFAULT_TOL) -> StateFunctional:
    """StateSpec: {"density": Matrix}."""
    _require(isinstance(data, dict) and "density" in data, "state spec needs a density")
    rho = matrix_from_json(data["density"])
    _require(rho.shape == (alg.ambient_dim, alg.ambient_dim),
             "density does not match the ambient dimension")
    try:
        return state_from_density(alg, rho, tol)
    except Exception as exc:
        raise SpecParseError(f"invalid density: {exc}") from exc


def load_action_spec(data, alg: OperatorAlgebra, tol: ToleranceConfig = DEFAULT_TOL):
    """ActionSpec: {"group": {"cyclic_orders": [...]}, "unitaries": {...}}
    or {"single_automorphism": Matrix}."""
    _require(isinstance(data, dict), "action spec must be an object")
    if "single_automorphism" in data:
        w = matrix_from_json(data["single_automorphism"])
        _require(w.shape == (alg.ambient_dim, alg.ambient_dim),
                 "automorphism matrix does not match the ambient dimension")
        return SingleAutomorphism(algebra=alg, unitary=w)
    _require("group" in data and "unitaries" in data,
             "action spec needs group and unitaries (or single_automorphism)")
    group_data = data["group"]
    _require(isinstance(group_data, dict) and "cyclic_orders" in group_data,
             "group must carry cyclic_orders")
    orders = group_data["cyclic_orders"]
    _require(isinstance(orders, list) and orders
             and all(isinstance(m, int) and m >= 1 for m in orders),
             "cyclic_orders must be positive ints")
    group = FiniteAbelianGroup(tuple(orders))
    raw = data["unitaries"]
    _require(isinstance(raw, dict), "unitaries must map element keys to matrices")
    unitaries = {}
    for key, mat in raw.items():
        try:
            el = group.element_from_key(key)
        except Exception as exc:
            raise SpecParseError(f"bad element key {key!r}: {exc}") from exc
        unitaries[el] = matrix_from_json(mat)
    for el in group.elements:
        _require(el in unitaries, f"missing unitary for element {group.element_key(el)}")
    try:
        return action_from_unitaries(group, alg, unitaries, tol)
    except Exception as exc:
        raise SpecParseError(f"invalid action: {exc}") from exc


def load_dyn_spec(data):
    """DynSpec: {"points": n, "weights": [...], "permutation": [...]}
    or {"shift": true, "set": [...]}."""
    _require(isinstance(data, dict), "dyn spec must be an object")
    if data.get("shift"):
        subset = data.get("set", [])
        _require(isinstance(subset, list) and all(isinstance(x, int) for x in subset),
                 "shift set must be a list of integers")
        return IntegerShift(), frozenset(subset), None
    _require("points" in data and "permutation" in data,
             "dyn spec needs points and permutation (or shift)")
    n = data["points"]
    _require(isinstance(n, int) and n >= 1, "points must be a positive int")
    perm = data["permutation"]
    _require(isinstance(perm, list) and sorted(perm) == list(range(n)),
             "permutation must list the images of 0..n-1")
    weights = data.get("weights")
    mu = None
    if weights is not None:
        _require(isinstance(weights, list) and len(weights) == n,
                 "weights must have one entry per point")
        try:
            mu = FiniteProbabilitySpace(tuple(float(w) for w in weights))
        except Exception as exc:
            raise SpecParseError(f"invalid weights: {exc}") from exc
    return PermutationMap(tuple(perm)), None, mu


def load_crossed_spec(data, tol: ToleranceConfig = DEFAULT_TOL):
    """CrossedSpec: {"base": AlgebraSpec, "action": ActionSpec}."""
    _require(isinstance(data, dict) and "base" in data and "action" in data,
             "crossed spec needs base and action")
    base = load_algebra_spec(data["base"], tol)
    action = load_action_spec(data["action"], base, tol)
    _require(isinstance(action, AutomorphicAction),
             "crossed products need a finite group action, not a single automorphism")
    return base, action


def load_scenario_spec(data, tol: ToleranceConfig = DEFAULT_TOL):
    """ScenarioSpec: {"lattice": [...], "fibre_dim": n, "twist": {...}?}."""
    _require(isinstance(data, dict) and "lattice" in data and "fibre_dim" in data,
             "scenario spec needs lattice and fibre_dim")
    orders = data["lattice"]
    _require(isinstance(orders, list) and orders
             and all(isinstance(m, int) and m >= 1 for m in orders),
             "lattice must be a list of positive ints")
    n = data["fibre_dim"]
    _require(isinstance(n, int) and n >= 1, "fibre_dim must be a positive int")
    patch = LatticePatch(tuple(orders))
    twist = None
    if data.get("twist"):
        raw = data["twist"]
        _require(isinstance(raw, dict), "twist must map site keys to matrices")
        twist = {}
        for key, mat in raw.items():
            try:
                site = tuple(int(x) for x in key.split(","))
            except ValueError as exc:
                raise SpecParseError(f"bad site key {key!r}") from exc
            _require(len(site) == len(orders), f"site key {key!r} has wrong arity")
            twist[site] = matrix_from_json(mat)
    return patch, FibreSpec(fibre_dim=n, twist=twist)


def witness_to_json(witness, group) -> dict:
    return {group.element_key(g): matrix_to_json(a) for g, a in witness.members.items()}


def witness_from_json(data, group):
    from .equivalence import TwistWitness

    _require(isinstance(data, dict), "witness must map element keys to matrices")
    members = {}
    for key, mat in data.items():
        members[group.element_from_key(key)] = matrix_from_json(mat)
    return TwistWitness(members=members)


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise SpecParseError("non-finite float in canonical output")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def _emit(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            if not isinstance(key, str):
                raise SpecParseError("canonical output requires string keys")
            out.append(json.dumps(key))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    else:
        raise SpecParseError(f"cannot serialize {type(obj).__name__} canonically")


def dumps_canonical(obj) -> str:
    """Deterministic JSON: sorted keys, fixed float formatting, no whitespace."""
    out = []
    _emit(obj, out)
    return "".join(out)
