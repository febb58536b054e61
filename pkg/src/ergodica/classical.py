"""Finite measure-preserving dynamics as an exact oracle, plus the diagonal
bridge into the operator-algebra modules.

Points are 0..n-1; maps are either permutations of the point set or the
integer shift x -> x+1 acting on finitely supported subsets of Z (kept lazy
so disjointness certificates are exact, never window artifacts).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .actions import AutomorphicAction, action_from_unitaries, permutation_matrix
from .algebra import diagonal_algebra
from .errors import DimensionMismatchError, NotInvariantMeasureError
from .groups import FiniteAbelianGroup
from .states import StateFunctional, state_from_density

__all__ = [
    "FiniteProbabilitySpace",
    "PermutationMap",
    "IntegerShift",
    "Partition",
    "partition_entropy",
    "is_invariant_measure",
    "is_ergodic_transformation",
    "is_extreme_invariant_measure",
    "invariant_measure_split",
    "permutation_group_closure",
    "hopf_equivalent_sets",
    "wandering_set_search",
    "diagonal_embedding",
    "set_projection",
]


@dataclass(frozen=True)
class FiniteProbabilitySpace:
    """Finite point set with nonnegative weights summing to 1."""

    weights: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if any(x < -1e-12 for x in w):
            raise NotInvariantMeasureError("weights must be nonnegative")
        if abs(sum(w) - 1.0) > 1e-12:
            raise NotInvariantMeasureError(f"weights sum to {sum(w)}, not 1")
        object.__setattr__(self, "weights", w)

    @property
    def num_points(self) -> int:
        return len(self.weights)

    def measure(self, subset) -> float:
        return float(sum(self.weights[i] for i in subset))

    @property
    def support(self):
        return frozenset(i for i, w in enumerate(self.weights) if w > 1e-12)


@dataclass(frozen=True)
class PermutationMap:
    """A permutation of 0..n-1 given by its image tuple."""

    images: tuple

    def __post_init__(self):
        imgs = tuple(int(x) for x in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise DimensionMismatchError("images do not form a permutation")
        object.__setattr__(self, "images", imgs)

    @property
    def num_points(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def apply_set(self, subset):
        return frozenset(self.images[i] for i in subset)

    def inverse(self) -> "PermutationMap":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return PermutationMap(tuple(inv))

    def cycles(self):
        """Cycle decomposition; each cycle sorted by first (smallest) entry."""
        seen = [False] * self.num_points
        out = []
        for start in range(self.num_points):
            if seen[start]:
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    @property
    def order(self) -> int:
        return int(np.lcm.reduce([len(c) for c in self.cycles()]))


class IntegerShift:
    """The shift x -> x+1 on finitely supported subsets of the integers."""

    def apply_set(self, subset, steps: int = 1):
        return frozenset(x + steps for x in subset)


@dataclass(frozen=True)
class Partition:
    """Disjoint blocks covering the support of a finite probability space."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        seen = set()
        for b in blocks:
            if b & seen:
                raise DimensionMismatchError("partition blocks are not disjoint")
            seen |= b
        object.__setattr__(self, "blocks", blocks)

    def covers(self, points):
        union = set()
        for b in self.blocks:
            union |= b
        return set(points) <= union


def partition_entropy(p: Partition, mu: FiniteProbabilitySpace) -> float:
    """-sum mu(A_j) ln mu(A_j) with the 0 ln 0 = 0 convention."""
    if not p.covers(mu.support):
        raise DimensionMismatchError("partition does not cover the support")
    total = 0.0
    for block in p.blocks:
        m = mu.measure(block)
        if m > 0.0:
            total -= m * np.log(m)
    return total


def is_invariant_measure(mu: FiniteProbabilitySpace, t: PermutationMap) -> bool:
    w = mu.weights
    return all(abs(w[t(i)] - w[i]) <= 1e-12 for i in range(mu.num_points))


def is_ergodic_transformation(t: PermutationMap, mu: FiniteProbabilitySpace):
    """Ergodicity of a measure-preserving permutation; witness on failure.

    The invariant subsets are exactly unions of cycles, so the map is
    ergodic iff the support of mu is a single cycle.  Returns
    (verdict, witness) with the witness a nontrivial invariant subset.
    """
    if mu.num_points != t.num_points:
        raise DimensionMismatchError("measure and map have different point counts")
    if not is_invariant_measure(mu, t):
        raise NotInvariantMeasureError("measure is not invariant under the map")
    support = mu.support
    cycles_hit = [set(c) for c in t.cycles() if set(c) & support]
    if len(cycles_hit) == 1 and support == frozenset().union(*cycles_hit):
        return True, None
    witness = frozenset(cycles_hit[0]) & support if cycles_hit else frozenset()
    if not witness or mu.measure(witness) >= 1.0 - 1e-12:
        # support strictly inside one cycle cannot happen for invariant mu;
        # the degenerate empty-support case is non-ergodic with empty witness
        witness = frozenset(cycles_hit[0]) if cycles_hit else frozenset()
    return False, witness


def is_extreme_invariant_measure(mu: FiniteProbabilitySpace, t: PermutationMap) -> bool:
    """Whether mu is a vertex of the invariant-measure polytope.

    The polytope of T-invariant probability measures of a permutation is a
    simplex whose vertices are the uniform measures on single cycles; mu is
    extreme iff it is uniform on exactly one cycle.
    """
    if not is_invariant_measure(mu, t):
        raise NotInvariantMeasureError("measure is not invariant under the map")
    support = mu.support
    hit = [c for c in t.cycles() if set(c) & support]
    if len(hit) != 1:
        return False
    cyc = hit[0]
    target = 1.0 / len(cyc)
    return all(abs(mu.weights[i] - target) <= 1e-12 for i in cyc)


def invariant_measure_split(mu: FiniteProbabilitySpace, t: PermutationMap):
    """Proper convex split of a non-extreme invariant measure, or None.

    Splits along an invariant set of measure strictly between 0 and 1,
    mirroring the conditional-measure construction mu_1 = mu(. n E)/mu(E)."""
    if is_extreme_invariant_measure(mu, t):
        return None
    cycles = [set(c) for c in t.cycles() if mu.measure(c) > 1e-12]
    if len(cycles) >= 2:
        e = cycles[0]
    else:
        # single-cycle support with non-uniform weights cannot be invariant,
        # so reaching here means the measure is supported on one cycle but
        # fails uniformity; no invariant split exists at the set level
        return None
    lam = mu.measure(e)
    w1 = [w / lam if i in e else 0.0 for i, w in enumerate(mu.weights)]
    w2 = [w / (1 - lam) if i not in e else 0.0 for i, w in enumerate(mu.weights)]
    return lam, FiniteProbabilitySpace(tuple(w1)), FiniteProbabilitySpace(tuple(w2))


def permutation_group_closure(generators):
    """All elements of the permutation group generated by the given maps."""
    gens = [tuple(g.images if isinstance(g, PermutationMap) else g) for g in generators]
    if not gens:
        raise DimensionMismatchError("need at least one generator")
    n = len(gens[0])
    ident = tuple(range(n))
    found = {ident}
    frontier = [ident]
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = tuple(g[p[i]] for i in range(n))
            if q not in found:
                found.add(q)
                frontier.append(q)
    return sorted(found)


@dataclass
class HopfWitness:
    """Pieces of H and the group elements carrying them onto a partition of K."""

    pieces: list  # list of (frozenset piece, permutation tuple)

    def image_sets(self):
        return [frozenset(g[i] for i in piece) for piece, g in self.pieces]


def hopf_equivalent_sets(h_set, k_set, group, mu: FiniteProbabilitySpace = None):
    """Equivalence of two subsets through an orthogonal family of transported pieces.

    `group` is a list of permutations (image tuples or PermutationMap) assumed
    closed under composition.  Points can be matched only within group orbits,
    and within an orbit the bipartite matching is complete, so a perfect
    matching exists iff |H| and |K| meet every orbit in equal counts; the
    witness pairs each matched point with the lexicographically first group
    element carrying it, merged into per-element pieces.
    """
    perms = [tuple(g.images if isinstance(g, PermutationMap) else g) for g in group]
    n = len(perms[0])
    h_set = frozenset(int(i) for i in h_set)
    k_set = frozenset(int(i) for i in k_set)
    if not (h_set <= set(range(n)) and k_set <= set(range(n))):
        raise DimensionMismatchError("subsets exceed the point set")
    if mu is not None and mu.num_points != n:
        raise DimensionMismatchError("measure has wrong point count")
    orbit_of = {}
    for orbit in _orbits_of(perms, n):
        for x in orbit:
            orbit_of[x] = orbit
    matches = []
    for orbit in _orbits_of(perms, n):
        hs = sorted(x for x in h_set if x in orbit)
        ks = sorted(x for x in k_set if x in orbit)
        if len(hs) != len(ks):
            return None
        matches.extend(zip(hs, ks))
    if len(matches) != len(h_set):
        return None
    by_element = {}
    for x, y in matches:
        g = next(p for p in sorted(perms) if p[x] == y)
        by_element.setdefault(g, set()).add(x)
    pieces = [(frozenset(piece), g) for g, piece in sorted(by_element.items())]
    return HopfWitness(pieces=pieces)


def _orbits_of(perms, n):
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for p in perms:
                y = p[x]
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        for x in orbit:
            seen[x] = True
        out.append(frozenset(orbit))
    return out


@dataclass
class WanderingSetCertificate:
    base_set: frozenset
    shifts: list
    images: list


def wandering_set_search(t, s, k: int):
    """Disjointness certificate for the wandering-set property.

    Shift case: spacing diam(S)+1 separates k translates of any finite
    nonempty S, so a certificate always exists.  Permutation case: orbits
    recur (the images of S cycle with finite period), so no infinite family
    of pairwise-disjoint images exists and the search returns None.
    """
    s = frozenset(int(x) for x in s)
    if not s:
        return None
    if isinstance(t, IntegerShift):
        spacing = max(s) - min(s) + 1
        shifts = [j * spacing for j in range(k)]
        images = [t.apply_set(s, d) for d in shifts]
        for a, b in itertools.combinations(images, 2):
            if a & b:
                raise RuntimeError("spacing certificate failed")  # unreachable
        return WanderingSetCertificate(base_set=s, shifts=shifts, images=images)
    if isinstance(t, PermutationMap):
        return None
    raise DimensionMismatchError(f"unsupported map type {type(t)!r}")


def set_projection(subset, n: int) -> np.ndarray:
    """Diagonal projection with 1 at the points of the subset."""
    d = np.zeros(n)
    for i in subset:
        d[int(i)] = 1.0
    return np.diag(d).astype(np.complex128)


def diagonal_embedding(space: FiniteProbabilitySpace, t: PermutationMap):
    """Embed a permutation system as a diagonal algebra with a shift action.

    Returns (algebra, action, state): the diagonal algebra on C^n, the
    cyclic group action generated by the permutation matrix, and the state
    with density diag(weights).  Subsets correspond to diagonal projections
    via `set_projection`; classical and operator-algebra verdicts agree on
    the image, which the test suite exercises.
    """
    n = t.num_points
    if space.num_points != n:
        raise DimensionMismatchError("space and permutation sizes differ")
    alg = diagonal_algebra(n)
    order = t.order
    group = FiniteAbelianGroup((order,))
    p = permutation_matrix(t.images)
    unitaries = {}
    acc = np.eye(n, dtype=np.complex128)
    for j in range(order):
        unitaries[(j,)] = acc
        acc = p @ acc
    action = action_from_unitaries(group, alg, unitaries, check="light")
    state = state_from_density(alg, np.diag(np.array(space.weights, dtype=np.complex128)))
    return alg, action, state
