"""Exhaustive subgroup enumeration for small symmetric groups.

Supports the exhaustive desk-scale test families: every subgroup of S_n for
n <= 6, enumerated through the Cayley table of S_n with a product-closure
kernel.  The lattice is built bottom-up and up to conjugacy: cyclic
subgroups first, then joins <H, g> from each stored class representative,
with g ranging over double-coset representatives HgH (joining with another
element of the same double coset yields the same subgroup, so the dedup is
lossless).  Completeness: a maximal subgroup M of any target U has smaller
order, so some conjugate of M is a stored representative, and joining it
with any element of the matching conjugate of U outside M reaches that
conjugate; expanding conjugation orbits at the end recovers every subgroup.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import subgroup_closure

__all__ = ["SubgroupRecord", "all_subgroups", "symmetric_group_table"]


@dataclass(frozen=True)
class SubgroupRecord:
    """A subgroup of S_n: sorted element tuples plus a small generating set."""

    degree: int
    elements: tuple        # tuple of image tuples, sorted
    generators: tuple      # tuple of image tuples

    @property
    def order(self) -> int:
        return len(self.elements)


@lru_cache(maxsize=None)
def symmetric_group_table(n: int):
    """Permutations of S_n in lexicographic order plus the Cayley table.

    Returns (perms, table, inverse) with table[i, j] the index of
    perms[i] o perms[j], where (p o q)(x) = p[q[x]], and inverse[i] the
    index of perms[i]^-1.
    """
    perms = list(itertools.permutations(range(n)))
    size = len(perms)
    parr = np.array(perms, dtype=np.int64)
    powers = n ** np.arange(n - 1, -1, -1, dtype=np.int64)
    codes = parr @ powers
    code_to_index = np.full(int(n ** n), -1, dtype=np.int32)
    code_to_index[codes] = np.arange(size, dtype=np.int32)
    table = np.empty((size, size), dtype=np.int32)
    for i in range(size):
        composed = parr[i][parr]           # rows: perms[i] o perms[j]
        table[i] = code_to_index[composed @ powers]
    identity_index = int(code_to_index[np.arange(n, dtype=np.int64) @ powers])
    inverse = np.argmax(table == identity_index, axis=1).astype(np.int32)
    return tuple(perms), table, inverse


def _closure(table, seed, size):
    membership = np.zeros(size, dtype=np.bool_)
    elems = np.empty(size, dtype=np.int32)
    count = subgroup_closure(table, np.asarray(seed, dtype=np.int32), membership, elems, 0)
    return np.sort(elems[:count].copy())


def _conjugates(table, inverse, members):
    """All conjugates c H c^-1 as rows of sorted index arrays."""
    moved = table[:, members]                    # rows: c * h
    conj = table[moved, inverse[:, None]]        # rows: (c * h) * c^-1
    conj.sort(axis=1)
    return conj


@lru_cache(maxsize=8)
def all_subgroups(n: int):
    """Every subgroup of S_n (n <= 6), sorted by (order, element list).

    The counts are pinned by the test suite against an independent
    closure-property audit and the small-n brute-force enumeration.
    """
    if n < 1 or n > 6:
        raise ValueError("subgroup enumeration supported for 1 <= n <= 6")
    perms, table, inverse = symmetric_group_table(n)
    size = len(perms)
    identity_index = perms.index(tuple(range(n)))

    known = set()          # bytes keys of every conjugate of every found class
    class_list = []        # (rep members, rep generators, conjugate rows)

    def record(members, gens) -> bool:
        key = members.tobytes()
        if key in known:
            return False
        conj = _conjugates(table, inverse, members)
        orbit = {}
        for c in range(size):
            k = conj[c].tobytes()
            if k not in orbit:
                orbit[k] = c
        known.update(orbit)
        reps = sorted(orbit.values())
        class_list.append((members, tuple(gens), [(c, conj[c]) for c in reps]))
        return True

    worklist = []
    for g in range(size):
        members = _closure(table, [identity_index, g], size)
        if record(members, [g] if g != identity_index else []):
            worklist.append(len(class_list) - 1)

    head = 0
    while head < len(worklist):
        members, gens, _ = class_list[worklist[head]]
        head += 1
        if len(members) == size:
            continue
        covered = np.zeros(size, dtype=bool)
        covered[members] = True
        for g in range(size):
            if covered[g]:
                continue
            joined = _closure(table, list(members) + [g], size)
            if record(joined, list(gens) + [g]):
                worklist.append(len(class_list) - 1)
            hg = table[members, g]
            covered[table[np.ix_(hg, members)].ravel()] = True
            covered[hg] = True
            covered[g] = True

    # expand: each class contributes its distinct conjugates, generators
    # transported along the conjugator recorded for each orbit row
    records = []
    for _, gens, orbit_pairs in class_list:
        gen_arr = np.asarray(gens, dtype=np.int32)
        for c, row in orbit_pairs:
            if len(gens):
                moved = table[table[c, gen_arr], inverse[c]]
                gen_perms = tuple(perms[int(x)] for x in moved)
            else:
                gen_perms = (tuple(range(n)),)
            records.append(SubgroupRecord(
                degree=n,
                elements=tuple(perms[int(i)] for i in row),
                generators=gen_perms,
            ))
    records.sort(key=lambda r: (r.order, r.elements))
    return tuple(records)
