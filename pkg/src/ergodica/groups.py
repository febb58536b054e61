"""Finite groups used to index automorphic actions.

Two concrete carriers share one small protocol (`elements`, `identity`,
`compose`, `inverse`, `generators`, `element_key`): products of cyclic groups
(the featured case, always abelian) and explicit permutation groups, which
admit the same averaging and fixed-point machinery even when non-abelian.
Element iteration order is fixed (lexicographic) so that group averages are
reproducible floating point.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

__all__ = ["FiniteAbelianGroup", "PermutationGroup", "cyclic_group"]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups Z_{m_1} x ... x Z_{m_d}.

    Elements are multi-index tuples with componentwise addition mod m_i,
    listed in lexicographic order.
    """

    cyclic_orders: tuple

    def __post_init__(self):
        orders = tuple(int(m) for m in self.cyclic_orders)
        if not orders or any(m < 1 for m in orders):
            raise ValueError("cyclic orders must be positive integers")
        object.__setattr__(self, "cyclic_orders", orders)

    @property
    def elements(self):
        return [tuple(t) for t in itertools.product(*(range(m) for m in self.cyclic_orders))]

    @property
    def identity(self):
        return tuple(0 for _ in self.cyclic_orders)

    @property
    def order(self) -> int:
        return int(np.prod(self.cyclic_orders))

    def compose(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.cyclic_orders))

    def inverse(self, a):
        return tuple((-x) % m for x, m in zip(a, self.cyclic_orders))

    @property
    def generators(self):
        gens = []
        for i, m in enumerate(self.cyclic_orders):
            if m > 1:
                gens.append(tuple(1 if j == i else 0 for j in range(len(self.cyclic_orders))))
        return gens or [self.identity]

    def element_key(self, a) -> str:
        return ",".join(str(x) for x in a)

    def element_from_key(self, key: str):
        parts = tuple(int(x) for x in key.split(","))
        if len(parts) != len(self.cyclic_orders):
            raise ValueError(f"element key {key!r} has wrong arity")
        return tuple(x % m for x, m in zip(parts, self.cyclic_orders))


def cyclic_group(m: int) -> FiniteAbelianGroup:
    return FiniteAbelianGroup((m,))


@dataclass(frozen=True)
class PermutationGroup:
    """A finite group of permutations given by its full element set.

    Elements are image tuples; composition is (p o q)(x) = p[q[x]].  The
    element list is kept sorted for deterministic iteration.  `generators`
    default to the whole element list when not supplied.
    """

    degree: int
    elements_tuple: tuple
    generator_tuple: tuple = field(default=None)

    def __post_init__(self):
        elems = tuple(sorted(tuple(p) for p in self.elements_tuple))
        object.__setattr__(self, "elements_tuple", elems)
        if self.generator_tuple is None:
            object.__setattr__(self, "generator_tuple", elems)
        else:
            object.__setattr__(
                self, "generator_tuple", tuple(tuple(p) for p in self.generator_tuple)
            )

    @property
    def elements(self):
        return list(self.elements_tuple)

    @property
    def identity(self):
        return tuple(range(self.degree))

    @property
    def order(self) -> int:
        return len(self.elements_tuple)

    def compose(self, p, q):
        return tuple(p[q[i]] for i in range(self.degree))

    def inverse(self, p):
        inv = [0] * self.degree
        for i, x in enumerate(p):
            inv[x] = i
        return tuple(inv)

    @property
    def generators(self):
        return list(self.generator_tuple)

    def element_key(self, p) -> str:
        return "p:" + ",".join(str(x) for x in p)

    def orbits(self):
        """Orbits of the natural action on {0, ..., degree-1}, sorted."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            orbit = {start}
            frontier = [start]
            while frontier:
                x = frontier.pop()
                for g in self.generator_tuple:
                    y = g[x]
                    if y not in orbit:
                        orbit.add(y)
                        frontier.append(y)
            for x in orbit:
                seen[x] = True
            out.append(tuple(sorted(orbit)))
        return out
