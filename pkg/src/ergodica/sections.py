"""Lattices of matrix fibres and their translation actions.

A periodic lattice Z_{m_1} x ... x Z_{m_d} carries one full matrix factor
M_n per site; the sections algebra is the block-diagonal direct sum acting
on the orthogonal sum of the fibres, with per-site central projections, and
translations act by permuting the site blocks.  An optional per-site gauge
twist u_x modifies the transport: hopping from site s to site s+t applies
u_{s+t} u_s (twist of the source on leaving, twist of the destination on
arriving), so a translation of order m is an automorphism of that order
exactly when the accumulated twists around each orbit act trivially; the
homomorphism property is verified numerically and violations are rejected.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .actions import AutomorphicAction, action_from_unitaries
from .algebra import OperatorAlgebra, block_algebra
from .errors import (
    DimensionMismatchError,
    DimensionOverflowError,
    NotInvariantError,
    TwistIncompatibleError,
)
from .groups import FiniteAbelianGroup
from .numerics import DEFAULT_TOL, ToleranceConfig, dagger, max_abs

__all__ = [
    "LatticePatch",
    "FibreSpec",
    "SectionsAlgebra",
    "build_sections_algebra",
    "translation_action",
]

DEFAULT_DIM_CAP = 96


@dataclass(frozen=True)
class LatticePatch:
    """Periodic lattice with the given cyclic orders per direction."""

    orders: tuple

    def __post_init__(self):
        orders = tuple(int(m) for m in self.orders)
        if not orders or any(m < 1 for m in orders):
            raise DimensionMismatchError("lattice orders must be positive")
        object.__setattr__(self, "orders", orders)

    @property
    def sites(self):
        return [tuple(s) for s in itertools.product(*(range(m) for m in self.orders))]

    @property
    def num_sites(self) -> int:
        return int(np.prod(self.orders))

    @property
    def translation_group(self) -> FiniteAbelianGroup:
        return FiniteAbelianGroup(self.orders)

    def translate(self, site, t):
        return tuple((s + d) % m for s, d, m in zip(site, t, self.orders))


@dataclass(frozen=True)
class FibreSpec:
    """Uniform fibre dimension with an optional per-site gauge twist."""

    fibre_dim: int
    twist: dict = None  # site tuple -> unitary on the fibre

    def twist_at(self, site) -> np.ndarray:
        if self.twist is None or site not in self.twist:
            return np.eye(self.fibre_dim, dtype=np.complex128)
        return np.asarray(self.twist[site], dtype=np.complex128)


@dataclass
class SectionsAlgebra:
    """Block-diagonal sum of one matrix fibre per lattice site."""

    patch: LatticePatch
    fibre: FibreSpec
    algebra: OperatorAlgebra
    site_projections: dict

    @property
    def ambient_dim(self) -> int:
        return self.algebra.ambient_dim

    def site_offset(self, site) -> int:
        return self.patch.sites.index(site) * self.fibre.fibre_dim


def build_sections_algebra(patch: LatticePatch, fibre: FibreSpec,
                           dim_cap: int = DEFAULT_DIM_CAP,
                           tol: ToleranceConfig = DEFAULT_TOL) -> SectionsAlgebra:
    """One M_n block per site, with site projections spanning the center."""
    n = fibre.fibre_dim
    total = patch.num_sites * n
    if total > dim_cap:
        raise DimensionOverflowError(f"sections dimension {total} exceeds the cap {dim_cap}")
    alg = block_algebra([(n, 1)] * patch.num_sites, tol)
    site_projections = {}
    for idx, site in enumerate(patch.sites):
        p = np.zeros((total, total), dtype=np.complex128)
        p[idx * n:(idx + 1) * n, idx * n:(idx + 1) * n] = np.eye(n)
        site_projections[site] = p
    if fibre.twist is not None:
        for site, u in fibre.twist.items():
            u = np.asarray(u, dtype=np.complex128)
            if u.shape != (n, n):
                raise DimensionMismatchError(f"twist at {site} has shape {u.shape}")
            if max_abs(dagger(u) @ u - np.eye(n)) > 100 * tol.atol:
                raise TwistIncompatibleError(f"twist at {site} is not unitary")
    return SectionsAlgebra(patch=patch, fibre=fibre, algebra=alg,
                           site_projections=site_projections)


def translation_action(sa: SectionsAlgebra,
                       tol: ToleranceConfig = DEFAULT_TOL) -> AutomorphicAction:
    """Lattice translations acting on the sections algebra.

    The unitary for translation t carries the fibre at site s onto site
    s+t with transport factor u_{s+t} u_s.  Without a twist this is the
    plain site permutation.  The resulting family must compose as a group
    homomorphism of automorphisms; incompatible twists (an orbit whose
    accumulated twist is not scalar) are rejected with
    TwistIncompatibleError.
    """
    patch = sa.patch
    n = sa.fibre.fibre_dim
    total = sa.ambient_dim
    sites = patch.sites
    index = {s: i for i, s in enumerate(sites)}
    group = patch.translation_group
    unitaries = {}
    for t in group.elements:
        w = np.zeros((total, total), dtype=np.complex128)
        for s in sites:
            src = index[s]
            dst_site = patch.translate(s, t)
            dst = index[dst_site]
            transport = sa.fibre.twist_at(dst_site) @ sa.fibre.twist_at(s)
            w[dst * n:(dst + 1) * n, src * n:(src + 1) * n] = transport
        unitaries[t] = w
    try:
        action = action_from_unitaries(group, sa.algebra, unitaries, tol, check="full")
    except NotInvariantError as exc:
        raise TwistIncompatibleError(
            f"twist breaks the translation homomorphism: {exc}"
        ) from exc
    _check_site_permutation(action, sa, tol)
    return action


def _check_site_permutation(action: AutomorphicAction, sa: SectionsAlgebra,
                            tol: ToleranceConfig):
    """Translations must permute the site projections exactly like the lattice."""
    for t in action.group.elements:
        for site, p in sa.site_projections.items():
            expected = sa.site_projections[sa.patch.translate(site, t)]
            if max_abs(action.apply(t, p) - expected) > 100 * tol.atol:
                raise TwistIncompatibleError(
                    "translation does not permute the site projections"
                )
