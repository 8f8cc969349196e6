"""Uniform grids, horizon families and boundary regions."""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, EmptyFamilyError

_RATIO_TOL = 1e-9


@dataclass(frozen=True)
class NodeSet:
    """Cell-centred nodes of a uniform grid.

    ``cross_section`` is the bar area A in 1D, the thickness b in 2D and 1 in
    3D, so that every node carries ``volume = cross_section * spacing**dim``.
    """

    dim: int
    positions: np.ndarray
    volumes: np.ndarray
    spacing: float
    counts: tuple
    cross_section: float = 1.0
    indices: np.ndarray = field(repr=False, default=None)

    @property
    def n_nodes(self):
        return self.positions.shape[0]

    @property
    def n_dof(self):
        return self.positions.size

    def node_id(self, *grid_index):
        """Flat node id of an integer grid index (C order, first axis slowest)."""
        return int(np.ravel_multi_index(grid_index, self.counts))


def build_grid(dim, extents, spacing, cross_section=1.0):
    """Uniform cell-centred grid on ``[0, extent_i]`` along every axis."""
    if dim not in (1, 2, 3):
        raise ConfigurationError(f"dim must be 1, 2 or 3, got {dim}")
    extents = tuple(float(e) for e in np.atleast_1d(extents))
    if len(extents) != dim:
        raise ConfigurationError(f"expected {dim} extents, got {len(extents)}")
    if spacing <= 0:
        raise ConfigurationError("grid spacing must be positive")
    counts = []
    for e in extents:
        ratio = e / spacing
        n = round(ratio)
        if n < 1 or abs(ratio - n) > _RATIO_TOL * max(1.0, ratio):
            raise ConfigurationError(
                f"extent {e} is not a positive integer multiple of spacing {spacing}"
            )
        counts.append(n)
    counts = tuple(counts)
    idx = np.array(list(np.ndindex(*counts)), dtype=np.int64).reshape(-1, dim)
    positions = (idx + 0.5) * spacing
    volume = cross_section * spacing**dim
    volumes = np.full(idx.shape[0], volume)
    return NodeSet(dim, positions, volumes, float(spacing), counts, float(cross_section), idx)


@dataclass(frozen=True)
class InfluenceSpec:
    """Spherical influence function.

    ``kind='step'`` is 1 inside the horizon; ``kind='user'`` evaluates
    ``function(r / horizon)`` for ``0 < r <= horizon``.
    """

    horizon: float
    kind: str = "step"
    function: object = None

    def __post_init__(self):
        if self.horizon <= 0:
            raise ConfigurationError("horizon must be positive")
        if self.kind not in ("step", "user"):
            raise ConfigurationError(f"unknown influence kind {self.kind!r}")
        if self.kind == "user" and not callable(self.function):
            raise ConfigurationError("user influence needs a callable")

    @classmethod
    def from_grid(cls, n_per_horizon, spacing, kind="step", function=None):
        return cls(n_per_horizon * spacing, kind, function)

    def nodes_per_horizon(self, spacing):
        return self.horizon / spacing

    def weight(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r > 0) & (r <= self.horizon * (1 + 1e-12))
        if self.kind == "step":
            return inside.astype(float)
        w = np.asarray(self.function(r / self.horizon), dtype=float)
        return np.where(inside, w, 0.0)


@dataclass(frozen=True)
class FamilyMap:
    """Bond lists in compressed-row form.

    Bonds of node ``i`` occupy ``offsets[i]:offsets[i+1]``; ``owner`` repeats
    the node id per bond so that vectorised kernels need no loop over nodes.
    """

    offsets: np.ndarray
    owner: np.ndarray
    neighbors: np.ndarray
    xi: np.ndarray
    length: np.ndarray
    omega: np.ndarray
    offset_index: np.ndarray = field(repr=False, default=None)

    @property
    def n_bonds(self):
        return self.neighbors.shape[0]

    @property
    def n_nodes(self):
        return self.offsets.shape[0] - 1

    def family_size(self):
        return np.diff(self.offsets)

    def bonds_of(self, node):
        return slice(self.offsets[node], self.offsets[node + 1])

    def family(self, node):
        """``(neighbor ids, xi, |xi|, omega)`` of one node."""
        s = self.bonds_of(node)
        return self.neighbors[s], self.xi[s], self.length[s], self.omega[s]

    def full_family_nodes(self):
        """Nodes whose family has the maximum (interior) size."""
        size = self.family_size()
        return np.flatnonzero(size == size.max())

    def reverse_bond(self):
        """Index of the bond j->i for every bond i->j."""
        n = self.n_nodes
        key = self.owner.astype(np.int64) * n + self.neighbors
        rkey = self.neighbors.astype(np.int64) * n + self.owner
        order = np.argsort(key)
        pos = np.searchsorted(key[order], rkey)
        return order[pos]


def lattice_offsets(dim, n_per_horizon):
    """Integer offsets ``o != 0`` with ``|o|^2 <= N^2`` in row-major order."""
    limit = math.floor(n_per_horizon**2 + _RATIO_TOL)
    reach = math.floor(n_per_horizon + _RATIO_TOL)
    rng = range(-reach, reach + 1)
    offs = [o for o in itertools.product(rng, repeat=dim) if any(o) and sum(c * c for c in o) <= limit]
    return np.array(offs, dtype=np.int64).reshape(-1, dim)


def build_families(nodes, influence):
    """Neighbour families by direct lattice-offset enumeration."""
    ratio = influence.nodes_per_horizon(nodes.spacing)
    if ratio < 1 - _RATIO_TOL:
        raise EmptyFamilyError(
            f"horizon {influence.horizon} is smaller than grid spacing {nodes.spacing}"
        )
    offs = lattice_offsets(nodes.dim, ratio)
    counts = np.array(nodes.counts)
    idx = nodes.indices
    owners, nbrs, which = [], [], []
    for k, o in enumerate(offs):
        target = idx + o
        ok = np.all((target >= 0) & (target < counts), axis=1)
        src = np.flatnonzero(ok)
        owners.append(src)
        nbrs.append(np.ravel_multi_index(tuple(target[ok].T), nodes.counts))
        which.append(np.full(src.size, k))
    owner = np.concatenate(owners)
    neighbor = np.concatenate(nbrs)
    which = np.concatenate(which)
    order = np.lexsort((which, owner))
    owner, neighbor, which = owner[order], neighbor[order], which[order]
    xi = offs[which] * nodes.spacing
    length = np.linalg.norm(xi, axis=1)
    omega = influence.weight(length)
    offsets = np.zeros(nodes.n_nodes + 1, dtype=np.int64)
    np.add.at(offsets, owner + 1, 1)
    offsets = np.cumsum(offsets)
    return FamilyMap(offsets, owner, neighbor, xi, length, omega, which)


def boundary_region(nodes, axis, side, layers):
    """Ids of the ``layers`` grid planes nearest one face, sorted.

    ``side`` is ``'min'``/``'left'``/``-1`` or ``'max'``/``'right'``/``+1``.
    """
    if layers < 1:
        raise ConfigurationError("boundary region needs at least one layer")
    if not 0 <= axis < nodes.dim:
        raise ConfigurationError(f"axis {axis} out of range for dim {nodes.dim}")
    n_axis = nodes.counts[axis]
    if layers > n_axis:
        raise ConfigurationError(f"{layers} layers exceed {n_axis} grid planes")
    col = nodes.indices[:, axis]
    if side in ("min", "left", -1):
        mask = col < layers
    elif side in ("max", "right", 1):
        mask = col >= n_axis - layers
    else:
        raise ConfigurationError(f"unknown side {side!r}")
    return np.flatnonzero(mask)


def weighted_volume(families, volumes):
    """Per-node ``sum omega dV`` over the family."""
    w = families.omega * volumes[families.neighbors]
    return np.bincount(families.owner, weights=w, minlength=families.n_nodes)
