"""Bundles of subspaces, partitions of the data, and the error functionals.

Three errors drive everything:

* ``objective_e`` charges each point to its nearest subspace in the bundle,
* ``gamma`` charges each point to its *assigned* subspace under a partition,
* per-cell best fits (``best_bundle``) minimise gamma for a fixed partition.

``objective_e(F, V) <= gamma(F, P, V)`` always, with equality exactly when
P assigns every point to a nearest subspace (``best_partition``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange
from .spectral import RANK_TOL
from .subspace import DataSet, best_fit_subspace, residuals_sq, total_error


@dataclass(frozen=True)
class Bundle:
    """An ordered sequence of subspaces with a shared ambient dimension."""

    subspaces: tuple

    def __post_init__(self):
        subs = tuple(self.subspaces)
        if len(subs) < 1:
            raise DimensionMismatch("a bundle needs at least one subspace")
        dims = {s.ambient_dim for s in subs}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed ambient dimensions in bundle: {sorted(dims)}")
        object.__setattr__(self, "subspaces", subs)

    def __len__(self):
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __getitem__(self, i):
        return self.subspaces[i]

    @property
    def ambient_dim(self):
        return self.subspaces[0].ambient_dim


@dataclass(frozen=True)
class Partition:
    """Assignment of each of m points to one of ``num_cells`` cells (0-based).

    Cells may be empty; disjointness and coverage are automatic from the
    index-vector representation.
    """

    assignment: np.ndarray
    num_cells: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.intp).copy()
        if a.ndim != 1:
            raise DimensionMismatch("assignment must be a flat index vector")
        if self.num_cells < 1:
            raise IndexOutOfRange("num_cells must be >= 1")
        if a.size and (a.min() < 0 or a.max() >= self.num_cells):
            raise IndexOutOfRange(
                f"assignment entries must lie in [0, {self.num_cells})"
            )
        a.flags.writeable = False
        object.__setattr__(self, "assignment", a)

    @property
    def num_points(self):
        return self.assignment.shape[0]

    def cells(self):
        """Index arrays of the cells, in cell order."""
        return [np.nonzero(self.assignment == i)[0] for i in range(self.num_cells)]


def distance_matrix(dataset: DataSet, bundle: Bundle) -> np.ndarray:
    """(m, l) matrix of squared distances from each point to each subspace."""
    if dataset.m == 0:
        return np.zeros((0, len(bundle)))
    cols = [residuals_sq(dataset, sub) for sub in bundle]
    return np.stack(cols, axis=1)


def objective_e(dataset: DataSet, bundle: Bundle) -> float:
    """Sum over points of the squared distance to the nearest bundle member."""
    if dataset.m == 0:
        return 0.0
    return float(distance_matrix(dataset, bundle).min(axis=1).sum())


def gamma(dataset: DataSet, partition: Partition, bundle: Bundle) -> float:
    """Sum over cells of the fitting error of each cell to its own subspace."""
    if partition.num_points != dataset.m:
        raise DimensionMismatch(
            f"partition covers {partition.num_points} points, data has {dataset.m}"
        )
    if partition.num_cells != len(bundle):
        raise DimensionMismatch(
            f"partition has {partition.num_cells} cells, bundle has {len(bundle)}"
        )
    out = 0.0
    for idx, sub in zip(partition.cells(), bundle):
        if idx.size:
            out += total_error(dataset.subset(idx), sub)
    return out


def best_partition(dataset: DataSet, bundle: Bundle) -> Partition:
    """Assign every point to a nearest subspace; ties go to the lowest index.

    Distances are compared as exact floating squared values (no tolerance
    band), so the tie rule fires only on exact equality.
    """
    dmat = distance_matrix(dataset, bundle)
    assignment = dmat.argmin(axis=1) if dataset.m else np.zeros(0, dtype=np.intp)
    return Partition(assignment, len(bundle))


def fit_partition(dataset: DataSet, partition: Partition, n, rank_tol=RANK_TOL):
    """Best-fit each cell; returns (Bundle, per-cell errors, degeneracy flags).

    Empty cells map to the zero subspace with error 0.
    """
    if partition.num_points != dataset.m:
        raise DimensionMismatch(
            f"partition covers {partition.num_points} points, data has {dataset.m}"
        )
    subs, errors, flags = [], [], []
    for idx in partition.cells():
        fit = best_fit_subspace(dataset.subset(idx), n, rank_tol)
        subs.append(fit.subspace)
        errors.append(fit.error)
        flags.append(fit.degenerate)
    return Bundle(tuple(subs)), np.array(errors), flags


def best_bundle(dataset: DataSet, partition: Partition, n) -> Bundle:
    """The bundle minimising gamma for the given partition (cellwise best fits)."""
    bundle, _, _ = fit_partition(dataset, partition, n)
    return bundle
