"""Agglomerative hierarchical clustering and clustering diagrams.

Four linkages are supported: single, average, complete, and Ward.
Inter-cluster distances follow the Lance-Williams recurrences; Ward
operates on squared Euclidean distances and reports square-root merge
heights, matching the dominant toolkit convention.  The naive O(n^3)
scan is fine at sampled-cloud sizes (tens to a few hundred points); the
inner loops are numba-compiled because the experiment pipeline runs
millions of dendrograms.

Merge records use the familiar labeling: original points are clusters
0..n-1 and the cluster created at step t gets label n+t.  Ties in the
closest-pair search break toward the lexicographically smallest
(label_a, label_b) pair, which makes runs reproducible; the merge-height
multiset, the only thing consumed downstream, is tie-invariant anyway.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import TooFewPoints

METHODS = ("single", "average", "complete", "ward")
_METHOD_ID = {name: i for i, name in enumerate(METHODS)}


@dataclass(frozen=True)
class Dendrogram:
    """Merge record: (n-1, 4) array of [label_a, label_b, height, new_size]."""

    merges: np.ndarray

    @property
    def n_points(self) -> int:
        return self.merges.shape[0] + 1

    @property
    def heights(self) -> np.ndarray:
        return self.merges[:, 2]

    def to_jsonable(self) -> list:
        return [[int(a), int(b), float(h), int(s)] for a, b, h, s in self.merges]


def pairwise_distances(cloud: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix, exactly symmetric with zero diagonal."""
    cloud = np.asarray(cloud, dtype=np.float64)
    if cloud.shape[0] < 2:
        raise TooFewPoints(f"need at least 2 points, got {cloud.shape[0]}")
    diff = cloud[:, None, :] - cloud[None, :, :]
    dm = np.sqrt((diff * diff).sum(axis=2))
    # symmetrize bit-exactly; sqrt of identical sums already matches, but
    # keep the guarantee independent of BLAS quirks
    dm = np.triu(dm, 1)
    dm = dm + dm.T
    return dm


@njit(cache=True)
def _lw_linkage(dm: np.ndarray, method: int) -> np.ndarray:
    """Lance-Williams agglomeration. method: 0 single, 1 average, 2 complete, 3 ward."""
    n = dm.shape[0]
    D = dm.copy()
    if method == 3:
        for i in range(n):
            for j in range(n):
                D[i, j] = D[i, j] * D[i, j]
    label = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.float64)
    active = np.ones(n, dtype=np.bool_)
    merges = np.empty((n - 1, 4), dtype=np.float64)

    for step in range(n - 1):
        best = np.inf
        bi = -1
        bj = -1
        bl0 = -1
        bl1 = -1
        for i in range(n):
            if not active[i]:
                continue
            for j in range(i + 1, n):
                if not active[j]:
                    continue
                d = D[i, j]
                if d > best:
                    continue
                if label[i] < label[j]:
                    l0, l1 = label[i], label[j]
                else:
                    l0, l1 = label[j], label[i]
                if d < best or l0 < bl0 or (l0 == bl0 and l1 < bl1):
                    best = d
                    bi, bj = i, j
                    bl0, bl1 = l0, l1
        ni = size[bi]
        nj = size[bj]
        if method == 3:
            merges[step, 2] = np.sqrt(best)
        else:
            merges[step, 2] = best
        merges[step, 0] = bl0
        merges[step, 1] = bl1
        merges[step, 3] = ni + nj
        for k in range(n):
            if not active[k] or k == bi or k == bj:
                continue
            dki = D[bi, k]
            dkj = D[bj, k]
            if method == 0:
                nd = dki if dki < dkj else dkj
            elif method == 1:
                nd = (ni * dki + nj * dkj) / (ni + nj)
            elif method == 2:
                nd = dki if dki > dkj else dkj
            else:
                nk = size[k]
                nd = ((ni + nk) * dki + (nj + nk) * dkj - nk * best) / (ni + nj + nk)
            D[bi, k] = nd
            D[k, bi] = nd
        active[bj] = False
        size[bi] = ni + nj
        label[bi] = n + step
    return merges


def linkage(dm: np.ndarray, method: str) -> Dendrogram:
    """Agglomerate a distance matrix under the given linkage rule."""
    if method not in _METHOD_ID:
        raise ValueError(f"unknown linkage {method!r}; expected one of {METHODS}")
    dm = np.asarray(dm, dtype=np.float64)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1] or dm.shape[0] < 2:
        raise TooFewPoints("distance matrix must be square with n >= 2")
    return Dendrogram(_lw_linkage(dm, _METHOD_ID[method]))


def clustering_diagram(dend: Dendrogram) -> np.ndarray:
    """Multiset of merge heights (deaths of birth-0 diagram points), sorted ascending."""
    return np.sort(dend.heights)
