"""Multi-landmark, multi-resolution point sampling.

Samples reflect the distribution of distances from the cloud to a
landmark: distances are histogrammed into equal-width bins over
[0, max distance], and each non-empty bin of size s contributes
ceil(s/k) points drawn uniformly without replacement, so coarser
resolutions (larger k) keep fewer points while every populated distance
shell stays represented.

The default configuration pairs 9 grid landmarks with resolutions
k = 2..6, i.e. 45 sampling settings, and draws n instances per setting.
Instance seeds derive from the master seed by a counter scheme
(setting_index * n_instances + instance_index) so any instance can be
regenerated in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyCloud

DEFAULT_RESOLUTIONS = (2, 3, 4, 5, 6)
DEFAULT_BINS = 10


@dataclass(frozen=True)
class SamplingSetting:
    landmark_index: int
    resolution_k: int


@dataclass(frozen=True)
class SampleSet:
    """Sampled clouds per setting: samples[setting_index][instance] -> (m, 2) array."""

    settings: tuple
    samples: tuple  # tuple of tuples of arrays
    master_seed: int
    n_instances: int

    def to_jsonable(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "n_instances": self.n_instances,
            "settings": [
                {
                    "landmark_index": s.landmark_index,
                    "resolution_k": s.resolution_k,
                    "instances": [[[float(x), float(y)] for x, y in inst] for inst in insts],
                }
                for s, insts in zip(self.settings, self.samples)
            ],
        }


def landmark_grid() -> np.ndarray:
    """The 3x3 reference grid at {4.5, 13.5, 22.5}^2, row-major order."""
    coords = (4.5, 13.5, 22.5)
    return np.array([(x, y) for y in coords for x in coords], dtype=np.float64)


def sample_at_resolution(cloud: np.ndarray, landmark, k: int, bins: int = DEFAULT_BINS, seed=0) -> np.ndarray:
    """Draw ceil(s/k) points per non-empty distance bin, without replacement.

    Distances to the landmark are binned into `bins` equal-width bins
    over [0, max distance]; a degenerate cloud (all points equidistant
    from the landmark) occupies a single bin.  The draw is deterministic
    given `seed` and the result preserves source order.
    """
    cloud = np.asarray(cloud, dtype=np.float64)
    if cloud.shape[0] == 0:
        raise EmptyCloud("cannot sample an empty cloud")
    if k < 1:
        raise ValueError("resolution k must be >= 1")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    lm = np.asarray(landmark, dtype=np.float64)
    dist = np.hypot(cloud[:, 0] - lm[0], cloud[:, 1] - lm[1])
    dmax = dist.max()
    if dmax == 0.0:
        which = np.zeros(dist.size, dtype=np.int64)
    else:
        which = np.minimum((dist / dmax * bins).astype(np.int64), bins - 1)
    rng = np.random.default_rng(seed)
    chosen = []
    for b in range(bins):
        members = np.nonzero(which == b)[0]
        if members.size == 0:
            continue
        take = -(-members.size // k)  # ceil
        chosen.append(rng.choice(members, size=take, replace=False))
    sel = np.sort(np.concatenate(chosen))
    return cloud[sel]


def instance_seed(master_seed: int, setting_index: int, n_instances: int, instance_index: int):
    """Counter-scheme seed: SeedSequence([master, setting*n + instance])."""
    counter = setting_index * n_instances + instance_index
    return np.random.SeedSequence([master_seed, counter])


def generate_sample_set(
    cloud: np.ndarray,
    landmarks: np.ndarray | None = None,
    resolutions=DEFAULT_RESOLUTIONS,
    n_instances: int = 30,
    master_seed: int = 0,
    bins: int = DEFAULT_BINS,
) -> SampleSet:
    """All (landmark, resolution) settings x n_instances sampled clouds."""
    cloud = np.asarray(cloud, dtype=np.float64)
    if cloud.shape[0] < 2:
        raise EmptyCloud(f"need at least 2 points to sample, got {cloud.shape[0]}")
    if landmarks is None:
        landmarks = landmark_grid()
    settings = []
    all_samples = []
    for li, lm in enumerate(landmarks):
        for ri, k in enumerate(resolutions):
            sidx = li * len(resolutions) + ri
            insts = tuple(
                sample_at_resolution(
                    cloud, lm, k, bins=bins,
                    seed=instance_seed(master_seed, sidx, n_instances, ii),
                )
                for ii in range(n_instances)
            )
            settings.append(SamplingSetting(li, k))
            all_samples.append(insts)
    return SampleSet(tuple(settings), tuple(all_samples), master_seed, n_instances)
