"""Experiment configuration.

All computational parameters live in one frozen dataclass; its
canonical JSON (paths and worker count excluded, since they do not
affect results) is hashed to key every cache layer.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class ExperimentConfig:
    data_dir: str = "data"
    out_dir: str = "out"
    images: int = 2000  # stratified cap; 0 means all
    threshold: int = 102
    resolutions: tuple = (2, 3, 4, 5, 6)
    n_instances: int = 10
    sampling_bins: int = 10
    hist_bins: int = 10
    noise_cutoff: float = 0.0
    trees: int = 200
    folds: int = 5
    top_features: int = 200
    min_leaf: int = 1
    bootstrap: bool = True
    min_ink: int = 8  # images with fewer ink pixels are excluded (recorded)
    seed: int = 0
    workers: int = 0  # 0 means use all available cores

    # fields that do not influence computed values
    _NON_HASHED = ("data_dir", "out_dir", "workers")

    def validate(self) -> None:
        if not (0 <= self.threshold <= 255):
            raise ValueError("threshold must be in [0, 255]")
        if self.images < 0:
            raise ValueError("images must be >= 0")
        if len(self.resolutions) == 0 or any(k < 1 for k in self.resolutions):
            raise ValueError("resolutions must be non-empty with k >= 1")
        if self.n_instances < 2:
            raise ValueError("need at least 2 instances per setting")
        if self.sampling_bins < 1 or self.hist_bins < 1:
            raise ValueError("bin counts must be >= 1")
        if self.noise_cutoff < 0:
            raise ValueError("noise_cutoff must be >= 0")
        if self.trees < 1:
            raise ValueError("trees must be >= 1")
        if self.folds < 2:
            raise ValueError("folds must be >= 2")
        if self.top_features < 1:
            raise ValueError("top_features must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if self.min_ink < 8:
            # 8+ points guarantee every sampled sub-cloud has >= 2 points
            raise ValueError("min_ink must be >= 8")

    def canonical_dict(self) -> dict:
        d = asdict(self)
        d["resolutions"] = list(self.resolutions)
        return d

    def hashed_dict(self) -> dict:
        d = self.canonical_dict()
        for key in self._NON_HASHED:
            d.pop(key)
        return d

    def config_hash(self) -> str:
        payload = json.dumps(self.hashed_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        if "resolutions" in kwargs and kwargs["resolutions"] is not None:
            kwargs["resolutions"] = tuple(kwargs["resolutions"])
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def config_from_file(path) -> ExperimentConfig:
    with open(path) as f:
        doc = json.load(f)
    cfg = ExperimentConfig().with_overrides(**doc)
    cfg.validate()
    return cfg
