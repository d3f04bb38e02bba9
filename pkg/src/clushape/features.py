"""Statistical summaries of bottleneck-distance distributions and the
assembly of the full feature matrix.

Each image contributes, per sampling setting and linkage, seven numbers
summarizing the distribution of pairwise bottleneck distances among the
instance clustering diagrams: min, max, mean, standard deviation,
skewness, kurtosis, and the occupancy of the fullest histogram bin.
With 45 settings x 4 linkages x 7 summaries that is 1,260 dim-0
columns; the per-setting averaged cycle statistics add 45 x 3 = 135
dim-1 columns, for a 1,395-column pool.

Moment conventions, fixed and documented: sd uses the N-1 divisor (0
when N = 1); skewness m3/m2^1.5 and kurtosis m4/m2^2 use central
moments with divisor N and are defined as 0 when m2 = 0; kurtosis is
the plain (non-excess) form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import Empty, MissingBlock
from .evaluation import hole_label_map
from .hclust import METHODS

N_LANDMARKS = 9
DEFAULT_HIST_BINS = 10
SUMMARY_NAMES = ("min", "max", "mean", "sd", "skew", "kurt", "maxbin")
DIM1_NAMES = ("count", "avgpers", "maxpers")


@dataclass(frozen=True)
class Summary7:
    min: float
    max: float
    mean: float
    sd: float
    skewness: float
    kurtosis: float
    largest_bin: int

    def as_tuple(self) -> tuple:
        return (self.min, self.max, self.mean, self.sd, self.skewness, self.kurtosis, float(self.largest_bin))


def summarize_bottleneck_distribution(distances, hist_bins: int = DEFAULT_HIST_BINS) -> Summary7:
    """Seven-number summary of a non-empty distance list."""
    x = np.asarray(distances, dtype=np.float64).ravel()
    if x.size == 0:
        raise Empty("cannot summarize an empty distance list")
    if hist_bins < 1:
        raise ValueError("hist_bins must be >= 1")
    lo = float(x.min())
    hi = float(x.max())
    mean = float(x.mean())
    n = x.size
    sd = float(x.std(ddof=1)) if n > 1 else 0.0
    centered = x - mean
    m2 = float((centered**2).mean())
    if m2 == 0.0:
        skew = 0.0
        kurt = 0.0
    else:
        skew = float((centered**3).mean() / m2**1.5)
        kurt = float((centered**4).mean() / m2**2)
    if lo == hi:
        largest = n
    else:
        counts, _ = np.histogram(x, bins=hist_bins, range=(lo, hi))
        largest = int(counts.max())
    return Summary7(lo, hi, mean, sd, skew, kurt, largest)


@dataclass(frozen=True)
class ImageFeatures:
    """Per-image pipeline output prior to matrix assembly.

    summaries: (setting_index, linkage) -> Summary7
    dim1: setting_index -> (mean cycle count, mean avg persistence, mean max persistence)
    """

    summaries: dict
    dim1: dict


def setting_names(resolutions) -> list:
    return [f"lm{li}_k{k}" for li in range(N_LANDMARKS) for k in resolutions]


def column_names(resolutions=(2, 3, 4, 5, 6)) -> list:
    """Canonical column order: settings outer, linkages middle, summaries inner;
    then the dim-1 block (settings outer, statistic inner)."""
    names = []
    snames = setting_names(resolutions)
    for sname in snames:
        for linkage in METHODS:
            for stat in SUMMARY_NAMES:
                names.append(f"{sname}_{linkage}_{stat}")
    for sname in snames:
        for stat in DIM1_NAMES:
            names.append(f"{sname}_h1_{stat}")
    return names


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray  # (n_images, n_columns) float64
    columns: tuple
    digits: np.ndarray
    hole_counts: np.ndarray

    @property
    def n_dim0(self) -> int:
        return sum(1 for c in self.columns if "_h1_" not in c)

    def dim1_mask(self) -> np.ndarray:
        return np.array(["_h1_" in c for c in self.columns])


def assemble_feature_matrix(per_image, labels, resolutions=(2, 3, 4, 5, 6)) -> FeatureMatrix:
    """Deterministic assembly of the full pool from per-image blocks.

    Raises MissingBlock when any image lacks a (setting, linkage)
    summary or a setting's dim-1 statistics.
    """
    n_settings = N_LANDMARKS * len(resolutions)
    cols = column_names(resolutions)
    digits = np.asarray(labels, dtype=np.int64)
    if len(per_image) != digits.size:
        raise MissingBlock(f"{len(per_image)} feature blocks for {digits.size} labels")
    values = np.empty((len(per_image), len(cols)), dtype=np.float64)
    for row, feats in enumerate(per_image):
        at = 0
        for s in range(n_settings):
            for linkage in METHODS:
                summ = feats.summaries.get((s, linkage))
                if summ is None:
                    raise MissingBlock(f"image {row} lacks summary for setting {s}, {linkage}")
                values[row, at : at + 7] = summ.as_tuple()
                at += 7
        for s in range(n_settings):
            block = feats.dim1.get(s)
            if block is None:
                raise MissingBlock(f"image {row} lacks dim-1 block for setting {s}")
            values[row, at : at + 3] = block
            at += 3
    holes = np.array([hole_label_map(int(d)) for d in digits], dtype=np.int64)
    return FeatureMatrix(values, tuple(cols), digits, holes)


def write_features_csv(fm: FeatureMatrix, path) -> None:
    """Plain CSV: canonical feature columns plus digit and hole_count."""
    with open(path, "w") as f:
        f.write(",".join(fm.columns) + ",digit,hole_count\n")
        for row, digit, hole in zip(fm.values, fm.digits, fm.hole_counts):
            f.write(",".join(repr(float(v)) for v in row))
            f.write(f",{int(digit)},{int(hole)}\n")


def read_features_csv(path) -> FeatureMatrix:
    with open(path) as f:
        header = f.readline().rstrip("\n").split(",")
        if header[-2:] != ["digit", "hole_count"]:
            raise MissingBlock("features CSV must end with digit,hole_count columns")
        cols = tuple(header[:-2])
        rows = []
        digits = []
        holes = []
        for line in f:
            parts = line.rstrip("\n").split(",")
            rows.append([float(v) for v in parts[:-2]])
            digits.append(int(parts[-2]))
            holes.append(int(parts[-1]))
    return FeatureMatrix(
        np.array(rows, dtype=np.float64),
        cols,
        np.array(digits, dtype=np.int64),
        np.array(holes, dtype=np.int64),
    )


def write_manifest(path, config_dict: dict, config_hash: str, columns, n_images: int, extra: dict | None = None) -> None:
    doc = {
        "config": config_dict,
        "config_hash": config_hash,
        "n_images": n_images,
        "n_columns": len(columns),
        "columns": list(columns),
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")
