"""Random forest classifier and regressor with impurity-based importance.

Trees grow on bootstrap resamples.  At each node a uniform random
subset of features is considered (ceil(sqrt(p)) for classification,
ceil(p/3) for regression by default); candidate thresholds are the
midpoints between consecutive sorted unique values; the split
maximizing the Gini decrease (classification) or variance reduction
(regression) wins, with ties resolved to the first candidate in
feature-then-threshold order.  Growth stops at pure nodes or when no
candidate keeps both children at the minimum leaf size (default 1).

Feature importance is mean decrease in impurity: the weighted impurity
decreases of every split, summed per feature, averaged over trees, and
normalized to sum to one.  Everything is deterministic given the seed:
per-tree seeds derive from the model seed, and each tree's bootstrap
and feature draws come from its own seeded stream inside the compiled
kernel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ArityMismatch, EmptyTrainingSet, KTooLarge

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 200
    max_features: int | None = None  # None: ceil(sqrt p) classify, ceil(p/3) regress
    min_leaf: int = 1
    bootstrap: bool = True


@njit(cache=True)
def _grow_tree(
    X: np.ndarray,
    y_cls: np.ndarray,
    y_reg: np.ndarray,
    classify: bool,
    n_classes: int,
    max_features: int,
    min_leaf: int,
    bootstrap: bool,
    tree_seed: int,
    importance: np.ndarray,
):
    """Grow one tree; returns (feature, threshold, left, right, value, n_nodes)."""
    np.random.seed(tree_seed)
    n, p = X.shape
    if bootstrap:
        rows = np.random.randint(0, n, n)
    else:
        rows = np.arange(n)
    max_nodes = 2 * n + 1
    feat = np.full(max_nodes, -1, dtype=np.int64)
    thresh = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    width = n_classes if classify else 1
    value = np.zeros((max_nodes, width), dtype=np.float64)

    idx = rows.copy()
    scratch = np.empty(n, dtype=np.int64)
    perm = np.arange(p)
    chosen = np.empty(max_features, dtype=np.int64)
    counts_left = np.zeros(n_classes, dtype=np.float64)
    counts_node = np.zeros(n_classes, dtype=np.float64)

    stack_node = np.empty(max_nodes, dtype=np.int64)
    stack_lo = np.empty(max_nodes, dtype=np.int64)
    stack_hi = np.empty(max_nodes, dtype=np.int64)
    n_nodes = 1
    top = 0
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    while top >= 0:
        node = stack_node[top]
        lo = stack_lo[top]
        hi = stack_hi[top]
        top -= 1
        m = hi - lo

        # leaf value and purity
        pure = True
        if classify:
            for c in range(n_classes):
                counts_node[c] = 0.0
            for t in range(lo, hi):
                counts_node[y_cls[idx[t]]] += 1.0
            seen = 0
            for c in range(n_classes):
                value[node, c] = counts_node[c]
                if counts_node[c] > 0.0:
                    seen += 1
            pure = seen <= 1
            node_score = 0.0
            for c in range(n_classes):
                node_score += counts_node[c] * counts_node[c]
            node_score /= m
        else:
            total = 0.0
            for t in range(lo, hi):
                total += y_reg[idx[t]]
            value[node, 0] = total / m
            first = y_reg[idx[lo]]
            for t in range(lo + 1, hi):
                if y_reg[idx[t]] != first:
                    pure = False
                    break
            node_score = total * total / m

        if pure or m < 2 * min_leaf:
            continue

        # draw the feature subset (partial Fisher-Yates), iterate ascending
        for t in range(max_features):
            r = t + np.random.randint(0, p - t)
            tmp = perm[t]
            perm[t] = perm[r]
            perm[r] = tmp
            chosen[t] = perm[t]
        chosen[:max_features].sort()

        best_gain = 0.0
        best_feat = -1
        best_thresh = 0.0
        for fi in range(max_features):
            f = chosen[fi]
            vals = np.empty(m, dtype=np.float64)
            for t in range(m):
                vals[t] = X[idx[lo + t], f]
            order = np.argsort(vals, kind="mergesort")
            if vals[order[0]] == vals[order[m - 1]]:
                continue
            if classify:
                for c in range(n_classes):
                    counts_left[c] = 0.0
                nl = 0
                for t in range(m - 1):
                    row = idx[lo + order[t]]
                    counts_left[y_cls[row]] += 1.0
                    nl += 1
                    v0 = vals[order[t]]
                    v1 = vals[order[t + 1]]
                    if v0 == v1 or nl < min_leaf or m - nl < min_leaf:
                        continue
                    sl = 0.0
                    for c in range(n_classes):
                        sl += counts_left[c] * counts_left[c]
                    sr = 0.0
                    for c in range(n_classes):
                        cr = counts_node[c] - counts_left[c]
                        sr += cr * cr
                    gain = sl / nl + sr / (m - nl) - node_score
                    if gain > best_gain:
                        best_gain = gain
                        best_feat = f
                        best_thresh = v0 + (v1 - v0) / 2.0
            else:
                tl = 0.0
                nl = 0
                ttot = value[node, 0] * m
                for t in range(m - 1):
                    tl += y_reg[idx[lo + order[t]]]
                    nl += 1
                    v0 = vals[order[t]]
                    v1 = vals[order[t + 1]]
                    if v0 == v1 or nl < min_leaf or m - nl < min_leaf:
                        continue
                    tr = ttot - tl
                    gain = tl * tl / nl + tr * tr / (m - nl) - node_score
                    if gain > best_gain:
                        best_gain = gain
                        best_feat = f
                        best_thresh = v0 + (v1 - v0) / 2.0

        if best_feat < 0:
            continue

        # partition idx[lo:hi] stably around the threshold
        nl = 0
        for t in range(lo, hi):
            if X[idx[t], best_feat] < best_thresh:
                scratch[nl] = idx[t]
                nl += 1
        nr = nl
        for t in range(lo, hi):
            if not (X[idx[t], best_feat] < best_thresh):
                scratch[nr] = idx[t]
                nr += 1
        for t in range(m):
            idx[lo + t] = scratch[t]

        importance[best_feat] += best_gain / n
        feat[node] = best_feat
        thresh[node] = best_thresh
        lnode = n_nodes
        rnode = n_nodes + 1
        n_nodes += 2
        left[node] = lnode
        right[node] = rnode
        top += 1
        stack_node[top] = lnode
        stack_lo[top] = lo
        stack_hi[top] = lo + nl
        top += 1
        stack_node[top] = rnode
        stack_lo[top] = lo + nl
        stack_hi[top] = hi
    return feat[:n_nodes], thresh[:n_nodes], left[:n_nodes], right[:n_nodes], value[:n_nodes]


@njit(cache=True)
def _predict_trees(
    Xq: np.ndarray,
    feat: np.ndarray,
    thresh: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    value: np.ndarray,
    offsets: np.ndarray,
    classify: bool,
    n_classes: int,
):
    nq = Xq.shape[0]
    ntrees = offsets.size - 1
    out = np.empty(nq, dtype=np.float64)
    votes = np.zeros(n_classes, dtype=np.int64)
    for q in range(nq):
        if classify:
            for c in range(n_classes):
                votes[c] = 0
        acc = 0.0
        for t in range(ntrees):
            node = offsets[t]
            while feat[node] >= 0:
                if Xq[q, feat[node]] < thresh[node]:
                    node = left[node]
                else:
                    node = right[node]
            if classify:
                best_c = 0
                best_v = value[node, 0]
                for c in range(1, n_classes):
                    if value[node, c] > best_v:
                        best_v = value[node, c]
                        best_c = c
                votes[best_c] += 1
            else:
                acc += value[node, 0]
        if classify:
            best_c = 0
            best_v = votes[0]
            for c in range(1, n_classes):
                if votes[c] > best_v:
                    best_v = votes[c]
                    best_c = c
            out[q] = best_c
        else:
            out[q] = acc / ntrees
    return out


@dataclass
class ForestModel:
    mode: str
    params: ForestParams
    seed: int
    n_features: int
    classes: np.ndarray | None
    feat: np.ndarray
    thresh: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    offsets: np.ndarray
    importance_raw: np.ndarray = field(repr=False)

    def feature_importances(self) -> np.ndarray:
        total = self.importance_raw.sum()
        if total > 0:
            return self.importance_raw / total
        return self.importance_raw.copy()

    def to_jsonable(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "mode": self.mode,
            "seed": self.seed,
            "n_features": self.n_features,
            "classes": None if self.classes is None else [int(c) for c in self.classes],
            "params": {
                "n_trees": self.params.n_trees,
                "max_features": self.params.max_features,
                "min_leaf": self.params.min_leaf,
                "bootstrap": self.params.bootstrap,
            },
            "offsets": [int(v) for v in self.offsets],
            "feature": [int(v) for v in self.feat],
            "threshold": [float(v) for v in self.thresh],
            "left": [int(v) for v in self.left],
            "right": [int(v) for v in self.right],
            "value": [[float(v) for v in row] for row in self.value],
            "importance_raw": [float(v) for v in self.importance_raw],
        }


def save_model(model: ForestModel, path) -> None:
    with open(path, "w") as f:
        json.dump(model.to_jsonable(), f)
        f.write("\n")


def load_model(path) -> ForestModel:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format {doc.get('format_version')}")
    params = ForestParams(**doc["params"])
    return ForestModel(
        mode=doc["mode"],
        params=params,
        seed=doc["seed"],
        n_features=doc["n_features"],
        classes=None if doc["classes"] is None else np.array(doc["classes"], dtype=np.int64),
        feat=np.array(doc["feature"], dtype=np.int64),
        thresh=np.array(doc["threshold"], dtype=np.float64),
        left=np.array(doc["left"], dtype=np.int64),
        right=np.array(doc["right"], dtype=np.int64),
        value=np.array(doc["value"], dtype=np.float64),
        offsets=np.array(doc["offsets"], dtype=np.int64),
        importance_raw=np.array(doc["importance_raw"], dtype=np.float64),
    )


def default_max_features(p: int, mode: str) -> int:
    if mode == "classify":
        return min(p, max(1, math.ceil(math.sqrt(p))))
    return min(p, max(1, math.ceil(p / 3)))


def train_forest(X, y, params: ForestParams = ForestParams(), seed: int = 0, mode: str = "classify") -> ForestModel:
    """Train a forest; deterministic given (X, y, params, seed)."""
    if mode not in ("classify", "regress"):
        raise ValueError(f"mode must be 'classify' or 'regress', got {mode!r}")
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyTrainingSet("X must be a non-empty 2-D array")
    if np.isnan(X).any():
        raise ValueError("X contains NaN")
    n, p = X.shape
    y = np.asarray(y)
    if y.shape[0] != n:
        raise ArityMismatch(f"{y.shape[0]} targets for {n} rows")
    classify = mode == "classify"
    if classify:
        classes = np.unique(y)
        y_cls = np.searchsorted(classes, y).astype(np.int64)
        y_reg = np.zeros(1, dtype=np.float64)
        n_classes = classes.size
    else:
        classes = None
        y_cls = np.zeros(1, dtype=np.int64)
        y_reg = np.asarray(y, dtype=np.float64)
        n_classes = 1
    mf = params.max_features if params.max_features is not None else default_max_features(p, mode)
    mf = min(max(1, mf), p)

    tree_seeds = np.random.SeedSequence(seed).generate_state(params.n_trees, dtype=np.uint32)
    importance = np.zeros(p, dtype=np.float64)
    feats, threshs, lefts, rights, values = [], [], [], [], []
    offsets = np.zeros(params.n_trees + 1, dtype=np.int64)
    for t in range(params.n_trees):
        f, th, le, ri, va = _grow_tree(
            X, y_cls, y_reg, classify, n_classes, mf, params.min_leaf,
            params.bootstrap, int(tree_seeds[t]), importance,
        )
        base = offsets[t]
        offsets[t + 1] = base + f.size
        # child pointers become absolute across the concatenated arrays
        feats.append(f)
        threshs.append(th)
        lefts.append(np.where(le >= 0, le + base, -1))
        rights.append(np.where(ri >= 0, ri + base, -1))
        values.append(va)
    return ForestModel(
        mode=mode,
        params=params,
        seed=seed,
        n_features=p,
        classes=classes,
        feat=np.concatenate(feats),
        thresh=np.concatenate(threshs),
        left=np.concatenate(lefts),
        right=np.concatenate(rights),
        value=np.vstack(values),
        offsets=offsets,
        importance_raw=importance / params.n_trees,
    )


def predict(model: ForestModel, x):
    """Predict one feature row or a batch; plurality vote / tree mean."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr.reshape(1, -1)
    if arr.shape[1] != model.n_features:
        raise ArityMismatch(f"row arity {arr.shape[1]} != model arity {model.n_features}")
    classify = model.mode == "classify"
    n_classes = model.classes.size if classify else 1
    raw = _predict_trees(
        np.ascontiguousarray(arr), model.feat, model.thresh, model.left, model.right,
        model.value, model.offsets, classify, n_classes,
    )
    if classify:
        out = model.classes[raw.astype(np.int64)]
    else:
        out = raw
    return out[0] if single else out


@dataclass(frozen=True)
class TopFeatures:
    indices: np.ndarray
    dim0_count: int | None = None
    dim1_count: int | None = None


def select_top_features(importances, k: int, dim1_mask=None) -> TopFeatures:
    """Indices of the k largest importances; ties break toward lower index.

    When dim1_mask is given (bool per feature), the selection's
    dim-0/dim-1 split is reported alongside.
    """
    imp = np.asarray(importances, dtype=np.float64)
    if k > imp.size:
        raise KTooLarge(f"asked for {k} of {imp.size} features")
    order = np.argsort(-imp, kind="stable")
    sel = order[:k]
    if dim1_mask is None:
        return TopFeatures(sel)
    dim1_mask = np.asarray(dim1_mask, dtype=bool)
    n1 = int(dim1_mask[sel].sum())
    return TopFeatures(sel, int(k - n1), n1)
