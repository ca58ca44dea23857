"""CART decision trees and a bootstrap-aggregated random forest.

Splits maximize information gain over midpoint thresholds between consecutive
distinct feature values. Like reference CART implementations, an impure node
is split even when the best achievable gain is zero (two interleaved classes
can need several zero-gain cuts before any pure region appears); a node only
becomes a leaf when it is pure, hits a size or depth limit, or no candidate
threshold exists at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, TrainingError

CRITERIA = ("gini", "entropy")


def _impurity_from_counts(n0, n1, criterion):
    """Impurity of nodes given per-class counts; vectorized over arrays."""
    n0 = np.asarray(n0, dtype=np.float64)
    n1 = np.asarray(n1, dtype=np.float64)
    n = n0 + n1
    p0 = n0 / n
    p1 = n1 / n
    if criterion == "gini":
        return 1.0 - p0 * p0 - p1 * p1
    # 0*log2(0) = 0: feed log2 a 1 wherever p is 0, the product zeroes it out.
    t0 = p0 * np.log2(np.where(p0 > 0.0, p0, 1.0))
    t1 = p1 * np.log2(np.where(p1 > 0.0, p1, 1.0))
    return -(t0 + t1)


def _check_counts(n0, n1, what):
    if n0 < 0 or n1 < 0 or int(n0) != n0 or int(n1) != n1:
        raise DataError(f"{what} counts must be non-negative integers, got ({n0}, {n1})")
    if n0 + n1 < 1:
        raise DataError(f"{what} must hold at least one sample")


def gini(n0: int, n1: int) -> float:
    """Gini impurity 1 - p0^2 - p1^2 of a node with n0/n1 samples per class."""
    _check_counts(n0, n1, "node")
    return float(_impurity_from_counts(n0, n1, "gini"))


def entropy(n0: int, n1: int) -> float:
    """Shannon entropy -sum p_i log2 p_i in bits; 0*log(0) counts as 0."""
    _check_counts(n0, n1, "node")
    return float(_impurity_from_counts(n0, n1, "entropy"))


def information_gain(parent, left, right, criterion: str = "gini") -> float:
    """Parent impurity minus the size-weighted mean of child impurities.

    parent, left and right are (count0, count1) pairs and the children must
    partition the parent exactly. Rounding can push the weighted child term
    a few ulps past the parent impurity, so the result is floored at 0.
    """
    if criterion not in CRITERIA:
        raise TrainingError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    p0, p1 = parent
    l0, l1 = left
    r0, r1 = right
    _check_counts(p0, p1, "parent")
    _check_counts(l0, l1, "left child")
    _check_counts(r0, r1, "right child")
    if l0 + r0 != p0 or l1 + r1 != p1:
        raise DataError(
            f"children ({l0},{l1}) + ({r0},{r1}) do not partition parent ({p0},{p1})"
        )
    n = p0 + p1
    wl = (l0 + l1) / n
    wr = (r0 + r1) / n
    gain = (
        _impurity_from_counts(p0, p1, criterion)
        - wl * _impurity_from_counts(l0, l1, criterion)
        - wr * _impurity_from_counts(r0, r1, criterion)
    )
    return max(0.0, float(gain))


def best_split(x, y, rows=None, features=None, criterion: str = "gini"):
    """Exhaustive search for the highest-gain (feature, threshold) cut.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values of each candidate feature. Ties break toward the lowest feature
    index, then the lowest threshold. Returns (feature, threshold, gain), or
    None when every candidate feature is constant over the row subset.
    """
    if criterion not in CRITERIA:
        raise TrainingError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    rows = np.arange(x.shape[0]) if rows is None else np.asarray(rows, dtype=np.intp)
    n = int(rows.size)
    if n < 2:
        return None
    feats = range(x.shape[1]) if features is None else sorted(int(f) for f in set(features))

    yr = y[rows].astype(np.int64)
    n1p = int(yr.sum())
    n0p = n - n1p
    parent_imp = _impurity_from_counts(n0p, n1p, criterion)

    best = None
    for j in feats:
        v = x[rows, j]
        order = np.argsort(v, kind="stable")
        sv = v[order]
        sy = yr[order]
        cut = np.nonzero(sv[:-1] < sv[1:])[0]
        if cut.size == 0:
            continue
        prefix1 = np.cumsum(sy)
        nl = (cut + 1).astype(np.float64)
        nl1 = prefix1[cut].astype(np.float64)
        nl0 = nl - nl1
        nr = n - nl
        nr1 = n1p - nl1
        nr0 = nr - nr1
        gains = (
            parent_imp
            - (nl / n) * _impurity_from_counts(nl0, nl1, criterion)
            - (nr / n) * _impurity_from_counts(nr0, nr1, criterion)
        )
        # Thresholds ascend with the cut position, so the first argmax is
        # already the lowest-threshold winner within this feature.
        k = int(np.argmax(gains))
        g = float(gains[k])
        if best is None or g > best[0]:
            threshold = float((sv[cut[k]] + sv[cut[k] + 1]) / 2.0)
            best = (g, j, threshold)

    if best is None:
        return None
    return best[1], best[2], max(0.0, best[0])


@dataclass(frozen=True)
class CartParams:
    criterion: str = "gini"
    max_depth: int | None = None
    min_samples_split: int = 2
    # None = use all features; an integer = per-node draw of that many
    # features; "auto" = ceil(sqrt(n_features)), the usual forest default.
    feature_subsample: int | str | None = None

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise TrainingError(f"unknown criterion {self.criterion!r}")
        if self.max_depth is not None and self.max_depth < 0:
            raise TrainingError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_samples_split < 2:
            raise TrainingError(f"min_samples_split must be >= 2, got {self.min_samples_split}")
        fs = self.feature_subsample
        if fs is not None and fs != "auto" and (not isinstance(fs, int) or fs < 1):
            raise TrainingError(f"feature_subsample must be None, 'auto' or a count, got {fs!r}")


@dataclass(frozen=True)
class TreeNode:
    """One CART node; a leaf iff left is None. Leaves carry class counts."""

    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    count0: int = 0
    count1: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def probability(self) -> float:
        total = self.count0 + self.count1
        if total < 1:
            raise DataError("probability is defined on leaves only")
        return self.count1 / total


@dataclass(frozen=True)
class CartTree:
    root: TreeNode
    params: CartParams
    n_features: int

    def predict_proba(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        if x.shape[1] != self.n_features:
            raise DataError(
                f"tree was grown on {self.n_features} features, input has {x.shape[1]}"
            )
        out = np.empty(x.shape[0], dtype=np.float64)
        for i, row in enumerate(x):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.probability
        return out

    def classify(self, x, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(x) >= threshold).astype(np.int64)

    def stats(self) -> dict:
        """Node count, leaf count and depth, by explicit-stack traversal."""
        nodes = leaves = 0
        depth = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            nodes += 1
            depth = max(depth, d)
            if node.is_leaf:
                leaves += 1
            else:
                stack.append((node.left, d + 1))
                stack.append((node.right, d + 1))
        return {"nodes": nodes, "leaves": leaves, "depth": depth}


def _resolve_subsample(params: CartParams, n_cols: int) -> int:
    fs = params.feature_subsample
    if fs is None:
        return n_cols
    if fs == "auto":
        return min(n_cols, math.ceil(math.sqrt(n_cols)))
    return min(n_cols, int(fs))


def fit_cart(x, y, params: CartParams = CartParams(), rng=None, rows=None) -> CartTree:
    """Grow one tree by recursive impurity-minimizing splits.

    A node becomes a leaf when it is pure, smaller than min_samples_split,
    at max_depth, or when no candidate threshold exists. With feature
    subsampling active, each node draws its feature subset from rng in
    preorder (node, then left subtree, then right subtree), which pins the
    tree for a given generator state.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2:
        raise DataError("training matrix must be 2-D")
    if y.shape != (x.shape[0],):
        raise DataError("target length does not match row count")
    if x.shape[0] == 0:
        raise TrainingError("cannot fit on an empty matrix")
    if y.size and not np.isin(y, (0, 1)).all():
        raise TrainingError("labels must be 0/1")

    n_cols = x.shape[1]
    k = _resolve_subsample(params, n_cols)
    if k < n_cols and rng is None:
        raise TrainingError("feature subsampling requires an rng")
    rows = np.arange(x.shape[0]) if rows is None else np.asarray(rows, dtype=np.intp)
    if rows.size == 0:
        raise TrainingError("cannot fit on an empty row subset")

    def build(subset, depth):
        n1 = int(y[subset].sum())
        n0 = int(subset.size) - n1
        if (
            n0 == 0
            or n1 == 0
            or subset.size < params.min_samples_split
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            return TreeNode(count0=n0, count1=n1)
        feats = np.sort(rng.choice(n_cols, size=k, replace=False)) if k < n_cols else None
        found = best_split(x, y, subset, feats, params.criterion)
        if found is None:
            return TreeNode(count0=n0, count1=n1)
        feature, threshold, _ = found
        mask = x[subset, feature] <= threshold
        return TreeNode(
            feature=feature,
            threshold=threshold,
            left=build(subset[mask], depth + 1),
            right=build(subset[~mask], depth + 1),
        )

    return CartTree(root=build(rows, 0), params=params, n_features=n_cols)


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    params: CartParams = CartParams(feature_subsample="auto")
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise TrainingError(f"n_trees must be >= 1, got {self.n_trees}")


@dataclass(frozen=True)
class Forest:
    trees: tuple[CartTree, ...]
    seed: int
    bootstrap: bool
    columns: tuple[str, ...] = ()

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    @property
    def n_features(self) -> int:
        return self.trees[0].n_features

    def predict_proba(self, x) -> np.ndarray:
        probs = self.trees[0].predict_proba(x)
        for tree in self.trees[1:]:
            probs = probs + tree.predict_proba(x)
        return probs / self.n_trees

    def classify(self, x, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(x) >= threshold).astype(np.int64)


def fit_forest(x, y, config: ForestConfig = ForestConfig(), columns=()) -> Forest:
    """Train n_trees CARTs on bootstrap resamples.

    Tree t's entire randomness (its bootstrap draw, then its per-node
    feature subsets) comes from a generator seeded with (seed, t), so the
    forest is identical no matter how the tree loop is scheduled.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    trees = []
    for t in range(config.n_trees):
        rng = np.random.default_rng((config.seed, t))
        rows = rng.integers(0, n, size=n) if config.bootstrap else np.arange(n)
        trees.append(fit_cart(x, y, config.params, rng, rows=rows))
    return Forest(
        trees=tuple(trees),
        seed=config.seed,
        bootstrap=config.bootstrap,
        columns=tuple(columns),
    )


def predict_proba_forest(forest: Forest, x):
    """Mean of the trees' leaf probabilities; scalar for a single sample."""
    single = np.asarray(x).ndim == 1
    probs = forest.predict_proba(x)
    return float(probs[0]) if single else probs


def _node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {
            "count0": node.count0,
            "count1": node.count1,
            "probability": node.probability,
        }
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(payload: dict) -> TreeNode:
    if "feature" in payload:
        return TreeNode(
            feature=int(payload["feature"]),
            threshold=float(payload["threshold"]),
            left=_node_from_dict(payload["left"]),
            right=_node_from_dict(payload["right"]),
        )
    return TreeNode(count0=int(payload["count0"]), count1=int(payload["count1"]))


def forest_to_json_dict(forest: Forest) -> dict:
    params = forest.trees[0].params
    return {
        "kind": "forest",
        "columns": list(forest.columns),
        "seed": forest.seed,
        "bootstrap": forest.bootstrap,
        "n_trees": forest.n_trees,
        "n_features": forest.n_features,
        "params": {
            "criterion": params.criterion,
            "max_depth": params.max_depth,
            "min_samples_split": params.min_samples_split,
            "feature_subsample": params.feature_subsample,
        },
        "trees": [_node_to_dict(tree.root) for tree in forest.trees],
    }


def forest_from_json_dict(payload: dict) -> Forest:
    if payload.get("kind") != "forest":
        raise DataError(f"payload kind {payload.get('kind')!r} is not a forest model")
    params = CartParams(**payload["params"])
    n_features = int(payload["n_features"])
    trees = tuple(
        CartTree(root=_node_from_dict(t), params=params, n_features=n_features)
        for t in payload["trees"]
    )
    if not trees:
        raise DataError("forest payload holds no trees")
    return Forest(
        trees=trees,
        seed=int(payload["seed"]),
        bootstrap=bool(payload["bootstrap"]),
        columns=tuple(payload.get("columns", ())),
    )
