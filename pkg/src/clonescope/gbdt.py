"""Gradient-boosted decision trees for statement-tree pair classification.

Binary logistic objective, second-order (Newton) leaf values with a
fixed L2 smoothing of 1.0, exact greedy split search over sorted feature
values, and leaf-wise best-first growth bounded by ``num_leaves`` and
``max_depth``.  Training is single-threaded and bit-reproducible for a
fixed (data, hyperparameters, seed) triple; ties in split selection are
broken by lowest feature index, then lowest threshold.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from clonescope.errors import DegenerateData, DimensionMismatch, ZeroSplits
from clonescope.features import CATEGORY_ORDER, PAIR_FEATURE_NAMES

_L2_SMOOTHING = 1.0

SCHEMA_VERSION = 1

# name, low, high, integer-valued
HYPER_BOUNDS: tuple[tuple[str, float, float, bool], ...] = (
    ("num_leaves", 2, 64, True),
    ("max_depth", 1, 12, True),
    ("learning_rate", 0.01, 0.5, False),
    ("num_rounds", 5, 120, True),
    ("min_samples_leaf", 1, 30, True),
    ("feature_fraction", 0.5, 1.0, False),
    ("bagging_fraction", 0.5, 1.0, False),
)

HYPER_DIM = len(HYPER_BOUNDS)


@dataclass(frozen=True)
class HyperPoint:
    """The seven tunable knobs of the boosted-tree classifier."""

    num_leaves: int = 31
    max_depth: int = 8
    learning_rate: float = 0.1
    num_rounds: int = 100
    min_samples_leaf: int = 20
    feature_fraction: float = 1.0
    bagging_fraction: float = 1.0

    def validate(self) -> None:
        if self.num_leaves < 2:
            raise ValueError("num_leaves must be at least 2")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in (0, 1]")
        if self.num_rounds < 1:
            raise ValueError("num_rounds must be at least 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be at least 1")
        if not 0.0 < self.feature_fraction <= 1.0:
            raise ValueError("feature_fraction must lie in (0, 1]")
        if not 0.0 < self.bagging_fraction <= 1.0:
            raise ValueError("bagging_fraction must lie in (0, 1]")

    def to_unit(self) -> np.ndarray:
        """Map into the unit cube used by the hyperparameter search."""
        values = []
        for name, low, high, _ in HYPER_BOUNDS:
            raw = float(getattr(self, name))
            clamped = min(max(raw, low), high)
            values.append((clamped - low) / (high - low))
        return np.array(values, dtype=np.float64)

    @classmethod
    def from_unit(cls, unit: np.ndarray) -> "HyperPoint":
        """Clamp a unit-cube point and round integer dimensions half-up."""
        if len(unit) != HYPER_DIM:
            raise DimensionMismatch(f"expected {HYPER_DIM} dimensions, got {len(unit)}")
        kwargs = {}
        for (name, low, high, is_int), u in zip(HYPER_BOUNDS, unit):
            u = min(max(float(u), 0.0), 1.0)
            value = low + u * (high - low)
            if is_int:
                kwargs[name] = int(math.floor(value + 0.5))
            else:
                kwargs[name] = value
        point = cls(**kwargs)
        point.validate()
        return point

    def to_json(self) -> dict:
        return {name: getattr(self, name) for name, *_ in HYPER_BOUNDS}

    @classmethod
    def from_json(cls, data: dict) -> "HyperPoint":
        point = cls(**{name: data[name] for name, *_ in HYPER_BOUNDS})
        point.validate()
        return point


@dataclass(frozen=True)
class LabeledPair:
    x: np.ndarray
    y: int


@dataclass(frozen=True)
class _Tree:
    feature: np.ndarray    # int32, -1 marks a leaf
    threshold: np.ndarray  # float64; rule: x <= threshold goes left
    left: np.ndarray       # int32
    right: np.ndarray      # int32
    value: np.ndarray      # float64, unscaled Newton leaf value

    def leaf_count(self) -> int:
        return int((self.feature < 0).sum())

    def depth(self) -> int:
        depths = {0: 0}
        deepest = 0
        for node in range(len(self.feature)):
            d = depths[node]
            deepest = max(deepest, d)
            if self.feature[node] >= 0:
                depths[int(self.left[node])] = d + 1
                depths[int(self.right[node])] = d + 1
        return deepest

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf value for every row of X (vectorised level walk)."""
        idx = np.zeros(len(X), dtype=np.int32)
        while True:
            feats = self.feature[idx]
            active = feats >= 0
            if not active.any():
                return self.value[idx]
            where = np.nonzero(active)[0]
            node = idx[where]
            go_left = X[where, feats[where]] <= self.threshold[node]
            idx[where] = np.where(go_left, self.left[node], self.right[node])


@dataclass(frozen=True)
class GbdtModel:
    trees: tuple[_Tree, ...]
    base_score: float
    hyper: HyperPoint
    split_counts: np.ndarray
    feature_names: tuple[str, ...] = PAIR_FEATURE_NAMES
    train_loss_curve: tuple[float, ...] = field(default_factory=tuple)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def raw_scores(self, X: np.ndarray) -> np.ndarray:
        total = np.full(len(X), self.base_score, dtype=np.float64)
        for tree in self.trees:
            total += self.hyper.learning_rate * tree.apply(X)
        return total

    def identifier(self) -> str:
        """Short content hash used to stamp reports."""
        import hashlib

        payload = json.dumps(model_to_json(self), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:12]


def _sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-z))


def pairs_to_arrays(data: list[LabeledPair]) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray([pair.x for pair in data], dtype=np.float64)
    y = np.asarray([pair.y for pair in data], dtype=np.float64)
    return X, y


# ── training ─────────────────────────────────────────────────────


class _PendingSplit:
    __slots__ = ("gain", "node_id", "feature", "threshold", "rows", "depth")

    def __init__(self, gain, node_id, feature, threshold, rows, depth):
        self.gain = gain
        self.node_id = node_id
        self.feature = feature
        self.threshold = threshold
        self.rows = rows
        self.depth = depth

    def __lt__(self, other: "_PendingSplit") -> bool:
        # Max-gain first; ties favour the node created earlier.
        return (-self.gain, self.node_id) < (-other.gain, other.node_id)


def _best_split(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    feats: np.ndarray,
    min_samples_leaf: int,
) -> tuple[float, int, float] | None:
    n = len(rows)
    if n < 2 * min_samples_leaf:
        return None

    Xn = X[np.ix_(rows, feats)]
    order = np.argsort(Xn, axis=0, kind="stable")
    Xs = np.take_along_axis(Xn, order, axis=0)
    gs = np.take_along_axis(np.broadcast_to(g[rows][:, None], Xn.shape), order, axis=0)
    hs = np.take_along_axis(np.broadcast_to(h[rows][:, None], Xn.shape), order, axis=0)

    g_left = np.cumsum(gs, axis=0)[:-1]
    h_left = np.cumsum(hs, axis=0)[:-1]
    g_total = float(g[rows].sum())
    h_total = float(h[rows].sum())
    g_right = g_total - g_left
    h_right = h_total - h_left

    positions = np.arange(1, n)[:, None]
    valid = (Xs[:-1] < Xs[1:])
    valid &= positions >= min_samples_leaf
    valid &= (n - positions) >= min_samples_leaf
    if not valid.any():
        return None

    parent_term = g_total * g_total / (h_total + _L2_SMOOTHING)
    gains = 0.5 * (
        g_left * g_left / (h_left + _L2_SMOOTHING)
        + g_right * g_right / (h_right + _L2_SMOOTHING)
        - parent_term
    )
    gains[~valid] = -np.inf

    # Feature-major scan gives the tie-break order: lowest feature index,
    # then lowest threshold (positions are sorted by value).
    flat = np.argmax(gains.T)
    f_local, pos = divmod(flat, gains.shape[0])
    gain = float(gains[pos, f_local])
    if not np.isfinite(gain) or gain <= 0.0:
        return None
    threshold = float(Xs[pos, f_local])
    return gain, int(feats[f_local]), threshold


def _leaf_value(g: np.ndarray, h: np.ndarray, rows: np.ndarray) -> float:
    return float(-g[rows].sum() / (h[rows].sum() + _L2_SMOOTHING))


def _build_tree(
    X: np.ndarray,
    g: np.ndarray,
    h: np.ndarray,
    rows: np.ndarray,
    feats: np.ndarray,
    hyper: HyperPoint,
    split_counts: np.ndarray,
) -> _Tree:
    feature = [np.int32(-1)]
    threshold = [0.0]
    left = [np.int32(-1)]
    right = [np.int32(-1)]
    value = [0.0]
    node_rows: dict[int, np.ndarray] = {0: rows}
    node_depth: dict[int, int] = {0: 0}

    heap: list[_PendingSplit] = []

    def consider(node_id: int) -> None:
        depth = node_depth[node_id]
        if depth >= hyper.max_depth:
            return
        found = _best_split(X, g, h, node_rows[node_id], feats, hyper.min_samples_leaf)
        if found is not None:
            gain, feat, thr = found
            heapq.heappush(heap, _PendingSplit(gain, node_id, feat, thr,
                                               node_rows[node_id], depth))

    consider(0)
    leaves = 1
    while heap and leaves < hyper.num_leaves:
        best = heapq.heappop(heap)
        mask = X[best.rows, best.feature] <= best.threshold
        left_rows = best.rows[mask]
        right_rows = best.rows[~mask]

        left_id = len(feature)
        right_id = left_id + 1
        for _ in range(2):
            feature.append(np.int32(-1))
            threshold.append(0.0)
            left.append(np.int32(-1))
            right.append(np.int32(-1))
            value.append(0.0)

        feature[best.node_id] = np.int32(best.feature)
        threshold[best.node_id] = best.threshold
        left[best.node_id] = np.int32(left_id)
        right[best.node_id] = np.int32(right_id)
        split_counts[best.feature] += 1

        node_rows[left_id] = left_rows
        node_rows[right_id] = right_rows
        node_depth[left_id] = best.depth + 1
        node_depth[right_id] = best.depth + 1
        del node_rows[best.node_id]

        consider(left_id)
        consider(right_id)
        leaves += 1

    for node_id, leaf_rows in node_rows.items():
        value[node_id] = _leaf_value(g, h, leaf_rows)

    return _Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
    )


def train_xy(X: np.ndarray, y: np.ndarray, hyper: HyperPoint, seed: int,
             feature_names: tuple[str, ...] | None = None) -> GbdtModel:
    """Array-level training entry point (used by the hyperparameter search)."""
    hyper.validate()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) == 0:
        raise DegenerateData("training data is empty")
    positives = float(y.sum())
    if positives == 0.0 or positives == float(len(y)):
        raise DegenerateData("training data must contain both classes")

    n, dim = X.shape
    names = feature_names or tuple(f"f{i}" for i in range(dim))
    if feature_names is None and dim == len(PAIR_FEATURE_NAMES):
        names = PAIR_FEATURE_NAMES

    rate = positives / len(y)
    base_score = math.log(rate / (1.0 - rate))

    rng = np.random.default_rng(seed)
    all_rows = np.arange(n)
    all_feats = np.arange(dim)
    n_bag = max(1, math.ceil(hyper.bagging_fraction * n))
    n_feats = max(1, math.ceil(hyper.feature_fraction * dim))

    raw = np.full(n, base_score, dtype=np.float64)
    split_counts = np.zeros(dim, dtype=np.int64)
    trees: list[_Tree] = []
    loss_curve: list[float] = []

    for _ in range(hyper.num_rounds):
        p = _sigmoid(raw)
        g = p - y
        h = p * (1.0 - p)

        rows = all_rows
        if n_bag < n:
            rows = np.sort(rng.permutation(n)[:n_bag])
        feats = all_feats
        if n_feats < dim:
            feats = np.sort(rng.permutation(dim)[:n_feats])

        tree = _build_tree(X, g, h, rows, feats, hyper, split_counts)
        trees.append(tree)
        raw = raw + hyper.learning_rate * tree.apply(X)
        p_new = _sigmoid(raw)
        loss = -float(np.mean(y * np.log(p_new) + (1.0 - y) * np.log(1.0 - p_new)))
        loss_curve.append(loss)

    return GbdtModel(
        trees=tuple(trees),
        base_score=base_score,
        hyper=hyper,
        split_counts=split_counts,
        feature_names=names,
        train_loss_curve=tuple(loss_curve),
    )


def train(data: list[LabeledPair], hyper: HyperPoint, seed: int) -> GbdtModel:
    """Fit ``hyper.num_rounds`` regression trees to the logistic loss gradients."""
    if not data:
        raise DegenerateData("training data is empty")
    X, y = pairs_to_arrays(data)
    return train_xy(X, y, hyper, seed)


# ── inference ────────────────────────────────────────────────────


def predict_proba_batch(model: GbdtModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"expected feature dimension {model.n_features}, got {X.shape}")
    return _sigmoid(model.raw_scores(X))


def predict_proba(model: GbdtModel, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) != model.n_features:
        raise DimensionMismatch(
            f"expected feature dimension {model.n_features}, got {x.shape}")
    return float(predict_proba_batch(model, x[None, :])[0])


def cross_entropy(data: list[LabeledPair], model: GbdtModel) -> float:
    """Mean binary cross-entropy of the model on labelled pairs."""
    if not data:
        raise ValueError("cross_entropy needs at least one sample")
    X, y = pairs_to_arrays(data)
    return cross_entropy_xy(X, y, model)


def cross_entropy_xy(X: np.ndarray, y: np.ndarray, model: GbdtModel) -> float:
    p = predict_proba_batch(model, X)
    return -float(np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def feature_importance(model: GbdtModel) -> dict[str, float]:
    """Split-frequency weights per feature; the weights sum to one."""
    total = int(model.split_counts.sum())
    if total == 0:
        raise ZeroSplits("model has no internal nodes")
    return {
        name: int(count) / total
        for name, count in zip(model.feature_names, model.split_counts)
    }


def importance_table(model: GbdtModel) -> list[tuple[int, str, float]]:
    """Category-level importance ranking (plus one row for pair-level features).

    Each category aggregates the weights of its three vector components;
    the three pair-level components (kind match and sizes) are reported
    as a single extra row so the table totals one.
    """
    weights = feature_importance(model)
    rows: list[tuple[str, float]] = []
    for category in CATEGORY_ORDER:
        total = sum(w for name, w in weights.items() if name.startswith(category.value + "_"))
        rows.append((f"{category.value} node feature", total))
    pair_level = sum(
        w for name, w in weights.items()
        if name in ("kind_match", "tree_size_ratio", "log_tree_size_sum")
    )
    rows.append(("Pair-level structure feature", pair_level))
    rows.sort(key=lambda item: (-item[1], item[0]))
    return [(rank + 1, name, weight) for rank, (name, weight) in enumerate(rows)]


# ── serialization ────────────────────────────────────────────────


def model_to_json(model: GbdtModel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "hyper": model.hyper.to_json(),
        "base_score": model.base_score,
        "feature_names": list(model.feature_names),
        "split_counts": [int(c) for c in model.split_counts],
        "train_loss_curve": list(model.train_loss_curve),
        "trees": [
            {
                "nodes": [
                    {
                        "feature": int(tree.feature[i]),
                        "threshold": float(tree.threshold[i]),
                        "left": int(tree.left[i]),
                        "right": int(tree.right[i]),
                        "value": float(tree.value[i]),
                    }
                    for i in range(len(tree.feature))
                ]
            }
            for tree in model.trees
        ],
    }


def model_from_json(data: dict) -> GbdtModel:
    trees = []
    for tree_data in data["trees"]:
        nodes = tree_data["nodes"]
        trees.append(_Tree(
            feature=np.asarray([n["feature"] for n in nodes], dtype=np.int32),
            threshold=np.asarray([n["threshold"] for n in nodes], dtype=np.float64),
            left=np.asarray([n["left"] for n in nodes], dtype=np.int32),
            right=np.asarray([n["right"] for n in nodes], dtype=np.int32),
            value=np.asarray([n["value"] for n in nodes], dtype=np.float64),
        ))
    return GbdtModel(
        trees=tuple(trees),
        base_score=float(data["base_score"]),
        hyper=HyperPoint.from_json(data["hyper"]),
        split_counts=np.asarray(data["split_counts"], dtype=np.int64),
        feature_names=tuple(data["feature_names"]),
        train_loss_curve=tuple(data.get("train_loss_curve", ())),
    )


def save_model(model: GbdtModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_json(model), indent=2) + "\n")


def load_model(path: str | Path) -> GbdtModel:
    return model_from_json(json.loads(Path(path).read_text()))
