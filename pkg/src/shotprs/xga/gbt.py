"""Small gradient-boosted tree learner for logistic loss.

Trees are grown greedily on second-order gains (gradient ``p - y``, hessian
``p (1 - p)``), splitting on exact midpoints between consecutive distinct
feature values.  Each feature column is sorted once per fit; a node's sorted
view is recovered by masking that order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

SCORE_CLIP = 30.0


@dataclass
class Tree:
    feature: np.ndarray      # -1 marks a leaf
    threshold: np.ndarray    # go left when x <= threshold
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray        # leaf score, learning rate already applied
    gain: np.ndarray         # loss reduction at internal nodes

    @property
    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] < 0:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))
        return walk(0)

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return self.value[node]
            r = rows[inner]
            n = node[inner]
            go_left = X[r, f[inner]] <= self.threshold[n]
            node[inner] = np.where(go_left, self.left[n], self.right[n])

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in ("feature", "threshold", "left", "right", "value", "gain")}

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        ints = ("feature", "left", "right")
        return cls(**{k: np.asarray(v, dtype=np.int64 if k in ints else float) for k, v in d.items()})


@dataclass
class Ensemble:
    base_score: float
    trees: list[Tree]

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        score = np.full(X.shape[0], self.base_score)
        for t in self.trees:
            score += t.predict(X)
        return score

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(np.clip(self.decision_function(X), -SCORE_CLIP, SCORE_CLIP))

    def gain_importance(self, n_features: int) -> np.ndarray:
        total = np.zeros(n_features)
        for t in self.trees:
            inner = t.feature >= 0
            np.add.at(total, t.feature[inner], t.gain[inner])
        return total


def _grow(X, XT, order, g, h, in_bag, max_depth, min_leaf, reg_lambda, learning_rate):
    feature, threshold, left, right, value, gain = [], [], [], [], [], []
    truncated = 0

    def new_node():
        for lst, v in ((feature, -1), (threshold, 0.0), (left, -1), (right, -1), (value, 0.0), (gain, 0.0)):
            lst.append(v)
        return len(feature) - 1

    stack = [(new_node(), in_bag, 0)]
    while stack:
        node, mask, depth = stack.pop()
        G, Hs = g[mask].sum(), h[mask].sum()
        value[node] = -learning_rate * G / (Hs + reg_lambda)
        m = int(mask.sum())
        if depth >= max_depth or m < 2 * min_leaf:
            continue
        keep = mask[order]
        sel = order[keep].reshape(order.shape[0], m)
        xs = np.take_along_axis(XT, sel, axis=1)
        GL = np.cumsum(g[sel], axis=1)[:, :-1]
        HL = np.cumsum(h[sel], axis=1)[:, :-1]
        GR, HR = G - GL, Hs - HL
        scores = GL**2 / (HL + reg_lambda) + GR**2 / (HR + reg_lambda)
        valid = xs[:, :-1] < xs[:, 1:]
        pos = np.arange(1, m)
        valid &= (pos >= min_leaf)[None, :] & ((m - pos) >= min_leaf)[None, :]
        if not valid.any():
            truncated += 1
            continue
        scores = np.where(valid, scores, -np.inf)
        f, j = np.unravel_index(np.argmax(scores), scores.shape)
        best = 0.5 * (scores[f, j] - G**2 / (Hs + reg_lambda))
        if not best > 1e-12:
            truncated += 1
            continue
        thr = 0.5 * (xs[f, j] + xs[f, j + 1])
        if not xs[f, j] <= thr < xs[f, j + 1]:
            thr = xs[f, j]
        goes_left = X[:, f] <= thr
        feature[node], threshold[node], gain[node] = int(f), float(thr), float(best)
        value[node] = 0.0
        lnode, rnode = new_node(), new_node()
        left[node], right[node] = lnode, rnode
        stack.append((rnode, mask & ~goes_left, depth + 1))
        stack.append((lnode, mask & goes_left, depth + 1))

    tree = Tree(np.array(feature, dtype=np.int64), np.array(threshold), np.array(left, dtype=np.int64),
                np.array(right, dtype=np.int64), np.array(value), np.array(gain))
    return tree, truncated


def fit_gbt(
    X: np.ndarray,
    y: np.ndarray,
    rounds: int = 200,
    learning_rate: float = 0.1,
    max_depth: int = 3,
    subsample: float = 0.8,
    min_leaf: int = 10,
    seed: int = 0,
    reg_lambda: float = 1.0,
) -> tuple[Ensemble, dict]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2 * min_leaf:
        raise ValueError(f"need at least 2*min_leaf={2 * min_leaf} rows, got {n}")
    if y.min() == y.max():
        raise ValueError("outcome vector must contain both classes")
    if not 0.0 < subsample <= 1.0:
        raise ValueError("subsample must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    prevalence = y.mean()
    ens = Ensemble(float(np.log(prevalence / (1.0 - prevalence))), [])
    XT = np.ascontiguousarray(X.T)
    order = np.argsort(XT, axis=1, kind="stable")
    score = np.full(n, ens.base_score)
    n_bag = max(int(round(subsample * n)), 1)
    truncated_per_round = []
    for _ in range(rounds):
        p = expit(score)
        g, h = p - y, p * (1.0 - p)
        if n_bag < n:
            in_bag = np.zeros(n, dtype=bool)
            in_bag[rng.choice(n, size=n_bag, replace=False)] = True
        else:
            in_bag = np.ones(n, dtype=bool)
        tree, truncated = _grow(X, XT, order, g, h, in_bag, max_depth, min_leaf, reg_lambda, learning_rate)
        ens.trees.append(tree)
        truncated_per_round.append(truncated)
        score += tree.predict(X)
    meta = {
        "seed": int(seed),
        "iterations": rounds,
        "converged": True,
        "degenerate_splits": truncated_per_round,
    }
    return ens, meta
