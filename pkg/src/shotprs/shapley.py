"""Classical and restricted Shapley values over bit-mask coalitions.

Coalitions are Python ints: bit ``j`` set means roster member ``j`` is in.
Permutation weights ``s!(n-s-1)!/n!`` are handled in log space throughout.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

MAX_CLASSICAL_N = 20


class ShapleyError(ValueError):
    pass


class TooLarge(ShapleyError):
    pass


class EmptySupport(ShapleyError):
    pass


class MissingWorth(ShapleyError, KeyError):
    def __init__(self, coalition: int):
        self.coalition = coalition
        super().__init__(f"no worth recorded for coalition {coalition:#x}")


class Method(enum.Enum):
    CLASSICAL_EXACT = "classical_exact"
    RESTRICTED = "restricted"


@dataclass
class ShapleyResult:
    phi: np.ndarray                     # NaN for players without support
    method: Method
    support_sizes: np.ndarray
    missing: tuple[int, ...] = ()
    n: int = 0


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def log_shapley_weight(n: int, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return gammaln(s + 1.0) + gammaln(n - s) - gammaln(n + 1.0)


def _popcounts(n: int) -> np.ndarray:
    masks = np.arange(1 << n, dtype=np.int64)
    counts = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        counts += (masks >> j) & 1
    return counts


def classical_shapley(n: int, worth: Callable[[int], float] | Sequence[float] | np.ndarray) -> ShapleyResult:
    """Exact Shapley value by summing over all ``2**(n-1)`` coalitions per player.

    ``worth`` is either a callable on masks or an array indexed by mask;
    ``v(0)`` is whatever the game says (efficiency is against ``v(N) - v(0)``).
    """
    if n > MAX_CLASSICAL_N:
        raise TooLarge(f"n={n} exceeds {MAX_CLASSICAL_N}")
    if n < 1:
        raise ShapleyError("n must be positive")
    if callable(worth):
        v = np.array([worth(mask) for mask in range(1 << n)], dtype=float)
    else:
        v = np.asarray(worth, dtype=float)
        if v.shape != (1 << n,):
            raise ShapleyError(f"worth array must have length 2**n = {1 << n}")
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = _popcounts(n)
    weight = np.exp(log_shapley_weight(n, np.minimum(sizes, n - 1)))
    phi = np.empty(n)
    for i in range(n):
        bit = 1 << i
        without = masks[(masks & bit) == 0]
        phi[i] = np.sum(weight[without] * (v[without | bit] - v[without]))
    return ShapleyResult(phi, Method.CLASSICAL_EXACT, np.full(n, 1 << (n - 1)), n=n)


def restricted_weights(n: int, support: Sequence[int]) -> np.ndarray:
    """Shapley weights renormalized over ``support`` (masks), in the given order."""
    if len(support) == 0:
        raise EmptySupport("support is empty")
    sizes = np.array([popcount(c) for c in support])
    if sizes.max() >= n:
        raise ShapleyError(f"coalition of size {sizes.max()} cannot precede a player when n={n}")
    logw = log_shapley_weight(n, sizes)
    return np.exp(logw - logsumexp(logw))


@dataclass
class RestrictedSupport:
    player: int
    coalitions: tuple[int, ...]
    observed: tuple[bool, ...] = ()
    weights: np.ndarray | None = field(default=None, repr=False)


def restricted_shapley(
    n: int,
    supports: Mapping[int, RestrictedSupport],
    worth: Mapping[int, float],
    players: Sequence[int] | None = None,
) -> ShapleyResult:
    """Restricted Shapley value of each roster index in ``players``.

    Players missing from ``supports`` get NaN and are listed in ``missing``.
    ``worth`` must resolve every ``C`` and ``C | {i}`` referenced.
    """
    players = list(range(n)) if players is None else list(players)
    phi = np.full(len(players), np.nan)
    sizes = np.zeros(len(players), dtype=int)
    missing = []
    for k, i in enumerate(players):
        sup = supports.get(i)
        if sup is None or not sup.coalitions:
            missing.append(i)
            continue
        w = sup.weights if sup.weights is not None else restricted_weights(n, sup.coalitions)
        bit = 1 << i
        total = 0.0
        for c, wc in zip(sup.coalitions, w):
            if c & bit:
                raise ShapleyError(f"player {i} is inside support coalition {c:#x}")
            try:
                total += wc * (worth[c | bit] - worth[c])
            except KeyError as exc:
                raise MissingWorth(exc.args[0]) from None
        phi[k] = total
        sizes[k] = len(sup.coalitions)
    return ShapleyResult(phi, Method.RESTRICTED, sizes, tuple(missing), n)


class SupportIndex:
    """Restricted Shapley evaluation compiled against a fixed coalition order.

    ``coalitions`` fixes the position of every coalition in a worth vector;
    :meth:`evaluate` then maps a worth vector (or a stack of them) to the
    players' values with one gather and one dot product per player.
    """

    def __init__(self, n: int, supports: Mapping[int, RestrictedSupport], coalitions: Sequence[int],
                 players: Sequence[int]):
        self.n = n
        self.players = list(players)
        self.coalitions = list(coalitions)
        pos = {c: j for j, c in enumerate(self.coalitions)}
        self.terms: list[tuple[np.ndarray, np.ndarray, np.ndarray] | None] = []
        for i in self.players:
            sup = supports.get(i)
            if sup is None or not sup.coalitions:
                self.terms.append(None)
                continue
            w = sup.weights if sup.weights is not None else restricted_weights(n, sup.coalitions)
            bit = 1 << i
            try:
                without = np.array([pos[c] for c in sup.coalitions])
                with_i = np.array([pos[c | bit] for c in sup.coalitions])
            except KeyError as exc:
                raise MissingWorth(exc.args[0]) from None
            self.terms.append((np.asarray(w), with_i, without))

    def evaluate(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = np.full(v.shape[:-1] + (len(self.players),), np.nan)
        for k, term in enumerate(self.terms):
            if term is None:
                continue
            w, with_i, without = term
            out[..., k] = (v[..., with_i] - v[..., without]) @ w
        return out
