"""Weisfeiler-Lehman relabeling, per-iteration label histograms, and the subtree kernel."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph_core import LabeledGraph


class LabelDictionary:
    """Append-only bidirectional map from compressed-label strings to dense ids.

    Id assignment is insertion-ordered, so processing the same graphs in the
    same order always produces the same ids. Shared across all graphs in a run
    to keep histogram coordinates aligned.
    """

    def __init__(self, labels: Iterable[str] = ()):
        self._labels: list[str] = []
        self._ids: dict[str, int] = {}
        for lab in labels:
            self.get_or_add(lab)

    def __len__(self) -> int:
        return len(self._labels)

    def get_or_add(self, label: str) -> int:
        i = self._ids.get(label)
        if i is None:
            i = len(self._labels)
            self._ids[label] = i
            self._labels.append(label)
        return i

    def id_of(self, label: str) -> int | None:
        return self._ids.get(label)

    def label_of(self, i: int) -> str:
        return self._labels[i]

    def snapshot(self) -> tuple[str, ...]:
        return tuple(self._labels)

    def child(self) -> "_OverlayDictionary":
        """A copy-on-write view: lookups fall through to this dictionary, new
        labels land in the overlay only. Keeps query-time extraction from
        shifting a trained model's ids."""
        return _OverlayDictionary(self)


class _OverlayDictionary:
    def __init__(self, base: "LabelDictionary | _OverlayDictionary"):
        self._base = base
        self._offset = len(base)
        self._labels: list[str] = []
        self._ids: dict[str, int] = {}

    def __len__(self) -> int:
        return self._offset + len(self._labels)

    def get_or_add(self, label: str) -> int:
        i = self._base.id_of(label)
        if i is not None:
            return i
        i = self._ids.get(label)
        if i is None:
            i = self._offset + len(self._labels)
            self._ids[label] = i
            self._labels.append(label)
        return i

    def id_of(self, label: str) -> int | None:
        i = self._base.id_of(label)
        if i is not None:
            return i
        return self._ids.get(label)

    def child(self) -> "_OverlayDictionary":
        return _OverlayDictionary(self)


@dataclass(frozen=True)
class WlFeatureVector:
    """Sparse concatenated histogram: (iteration h, label id) -> count, h = 0..H."""

    counts: Mapping[tuple[int, int], int]
    wl_iters: int

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))

    def iteration_sums(self) -> list[int]:
        sums = [0] * (self.wl_iters + 1)
        for (h, _), c in self.counts.items():
            sums[h] += c
        return sums


def initial_labels(g: LabeledGraph, dictionary) -> list[int]:
    return [dictionary.get_or_add(lab) for lab in g.node_labels]


def wl_relabel_step(g: LabeledGraph, labels: Sequence[int], dictionary) -> list[int]:
    """One WL iteration: each node's new label compresses its own label followed
    by the sorted list of its neighbors' labels."""
    neighbors = g.neighbors
    get_or_add = dictionary.get_or_add
    new = []
    for v in range(g.n):
        neigh = sorted(labels[u] for u in neighbors[v])
        neigh.insert(0, labels[v])
        new.append(get_or_add("|".join(map(str, neigh))))
    return new


def wl_feature_vector(g: LabeledGraph, wl_iters: int, dictionary) -> WlFeatureVector:
    """Concatenated label histograms for h = 0..wl_iters (h=0 counts raw labels)."""
    if wl_iters < 0:
        raise ValueError("wl_iters must be >= 0")
    counts: dict[tuple[int, int], int] = {}
    labels = initial_labels(g, dictionary)
    for h in range(wl_iters + 1):
        for lab in labels:
            key = (h, lab)
            counts[key] = counts.get(key, 0) + 1
        if h < wl_iters:
            labels = wl_relabel_step(g, labels, dictionary)
    return WlFeatureVector(counts, wl_iters)


def wl_feature_vectors(graphs: Sequence[LabeledGraph], wl_iters: int, dictionary) -> list[WlFeatureVector]:
    return [wl_feature_vector(g, wl_iters, dictionary) for g in graphs]


def sparse_dot(a: Mapping, b: Mapping):
    """Dot product of two sparse maps (ints in, int out; floats propagate)."""
    if len(b) < len(a):
        a, b = b, a
    return sum(v * b[k] for k, v in a.items() if k in b)


def wl_kernel_matrix(
    graphs: Sequence[LabeledGraph],
    wl_iters: int = 3,
    normalize: bool = False,
    dictionary: LabelDictionary | None = None,
) -> np.ndarray:
    """Gram matrix of the WL subtree kernel: K[i][j] = dot(phi(g_i), phi(g_j)).

    With normalize=True returns K[i][j] / sqrt(K[i][i] * K[j][j]) so the
    diagonal is exactly 1.
    """
    if dictionary is None:
        dictionary = LabelDictionary()
    vecs = wl_feature_vectors(graphs, wl_iters, dictionary)
    m = len(vecs)
    k = np.zeros((m, m))
    for i in range(m):
        for j in range(i, m):
            val = float(sparse_dot(vecs[i].counts, vecs[j].counts))
            k[i, j] = val
            k[j, i] = val
    if normalize:
        d = np.sqrt(np.diag(k))
        d[d == 0] = 1.0
        k = k / np.outer(d, d)
        np.fill_diagonal(k, 1.0)
    return k
