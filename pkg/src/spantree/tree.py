"""Spanning-tree representation and incidence-matrix algebra.

A tree on p nodes is stored as p-1 canonical edges (j, k) with j < k,
0-based.  The incidence matrix B puts +1 at the smaller node index of each
edge and -1 at the larger one; only B B^T and projections enter any formula,
so the orientation is free and this convention keeps outputs reproducible.
"""

import heapq
from dataclasses import dataclass, field

import numpy as np

from spantree import kernels
from spantree.errors import GramDriftError, TreeStructureError

GRAM_INVERSE_TOL = 1e-8


def canonical_edge(j, k):
    if j == k:
        raise TreeStructureError("self-loop (%d, %d)" % (j, k))
    return (j, k) if j < k else (k, j)


@dataclass(frozen=True)
class SpanningTree:
    p: int
    edges: tuple = field(default=())

    @classmethod
    def from_edges(cls, p, edges):
        edges = tuple(canonical_edge(int(j), int(k)) for j, k in edges)
        if len(edges) != p - 1:
            raise TreeStructureError(
                "expected %d edges for p=%d, got %d" % (p - 1, p, len(edges))
            )
        if len(set(edges)) != len(edges):
            raise TreeStructureError("duplicate edges")
        for j, k in edges:
            if not (0 <= j < p and 0 <= k < p):
                raise TreeStructureError("node index out of range in (%d, %d)" % (j, k))
        # Union-find connectivity; p-1 edges + no cycle <=> spanning tree.
        parent = list(range(p))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for j, k in edges:
            rj, rk = find(j), find(k)
            if rj == rk:
                raise TreeStructureError("edge set contains a cycle / is disconnected")
            parent[rj] = rk
        return cls(p=p, edges=edges)

    @property
    def adjacency(self):
        a = np.zeros((self.p, self.p), dtype=np.int8)
        for j, k in self.edges:
            a[j, k] = a[k, j] = 1
        return a

    @property
    def degrees(self):
        d = np.zeros(self.p, dtype=np.intp)
        for j, k in self.edges:
            d[j] += 1
            d[k] += 1
        return d

    def edge_set(self):
        return frozenset(self.edges)


def prufer_to_edges(seq, p):
    """Decode a Prufer sequence (length p-2, entries in 0..p-1) to tree edges."""
    seq = list(seq)
    degree = [1] * p
    for x in seq:
        degree[x] += 1
    edges = []
    leaves = [i for i in range(p) if degree[i] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append(canonical_edge(leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    last = sorted(leaves)
    edges.append(canonical_edge(last[0], last[1]))
    return edges


def random_tree(p, rng):
    """Uniform random labeled tree via a random Prufer sequence."""
    if p == 1:
        return SpanningTree.from_edges(1, [])
    if p == 2:
        return SpanningTree.from_edges(2, [(0, 1)])
    seq = rng.integers(0, p, size=p - 2)
    return SpanningTree.from_edges(p, prufer_to_edges(seq, p))


def save_edges_csv(tree, path):
    """Edge-list CSV with header "j,k", 1-based node indices, j < k."""
    with open(path, "w") as fh:
        fh.write("j,k\n")
        for j, k in tree.edges:
            fh.write("%d,%d\n" % (j + 1, k + 1))


def load_edges_csv(path, p=None):
    rows = np.loadtxt(path, dtype=int, delimiter=",", skiprows=1, ndmin=2)
    edges = [(int(j) - 1, int(k) - 1) for j, k in rows]
    if p is None:
        p = max(max(j, k) for j, k in edges) + 1
    return SpanningTree.from_edges(p, edges)


@dataclass(frozen=True)
class CutPartition:
    v1: np.ndarray
    v2: np.ndarray
    cut_edge: tuple


class IncidenceMatrix:
    """Incidence matrix of a spanning tree with a maintained Gram inverse.

    The cached (B^T B)^{-1} is updated in O(p) block arithmetic per edge swap
    and fully recomputed every p swaps (or on any drift signal) to bound
    numerical drift.
    """

    def __init__(self, tree):
        if not isinstance(tree, SpanningTree):
            tree = SpanningTree.from_edges(tree[0], tree[1])
        self.p = tree.p
        self.ej = np.array([e[0] for e in tree.edges], dtype=np.intp)
        self.ek = np.array([e[1] for e in tree.edges], dtype=np.intp)
        self._swaps_since_refresh = 0
        self.refresh()

    @property
    def B(self):
        b = np.zeros((self.p, self.p - 1))
        cols = np.arange(self.p - 1)
        b[self.ej, cols] = 1.0
        b[self.ek, cols] = -1.0
        return b

    @property
    def edges(self):
        return list(zip(self.ej.tolist(), self.ek.tolist()))

    def to_tree(self):
        return SpanningTree.from_edges(self.p, self.edges)

    def refresh(self):
        b = self.B
        self.gram_inverse = np.linalg.inv(b.T @ b)
        self._swaps_since_refresh = 0

    def _count_swap(self):
        self._swaps_since_refresh += 1
        if self._swaps_since_refresh >= self.p:
            self.refresh()

    def cut_partition(self, s):
        """Traversal-free graph cut of edge s via the nullspace projection."""
        try:
            beta = kernels.cut_vector(self.gram_inverse, self.ej, self.ek, s)
            v1, v2 = kernels.partition_from_cut_vector(beta, self.ej[s], self.ek[s])
        except GramDriftError:
            self.refresh()
            beta = kernels.cut_vector(self.gram_inverse, self.ej, self.ek, s)
            v1, v2 = kernels.partition_from_cut_vector(beta, self.ej[s], self.ek[s])
        return CutPartition(v1=v1, v2=v2, cut_edge=(int(self.ej[s]), int(self.ek[s])))

    def extract_reduced_gram_inverse(self, s):
        try:
            return kernels.reduced_gram_inverse(self.gram_inverse, s)
        except GramDriftError:
            self.refresh()
            return kernels.reduced_gram_inverse(self.gram_inverse, s)

    def swap_edge_update(self, s, new_edge):
        """Replace edge s by new_edge; new_edge must cross the cut of edge s."""
        jn, kn = canonical_edge(int(new_edge[0]), int(new_edge[1]))
        if (jn, kn) == (int(self.ej[s]), int(self.ek[s])):
            return
        kernels.swap_gram_inverse(self.gram_inverse, self.ej, self.ek, s, jn, kn)
        self._count_swap()

    def gibbs_edge_update(self, s, q, u):
        """Cut-and-reconnect Gibbs move for edge s; u is a Uniform(0,1) draw."""
        try:
            jn, kn, swapped = kernels.gibbs_edge_update(
                self.gram_inverse, self.ej, self.ek, s, q, u
            )
        except GramDriftError:
            self.refresh()
            jn, kn, swapped = kernels.gibbs_edge_update(
                self.gram_inverse, self.ej, self.ek, s, q, u
            )
        if swapped:
            self._count_swap()
        return jn, kn, swapped


def build_incidence(tree):
    """Incidence matrix with a freshly computed Gram inverse; validates the tree."""
    return IncidenceMatrix(tree)
