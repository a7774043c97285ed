"""Directed communication graph operations for consensus analysis.

The adjacency convention is receiver-major: ``a[i, j] = 1`` means node i uses
data sent by node j, so information flows along j -> i. In-degree of node i is
the row sum of row i.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from .config import CommGraph

__all__ = [
    "laplacian",
    "delayed_adjacency",
    "consensus_closed_loop_matrix",
    "has_spanning_tree_from_leaders",
]


def laplacian(graph: CommGraph) -> np.ndarray:
    """In-degree graph Laplacian L = D - A; every row sums to zero."""
    a = graph.adjacency
    return np.diag(a.sum(axis=1)) - a


def delayed_adjacency(graph: CommGraph, s: complex) -> np.ndarray:
    """Adjacency with each edge weighted by its latency phase exp(-tau s)."""
    return graph.adjacency * np.exp(-graph.latency * complex(s))


def consensus_closed_loop_matrix(graph: CommGraph) -> np.ndarray:
    """System matrix -L - diag(theta) of the delay-free first-order consensus.

    This is the textbook leader-follower consensus loop: all eigenvalues lie
    in the open left half plane exactly when every node is reachable from the
    leader set.
    """
    return -laplacian(graph) - np.diag(graph.leaders)


def has_spanning_tree_from_leaders(graph: CommGraph) -> bool:
    """True iff every node is reachable from some leader along j -> i edges.

    Equivalent to reachability from a virtual root connected to all leaders.
    """
    n = graph.n
    leaders = np.flatnonzero(graph.leaders > 0)
    if leaders.size == 0:
        return False
    seen = np.zeros(n, dtype=bool)
    queue = deque(int(i) for i in leaders)
    seen[leaders] = True
    a = graph.adjacency
    while queue:
        j = queue.popleft()
        # node i hears j when a[i, j] = 1
        for i in np.flatnonzero(a[:, j] > 0):
            if not seen[i]:
                seen[i] = True
                queue.append(int(i))
    return bool(seen.all())
