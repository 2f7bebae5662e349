"""Controllability Gramians of discrete-time consensus systems.

The system is x[k+1] = A x[k] + B u[k], y[k] = C x[k] with A the
row-stochastic update matrix of an ergodic graph, B a 0-1 column selector for
the source nodes and C a 0-1 row selector for the target nodes. The finite
horizon Gramian is the sum over k < k_f of (A^k B)(A^k B)^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, NotErgodic
from .kernels import SymMatrix
from .netgraph import WeightedDigraph, ergodicity, node_set

PERRON_TOL = 1e-13
PERRON_MAX_ITER = 10**6


class ConsensusSystem:
    """Ergodic consensus model with fixed source and target node sets.

    Attributes A (n x n), B (n x m) and C (p x n) are read-only float arrays;
    sources and targets are ascending node tuples.
    """

    def __init__(self, graph: WeightedDigraph, sources, targets):
        self.graph = graph
        self.sources = node_set(sources, graph.n)
        self.targets = node_set(targets, graph.n)
        if not self.sources:
            raise ValueError("sources must be nonempty")
        if not self.targets:
            raise ValueError("targets must be nonempty")
        report = ergodicity(graph)
        if not (report.irreducible and report.aperiodic):
            raise NotErgodic(
                f"graph is not ergodic (irreducible={report.irreducible}, "
                f"aperiodic={report.aperiodic}, period={report.period})"
            )
        self.A = graph.stochastic_matrix()
        b = np.zeros((graph.n, len(self.sources)))
        for col, node in enumerate(self.sources):
            b[node, col] = 1.0
        b.setflags(write=False)
        self.B = b
        c = np.zeros((len(self.targets), graph.n))
        for row, node in enumerate(self.targets):
            c[row, node] = 1.0
        c.setflags(write=False)
        self.C = c

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return len(self.sources)

    @property
    def p(self) -> int:
        return len(self.targets)

    def __repr__(self):
        return (
            f"ConsensusSystem(n={self.n}, sources={self.sources}, "
            f"targets={self.targets})"
        )


@dataclass(frozen=True)
class GramianBundle:
    """A Gramian together with the horizon it was accumulated over."""

    kf: int
    W: SymMatrix


def _check_horizon(kf) -> int:
    kf = int(kf)
    if kf < 1:
        raise ValueError(f"horizon must be at least 1, got {kf}")
    return kf


def compute_gramian(system: ConsensusSystem, kf: int) -> GramianBundle:
    """Accumulate the horizon-kf controllability Gramian.

    Propagates X_k = A^k B one step at a time, summing X_k X_k^T for
    k = 0..kf-1 in that order, and symmetrizes once at the end.
    """
    kf = _check_horizon(kf)
    x = system.B.copy()
    w = np.zeros((system.n, system.n))
    for _ in range(kf):
        w += x @ x.T
        x = system.A @ x
    return GramianBundle(kf=kf, W=SymMatrix(0.5 * (w + w.T)))


def gramian_submatrix(bundle: GramianBundle, node_ids) -> SymMatrix:
    """Principal Gramian block on the given nodes (ascending order)."""
    ids = node_set(node_ids, bundle.W.order)
    if not ids:
        raise ValueError("node set must be nonempty")
    return bundle.W.submatrix(ids)


def impulse_response(system: ConsensusSystem, z: int, l: int, kf: int) -> np.ndarray:
    """Response at node l to a unit impulse injected at source node z.

    Entry k is the (l, z) entry of A^k, for k = 0..kf-1. z must be a source.
    """
    kf = _check_horizon(kf)
    if z not in system.sources:
        raise ValueError(f"node {z} is not a source")
    (l,) = node_set([l], system.n)
    x = np.zeros(system.n)
    x[z] = 1.0
    h = np.empty(kf)
    for k in range(kf):
        h[k] = x[l]
        x = system.A @ x
    return h


def gramian_from_impulses(system: ConsensusSystem, node_ids, kf: int) -> SymMatrix:
    """Gramian block assembled from per-source impulse responses.

    Entry (a, b) is the sum over sources z of the inner product of the
    length-kf responses at nodes a and b to an impulse at z. Serves as an
    independent cross-check of compute_gramian + gramian_submatrix.
    """
    kf = _check_horizon(kf)
    ids = node_set(node_ids, system.n)
    if not ids:
        raise ValueError("node set must be nonempty")
    rows = list(ids)
    q = np.zeros((len(ids), len(ids)))
    for z in system.sources:
        x = np.zeros(system.n)
        x[z] = 1.0
        h = np.empty((kf, len(ids)))
        for k in range(kf):
            h[k] = x[rows]
            x = system.A @ x
        q += h.T @ h
    return SymMatrix(0.5 * (q + q.T))


def min_positive_horizon(system: ConsensusSystem, node_ids) -> int:
    """Smallest horizon k* making every source-to-node response positive.

    k* is the least k such that A^(k-1) has a strictly positive entry at
    (l, z) for every listed node l and source z. Ergodicity bounds k* by
    (n-1)^2 + 2, so the search always terminates.
    """
    ids = node_set(node_ids, system.n)
    if not ids:
        raise ValueError("node set must be nonempty")
    rows = list(ids)
    pattern = system.A > 0.0
    reach = np.zeros((system.n, system.m), dtype=bool)
    for col, z in enumerate(system.sources):
        reach[z, col] = True
    bound = (system.n - 1) ** 2 + 2
    for k in range(bound):
        if reach[rows].all():
            return k + 1
        reach = (pattern @ reach) > 0
    raise AssertionError("positivity bound exceeded; graph cannot be ergodic")


def left_perron(system: ConsensusSystem) -> np.ndarray:
    """Left Perron vector of A: w > 0, sum(w) = 1, w^T A = w^T.

    Power iteration on A^T, stopping when the stationarity residual drops
    below PERRON_TOL in the max norm.
    """
    w = np.full(system.n, 1.0 / system.n)
    at = system.A.T
    for _ in range(PERRON_MAX_ITER):
        nxt = at @ w
        nxt /= nxt.sum()
        if float(np.max(np.abs(nxt - w))) <= PERRON_TOL:
            if float(nxt.min()) <= 0.0:
                raise ConvergenceFailure("stationary vector has a non-positive entry")
            return nxt
        w = nxt
    raise ConvergenceFailure(
        f"left Perron iteration did not converge in {PERRON_MAX_ITER} steps"
    )


@dataclass(frozen=True)
class AsymptoticDecomposition:
    """Split of a Gramian block into its rank-one growth term and remainder.

    The block on node set V satisfies W(V, kf) = coeff * ones + H where
    coeff = kf * sum of squared stationary weights over the sources, and the
    entries of H stay bounded as kf grows.
    """

    kf: int
    perron_weight: float
    rank_one_coefficient: float
    residual: SymMatrix
    residual_bound: float


def asymptotic_decomposition(
    system: ConsensusSystem, node_ids, kf: int, bundle: GramianBundle | None = None
) -> AsymptoticDecomposition:
    """Decompose the Gramian block on node_ids at horizon kf.

    An already computed bundle for the same horizon may be passed to avoid
    recomputing the Gramian.
    """
    kf = _check_horizon(kf)
    if bundle is None:
        bundle = compute_gramian(system, kf)
    elif bundle.kf != kf:
        raise ValueError(f"bundle horizon {bundle.kf} does not match kf={kf}")
    q = gramian_submatrix(bundle, node_ids).array
    w = left_perron(system)
    weight = float(np.sum(w[list(system.sources)] ** 2))
    coeff = kf * weight
    h = q - coeff * np.ones_like(q)
    return AsymptoticDecomposition(
        kf=kf,
        perron_weight=weight,
        rank_one_coefficient=coeff,
        residual=SymMatrix(h),
        residual_bound=float(np.max(np.abs(h))),
    )
