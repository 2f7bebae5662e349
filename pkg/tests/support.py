"""Shared test fixtures: random ergodic systems and brute-force oracles.

Oracles here are written independently of the library internals (direct
matrix powers, stacked least squares, exhaustive subset search) so that
agreement is evidence, not tautology.
"""

from __future__ import annotations

import itertools

import numpy as np

from netctl import ConsensusSystem, WeightedDigraph, build_graph


def two_node_system() -> ConsensusSystem:
    """Complete 2-node averaging network, source {0}, targets {0, 1}."""
    g = build_graph(2, [(0, 0, 0.5), (1, 0, 0.5), (0, 1, 0.5), (1, 1, 0.5)])
    return ConsensusSystem(g, [0], [0, 1])


def three_chain_system() -> ConsensusSystem:
    """3-node path with self-loops, source {0}, target {2}."""
    g = build_graph(
        3,
        [
            (0, 0, 0.5),
            (1, 0, 0.5),
            (0, 1, 1.0 / 3.0),
            (1, 1, 1.0 / 3.0),
            (2, 1, 1.0 / 3.0),
            (1, 2, 0.5),
            (2, 2, 0.5),
        ],
    )
    return ConsensusSystem(g, [0], [2])


def random_ergodic_graph(rng: np.random.Generator, n: int) -> WeightedDigraph:
    """Random strongly connected aperiodic graph on n nodes.

    A random spanning tree made bidirectional guarantees strong
    connectivity; a self-loop at every node guarantees aperiodicity.
    Incoming weights are drawn uniform on [0.2, 1] then normalized to
    sum to one per node.
    """
    pairs = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        pairs.add((u, v))
        pairs.add((v, u))
    extra = rng.random((n, n)) < 0.3
    for u in range(n):
        for v in range(n):
            if u != v and extra[u, v]:
                pairs.add((u, v))
    raw = {}
    for v in range(n):
        incoming = [u for u in range(n) if (u, v) in pairs] + [v]
        weights = rng.uniform(0.2, 1.0, size=len(incoming))
        weights /= weights.sum()
        for u, w in zip(incoming, weights):
            raw[(u, v)] = float(w)
    edges = [(u, v, w) for (u, v), w in sorted(raw.items())]
    return build_graph(n, edges)


def random_ergodic_system(
    seed_key,
    n_low: int = 3,
    n_high: int = 6,
    num_sources: int | None = None,
    num_targets: int | None = None,
) -> ConsensusSystem:
    """Deterministic random system keyed by an integer sequence.

    seed_key seeds an independent substream, so each instance is stable
    regardless of test ordering.
    """
    rng = np.random.default_rng(seed_key)
    n = int(rng.integers(n_low, n_high + 1))
    graph = random_ergodic_graph(rng, n)
    m = num_sources if num_sources is not None else int(rng.integers(1, max(2, n // 2) + 1))
    p = num_targets if num_targets is not None else int(rng.integers(1, n + 1))
    sources = rng.choice(n, size=min(m, n), replace=False)
    targets = rng.choice(n, size=min(p, n), replace=False)
    return ConsensusSystem(graph, sources.tolist(), targets.tolist())


# ---------------------------------------------------------------- oracles


def naive_gramian(a: np.ndarray, b: np.ndarray, kf: int) -> np.ndarray:
    """Direct definition: sum of (A^i B)(A^i B)^T for i < kf."""
    n = a.shape[0]
    total = np.zeros((n, n))
    for i in range(kf):
        aib = np.linalg.matrix_power(a, i) @ b
        total += aib @ aib.T
    return total


def stacked_input_map(system: ConsensusSystem, kf: int) -> np.ndarray:
    """Map from the stacked input [u0; u1; ...] to the final target output."""
    blocks = []
    for i in range(kf):
        power = np.linalg.matrix_power(system.A, kf - 1 - i)
        blocks.append(system.C @ power @ system.B)
    return np.hstack(blocks)


def least_squares_energy(system: ConsensusSystem, kf: int, goal: np.ndarray) -> float:
    """Minimum-norm stacked least squares; independent of any Gramian."""
    g = stacked_input_map(system, kf)
    u, *_ = np.linalg.lstsq(g, goal, rcond=None)
    achieved = g @ u
    if not np.allclose(achieved, goal, atol=1e-9):
        raise AssertionError("goal not reachable in oracle")
    return float(u @ u)


def separates(
    graph: WeightedDigraph, sources, targets, cut: frozenset[int]
) -> bool:
    """Path-based separation test: BFS over edges, avoiding cut nodes."""
    start = [s for s in sources if s not in cut]
    blocked_targets = {t for t in targets if t not in cut}
    if not blocked_targets:
        return True
    adj: dict[int, list[int]] = {v: [] for v in range(graph.n)}
    for u, v, _ in graph.edges:
        if u != v:
            adj[u].append(v)
    seen = set(start)
    frontier = list(start)
    while frontier:
        u = frontier.pop()
        if u in blocked_targets:
            return False
        for v in adj[u]:
            if v not in cut and v not in seen:
                seen.add(v)
                frontier.append(v)
    return True


def brute_min_cutset(graph: WeightedDigraph, sources, targets) -> tuple[int, ...]:
    """Exhaustive minimum separating cutset, interior nodes preferred.

    Tries subsets of increasing size in lexicographic order, first over
    nodes outside sources+targets, then over all nodes. Only viable for
    small n.
    """
    s = set(sources)
    t = set(targets)
    interior = [v for v in range(graph.n) if v not in s and v not in t]
    for pool in (interior, list(range(graph.n))):
        for size in range(0, len(pool) + 1):
            for combo in itertools.combinations(sorted(pool), size):
                if separates(graph, s, t, frozenset(combo)):
                    return tuple(combo)
    raise AssertionError("unreachable: full vertex set always separates")


def brute_reach_horizon(a: np.ndarray, sources, block) -> int:
    """Smallest k with (A^(k-1))[l, z] > 0 for all block nodes l, sources z."""
    n = a.shape[0]
    src = sorted(set(sources))
    rows = sorted(set(block))
    for k in range(1, (n - 1) ** 2 + 3):
        p = np.linalg.matrix_power(a, k - 1)
        if np.all(p[np.ix_(rows, src)] > 0.0):
            return k
    raise AssertionError("no positive horizon within the search bound")
