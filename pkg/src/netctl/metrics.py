"""Target-control energy and security metrics.

All quantities derive from the Gramian block on the target set: the minimum
input energy that moves the targets to a goal, the least-energy ("least
secure") goal direction, per-projection and per-node energies, and the
security floor obtained from the full-network Gramian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DegenerateProjection,
    DimensionMismatch,
    NodeUnreachable,
    NotControllable,
)
from .gramian import ConsensusSystem, GramianBundle, compute_gramian, gramian_submatrix
from .netgraph import node_set

# Diagonal Gramian entries at or below this are treated as structural zeros.
UNREACHABLE_TOL = 1e-14
# A projection is degenerate when its quadratic form is below this times lambda_max.
DEGENERATE_RTOL = 1e-14


@dataclass(frozen=True)
class ControllabilityWitness:
    """Outcome of the target-controllability test with its spectral witness."""

    controllable: bool
    lambda_min: float
    lambda_max: float

    def __bool__(self) -> bool:
        return self.controllable


@dataclass(frozen=True)
class InputSequence:
    """Input schedule u[0..kf-1], each row one time step, with its energy."""

    kf: int
    u: np.ndarray
    energy: float


@dataclass(frozen=True)
class MetricsReport:
    """Summary of target-control security metrics at one horizon."""

    kf: int
    controllable: bool
    lambda_min: float
    lambda_max: float
    E_min: float
    y_min: np.ndarray
    F_min: float
    j_min: int
    node_energies: np.ndarray

    def to_json_dict(self) -> dict:
        """JSON-safe dict; non-finite energies serialize as null."""

        def scrub(x: float):
            return float(x) if math.isfinite(x) else None

        return {
            "kf": self.kf,
            "controllable": self.controllable,
            "lambda_min": float(self.lambda_min),
            "lambda_max": float(self.lambda_max),
            "E_min": scrub(self.E_min),
            "y_min": [float(v) for v in self.y_min],
            "F_min": scrub(self.F_min),
            "j_min": int(self.j_min),
            "node_energies": [scrub(v) for v in self.node_energies],
        }


def target_gramian(
    system: ConsensusSystem, kf: int, bundle: GramianBundle | None = None
) -> kernels.SymMatrix:
    """Gramian block on the system's target set."""
    if bundle is None:
        bundle = compute_gramian(system, kf)
    return gramian_submatrix(bundle, system.targets)


def _witness_of(q: kernels.SymMatrix) -> ControllabilityWitness:
    values = np.linalg.eigvalsh(q.array)
    lo, hi = float(values[0]), float(values[-1])
    return ControllabilityWitness(
        controllable=lo > kernels.SPD_RTOL * max(hi, 1.0), lambda_min=lo, lambda_max=hi
    )


def target_controllable(
    system: ConsensusSystem, kf: int, bundle: GramianBundle | None = None
) -> ControllabilityWitness:
    """Whether the target Gramian block is invertible at this horizon."""
    return _witness_of(target_gramian(system, kf, bundle))


def _goal_vector(system: ConsensusSystem, ybar) -> np.ndarray:
    y = np.asarray(ybar, dtype=float).reshape(-1)
    if y.shape[0] != system.p:
        raise DimensionMismatch(
            f"goal vector of length {y.shape[0]} for {system.p} targets"
        )
    return y


def target_control_energy(
    system: ConsensusSystem, kf: int, ybar, bundle: GramianBundle | None = None
) -> float:
    """Minimum input energy that places the target outputs at ybar at time kf."""
    y = _goal_vector(system, ybar)
    q = target_gramian(system, kf, bundle)
    if not _witness_of(q):
        raise NotControllable(f"target block singular at horizon {kf}")
    return float(y @ kernels.solve_spd(q, y))


def _markov_blocks(system: ConsensusSystem, kf: int) -> list[np.ndarray]:
    """[C A^k B for k = 0..kf-1], each p x m."""
    blocks = []
    y = system.C.copy()
    for _ in range(kf):
        blocks.append(y @ system.B)
        y = y @ system.A
    return blocks


def optimal_target_input(
    system: ConsensusSystem, kf: int, ybar, bundle: GramianBundle | None = None
) -> InputSequence:
    """Least-energy input schedule driving the target outputs to ybar.

    Step i is (C A^(kf-1-i) B)^T v with v the target-Gramian solve of ybar;
    its energy equals target_control_energy(system, kf, ybar).
    """
    y = _goal_vector(system, ybar)
    q = target_gramian(system, kf, bundle)
    if not _witness_of(q):
        raise NotControllable(f"target block singular at horizon {kf}")
    v = kernels.solve_spd(q, y)
    blocks = _markov_blocks(system, kf)
    u = np.empty((kf, system.m))
    for i in range(kf):
        u[i] = blocks[kf - 1 - i].T @ v
    return InputSequence(kf=kf, u=u, energy=float(np.sum(u * u)))


def target_security(
    system: ConsensusSystem, kf: int, bundle: GramianBundle | None = None
) -> tuple[float, np.ndarray]:
    """Least goal energy over unit goals, with the goal attaining it.

    Returns (E_min, y_min): E_min is the reciprocal of the largest target
    Gramian eigenvalue and y_min the corresponding unit eigenvector,
    sign-normalized.
    """
    q = target_gramian(system, kf, bundle)
    pairs = kernels.sym_eig(q)
    if not pairs.lambda_min > kernels.SPD_RTOL * max(pairs.lambda_max, 1.0):
        raise NotControllable(f"target block singular at horizon {kf}")
    return 1.0 / pairs.lambda_max, pairs.dominant.copy()


def projection_energy(
    system: ConsensusSystem, kf: int, alpha, bundle: GramianBundle | None = None
) -> float:
    """Energy to move the scalar projection alpha . y by one unit."""
    a = _goal_vector(system, alpha)
    q = target_gramian(system, kf, bundle).array
    form = float(a @ q @ a)
    lam_max = float(np.linalg.eigvalsh(q)[-1])
    if form <= DEGENERATE_RTOL * lam_max:
        raise DegenerateProjection(
            f"projection carries no reachable energy (form={form:.3e})"
        )
    return 1.0 / form


def optimal_projection_input(
    system: ConsensusSystem, kf: int, alpha, bundle: GramianBundle | None = None
) -> InputSequence:
    """Least-energy input schedule moving the projection alpha . y to one."""
    a = _goal_vector(system, alpha)
    q = target_gramian(system, kf, bundle).array
    form = float(a @ q @ a)
    lam_max = float(np.linalg.eigvalsh(q)[-1])
    if form <= DEGENERATE_RTOL * lam_max:
        raise DegenerateProjection(
            f"projection carries no reachable energy (form={form:.3e})"
        )
    blocks = _markov_blocks(system, kf)
    u = np.empty((kf, system.m))
    for i in range(kf):
        u[i] = blocks[kf - 1 - i].T @ a / form
    return InputSequence(kf=kf, u=u, energy=float(np.sum(u * u)))


def projection_security(
    system: ConsensusSystem, kf: int, bundle: GramianBundle | None = None
) -> tuple[float, int]:
    """Least projection energy over unit-1-norm projections.

    The minimum is attained at a coordinate direction: returns (F_min, j_min)
    where j_min is the first index of a largest target-Gramian diagonal entry
    and F_min its reciprocal (inf if the whole diagonal is zero).
    """
    q = target_gramian(system, kf, bundle).array
    diag = np.diag(q)
    j = int(np.argmax(diag))
    top = float(diag[j])
    return (1.0 / top if top > UNREACHABLE_TOL else math.inf), j


def node_energy(
    system: ConsensusSystem, kf: int, node: int, bundle: GramianBundle | None = None
) -> float:
    """Energy to move a single node's state by one unit at time kf."""
    (c,) = node_set([node], system.n)
    if bundle is None:
        bundle = compute_gramian(system, kf)
    val = float(bundle.W.array[c, c])
    if val <= UNREACHABLE_TOL:
        raise NodeUnreachable(f"node {c} unreachable within horizon {kf}")
    return 1.0 / val


def node_energies(
    system: ConsensusSystem, kf: int, bundle: GramianBundle | None = None
) -> np.ndarray:
    """Vector of per-node energies; unreachable nodes get inf."""
    if bundle is None:
        bundle = compute_gramian(system, kf)
    diag = np.diag(bundle.W.array)
    out = np.full(system.n, math.inf)
    ok = diag > UNREACHABLE_TOL
    out[ok] = 1.0 / diag[ok]
    return out


def cutset_energy(
    system: ConsensusSystem, kf: int, cutset, bundle: GramianBundle | None = None
) -> float:
    """Least per-node energy over the cutset's reachable nodes."""
    ids = node_set(cutset, system.n)
    if not ids:
        raise ValueError("cutset must be nonempty")
    if bundle is None:
        bundle = compute_gramian(system, kf)
    diag = bundle.W.array[list(ids), list(ids)]
    top = float(diag.max())
    if top <= UNREACHABLE_TOL:
        raise NodeUnreachable(f"no cutset node reachable within horizon {kf}")
    return 1.0 / top


def full_target_security(
    system: ConsensusSystem, kf: int, bundle: GramianBundle | None = None
) -> float:
    """Least goal energy when every node is a target: 1 / lambda_max of W.

    Defined whether or not the full Gramian is invertible.
    """
    if bundle is None:
        bundle = compute_gramian(system, kf)
    lam_max = float(np.linalg.eigvalsh(bundle.W.array)[-1])
    return 1.0 / lam_max


def metrics_report(
    system: ConsensusSystem, kf: int, bundle: GramianBundle | None = None
) -> MetricsReport:
    """Assemble the standard metrics summary at one horizon."""
    if bundle is None:
        bundle = compute_gramian(system, kf)
    q = target_gramian(system, kf, bundle)
    pairs = kernels.sym_eig(q)
    lam_min, lam_max = pairs.lambda_min, pairs.lambda_max
    controllable = lam_min > kernels.SPD_RTOL * max(lam_max, 1.0)
    e_min = 1.0 / lam_max if lam_max > 0.0 else math.inf
    f_min, j_min = projection_security(system, kf, bundle)
    return MetricsReport(
        kf=bundle.kf,
        controllable=controllable,
        lambda_min=lam_min,
        lambda_max=lam_max,
        E_min=e_min,
        y_min=pairs.dominant.copy(),
        F_min=f_min,
        j_min=j_min,
        node_energies=node_energies(system, kf, bundle),
    )
