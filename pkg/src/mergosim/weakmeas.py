"""Weak-measurement success heralding and its exact post-state algebra.

The four-step protocol (criterion oracle into an ancilla, controlled
rotation by delta onto a second ancilla, oracle again to reset, measure
the second ancilla) reduces, on the system register, to closed forms
over the A/B bipartition:

    p_1   = sin(delta)^2 * p_suc,      p_suc = sum_{j in A} rho_jj
    rho_1 = Pi_A rho Pi_A / p_suc
    rho_0 = [cos(delta)^2 * (A block) + (B block)
             + cos(delta) * (cross blocks)] / p_0,   p_0 = 1 - p_1

The failure-branch disturbance decomposes through the coefficients
Lambda_A, Lambda_B, Lambda_C, all of order delta^2 for weak rotations;
that trade-off (detection probability versus state damage) is what the
angle delta tunes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .criteria import Bipartition
from .errors import (Degenerate, EmptySector, MaxItersExceeded,
                     ZeroProbabilityBranch)
from .evolution import DensityMatrix
from .grid import SPIN_UP, Basis

DEGENERATE_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class WeakMeasurementSpec:
    """Bipartition, rotation angle delta in [0, pi/2], and the seed that
    owns any sampled outcomes."""

    bipartition: Bipartition
    delta: float
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.delta <= math.pi / 2.0 + 1e-12:
            raise ValueError("delta must lie in [0, pi/2]")


def p_success_weight(state: Union[DensityMatrix, np.ndarray],
                     bipartition: Bipartition) -> float:
    """p_suc = sum of diagonal weights over the accepted block.

    Accepts a density matrix or a pure state vector (for which the
    weight is sum_{j in A} |psi_j|^2).
    """
    if isinstance(state, DensityMatrix):
        diag = np.diag(state.matrix).real
    else:
        diag = np.abs(np.asarray(state).ravel()) ** 2
    return float(np.sum(diag[bipartition.mask]))


def _split_blocks(mat: np.ndarray, mask: np.ndarray):
    a = mask.astype(float)
    b = 1.0 - a
    block_a = mat * np.outer(a, a)
    block_b = mat * np.outer(b, b)
    cross = mat - block_a - block_b
    return block_a, block_b, cross


def _failure_state(mat: np.ndarray, mask: np.ndarray, delta: float,
                   p0: float) -> np.ndarray:
    # cos^2 on the A block, cos on the cross blocks, 1 on the B block,
    # written as one rank-1 damping profile
    damp = np.where(mask, math.cos(delta), 1.0)
    return mat * np.outer(damp, damp) / p0


@dataclass(frozen=True, eq=False)
class MeasurementBranches:
    """Analytic Born probabilities and post states of both outcomes."""

    p_suc: float
    p1: float
    p0: float
    _rho1: Optional[DensityMatrix]
    _rho0: Optional[DensityMatrix]

    @property
    def rho1(self) -> DensityMatrix:
        if self._rho1 is None:
            raise ZeroProbabilityBranch("success branch has probability zero")
        return self._rho1

    @property
    def rho0(self) -> DensityMatrix:
        if self._rho0 is None:
            raise ZeroProbabilityBranch("failure branch has probability zero")
        return self._rho0


def measurement_branches(state: DensityMatrix, bipartition: Bipartition,
                         delta: float) -> MeasurementBranches:
    """Closed-form (p_1, rho_1) and (p_0, rho_0) for one weak measurement."""
    mask = bipartition.mask
    if mask.size != state.dim:
        raise ValueError("bipartition and state dimensions disagree")
    mat = state.matrix
    p_suc = float(np.sum(np.diag(mat).real[mask]))
    p1 = math.sin(delta) ** 2 * p_suc
    p0 = 1.0 - p1

    rho1 = None
    if p1 > 0.0:
        a = mask.astype(float)
        rho1 = DensityMatrix.trusted(mat * np.outer(a, a) / p_suc)
    rho0 = None
    if p0 > DEGENERATE_TOL:
        rho0 = DensityMatrix.trusted(_failure_state(mat, mask, delta, p0))
    return MeasurementBranches(p_suc=p_suc, p1=p1, p0=p0,
                               _rho1=rho1, _rho0=rho0)


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """One sampled heralding flag with its Born probability and post state."""

    flag: int
    probability: float
    post_state: DensityMatrix
    p_suc_before: float
    branches: MeasurementBranches


def weak_measure(state: DensityMatrix, spec: WeakMeasurementSpec,
                 rng: Optional[np.random.Generator] = None
                 ) -> MeasurementOutcome:
    """Sample the heralding flag and return the matching post state.

    The analytic branch pair rides along on the outcome. Randomness
    comes from ``rng`` when given, otherwise from a generator seeded
    with ``spec.rng_seed``; no global state is touched.
    """
    if rng is None:
        rng = np.random.default_rng(spec.rng_seed)
    branches = measurement_branches(state, spec.bipartition, spec.delta)
    if rng.random() < branches.p1:
        return MeasurementOutcome(1, branches.p1, branches.rho1,
                                  branches.p_suc, branches)
    return MeasurementOutcome(0, branches.p0, branches.rho0,
                              branches.p_suc, branches)


def lambda_coefficients(delta: float, p_suc: float
                        ) -> tuple[float, float, float]:
    """(Lambda_A, Lambda_B, Lambda_C) of the failure-branch decomposition.

    All three vanish at delta = 0 and grow as delta^2 for small delta;
    the shared denominator is p_0, which vanishes only in the degenerate
    fully-projective case delta = pi/2 with p_suc = 1.
    """
    if not 0.0 <= p_suc <= 1.0 + 1e-12:
        raise ValueError("p_suc must lie in [0, 1]")
    sin2 = math.sin(delta) ** 2
    cos2 = math.cos(delta) ** 2
    denom_a = (1.0 - p_suc) + cos2 * p_suc
    denom_bc = 1.0 - sin2 * p_suc
    if denom_a < DEGENERATE_TOL or denom_bc < DEGENERATE_TOL:
        raise Degenerate("delta = pi/2 with p_suc = 1 has no failure branch")
    lam_a = sin2 * (1.0 - p_suc) * p_suc / denom_a
    lam_b = sin2 * (1.0 - p_suc) * p_suc / denom_bc
    lam_c = (1.0 - math.cos(delta) - sin2 * p_suc) / denom_bc
    return lam_a, lam_b, lam_c


def reconstruct_rho0(state: DensityMatrix, bipartition: Bipartition,
                     delta: float) -> np.ndarray:
    """rho - Lambda_A rho_A + Lambda_B rho_B - Lambda_C (cross blocks).

    Algebraically identical to the closed-form rho_0; exposed so the
    identity can be checked term by term.
    """
    mask = bipartition.mask
    block_a, block_b, cross = _split_blocks(state.matrix, mask)
    p_suc = float(np.trace(block_a).real)
    lam_a, lam_b, lam_c = lambda_coefficients(delta, p_suc)
    out = state.matrix.astype(complex).copy()
    if p_suc > 0.0:
        out -= lam_a * block_a / p_suc
    if p_suc < 1.0:
        out += lam_b * block_b / (1.0 - p_suc)
    out -= lam_c * cross
    return out


class TraceLog(list):
    """Append-only measurement trace; one dict per weak measurement."""

    def record(self, node_id: str, iteration: int, delta: float, flag: int,
               p1: float, p_suc_before: float) -> None:
        self.append({"node_id": node_id, "iteration": iteration,
                     "delta": delta, "flag": flag, "p1": p1,
                     "p_suc_before": p_suc_before})


def repeat_until_success(state: DensityMatrix, spec: WeakMeasurementSpec,
                         channel: Callable[[DensityMatrix, int], DensityMatrix],
                         max_iters: int,
                         rng: Optional[np.random.Generator] = None,
                         delta_ramp: float = 1.0,
                         trace: Optional[TraceLog] = None,
                         node_id: str = "") -> tuple[DensityMatrix, int]:
    """Measure, and on failure apply ``channel`` and measure again.

    ``channel(state, k)`` is the (possibly escalated) recovery evolution
    applied after the k-th failed measurement; it must preserve trace
    within 1e-9. The measurement angle follows the geometric ramp
    delta_k = min(pi/2, delta * delta_ramp^(k-1)). Returns the projected
    accepted-block state and the number of measurements used.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if rng is None:
        rng = np.random.default_rng(spec.rng_seed)
    mask = spec.bipartition.mask
    current = state
    for k in range(1, max_iters + 1):
        delta_k = min(math.pi / 2.0, spec.delta * delta_ramp ** (k - 1))
        mat = current.matrix
        p_suc = float(np.sum(np.diag(mat).real[mask]))
        p1 = math.sin(delta_k) ** 2 * p_suc
        flag = 1 if rng.random() < p1 else 0
        if trace is not None:
            trace.record(node_id, k, delta_k, flag, p1, p_suc)
        if flag == 1:
            a = mask.astype(float)
            return DensityMatrix.trusted(mat * np.outer(a, a) / p_suc), k
        post = DensityMatrix.trusted(
            _failure_state(mat, mask, delta_k, 1.0 - p1))
        current = channel(post, k)
        if abs(current.trace() - 1.0) > 1e-9:
            raise ValueError("channel failed to preserve trace")
    raise MaxItersExceeded(
        f"no success within {max_iters} measurements" +
        (f" at node {node_id!r}" if node_id else ""))


def total_spin_squared(basis: Basis, spin_registers) -> np.ndarray:
    """S^2 = sum_i S_i^2 + 2 sum_{i<j} S_i . S_j on the spin labels.

    Spin-1/2 algebra on the chosen registers: diagonal Sz products plus
    flip-flop terms that exchange opposite spins pairwise.
    """
    regs = tuple(int(r) for r in spin_registers)
    for r in regs:
        if not basis.particles.has_spin(r):
            raise ValueError(f"register {r} carries no spin label")
    n = basis.size
    s2 = np.zeros((n, n), dtype=complex)
    for idx, cfg in enumerate(basis.configurations):
        sz = np.array([0.5 if cfg.spins[r] == SPIN_UP else -0.5 for r in regs])
        diag = 0.75 * len(regs)
        for i in range(len(regs)):
            for j in range(i + 1, len(regs)):
                diag += 2.0 * sz[i] * sz[j]
                if cfg.spins[regs[i]] != cfg.spins[regs[j]]:
                    flipped = cfg.replace_spin(regs[i], cfg.spins[regs[j]])
                    flipped = flipped.replace_spin(regs[j], cfg.spins[regs[i]])
                    s2[basis.index_of(flipped), idx] += 1.0
        s2[idx, idx] += diag
    return s2


_SPIN_TARGETS = {"singlet": 0.0, "triplet": 1.0}


def spin_sector_project(state: DensityMatrix, basis: Basis, spin_registers,
                        target: Union[str, float]
                        ) -> tuple[float, DensityMatrix]:
    """Spectrally project onto the eigenspace of S^2 with S(S+1) matching
    the target sector; returns (Born probability, renormalized state)."""
    s_value = _SPIN_TARGETS.get(target) if isinstance(target, str) else float(target)
    if s_value is None:
        raise ValueError(f"unknown spin target {target!r}")
    eigval = s_value * (s_value + 1.0)
    s2 = total_spin_squared(basis, spin_registers)
    w, v = np.linalg.eigh(s2)
    cols = np.abs(w - eigval) < 1e-8
    if not np.any(cols):
        raise EmptySector(f"no S^2 eigenspace at S = {s_value}")
    sel = v[:, cols]
    projector = sel @ sel.conj().T
    prob = float(np.trace(projector @ state.matrix).real)
    if prob < 1e-14:
        raise EmptySector(f"state carries no weight in the S = {s_value} sector")
    post = projector @ state.matrix @ projector / prob
    return prob, DensityMatrix.trusted(post)
