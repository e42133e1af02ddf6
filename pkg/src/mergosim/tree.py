"""Hierarchical scattering tree with repeat-until-success at each node.

Leaves hold atomic input states; every internal node tensors its
children, runs its merge channel once, then alternates heralding
measurements with (escalated) channel applications until success. A
failed measurement never restarts completed children: recovery is local
to the node, so per-node repetition counts simply add up.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .criteria import Bipartition
from .errors import MaxItersExceeded, NodeExhausted
from .evolution import DensityMatrix, PropagationReport, propagate
from .hamiltonian import ScheduledHamiltonian
from .weakmeas import TraceLog, WeakMeasurementSpec, repeat_until_success


def derive_seed(global_seed: int, node_id: str) -> int:
    """Stable per-node seed; hashlib keeps it independent of PYTHONHASHSEED."""
    digest = hashlib.sha256(f"{global_seed}/{node_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


class IdentityChannel:
    """No-op channel, useful for rigging tests."""

    def apply(self, state: DensityMatrix, iteration: int,
              rng: Optional[np.random.Generator] = None) -> DensityMatrix:
        return state


class PumpChannel:
    """Synthetic channel that outputs a fixed accepted-block weight.

    Ignores the input and returns the mixture with weight ``p`` spread
    uniformly over A and 1 - p over B; per-measurement success then
    follows a geometric law, which is what the tree statistics tests
    need to pin down.
    """

    def __init__(self, bipartition: Bipartition, p: float):
        if not 0.0 <= p <= 1.0:
            raise ValueError("pump weight must lie in [0, 1]")
        self.bipartition = bipartition
        self.p = p

    def apply(self, state: DensityMatrix, iteration: int,
              rng: Optional[np.random.Generator] = None) -> DensityMatrix:
        mask = self.bipartition.mask
        n_a = int(np.sum(mask))
        n_b = mask.size - n_a
        diag = np.zeros(mask.size)
        if n_a:
            diag[mask] = self.p / n_a
        if n_b:
            diag[~mask] = (1.0 - self.p) / n_b
        if n_a == 0:
            diag[~mask] = 1.0 / n_b
        elif n_b == 0:
            diag[mask] = 1.0 / n_a
        return DensityMatrix.trusted(np.diag(diag.astype(complex)))


class PropagationChannel:
    """Merge evolution under a scheduled Hamiltonian.

    Retries escalate the confinement: attempt k scales the trap block by
    escalation_factor^k before propagating, the desk-scale version of
    "stronger confinement" for the modified channel.
    """

    def __init__(self, sh: ScheduledHamiltonian, s_from: float, s_to: float,
                 n_steps: int, escalation_factor: float = 1.0):
        self.sh = sh
        self.s_from = s_from
        self.s_to = s_to
        self.n_steps = n_steps
        self.escalation_factor = escalation_factor
        self.last_report: Optional[PropagationReport] = None

    def _escalated(self, iteration: int) -> ScheduledHamiltonian:
        if iteration <= 0 or self.escalation_factor == 1.0:
            return self.sh
        factor = self.escalation_factor ** iteration
        return replace(self.sh, v_trap=self.sh.v_trap.scaled(factor))

    def apply(self, state: DensityMatrix, iteration: int,
              rng: Optional[np.random.Generator] = None) -> DensityMatrix:
        report = propagate(state, self._escalated(iteration),
                           self.s_from, self.s_to, self.n_steps)
        self.last_report = report
        return report.final_state


Channel = Union[IdentityChannel, PumpChannel, PropagationChannel]


@dataclass(frozen=True)
class RetryPolicy:
    max_iters: int = 64
    delta_ramp: float = 1.0
    renaturalize: bool = True


@dataclass(frozen=True, eq=False)
class ScatterNode:
    """One tree node. Leaves carry only an id and a subsystem; internal
    nodes add the channel, the heralding measurement and retry policy."""

    node_id: str
    children: tuple[str, ...] = ()
    subsystem: frozenset[int] = frozenset()
    channel: Optional[Channel] = None
    bipartition: Optional[Bipartition] = None
    delta: float = math.pi / 2.0
    retry: RetryPolicy = RetryPolicy()

    @property
    def is_leaf(self) -> bool:
        return not self.children


class ScatterTree:
    """Node table plus root id, with structural validation."""

    def __init__(self, nodes: Sequence[ScatterNode], root: str):
        self.nodes: dict[str, ScatterNode] = {}
        for node in nodes:
            if node.node_id in self.nodes:
                raise ValueError(f"duplicate node id {node.node_id!r}")
            self.nodes[node.node_id] = node
        self.root = root
        self._validate()

    def _validate(self) -> None:
        if self.root not in self.nodes:
            raise ValueError(f"root {self.root!r} not among the nodes")
        seen_child: set[str] = set()
        for node in self.nodes.values():
            if len(node.children) == 1:
                raise ValueError(f"node {node.node_id!r} has a single child")
            for child in node.children:
                if child not in self.nodes:
                    raise ValueError(f"unknown child {child!r}")
                if child in seen_child:
                    raise ValueError(f"child {child!r} has two parents")
                seen_child.add(child)
        reachable = set(self.postorder())
        if reachable != set(self.nodes):
            raise ValueError("tree contains nodes unreachable from the root")
        for node in self.nodes.values():
            if node.is_leaf:
                continue
            subsystems = [self.nodes[c].subsystem for c in node.children]
            union: set[int] = set()
            for sub in subsystems:
                if union & sub:
                    raise ValueError(
                        f"children of {node.node_id!r} share particles")
                union |= sub
            if node.subsystem and set(node.subsystem) != union:
                raise ValueError(
                    f"node {node.node_id!r} subsystem is not the union "
                    "of its children")

    def node(self, node_id: str) -> ScatterNode:
        return self.nodes[node_id]

    def with_node(self, node: ScatterNode) -> "ScatterTree":
        nodes = dict(self.nodes)
        nodes[node.node_id] = node
        return ScatterTree(list(nodes.values()), self.root)

    def configure(self, node_id: str, **changes) -> "ScatterTree":
        return self.with_node(replace(self.nodes[node_id], **changes))

    def postorder(self) -> list[str]:
        order: list[str] = []

        def visit(node_id: str) -> None:
            for child in self.nodes[node_id].children:
                visit(child)
            order.append(node_id)

        visit(self.root)
        return order

    def leaf_ids(self) -> list[str]:
        return [i for i in self.postorder() if self.nodes[i].is_leaf]

    def internal_ids(self) -> list[str]:
        return [i for i in self.postorder() if not self.nodes[i].is_leaf]

    def depth(self) -> int:
        def d(node_id: str) -> int:
            node = self.nodes[node_id]
            if node.is_leaf:
                return 0
            return 1 + max(d(c) for c in node.children)

        return d(self.root)


def plan_tree(leaves: Union[int, Sequence[str]], arity: int = 2) -> ScatterTree:
    """Balanced merge plan: chunk the current level into groups of
    ``arity``; singleton chunks pass through without a node. Binary
    plans over N leaves therefore emit exactly N - 1 internal nodes at
    depth ceil(log2 N)."""
    if arity < 2:
        raise ValueError("arity must be at least 2")
    if isinstance(leaves, int):
        if leaves < 1:
            raise ValueError("need at least one leaf")
        leaf_ids = [f"leaf{i}" for i in range(leaves)]
    else:
        leaf_ids = [str(x) for x in leaves]
        if not leaf_ids:
            raise ValueError("need at least one leaf")

    nodes = [ScatterNode(node_id=lid, subsystem=frozenset({i}))
             for i, lid in enumerate(leaf_ids)]
    level = [n.node_id for n in nodes]
    table = {n.node_id: n for n in nodes}
    counter = 0
    while len(level) > 1:
        next_level = []
        for start in range(0, len(level), arity):
            chunk = level[start:start + arity]
            if len(chunk) == 1:
                next_level.append(chunk[0])
                continue
            node_id = f"node{counter}"
            counter += 1
            subsystem = frozenset().union(
                *(table[c].subsystem for c in chunk))
            table[node_id] = ScatterNode(node_id=node_id,
                                         children=tuple(chunk),
                                         subsystem=subsystem)
            next_level.append(node_id)
        level = next_level
    return ScatterTree(list(table.values()), level[0])


@dataclass(frozen=True)
class NodeRecord:
    node_id: str
    iterations: int
    wall_steps: int
    p_suc_initial: float
    succeeded: bool


@dataclass
class TreeRunReport:
    """Per-node execution records; total repetitions is their sum."""

    records: dict[str, NodeRecord]
    total_repetitions: int
    final_state: Optional[DensityMatrix]
    trace: TraceLog

    def to_json_dict(self) -> dict:
        return {
            "total_repetitions": self.total_repetitions,
            "final_dim": None if self.final_state is None
            else self.final_state.dim,
            "nodes": {nid: {"iterations": r.iterations,
                            "wall_steps": r.wall_steps,
                            "p_suc_initial": r.p_suc_initial,
                            "succeeded": r.succeeded}
                      for nid, r in sorted(self.records.items())},
        }


def run_tree(tree: ScatterTree, atomic_states: Mapping[str, DensityMatrix],
             global_seed: int,
             trace: Optional[TraceLog] = None) -> TreeRunReport:
    """Execute the tree post-order and return the run report.

    Each internal node owns a generator seeded from (global_seed,
    node_id), so sibling subtrees are reproducible independently of
    execution order. NodeExhausted carries the partial report; records
    of completed children survive the failure.
    """
    if trace is None:
        trace = TraceLog()
    records: dict[str, NodeRecord] = {}
    states: dict[str, DensityMatrix] = {}

    for node_id in tree.postorder():
        node = tree.node(node_id)
        if node.is_leaf:
            if node_id not in atomic_states:
                raise ValueError(f"no atomic state for leaf {node_id!r}")
            states[node_id] = atomic_states[node_id]
            records[node_id] = NodeRecord(node_id, 0, 0, 1.0, True)
            continue
        if node.channel is None or node.bipartition is None:
            raise ValueError(f"node {node_id!r} is not configured")

        rng = np.random.default_rng(derive_seed(global_seed, node_id))
        state = states[node.children[0]]
        for child in node.children[1:]:
            state = state.tensor(states[child])
        if state.dim != node.bipartition.dim:
            raise ValueError(
                f"node {node_id!r} bipartition dimension {node.bipartition.dim}"
                f" does not match tensored state dimension {state.dim}")

        state = node.channel.apply(state, 0, rng)
        wall_steps = 1
        spec = WeakMeasurementSpec(node.bipartition, node.delta)
        p_initial = float(np.sum(np.diag(state.matrix).real
                                 [node.bipartition.mask]))

        def recovery(s: DensityMatrix, k: int) -> DensityMatrix:
            nonlocal wall_steps
            wall_steps += 1
            return node.channel.apply(s, k, rng)

        try:
            post, iterations = repeat_until_success(
                state, spec, recovery, node.retry.max_iters, rng=rng,
                delta_ramp=node.retry.delta_ramp, trace=trace,
                node_id=node_id)
        except MaxItersExceeded as exc:
            records[node_id] = NodeRecord(node_id, node.retry.max_iters,
                                          wall_steps, p_initial, False)
            partial = TreeRunReport(
                records=records,
                total_repetitions=sum(r.iterations for r in records.values()),
                final_state=None, trace=trace)
            raise NodeExhausted(node_id, partial) from exc

        if node.retry.renaturalize:
            post = node.channel.apply(post, 0, rng)
            wall_steps += 1
        states[node_id] = post
        records[node_id] = NodeRecord(node_id, iterations, wall_steps,
                                      p_initial, True)

    total = sum(r.iterations for r in records.values())
    return TreeRunReport(records=records, total_repetitions=total,
                         final_state=states[tree.root], trace=trace)


@dataclass(frozen=True, eq=False)
class ChannelDecomposition:
    """Block split p0 * rho_suc + (1 - p0) * rho_nsuc + C of a state."""

    p0: float
    rho_suc: Optional[DensityMatrix]
    rho_nsuc: Optional[DensityMatrix]
    coherence: np.ndarray
    coherence_norm: float

    def reassemble(self) -> np.ndarray:
        out = self.coherence.astype(complex).copy()
        if self.rho_suc is not None:
            out += self.p0 * self.rho_suc.matrix
        if self.rho_nsuc is not None:
            out += (1.0 - self.p0) * self.rho_nsuc.matrix
        return out


def channel_decompose(state: DensityMatrix,
                      bipartition: Bipartition) -> ChannelDecomposition:
    """Decompose a channel output by the success bipartition.

    p0 is the accepted-block weight, rho_suc / rho_nsuc the renormalized
    diagonal blocks, and the coherence matrix collects the off-blocks
    (Frobenius norm reported)."""
    mask = bipartition.mask
    a = mask.astype(float)
    b = 1.0 - a
    mat = state.matrix
    block_a = mat * np.outer(a, a)
    block_b = mat * np.outer(b, b)
    cross = mat - block_a - block_b
    p0 = float(np.trace(block_a).real)
    rho_suc = DensityMatrix.trusted(block_a / p0) if p0 > 1e-14 else None
    rho_nsuc = (DensityMatrix.trusted(block_b / (1.0 - p0))
                if 1.0 - p0 > 1e-14 else None)
    return ChannelDecomposition(
        p0=p0, rho_suc=rho_suc, rho_nsuc=rho_nsuc, coherence=cross,
        coherence_norm=float(np.linalg.norm(cross)))
