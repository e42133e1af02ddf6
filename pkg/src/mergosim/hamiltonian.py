"""Dense operator blocks and the scheduled total Hamiltonian H(s).

H(s) = H_A + H_B + f(s) * H_AB + g(s) * V_trap

with f ramping the inter-fragment Coulomb coupling on (f(0) = 0,
f(s >= s0) = 1) and g ramping the harmonic trap on and back off
(g(0) = 0, g(s0) = 1, g(s1) = 0).

Discretization choices: 3-point finite-difference kinetic stencil with
Dirichlet boundaries, and a softened Coulomb 1/sqrt(r^2 + a^2) so that
coincident grid points stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (CenterOutsideBox, NonpositiveDistance, ScheduleOutOfRange,
                     SingularCoulomb)
from .grid import Basis, Configuration, GridSpec, ParticleSet, label_to_coord

VALID_TAGS = ("kinetic", "coulomb_ee", "coulomb_nn", "coulomb_ne",
              "trap", "external", "total")
HERMITICITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OperatorBlock:
    """Hermitian dense matrix over the enumerated configuration basis."""

    matrix: np.ndarray
    tag: str

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator matrix must be square")
        if self.tag not in VALID_TAGS:
            raise ValueError(f"unknown operator tag {self.tag!r}")
        dev = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
        if dev > HERMITICITY_TOL:
            from .errors import NonHermitianHamiltonian
            raise NonHermitianHamiltonian(
                f"block {self.tag!r} deviates from Hermitian by {dev:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def scaled(self, factor: float) -> "OperatorBlock":
        return OperatorBlock(self.matrix * float(factor), self.tag)

    def __add__(self, other: "OperatorBlock") -> "OperatorBlock":
        return OperatorBlock(self.matrix + other.matrix, "total")

    def export(self, path: str) -> None:
        """Write the block to the dense matrix file format."""
        from .io import write_matrix
        write_matrix(path, self.matrix, self.tag)


def zero_block(dim: int, tag: str = "external") -> OperatorBlock:
    return OperatorBlock(np.zeros((dim, dim), dtype=complex), tag)


def _neighbor(config: Configuration, register: int, axis: int,
              step: int) -> tuple[int, ...]:
    label = list(config.labels[register])
    label[axis] += step
    return tuple(label)


def build_kinetic(basis: Basis,
                  registers: Optional[Sequence[int]] = None) -> OperatorBlock:
    """Finite-difference kinetic energy, -(1/2m) Laplacian per particle.

    Central 3-point stencil per axis with Dirichlet boundaries (no wrap):
    diagonal 2c per axis and -c to each in-lattice neighbor, c = 1/(2 m h^2).
    ``registers`` restricts the sum to a particle subset (H_A/H_B splits).
    """
    grid, particles = basis.grid, basis.particles
    if registers is None:
        registers = range(particles.n_particles)
    h = grid.spacing
    n = basis.size
    mat = np.zeros((n, n), dtype=complex)
    for i, cfg in enumerate(basis.configurations):
        for p in registers:
            c = 1.0 / (2.0 * particles.mass(p) * h * h)
            mat[i, i] += 2.0 * c * grid.dims
            for axis in range(grid.dims):
                for step in (-1, 1):
                    nb = _neighbor(cfg, p, axis, step)
                    if grid.contains_label(nb):
                        j = basis.index_of(cfg.replace_label(p, nb))
                        mat[j, i] -= c
    return OperatorBlock(mat, "kinetic")


def _resolve_pairs(particles: ParticleSet, pairs) -> list[tuple[int, int]]:
    n = particles.n_particles
    every = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if pairs is None or pairs == "all":
        return every
    if pairs == "ee":
        return [(i, j) for i, j in every
                if not particles.is_nucleus(i) and not particles.is_nucleus(j)]
    if pairs == "nn":
        return [(i, j) for i, j in every
                if particles.is_nucleus(i) and particles.is_nucleus(j)]
    if pairs == "ne":
        return [(i, j) for i, j in every
                if particles.is_nucleus(i) != particles.is_nucleus(j)]
    explicit = []
    for i, j in pairs:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"invalid particle pair ({i}, {j})")
        explicit.append((min(i, j), max(i, j)))
    return explicit


def _pair_tag(particles: ParticleSet, pair_list: list[tuple[int, int]]) -> str:
    kinds = {(particles.is_nucleus(i), particles.is_nucleus(j))
             for i, j in pair_list}
    if kinds == {(False, False)}:
        return "coulomb_ee"
    if kinds == {(True, True)}:
        return "coulomb_nn"
    if kinds <= {(False, True), (True, False)}:
        return "coulomb_ne"
    return "external"


def coulomb_energy(grid: GridSpec, particles: ParticleSet,
                   config: Configuration, softening: float,
                   pairs="all") -> float:
    """Softened pairwise Coulomb sum for a single configuration."""
    coords = np.array([label_to_coord(grid, lab) for lab in config.labels])
    total = 0.0
    for i, j in _resolve_pairs(particles, pairs):
        d2 = float(np.sum((coords[i] - coords[j]) ** 2))
        if softening == 0.0 and d2 == 0.0:
            raise SingularCoulomb(
                f"registers {i} and {j} coincide with zero softening")
        total += particles.charge(i) * particles.charge(j) / np.sqrt(
            d2 + softening * softening)
    return total


def build_coulomb(basis: Basis, softening: float,
                  pairs="all", tag: Optional[str] = None) -> OperatorBlock:
    """Diagonal Coulomb block over the selected particle pairs.

    ``pairs`` is "all", a species selector ("ee", "nn", "ne"), or an
    explicit list of register pairs (used for inter-fragment H_AB).
    """
    if softening < 0:
        raise ValueError("softening must be nonnegative")
    pair_list = _resolve_pairs(basis.particles, pairs)
    if tag is None:
        tag = _pair_tag(basis.particles, pair_list)
    diag = np.array([coulomb_energy(basis.grid, basis.particles, cfg,
                                    softening, pair_list)
                     for cfg in basis.configurations])
    return OperatorBlock(np.diag(diag.astype(complex)), tag)


def build_point_charges(basis: Basis, centers: Sequence[Sequence[float]],
                        charges: Sequence[float],
                        softening: float) -> OperatorBlock:
    """Potential of fixed external point charges acting on every register.

    Models clamped nuclei (e.g. an H2-like toy where only the electron
    roams). Tagged "external".
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    charges = np.asarray(charges, dtype=float)
    particles = basis.particles
    n = basis.size
    diag = np.zeros(n)
    for idx, cfg in enumerate(basis.configurations):
        coords = basis.coordinates(cfg)
        val = 0.0
        for p in range(particles.n_particles):
            for c, q in zip(centers, charges):
                d2 = float(np.sum((coords[p] - c) ** 2))
                if softening == 0.0 and d2 == 0.0:
                    raise SingularCoulomb(
                        f"register {p} coincides with a fixed charge")
                val += particles.charge(p) * q / np.sqrt(d2 + softening ** 2)
        diag[idx] = val
    return OperatorBlock(np.diag(diag.astype(complex)), "external")


@dataclass(frozen=True)
class TrapSpec:
    """Per-nucleus harmonic confinement: centers R_{0,j} (Bohr) and
    per-axis frequencies omega_{j,w} (atomic units)."""

    centers: tuple[tuple[float, ...], ...]
    frequencies: tuple[tuple[float, ...], ...]
    isotropic: bool = True

    def __post_init__(self):
        centers = tuple(tuple(float(x) for x in c) for c in self.centers)
        freqs = tuple(tuple(float(w) for w in f) for f in self.frequencies)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "frequencies", freqs)
        if len(centers) != len(freqs):
            raise ValueError("one frequency row per trap center required")
        for row in freqs:
            if any(w <= 0 for w in row):
                raise ValueError("trap frequencies must be strictly positive")
            if self.isotropic and len(set(row)) > 1:
                raise ValueError("isotropic trap requires equal per-axis "
                                 "frequencies")

    @classmethod
    def isotropic_spec(cls, centers: Sequence[Sequence[float]],
                       omega: float) -> "TrapSpec":
        centers = tuple(tuple(float(x) for x in c) for c in centers)
        freqs = tuple((float(omega),) * len(c) for c in centers)
        return cls(centers, freqs, isotropic=True)

    def scaled(self, factor: float) -> "TrapSpec":
        freqs = tuple(tuple(w * factor for w in row) for row in self.frequencies)
        return TrapSpec(self.centers, freqs, self.isotropic)


def trap_energy(basis: Basis, trap: TrapSpec, config: Configuration) -> float:
    """sum_j (m_j/2) sum_w omega_{j,w}^2 (R_{j,w} - R_{0,j,w})^2."""
    particles = basis.particles
    coords = basis.nuclear_coordinates(config)
    total = 0.0
    for j in range(particles.n_nuc):
        m = particles.nuclear_masses[j]
        r0 = np.asarray(trap.centers[j], dtype=float)
        w = np.asarray(trap.frequencies[j], dtype=float)
        disp = coords[j] - r0
        total += 0.5 * m * float(np.sum(w * w * disp * disp))
    return total


def build_trap(basis: Basis, trap: TrapSpec) -> OperatorBlock:
    """Diagonal harmonic-trap block acting on nuclear coordinates only."""
    grid, particles = basis.grid, basis.particles
    if len(trap.centers) != particles.n_nuc:
        raise ValueError("one trap center per nucleus required")
    half = grid.box_length / 2.0
    for c in trap.centers:
        if len(c) != grid.dims:
            raise ValueError("trap center dimensionality mismatch")
        if any(abs(x) > half for x in c):
            raise CenterOutsideBox(f"trap center {c} outside the box")
    diag = np.array([trap_energy(basis, trap, cfg)
                     for cfg in basis.configurations])
    return OperatorBlock(np.diag(diag.astype(complex)), "trap")


def _smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return 3.0 * u * u - 2.0 * u ** 3


@dataclass(frozen=True)
class Schedule:
    """Monotone scheduling profiles f (coupling) and g (trap).

    Shapes: "linear", "smoothstep", or "table" (f only) built from
    coulomb-mimicking samples via ``Schedule.with_f_table``. The table
    is affinely rescaled at construction so the contract f(0) = 0,
    f(s >= s0) = 1 holds exactly.
    """

    s0: float
    s1: float
    f_shape: str = "linear"
    g_shape: str = "linear"
    f_table: Optional[tuple[tuple[float, ...], tuple[float, ...]]] = None

    def __post_init__(self):
        if not (0.0 < self.s0 < self.s1):
            raise ValueError("require 0 < s0 < s1")
        if self.f_shape not in ("linear", "smoothstep", "table"):
            raise ValueError(f"unknown f shape {self.f_shape!r}")
        if self.g_shape not in ("linear", "smoothstep"):
            raise ValueError(f"unknown g shape {self.g_shape!r}")
        if (self.f_shape == "table") != (self.f_table is not None):
            raise ValueError("table shape requires f_table samples")
        if self.f_table is not None:
            s, v = self.f_table
            object.__setattr__(self, "f_table",
                               (tuple(float(x) for x in s),
                                tuple(float(x) for x in v)))

    @classmethod
    def with_f_table(cls, s0: float, s1: float, s_samples: Sequence[float],
                     f_samples: Sequence[float],
                     g_shape: str = "linear") -> "Schedule":
        """Build a tabulated f profile, pinned to f(0) = 0 and f(s0) = 1."""
        s = np.asarray(s_samples, dtype=float)
        v = np.asarray(f_samples, dtype=float)
        if s.shape != v.shape or s.ndim != 1 or s.size < 2:
            raise ValueError("need matching 1-d sample arrays")
        v0 = float(np.interp(0.0, s, v))
        v1 = float(np.interp(s0, s, v))
        if v1 <= v0:
            raise ValueError("f samples must increase from s=0 to s=s0")
        scaled = np.clip((v - v0) / (v1 - v0), 0.0, 1.0)
        return cls(s0, s1, f_shape="table", g_shape=g_shape,
                   f_table=(tuple(s), tuple(scaled)))

    def f(self, s):
        s = np.asarray(s, dtype=float)
        if self.f_shape == "linear":
            out = np.clip(s / self.s0, 0.0, 1.0)
        elif self.f_shape == "smoothstep":
            out = _smoothstep(s / self.s0)
        else:
            xs, vs = self.f_table
            out = np.where(s >= self.s0, 1.0,
                           np.clip(np.interp(s, xs, vs), 0.0, 1.0))
        return float(out) if out.ndim == 0 else out

    def g(self, s):
        s = np.asarray(s, dtype=float)
        rise = s / self.s0
        fall = (self.s1 - s) / (self.s1 - self.s0)
        if self.g_shape == "smoothstep":
            up, down = _smoothstep(rise), _smoothstep(fall)
        else:
            up = np.clip(rise, 0.0, 1.0)
            down = np.clip(fall, 0.0, 1.0)
        out = np.where(s <= self.s0, up, down)
        return float(out) if out.ndim == 0 else out

    def max_rate(self, n: int = 2001) -> float:
        """max_s of |df/ds| and |dg/ds| by dense finite differences.

        Diagnostic input for the evolution-speed v of the success
        probability model; not enforced anywhere.
        """
        s = np.linspace(0.0, self.s1, n)
        df = np.max(np.abs(np.gradient(self.f(s), s)))
        dg = np.max(np.abs(np.gradient(self.g(s), s)))
        return float(max(df, dg))


def coulomb_mimicking_f(schedule: Schedule, z_traj: Sequence[float],
                        center_distance: Optional[float] = None
                        ) -> tuple[np.ndarray, np.ndarray]:
    """f samples mimicking a Coulomb-like approach of two fragments.

    ``z_traj`` holds internuclear distances on a uniform s-grid over
    [0, s1], positive and nonincreasing toward the bonding distance.
    f(s) is the fixed-centers distance divided by the trajectory
    distance, clamped to [0, 1]; the reference distance defaults to the
    trajectory's final (bond-placement) value.
    """
    z = np.asarray(z_traj, dtype=float)
    if z.ndim != 1 or z.size < 2:
        raise ValueError("trajectory must be a 1-d array of distances")
    if np.any(z <= 0.0):
        raise NonpositiveDistance("trajectory contains nonpositive distance")
    if np.any(np.diff(z) > 1e-12):
        raise ValueError("trajectory must be monotone nonincreasing")
    d0 = float(z[-1]) if center_distance is None else float(center_distance)
    if d0 <= 0.0:
        raise NonpositiveDistance("fixed-centers distance must be positive")
    s_grid = np.linspace(0.0, schedule.s1, z.size)
    return s_grid, np.clip(d0 / z, 0.0, 1.0)


@dataclass(frozen=True)
class ScheduledHamiltonian:
    """Operator blocks plus schedule; evaluate(s) assembles
    H_A + H_B + f(s) H_AB + g(s) V_trap."""

    h_a: OperatorBlock
    h_b: OperatorBlock
    h_ab: OperatorBlock
    v_trap: OperatorBlock
    schedule: Schedule

    def __post_init__(self):
        dims = {b.dim for b in (self.h_a, self.h_b, self.h_ab, self.v_trap)}
        if len(dims) != 1:
            raise ValueError(f"block dimensions disagree: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.h_a.dim

    def evaluate(self, s: float) -> OperatorBlock:
        if not 0.0 <= s <= self.schedule.s1:
            raise ScheduleOutOfRange(
                f"s = {s} outside [0, {self.schedule.s1}]")
        f = self.schedule.f(s)
        g = self.schedule.g(s)
        mat = (self.h_a.matrix + self.h_b.matrix
               + f * self.h_ab.matrix + g * self.v_trap.matrix)
        return OperatorBlock(mat, "total")


def evaluate(sh: ScheduledHamiltonian, s: float) -> OperatorBlock:
    return sh.evaluate(s)
