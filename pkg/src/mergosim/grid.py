"""Real-space integer-lattice grid and the enumerated many-body basis.

A grid of m points per axis (m odd) labels the integer lattice
[-(m-1)/2, (m-1)/2]^dims inside the box Omega = [-L/2, L/2]^dims, and
label p maps to the coordinate p * (L/m) per component. Configurations
are ordered tuples of per-particle labels plus optional spin labels;
their lexicographic enumeration is the basis every dense operator in
this package is expressed in.

Atomic units throughout: lengths in Bohr, masses in electron masses,
charges in units of e.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DimensionCapExceeded, LabelOutOfRange

SPIN_UP = 0
SPIN_DOWN = 1

ELECTRON_MASS = 1.0
ELECTRON_CHARGE = -1.0

DEFAULT_DIMENSION_CAP = 4096


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice grid; ``points_per_axis`` must be odd so the
    lattice has an exact center point."""

    points_per_axis: int
    dims: int
    box_length: float

    def __post_init__(self):
        if self.points_per_axis < 1 or self.points_per_axis % 2 == 0:
            raise ValueError("points_per_axis must be a positive odd integer")
        if self.dims not in (1, 2, 3):
            raise ValueError("dims must be 1, 2 or 3")
        if self.box_length <= 0:
            raise ValueError("box_length must be positive")

    @property
    def max_label(self) -> int:
        return (self.points_per_axis - 1) // 2

    @property
    def spacing(self) -> float:
        return self.box_length / self.points_per_axis

    @property
    def n_points(self) -> int:
        return self.points_per_axis ** self.dims

    def axis_labels(self) -> range:
        return range(-self.max_label, self.max_label + 1)

    def labels(self) -> Iterator[tuple[int, ...]]:
        """All lattice labels, lexicographically ordered."""
        return itertools.product(self.axis_labels(), repeat=self.dims)

    def contains_label(self, label: Sequence[int]) -> bool:
        return len(label) == self.dims and all(
            -self.max_label <= int(c) <= self.max_label for c in label)


def normalize_label(grid: GridSpec, label) -> tuple[int, ...]:
    """Accept a bare int in 1D, otherwise require a dims-length tuple."""
    if isinstance(label, (int, np.integer)):
        label = (int(label),)
    label = tuple(int(c) for c in label)
    if not grid.contains_label(label):
        raise LabelOutOfRange(f"label {label} outside lattice of {grid}")
    return label


def label_to_coord(grid: GridSpec, label) -> np.ndarray:
    """Map lattice label p to the coordinate p * (L/m), in Bohr."""
    lab = normalize_label(grid, label)
    return np.array(lab, dtype=float) * grid.spacing


@dataclass(frozen=True)
class ParticleSet:
    """Electrons (mass 1, charge -1) plus nuclei with explicit masses
    and charges. Register order is electrons first, then nuclei."""

    n_el: int
    nuclear_masses: tuple[float, ...] = ()
    nuclear_charges: tuple[float, ...] = ()
    electron_spin: bool = False
    nuclear_spin: bool = False

    def __post_init__(self):
        object.__setattr__(self, "nuclear_masses",
                           tuple(float(m) for m in self.nuclear_masses))
        object.__setattr__(self, "nuclear_charges",
                           tuple(float(q) for q in self.nuclear_charges))
        if self.n_el < 0:
            raise ValueError("n_el must be nonnegative")
        if len(self.nuclear_masses) != len(self.nuclear_charges):
            raise ValueError("one charge per nuclear mass required")
        if any(m <= 0 for m in self.nuclear_masses):
            raise ValueError("nuclear masses must be strictly positive")
        if self.n_particles == 0:
            raise ValueError("at least one particle required")

    @property
    def n_nuc(self) -> int:
        return len(self.nuclear_masses)

    @property
    def n_particles(self) -> int:
        return self.n_el + self.n_nuc

    def is_nucleus(self, register: int) -> bool:
        return register >= self.n_el

    def nucleus_register(self, j: int) -> int:
        """Register index of nucleus j (0-based among nuclei)."""
        if not 0 <= j < self.n_nuc:
            raise IndexError(f"nucleus index {j} out of range")
        return self.n_el + j

    def mass(self, register: int) -> float:
        if self.is_nucleus(register):
            return self.nuclear_masses[register - self.n_el]
        return ELECTRON_MASS

    def charge(self, register: int) -> float:
        if self.is_nucleus(register):
            return self.nuclear_charges[register - self.n_el]
        return ELECTRON_CHARGE

    def has_spin(self, register: int) -> bool:
        return self.nuclear_spin if self.is_nucleus(register) else self.electron_spin


@dataclass(frozen=True)
class Configuration:
    """One basis label: per-particle grid labels and spin labels.

    ``spins`` entries are SPIN_UP/SPIN_DOWN for spin-carrying registers
    and None where spin is disabled.
    """

    labels: tuple[tuple[int, ...], ...]
    spins: tuple[Optional[int], ...]

    def replace_label(self, register: int, label: tuple[int, ...]) -> "Configuration":
        labels = list(self.labels)
        labels[register] = tuple(label)
        return Configuration(tuple(labels), self.spins)

    def replace_spin(self, register: int, spin: Optional[int]) -> "Configuration":
        spins = list(self.spins)
        spins[register] = spin
        return Configuration(self.labels, tuple(spins))


class Basis:
    """Deterministically ordered configuration basis with O(1) index lookup."""

    def __init__(self, grid: GridSpec, particles: ParticleSet,
                 configurations: Sequence[Configuration]):
        self.grid = grid
        self.particles = particles
        self.configurations = tuple(configurations)
        self._index = {c: i for i, c in enumerate(self.configurations)}

    @property
    def size(self) -> int:
        return len(self.configurations)

    def index_of(self, config: Configuration) -> int:
        return self._index[config]

    def configuration_at(self, i: int) -> Configuration:
        return self.configurations[i]

    def __contains__(self, config: Configuration) -> bool:
        return config in self._index

    def coordinates(self, config: Configuration) -> np.ndarray:
        """Per-particle coordinates, shape (n_particles, dims)."""
        return np.array([label_to_coord(self.grid, lab) for lab in config.labels])

    def nuclear_coordinates(self, config: Configuration) -> np.ndarray:
        coords = self.coordinates(config)
        return coords[self.particles.n_el:]


def basis_dimension(grid: GridSpec, particles: ParticleSet) -> int:
    """Exact basis size (m^dims * spin_factor per register, multiplied)."""
    dim = 1
    for p in range(particles.n_particles):
        dim *= grid.n_points * (2 if particles.has_spin(p) else 1)
    return dim


def enumerate_basis(grid: GridSpec, particles: ParticleSet,
                    cap: int = DEFAULT_DIMENSION_CAP) -> Basis:
    """Enumerate all configurations in lexicographic order.

    The first register varies slowest; per register, the grid label is
    the major key and spin (up before down) the minor one. Raises
    DimensionCapExceeded before allocating anything oversized.
    """
    dim = basis_dimension(grid, particles)
    if dim > cap:
        raise DimensionCapExceeded(
            f"basis size {dim} exceeds the configured cap {cap}")

    per_register = []
    for p in range(particles.n_particles):
        spins = (SPIN_UP, SPIN_DOWN) if particles.has_spin(p) else (None,)
        per_register.append([(lab, s) for lab in grid.labels() for s in spins])

    configs = []
    for combo in itertools.product(*per_register):
        labels = tuple(lab for lab, _ in combo)
        spins = tuple(s for _, s in combo)
        configs.append(Configuration(labels, spins))
    return Basis(grid, particles, configs)
