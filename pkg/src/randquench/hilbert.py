"""Many-body bases, conserved-charge sectors, and sector-resolved states.

Basis conventions used throughout the package:

* sites are indexed 0..L-1, row-major for 2D rectangles (site = y*Lx + x);
* a spin-1/2 configuration is a tuple of bits per site, 0 = up (sigma_z = +1);
* a fermionic configuration is a flat tuple of mode occupations with modes
  ordered site-major, up species before down within a site (this is also the
  Jordan-Wigner ordering used for signs);
* a bosonic configuration is a tuple of site occupations;
* sector bases are ordered lexicographically in the configuration tuple,
  site 0 (mode 0) most significant, and sectors lexicographically in their
  charge labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-12
EIGENVALUE_TOL = 1e-12
TRACE_TOL = 1e-12

Config = tuple


@dataclass(frozen=True)
class Lattice:
    """An open-boundary chain or rectangle of sites."""

    shape: tuple[int, ...]

    def __post_init__(self):
        if len(self.shape) not in (1, 2) or any(s < 1 for s in self.shape):
            raise ValueError(f"lattice shape must be (L,) or (Lx, Ly) with positive entries, got {self.shape}")

    @classmethod
    def chain(cls, length: int) -> "Lattice":
        return cls((length,))

    @classmethod
    def rectangle(cls, lx: int, ly: int) -> "Lattice":
        return cls((lx, ly))

    @property
    def n_sites(self) -> int:
        n = 1
        for s in self.shape:
            n *= s
        return n

    @property
    def is_1d(self) -> bool:
        return len(self.shape) == 1

    def site_index(self, x: int, y: int = 0) -> int:
        lx = self.shape[0]
        return y * lx + x

    def neighbor_pairs(self) -> list[tuple[int, int]]:
        """Nearest-neighbor pairs (i, l) with i < l."""
        if self.is_1d:
            return [(i, i + 1) for i in range(self.n_sites - 1)]
        lx, ly = self.shape
        pairs = []
        for y in range(ly):
            for x in range(lx):
                if x + 1 < lx:
                    pairs.append((self.site_index(x, y), self.site_index(x + 1, y)))
                if y + 1 < ly:
                    pairs.append((self.site_index(x, y), self.site_index(x, y + 1)))
        pairs.sort()
        return pairs

    def all_pairs_1d(self) -> list[tuple[int, int, int]]:
        """All (i, l, distance) pairs with i < l; power-law couplings use these."""
        if not self.is_1d:
            raise ValueError("all-pairs couplings are defined for 1D chains only")
        n = self.n_sites
        return [(i, l, l - i) for i in range(n) for l in range(i + 1, n)]


@dataclass(frozen=True, eq=False)
class Sector:
    """One conserved-charge block: label, ordered basis, and index lookup."""

    label: tuple
    basis: tuple[Config, ...]
    _index: dict = field(repr=False)

    @classmethod
    def from_basis(cls, label: tuple, basis: list[Config]) -> "Sector":
        basis = tuple(sorted(basis))
        return cls(label, basis, {c: k for k, c in enumerate(basis)})

    @property
    def dim(self) -> int:
        return len(self.basis)

    def lookup(self, config: Config) -> int:
        try:
            return self._index[config]
        except KeyError:
            raise KeyError(f"configuration {config} not in sector {self.label}") from None

    def __contains__(self, config: Config) -> bool:
        return config in self._index


def spin_sectors(lattice: Lattice, split_parity: bool) -> list[Sector]:
    """Spin-1/2 sectors: the full 2^L block, or two blocks of fixed
    (number of down spins) mod 2 when the flip-parity is conserved."""
    n = lattice.n_sites
    configs = list(itertools.product((0, 1), repeat=n))
    if not split_parity:
        return [Sector.from_basis((), configs)]
    by_parity: dict[int, list[Config]] = {0: [], 1: []}
    for c in configs:
        by_parity[sum(c) % 2].append(c)
    return [Sector.from_basis((p,), by_parity[p]) for p in (0, 1)]


def fermi_sectors(lattice: Lattice) -> list[Sector]:
    """All (N, S_z) sectors of spinful fermions; S_z counted as N_up - N_down."""
    n = lattice.n_sites
    by_charge: dict[tuple[int, int], list[Config]] = {}
    for config in itertools.product((0, 1), repeat=2 * n):
        n_up = sum(config[0::2])
        n_dn = sum(config[1::2])
        by_charge.setdefault((n_up + n_dn, n_up - n_dn), []).append(config)
    return [Sector.from_basis(label, cfgs) for label, cfgs in sorted(by_charge.items())]


def validate_fermi_label(lattice: Lattice, n_total: int, s_z: int) -> None:
    n = lattice.n_sites
    if not 0 <= n_total <= 2 * n:
        raise ValueError(f"fermion number {n_total} outside 0..{2 * n}")
    if abs(s_z) > n_total or (n_total - s_z) % 2 != 0:
        raise ValueError(f"(N, S_z) = ({n_total}, {s_z}) is not a valid sector: "
                         "|S_z| <= N and N - S_z even required")
    if abs(s_z) > 2 * n - n_total:
        raise ValueError(f"(N, S_z) = ({n_total}, {s_z}) exceeds lattice capacity")


def bose_sector(lattice: Lattice, n_particles: int) -> Sector:
    """The fixed-N bosonic block; local occupations run up to N (no cutoff)."""
    if n_particles < 0:
        raise ValueError(f"particle number must be non-negative, got {n_particles}")
    n = lattice.n_sites
    configs = [c for c in itertools.product(range(n_particles + 1), repeat=n)
               if sum(c) == n_particles]
    return Sector.from_basis((n_particles,), configs)


class SectorState:
    """A block-diagonal density matrix, one Hermitian PSD block per sector.

    Blocks are validated on construction (Hermiticity, positivity and unit
    total trace, each to 1e-12) and treated as immutable afterwards.  States
    built from pure vectors keep the vectors around so measurement code can
    use the cheaper |U psi|^2 path.
    """

    def __init__(self, blocks: dict[tuple, np.ndarray], vectors: dict[tuple, np.ndarray] | None = None):
        self.blocks = {label: np.asarray(b, dtype=complex) for label, b in blocks.items()}
        self.vectors = vectors
        self._validate()

    @classmethod
    def from_vector(cls, label: tuple, vector: np.ndarray) -> "SectorState":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls({label: np.outer(v, v.conj())}, vectors={label: v})

    @classmethod
    def maximally_mixed(cls, sectors: list[Sector]) -> "SectorState":
        total = sum(s.dim for s in sectors)
        return cls({s.label: np.eye(s.dim) / total for s in sectors})

    def _validate(self) -> None:
        trace = 0.0
        for label, block in self.blocks.items():
            if block.ndim != 2 or block.shape[0] != block.shape[1]:
                raise ValueError(f"sector {label}: block is not square")
            scale = max(np.abs(block).max(), 1.0)
            if np.abs(block - block.conj().T).max() > HERMITICITY_TOL * scale:
                raise ValueError(f"sector {label}: block is not Hermitian")
            eigs = np.linalg.eigvalsh(block)
            if eigs.min() < -EIGENVALUE_TOL:
                raise ValueError(f"sector {label}: negative eigenvalue {eigs.min():.3e}")
            trace += eigs.sum()
        if abs(trace - 1.0) > max(TRACE_TOL, 1e-14 * sum(b.shape[0] for b in self.blocks.values())):
            raise ValueError(f"total trace {trace!r} != 1")

    @property
    def labels(self) -> list[tuple]:
        return list(self.blocks)

    def block_dim(self, label: tuple) -> int:
        return self.blocks[label].shape[0]

    def trace_powers(self, n: int) -> dict[tuple, float]:
        return sector_trace_powers(self, n)

    def total_trace_power(self, n: int) -> float:
        return float(sum(self.trace_powers(n).values()))


def sector_trace_powers(state: SectorState, n: int) -> dict[tuple, float]:
    """Exact Tr[(rho_block)^n] per sector, via eigenvalues.

    This is the ground-truth oracle every estimator in the package is
    checked against.
    """
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    out = {}
    for label, block in state.blocks.items():
        eigs = np.linalg.eigvalsh(block)
        out[label] = float(np.sum(np.clip(eigs, 0.0, None) ** n))
    return out
