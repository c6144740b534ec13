"""Basis enumeration and the collective decay generator.

Basis convention: a register of ``L`` two-level atoms is labelled by an
integer ``q`` in ``[0, 2**L)``. Bit ``j`` of ``q`` describes atom ``j``;
a set bit means the atom is excited, a clear bit means it is in the ground
level. The number of excitations is therefore ``popcount(q)``.

The zero-photon amplitudes obey ``dc/dt = -kappa * A @ c`` with
``kappa = gamma/2 + 1j*delta_omega``. ``A[q, q'']`` counts the two-step
paths that lower one excited atom of ``q`` and then raise one ground atom
of the intermediate state to reach ``q''``. This matrix equals the
collective product ``S+ S-``; :func:`oracle_generator` builds that product
from explicit tensor-product matrices for validation.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from math import comb
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from superrad.errors import DomainError, SizeError
from superrad.io import atomic_write_text, csv_text

__all__ = [
    "L_MAX",
    "ORACLE_L_MAX",
    "BasisState",
    "TwiceInversion",
    "DecayParams",
    "CollectiveGenerator",
    "popcount",
    "twice_inversion",
    "lower_set",
    "raise_set",
    "sector_indices",
    "generator_nnz",
    "memory_estimate_bytes",
    "build_generator",
    "oracle_generator",
]

log = logging.getLogger(__name__)

L_MAX = 16
ORACLE_L_MAX = 8


def popcount(q: np.ndarray | int, L: int) -> np.ndarray | int:
    """Number of set bits among the lowest ``L`` bits of ``q`` (vectorised)."""
    q = np.asarray(q, dtype=np.int64)
    count = np.zeros_like(q)
    for j in range(L):
        count += (q >> j) & 1
    return int(count) if count.ndim == 0 else count


@dataclass(frozen=True)
class BasisState:
    """One configuration of ``L`` atoms; bit ``j`` set means atom ``j`` excited."""

    index: int
    L: int

    def __post_init__(self):
        if self.L < 1:
            raise DomainError(f"atom count must be >= 1, got {self.L}")
        if not 0 <= self.index < (1 << self.L):
            raise DomainError(f"basis index {self.index} outside [0, 2**{self.L})")

    @property
    def excited_count(self) -> int:
        return bin(self.index).count("1")

    @property
    def ground_count(self) -> int:
        return self.L - self.excited_count

    def is_excited(self, atom: int) -> bool:
        return bool((self.index >> atom) & 1)

    def flip(self, atom: int) -> BasisState:
        return BasisState(self.index ^ (1 << atom), self.L)

    def label(self) -> str:
        """Ket label with atom 0 first, e.g. ``'eg'`` for index 0b01 and L=2."""
        return "".join("e" if self.is_excited(j) else "g" for j in range(self.L))


class TwiceInversion(NamedTuple):
    """Twice the half-inversion, ``2*M = n_excited - n_ground``, kept integral."""

    twice_m: int
    L: int

    @property
    def m(self) -> float:
        return self.twice_m / 2


@dataclass(frozen=True)
class DecayParams:
    """Bath constants.

    Parameters
    ----------
    gamma : float
        Single-atom decay rate (1/time).
    delta_omega : float
        Lamb shift (1/time). Only rotates phases.
    omega_a : float
        Atomic transition angular frequency (1/time). Enters only the
        run-budget formulas.
    """

    gamma: float = 1.0
    delta_omega: float = 0.0
    omega_a: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")
        if not self.omega_a > 0:
            raise DomainError(f"omega_a must be > 0, got {self.omega_a}")
        if not np.isfinite(self.delta_omega):
            raise DomainError("delta_omega must be finite")

    @property
    def kappa(self) -> complex:
        return complex(self.gamma / 2, self.delta_omega)


def twice_inversion(q: BasisState) -> TwiceInversion:
    n_e = q.excited_count
    return TwiceInversion(n_e - (q.L - n_e), q.L)


def lower_set(q: BasisState) -> list[BasisState]:
    """States reached by sending exactly one excited atom of ``q`` to ground."""
    return [q.flip(j) for j in range(q.L) if q.is_excited(j)]


def raise_set(q_prime: BasisState) -> list[BasisState]:
    """States reached by exciting exactly one ground atom of ``q_prime``."""
    return [q_prime.flip(j) for j in range(q_prime.L) if not q_prime.is_excited(j)]


def sector_indices(L: int, twice_m: int) -> np.ndarray:
    """Sorted basis indices whose inversion equals ``twice_m``."""
    if abs(twice_m) > L or (twice_m + L) % 2:
        raise DomainError(
            f"twice_m={twice_m} invalid for L={L}: need |twice_m| <= L and twice_m = L (mod 2)"
        )
    n_e = (L + twice_m) // 2
    q = np.arange(1 << L, dtype=np.int64)
    return q[popcount(q, L) == n_e]


def generator_nnz(L: int) -> int:
    """Stored entries of the generator: one diagonal per excited state plus n_e*n_g hops."""
    return sum(comb(L, k) * (k * (L - k) + (k > 0)) for k in range(L + 1))


def memory_estimate_bytes(L: int) -> int:
    """Approximate peak bytes for :func:`build_generator` including COO temporaries."""
    hops = sum(comb(L, k) * (k * (L - k) + k) for k in range(L + 1))
    return 3 * 8 * hops + 16 * generator_nnz(L) + 8 * ((1 << L) + 1)


class CollectiveGenerator:
    """Sparse integer matrix of two-step lower/raise path counts.

    The instance is read-only after construction. ``matrix`` is a CSR
    matrix with int64 data, whose row ``q`` is exactly the sorted adjacency
    list ``(q'', multiplicity)``.
    """

    def __init__(self, L: int, matrix: sp.csr_matrix):
        self.L = L
        matrix = matrix.tocsr()
        matrix.sort_indices()
        for arr in (matrix.data, matrix.indices, matrix.indptr):
            arr.setflags(write=False)
        self._matrix = matrix
        self._float = None

    @property
    def dim(self) -> int:
        return 1 << self.L

    @property
    def matrix(self) -> sp.csr_matrix:
        return self._matrix

    @property
    def nnz(self) -> int:
        return self._matrix.nnz

    def row(self, q: int) -> list[tuple[int, int]]:
        start, stop = self._matrix.indptr[q], self._matrix.indptr[q + 1]
        return [
            (int(c), int(m))
            for c, m in zip(self._matrix.indices[start:stop], self._matrix.data[start:stop])
        ]

    @property
    def rows(self) -> list[list[tuple[int, int]]]:
        return [self.row(q) for q in range(self.dim)]

    def as_float(self) -> sp.csr_matrix:
        """Float64 copy used for matrix-vector products (cached)."""
        if self._float is None:
            self._float = self._matrix.astype(np.float64)
        return self._float

    def matvec(self, c: np.ndarray) -> np.ndarray:
        return self.as_float() @ c

    def to_dense(self) -> np.ndarray:
        return self._matrix.toarray()

    def sector_block(self, twice_m: int) -> tuple[np.ndarray, np.ndarray]:
        """Basis indices of one inversion sector and the dense block of ``A`` on it."""
        idx = sector_indices(self.L, twice_m)
        block = self._matrix[idx][:, idx].toarray()
        return idx, block

    def to_csv(self, path: str | os.PathLike) -> None:
        """Write ``row,col,multiplicity`` records sorted by (row, col)."""
        coo = self._matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        records = [
            (int(coo.row[k]), int(coo.col[k]), int(coo.data[k])) for k in order
        ]
        atomic_write_text(path, csv_text(["row", "col", "multiplicity"], records))

    def __eq__(self, other):
        if not isinstance(other, CollectiveGenerator):
            return NotImplemented
        return self.L == other.L and (self._matrix != other._matrix).nnz == 0

    def __repr__(self):
        return f"CollectiveGenerator(L={self.L}, nnz={self.nnz})"


def build_generator(L: int, L_max: int = L_MAX) -> CollectiveGenerator:
    """Assemble the path-count generator for ``L`` atoms.

    Every excited atom ``i`` of ``q`` is lowered and then any ground atom
    ``j`` of the intermediate state (including ``i`` itself) is raised.
    ``j == i`` returns to ``q`` and builds the diagonal ``n_excited(q)``.

    Raises
    ------
    SizeError
        If ``L`` is outside ``[1, L_max]``.
    """
    if not 1 <= L <= L_max:
        raise SizeError(f"L={L} outside supported range [1, {L_max}] (L_max={L_max})")
    log.info(
        "building generator for L=%d: dim=%d, nnz=%d, ~%.1f MiB",
        L, 1 << L, generator_nnz(L), memory_estimate_bytes(L) / 2**20,
    )
    q = np.arange(1 << L, dtype=np.int64)
    bits = [(q >> j) & 1 for j in range(L)]
    rows, cols = [], []
    for i in range(L):
        excited_i = bits[i] == 1
        for j in range(L):
            if j == i:
                mask = excited_i
                target = q[mask]
            else:
                mask = excited_i & (bits[j] == 0)
                target = q[mask] ^ (1 << i) ^ (1 << j)
            rows.append(q[mask])
            cols.append(target)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.ones(rows.size, dtype=np.int64)
    # duplicates (the L diagonal contributions) are summed by the conversion
    matrix = sp.coo_matrix((data, (rows, cols)), shape=(1 << L, 1 << L)).tocsr()
    matrix.sum_duplicates()
    return CollectiveGenerator(L, matrix)


def _site_operator(op: np.ndarray, atom: int, L: int) -> np.ndarray:
    # atom 0 is the least significant bit, i.e. the rightmost Kronecker factor
    left = np.eye(1 << (L - 1 - atom), dtype=np.int64)
    right = np.eye(1 << atom, dtype=np.int64)
    return np.kron(np.kron(left, op), right)


def oracle_generator(L: int) -> np.ndarray:
    """Dense ``S+ @ S-`` from per-atom ladder operators (validation only).

    Single-atom basis is ``(|g>, |e>)``, so ``sigma_minus = |g><e|``.
    """
    if not 1 <= L <= ORACLE_L_MAX:
        raise SizeError(f"oracle_generator supports 1 <= L <= {ORACLE_L_MAX}, got L={L}")
    sigma_minus = np.array([[0, 1], [0, 0]], dtype=np.int64)
    sigma_plus = sigma_minus.T
    s_minus = sum(_site_operator(sigma_minus, j, L) for j in range(L))
    s_plus = sum(_site_operator(sigma_plus, j, L) for j in range(L))
    return s_plus @ s_minus
