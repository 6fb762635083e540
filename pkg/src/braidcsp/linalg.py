"""Exact linear algebra over a prime field F_ell.

Vectors are 1-d ``numpy`` int64 arrays with entries in ``0..ell-1``. A subspace
keeps its basis in reduced row echelon form, pivoting on the lowest nonzero
coordinate. For ``ell == 2`` rows are packed into Python ints and eliminated
with XOR; other primes use dense modular rows.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

Vector = np.ndarray
Operator = Callable[[np.ndarray], np.ndarray]


def vec(values: Iterable[int], ell: int) -> np.ndarray:
    return np.asarray(list(values), dtype=np.int64) % ell


def zeros(dim: int) -> np.ndarray:
    return np.zeros(dim, dtype=np.int64)


def unit(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.int64)
    v[i] = 1
    return v


def to_bits(v: np.ndarray) -> int:
    if len(v) == 0:
        return 0
    return int.from_bytes(np.packbits(v.astype(np.uint8) & 1, bitorder="little").tobytes(), "little")


def from_bits(x: int, dim: int) -> np.ndarray:
    nbytes = (dim + 7) // 8
    raw = np.frombuffer(x.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:dim].astype(np.int64)


def _low_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


class FlSubspace:
    """Subspace of F_ell^dim with a reduced echelon basis.

    ``dense=True`` forces the general modular path even for ``ell == 2``; it
    exists so the two paths can be checked against each other.
    """

    __slots__ = ("ell", "dim", "_bits", "_rows", "_dense")

    def __init__(self, ell: int, dim: int, rows: Iterable[np.ndarray] = (), dense: bool = False):
        if ell < 2:
            raise ValueError("ell must be a prime")
        self.ell = ell
        self.dim = dim
        self._dense = dense or ell != 2
        self._bits: dict[int, int] = {}
        self._rows: dict[int, np.ndarray] = {}
        for r in rows:
            self.insert(r)

    # -- basic queries

    @property
    def rank(self) -> int:
        return len(self._rows) if self._dense else len(self._bits)

    def __len__(self):
        return self.rank

    def copy(self) -> "FlSubspace":
        out = FlSubspace(self.ell, self.dim, dense=self._dense)
        out._bits = dict(self._bits)
        out._rows = {p: r.copy() for p, r in self._rows.items()}
        return out

    def pivots(self) -> list[int]:
        return sorted(self._rows if self._dense else self._bits)

    def basis(self) -> list[np.ndarray]:
        if self._dense:
            return [self._rows[p].copy() for p in sorted(self._rows)]
        return [from_bits(self._bits[p], self.dim) for p in sorted(self._bits)]

    def _check(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.dim,):
            raise ValueError(f"dimension mismatch: expected {self.dim}, got {v.shape}")
        return v % self.ell

    # -- reduction

    def _reduce_bits(self, x: int) -> int:
        for p, row in self._bits.items():
            if (x >> p) & 1:
                x ^= row
        return x

    def _reduce_dense(self, v: np.ndarray) -> np.ndarray:
        v = v.copy()
        for p, row in self._rows.items():
            c = v[p]
            if c:
                v = (v - c * row) % self.ell
        return v

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Canonical representative of the coset ``v + self``."""
        v = self._check(v)
        if self._dense:
            return self._reduce_dense(v)
        return from_bits(self._reduce_bits(to_bits(v)), self.dim)

    def contains(self, v: np.ndarray) -> bool:
        v = self._check(v)
        if self._dense:
            return not self._reduce_dense(v).any()
        return self._reduce_bits(to_bits(v)) == 0

    __contains__ = contains

    # -- growth

    def insert(self, v: np.ndarray) -> bool:
        """Add ``v`` to the span; returns True when the rank grew."""
        v = self._check(v)
        if self._dense:
            r = self._reduce_dense(v)
            nz = np.flatnonzero(r)
            if len(nz) == 0:
                return False
            p = int(nz[0])
            r = (r * pow(int(r[p]), -1, self.ell)) % self.ell
            for q, row in self._rows.items():
                c = row[p]
                if c:
                    self._rows[q] = (row - c * r) % self.ell
            self._rows[p] = r
            return True
        x = self._reduce_bits(to_bits(v))
        if x == 0:
            return False
        p = _low_bit(x)
        for q, row in self._bits.items():
            if (row >> p) & 1:
                self._bits[q] = row ^ x
        self._bits[p] = x
        return True

    def extend(self, vs: Iterable[np.ndarray]) -> int:
        return sum(self.insert(v) for v in vs)

    def is_subspace_of(self, other: "FlSubspace") -> bool:
        return all(other.contains(b) for b in self.basis())

    def __eq__(self, other):
        return (
            isinstance(other, FlSubspace)
            and (self.ell, self.dim) == (other.ell, other.dim)
            and self.rank == other.rank
            and self.is_subspace_of(other)
        )

    def __repr__(self):
        return f"FlSubspace(ell={self.ell}, dim={self.dim}, rank={self.rank})"


def span_insert(S: FlSubspace, v: np.ndarray) -> tuple[FlSubspace, bool]:
    """Value-style insert: returns the new subspace and whether it grew."""
    out = S.copy()
    grew = out.insert(v)
    return out, grew


def module_closure(
    seed: Sequence[np.ndarray],
    ops: Sequence[Operator],
    ell: int,
    dim: int,
    start: Optional[FlSubspace] = None,
) -> FlSubspace:
    """Least subspace containing ``seed`` (and ``start``) closed under ``ops``.

    Worklist is FIFO over newly added vectors; each is pushed through every
    operator once, which suffices because the operators are linear.
    """
    S = start.copy() if start is not None else FlSubspace(ell, dim)
    queue: deque[np.ndarray] = deque()
    if start is not None:
        queue.extend(start.basis())
    for v in seed:
        if S.insert(v):
            queue.append(np.asarray(v, dtype=np.int64) % ell)
    while queue:
        v = queue.popleft()
        for op in ops:
            w = op(v)
            if S.insert(w):
                queue.append(w)
    return S


class AffineSet:
    """``offset + directions``; the solution set of a consistent linear system."""

    def __init__(self, offset: np.ndarray, directions: FlSubspace):
        self.offset = directions.reduce(offset)
        self.directions = directions

    @property
    def dim(self) -> int:
        return self.directions.rank

    def contains(self, v: np.ndarray) -> bool:
        return self.directions.contains((np.asarray(v) - self.offset) % self.directions.ell)

    def __repr__(self):
        return f"AffineSet(dim={self.dim})"


def solve_affine(
    constraints: Sequence[tuple[Operator, np.ndarray]],
    ambient: FlSubspace,
    offset: Optional[np.ndarray] = None,
    modulo: Optional[FlSubspace] = None,
) -> Optional[AffineSet]:
    """Solve ``A_k(x) = b_k`` (mod ``modulo``) for ``x`` in ``offset + ambient``.

    Returns None when inconsistent. Coordinates are solved by echelonizing the
    augmented rows ``(A(b_i) | e_i)`` for the ambient basis ``b_i``: rows whose
    constraint part vanishes span the kernel, and reducing ``(rhs | 0)`` yields a
    particular solution.
    """
    ell, dim = ambient.ell, ambient.dim
    x0 = zeros(dim) if offset is None else np.asarray(offset, dtype=np.int64) % ell
    B = ambient.basis()
    r = len(B)

    def red(v):
        return modulo.reduce(v) if modulo is not None else np.asarray(v, dtype=np.int64) % ell

    cols = [[] for _ in range(r)]
    rhs = []
    for op, b in constraints:
        rhs.append(red(np.asarray(b, dtype=np.int64) - op(x0)))
        for i, bi in enumerate(B):
            cols[i].append(red(op(bi)))
    if not constraints:
        return AffineSet(x0, ambient.copy())
    ccols = [np.concatenate(c) for c in cols]
    crhs = np.concatenate(rhs)
    D = len(crhs)
    aug = FlSubspace(ell, D + r)
    for i in range(r):
        aug.insert(np.concatenate([ccols[i], unit(r, i)]))
    res = aug.reduce(np.concatenate([crhs, zeros(r)]))
    if res[:D].any():
        return None
    coeffs = (-res[D:]) % ell
    x = x0.copy()
    for c, bi in zip(coeffs, B):
        if c:
            x = (x + int(c) * bi) % ell
    dirs = FlSubspace(ell, dim)
    for row in aug.basis():
        if not row[:D].any():
            d = zeros(dim)
            for c, bi in zip(row[D:], B):
                if c:
                    d = (d + int(c) * bi) % ell
            dirs.insert(d)
    return AffineSet(x, dirs)
