"""Semidirect products V x| B of permutation modules by finite groups.

``B`` acts on the coordinates of ``V = F_ell^d`` by permutations, e.g. the
regular action of a group on its group algebra. Elements are pairs ``(v, g)``
with ``(v, g)(v', g') = (v + g.v', g g')``.

Subgroups too large to enumerate are held as :class:`LinByFin`: the finite
quotient ``F`` (the ``B``-parts), a transversal, and the kernel of the
projection to ``F`` as an F_ell-subspace. A :class:`Semidirect` may carry a
``zero`` subspace, making its elements cosets; this is how quotients by
central or normal vector subgroups are represented.
"""

from __future__ import annotations

import random
from typing import Any, Optional, Sequence

import numpy as np

from .fingroup import DEFAULT_CAP, CapExceeded, FinGroup, ProductArith
from .linalg import FlSubspace, module_closure, solve_affine, unit, zeros


class SDElem:
    """An element ``(v, g)``. Treat as immutable."""

    __slots__ = ("v", "g", "_hash")

    def __init__(self, v: np.ndarray, g: Any):
        self.v = v
        self.g = g
        self._hash = None

    def __eq__(self, other):
        return isinstance(other, SDElem) and self.g == other.g and np.array_equal(self.v, other.v)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.g, self.v.tobytes()))
        return self._hash

    def key(self):
        return (repr(self.g), tuple(int(x) for x in self.v))

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        nz = [(int(i), int(self.v[i])) for i in np.flatnonzero(self.v)]
        return f"SDElem({nz}, {self.g!r})"


# ------------------------------------------------------------------ actions

class RegularAction:
    """Left multiplication of an enumerated group on its group algebra."""

    def __init__(self, group: FinGroup):
        self.group = group
        self.d = group.order()
        self._pull: dict = {}

    def pull(self, g) -> np.ndarray:
        p = self._pull.get(g)
        if p is None:
            G = self.group
            gi = G.inv(g)
            p = np.fromiter((G.index(G.mul(gi, b)) for b in G.elements), dtype=np.intp, count=self.d)
            self._pull[g] = p
        return p

    def basis_index(self, g) -> int:
        return self.group.index(g)


class NullAction:
    d = 0

    def pull(self, g) -> np.ndarray:
        return np.zeros(0, dtype=np.intp)


class BlockAction:
    """Componentwise action of a product group on a direct sum."""

    def __init__(self, actions: Sequence[Any]):
        self.actions = tuple(actions)
        self.offsets = np.cumsum([0] + [a.d for a in self.actions])
        self.d = int(self.offsets[-1])
        self._pull: dict = {}

    def pull(self, g) -> np.ndarray:
        p = self._pull.get(g)
        if p is None:
            parts = [a.pull(x) + off for a, x, off in zip(self.actions, g, self.offsets)]
            p = np.concatenate(parts) if parts else np.zeros(0, dtype=np.intp)
            self._pull[g] = p
        return p


# ------------------------------------------------------------------ arithmetic

class Semidirect:
    """Arithmetic of ``F_ell^d x| B`` (optionally modulo a ``zero`` subspace)."""

    def __init__(self, base, action, ell: int, zero: Optional[FlSubspace] = None, name: str = ""):
        self.base = base
        self.action = action
        self.ell = ell
        self.d = action.d
        if zero is not None and zero.rank == 0:
            zero = None
        self.zero = zero
        self.name = name
        self.identity = SDElem(zeros(self.d), base.identity)

    def act(self, g, v: np.ndarray) -> np.ndarray:
        return v[self.action.pull(g)]

    def _red(self, v: np.ndarray) -> np.ndarray:
        return self.zero.reduce(v) if self.zero is not None else v

    def elem(self, v, g) -> SDElem:
        return SDElem(self._red(np.asarray(v, dtype=np.int64) % self.ell), g)

    def vector(self, v) -> SDElem:
        return self.elem(v, self.base.identity)

    def lift(self, g) -> SDElem:
        return SDElem(zeros(self.d), g)

    def normalize(self, x: SDElem) -> SDElem:
        return SDElem(self._red(x.v), x.g) if self.zero is not None else x

    def mul(self, a: SDElem, b: SDElem) -> SDElem:
        v = (a.v + b.v[self.action.pull(a.g)]) % self.ell
        if self.zero is not None:
            v = self.zero.reduce(v)
        return SDElem(v, self.base.mul(a.g, b.g))

    def inv(self, a: SDElem) -> SDElem:
        gi = self.base.inv(a.g)
        v = (-a.v[self.action.pull(gi)]) % self.ell
        if self.zero is not None:
            v = self.zero.reduce(v)
        return SDElem(v, gi)

    def pow(self, a: SDElem, k: int) -> SDElem:
        if k < 0:
            a, k = self.inv(a), -k
        out = self.identity
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def conj(self, g: SDElem, x: SDElem) -> SDElem:
        return self.mul(self.mul(g, x), self.inv(g))

    def with_zero(self, zero: Optional[FlSubspace]) -> "Semidirect":
        return Semidirect(self.base, self.action, self.ell, zero, self.name)

    def zero_rank(self) -> int:
        return 0 if self.zero is None else self.zero.rank

    def __repr__(self):
        return f"<Semidirect {self.name} ell={self.ell} d={self.d}>"


def group_algebra_semidirect(B: FinGroup, ell: int, name: str = "") -> Semidirect:
    """``F_ell[B] x| B`` with B acting by left multiplication."""
    B.enumerate()
    return Semidirect(B, RegularAction(B), ell, name=name)


def plain_semidirect(B, ell: int) -> Semidirect:
    """A finite group seen as a semidirect product with a zero-dimensional module."""
    return Semidirect(B, NullAction(), ell)


def basis_vector(S: Semidirect, b) -> np.ndarray:
    """The group-algebra basis vector of base element ``b`` (regular actions only)."""
    return unit(S.d, S.action.basis_index(b))


def all_ones(S: Semidirect) -> np.ndarray:
    return np.ones(S.d, dtype=np.int64)


def product_semidirect(parts: Sequence[Semidirect]) -> Semidirect:
    ells = {p.ell for p in parts if p.d}
    if len(ells) > 1:
        raise ValueError("mixed characteristics")
    ell = ells.pop() if ells else parts[0].ell
    action = BlockAction([p.action for p in parts])
    zero = None
    if any(p.zero is not None for p in parts):
        zero = FlSubspace(ell, action.d)
        for p, off in zip(parts, action.offsets):
            if p.zero is not None:
                for b in p.zero.basis():
                    z = zeros(action.d)
                    z[off:off + p.d] = b
                    zero.insert(z)
    base = ProductArith([p.base for p in parts])
    return Semidirect(base, action, ell, zero)


def pair_elements(xs: Sequence[SDElem]) -> SDElem:
    v = np.concatenate([x.v for x in xs]) if xs else zeros(0)
    return SDElem(v, tuple(x.g for x in xs))


def block(x: SDElem, S: Semidirect, k: int) -> SDElem:
    """Component ``k`` of an element of a product semidirect."""
    off = S.action.offsets
    return SDElem(x.v[off[k]:off[k + 1]], x.g[k])


# ------------------------------------------------------------------ sd arithmetic helpers

def sd_mul(S: Semidirect, a: SDElem, b: SDElem) -> SDElem:
    return S.mul(a, b)


def sd_inv(S: Semidirect, a: SDElem) -> SDElem:
    return S.inv(a)


def sd_pow(S: Semidirect, a: SDElem, k: int) -> SDElem:
    return S.pow(a, k)


# ------------------------------------------------------------------ linear-by-finite groups

class LinByFin:
    """Subgroup of a :class:`Semidirect` held as module kernel + finite quotient.

    Attributes:
        ambient: arithmetic of the containing semidirect product.
        gens: generating elements.
        quotient: the finite group of ``B``-parts, enumerated.
        transversal: ``f -> (t(f), f)`` for each ``f`` in ``quotient``.
        module: kernel of the projection to ``quotient``; contains ``ambient.zero``.
    """

    def __init__(self, ambient: Semidirect, gens, quotient: FinGroup, transversal: dict, module: FlSubspace):
        self.ambient = ambient
        self.gens = tuple(gens)
        self.quotient = quotient
        self.transversal = transversal
        self.module = module

    @property
    def ell(self) -> int:
        return self.ambient.ell

    @property
    def rank(self) -> int:
        """Dimension of the vector kernel after quotienting by ``ambient.zero``."""
        return self.module.rank - self.ambient.zero_rank()

    def order(self) -> int:
        return self.ell ** self.rank * self.quotient.order()

    def order_str(self) -> str:
        return f"{self.ell}^{self.rank}*{self.quotient.order()}"

    def t(self, f) -> np.ndarray:
        return self.transversal[f].v

    def contains(self, x: SDElem) -> bool:
        if x.g not in self.quotient:
            return False
        return self.module.contains((x.v - self.t(x.g)) % self.ell)

    def normal_form(self, x: SDElem) -> tuple:
        x = self.ambient.normalize(x)
        return (x.g, x.v.tobytes())

    def is_identity(self, x: SDElem) -> bool:
        return self.ambient.normalize(x) == self.ambient.identity

    def quotient_ops(self):
        S = self.ambient
        return [lambda v, f=f: S.act(f, v) for f in self.quotient.gens]

    def cocycle_defect(self, f, f2) -> np.ndarray:
        S = self.ambient
        ff = self.quotient.mul(f, f2)
        return (self.t(f) + S.act(f, self.t(f2)) - self.t(ff)) % self.ell

    def random_element(self, rng: random.Random) -> SDElem:
        F = self.quotient.elements
        f = F[rng.randrange(len(F))]
        v = self.t(f).copy()
        for b in self.module.basis():
            c = rng.randrange(self.ell)
            if c:
                v = (v + c * b) % self.ell
        return self.ambient.elem(v, f)

    def as_fingroup(self, cap: int = DEFAULT_CAP) -> FinGroup:
        return FinGroup(self.ambient, self.gens, cap=cap)

    def __repr__(self):
        return f"<LinByFin order={self.order_str()} d={self.ambient.d}>"


def linbyfin_from_generators(S: Semidirect, gens: Sequence[SDElem], cap: int = DEFAULT_CAP) -> LinByFin:
    """Build the subgroup of ``S`` generated by ``gens``.

    The quotient is enumerated breadth-first; every non-tree edge contributes a
    Schreier defect ``x_f s x_{fs}^-1``, which is vector-only. Their span (closed
    under the quotient action) is the full kernel.
    """
    gens = [S.normalize(g) for g in gens]
    base = S.base
    e = base.identity
    reps = {e: S.identity}
    order = [e]
    defects = []
    i = 0
    while i < len(order):
        f = order[i]
        i += 1
        x = reps[f]
        for s in gens:
            y = S.mul(x, s)
            if y.g not in reps:
                if len(order) >= cap:
                    raise CapExceeded(f"quotient exceeds cap {cap}")
                reps[y.g] = y
                order.append(y.g)
            else:
                d = S.mul(y, S.inv(reps[y.g]))
                if d.v.any():
                    defects.append(d.v)
    quotient = FinGroup(base, [g.g for g in gens], cap=cap)
    quotient.enumerate()
    ops = [lambda v, f=f: S.act(f, v) for f in quotient.gens]
    start = S.zero.copy() if S.zero is not None else None
    module = module_closure(defects, ops, S.ell, S.d, start=start)
    return LinByFin(S, gens, quotient, reps, module)


def _solution_elements(G: LinByFin, constraints_for) -> list[SDElem]:
    """Generators of the set of ``(v, f)`` in G satisfying per-``f`` linear constraints."""
    S = G.ambient
    out = []
    for f in G.quotient.elements:
        cons = constraints_for(f)
        if cons is None:
            continue
        sol = solve_affine(cons, G.module, offset=G.t(f), modulo=S.zero)
        if sol is None:
            continue
        out.append(S.elem(sol.offset, f))
        if f == S.base.identity:
            out.extend(S.vector(b) for b in sol.directions.basis())
    return out


def linbyfin_center(G: LinByFin) -> LinByFin:
    """Exact center: ``(v, f)`` with ``f`` central in the quotient and
    ``(1 - f_j) v = (1 - f) w_j`` (mod zero) for every generator ``(w_j, f_j)``."""
    S = G.ambient
    F = G.quotient

    def constraints_for(f):
        if not F.commutes_with_all(f, [g.g for g in G.gens]):
            return None
        cons = []
        for g in G.gens:
            fj, wj = g.g, g.v
            cons.append((lambda v, fj=fj: (v - S.act(fj, v)) % S.ell, (wj - S.act(f, wj)) % S.ell))
        return cons

    return linbyfin_from_generators(S, _solution_elements(G, constraints_for))


def linbyfin_centralizer(G: LinByFin, x: SDElem) -> LinByFin:
    """Centralizer of ``x = (w, h)``: ``(v, f)`` with ``fh = hf`` and ``(1 - h)v = (1 - f)w``."""
    S = G.ambient
    if not G.contains(x):
        raise ValueError("element not in group")
    h, w = x.g, x.v

    def constraints_for(f):
        if G.quotient.mul(f, h) != G.quotient.mul(h, f):
            return None
        return [(lambda v: (v - S.act(h, v)) % S.ell, (w - S.act(f, w)) % S.ell)]

    return linbyfin_from_generators(S, _solution_elements(G, constraints_for))


def normal_closure_module(G: LinByFin, x: SDElem) -> FlSubspace:
    """Normal closure of a vector-only element: its span under the quotient action."""
    S = G.ambient
    if x.g != S.base.identity:
        raise ValueError("normal closure module needs a vector-only element")
    if not G.contains(x):
        raise ValueError("element not in group")
    start = S.zero.copy() if S.zero is not None else None
    return module_closure([x.v], G.quotient_ops(), S.ell, S.d, start=start)


def is_action_fixed(G: LinByFin, w: np.ndarray) -> bool:
    S = G.ambient
    red = S.zero.reduce if S.zero is not None else (lambda v: v % S.ell)
    return all(np.array_equal(red(S.act(f, w)), red(w)) for f in G.quotient.gens)


def quotient_by_submodule(G: LinByFin, N: FlSubspace) -> LinByFin:
    """``G / N`` for an F-invariant ``N`` inside the module part."""
    S = G.ambient
    if not N.is_subspace_of(G.module):
        raise ValueError("submodule not contained in the module part")
    zero = N.copy()
    if S.zero is not None:
        zero.extend(S.zero.basis())
    S2 = S.with_zero(zero)
    trans = {f: S2.normalize(x) for f, x in G.transversal.items()}
    return LinByFin(S2, [S2.normalize(g) for g in G.gens], G.quotient, trans, G.module.copy())


def quotient_central_cyclic(G: LinByFin, w: np.ndarray) -> tuple[LinByFin, int]:
    """Quotient by ``C = G n <(w, 1)>`` for an action-fixed ``w``.

    Returns the quotient and ``|C|`` (1 or ell).
    """
    S = G.ambient
    w = np.asarray(w, dtype=np.int64) % S.ell
    if not is_action_fixed(G, w):
        raise ValueError("vector is not fixed by the action")
    if not G.module.contains(w) or (S.zero is not None and S.zero.contains(w)):
        return G, 1
    return quotient_by_submodule(G, FlSubspace(S.ell, S.d, [w])), S.ell


def serialize_vector(v: np.ndarray, ell: int) -> list:
    return [ell, len(v), [[int(i), int(v[i])] for i in np.flatnonzero(v)]]


def serialize_linbyfin(G: LinByFin, fmt_base=repr) -> dict:
    """Quotient generators, module basis, and transversal as BFS words."""
    Fq = G.quotient
    return {
        "order": G.order_str(),
        "quotient_generators": [fmt_base(g) for g in Fq.gens],
        "module_basis": [serialize_vector(b, G.ell) for b in G.module.basis()],
        "zero_rank": G.ambient.zero_rank(),
        "transversal_words": [list(Fq.word(f)) for f in Fq.elements],
    }
