"""Concrete finite groups small enough to enumerate.

A :class:`FinGroup` couples an element *arithmetic* (permutations, tuples of
elements of other groups, or any object exposing ``identity``/``mul``/``inv``)
with a list of generators. Elements are plain hashable values.
"""

from __future__ import annotations

import math
import re
from collections import deque
from typing import Any, Callable, Hashable, Iterable, Optional, Sequence

DEFAULT_CAP = 2_000_000


class CapExceeded(RuntimeError):
    """A group or orbit grew past its enumeration cap."""


# ------------------------------------------------------------------ arithmetics

class PermArith:
    """Permutations of ``range(degree)`` as tuples; ``mul(a, b)`` is ``a o b``."""

    def __init__(self, degree: int):
        self.degree = degree
        self.identity = tuple(range(degree))

    def mul(self, a, b):
        return tuple(a[i] for i in b)

    def inv(self, a):
        out = [0] * len(a)
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def __eq__(self, other):
        return isinstance(other, PermArith) and other.degree == self.degree

    def __hash__(self):
        return hash(("perm", self.degree))


class ProductArith:
    """Componentwise arithmetic on tuples."""

    def __init__(self, factors: Sequence[Any]):
        self.factors = tuple(factors)
        self.identity = tuple(f.identity for f in self.factors)

    def mul(self, a, b):
        return tuple(f.mul(x, y) for f, x, y in zip(self.factors, a, b))

    def inv(self, a):
        return tuple(f.inv(x) for f, x in zip(self.factors, a))


def power(arith, x, k: int):
    if k < 0:
        x, k = arith.inv(x), -k
    out = arith.identity
    while k:
        if k & 1:
            out = arith.mul(out, x)
        x = arith.mul(x, x)
        k >>= 1
    return out


def conj(arith, g, x):
    """``g x g^-1``."""
    return arith.mul(arith.mul(g, x), arith.inv(g))


def element_order(arith, x, limit: int = 10**7) -> int:
    y, k = x, 1
    while y != arith.identity:
        y = arith.mul(y, x)
        k += 1
        if k > limit:
            raise CapExceeded("element order exceeds limit")
    return k


# ------------------------------------------------------------------ groups

class FinGroup:
    """The subgroup generated by ``gens`` inside ``arith``.

    The element index is built lazily by breadth-first closure; enumeration
    raises :class:`CapExceeded` past ``cap`` elements.
    """

    def __init__(self, arith, gens: Sequence[Hashable], cap: int = DEFAULT_CAP, name: str = ""):
        self.arith = arith
        self.gens = tuple(gens)
        self.cap = cap
        self.name = name
        self._elements: Optional[list] = None
        self._index: Optional[dict] = None
        self._parent: Optional[list] = None

    # arithmetic passthrough
    @property
    def identity(self):
        return self.arith.identity

    def mul(self, a, b):
        return self.arith.mul(a, b)

    def inv(self, a):
        return self.arith.inv(a)

    def pow(self, a, k: int):
        return power(self.arith, a, k)

    def subgroup(self, gens: Sequence[Hashable], name: str = "") -> "FinGroup":
        return FinGroup(self.arith, gens, self.cap, name)

    # enumeration
    def enumerate(self, cap: Optional[int] = None) -> list:
        if self._elements is not None:
            return self._elements
        cap = self.cap if cap is None else cap
        e = self.identity
        elements = [e]
        index = {e: 0}
        parent: list = [None]
        queue = deque([e])
        while queue:
            x = queue.popleft()
            ix = index[x]
            for gi, g in enumerate(self.gens):
                y = self.mul(x, g)
                if y not in index:
                    if len(elements) >= cap:
                        raise CapExceeded(f"group exceeds cap {cap}")
                    index[y] = len(elements)
                    elements.append(y)
                    parent.append((ix, gi))
                    queue.append(y)
        self._elements, self._index, self._parent = elements, index, parent
        return elements

    @property
    def elements(self) -> list:
        return self.enumerate()

    def index(self, x) -> int:
        self.enumerate()
        return self._index[x]

    def order(self) -> int:
        return len(self.enumerate())

    def __len__(self):
        return self.order()

    def __contains__(self, x) -> bool:
        self.enumerate()
        return x in self._index

    def __iter__(self):
        return iter(self.enumerate())

    def word(self, x) -> tuple[int, ...]:
        """Generator indices (0-based) of the BFS word reaching ``x``."""
        self.enumerate()
        i = self._index[x]
        out = []
        while self._parent[i] is not None:
            i, g = self._parent[i]
            out.append(g)
        return tuple(reversed(out))

    # structure
    def is_abelian(self) -> bool:
        return all(self.mul(a, b) == self.mul(b, a) for a in self.gens for b in self.gens)

    def commutes_with_all(self, x, ys: Iterable) -> bool:
        return all(self.mul(x, y) == self.mul(y, x) for y in ys)

    def center(self) -> "FinGroup":
        return self.subgroup_from_elements([x for x in self.elements if self.commutes_with_all(x, self.gens)])

    def centralizer(self, g) -> "FinGroup":
        return self.subgroup_from_elements([x for x in self.elements if self.mul(x, g) == self.mul(g, x)])

    def conj_classes(self) -> list[list]:
        seen: set = set()
        classes = []
        for x in self.elements:
            if x in seen:
                continue
            cls = []
            queue = deque([x])
            seen.add(x)
            while queue:
                y = queue.popleft()
                cls.append(y)
                for g in self.gens:
                    z = conj(self.arith, g, y)
                    if z not in seen:
                        seen.add(z)
                        queue.append(z)
            classes.append(cls)
        return classes

    def subgroup_from_elements(self, elems: Sequence) -> "FinGroup":
        """Subgroup with a greedy small generating set for the given closed set."""
        target = set(elems)
        gens: list = []
        current = {self.identity}
        for x in elems:
            if x not in current:
                gens.append(x)
                current = set(self.subgroup(gens).enumerate())
        if current != target:
            raise ValueError("elements do not form a subgroup")
        sub = self.subgroup(gens)
        sub.enumerate()
        return sub

    def exponent(self) -> int:
        return math.lcm(*(element_order(self.arith, x) for x in self.elements))

    def is_cyclic(self) -> bool:
        n = self.order()
        return self.is_abelian() and any(element_order(self.arith, x) == n for x in self.elements)

    def __repr__(self):
        label = self.name or "FinGroup"
        size = len(self._elements) if self._elements is not None else "?"
        return f"<{label} order={size}>"


def perm_group(gens: Sequence[Sequence[int]], degree: Optional[int] = None, name: str = "") -> FinGroup:
    gens = [tuple(g) for g in gens]
    if degree is None:
        degree = len(gens[0]) if gens else 1
    return FinGroup(PermArith(degree), gens, name=name)


def product_group(groups: Sequence[FinGroup], name: str = "") -> FinGroup:
    """Direct product with the obvious generating set."""
    arith = ProductArith([G.arith for G in groups])
    gens = []
    for k, G in enumerate(groups):
        for g in G.gens:
            gens.append(tuple(g if i == k else H.identity for i, H in enumerate(groups)))
    return FinGroup(arith, gens, name=name)


def cyclic_group(m: int) -> FinGroup:
    return perm_group([tuple((i + 1) % m for i in range(m))], m, name=f"Z/{m}")


# ------------------------------------------------------------------ quotients

def normal_closure(G: FinGroup, S: Iterable) -> set:
    """Smallest normal subgroup containing S, as a set of elements."""
    # conjugacy closure of S, then the subgroup it generates
    conjugates = set()
    queue = deque()
    for s in S:
        if s not in conjugates:
            conjugates.add(s)
            queue.append(s)
    while queue:
        x = queue.popleft()
        for g in G.gens:
            y = conj(G.arith, g, x)
            if y not in conjugates:
                conjugates.add(y)
                queue.append(y)
    return set(G.subgroup(sorted(conjugates, key=repr)).enumerate())


def quotient_by_normal_closure(G: FinGroup, S: Iterable) -> tuple[FinGroup, Callable]:
    """Quotient of G by the normal closure of S, acting on the cosets.

    Returns the quotient as a permutation group on cosets together with the
    projection map. Cosets are numbered in order of first appearance in the
    BFS enumeration of G.
    """
    N = normal_closure(G, S)
    elems = G.elements
    coset_of: dict = {}
    reps = []
    for x in elems:
        if x in coset_of:
            continue
        c = len(reps)
        reps.append(x)
        for n in N:
            coset_of[G.mul(x, n)] = c

    def project(x):
        return tuple(coset_of[G.mul(x, r)] for r in reps)

    Qgens = [project(g) for g in G.gens]
    Q = perm_group(Qgens, len(reps), name="quotient")
    Q.enumerate()
    return Q, project


# ------------------------------------------------------------------ literals

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse cycle notation with 1-based points, e.g. ``(1 2)(3 4)``.

    Cycles compose right to left, matching ``PermArith.mul``.
    """
    text = text.strip()
    if text in ("", "()", "1", "e"):
        return tuple(range(degree))
    if _CYCLE.sub("", text).strip():
        raise ValueError(f"bad cycle notation {text!r}")
    perm = tuple(range(degree))
    arith = PermArith(degree)
    cycles = _CYCLE.findall(text)
    for body in cycles:
        pts = [int(t) - 1 for t in body.replace(",", " ").split()]
        if len(set(pts)) != len(pts) or any(not 0 <= p < degree for p in pts):
            raise ValueError(f"bad cycle {body!r} for degree {degree}")
        c = list(range(degree))
        for a, b in zip(pts, pts[1:] + pts[:1]):
            c[a] = b
        perm = arith.mul(perm, tuple(c))
    return perm


def format_cycles(perm: Sequence[int]) -> str:
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        out.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
    return "".join(out) or "()"
