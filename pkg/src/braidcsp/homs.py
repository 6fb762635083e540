"""Homomorphisms from free groups into finite or linear-by-finite groups."""

from __future__ import annotations

import random
from typing import Optional, Sequence, Union

from .fingroup import DEFAULT_CAP, FinGroup, ProductArith, cyclic_group, product_group
from .semidirect import (
    LinByFin,
    SDElem,
    Semidirect,
    linbyfin_from_generators,
    pair_elements,
    plain_semidirect,
    product_semidirect,
)
from .words import ClassMarkedFreeGroup, FreeAut, Word

Target = Union[FinGroup, Semidirect]


class FreeHom:
    """A homomorphism out of a free group, determined by generator images."""

    def __init__(self, domain: ClassMarkedFreeGroup, target: Target, images: Sequence, name: str = ""):
        if len(images) != domain.rank:
            raise ValueError(f"need {domain.rank} images, got {len(images)}")
        self.domain = domain
        self.target = target
        if isinstance(target, Semidirect):
            images = [target.normalize(x) for x in images]
        self.images = tuple(images)
        self._inv = tuple(target.inv(x) for x in self.images)
        self.name = name

    def __call__(self, w: Sequence[int]):
        T = self.target
        out = T.identity
        for x in w:
            out = T.mul(out, self.images[x - 1] if x > 0 else self._inv[-x - 1])
        return out

    def precompose(self, tau: FreeAut, name: str = "") -> "FreeHom":
        if tau.domain.rank != self.domain.rank:
            raise ValueError("automorphism domain mismatch")
        return FreeHom(self.domain, self.target, [self(w) for w in tau.images], name)

    def image(self, cap: int = DEFAULT_CAP) -> Union[FinGroup, LinByFin]:
        """The image subgroup: enumerated, or as a LinByFin for semidirect targets."""
        if isinstance(self.target, Semidirect):
            return linbyfin_from_generators(self.target, self.images, cap)
        G = self.target.subgroup(self.images)
        G.enumerate(cap)
        return G

    def image_order(self, cap: int = DEFAULT_CAP) -> int:
        return self.image(cap).order()

    def is_trivial(self) -> bool:
        e = self.target.identity
        return all(x == e for x in self.images)

    def __repr__(self):
        return f"<FreeHom {self.name} rank={self.domain.rank}>"


def hom_by_images(domain: ClassMarkedFreeGroup, target: Target, images: Sequence, name: str = "") -> FreeHom:
    return FreeHom(domain, target, images, name)


def _as_semidirect(T: Target, ell: int) -> Semidirect:
    return T if isinstance(T, Semidirect) else plain_semidirect(T.arith, ell)


def paired_hom(homs: Sequence[FreeHom]) -> FreeHom:
    """``w -> (f_1(w), ..., f_k(w))`` into the product of the targets."""
    dom = homs[0].domain
    if any(h.domain.rank != dom.rank for h in homs):
        raise ValueError("homomorphisms have different domains")
    if all(isinstance(h.target, FinGroup) for h in homs):
        arith = ProductArith([h.target.arith for h in homs])
        imgs = [tuple(h.images[i] for h in homs) for i in range(dom.rank)]
        return FreeHom(dom, FinGroup(arith, imgs, cap=min(h.target.cap for h in homs)), imgs)
    ell = next(h.target.ell for h in homs if isinstance(h.target, Semidirect))
    targets = [_as_semidirect(h.target, ell) for h in homs]
    T = product_semidirect(targets)
    imgs = []
    for i in range(dom.rank):
        parts = []
        for h, S in zip(homs, targets):
            x = h.images[i]
            parts.append(x if isinstance(x, SDElem) else S.lift(x))
        imgs.append(pair_elements(parts))
    return FreeHom(dom, T, imgs)


def check_kernel_containment(f: FreeHom, g: FreeHom, cap: int = DEFAULT_CAP) -> bool:
    """``ker f <= ker g``, by the Goursat test.

    The paired image ``D <= im f x im g`` projects onto ``im f`` with kernel
    ``D n ({1} x im g)``, so containment holds iff ``|D| = |im f|``.
    """
    D = paired_hom([f, g])
    return D.image_order(cap) == f.image_order(cap)


def same_kernel(f: FreeHom, g: FreeHom, cap: int = DEFAULT_CAP) -> bool:
    n = paired_hom([f, g]).image_order(cap)
    return n == f.image_order(cap) == g.image_order(cap)


def intersect_kernels(f: FreeHom, g: FreeHom) -> FreeHom:
    """Hom into the product whose kernel is ``ker f n ker g``."""
    return paired_hom([f, g])


def abelianization_mod(domain: ClassMarkedFreeGroup, m: int) -> FreeHom:
    """The map onto ``(Z/m)^rank`` sending generator i to the i-th basis vector."""
    G = product_group([cyclic_group(m) for _ in range(domain.rank)], name=f"(Z/{m})^{domain.rank}")
    return FreeHom(domain, G, list(G.gens), f"ab mod {m}")


def random_word(rank: int, max_len: int, rng: random.Random, min_len: int = 0) -> Word:
    """A uniformly random length in ``[min_len, max_len]``, then random letters (freely reduced)."""
    length = rng.randint(min_len, max_len)
    return Word(rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(length))


def all_reduced_words(rank: int, max_len: int):
    """Every freely reduced word of length at most ``max_len``."""
    letters = [i for r in range(1, rank + 1) for i in (r, -r)]
    frontier = [()]
    yield Word()
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                u = w + (x,)
                nxt.append(u)
                yield Word(u)
        frontier = nxt


def brute_kernel_containment(f: FreeHom, g: FreeHom, max_len: int = 6) -> Optional[Word]:
    """Search the word ball for ``w`` in ``ker f`` but not ``ker g``; None when none exists."""
    ef, eg = f.target.identity, g.target.identity
    for w in all_reduced_words(f.domain.rank, max_len):
        if f(w) == ef and g(w) != eg:
            return w
    return None
