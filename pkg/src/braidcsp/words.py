"""Reduced words in free groups and the class-preserving automorphisms acting on them.

Generators are numbered from 1; a letter ``-i`` is the inverse of generator ``i``.
Automorphisms compose as functions: ``compose(s, t)`` is ``w -> s(t(w))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence


class Word(tuple):
    """A freely reduced word. Construction always reduces."""

    def __new__(cls, letters: Iterable[int] = ()):
        out: list[int] = []
        for x in letters:
            if x == 0:
                raise ValueError("letter 0 is not a generator")
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return super().__new__(cls, out)

    def __mul__(self, other):
        return Word(tuple.__add__(self, other))

    def __add__(self, other):
        return self * other

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** -k
        out = Word()
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "Word":
        return Word(-x for x in reversed(self))

    def is_identity(self) -> bool:
        return len(self) == 0

    def shortlex_key(self):
        return (len(self), tuple((abs(x), x < 0) for x in self))

    def __repr__(self):
        return f"Word({list(self)})"

    def __str__(self):
        return format_word(self)


def reduce(raw: Sequence[int], rank: Optional[int] = None) -> Word:
    """Free reduction of a raw letter sequence, validating letters against ``rank``."""
    if rank is not None:
        for x in raw:
            if x == 0 or abs(x) > rank:
                raise ValueError(f"letter {x} out of range for rank {rank}")
    return Word(raw)


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Return ``(a, c)`` with ``w = a c a^-1`` and ``c`` cyclically reduced."""
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return Word(w[:i]), Word(w[i:j + 1])


def conjugate_test(u: Word, v: Word) -> tuple[bool, Optional[Word]]:
    """Decide whether ``u`` and ``v`` are conjugate.

    On success returns ``(True, w)`` with ``w u w^-1 = v``; ``w`` comes from the
    first matching rotation, scanning rotations in increasing offset.
    """
    u, v = Word(u), Word(v)
    a, cu = cyclic_reduce(u)
    b, cv = cyclic_reduce(v)
    if len(cu) != len(cv):
        return False, None
    k = len(cu)
    if k == 0:
        return True, b * a.inverse()
    for s in range(k):
        if tuple(cu[s:] + cu[:s]) == tuple(cv):
            # cv = s^-1 cu s with s = cu[:s]
            prefix = Word(cu[:s])
            return True, b * prefix.inverse() * a.inverse()
    return False, None


def are_conjugate(u: Word, v: Word) -> bool:
    return conjugate_test(u, v)[0]


@dataclass(frozen=True)
class ClassMarkedFreeGroup:
    """Free group of a given rank with marked peripheral classes.

    ``marked`` lists generator indices whose conjugacy classes automorphisms must
    preserve; ``lambda_index`` names the generator killed when forgetting a puncture.
    """

    rank: int
    marked: tuple[int, ...] = ()
    lambda_index: Optional[int] = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if len(set(self.marked)) != len(self.marked):
            raise ValueError("marked indices must be distinct")
        if any(not 1 <= i <= self.rank for i in self.marked):
            raise ValueError("marked index out of range")
        if self.lambda_index is not None:
            if not 1 <= self.lambda_index <= self.rank:
                raise ValueError("lambda_index out of range")
            if self.lambda_index not in self.marked:
                raise ValueError("lambda_index must be marked")

    def gen(self, i: int) -> Word:
        if not 1 <= abs(i) <= self.rank:
            raise ValueError(f"generator {i} out of range")
        return Word((i,))

    @property
    def lam(self) -> Word:
        if self.lambda_index is None:
            raise ValueError("lambda_index unset")
        return Word((self.lambda_index,))

    def gens(self) -> list[Word]:
        return [Word((i,)) for i in range(1, self.rank + 1)]

    def boundary_word(self) -> Word:
        """Product of all generators: the loop around the remaining puncture."""
        return Word(range(1, self.rank + 1))


def sphere_group(n: int) -> ClassMarkedFreeGroup:
    """pi_1 of the n-punctured sphere: rank n-1, lambda is the last generator."""
    if n < 3:
        raise ValueError("need at least three punctures")
    return ClassMarkedFreeGroup(n - 1, tuple(range(1, n)), n - 1)


def forgotten_group(n: int) -> ClassMarkedFreeGroup:
    """pi_1 of the sphere with one puncture forgotten: rank n-2, no lambda."""
    if n < 3:
        raise ValueError("need at least three punctures")
    return ClassMarkedFreeGroup(n - 2, tuple(range(1, n - 1)))


@dataclass(frozen=True, eq=False)
class FreeAut:
    """Automorphism of a free group given by generator images."""

    domain: ClassMarkedFreeGroup
    images: tuple[Word, ...]
    name: str = ""
    _inverse: Optional["FreeAut"] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.images) != self.domain.rank:
            raise ValueError("need one image per generator")
        object.__setattr__(self, "images", tuple(Word(w) for w in self.images))

    def __call__(self, w: Sequence[int]) -> Word:
        out: list[int] = []
        for x in w:
            if x > 0:
                out.extend(self.images[x - 1])
            else:
                out.extend(self.images[-x - 1].inverse())
        return Word(out)

    def __eq__(self, other):
        return isinstance(other, FreeAut) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def is_identity(self) -> bool:
        return all(w == Word((i + 1,)) for i, w in enumerate(self.images))

    @property
    def inverse(self) -> "FreeAut":
        if self._inverse is None:
            raise ValueError(f"no inverse stored for {self.name or 'automorphism'}")
        return self._inverse

    def with_inverse(self, inv: "FreeAut") -> "FreeAut":
        me = FreeAut(self.domain, self.images, self.name)
        other = FreeAut(inv.domain, inv.images, inv.name)
        object.__setattr__(me, "_inverse", other)
        object.__setattr__(other, "_inverse", me)
        return me

    def preserves_classes(self) -> bool:
        return all(are_conjugate(Word((i,)), self.images[i - 1]) for i in self.domain.marked)


def identity_aut(domain: ClassMarkedFreeGroup) -> FreeAut:
    ident = FreeAut(domain, tuple(domain.gens()), "id")
    return ident.with_inverse(ident)


def compose(s: FreeAut, t: FreeAut, name: str = "") -> FreeAut:
    """The automorphism ``w -> s(t(w))``; inverses are composed when both are known."""
    out = FreeAut(s.domain, tuple(s(w) for w in t.images), name)
    if s._inverse is not None and t._inverse is not None:
        inv = FreeAut(s.domain, tuple(t.inverse(w) for w in s.inverse.images))
        out = out.with_inverse(inv)
    return out


def compose_all(auts: Sequence[FreeAut], domain: ClassMarkedFreeGroup, name: str = "") -> FreeAut:
    out = identity_aut(domain)
    for a in auts:
        out = compose(out, a)
    return FreeAut(out.domain, out.images, name).with_inverse(out.inverse)


def inner_aut(domain: ClassMarkedFreeGroup, w: Sequence[int], name: str = "") -> FreeAut:
    """Conjugation ``x -> w x w^-1``."""
    w = Word(w)
    wi = w.inverse()
    fwd = FreeAut(domain, tuple(w * g * wi for g in domain.gens()), name or f"inn({format_word(w)})")
    back = FreeAut(domain, tuple(wi * g * w for g in domain.gens()))
    return fwd.with_inverse(back)


def _half_twist(domain: ClassMarkedFreeGroup, i: int, sign: int) -> FreeAut:
    """Artin action of the braid generator sigma_i (sign +1) or its inverse (sign -1)."""
    ims = list(domain.gens())
    xi, xj = Word((i,)), Word((i + 1,))
    if sign > 0:
        ims[i - 1] = xi * xj * xi.inverse()
        ims[i] = xi
    else:
        ims[i - 1] = xj
        ims[i] = xj.inverse() * xi * xj
    return FreeAut(domain, tuple(ims))


def half_twist(domain: ClassMarkedFreeGroup, i: int) -> FreeAut:
    if not 1 <= i < domain.rank:
        raise ValueError("half twist index out of range")
    return _half_twist(domain, i, 1).with_inverse(_half_twist(domain, i, -1))


def artin_generator(i: int, j: int, n: int) -> FreeAut:
    """Pure braid automorphism A_ij of the rank n-1 free group (1 <= i < j <= n-1).

    A_ij = s_{j-1}^-1 ... s_{i+1}^-1 s_i^2 s_{i+1} ... s_{j-1} in the Artin action.
    It fixes x_k for k < i or k > j, sends every x_k to a conjugate of itself and
    fixes the product x_1 ... x_{n-1}.
    """
    domain = sphere_group(n)
    m = domain.rank
    if not (1 <= i < j <= m):
        raise ValueError(f"need 1 <= i < j <= {m}, got ({i}, {j})")
    seq = [half_twist(domain, k).inverse for k in range(j - 1, i, -1)]
    seq += [half_twist(domain, i)] * 2
    seq += [half_twist(domain, k) for k in range(i + 1, j)]
    a = compose_all(seq, domain, f"A{i}{j}")
    if not a.preserves_classes() or not are_conjugate(domain.boundary_word(), a(domain.boundary_word())):
        raise AssertionError(f"A{i}{j} is not class preserving")
    return a


def artin_generators(n: int) -> list[FreeAut]:
    m = n - 1
    return [artin_generator(i, j, n) for i in range(1, m + 1) for j in range(i + 1, m + 1)]


def aut_generating_set(n: int, with_inverses: bool = True) -> list[FreeAut]:
    """Artin pure-braid generators plus inner automorphisms by each generator."""
    domain = sphere_group(n)
    gens = artin_generators(n) + [inner_aut(domain, (k,), f"inn(g{k})") for k in range(1, domain.rank + 1)]
    if with_inverses:
        gens = gens + [_named_inverse(g) for g in gens]
    return gens


def _named_inverse(a: FreeAut) -> FreeAut:
    inv = a.inverse
    return FreeAut(inv.domain, inv.images, a.name + "^-1").with_inverse(a)


# Push(g_j) is A_{j,m}^PUSH_SIGN where m = n-1 is the lambda strand; the sign is
# pinned by the identity delta(Push(g)) = inn(g) (see tests/test_words.py).
PUSH_SIGN = -1


def push_aut(j: int, n: int, sign: int = PUSH_SIGN) -> FreeAut:
    """Point-pushing automorphism of pi_1(S_{0,n}) moving lambda around g_j."""
    domain = sphere_group(n)
    m = domain.rank
    if not 1 <= j <= m - 1:
        raise ValueError(f"push index must be in 1..{m - 1}")
    a = artin_generator(j, m, n)
    out = a if sign > 0 else _named_inverse(a)
    return FreeAut(out.domain, out.images, f"Push(g{j})").with_inverse(out.inverse)


def push_word(w: Sequence[int], n: int, sign: int = PUSH_SIGN) -> FreeAut:
    """Push extended multiplicatively: push(uv) = push(u) o push(v)."""
    domain = sphere_group(n)
    out = identity_aut(domain)
    for x in Word(w):
        p = push_aut(abs(x), n, sign)
        out = compose(out, p if x > 0 else p.inverse)
    return out


def rho_n_lambda(w: Sequence[int], domain: ClassMarkedFreeGroup) -> Word:
    """Kill lambda: map pi_1(S_{0,n}) onto pi_1(S_{0,n-1})."""
    lam = domain.lambda_index
    if lam is None:
        raise ValueError("lambda_index unset")
    # lambda is the last generator, so the remaining indices are unchanged
    if lam != domain.rank:
        return Word(x - (1 if abs(x) > lam else 0) * (1 if x > 0 else -1) for x in w if abs(x) != lam)
    return Word(x for x in w if abs(x) != lam)


def lambda_conjugator(tau: FreeAut) -> Word:
    """Canonical w with w lambda w^-1 = tau(lambda): no trailing lambda^+-1."""
    dom = tau.domain
    lam = dom.lam
    ok, w = conjugate_test(lam, tau(lam))
    if not ok:
        raise ValueError("tau(lambda) is not conjugate to lambda")
    # strip trailing lambda powers; w lambda^k gives the same conjugate
    while w and abs(w[-1]) == dom.lambda_index:
        w = Word(w[:-1])
    return w


def normalized_section(tau: FreeAut) -> FreeAut:
    """inn(w^-1) o tau, which fixes lambda exactly."""
    w = lambda_conjugator(tau)
    return compose(inner_aut(tau.domain, w.inverse()), tau, f"s({tau.name})")


def delta(tau: FreeAut, n: int) -> FreeAut:
    """Automorphism of pi_1(S_{0,n-1}) induced by the normalized section of tau."""
    dom = tau.domain
    target = forgotten_group(n)
    s = normalized_section(tau)
    ims = tuple(rho_n_lambda(s(g), dom) for g in dom.gens() if g[0] != dom.lambda_index)
    out = FreeAut(target, ims, f"delta({tau.name})")
    return out


# ---------------------------------------------------------------- word literals

def parse_word(text: str, rank: int, lambda_index: Optional[int] = None) -> Word:
    """Parse ``g1 g2^-1 L`` style literals; ``L`` denotes lambda."""
    letters: list[int] = []
    for tok in text.split():
        base, _, exp = tok.partition("^")
        k = int(exp) if exp else 1
        if base == "L":
            if lambda_index is None:
                raise ValueError("L used but no lambda generator")
            g = lambda_index
        elif base.startswith("g") and base[1:].isdigit():
            g = int(base[1:])
        else:
            raise ValueError(f"bad word token {tok!r}")
        if not 1 <= g <= rank:
            raise ValueError(f"generator {base} out of range for rank {rank}")
        letters.extend([g if k > 0 else -g] * abs(k))
    return Word(letters)


def format_word(w: Sequence[int], lambda_index: Optional[int] = None) -> str:
    if not w:
        return "1"
    toks = []
    for x in w:
        name = "L" if lambda_index is not None and abs(x) == lambda_index else f"g{abs(x)}"
        toks.append(name if x > 0 else name + "^-1")
    return " ".join(toks)
