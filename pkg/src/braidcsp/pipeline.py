"""From a finite quotient of a punctured-sphere group to a checked congruence witness.

Stages, in order: :func:`ensure_noncyclic`, :func:`centerless_quotient` (only
when the target has a center), :func:`build_phi`, :func:`aut_orbit`,
:func:`diagonal_hom`, :func:`induced_p0`, :func:`check_centralizer_condition`,
:func:`verify_witness` and :func:`check_birman_identity`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .fingroup import DEFAULT_CAP, CapExceeded, FinGroup, conj
from .homs import (
    FreeHom,
    abelianization_mod,
    intersect_kernels,
    random_word,
    same_kernel,
)
from .linalg import FlSubspace
from .semidirect import (
    LinByFin,
    SDElem,
    Semidirect,
    all_ones,
    basis_vector,
    block,
    group_algebra_semidirect,
    linbyfin_center,
    linbyfin_centralizer,
    linbyfin_from_generators,
    normal_closure_module,
    pair_elements,
    product_semidirect,
    quotient_by_submodule,
    quotient_central_cyclic,
)
from .words import (
    PUSH_SIGN,
    FreeAut,
    Word,
    aut_generating_set,
    forgotten_group,
    push_aut,
    rho_n_lambda,
    sphere_group,
)

DEFAULT_ORBIT_CAP = 10_000


class PipelineError(ValueError):
    """A stage precondition does not hold."""


class CenterNotTrivial(PipelineError):
    pass


def _is_prime(m: int) -> bool:
    return m >= 2 and all(m % k for k in range(2, int(m ** 0.5) + 1))


@dataclass
class QuotientSpec:
    """``p`` maps the rank ``n-2`` free group onto a finite permutation group."""

    n: int
    ell: int
    p: FreeHom
    to_origin: Optional[Callable] = None
    origin: Optional["QuotientSpec"] = None

    def __post_init__(self):
        if self.n < 4:
            raise PipelineError(f"need n >= 4 punctures, got {self.n}")
        if not _is_prime(self.ell):
            raise PipelineError(f"ell must be prime, got {self.ell}")
        if self.p.domain.rank != self.n - 2:
            raise PipelineError(f"p must be defined on a free group of rank {self.n - 2}")
        if not isinstance(self.p.target, FinGroup):
            raise PipelineError("p must map into a finite group")

    def image(self, cap: int = DEFAULT_CAP) -> FinGroup:
        return self.p.image(cap)

    def original(self) -> "QuotientSpec":
        return self.origin.original() if self.origin is not None else self

    def to_original(self, x):
        """Map an element of this image to the image of the original spec."""
        if self.origin is None:
            return x
        return self.origin.to_original(self.to_origin(x))


def make_spec(n: int, ell: int, P: FinGroup, images: Sequence) -> QuotientSpec:
    if n < 4:
        raise PipelineError(f"need n >= 4 punctures, got {n}")
    return QuotientSpec(n, ell, FreeHom(forgotten_group(n), P, images, "p"))


# ------------------------------------------------------------------ normalization

def ensure_noncyclic(spec: QuotientSpec, cap: int = DEFAULT_CAP) -> QuotientSpec:
    """Replace a cyclic image by its intersection with a mod-m abelianization."""
    Q = spec.image(cap)
    if not Q.is_cyclic():
        return spec
    m = max(2, Q.order())
    ab = abelianization_mod(spec.p.domain, m)
    inter = intersect_kernels(spec.p, ab)
    inter.name = f"p x ab mod {m}"
    return QuotientSpec(spec.n, spec.ell, inter, to_origin=lambda x: x[0], origin=spec)


# ------------------------------------------------------------------ centerless quotient

@dataclass
class CenterlessResult:
    spec: QuotientSpec
    Q: FinGroup
    R: LinByFin
    R_group: FinGroup
    S: LinByFin
    P_ell: LinByFin
    c_order: int
    center_order: int
    p_ell: FreeHom
    chain_ok: bool

    @property
    def centerless(self) -> bool:
        return self.center_order == 1

    def chain(self, x: SDElem):
        """``P_ell -> R -> Q -> P``: the composite of the factor maps."""
        return self.spec.to_original(x.g.g)


def _seed_generators(S: Semidirect, base_gens: Sequence) -> list[SDElem]:
    e = basis_vector(S, S.base.identity)
    return [S.elem(e, base_gens[0])] + [S.lift(g) for g in base_gens[1:]]


def centerless_quotient(spec: QuotientSpec, cap: int = DEFAULT_CAP, seed: int = 0,
                        samples: int = 1000, strict: bool = True) -> CenterlessResult:
    """Build ``R_ell``, ``S_ell`` and ``P_ell = S_ell / C`` and check ``P_ell`` is centerless."""
    Q = spec.image(cap)
    if Q.is_cyclic():
        raise PipelineError("image is cyclic; run ensure_noncyclic first")
    q_gens = list(spec.p.images)
    V = group_algebra_semidirect(Q, spec.ell, "V")
    R = linbyfin_from_generators(V, _seed_generators(V, q_gens), cap)
    if R.order() > cap:
        raise CapExceeded(f"R has order {R.order_str()} > cap {cap}")
    R_group = R.as_fingroup(cap)
    R_group.enumerate()
    W = group_algebra_semidirect(R_group, spec.ell, "W")
    S = linbyfin_from_generators(W, _seed_generators(W, list(R.gens)), cap)
    P_ell, c_order = quotient_central_cyclic(S, all_ones(W))
    center = linbyfin_center(P_ell)
    p_ell = FreeHom(spec.p.domain, P_ell.ambient, list(P_ell.gens), "p_ell")
    res = CenterlessResult(spec, Q, R, R_group, S, P_ell, c_order, center.order(), p_ell, False)

    orig = spec.original().p
    rng = random.Random(seed)
    words = [Word((j,)) for j in range(1, spec.n - 1)]
    words += [random_word(spec.n - 2, 20, rng) for _ in range(samples)]
    res.chain_ok = all(res.chain(p_ell(w)) == orig(w) for w in words)
    if strict and not res.centerless:
        raise CenterNotTrivial(f"P_ell has center of order {res.center_order}")
    return res


# ------------------------------------------------------------------ phi and its orbit

@dataclass
class PhiData:
    n: int
    P: FinGroup
    U: Semidirect
    phi: FreeHom
    cd4_ok: bool


def build_phi(spec: QuotientSpec, P: Optional[FinGroup] = None, images: Optional[Sequence] = None,
              require_centerless: bool = True, seed: int = 0, samples: int = 100) -> PhiData:
    """``phi(lambda) = (e_1, 1)`` and ``phi(g_j) = (0, p(g_j))`` into ``F_ell[P] x| P``."""
    if P is None:
        P = spec.image()
    if images is None:
        images = list(spec.p.images)
    P.enumerate()
    if require_centerless and P.center().order() != 1:
        raise PipelineError("target group is not centerless")
    n = spec.n
    dom = sphere_group(n)
    U = group_algebra_semidirect(P, spec.ell, "U")
    ims = [U.lift(x) for x in images] + [U.vector(basis_vector(U, P.identity))]
    phi = FreeHom(dom, U, ims, "phi")

    p = FreeHom(forgotten_group(n), P, images)
    rng = random.Random(seed)
    words = dom.gens() + [random_word(dom.rank, 20, rng) for _ in range(samples)]
    cd4 = all(phi(w).g == p(rho_n_lambda(w, dom)) for w in words)
    return PhiData(n, P, U, phi, cd4)


class ConjugacyCanon:
    """Canonical form of a tuple of elements of ``F_ell[P] x| P`` up to simultaneous conjugation.

    Conjugating by ``(u, g)`` first moves group parts to ``g h_i g^-1`` and vectors
    to ``g.v_i``, then adds ``((1 - h_i') u)_i``; the key is the minimum over ``g``
    of the conjugated group parts and the vectors reduced modulo that image.
    """

    def __init__(self, U: Semidirect, P: FinGroup):
        self.U = U
        self.P = P
        self._images: dict = {}

    def _image_space(self, hs: tuple) -> FlSubspace:
        sp = self._images.get(hs)
        if sp is None:
            U, d = self.U, self.U.d
            sp = FlSubspace(U.ell, d * len(hs))
            for b in range(d):
                e = np.zeros(d, dtype=np.int64)
                e[b] = 1
                sp.insert(np.concatenate([(e - U.act(h, e)) % U.ell for h in hs]))
            self._images[hs] = sp
        return sp

    def key(self, xs: Sequence[SDElem]) -> tuple:
        P, U = self.P, self.U
        best = None
        for g in P.elements:
            hs = tuple(conj(P.arith, g, x.g) for x in xs)
            vs = np.concatenate([U.act(g, x.v) for x in xs])
            red = self._image_space(hs).reduce(vs)
            k = (tuple(P.index(h) for h in hs), red.tobytes())
            if best is None or k < best:
                best = k
        return best


@dataclass
class Orbit:
    members: list
    words: list
    gen_names: list
    modulo_conjugacy: bool

    def __len__(self):
        return len(self.members)


def aut_orbit(phi: FreeHom, gens: Sequence[FreeAut], P: Optional[FinGroup] = None,
              cap: int = DEFAULT_ORBIT_CAP, modulo_conjugacy: bool = True) -> Orbit:
    """Breadth-first closure of ``{phi o tau}`` under precomposition.

    With ``modulo_conjugacy`` homs are identified when they differ by conjugation
    in the target, which never changes the kernel; members are then one
    representative per class, ``phi`` itself first.
    """
    if modulo_conjugacy:
        if P is None:
            raise ValueError("conjugacy canonical forms need the base group")
        canon = ConjugacyCanon(phi.target, P)

        def key(h):
            return canon.key(h.images)
    else:
        def key(h):
            return tuple(x.key() if isinstance(x, SDElem) else x for x in h.images)

    for t in gens:
        if not t.preserves_classes():
            raise PipelineError(f"{t.name} is not class preserving")
    members = [phi]
    words = [()]
    seen = {key(phi): 0}
    i = 0
    while i < len(members):
        h = members[i]
        for k, t in enumerate(gens):
            h2 = h.precompose(t)
            kk = key(h2)
            if kk not in seen:
                if len(members) >= cap:
                    raise CapExceeded(f"orbit exceeds cap {cap}")
                seen[kk] = len(members)
                members.append(h2)
                words.append(words[i] + (k,))
        i += 1
    return Orbit(members, words, [t.name for t in gens], modulo_conjugacy)


@dataclass
class Diagonal:
    q: FreeHom
    Q: LinByFin
    size: int

    def project(self, x: SDElem, k: int = 0) -> SDElem:
        return block(x, self.q.target, k)


def diagonal_hom(orbit: Orbit, cap: int = DEFAULT_CAP) -> Diagonal:
    """``q = (phi')_{phi' in orbit}``; the first coordinate is ``phi``."""
    if not orbit.members:
        raise PipelineError("empty orbit")
    first = orbit.members[0]
    T = product_semidirect([h.target for h in orbit.members])
    ims = [pair_elements([h.images[i] for h in orbit.members]) for i in range(first.domain.rank)]
    q = FreeHom(first.domain, T, ims, "q")
    return Diagonal(q, linbyfin_from_generators(T, ims, cap), len(orbit.members))


def is_geom_characteristic(q: FreeHom, gens: Sequence[FreeAut], cap: int = DEFAULT_CAP) -> bool:
    """``ker q`` is invariant under every listed automorphism (both containments)."""
    return all(same_kernel(q, q.precompose(t), cap) for t in gens)


# ------------------------------------------------------------------ P0 and the centralizer condition

@dataclass
class P0Data:
    n: int
    lam_image: SDElem
    N: FlSubspace
    P0: LinByFin
    p0: FreeHom
    square_ok: bool


def induced_p0(diag: Diagonal, n: int, seed: int = 0, samples: int = 100) -> P0Data:
    """``P0 = Q / q(N_lambda)`` and ``p0`` on the rank ``n-2`` group."""
    q, Q = diag.q, diag.Q
    dom = q.domain
    x = q(dom.lam)
    if x.g != q.target.base.identity:
        raise PipelineError("q(lambda) is not in the vector part")
    N = normal_closure_module(Q, x)
    P0 = quotient_by_submodule(Q, N)
    A = P0.ambient
    p0 = FreeHom(forgotten_group(n), A, [q(g) for g in dom.gens() if g[0] != dom.lambda_index], "p0")
    rng = random.Random(seed)
    words = dom.gens() + [random_word(dom.rank, 20, rng) for _ in range(samples)]
    square = all(p0(rho_n_lambda(w, dom)) == A.normalize(q(w)) for w in words)
    return P0Data(n, x, N, P0, p0, square)


@dataclass
class CentralizerCheck:
    strict: bool
    image_central: bool
    centralizer: LinByFin


def check_centralizer_condition(Q: LinByFin, x: SDElem, N: FlSubspace) -> CentralizerCheck:
    """Is ``C_Q(x)`` inside ``N``? Also reports whether its image in ``Q/N`` is central."""
    C = linbyfin_centralizer(Q, x)
    strict = C.quotient.order() == 1 and C.module.is_subspace_of(N)
    A = Q.ambient.with_zero(N)
    central = True
    for c in C.gens:
        for g in Q.gens:
            if A.normalize(A.mul(c, g)) != A.normalize(A.mul(g, c)):
                central = False
                break
        if not central:
            break
    return CentralizerCheck(strict, central, C)


# ------------------------------------------------------------------ witness verification

@dataclass
class SamplingReport:
    samples: int
    central_hits: int
    forced: int
    failures: int
    vacuous: bool


def sample_containment(p0: FreeHom, Z0: LinByFin, p: FreeHom, rng: random.Random,
                       samples: int = 10_000, max_len: int = 40, forced: int = 200) -> SamplingReport:
    """Spot-check ``p0(w)`` central implies ``p(w) = 1``.

    Uniform words rarely land in the center, so ``forced`` extra samples use
    ``w^k`` with ``k`` the least power making ``p0(w)^k`` central.
    """
    A = p0.target
    rank = p0.domain.rank
    e = p.target.identity
    hits = fails = 0
    for _ in range(samples):
        w = random_word(rank, max_len, rng)
        if Z0.contains(p0(w)):
            hits += 1
            if p(w) != e:
                fails += 1
    done = 0
    for _ in range(forced):
        w = random_word(rank, max_len, rng, min_len=1)
        x = p0(w)
        y, k = x, 1
        while not Z0.contains(y):
            y = A.mul(y, x)
            k += 1
        if y == A.identity:
            continue
        done += 1
        hits += 1
        if p.target.pow(p(w), k) != e:
            fails += 1
    return SamplingReport(samples, hits, done, fails, hits == 0)


@dataclass
class WitnessResult:
    spec: QuotientSpec
    flags: dict
    details: dict
    phi: Optional[PhiData] = None
    orbit: Optional[Orbit] = None
    diag: Optional[Diagonal] = None
    p0: Optional[P0Data] = None
    centerless: Optional[CenterlessResult] = None

    @property
    def valid(self) -> bool:
        return all(self.flags.values())

    def failing(self) -> list[str]:
        return [k for k, v in self.flags.items() if not v]


def verify_witness(P: FinGroup, p: FreeHom, p0data: P0Data, diag: Diagonal, rng: random.Random,
                   samples: int = 10_000, max_len: int = 40) -> tuple[dict, dict]:
    """Checks (a) ``Z(P) = 1``, (b) ``pi_phi o p0 = p``, (c) ``Z(P0) <= ker pi_phi``, (d) sampling."""
    P0, p0 = p0data.P0, p0data.p0
    flags, details = {}, {}
    flags["P_centerless"] = P.center().order() == 1

    def pi_phi(x: SDElem):
        return x.g[0]

    flags["diagram_pi_phi_p0"] = all(pi_phi(p0(g)) == p(g) for g in p0.domain.gens())
    Z0 = linbyfin_center(P0)
    details["center_P0_order"] = Z0.order_str()
    flags["center_P0_in_ker_pi_phi"] = all(f[0] == P.identity for f in Z0.quotient.elements)
    rep = sample_containment(p0, Z0, p, rng, samples, max_len)
    details["sampling"] = {
        "samples": rep.samples,
        "max_len": max_len,
        "central_hits": rep.central_hits,
        "forced_powers": rep.forced,
        "failures": rep.failures,
        "vacuous": rep.vacuous,
    }
    flags["sampled_containment"] = rep.failures == 0
    return flags, details


@dataclass
class PipelineOptions:
    cap: int = DEFAULT_CAP
    orbit_cap: int = DEFAULT_ORBIT_CAP
    seed: int = 0
    samples: int = 10_000
    max_len: int = 40
    modulo_conjugacy: bool = True
    push_sign: int = PUSH_SIGN


def run_witness(spec: QuotientSpec, opts: PipelineOptions = PipelineOptions()) -> WitnessResult:
    """The full pipeline; every flag is recomputed from ``spec`` and ``opts``."""
    rng = random.Random(opts.seed)
    flags: dict = {}
    details: dict = {}
    norm = ensure_noncyclic(spec, opts.cap)
    details["noncyclic_replaced"] = norm is not spec
    P = norm.image(opts.cap)
    images = list(norm.p.images)
    cl = None
    if P.center().order() != 1:
        cl = centerless_quotient(norm, opts.cap, opts.seed, strict=False)
        flags["P_ell_centerless"] = cl.centerless
        flags["factor_chain"] = cl.chain_ok
        details["R_order"] = cl.R.order_str()
        details["S_order"] = cl.S.order_str()
        details["C_order"] = cl.c_order
        details["P_ell_order"] = cl.P_ell.order_str()
        if cl.P_ell.order() > opts.cap:
            raise CapExceeded(f"P_ell has order {cl.P_ell.order_str()} > cap {opts.cap}")
        P = cl.P_ell.as_fingroup(opts.cap)
        P.enumerate()
        images = list(cl.p_ell.images)
    target_spec = QuotientSpec(norm.n, norm.ell, FreeHom(norm.p.domain, P, images, "p")) if cl else norm
    phid = build_phi(target_spec, P, images, seed=opts.seed)
    flags["phi_diagram"] = phid.cd4_ok
    gens = aut_generating_set(spec.n)
    orbit = aut_orbit(phid.phi, gens, P, opts.orbit_cap, opts.modulo_conjugacy)
    details["orbit_size"] = len(orbit)
    diag = diagonal_hom(orbit, opts.cap)
    details["Q_order"] = diag.Q.order_str()
    flags["orbit_closed"] = _orbit_closed(orbit, gens, P)
    flags["geom_characteristic"] = is_geom_characteristic(diag.q, gens, opts.cap)
    p0d = induced_p0(diag, spec.n, seed=opts.seed)
    flags["p0_square"] = p0d.square_ok
    details["N_rank"] = p0d.N.rank
    details["P0_order"] = p0d.P0.order_str()
    cc = check_centralizer_condition(diag.Q, p0d.lam_image, p0d.N)
    details["centralizer_order"] = cc.centralizer.order_str()
    flags["centralizer_condition"] = cc.strict
    flags["centralizer_image_central"] = cc.image_central
    p_target = target_spec.p
    vflags, vdetails = verify_witness(P, p_target, p0d, diag, rng, opts.samples, opts.max_len)
    flags.update(vflags)
    details.update(vdetails)
    return WitnessResult(spec, flags, details, phid, orbit, diag, p0d, cl)


def _orbit_closed(orbit: Orbit, gens: Sequence[FreeAut], P: FinGroup) -> bool:
    """Post-hoc closure: every ``member o tau`` is conjugate to some member."""
    if orbit.modulo_conjugacy:
        canon = ConjugacyCanon(orbit.members[0].target, P)
        keys = {canon.key(h.images) for h in orbit.members}
        return all(canon.key(h.precompose(t).images) in keys for h in orbit.members for t in gens)
    keys = {tuple(h.images) for h in orbit.members}
    return all(tuple(h.precompose(t).images) in keys for h in orbit.members for t in gens)


# ------------------------------------------------------------------ Birman identity

@dataclass
class BirmanReport:
    per_generator: list
    conjugator_count: int
    consistent: bool

    @property
    def holds(self) -> bool:
        return all(self.per_generator)


def _lambda_conjugators(Q: LinByFin, y: np.ndarray, y2: np.ndarray) -> list[SDElem]:
    """Elements ``(t(f), f)`` of ``Q`` sending ``(y2, 1)`` to ``(y, 1)`` by conjugation."""
    S = Q.ambient
    return [Q.transversal[f] for f in Q.quotient.elements if np.array_equal(S.act(f, y2), y)]


def check_birman_identity(n: int, diag: Diagonal, p0data: P0Data, sign: int = PUSH_SIGN,
                          all_conjugators: bool = False) -> BirmanReport:
    """Compare the finite-level delta of Push(g_j) with conjugation by ``p0(g_j)`` on ``P0``.

    Push(g_j) acts on ``Q`` by transport ``q(w) -> q(tau(w))``; it is normalized
    to fix ``q(lambda)`` with a conjugator found by search, then reduced mod
    ``q(N_lambda)``. With ``all_conjugators`` every found conjugator, and its
    products with the module basis, must give the same map.
    """
    q, Q = diag.q, diag.Q
    dom = q.domain
    A = p0data.P0.ambient
    p0 = p0data.p0
    y = q(dom.lam).v
    results = []
    count = 0
    consistent = True
    for j in range(1, n - 1):
        tau = push_aut(j, n, sign)
        y2 = q(tau(dom.lam)).v
        cands = _lambda_conjugators(Q, y, y2)
        if not cands:
            raise PipelineError(f"no conjugator normalizes Push(g{j}); class preservation is broken")
        if all_conjugators:
            S = Q.ambient
            cands = cands + [S.mul(cands[0], S.vector(b)) for b in Q.module.basis()]
        else:
            cands = cands[:1]
        count += len(cands)
        pj = p0(Word((j,)))
        expected = [A.conj(pj, p0(Word((i,)))) for i in range(1, n - 1)]
        maps = []
        for c in cands:
            maps.append([A.normalize(Q.ambient.conj(c, q(tau(Word((i,)))))) for i in range(1, n - 1)])
        results.append(maps[0] == expected)
        if any(m != maps[0] for m in maps[1:]):
            consistent = False
    return BirmanReport(results, count, consistent)


def pullback_kernel(p: FreeHom, n: int) -> FreeHom:
    """``p o rho_{N_lambda}`` on the rank ``n-1`` group."""
    dom = sphere_group(n)
    if p.domain.rank != n - 2:
        raise PipelineError("hom must live on the rank n-2 group")
    return FreeHom(dom, p.target, [p(rho_n_lambda(g, dom)) for g in dom.gens()], "pullback")


@dataclass
class QLevel:
    """Data shared by the witness and Birman runs up to ``P0``."""

    phi: PhiData
    orbit: Orbit
    diag: Diagonal
    p0: P0Data


def q_level(spec: QuotientSpec, opts: PipelineOptions = PipelineOptions(),
            require_centerless: bool = False) -> QLevel:
    """Build phi directly on ``spec``'s image (no centerless replacement) through ``P0``."""
    P = spec.image(opts.cap)
    phid = build_phi(spec, P, list(spec.p.images), require_centerless=require_centerless, seed=opts.seed)
    orbit = aut_orbit(phid.phi, aut_generating_set(spec.n), P, opts.orbit_cap, opts.modulo_conjugacy)
    diag = diagonal_hom(orbit, opts.cap)
    return QLevel(phid, orbit, diag, induced_p0(diag, spec.n, seed=opts.seed))
