import random

import numpy as np
import pytest

from braidcsp.fingroup import FinGroup, perm_group, product_group, cyclic_group
from braidcsp.linalg import FlSubspace, unit
from braidcsp.semidirect import (
    LinByFin,
    all_ones,
    basis_vector,
    group_algebra_semidirect,
    is_action_fixed,
    linbyfin_center,
    linbyfin_centralizer,
    linbyfin_from_generators,
    normal_closure_module,
    plain_semidirect,
    quotient_by_submodule,
    quotient_central_cyclic,
    serialize_linbyfin,
)


def klein():
    Q = perm_group([(1, 0, 3, 2), (2, 3, 0, 1)], 4)
    Q.enumerate()
    return Q


def s3():
    Q = perm_group([(1, 0, 2), (0, 2, 1)], 3)
    Q.enumerate()
    return Q


def full_group(S, Q) -> LinByFin:
    e = basis_vector(S, Q.identity)
    return linbyfin_from_generators(S, [S.lift(g) for g in Q.gens] + [S.vector(e)])


def brute_center(G: FinGroup):
    els = G.elements
    return [z for z in els if all(G.mul(z, g) == G.mul(g, z) for g in G.gens)]


def test_law_examples():
    Q = klein()
    S = group_algebra_semidirect(Q, 2)
    q1 = Q.gens[0]
    e1 = basis_vector(S, Q.identity)
    sq = S.pow(S.elem(e1, q1), 2)
    assert sq.g == Q.identity
    assert np.array_equal(sq.v, (e1 + basis_vector(S, q1)) % 2)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = S.elem(rng.integers(0, 2, 4), Q.elements[rng.integers(4)])
        assert S.mul(x, S.inv(x)) == S.identity
    for a in Q.elements:
        for b in Q.elements:
            assert S.mul(S.lift(a), S.lift(b)) == S.lift(Q.mul(a, b))


def test_action_is_left_multiplication():
    Q = s3()
    S = group_algebra_semidirect(Q, 3)
    for g in Q.elements:
        for b in Q.elements:
            assert np.array_equal(S.act(g, basis_vector(S, b)), basis_vector(S, Q.mul(g, b)))
        for h in Q.elements:
            v = np.arange(6) % 3
            assert np.array_equal(S.act(g, S.act(h, v)), S.act(Q.mul(g, h), v))


def test_associativity_random():
    Q = s3()
    S = group_algebra_semidirect(Q, 5)
    rng = np.random.default_rng(1)
    xs = [S.elem(rng.integers(0, 5, 6), Q.elements[rng.integers(6)]) for _ in range(8)]
    for a in xs:
        for b in xs[:4]:
            for c in xs[:3]:
                assert S.mul(S.mul(a, b), c) == S.mul(a, S.mul(b, c))


def test_ambient_enumeration():
    Q = klein()
    S = group_algebra_semidirect(Q, 2)
    assert len(full_group(S, Q).as_fingroup().elements) == 64


def test_klein_R_example():
    Q = klein()
    S = group_algebra_semidirect(Q, 2)
    q1, q2 = Q.gens
    e1 = basis_vector(S, Q.identity)
    R = linbyfin_from_generators(S, [S.elem(e1, q1), S.lift(q2)])
    assert R.quotient.order() == 4
    assert R.module.rank == 3
    aug = FlSubspace(2, 4, [unit(4, 0) + unit(4, i) for i in range(1, 4)])
    assert R.module == aug
    enum = set(R.as_fingroup().elements)
    assert len(enum) == R.order() == 32
    ambient = full_group(S, Q).as_fingroup().elements
    rng = random.Random(0)
    for x in rng.sample(ambient, 10):
        assert R.contains(x) == (x in enum)
    a, b = S.elem(e1, q1), S.lift(q2)
    comm = S.mul(S.mul(a, b), S.mul(S.inv(a), S.inv(b)))
    assert comm.g == Q.identity
    assert np.array_equal(comm.v, (e1 + basis_vector(S, q2)) % 2)
    assert R.contains(comm) and R.module.contains(comm.v)


def test_zero_section_subgroup():
    Q = s3()
    S = group_algebra_semidirect(Q, 2)
    G = linbyfin_from_generators(S, [S.lift(g) for g in Q.gens])
    assert G.module.rank == 0 and G.order() == 6


def test_telescoping():
    Q = perm_group([(1, 2, 3, 4, 0)], 5)
    Q.enumerate()
    S = group_algebra_semidirect(Q, 3)
    q = Q.gens[0]
    e = basis_vector(S, Q.identity)
    x = S.elem(e, q)
    acc = np.zeros(5, dtype=np.int64)
    for k in range(1, 6):
        acc = (acc + basis_vector(S, Q.pow(q, k - 1))) % 3
        assert S.pow(x, k) == S.elem(acc, Q.pow(q, k))


def test_center_examples():
    Q = klein()
    S = group_algebra_semidirect(Q, 2)
    G = full_group(S, Q)
    Z = linbyfin_center(G)
    assert Z.order() == 2
    assert Z.contains(S.vector(all_ones(S)))
    T = plain_semidirect(Q, 2)
    G2 = linbyfin_from_generators(T, [T.lift(g) for g in Q.gens])
    assert linbyfin_center(G2).order() == 4


def constructed_groups():
    out = []
    for Q, ell in [(klein(), 2), (s3(), 2), (s3(), 3), (klein(), 3)]:
        S = group_algebra_semidirect(Q, ell)
        e = basis_vector(S, Q.identity)
        out.append(linbyfin_from_generators(S, [S.elem(e, Q.gens[0])] + [S.lift(g) for g in Q.gens[1:]]))
        if ell == 2:
            out.append(full_group(S, Q))
    return out


@pytest.mark.parametrize("idx", range(6))
def test_center_matches_brute_force(idx):
    G = constructed_groups()[idx]
    Z = linbyfin_center(G)
    brute = brute_center(G.as_fingroup())
    assert Z.order() == len(brute)
    assert all(Z.contains(z) for z in brute)


@pytest.mark.parametrize("idx", range(6))
def test_cocycle_and_order_formula(idx):
    G = constructed_groups()[idx]
    rng = random.Random(idx)
    F = G.quotient.elements
    for _ in range(1000):
        f, f2 = rng.choice(F), rng.choice(F)
        assert G.module.contains(G.cocycle_defect(f, f2))
    for g in G.quotient.gens:
        for b in G.module.basis():
            assert G.module.contains(G.ambient.act(g, b))
    assert G.order() == G.as_fingroup().order()


def test_normal_form_compatible():
    G = constructed_groups()[0]
    S = G.ambient
    P, _ = quotient_central_cyclic(G, all_ones(S))
    A = P.ambient
    rng = random.Random(2)
    for _ in range(50):
        a, b = G.random_element(rng), G.random_element(rng)
        assert A.normalize(A.mul(a, b)) == A.mul(A.normalize(a), A.normalize(b))
        assert P.normal_form(A.mul(a, b)) == P.normal_form(A.mul(A.normalize(a), A.normalize(b)))


def test_quotient_central_cyclic():
    Q = klein()
    S = group_algebra_semidirect(Q, 2)
    G = full_group(S, Q)
    P, c = quotient_central_cyclic(G, all_ones(S))
    assert c == 2 and P.order() == G.order() // 2
    with pytest.raises(ValueError):
        quotient_central_cyclic(G, unit(4, 0))
    assert not is_action_fixed(G, unit(4, 0))
    H = linbyfin_from_generators(S, [S.lift(g) for g in Q.gens])
    H2, c2 = quotient_central_cyclic(H, all_ones(S))
    assert c2 == 1 and H2 is H


def test_centralizer_examples():
    Q = s3()
    S = group_algebra_semidirect(Q, 2)
    G = full_group(S, Q)
    assert G.order() == 384
    C = linbyfin_centralizer(G, S.identity)
    assert C.order() == G.order()
    x = S.vector(basis_vector(S, Q.identity))
    C = linbyfin_centralizer(G, x)
    brute = [y for y in G.as_fingroup().elements if S.mul(x, y) == S.mul(y, x)]
    assert C.order() == len(brute) == 64
    assert all(y.g == Q.identity for y in brute)
    with pytest.raises(ValueError):
        R = linbyfin_from_generators(S, [S.lift(g) for g in Q.gens])
        linbyfin_centralizer(R, x)


def test_normal_closure_module():
    Q = s3()
    S = group_algebra_semidirect(Q, 2)
    G = full_group(S, Q)
    N = normal_closure_module(G, S.vector(basis_vector(S, Q.identity)))
    assert N.rank == 6
    with pytest.raises(ValueError):
        normal_closure_module(G, S.lift(Q.gens[0]))


def test_quotient_by_submodule_order():
    G = constructed_groups()[1]
    S = G.ambient
    N = normal_closure_module(G, S.vector(all_ones(S)))
    P = quotient_by_submodule(G, N)
    assert P.order() * 2 ** N.rank == G.order()
    assert P.as_fingroup().order() == P.order()


def test_serialize():
    G = constructed_groups()[0]
    d = serialize_linbyfin(G)
    assert d["order"] == "2^3*4"
    assert len(d["module_basis"]) == 3 and len(d["transversal_words"]) == 4
