import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qforge.abelian import (FinAbGroup, GroupHom, LaurentModule, abelian_groups, automorphisms, cosets, cyclic,
                            hom_apply, homs, image, is_automorphism, is_si_module, kernel, normal_form, socle,
                            subgroup_generated, submodules, subgroups, transversal, CapExceeded)

from oracles import si_module_bruteforce, subgroups_bruteforce

V4 = FinAbGroup((2, 2))
T = GroupHom(V4, V4, ((1, 0), (1, 1)))


def elems(S):
    return sorted(S.elements)


def test_hom_apply_examples():
    Z4 = cyclic(4)
    assert hom_apply(GroupHom.scalar(Z4, 3), (2,)) == (2,)
    assert hom_apply(GroupHom.scalar(Z4, 2), (2,)) == (0,)
    assert hom_apply(T, (1, 0)) == (1, 1)
    with pytest.raises(ValueError):
        hom_apply(T, (1,))
    with pytest.raises(ValueError):
        hom_apply(GroupHom.scalar(Z4, 3), (4,))


def test_kernel_image_examples():
    Z4, Z6, Z49 = cyclic(4), cyclic(6), cyclic(49)
    two = GroupHom.scalar(Z4, 2)
    assert elems(kernel(two)) == [(0,), (2,)]
    assert elems(image(two)) == [(0,), (2,)]
    assert elems(kernel(GroupHom.identity(Z6))) == [(0,)]
    assert len(image(GroupHom.identity(Z6))) == 6
    seven = GroupHom.scalar(Z49, 7)
    assert elems(kernel(seven)) == [(7 * i,) for i in range(7)]
    assert elems(image(seven)) == [(7 * i,) for i in range(7)]


def test_is_automorphism_examples():
    Z4 = cyclic(4)
    assert is_automorphism(GroupHom.scalar(Z4, 3))
    assert not is_automorphism(GroupHom.scalar(Z4, 2))
    assert is_automorphism(T)
    with pytest.raises(ValueError):
        is_automorphism(GroupHom.zero(Z4, cyclic(2)))


def test_subgroup_generated_examples():
    Z4 = cyclic(4)
    assert elems(subgroup_generated(Z4, [(2,)])) == [(0,), (2,)]
    assert len(subgroup_generated(Z4, [(1,)])) == 4
    assert len(subgroup_generated(V4, [(1, 0), (0, 1)])) == 4


def test_submodules_examples():
    Z4 = cyclic(4)
    subs = sorted(elems(S) for S in submodules(LaurentModule(Z4, GroupHom.scalar(Z4, 3))))
    assert subs == [[(0,)], [(0,), (1,), (2,), (3,)], [(0,), (2,)]]
    for p in (2, 3, 5, 7):
        Zp = cyclic(p)
        assert [len(S) for S in submodules(LaurentModule.scalar(Zp, 1))] == [1, p]
    subs = sorted(elems(S) for S in submodules(LaurentModule(V4, T)))
    assert subs == [[(0, 0)], [(0, 0), (0, 1)], [(0, 0), (0, 1), (1, 0), (1, 1)]]


def test_si_module_and_socle_examples():
    Z4, Z6 = cyclic(4), cyclic(6)
    M = LaurentModule(Z4, GroupHom.scalar(Z4, 3))
    assert is_si_module(M) and elems(socle(M)) == [(0,), (2,)]
    assert not is_si_module(LaurentModule(Z6, GroupHom.scalar(Z6, -1)))
    M = LaurentModule(V4, T)
    assert is_si_module(M) and elems(socle(M)) == [(0, 0), (0, 1)]


def test_cosets_and_transversal_examples():
    Z4, Z49 = cyclic(4), cyclic(49)
    S = subgroup_generated(Z4, [(2,)])
    assert cosets(Z4, S) == [((0,), (2,)), ((1,), (3,))]
    assert transversal(Z4, S) == [(0,), (1,)]
    S49 = image(GroupHom.scalar(Z49, 7))
    assert len(cosets(Z49, S49)) == 7
    assert transversal(Z49, S49) == [(i,) for i in range(7)]
    assert transversal(Z4, subgroup_generated(Z4, [(1,)])) == [(0,)]


def test_groups_not_canonicalised():
    assert FinAbGroup((4,)) != FinAbGroup((2, 2))
    assert FinAbGroup((2, 3)) != FinAbGroup((6,))
    assert normal_form(FinAbGroup((2, 3))).orders == normal_form(FinAbGroup((6,))).orders


def test_abelian_group_counts():
    # numbers of abelian groups of order n
    counts = {1: 1, 2: 1, 4: 2, 8: 3, 9: 2, 12: 2, 16: 5, 32: 7, 36: 4, 64: 11}
    for n, k in counts.items():
        assert len(abelian_groups(n)) == k


def test_automorphism_counts():
    assert len(automorphisms(V4)) == 6
    assert len(automorphisms(cyclic(49))) == 42
    assert len(automorphisms(FinAbGroup((2, 4)))) == 8
    assert len(automorphisms(FinAbGroup((3, 3)))) == 48
    with pytest.raises(CapExceeded):
        automorphisms(cyclic(300), cap=256)


def test_image_as_group():
    G, emb = image(GroupHom.scalar(cyclic(49), 7)).as_group()
    assert G.size == 7 and emb.is_injective()


@pytest.mark.parametrize("orders", [(4,), (8,), (2, 2), (2, 4), (3, 3), (9,), (2, 2, 2), (16,), (4, 4), (2, 8),
                                    (3, 9), (27,), (5, 5), (64,), (8, 8), (3, 3, 3)])
def test_subgroups_against_bruteforce(orders):
    G = FinAbGroup(orders)
    ours = sorted((frozenset(S.elements) for S in subgroups(G)), key=lambda s: (len(s), sorted(s)))
    assert ours == subgroups_bruteforce(orders)


def _modules_up_to(max_size):
    for n in range(2, max_size + 1):
        for G in abelian_groups(n):
            if G.rank > 2 and n > 27:
                continue
            auts = automorphisms(G, cap=64)
            step = max(1, len(auts) // 12)
            for t in auts[::step]:
                yield LaurentModule(G, t)


def test_si_module_against_bruteforce():
    checked = 0
    for M in _modules_up_to(64):
        assert is_si_module(M) == si_module_bruteforce(M.group.orders, M.t.matrix), str(M)
        checked += 1
    assert checked > 300


def test_submodules_are_closed():
    for M in _modules_up_to(32):
        for S in submodules(M):
            for a, b in itertools.product(S.elements, repeat=2):
                assert M.group.sub(a, b) in S
            for a in S.elements:
                assert M.t(a) in S


group_st = st.sampled_from([(2,), (3,), (4,), (6,), (8,), (9,), (2, 2), (2, 4), (3, 3), (2, 2, 2), (12,), (2, 6)])


@settings(max_examples=60, deadline=None)
@given(group_st, group_st, st.data())
def test_hom_additivity(o1, o2, data):
    G, H = FinAbGroup(o1), FinAbGroup(o2)
    hs = homs(G, H)
    h = hs[data.draw(st.integers(0, len(hs) - 1))]
    a = data.draw(st.sampled_from(G.elements()))
    b = data.draw(st.sampled_from(G.elements()))
    assert h(G.add(a, b)) == H.add(h(a), h(b))
    assert h(G.zero) == H.zero


@settings(max_examples=40, deadline=None)
@given(group_st, st.data())
def test_transversal_size(o, data):
    G = FinAbGroup(o)
    subs = subgroups(G)
    S = subs[data.draw(st.integers(0, len(subs) - 1))]
    tr = transversal(G, S)
    assert len(tr) * len(S) == G.size
    assert tr == sorted(tr)


def test_hom_validation():
    with pytest.raises(ValueError):
        GroupHom(cyclic(2), cyclic(4), ((1,),))      # 2 * 1 != 0 in Z4
    h = GroupHom(cyclic(2), cyclic(4), ((2,),))
    assert h((1,)) == (2,)
    assert GroupHom(cyclic(4), cyclic(4), ((7,),)) == GroupHom.scalar(cyclic(4), 3)
