import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthopack.model import BoxType, Instance, validate_packing
from orthopack.oracles import brute_force_opp
from orthopack.packing_class import (
    BRANCH, EXIT, FIX, MINUS, PLUS, SUCCESS,
    PackingClassError, Problem, SearchInfo, apply_augmentation, box_classes, build_packing, check_p3,
    edges_of_packing, indistinguishable_boxes, indistinguishable_edges, init_root, packingclass_test,
    root_clique_size, verify_packing_class,
)


def problem(W, sizes, types=None):
    return Problem(tuple(tuple(s) for s in sizes), tuple(W), tuple(types or range(len(sizes))))


def edges(n, pairs):
    adj = [0] * n
    for u, v in pairs:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


# -- augmentation and P3 ----------------------------------------------------


def test_apply_plus_closes_p3_in_2d():
    si = SearchInfo(2, 2)
    assert apply_augmentation(si, (0, 1), PLUS, 0)
    assert si.state(0, 1, 0) == PLUS and si.state(0, 1, 1) == MINUS
    assert list(si.queue) == [(0, 1, PLUS, 0), (0, 1, MINUS, 1)]


def test_apply_idempotent_and_conflict():
    si = SearchInfo(2, 2)
    si.apply(0, 1, PLUS, 0)
    si.queue.clear()
    assert si.apply(1, 0, PLUS, 0)
    assert not si.queue
    si2 = SearchInfo(2, 2)
    si2.apply(0, 1, MINUS, 0)
    assert not si2.apply(0, 1, PLUS, 0)


def test_check_p3_cases():
    si = SearchInfo(2, 3)
    si.plus[0][0] |= 2
    si.plus[0][1] |= 1
    assert check_p3(si, 0, 1) and si.state(0, 1, 1) == 0 and si.state(0, 1, 2) == 0
    si = SearchInfo(2, 2)
    for i in (0, 1):
        si.plus[i][0] |= 2
        si.plus[i][1] |= 1
    assert not check_p3(si, 0, 1)


def test_required_in_every_direction_is_a_conflict():
    si = SearchInfo(2, 2)
    assert si.apply(0, 1, PLUS, 0)
    assert not si.apply(0, 1, PLUS, 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.sampled_from([PLUS, MINUS]), st.integers(0, 2)),
                max_size=25))
def test_p3_closure_is_a_fixpoint(ops):
    si = SearchInfo(5, 3)
    for u, v, sigma, i in ops:
        if u == v:
            continue
        if not si.apply(u, v, sigma, i):
            return
        for a in range(5):
            assert not si.plus[i][a] & si.minus[i][a]
    assert si.is_p3_closed()


# -- root -------------------------------------------------------------------


def test_root_two_boxes_side_by_side():
    si = init_root(problem((20, 10), [(10, 10), (10, 10)], [0, 0]))
    assert si.state(0, 1, 1) == PLUS and si.state(0, 1, 0) == MINUS


def test_root_pairwise_infeasible_everywhere():
    assert init_root(problem((20, 10), [(10, 10), (15, 10)])) is None


def test_root_single_box():
    si = init_root(problem((5, 5), [(2, 2)]))
    assert si is not None and not si.queue


def test_root_clique_size():
    # 5 boxes of width 4 in 10: at most 2 side by side, so some 3 overlap
    assert root_clique_size(5, 4, 10) == 3
    assert root_clique_size(2, 5, 10) == 1


def test_root_clique_fixed_on_type_prefix():
    p = problem((10, 100), [(4, 1)] * 5, [0] * 5)
    si = init_root(p)
    for a in range(3):
        for b in range(a + 1, 3):
            assert si.state(a, b, 0) == PLUS
    assert si.state(3, 4, 0) == 0
    assert init_root(p, cliques=False).state(0, 1, 0) == 0


# -- indistinguishability ---------------------------------------------------


def test_twins_at_fresh_root():
    p = problem((10, 10), [(2, 2), (2, 2), (3, 3)], [0, 0, 1])
    si = SearchInfo(3, 2)
    assert indistinguishable_boxes(si, p, 0, 1)
    si.apply(0, 2, PLUS, 0)
    assert not indistinguishable_boxes(si, p, 0, 1)
    assert not indistinguishable_boxes(SearchInfo(3, 2), p, 0, 2)


def test_indistinguishable_edges_product_of_classes():
    p = problem((10, 10), [(2, 2), (2, 2), (3, 3), (3, 3)], [0, 0, 1, 1])
    si = SearchInfo(4, 2)
    assert indistinguishable_edges(si, p, 0, 2) == [(0, 2), (0, 3), (1, 2), (1, 3)]
    assert indistinguishable_edges(si, p, 0, 1) == [(0, 1)]


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.sampled_from([PLUS, MINUS]), st.integers(0, 1)),
                max_size=10))
def test_indistinguishability_is_an_equivalence(ops):
    p = problem((10, 10), [(2, 2)] * 4 + [(3, 1)] * 2, [0, 0, 0, 0, 1, 1])
    si = SearchInfo(6, 2)
    for u, v, sigma, i in ops:
        if u != v and not si.apply(u, v, sigma, i):
            return
    rel = [[indistinguishable_boxes(si, p, a, b) for b in range(6)] for a in range(6)]
    for a in range(6):
        assert rel[a][a]
        for b in range(6):
            assert rel[a][b] == rel[b][a]
            for c in range(6):
                if rel[a][b] and rel[b][c]:
                    assert rel[a][c]
    rep = box_classes(si, p)
    for a in range(6):
        for b in range(6):
            assert (rep[a] == rep[b]) == rel[a][b]


# -- the packing class test -------------------------------------------------


def test_tiny_problems_succeed():
    assert packingclass_test(problem((5, 5), []), SearchInfo(0, 2)).verdict == SUCCESS
    assert packingclass_test(problem((5, 5), [(2, 2)]), SearchInfo(1, 2)).verdict == SUCCESS


def test_c4_with_excluded_chords_exits():
    p = problem((100, 100), [(1, 1)] * 4, [0] * 4)
    si = SearchInfo(4, 2)
    for u, v in [(0, 1), (1, 2), (2, 3), (3, 0)]:
        si.plus[0][u] |= 1 << v
        si.plus[0][v] |= 1 << u
    for u, v in [(0, 2), (1, 3)]:
        si.minus[0][u] |= 1 << v
        si.minus[0][v] |= 1 << u
    assert packingclass_test(p, si).verdict == EXIT


def test_p2_forces_the_only_free_edge():
    p = problem((4, 100), [(2, 1)] * 3, [0] * 3)
    si = SearchInfo(3, 2)
    for u, v in [(0, 1), (0, 2)]:
        si.minus[0][u] |= 1 << v
        si.minus[0][v] |= 1 << u
    res = packingclass_test(p, si)
    assert (res.verdict, res.edge, res.direction) == (FIX, (1, 2), 0)


def test_branch_when_several_candidates():
    p = problem((4, 100), [(2, 1)] * 3, [0] * 3)
    res = packingclass_test(p, SearchInfo(3, 2))
    assert res.verdict == BRANCH and res.direction == 0 and res.edge == (0, 1)


# -- building packings --------------------------------------------------------


def test_build_two_boxes():
    p = problem((20, 10), [(10, 10), (10, 10)])
    coords = build_packing(p, [edges(2, []), edges(2, [(0, 1)])])
    assert sorted(coords) == [(0, 0), (10, 0)]


def test_build_single_box_at_origin():
    assert build_packing(problem((5, 5), [(3, 2)]), [[0], [0]]) == [(0, 0)]


def test_build_grid():
    p = problem((4, 4), [(2, 2)] * 4, [0] * 4)
    E = [edges(4, [(0, 1), (2, 3)]), edges(4, [(0, 2), (1, 3)])]
    coords = build_packing(p, E)
    assert sorted(coords) == [(0, 0), (0, 2), (2, 0), (2, 2)]
    inst = Instance((4, 4), (BoxType((2, 2), 0, 4),), "decision")
    assert validate_packing(inst, range(4), dict(enumerate(coords))) is None
    assert brute_force_opp(inst) is not None


def test_build_rejects_non_classes():
    p = problem((4, 4), [(2, 2)] * 3, [0] * 3)
    with pytest.raises(PackingClassError):
        build_packing(p, [edges(3, []), edges(3, [])])  # P2: three side by side
    assert verify_packing_class(p, [edges(3, [(0, 1), (1, 2), (0, 2)]), edges(3, [(0, 1)])]) == "P3"
    q = problem((100, 100), [(1, 1)] * 4, [0] * 4)
    c4 = edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert verify_packing_class(q, [c4, edges(4, [])]) == "P1"


def test_projecting_back_never_adds_overlaps():
    rng = random.Random(3)
    checked = 0
    while checked < 150:
        W = (rng.randint(3, 9), rng.randint(3, 9))
        n = rng.randint(1, 5)
        sizes = [(rng.randint(1, W[0]), rng.randint(1, W[1])) for _ in range(n)]
        inst = Instance(W, tuple(BoxType(s, 0, 1) for s in sizes), "decision")
        found = brute_force_opp(inst)
        if found is None:
            continue
        p = problem(W, sizes)
        coords = [found[b] for b in range(n)]
        E = edges_of_packing(p, coords)
        assert verify_packing_class(p, E) is None
        built = build_packing(p, E)
        assert validate_packing(inst, range(n), dict(enumerate(built))) is None
        E2 = edges_of_packing(p, built)
        for i in range(2):
            for v in range(n):
                assert E2[i][v] & ~E[i][v] == 0
        checked += 1


def test_some_packing_classes_cannot_keep_every_overlap():
    # z overlaps three pairwise disjoint unit intervals in direction 1
    p = problem((3, 3), [(1, 1)] * 4, [0] * 4)
    z = 3
    E = [edges(4, [(0, z), (1, z), (2, z)]), edges(4, [(0, 1), (1, 2), (0, 2)])]
    assert verify_packing_class(p, E) is None
    built = build_packing(p, E)
    E2 = edges_of_packing(p, built)
    assert bin(E2[0][z]).count("1") < 3
