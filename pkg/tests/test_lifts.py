import warnings

import pytest

from tropic.lifts import (
    NotAnEnd,
    NotSmooth,
    build_lift_model,
    check_h1_surjection,
    check_h2_injection,
    end_restriction,
    euler_characteristic_expected,
    lift_cohomology,
    unobstructedness_criterion,
)
from tropic.tropical import Edge, TropicalCurve

from generators import line_vc, pants_curve, random_smooth_tree, rng, square_cycle_curve
from oracles import lift_oracle, mayer_vietoris_betti_vc


def euler(betti):
    return sum((-1) ** i * b for i, b in enumerate(betti))


def oracle_for(c):
    bounded = [(e.tail, e.head, e.direction) for e in c.edges if not e.is_ray]
    rays = [(e.tail, e.direction) for e in c.edges if e.is_ray]
    return lift_oracle(len(c.vertices), bounded, rays, c.n)


def test_pants_piece_restrictions():
    m = build_lift_model(pants_curve())
    assert [m.restrictions[(0, i)] for i in range(3)] == [[[1, 0]], [[0, 1]], [[-1, -1]]]


def test_pants_cohomology():
    assert lift_cohomology(build_lift_model(pants_curve())) == (1, 2, 0)


def test_vertex_in_r3_piece_h1_rank_three():
    c = TropicalCurve([(0, 0, 0)], [Edge(0, None, d) for d in ((1, 0, 0), (0, 1, 0), (-1, -1, 0))])
    assert lift_cohomology(build_lift_model(c))[1] == 3


def test_four_valent_rejected():
    c = TropicalCurve([(0, 0)], [Edge(0, None, d) for d in ((1, 0), (-1, 0), (0, 1), (0, -1))])
    with pytest.raises(NotSmooth):
        build_lift_model(c)


def test_vc_cohomology_matches_hand_count():
    m = build_lift_model(line_vc())
    betti = lift_cohomology(m)
    assert betti == mayer_vietoris_betti_vc()
    assert euler(betti) == 0 == euler_characteristic_expected(m)


def test_vc_cohomology_matches_oracle():
    assert lift_cohomology(build_lift_model(line_vc()))[:4] == oracle_for(line_vc())[0]


def test_mod_two_agrees_for_vc():
    assert lift_cohomology(build_lift_model(line_vc()), "F2") == (1, 4, 3, 0)


def test_pants_end_restrictions():
    m = build_lift_model(pants_curve())
    for end in m.curve.rays():
        assert check_h1_surjection(m, end).rank == 1
        assert len(end_restriction(m, end, 0)) == 1


def test_vc_end_restriction_degree_two():
    m = build_lift_model(line_vc())
    from tropic.linalg import rank

    assert rank(end_restriction(m, 0, 2)) == 1


def test_vc_criteria_every_end():
    m = build_lift_model(line_vc())
    for end in m.curve.rays():
        assert check_h1_surjection(m, end).ok
        assert check_h2_injection(m, end).ok
        assert unobstructedness_criterion(m, end).ok


def test_pants_criteria_vacuous():
    m = build_lift_model(pants_curve())
    for end in m.curve.rays():
        assert check_h2_injection(m, end).ok and unobstructedness_criterion(m, end).ok


def test_bounded_edge_is_not_an_end():
    m = build_lift_model(line_vc())
    with pytest.raises(NotAnEnd):
        check_h2_injection(m, 2)


def test_random_trees_match_oracle():
    r = rng(21)
    for _ in range(10):
        c = random_smooth_tree(r, max_vertices=4)
        m = build_lift_model(c)
        betti, h1_ranks, injective = oracle_for(c)
        assert lift_cohomology(m) == betti
        assert [check_h1_surjection(m, e).rank for e in c.rays()] == h1_ranks
        assert [check_h2_injection(m, e).ok for e in c.rays()] == injective
        assert euler(betti) == euler_characteristic_expected(m)


def test_genus_one_warns():
    c = square_cycle_curve({i: 2 for i in range(4)})
    m = build_lift_model(c)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        verdict = check_h1_surjection(m, c.rays()[0])
    assert caught and "genus" in verdict.note
