import itertools
from fractions import Fraction as F

import pytest

from tropic.lattice import primitive
from tropic.polyhedra import balancing_check, validate_complex
from tropic.tropical import (
    ConstantPolynomial,
    DisconnectedPath,
    Edge,
    Fan,
    GenusNotOne,
    InvalidCurve,
    Spacing,
    TropicalCurve,
    TropicalPolynomial,
    UnboundedEdgeInPath,
    adapted_to_fan,
    affine_length,
    curve_from_complex,
    curve_to_complex,
    deformation_matrix,
    deformation_ranks,
    edge_length,
    genus,
    hypersurface,
    hypersurface_cells,
    is_balanced_curve,
    is_smooth_curve,
    minor_gcd,
    trop_eval,
    well_spaced,
)

from generators import line_vc, pants_curve, random_polynomial, rng, square_cycle_curve
from oracles import brute_min_achievers, shortest_exit_oracle, sympy_nullity

PANTS = TropicalPolynomial({(0, 0): 0, (1, 0): 0, (0, 1): 0})


def ray_directions(cells):
    """Primitive direction and weight of each cell, read off a relative-interior point (apex at 0)."""
    return {(primitive(c.polyhedron.relative_interior_point), c.weight) for c in cells}


def test_eval_at_vertex():
    assert trop_eval(PANTS, (0, 0)) == (0, frozenset({(0, 0), (1, 0), (0, 1)}))


def test_eval_on_diagonal_branch():
    assert trop_eval(PANTS, (-3, -3)) == (-3, frozenset({(1, 0), (0, 1)}))


def test_eval_generic_point():
    assert trop_eval(PANTS, (5, 7)) == (0, frozenset({(0, 0)}))


def test_eval_against_brute_force():
    r = rng(11)
    for _ in range(40):
        f = random_polynomial(r)
        q = [F(r.randint(-6, 6), r.randint(1, 3)) for _ in range(f.n)]
        low, achievers = brute_min_achievers(f.coefficients, q)
        assert trop_eval(f, q) == (low, frozenset(achievers))


def test_pants_hypersurface_rays():
    cells = hypersurface_cells(PANTS)
    assert ray_directions(cells) == {((1, 0), 1), ((0, 1), 1), ((-1, -1), 1)}


def test_single_hyperplane():
    cells = hypersurface_cells(TropicalPolynomial({(0,): 0, (1,): 0}))
    assert len(cells) == 1 and cells[0].polyhedron.dimension == 0 and cells[0].weight == 1


def test_weight_from_dual_edge_length():
    cells = hypersurface_cells(TropicalPolynomial({(0,): 0, (2,): 0}))
    assert [c.weight for c in cells] == [2]


def test_constant_has_no_hypersurface():
    with pytest.raises(ConstantPolynomial):
        hypersurface(TropicalPolynomial({(0, 0): 3}))


def test_hypersurface_matches_grid_sampling():
    """Every grid point where the minimum is attained twice lies on some cell, and conversely."""
    r = rng(12)
    for _ in range(15):
        f = random_polynomial(r)
        if f.n > 2:
            continue
        cells = hypersurface_cells(f)
        grid = [F(k, 2) for k in range(-12, 13)]
        for q in itertools.product(grid, repeat=f.n):
            _, achievers = brute_min_achievers(f.coefficients, q)
            on_corner = len(achievers) >= 2
            assert on_corner == any(c.polyhedron.contains_point(q) for c in cells)


def test_random_hypersurfaces_balanced():
    r = rng(13)
    for _ in range(15):
        f = random_polynomial(r)
        if f.n > 2:
            continue
        try:
            c = hypersurface(f)
        except ConstantPolynomial:
            continue
        assert validate_complex(c).valid
        assert balancing_check(c).balanced


# curves


def test_pants_curve_balanced_and_smooth():
    c = pants_curve()
    assert is_balanced_curve(c).ok and is_smooth_curve(c).ok and genus(c) == 0


def test_vc_balanced():
    assert is_balanced_curve(line_vc()).ok


def test_unbalanced_vertex():
    c = TropicalCurve([(0, 0)], [Edge(0, None, (1, 0)), Edge(0, None, (0, 1))])
    verdict = is_balanced_curve(c)
    assert not verdict.ok and verdict.offending == ((0, (1, 1)),)


def test_four_valent_not_smooth():
    c = TropicalCurve([(0, 0)], [Edge(0, None, d) for d in ((1, 0), (-1, 0), (0, 1), (0, -1))])
    assert not is_smooth_curve(c).ok


def test_index_two_vertex_not_smooth():
    c = TropicalCurve([(0, 0)], [Edge(0, None, (1, 0)), Edge(0, None, (1, 2)), Edge(0, None, (-1, -1), 2)])
    assert is_balanced_curve(c).ok
    assert minor_gcd((1, 0), (1, 2)) == 2
    assert not is_smooth_curve(c).ok


def test_genus_of_square_and_theta():
    square = TropicalCurve(
        [(0, 0), (1, 0), (1, 1), (0, 1)],
        [Edge(0, 1, (1, 0)), Edge(1, 2, (0, 1)), Edge(3, 2, (1, 0)), Edge(0, 3, (0, 1))]
        + [Edge(i, None, d) for i, d in enumerate(((-1, -1), (1, -1), (1, 1), (-1, 1)))],
    )
    assert genus(square) == 1
    assert deformation_ranks(square)[1] == 1
    theta = TropicalCurve(
        [(0, 0), (2, 0), (1, 1), (1, -1)],
        [Edge(0, 2, (1, 1)), Edge(2, 1, (1, -1)), Edge(0, 1, (1, 0)), Edge(0, 3, (1, -1)), Edge(3, 1, (1, 1))],
    )
    assert genus(theta) == 2


def test_adapted_to_fan():
    c = pants_curve()
    assert adapted_to_fan(c, Fan(((-1, 0), (0, -1), (1, 1)))).ok
    assert not adapted_to_fan(c, Fan(((1, 0), (0, 1), (-1, -1)))).ok
    compact = TropicalCurve([(0, 0), (1, 0)], [Edge(0, 1, (1, 0))])
    assert adapted_to_fan(compact, Fan(((1, 0),))).ok


def test_lengths():
    c = TropicalCurve(
        [(0, 0), (2, 2), (3, 4)], [Edge(0, 1, (1, 1)), Edge(1, 2, (1, 2))]
    )
    assert edge_length(c, 0) == 2
    assert edge_length(c, 1) == 1
    assert affine_length(c, [0, 1]) == 3


def test_length_errors():
    c = line_vc()
    with pytest.raises(UnboundedEdgeInPath):
        affine_length(c, [0])
    c2 = TropicalCurve(
        [(0, 0), (1, 0), (5, 4), (6, 4)],
        [Edge(0, 1, (1, 0)), Edge(1, 2, (1, 1)), Edge(2, 3, (1, 0))],
    )
    with pytest.raises(DisconnectedPath):
        affine_length(c2, [0, 2])


def test_invalid_edge_direction():
    with pytest.raises(InvalidCurve):
        TropicalCurve([(0, 0), (1, 2)], [Edge(0, 1, (1, 1))])


# well-spacedness


def test_symmetric_square_well_spaced():
    c = square_cycle_curve({i: F(2) for i in range(4)})
    verdict = well_spaced(c, (0, 0, 1), 0)
    assert verdict.status is Spacing.WELL_SPACED


@pytest.mark.parametrize("delta", [F(1), F(1, 3), F(1, 1000)])
def test_shortened_leg_not_well_spaced(delta):
    c = square_cycle_curve({0: 2 - delta, 1: 2, 2: 2, 3: 2})
    assert well_spaced(c, (0, 0, 1), 0).status is Spacing.NOT_WELL_SPACED


def test_cycle_off_hyperplane_not_applicable():
    c = square_cycle_curve({i: F(2) for i in range(4)})
    assert well_spaced(c, (0, 0, 1), 5).status is Spacing.NOT_APPLICABLE


def test_well_spaced_needs_genus_one():
    with pytest.raises(GenusNotOne):
        well_spaced(pants_curve(), (0, 1), 0)


def test_exit_distances_match_oracle():
    c = square_cycle_curve({0: F(5, 2), 1: F(3), 2: F(7, 3), 3: F(4)})
    verdict = well_spaced(c, (0, 0, 1), 0)
    dist = shortest_exit_oracle(c, (0, 0, 1), 0)
    for v, d in verdict.distances:
        assert d == min(dist[corner][v] for corner in range(4) if dist[corner][v] is not None)


# deformations


def test_pants_deformation_rank():
    assert deformation_ranks(pants_curve()) == (2, 0)


def test_vc_deformation_rank():
    assert deformation_ranks(line_vc()) == (4, 0)


def test_deformation_rank_against_sympy():
    for c in (pants_curve(), line_vc(), line_vc(F(5, 2))):
        rows, domain = deformation_matrix(c)
        assert deformation_ranks(c)[0] == sympy_nullity(rows, domain)


def test_complex_round_trip():
    c = line_vc()
    back = curve_from_complex(curve_to_complex(c))
    assert sorted(map(tuple, back.vertices)) == sorted(map(tuple, c.vertices))
    assert deformation_ranks(back) == deformation_ranks(c)
