from fractions import Fraction as F

import pytest

from tropic.lattice import Lattice, complete_basis, integer_kernel, primitive, row_hnf, smith_invariants
from tropic.linalg import determinant, inverse, nullspace, rank, rank_over, solve
from tropic.lp import feasible_point, maximize
from tropic.polyhedra import (
    Cell,
    Empty,
    NotAFacet,
    RationalPolyhedron,
    WeightedPolyhedralComplex,
    balancing_check,
    dimension,
    point,
    primitive_transverse_vectors,
    ray,
    segment,
    validate_complex,
)

from generators import rng
from oracles import float_dimension, rank_mod2, sympy_rank


def pants_complex(directions=((-1, 0), (0, -1), (1, 1))):
    return WeightedPolyhedralComplex(2, [Cell(ray((0, 0), d)) for d in directions])


# lattice and linear algebra


def test_primitive_divides_by_content():
    assert primitive((2, 4)) == (1, 2)
    assert primitive((F(1, 2), F(3, 2))) == (1, 3)


def test_hnf_spans_same_lattice():
    rows = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    h, _ = row_hnf(rows)
    assert Lattice(rows, 3) == Lattice([r for r in h if any(r)], 3)


def test_smith_invariants():
    assert smith_invariants([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


def test_integer_kernel_is_kernel():
    rows = [[1, 2, 3], [4, 5, 6]]
    for v in integer_kernel(rows, 3):
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)


def test_complete_basis_unimodular():
    b = complete_basis([[1, 1, 0]], 3)
    assert abs(determinant(b)) == 1


def test_lattice_reduce_is_canonical():
    lat = Lattice([[2, 0], [0, 3]], 2)
    assert lat.reduce((5, 7)) == lat.reduce((1, 1))
    assert (4, 3) in lat


def test_saturated_span_fills_lattice():
    assert Lattice.saturated_span([[2, 4]], 2) == Lattice([[1, 2]], 2)


def test_rank_against_sympy():
    r = rng(3)
    for _ in range(20):
        rows = [[F(r.randint(-3, 3), r.randint(1, 2)) for _ in range(5)] for _ in range(4)]
        assert rank(rows) == sympy_rank(rows)


def test_rank_mod_two_against_oracle():
    r = rng(4)
    for _ in range(20):
        rows = [[r.randint(-3, 3) for _ in range(5)] for _ in range(4)]
        assert rank_over(rows, "F2") == rank_mod2(rows)


def test_solve_and_nullspace():
    rows = [[1, 2], [3, 4]]
    assert solve(rows, [5, 6], 2) == [F(-4), F(9, 2)]
    assert nullspace([[1, 1]], 2) and len(nullspace([[1, 1]], 2)) == 1


def test_inverse_times_matrix():
    m = [[2, 1], [7, 4]]
    inv = inverse(m)
    assert [[sum(a * b for a, b in zip(row, col)) for col in zip(*inv)] for row in m] == [[1, 0], [0, 1]]


def test_lp_maximize_simple():
    res = maximize([1, 1], a_ub=[[1, 0], [0, 1]], b_ub=[2, 3])
    assert res.value == 5


def test_lp_infeasible():
    assert feasible_point(a_ub=[[1], [-1]], b_ub=[-1, 0], nvars=1) is None


# dimension


def test_dimension_line():
    assert dimension(RationalPolyhedron(2, [((1, 0), 0), ((-1, 0), 0)])) == 1


def test_dimension_empty():
    assert dimension(RationalPolyhedron(2, [((1, 0), 1), ((-1, 0), 0)])) is Empty


def test_dimension_pants_ray():
    assert dimension(ray((0, 0), (1, 1))) == 1


def test_dimension_against_float_lp():
    r = rng(5)
    for _ in range(25):
        n = r.randint(1, 3)
        ineqs = [([r.randint(-2, 2) or 1 for _ in range(n)], F(r.randint(-3, 3))) for _ in range(r.randint(1, 4))]
        eqs = [([r.randint(-1, 1) or 1 for _ in range(n)], F(r.randint(-1, 1))) for _ in range(r.randint(0, 1))]
        p = RationalPolyhedron(n, ineqs, eqs)
        expected = float_dimension(n, ineqs, eqs)
        got = p.dimension
        assert (got is Empty and expected == -1) or got == expected


def test_relative_interior_point_is_inside():
    p = segment((0, 0), (2, 2))
    q = p.relative_interior_point
    assert p.contains_point(q) and q not in [(0, 0), (2, 2)]


# complexes


def test_pants_complex_is_valid():
    assert validate_complex(pants_complex()).valid


def test_crossing_lines_invalid():
    x_axis = RationalPolyhedron(2, [], [((0, 1), 0)])
    y_axis = RationalPolyhedron(2, [], [((1, 0), 0)])
    verdict = validate_complex(WeightedPolyhedralComplex(2, [Cell(x_axis), Cell(y_axis)]))
    assert not verdict.valid and verdict.violations[0][:2] == (0, 1)


def test_single_polyhedron_valid():
    assert validate_complex(WeightedPolyhedralComplex(2, [Cell(ray((0, 0), (1, 0)))])).valid


def test_transverse_vectors_pants():
    cells = [ray((0, 0), d) for d in ((-1, 0), (0, -1), (1, 1))]
    assert primitive_transverse_vectors(point((0, 0)), cells) == [(-1, 0), (0, -1), (1, 1)]


def test_transverse_vector_half_plane():
    axis = RationalPolyhedron(2, [], [((0, 1), 0)])
    upper = RationalPolyhedron(2, [((0, 1), 0)])
    (v,) = primitive_transverse_vectors(axis, [upper])
    assert axis.tangent_lattice.reduce(v) == axis.tangent_lattice.reduce((0, 1))


def test_transverse_vector_primitivizes():
    assert primitive_transverse_vectors(point((0, 0)), [ray((0, 0), (2, 4))]) == [(1, 2)]


def test_transverse_vector_rejects_non_facet():
    with pytest.raises(NotAFacet):
        primitive_transverse_vectors(point((1, 1)), [ray((0, 0), (1, 0))])


def test_balancing_pants():
    assert balancing_check(pants_complex()).balanced


def test_balancing_line():
    assert balancing_check(pants_complex(((1, 0), (-1, 0)))).balanced


def test_balancing_defect():
    verdict = balancing_check(pants_complex(((1, 0), (0, 1))))
    assert not verdict.balanced and verdict.defects[0][1] == (1, 1)


def test_weights_must_be_positive():
    with pytest.raises(ValueError):
        Cell(ray((0, 0), (1, 0)), 0)
