from fractions import Fraction as F
from pathlib import Path

import pytest

from tropic.ainfinity import (
    GappedAlgebra,
    GappedBimodule,
    HypothesisFailed,
    Ideal,
    IdealKind,
    NotAnIdeal,
    NotDeforming,
    Obstructed,
    SolveMode,
    add_elements,
    algebra_from_text,
    algebra_to_text,
    basis_element,
    bimodule_from_text,
    bimodule_to_text,
    check_bimodule_relations,
    check_relations,
    connecting_map_surjects,
    curvature,
    deform,
    deformed_module_differential,
    element_from_text,
    element_to_text,
    exterior_algebra,
    from_dga,
    ideal_check,
    positive_part,
    quotient,
    solve_bounding_cochain,
    solve_module_element,
)

from generators import FAMILIES, fuzzed_algebra, koszul_fixture, multi_level_fixture, one_step_fixture, random_cochain, rng
from oracles import dga_defects

DATA = Path(__file__).parent / "data"


# relations


def test_exterior_on_one_generator_passes():
    assert check_relations(exterior_algebra(["x"])) == []


def test_nonzero_square_reported_at_arity_one():
    A = GappedAlgebra({"a": 0, "b": 1, "c": 2}, {(1, 0, ("a",)): {"b": 1}, (1, 0, ("b",)): {"c": 1}})
    violations = check_relations(A, 2)
    assert violations and violations[0].arity == 1 and violations[0].inputs == ("a",)


def test_level_zero_curvature_rejected():
    with pytest.raises(ValueError):
        GappedAlgebra({"f": 2}, {(0, 0, ()): {"f": 1}})


def test_degree_rule_enforced():
    with pytest.raises(ValueError):
        GappedAlgebra({"e": 1, "f": 2}, {(1, 0, ("e",)): {"e": 1}})


@pytest.mark.parametrize("family", FAMILIES)
def test_dga_families_pass_both_routes(family):
    A = family(rng(31), 4)
    assert check_relations(A) == []


def classical_data(noncentral: bool):
    basis = {"one": 0, "x": 1, "y": 2, "xy": 3}
    prod = {("one", n): {n: 1} for n in basis}
    prod.update({(n, "one"): {n: 1} for n in basis if n != "one"})
    prod[("x", "y")] = {"xy": 1}
    prod[("y", "x")] = {"xy": -1 if noncentral else 1}
    d = {"x": {"y": F(2)}}
    curv = {"y": F(1)}
    return basis, d, prod, curv


@pytest.mark.parametrize("noncentral", [False, True])
def test_shifted_signs_agree_with_classical_identities(noncentral):
    basis, d, prod, curv = classical_data(noncentral)
    A = from_dga(
        basis,
        {(0, n): c for n, c in d.items()},
        {(0, a, b): c for (a, b), c in prod.items()},
        {1: curv},
        emax=4,
    )
    classical_ok = not dga_defects(basis, d, prod, curv)
    assert classical_ok == (not check_relations(A, 3))
    assert classical_ok is (not noncentral)


# deformation


def test_deform_by_zero_is_identity():
    A = exterior_algebra(["x1", "x2"])
    assert deform(A, {}) == A


def test_deform_rejects_level_zero_cochain():
    A = exterior_algebra(["x1"])
    with pytest.raises(NotDeforming):
        deform(A, {(F(0), "x1"): F(1)})


def test_deform_expansion_for_one_sided_product():
    # m2(x, y) = z only in this order, so m1 after deforming by c T x is c T z on y
    A = GappedAlgebra({"x": 1, "y": 0, "z": 1}, {(2, 0, ("x", "y")): {"z": 1}})
    c = F(3, 2)
    D = deform(A, {(F(1), "x"): c})
    assert D.terms[(1, F(1), ("y",))] == {"z": c}
    assert (1, F(1), ("x",)) not in D.terms


def test_deform_exterior_commutator_vanishes():
    # graded commutativity cancels m2(b, y) + m2(y, b) for b = c T x1
    A = exterior_algebra(["x1", "x2"])
    D = deform(A, {(F(1), "x1"): F(2)})
    assert not any(k == 1 for k, _, _ in D.terms)
    assert check_relations(D, 3) == []


def test_deform_composition_law():
    A = exterior_algebra(["x1", "x2"], emax=5)
    a = {(F(1), "x1"): F(1), (F(3, 2), "x2"): F(-2)}
    b = {(F(1, 2), "x2"): F(3)}
    assert deform(deform(A, a), b) == deform(A, add_elements(a, b))


def test_curvature_reads_stored_term():
    A = GappedAlgebra({"f": 2}, {(0, 1, ()): {"f": 1}})
    assert curvature(A) == {(F(1), "f"): F(1)}
    assert curvature(exterior_algebra(["x"])) == {}


# ideals


def test_positive_part_is_strong():
    r = rng(32)
    for _ in range(10):
        assert ideal_check(positive_part(), fuzzed_algebra(r)) is IdealKind.STRONG


def test_full_algebra_is_strong():
    A = one_step_fixture()
    assert ideal_check(Ideal(frozenset(A.basis)), A) is IdealKind.STRONG


def test_non_closed_subspace():
    A = GappedAlgebra({"e": 1, "f": 2}, {(1, 0, ("e",)): {"f": 1}})
    assert ideal_check(Ideal({"e"}), A) is IdealKind.NOT_IDEAL
    with pytest.raises(NotAnIdeal):
        quotient(A, Ideal({"e"}))


def test_weak_ideal():
    A = one_step_fixture()
    assert ideal_check(Ideal({"e"}), GappedAlgebra({"e": 1, "f": 2}, {(0, 1, ()): {"f": 1}})) is IdealKind.WEAK
    assert ideal_check(Ideal({"f"}), A) is IdealKind.STRONG


def test_quotient_by_positive_part_is_level_zero():
    A = deform(exterior_algebra(["x1", "x2"], emax=4), {(F(1), "x1"): F(1)})
    Q = quotient(A, positive_part())
    assert Q.terms == {k: v for k, v in A.terms.items() if k[1] == 0}


def test_quotient_by_everything_is_zero():
    A = one_step_fixture()
    Q = quotient(A, Ideal(frozenset(A.basis)))
    assert Q.basis == {} and Q.terms == {}


def test_quotient_by_strong_ideal_is_flat():
    A = koszul_fixture()
    assert curvature(quotient(A, Ideal({"y", "xy"}))) == {}


# bounding cochains


def test_one_step_solve():
    trace = []
    b = solve_bounding_cochain(one_step_fixture(), trace=trace)
    assert b == {(F(1), "e"): F(-1)}
    assert trace == [(F(1), None)]


def test_lemma_mode_one_step():
    for gens in ({"f"}, {"e", "f"}):
        b = solve_bounding_cochain(one_step_fixture(), Ideal(gens), SolveMode.LEMMA)
        assert b == {(F(1), "e"): F(-1)}


def test_flat_algebra_gives_zero():
    assert solve_bounding_cochain(algebra_from_text((DATA / "flat.alg").read_text())) == {}


def test_obstruction_reported():
    A = algebra_from_text((DATA / "obstructed.alg").read_text())
    with pytest.raises(Obstructed) as err:
        solve_bounding_cochain(A)
    report = err.value.report
    assert report.level == 1 and dict(report.defect) == {"f": F(1)} and report.closed


def test_multi_level_solve_increases_valuation():
    B = multi_level_fixture()
    trace = []
    b = solve_bounding_cochain(B, trace=trace)
    assert curvature(deform(B, b)) == {}
    levels = [lvl for lvl, _ in trace]
    assert len(trace) >= 3
    assert all(new is None or new > old for old, new in trace)
    assert levels == sorted(levels)


def test_koszul_solve_lemma_mode():
    B = koszul_fixture()
    b = solve_bounding_cochain(B, Ideal({"y", "xy"}), SolveMode.LEMMA)
    assert b == {(F(1), "x"): F(1)}
    assert curvature(deform(B, b)) == {}


def test_lemma_hypotheses_checked():
    B = one_step_fixture()
    with pytest.raises(HypothesisFailed) as err:
        solve_bounding_cochain(B, Ideal({"e"}), SolveMode.LEMMA)
    assert err.value.hypothesis == "(i)"
    nc = GappedAlgebra({"e": 1, "f": 2}, {(0, 1, ()): {"f": 1}})
    assert not connecting_map_surjects(nc, Ideal({"f"}))
    with pytest.raises(HypothesisFailed) as err:
        solve_bounding_cochain(nc, Ideal({"f"}), SolveMode.LEMMA)
    assert err.value.hypothesis == "(iii)"


def test_fuzzed_solutions_are_bounding():
    r = rng(33)
    solved = 0
    for _ in range(20):
        B = fuzzed_algebra(r)
        try:
            b = solve_bounding_cochain(B)
        except Obstructed:
            continue
        assert curvature(deform(B, b)) == {}
        solved += 1
    assert solved > 0


# bimodules


def free_module():
    A = exterior_algebra(["x"], emax=5)
    terms = {
        (1, 0, 0, ("one",), "m0", ()): {"m0": 1},
        (1, 0, 0, ("one",), "m1", ()): {"m1": 1},
        (1, 0, 0, ("x",), "m0", ()): {"m1": 1},
    }
    return GappedBimodule(A, GappedAlgebra({}, {}, 5), {"m0": 0, "m1": 1}, terms)


def test_free_module_passes():
    assert check_bimodule_relations(free_module(), 3) == []


def test_module_square_nonzero_reported():
    A = GappedAlgebra({}, {}, 5)
    M = GappedBimodule(A, A, {"p": 0, "q": 1, "r": 2}, {(0, 0, 0, (), "p", ()): {"q": 1}, (0, 0, 0, (), "q", ()): {"r": 1}})
    violations = check_bimodule_relations(M, 1)
    assert violations and violations[0].module_input == "p"


def test_module_solver_zero_defect():
    A = GappedAlgebra({"y": 1}, {}, 5)
    M = GappedBimodule(A, GappedAlgebra({}, {}, 5), {"x_empty": 0, "x_1": 1}, {})
    assert solve_module_element(M, "x_empty") == ({}, basis_element("x_empty"))


def test_module_solver_rejects_level_zero_term():
    A = GappedAlgebra({"y": 1}, {}, 5)
    M = GappedBimodule(
        A, GappedAlgebra({}, {}, 5), {"x_empty": 0, "x_1": 1}, {(0, 0, 0, (), "x_empty", ()): {"x_1": 1}}
    )
    with pytest.raises(HypothesisFailed) as err:
        solve_module_element(M, "x_empty")
    assert err.value.hypothesis == "(i)"


def test_module_solver_linear_fixture():
    # defect T^2 x_1 is absorbed by a = -T y through m^{1|1|0}(y, x_empty) = T x_1
    A = GappedAlgebra({"y": 1}, {}, 6)
    terms = {
        (0, 0, F(2), (), "x_empty", ()): {"x_1": 1},
        (1, 0, F(1), ("y",), "x_empty", ()): {"x_1": 1},
    }
    M = GappedBimodule(A, GappedAlgebra({}, {}, 6), {"x_empty": 0, "x_1": 1}, terms)
    a, e = solve_module_element(M, "x_empty")
    assert a == {(F(1), "y"): F(-1)}
    assert deformed_module_differential(M, a, e) == {}


# text formats


def test_algebra_text_round_trip():
    A = koszul_fixture()
    assert algebra_from_text(algebra_to_text(A)) == A


def test_bimodule_text_round_trip():
    M = free_module()
    assert bimodule_from_text(bimodule_to_text(M)) == M


def test_element_text_round_trip():
    el = {(F(1, 2), "x"): F(-3), (F(2), "y"): F(1, 7)}
    assert element_from_text(element_to_text(el)) == el


def test_random_cochain_round_trip():
    A = fuzzed_algebra(rng(34))
    d = random_cochain(A, rng(35))
    assert element_from_text(element_to_text(d)) == d


def test_text_trailing_comments_ignored():
    text = "emax 10\nbasis e 1  # odd\nbasis f 2\n(1, 0, (e)) -> 1*f  # differential\n(0, 1, ()) -> 1*f\n"
    assert algebra_from_text(text) == algebra_from_text((DATA / "curved.alg").read_text())
