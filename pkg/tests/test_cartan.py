import random

import pytest

from eqcartan.cartan import (
    CartanData,
    EquivariantDifferential,
    degree_weighted,
    flatten_equivariant,
    gamma_q,
    gamma_u,
    identity_report,
    induced_connection,
    lambda_components,
    reduce_mod,
    solve_iota,
)
from eqcartan.complexes import GeneratorInfo, GradingKind, OperatorMatrix
from eqcartan.novikov import CoefficientError, ScalarSetup, USeries

from conftest import random_equivariant_differential

SETUP = ScalarSetup.make(1, "Q")
SETUP_Z = ScalarSetup.make(1, "Z")

IDENTITY_NAMES = [
    "d_eq squared zero",
    "lambda_eq anticommutes with d_eq",
    "connection commutes with d_eq",
    "index operator homogeneity",
    "gamma_u commutator",
    "euler relation",
    "leibniz",
    "gamma_q leibniz",
]


def monotone_pair(setup=SETUP, order=3, extra_free=False):
    """d(x) = q^2 y with homogeneous indices |x| = 1, |y| = -2."""
    basis = [GeneratorInfo("x", 1), GeneratorInfo("y", -2)]
    if extra_free:
        basis.append(GeneratorInfo("z", 0))
    return EquivariantDifferential.build(
        setup, GradingKind("Z/2"), tuple(basis),
        [{(1, 0): setup.monomial(1, 2)}], order=order)


def exact_diff(setup=SETUP, order=3):
    """q-independent differential: d(x) = y (indices chosen homogeneous)."""
    basis = (GeneratorInfo("x", 0), GeneratorInfo("y", 1))
    return EquivariantDifferential.build(
        setup, GradingKind("Z/2"), basis,
        [{(1, 0): setup.one()}], order=order)


# -- lambda as an entrywise q-derivative --------------------------------------


def test_lambda_components_cy_is_plain_derivative():
    diff = monotone_pair()
    lam = lambda_components(diff, "cy")
    assert lam[0][1][0].terms == ((1, 2),)  # d/dq q^2 = 2q


def test_lambda_components_monotone_stays_on_lattice():
    diff = monotone_pair()
    lam = lambda_components(diff, "monotone")
    assert lam[0][1][0].terms == ((2, 2),)  # q * d/dq q^2 = 2q^2


# -- solve_iota ---------------------------------------------------------------


def test_solve_iota_monotone_pair():
    data, obstruction = solve_iota(monotone_pair())
    assert obstruction is None
    assert data.iota[1].entries[(0, 0)].terms == ((0, 2),)


def test_solve_iota_exact_case_gives_zero_iota():
    for regime in ("monotone", "cy"):
        data, obstruction = solve_iota(exact_diff(), regime)
        assert obstruction is None
        assert all(not op.entries for op in data.iota)


def test_solve_iota_reports_obstruction():
    # rank 1 with d_0 = 0 and d_1 = q: every commutator vanishes but the
    # right-hand side does not, so order 2 is obstructed
    basis = (GeneratorInfo("x", 0),)
    diff = EquivariantDifferential.build(
        SETUP, GradingKind("Z/2"), basis,
        [{}, {(0, 0): SETUP.monomial(1, 1)}], order=3)
    data, obstruction = solve_iota(diff)
    assert data is None
    assert obstruction["order"] == 2


def test_solve_iota_rejects_noncommuting_seed():
    diff = monotone_pair()
    bad = OperatorMatrix(diff.basis, diff.basis,
                         {(0, 1): SETUP.one()}, 2)
    data, obstruction = solve_iota(diff, iota0=bad)
    assert data is None
    assert obstruction["order"] == 0


def test_solve_iota_needs_field():
    with pytest.raises(CoefficientError):
        solve_iota(monotone_pair(SETUP_Z))


# -- the identity suite -------------------------------------------------------


@pytest.mark.parametrize("diff_fn,regime", [
    (monotone_pair, "monotone"),
    (exact_diff, "monotone"),
    (exact_diff, "cy"),
])
def test_identity_report_on_homogeneous_fixtures(diff_fn, regime):
    data, obstruction = solve_iota(diff_fn(), regime)
    assert obstruction is None
    rep = identity_report(data)
    assert [r["identity"] for r in rep["identities"]] == IDENTITY_NAMES
    assert rep["all_hold"], [r for r in rep["identities"] if not r["holds"]]


def test_identity_report_catches_wrong_iota():
    diff = monotone_pair()
    wrong = OperatorMatrix(diff.basis, diff.basis,
                           {(0, 0): SETUP.monomial(7, 0)}, 0)
    data = CartanData(diff, (OperatorMatrix(diff.basis, diff.basis, {}, 2),
                             wrong), "monotone")
    rep = identity_report(data)
    bad = {r["identity"] for r in rep["identities"] if not r["holds"]}
    assert "connection commutes with d_eq" in bad


@pytest.mark.parametrize("seed", range(5))
def test_randomized_differentials_satisfy_structural_identities(seed):
    rng = random.Random(seed)
    diff = random_equivariant_differential(rng, SETUP, max_gens=6, order=4)
    data, obstruction = solve_iota(diff)
    if obstruction is not None:
        data = CartanData(diff, (), "monotone")
    rep = identity_report(data)
    by_name = {r["identity"]: r for r in rep["identities"]}
    assert by_name["d_eq squared zero"]["holds"]
    assert by_name["lambda_eq anticommutes with d_eq"]["holds"]
    if obstruction is None:
        assert by_name["connection commutes with d_eq"]["holds"]
        assert by_name["gamma_q leibniz"]["holds"]


# -- the two connections on vectors -------------------------------------------


def test_gamma_u_is_u_times_index_without_iota():
    basis = (GeneratorInfo("a", 3), GeneratorInfo("b", -2))
    diff = EquivariantDifferential.build(
        SETUP, GradingKind("Z"), basis, [{}], order=3)
    data = CartanData(diff, (), "monotone")
    n = len(basis)
    for i, g in enumerate(basis):
        vec = [USeries.from_novikov(SETUP.one() if j == i else SETUP.zero(),
                                    3) for j in range(n)]
        out = gamma_u(data, vec)
        for j, w in enumerate(out):
            if j == i:
                assert w.coeffs[1].terms == ((0, g.index),)
            else:
                assert not w


def test_gamma_q_on_constant_vector_is_zero_without_iota():
    data = CartanData(exact_diff(), (), "monotone")
    vec = [USeries.from_novikov(SETUP.one(), 3),
           USeries.zero(SETUP, 3)]
    assert all(not w for w in gamma_q(data, vec))


def test_degree_weighted_uses_q_and_u_degrees():
    data = CartanData(monotone_pair(), (), "monotone")
    # q^2 u x has degree |x| + 2*2 + 2*1 = 7
    vec = [USeries.from_novikov(SETUP.monomial(1, 2), 3, 1),
           USeries.zero(SETUP, 3)]
    out = degree_weighted(data, vec)
    assert out[0].coeffs[1].terms == ((2, 7),)


# -- reduction mod m ----------------------------------------------------------


def _integral_monotone_data():
    diff = monotone_pair(SETUP_Z)
    iota1 = OperatorMatrix(diff.basis, diff.basis,
                           {(0, 0): SETUP_Z.monomial(2, 0)}, 0)
    zero_op = OperatorMatrix(diff.basis, diff.basis, {}, 2)
    return CartanData(diff, (zero_op, iota1), "monotone")


def test_reduce_mod_two_commuting_square():
    out = reduce_mod(_integral_monotone_data(), 2)
    assert out["hypothesis_holds"], out["hypothesis_violations"]
    assert out["conclusion"]["lambda_vanishes_mod_m"]
    assert out["conclusion"]["gamma_q_is_u_dq_mod_m"]
    assert out["conclusion"]["gamma_u_is_free_part_mod_2m"]
    assert out["holds"]


def test_reduce_mod_negative_control_reports_hypothesis():
    basis = (GeneratorInfo("x", 1), GeneratorInfo("y", 0))
    diff = EquivariantDifferential.build(
        SETUP_Z, GradingKind("Z/2"), basis,
        [{(1, 0): SETUP_Z.monomial(1, 1)}], order=3)
    data = CartanData(diff, (), "monotone")
    out = reduce_mod(data, 2)
    assert not out["hypothesis_holds"]
    assert any(v["hypothesis"] == "d exponents in mZ"
               for v in out["hypothesis_violations"])
    assert not out["holds"]


def test_reduce_mod_rational_iota_hypothesis_inapplicable():
    data, _ = solve_iota(monotone_pair())
    out = reduce_mod(data, 2)
    assert any("inapplicable" in v for v in out["hypothesis_violations"])


# -- induced connection on cohomology -----------------------------------------


def test_flatten_equivariant_shape():
    C = flatten_equivariant(monotone_pair(order=3))
    assert len(C.basis) == 6
    assert C.basis[2].name == "u^1.x"
    assert C.basis[2].index == 3
    # d_1-free family: u^j block structure repeats d_0
    assert len(C.d.entries) == 3


def test_induced_connection_exact_case_is_u_dq():
    data, _ = solve_iota(exact_diff())
    out = induced_connection(data, "gamma_q")
    assert out["operator_form"] == "u*d/dq"
    assert out["matrix_part_is_zero"]
    assert out["well_defined"]


def test_induced_connection_on_surviving_classes():
    data, obstruction = solve_iota(monotone_pair(extra_free=True))
    assert obstruction is None
    out = induced_connection(data, "gamma_q")
    assert out["well_defined"], out["issues"]
    assert len(out["classes"]) == 3  # z, u z, u^2 z
    for col in out["matrix"]:
        assert all(c == "0" for c in col)


def test_induced_connection_gamma_u_well_defined():
    data, _ = solve_iota(monotone_pair(extra_free=True))
    out = induced_connection(data, "gamma_u")
    assert out["well_defined"], out["issues"]
