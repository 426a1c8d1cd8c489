import random

import pytest

from eqcartan.complexes import GeneratorInfo
from eqcartan.finite2 import Z2CartanData, assemble_and_check, verify_relations
from eqcartan.novikov import NovikovError, ScalarSetup, dq

SETUP = ScalarSetup.make(1, "F2")


def _mul(A, B):
    n = len(A)
    z = SETUP.zero()
    out = [[z] * n for _ in range(n)]
    for t in range(n):
        for m in range(n):
            if A[t][m]:
                for s in range(n):
                    if B[m][s]:
                        out[t][s] = out[t][s] + A[t][m] * B[m][s]
    return out


def _add(*Ms):
    out = Ms[0]
    for M in Ms[1:]:
        out = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(out, M)]
    return out


def _anti(A, B):
    return _add(_mul(A, B), _mul(B, A))


def _entries(M):
    return {(t, s): e for t, row in enumerate(M) for s, e in enumerate(row)
            if e}


def random_z2_data(rng, max_gens=6):
    """Build the operator system from homotopies, so every relation holds.

    With sigma = id + [d, A] and iota = c0 id + [d, B] (brackets are
    anticommutators in characteristic 2) the whole tower is generated by
    Sigma = AdA + AAd, xi = A iota + iota A, Xi = AA iota + A iota A.
    The q-exponents of d are kept even, so lambda = dq(d) vanishes over F2
    and the Xi relation closes without a correction term.
    """
    npairs = rng.randint(1, max_gens // 2)
    n = 2 * npairs
    basis = tuple(GeneratorInfo(f"g{i}", i % 2) for i in range(n))
    z = SETUP.zero()
    ident = [[SETUP.one() if i == j else z for j in range(n)]
             for i in range(n)]
    d = [[z] * n for _ in range(n)]
    for i in range(npairs):
        d[2 * i + 1][2 * i] = SETUP.monomial(1, 2 * rng.randint(0, 2))

    def random_mat(density=0.5):
        return [[SETUP.monomial(1, rng.randint(-1, 2))
                 if rng.random() < density else z
                 for _ in range(n)] for _ in range(n)]

    A, B = random_mat(), random_mat()
    c0 = rng.randint(0, 1)
    iota = _add([[e.scale(c0) for e in row] for row in ident],
                _anti(d, B))
    lam = [[dq(e) for e in row] for row in d]
    sigma = _add(ident, _anti(d, A))
    Sigma = _add(_mul(_mul(A, d), A), _mul(_mul(A, A), d))
    xi = _anti(A, iota)
    Xi = _add(_mul(_mul(A, A), iota), _mul(_mul(A, iota), A))
    return Z2CartanData.build(
        SETUP, basis, d=_entries(d), iota=_entries(iota), lam=_entries(lam),
        sigma=_entries(sigma), Sigma=_entries(Sigma), xi=_entries(xi),
        Xi=_entries(Xi))


def golden_with_nonzero_lambda():
    """One-pair system with d = q, so lambda = 1 and Xi must absorb it."""
    basis = (GeneratorInfo("x", 1), GeneratorInfo("y", 0))
    one = SETUP.one()
    return Z2CartanData.build(
        SETUP, basis,
        d={(1, 0): SETUP.monomial(1, 1)},
        iota={(0, 0): one, (1, 1): one},
        lam={(1, 0): one},
        sigma={(0, 0): one, (1, 1): one},
        Xi={(0, 0): SETUP.monomial(1, -1)})


def test_requires_f2():
    basis = (GeneratorInfo("x", 0),)
    with pytest.raises(NovikovError):
        Z2CartanData.build(ScalarSetup.make(1, "Q"), basis)


def test_golden_fixture_relations_and_assembly():
    Z = golden_with_nonzero_lambda()
    rel = verify_relations(Z)
    assert rel["all_hold"], [r for r in rel["relations"] if not r["holds"]]
    out = assemble_and_check(Z)
    assert out["all_hold"], [c for c in out["certificates"] if not c["holds"]]
    assert out["h_truncation"] == 3


@pytest.mark.parametrize("seed", range(20))
def test_randomized_systems_verify_and_assemble(seed):
    rng = random.Random(seed)
    Z = random_z2_data(rng)
    rel = verify_relations(Z)
    assert rel["all_hold"], [r for r in rel["relations"] if not r["holds"]]
    out = assemble_and_check(Z)
    assert out["all_hold"], [c for c in out["certificates"] if not c["holds"]]


def test_broken_relation_is_reported_with_witness():
    Z = golden_with_nonzero_lambda()
    bad = Z2CartanData.build(
        SETUP, Z.basis,
        d=Z.d.entries, iota=Z.iota.entries,
        lam={},  # drop lambda: the derivative relation must fail
        sigma=Z.sigma.entries, Xi=Z.Xi.entries)
    rel = verify_relations(bad)
    failing = {r["relation"] for r in rel["relations"] if not r["holds"]}
    assert "lambda = dq(d)" in failing
    witness = next(r for r in rel["relations"]
                   if r["relation"] == "lambda = dq(d)")["failures"]
    assert witness and witness[0]["entry"] == ["y", "x"]


def test_assembly_certificates_cover_every_h_order():
    out = assemble_and_check(golden_with_nonzero_lambda())
    orders = [(c["identity"], c["h_order"]) for c in out["certificates"]]
    assert sorted(set(orders)) == sorted(orders)
    assert {k for _, k in orders} == {0, 1, 2}
