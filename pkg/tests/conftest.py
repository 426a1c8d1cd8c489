import random

import pytest

from eqcartan.novikov import ScalarSetup
from eqcartan.complexes import GeneratorInfo, GradingKind
from eqcartan.cartan import EquivariantDifferential


@pytest.fixture
def setup_q():
    return ScalarSetup.make(1, "Q")


@pytest.fixture
def setup_f2():
    return ScalarSetup.make(1, "F2")


@pytest.fixture
def setup_f5():
    return ScalarSetup.make(1, "F5")


# -- randomized equivariant differentials -------------------------------------
#
# Start from a pairing differential d0 (x_i -> y_i with a nonzero Novikov
# coefficient) and conjugate by nilpotent elementary factors id + u^j f E_ab.
# Conjugation preserves d_eq^2 = 0 exactly, so every output is a valid
# equivariant differential; we reject draws whose top components exceed K = 3.


def _mat_mul(A, B, setup):
    n = len(A)
    z = setup.zero()
    out = [[z] * n for _ in range(n)]
    for t in range(n):
        for m in range(n):
            if A[t][m]:
                for s in range(n):
                    if B[m][s]:
                        out[t][s] = out[t][s] + A[t][m] * B[m][s]
    return out


def _conjugate_components(comps, j, f, a, b, setup, order):
    """Components of (1 + u^j f E_ab) d (1 - u^j f E_ab), truncated at order."""
    n = len(comps[0])
    z = setup.zero()
    zero = [[z] * n for _ in range(n)]
    out = [[row[:] for row in (comps[k] if k < len(comps) else zero)]
           for k in range(order)]
    E = [[z] * n for _ in range(n)]
    E[a][b] = f
    for k, d_k in enumerate(comps):
        Ed = _mat_mul(E, d_k, setup)
        dE = _mat_mul(d_k, E, setup)
        EdE = _mat_mul(Ed, E, setup)
        if k + j < order:
            M = out[k + j]
            for t in range(n):
                for s in range(n):
                    M[t][s] = M[t][s] + Ed[t][s] - dE[t][s]
        if k + 2 * j < order:
            M = out[k + 2 * j]
            for t in range(n):
                for s in range(n):
                    M[t][s] = M[t][s] - EdE[t][s]
    return out


def random_equivariant_differential(rng: random.Random, setup,
                                    max_gens: int = 8, order: int = 5,
                                    max_k: int = 3):
    """A valid randomized EquivariantDifferential with K <= max_k, N = order."""
    npairs = rng.randint(1, max_gens // 2)
    n = 2 * npairs
    basis = []
    for i in range(npairs):
        basis.append(GeneratorInfo(f"x{i}", 1))
        basis.append(GeneratorInfo(f"y{i}", 0))
    z = setup.zero()
    d0 = [[z] * n for _ in range(n)]
    for i in range(npairs):
        c = rng.choice([1, 2, 3, -1]) if setup.ring.kind != "Fp" \
            else rng.randint(1, setup.ring.modulus - 1)
        e = rng.randint(0, 3)
        d0[2 * i + 1][2 * i] = setup.monomial(c, e)
    comps = [d0]
    for _ in range(rng.randint(1, 3) if npairs > 1 else 0):
        for _attempt in range(20):
            j = rng.randint(1, 2)
            # conjugating factors preserve the mod-2 grading: a and b are
            # generators of equal parity (u^j carries even degree)
            parity = rng.randint(0, 1)
            a, b = rng.sample(range(parity, n, 2), 2)
            c = rng.choice([1, 2, -1]) if setup.ring.kind != "Fp" \
                else rng.randint(1, setup.ring.modulus - 1)
            f = setup.monomial(c, rng.randint(0, 2))
            cand = _conjugate_components(comps, j, f, a, b, setup, order)
            while cand and all(not e for row in cand[-1] for e in row):
                cand.pop()
            if len(cand) - 1 <= max_k:
                comps = cand
                break
    entries = [
        {(t, s): M[t][s] for t in range(n) for s in range(n) if M[t][s]}
        for M in comps
    ]
    return EquivariantDifferential.build(
        setup, GradingKind("Z/2"), basis, entries, order=order)
