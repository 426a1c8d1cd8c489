"""Cartan-style differential calculus for equivariant complexes.

An equivariant differential is a finite family d_0, ..., d_K of matrices
over the Novikov ring, assembled as d_eq = sum_k u^k d_k and analysed in
Lambda[u]/u^N.  The two connection-type operators are

    Gamma_q = u * d/dq + iota-part      (degree 0)
    Gamma_u = 2 u^2 * d/du + u*mu - 2*iota_mono      (degree 2)

where mu is the diagonal integer-index operator and the iota-part depends
on the regime:

* "monotone": Gamma_q = u d/dq + q^(-1) iota_eq, and the commutation
  requirement is  [d_eq, iota_eq] = u * lambda_graded_eq  with
  lambda_graded = q * (entrywise d/dq of d);
* "cy": Gamma_q = u d/dq + iota_eq with  [d_eq, iota_eq] = u * lambda_eq,
  lambda = entrywise d/dq of d.

In both regimes iota_mono (the matrix part entering Gamma_u) is the family
satisfying [d_eq, iota_mono] = u * lambda_graded_eq, i.e. iota itself in the
monotone regime and q * iota in the Calabi-Yau one.  With this convention
the same four matrix identities hold in both regimes and the Euler-type
relation  Gamma_u + 2q Gamma_q = u * deg  is exact.

``solve_iota`` constructs the iota family order by order from d alone by
solving [d_0, iota_k] = (known lower-order data); an inconsistency at some
order is returned as an explicit obstruction certificate rather than an
exception.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .novikov import (
    CoefficientError,
    NovikovElem,
    NovikovError,
    ScalarSetup,
    USeries,
    dq,
    useries_du,
    useries_udq,
)
from .complexes import GeneratorInfo, GradedComplex, GradingKind, OperatorMatrix
from . import linalg
from .complexes import cohomology_over_novikov_field

__all__ = [
    "EquivariantDifferential",
    "CartanData",
    "DEFAULT_U_ORDER",
    "lambda_components",
    "solve_iota",
    "gamma_q",
    "gamma_u",
    "identity_report",
    "reduce_mod",
    "flatten_equivariant",
    "induced_connection",
]

REGIMES = ("monotone", "cy")


def DEFAULT_U_ORDER(fallback: int) -> int:
    v = os.environ.get("EQCARTAN_U_ORDER")
    return int(v) if v else fallback


@dataclass
class EquivariantDifferential:
    """d_eq = sum_k u^k d_k on a common basis, analysed mod u^order.

    ``components[k]`` is d_k as a plain Novikov matrix (degree 1 - 2k when
    the grading is meaningful).  ``order`` defaults to K + 2 so that the
    first potentially-obstructed iota order is visible.
    """

    setup: ScalarSetup
    grading: GradingKind
    basis: Tuple[GeneratorInfo, ...]
    components: Tuple[OperatorMatrix, ...]
    order: int = 0

    def __post_init__(self):
        self.basis = tuple(self.basis)
        self.components = tuple(self.components)
        if self.order <= 0:
            self.order = len(self.components) + 1
        if self.order < len(self.components):
            raise NovikovError(
                "truncation order must cover every differential component"
            )
        for k, op in enumerate(self.components):
            if op.source != self.basis or op.target != self.basis:
                raise NovikovError(f"component d_{k} basis mismatch")

    @staticmethod
    def build(setup, grading, basis, component_entries, order: int = 0):
        basis = tuple(basis)
        comps = [
            OperatorMatrix(basis, basis, dict(e), 1 - 2 * k)
            for k, e in enumerate(component_entries)
        ]
        return EquivariantDifferential(setup, grading, basis, tuple(comps), order)

    @property
    def K(self) -> int:
        return len(self.components) - 1

    @property
    def n(self) -> int:
        return len(self.basis)

    def component(self, k: int) -> Dict[Tuple[int, int], NovikovElem]:
        if 0 <= k < len(self.components):
            return self.components[k].entries
        return {}

    def dense_component(self, k: int) -> List[List[NovikovElem]]:
        z = self.setup.zero()
        n = self.n
        ent = self.component(k)
        return [[ent.get((t, s), z) for s in range(n)] for t in range(n)]

    def as_useries(self) -> List[List[USeries]]:
        """Dense matrix of USeries, the assembled d_eq mod u^order."""
        return _assemble([self.dense_component(k)
                          for k in range(len(self.components))],
                         self.setup, self.order)

    def as_operator(self) -> OperatorMatrix:
        rows = self.as_useries()
        return OperatorMatrix.from_dense(self.basis, self.basis, rows, 1)

    def mu_diag(self) -> List[int]:
        return [g.index for g in self.basis]


@dataclass
class CartanData:
    """An equivariant differential plus an iota family and a regime."""

    diff: EquivariantDifferential
    iota: Tuple[OperatorMatrix, ...] = ()
    regime: str = "monotone"

    def __post_init__(self):
        self.iota = tuple(self.iota)
        if self.regime not in REGIMES:
            raise NovikovError(f"unknown regime {self.regime!r}")

    @property
    def setup(self):
        return self.diff.setup

    @property
    def order(self):
        return self.diff.order

    def dense_iota(self, k: int) -> List[List[NovikovElem]]:
        z = self.setup.zero()
        n = self.diff.n
        ent = self.iota[k].entries if k < len(self.iota) else {}
        return [[ent.get((t, s), z) for s in range(n)] for t in range(n)]

    def iota_useries(self) -> List[List[USeries]]:
        comps = [self.dense_iota(k) for k in range(len(self.iota))]
        if not comps:
            comps = [self.dense_iota(0)]  # all-zero matrix
        return _assemble(comps, self.setup, self.order)

    def iota_mono_useries(self) -> List[List[USeries]]:
        """The matrix family with [d_eq, .] = u * lambda_graded_eq."""
        M = self.iota_useries()
        if self.regime == "monotone":
            return M
        step = self.setup.lattice.steps_per_unit
        return [[_useries_qshift(e, step) for e in row] for row in M]


# -- dense USeries matrix helpers ---------------------------------------------


def _assemble(dense_components, setup, order) -> List[List[USeries]]:
    n = len(dense_components[0]) if dense_components else 0
    if not dense_components:
        return []
    out = [[None] * n for _ in range(n)]
    for t in range(n):
        for s in range(n):
            coeffs = [setup.zero()] * order
            for k, comp in enumerate(dense_components):
                if k < order:
                    coeffs[k] = coeffs[k] + comp[t][s]
            out[t][s] = USeries.build(setup, order, coeffs)
    return out


def _uzero(setup, order):
    return USeries.zero(setup, order)


def _dmul(A, B, setup, order):
    n = len(A)
    z = _uzero(setup, order)
    out = [[z] * n for _ in range(n)]
    for t in range(n):
        for m in range(n):
            a = A[t][m]
            if not a:
                continue
            for s in range(n):
                if B[m][s]:
                    out[t][s] = out[t][s] + (a * B[m][s])
    return out


def _dsub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _dadd(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _commutator(A, B, setup, order):
    return _dsub(_dmul(A, B, setup, order), _dmul(B, A, setup, order))


def _dmap(A, fn):
    return [[fn(e) for e in row] for row in A]


def _useries_qshift(e: USeries, steps: int) -> USeries:
    return USeries.build(e.setup, e.order,
                         [c.q_shift(steps) for c in e.coeffs], e.valid)


def _scan_zero(M, basis, identity_name):
    """Failure records + certified orders for a dense USeries matrix."""
    failures = []
    min_valid = None
    qcert = None
    for t, row in enumerate(M):
        for s, e in enumerate(row):
            min_valid = e.valid if min_valid is None else min(min_valid, e.valid)
            c = e.q_certificate()
            if c is not None:
                qcert = c if qcert is None else min(qcert, c)
            if not e.is_zero_to():
                failures.append({
                    "identity": identity_name,
                    "entry": [basis[t].name, basis[s].name],
                    "value": str(e),
                })
    return failures, min_valid, qcert


# -- lambda and iota ----------------------------------------------------------


def lambda_components(diff: EquivariantDifferential,
                      regime: str = "monotone") -> List[List[List[NovikovElem]]]:
    """Entrywise q-derivative of each d_k; the monotone regime multiplies
    by q so the result stays in the original exponent lattice."""
    step = diff.setup.lattice.steps_per_unit
    out = []
    for k in range(len(diff.components)):
        dense = diff.dense_component(k)
        if regime == "monotone":
            out.append(_dmap(dense, lambda e: dq(e).q_shift(step)))
        else:
            out.append(_dmap(dense, dq))
    return out


def _lambda_useries(diff, regime):
    """u * lambda_eq as a dense USeries matrix (component k sits at u^(k+1))."""
    comps = lambda_components(diff, regime)
    n = diff.n
    z = diff.setup.zero()
    zero_comp = [[z] * n for _ in range(n)]
    return _assemble([zero_comp] + comps, diff.setup, diff.order)


def solve_iota(diff: EquivariantDifferential, regime: str = "monotone",
               iota0: Optional[OperatorMatrix] = None,
               q_order: Optional[int] = None):
    """Solve [d_eq, iota_eq] = u * lambda_eq order by order.

    Returns (CartanData, obstruction) where obstruction is None on success
    and otherwise {"order": k, "residual": ...} naming the first u-order at
    which the linear system is inconsistent.  Requires field coefficients.
    """
    setup = diff.setup
    if not setup.ring.is_field:
        raise CoefficientError("solve_iota requires field coefficients")
    n = diff.n
    N = diff.order
    lam = lambda_components(diff, regime)
    d = [diff.dense_component(k) for k in range(len(diff.components))]
    z = setup.zero()
    zero_mat = [[z] * n for _ in range(n)]
    d0 = d[0]

    # vectorized commutator with d_0: row (a,b), unknown entry (c,e)
    com = [[z] * (n * n) for _ in range(n * n)]
    for a in range(n):
        for b in range(n):
            row = com[a * n + b]
            for c in range(n):
                row[c * n + b] = row[c * n + b] + d0[a][c]
            for e in range(n):
                row[a * n + e] = row[a * n + e] - d0[e][b]
    red = linalg.row_reduce(com, setup, q_order)

    def mat_com(A, B):
        return _scalar_commutator(A, B, setup)

    iotas: List[List[List[NovikovElem]]] = []
    for k in range(N):
        rhs = [row[:] for row in (lam[k - 1] if 1 <= k <= diff.K + 1
                                  else zero_mat)]
        for j in range(k):
            i = k - j
            if i <= diff.K:
                rhs = _dsub(rhs, mat_com(d[i], iotas[j]))
        if k == 0 and iota0 is not None:
            cand = [[iota0.entries.get((t, s), z) for s in range(n)]
                    for t in range(n)]
            resid = _dsub(mat_com(d0, cand), rhs)
            bad = [(t, s) for t in range(n) for s in range(n)
                   if resid[t][s].has_terms()]
            if bad:
                t, s = bad[0]
                return None, {"order": 0, "entry": list(bad[0]),
                              "residual": str(resid[t][s]),
                              "reason": "supplied iota_0 does not commute"}
            iotas.append(cand)
            continue
        vec = [rhs[t][s] for t in range(n) for s in range(n)]
        x, bad = linalg.solve(com, vec, setup, q_order, reduction=red)
        if x is None:
            r, resid = bad
            return None, {"order": k, "row": r, "residual": str(resid),
                          "reason": "no iota solves the order-k equation"}
        iotas.append([[x[t * n + s] for s in range(n)] for t in range(n)])
    ops = []
    for k, mat in enumerate(iotas):
        entries = {(t, s): mat[t][s] for t in range(n) for s in range(n)
                   if mat[t][s]}
        deg = -2 * k if regime == "cy" else 2 - 2 * k
        ops.append(OperatorMatrix(diff.basis, diff.basis, entries, deg))
    return CartanData(diff, tuple(ops), regime), None


def _scalar_commutator(A, B, setup):
    n = len(A)
    z = setup.zero()
    out = [[z] * n for _ in range(n)]
    for t in range(n):
        for m in range(n):
            if A[t][m]:
                for s in range(n):
                    if B[m][s]:
                        out[t][s] = out[t][s] + A[t][m] * B[m][s]
            if B[t][m]:
                for s in range(n):
                    if A[m][s]:
                        out[t][s] = out[t][s] - B[t][m] * A[m][s]
    return out


# -- the connection operators -------------------------------------------------


def _apply_dense(M, vec, setup, order):
    z = _uzero(setup, order)
    out = []
    for row in M:
        acc = z
        for a, v in zip(row, vec):
            if a and v:
                acc = acc + (a * v)
        out.append(acc)
    return out


def gamma_q(data: CartanData, vec: List[USeries]) -> List[USeries]:
    """Gamma_q = u d/dq + iota-part, on a column of u-series."""
    setup = data.setup
    N = data.order
    out = [useries_udq(v).times_u() for v in vec]
    M = data.iota_useries()
    if M:
        part = _apply_dense(M, vec, setup, N)
        if data.regime == "monotone":
            step = setup.lattice.steps_per_unit
            part = [_useries_qshift(p, -step) for p in part]
        out = [a + b for a, b in zip(out, part)]
    return out


def gamma_u(data: CartanData, vec: List[USeries]) -> List[USeries]:
    """Gamma_u = 2 u^2 d/du + u*mu - 2*iota_mono, on a column of u-series."""
    setup = data.setup
    N = data.order
    two = setup.monomial(2, 0)
    out = []
    mu = data.diff.mu_diag()
    for i, v in enumerate(vec):
        term = useries_du(v).times_u(2).scale(two)
        term = term + v.scale(setup.monomial(mu[i], 0)).times_u()
        out.append(term)
    M = data.iota_mono_useries()
    if M:
        part = _apply_dense(M, vec, setup, N)
        out = [a - p.scale(two) for a, p in zip(out, part)]
    return out


def degree_weighted(data: CartanData, vec: List[USeries]) -> List[USeries]:
    """Termwise multiplication by the total degree i(x) + 2E + 2k."""
    setup = data.setup
    lat = setup.lattice
    out = []
    for i, v in enumerate(vec):
        base = data.diff.basis[i].index
        coeffs = []
        for k, c in enumerate(v.coeffs):
            pairs = []
            for idx, co in c.terms:
                w = Fraction(base + 2 * k) + 2 * lat.exponent_of(idx)
                pairs.append((idx, setup.ring.mul_rational(co, w)))
            coeffs.append(NovikovElem.build(setup, pairs, c.trunc))
        out.append(USeries.build(setup, v.order, coeffs, v.valid))
    return out


# -- identity self-tests ------------------------------------------------------


def identity_report(data: CartanData, q_order: Optional[int] = None) -> dict:
    """Verify the matrix and operator identities of the Cartan package.

    Each identity entry carries a verdict plus the u-order and q-order
    indices to which the vanishing was actually certified.
    """
    diff = data.diff
    setup = data.setup
    N = diff.order
    basis = diff.basis
    d_eq = diff.as_useries()
    results = []

    def record(name, M):
        failures, valid, qcert = _scan_zero(M, basis, name)
        results.append({
            "identity": name,
            "holds": not failures,
            "verified_u_order": valid if valid is not None else N,
            "verified_q_order_index": qcert,
            "failures": failures,
        })

    # 1. d_eq^2 = 0
    record("d_eq squared zero", _dmul(d_eq, d_eq, setup, N))

    # 1b. d_eq anticommutes with lambda_eq := entrywise d/dq of d_eq
    #     (the q-derivative of d_eq^2 = 0)
    lam_plain = _assemble(lambda_components(diff, "cy"), setup, N)
    record("lambda_eq anticommutes with d_eq",
           _dadd(_dmul(d_eq, lam_plain, setup, N),
                 _dmul(lam_plain, d_eq, setup, N)))

    # 2. [d_eq, iota_eq] = u * lambda_eq (regime normalization)
    lam_u = _lambda_useries(diff, data.regime)
    record("connection commutes with d_eq",
           _dsub(_commutator(d_eq, data.iota_useries(), setup, N), lam_u))

    # 3. mu d_eq - d_eq mu = sum (1-2k) u^k d_k - 2 * u^-1 * (u lambda_graded)
    mu = diff.mu_diag()
    n = diff.n
    mu_d = [[_scale_int(d_eq[t][s], mu[t] - mu[s], setup)
             for s in range(n)] for t in range(n)]
    weighted = _assemble(
        [_dmap(diff.dense_component(k), lambda e, k=k: e.scale(1 - 2 * k))
         for k in range(len(diff.components))], setup, N)
    lam_g = lambda_components(diff, "monotone")
    twice_lam = _assemble(
        [_dmap(m, lambda e: e.scale(2)) for m in lam_g], setup, N)
    record("index operator homogeneity",
           _dsub(mu_d, _dsub(weighted, twice_lam)))

    # 4. [Gamma_u, d_eq] = u * d_eq at the matrix level:
    #    sum 2k u^(k+1) d_k + [u mu - 2 iota_mono, d_eq] - u d_eq = 0
    du_part = _assemble(
        [[[setup.zero()] * n for _ in range(n)]]
        + [_dmap(diff.dense_component(k), lambda e, k=k: e.scale(2 * k))
           for k in range(len(diff.components))], setup, N)
    mono = data.iota_mono_useries() or [[_uzero(setup, N)] * n for _ in range(n)]
    mat_part = [[mu_mat_entry(setup, N, mu[t]) if t == s else _uzero(setup, N)
                 for s in range(n)] for t in range(n)]
    two = setup.monomial(2, 0)
    mat_part = _dsub(mat_part, _dmap(mono, lambda e: e.scale(two)))
    u_d = _dmap(d_eq, lambda e: e.times_u())
    record("gamma_u commutator",
           _dadd(du_part,
                 _dsub(_commutator(mat_part, d_eq, setup, N), u_d)))

    # 5. Euler relation (Gamma_u + 2q Gamma_q - u deg) on sample vectors
    step = setup.lattice.steps_per_unit
    euler_fail = []
    euler_valid, euler_q = N, None
    samples = _sample_vectors(data)
    for label, v in samples:
        lhs = gamma_u(data, v)
        gq = gamma_q(data, v)
        lhs = [a + _useries_qshift(g.scale(two), step)
               for a, g in zip(lhs, gq)]
        rhs = [w.times_u() for w in degree_weighted(data, v)]
        for i, (a, b) in enumerate(zip(lhs, rhs)):
            e = a - b
            euler_valid = min(euler_valid, e.valid)
            c = e.q_certificate()
            if c is not None:
                euler_q = c if euler_q is None else min(euler_q, c)
            if not e.is_zero_to():
                euler_fail.append({"identity": "euler relation",
                                   "sample": label,
                                   "row": basis[i].name, "value": str(e)})
    results.append({"identity": "euler relation", "holds": not euler_fail,
                    "verified_u_order": euler_valid,
                    "verified_q_order_index": euler_q,
                    "failures": euler_fail})

    # 6. Leibniz rule for Gamma_u with f = q + u
    f = USeries.build(setup, N,
                      [setup.monomial(1, 1), setup.one()])
    df2 = USeries.from_novikov(two, N, 2)  # 2 u^2 * df/du = 2 u^2
    leib_fail = []
    leib_valid, leib_q = N, None
    for label, v in samples:
        fv = [w * f for w in v]
        lhs = gamma_u(data, fv)
        rhs = [g * f + w * df2 for g, w in zip(gamma_u(data, v), v)]
        for i, (a, b) in enumerate(zip(lhs, rhs)):
            e = a - b
            leib_valid = min(leib_valid, e.valid)
            c = e.q_certificate()
            if c is not None:
                leib_q = c if leib_q is None else min(leib_q, c)
            if not e.is_zero_to():
                leib_fail.append({"identity": "leibniz", "sample": label,
                                  "row": basis[i].name, "value": str(e)})
    results.append({"identity": "leibniz", "holds": not leib_fail,
                    "verified_u_order": leib_valid,
                    "verified_q_order_index": leib_q,
                    "failures": leib_fail})

    # 7. Leibniz rule for Gamma_q with the same scalar f = q + u:
    #    Gamma_q(f x) = u * (df/dq) x + f Gamma_q(x),  u df/dq = u
    uf = USeries.from_novikov(setup.one(), N, 1)
    gq_fail = []
    gq_valid, gq_q = N, None
    for label, v in samples:
        fv = [w * f for w in v]
        lhs = gamma_q(data, fv)
        rhs = [g * f + w * uf for g, w in zip(gamma_q(data, v), v)]
        for i, (a, b) in enumerate(zip(lhs, rhs)):
            e = a - b
            gq_valid = min(gq_valid, e.valid)
            c = e.q_certificate()
            if c is not None:
                gq_q = c if gq_q is None else min(gq_q, c)
            if not e.is_zero_to():
                gq_fail.append({"identity": "gamma_q leibniz",
                                "sample": label,
                                "row": basis[i].name, "value": str(e)})
    results.append({"identity": "gamma_q leibniz", "holds": not gq_fail,
                    "verified_u_order": gq_valid,
                    "verified_q_order_index": gq_q,
                    "failures": gq_fail})

    return {"regime": data.regime, "order": N,
            "identities": results,
            "all_hold": all(r["holds"] for r in results)}


def mu_mat_entry(setup, order, weight) -> USeries:
    return USeries.from_novikov(setup.monomial(weight, 0), order, 1)


def _scale_int(e: USeries, w: int, setup) -> USeries:
    return e.scale(setup.monomial(w, 0)) if w else _uzero(setup, e.order)


def _sample_vectors(data: CartanData):
    """Basis vectors and one q,u-dressed variant each."""
    setup = data.setup
    N = data.order
    n = data.diff.n
    z = _uzero(setup, N)
    out = []
    qmono = setup.monomial(1, 1)
    for i in range(n):
        e = [z] * n
        e[i] = USeries.from_novikov(setup.one(), N)
        out.append((f"e_{i}", e))
        dressed = [z] * n
        dressed[i] = USeries.from_novikov(qmono, N, 1)
        out.append((f"q*u*e_{i}", dressed))
    return out


# -- reduction mod m ----------------------------------------------------------


def reduce_mod(data: CartanData, m: int) -> dict:
    """Reduction statement: if every q-exponent of d lies in m*Z and the
    iota family vanishes mod m, then Gamma_q reduces to u d/dq mod m (and
    Gamma_u to 2u^2 d/du + u mu mod 2m when 2*iota_mono vanishes mod 2m).

    Hypothesis violations are reported separately from conclusion failures.
    """
    if m < 2:
        raise NovikovError("modulus must be >= 2")
    diff = data.diff
    setup = data.setup
    hyp = []
    for k in range(len(diff.components)):
        for (t, s), v in diff.components[k].entries.items():
            for e in v.exponents():
                if (Fraction(e) / m).denominator != 1:
                    hyp.append({
                        "hypothesis": "d exponents in mZ",
                        "component": k,
                        "entry": [diff.basis[t].name, diff.basis[s].name],
                        "exponent": str(e),
                    })
    integral = setup.ring.kind == "Z"
    if not integral:
        hyp.append({"hypothesis": "iota = 0 mod m",
                    "inapplicable": f"coefficients are {setup.ring.describe()},"
                                    " divisibility is not meaningful"})
    else:
        for k, op in enumerate(data.iota):
            for (t, s), v in op.entries.items():
                for _, c in v.terms:
                    if c % m != 0:
                        hyp.append({
                            "hypothesis": "iota = 0 mod m",
                            "component": k,
                            "entry": [diff.basis[t].name, diff.basis[s].name],
                            "coefficient": str(c),
                        })
    out = {"modulus": m, "hypothesis_violations": hyp,
           "hypothesis_holds": not hyp}

    # conclusion mod m: the matrix part of Gamma_q and the regime lambda
    # both vanish after pushing coefficients into Z/m
    target = ScalarSetup(setup.lattice,
                         _coeff_ring_mod(m))
    lam = lambda_components(diff, data.regime)
    lam_zero = all(
        not e.map_coefficients(target).has_terms()
        for comp in lam for row in comp for e in row
    )
    iota_zero = all(
        not v.map_coefficients(target).has_terms()
        for op in data.iota for v in op.entries.values()
    )
    out["conclusion"] = {
        "lambda_vanishes_mod_m": lam_zero,
        "gamma_q_is_u_dq_mod_m": iota_zero,
    }

    target2 = ScalarSetup(setup.lattice, _coeff_ring_mod(2 * m))
    two = 2
    step = setup.lattice.steps_per_unit
    mono_zero = True
    for op in data.iota:
        for v in op.entries.values():
            w = v if data.regime == "monotone" else v.q_shift(step)
            if w.scale(two).map_coefficients(target2).has_terms():
                mono_zero = False
    out["conclusion"]["gamma_u_is_free_part_mod_2m"] = mono_zero
    out["holds"] = (not hyp) and lam_zero and iota_zero and mono_zero
    return out


def _coeff_ring_mod(m: int):
    from .novikov import CoefficientRing
    return CoefficientRing("Zmod", m)


# -- induced connection on cohomology -----------------------------------------


def flatten_equivariant(diff: EquivariantDifferential) -> GradedComplex:
    """The complex over the plain Novikov ring with basis u^j x_i, j < order."""
    setup = diff.setup
    N = diff.order
    n = diff.n
    basis = []
    for j in range(N):
        for g in diff.basis:
            name = g.name if j == 0 else f"u^{j}.{g.name}"
            basis.append(GeneratorInfo(name, g.index + 2 * j))
    basis = tuple(basis)
    entries: Dict[Tuple[int, int], NovikovElem] = {}
    for k in range(len(diff.components)):
        for (t, s), v in diff.components[k].entries.items():
            for j in range(N - k):
                key = ((j + k) * n + t, j * n + s)
                entries[key] = entries[key] + v if key in entries else v
    d = OperatorMatrix(basis, basis, entries, 1)
    return GradedComplex(setup, diff.grading, basis, d)


def _unflatten(diff, vec):
    setup = diff.setup
    N, n = diff.order, diff.n
    out = []
    for i in range(n):
        coeffs = [vec[j * n + i] for j in range(N)]
        out.append(USeries.build(setup, N, coeffs))
    return out


def _flatten_vec(diff, useries_vec):
    N, n = diff.order, diff.n
    out = []
    for j in range(N):
        for i in range(n):
            out.append(useries_vec[i].coeffs[j])
    return out


def induced_connection(data: CartanData, which: str = "gamma_q",
                       q_order: Optional[int] = None) -> dict:
    """Matrix of the connection operator on equivariant cohomology classes.

    Cohomology of the u-truncated complex is computed over the Novikov
    field; each representative is pushed through the operator and re-solved
    against [class representatives | boundaries].  Well-definedness is
    certified by perturbing every representative by an explicit boundary
    and checking the coefficients do not move.
    """
    if which not in ("gamma_q", "gamma_u"):
        raise NovikovError(f"unknown operator {which!r}")
    op = gamma_q if which == "gamma_q" else gamma_u
    diff = data.diff
    setup = data.setup
    C = flatten_equivariant(diff)
    H = cohomology_over_novikov_field(C, q_order)
    big_n = len(C.basis)
    zero = setup.zero()
    classes = []
    for k in sorted(H["degrees"]):
        gens = C.generators_in_degree(k)
        for rep in H["degrees"][k]["representatives"]:
            full = [zero] * big_n
            for pos, g in enumerate(gens):
                full[g] = rep[pos]
            classes.append({"degree": k, "vector": full})
    iota_trivial = not any(bool(v) for op in data.iota
                           for v in op.entries.values())
    if which == "gamma_q":
        form = "u*d/dq" if iota_trivial else "u*d/dq + iota part"
    else:
        form = ("2*u^2*d/du + u*mu" if iota_trivial
                else "2*u^2*d/du + u*mu - 2*iota part")
    if not classes:
        return {"operator": which, "operator_form": form,
                "matrix_part_is_zero": iota_trivial,
                "classes": [], "matrix": [], "well_defined": True,
                "issues": []}
    d_rows = C.d.dense(zero)
    # columns: class representatives, then every boundary d(e_i)
    cols = [cl["vector"] for cl in classes]
    bcols = [[d_rows[r][c] for r in range(big_n)] for c in range(big_n)]
    M = [[colv[r] for colv in cols + bcols] for r in range(big_n)]
    red = linalg.row_reduce(M, setup, q_order)

    def express(vec):
        x, bad = linalg.solve(M, vec, setup, q_order, reduction=red)
        if x is None:
            return None, bad
        return x[: len(classes)], None

    matrix = []
    well_defined = True
    issues = []
    ones = [setup.one()] * big_n
    perturb = linalg.mat_apply(d_rows, ones, setup)
    for ci, cl in enumerate(classes):
        img = _flatten_vec(diff, op(data, _unflatten(diff, cl["vector"])))
        coeffs, bad = express(img)
        if coeffs is None:
            issues.append({"class": ci, "problem": "image not expressible",
                           "residual_row": bad[0], "residual": str(bad[1])})
            matrix.append(None)
            continue
        pert_rep = [a + b for a, b in zip(cl["vector"], perturb)]
        img2 = _flatten_vec(diff, op(data, _unflatten(diff, pert_rep)))
        coeffs2, bad2 = express(img2)
        if coeffs2 is None or any((a - b).has_terms()
                                  for a, b in zip(coeffs, coeffs2)):
            well_defined = False
            issues.append({"class": ci,
                           "problem": "coefficients depend on representative"})
        matrix.append([setup.format(c) for c in coeffs])
    return {
        "operator": which,
        "operator_form": form,
        "matrix_part_is_zero": iota_trivial,
        "classes": [{"degree": cl["degree"],
                     "representative": [setup.format(v) for v in cl["vector"]]}
                    for cl in classes],
        "matrix": matrix,
        "well_defined": well_defined and not issues,
        "issues": issues,
    }
