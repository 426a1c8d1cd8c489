"""Finite free graded complexes over the Novikov ring and over its u-series.

Contents:

* grading bookkeeping (integer, mod-2, mod-2m) and generator metadata;
* sparse operator matrices with a declared degree shift, over either plain
  Novikov scalars or truncated u-series;
* differential validation (d^2 = 0, monomial homogeneity in the |q| = 2
  regime);
* cohomology over the Novikov field by valuation-pivot elimination;
* Smith-style diagonalization over the discrete valuation ring Lambda[[u]]
  (free rank + u-torsion orders + undetermined pivots);
* the long-exact-sequence bookkeeping between ordinary and equivariant
  cohomology;
* the three-block mapping cone of a degree-0 chain map with its two
  projections.

Conventions fixed here (and relied on by the golden tests):

* pivot order is (u-valuation, q-valuation, row, column);
* a torsion summand Lambda[u]/u^j generated in degree D contributes to the
  ordinary cohomology in degrees D and D + 2j - 1 (u has degree 2; the
  connecting map of the long exact sequence has degree -1);
* the mapping cone of c: C+ -> C- has underlying module
  C-  (+)  C-[shifted up by one]  (+)  C+, with differential
  d(a, b, x) = (d-a, a - c(x) - d-b, d+x).  Both displayed arrows of the
  source diagram are components mapping *into* the middle block; with this
  convention the projection onto C+ is always a quasi-isomorphism and the
  projection onto C- is one exactly when c is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .novikov import (
    NovikovElem,
    NovikovError,
    ScalarSetup,
    USeries,
    useries_invert_unit,
)
from . import linalg
from .linalg import UndeterminedError

__all__ = [
    "GradingKind",
    "GeneratorInfo",
    "OperatorMatrix",
    "GradedComplex",
    "DecompositionReport",
    "validate_complex",
    "cohomology_over_novikov_field",
    "u_module_decomposition",
    "dvr_diagonalize",
    "les_consistency",
    "mapping_cone",
]


@dataclass(frozen=True)
class GradingKind:
    """IntGraded ("Z"), Mod2 ("Z/2") or Mod2m ("Z/2m" with modulus 2m)."""

    kind: str  # "Z" | "Z/2" | "Z/2m"
    m: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("Z", "Z/2", "Z/2m"):
            raise NovikovError(f"unknown grading kind {self.kind!r}")
        if self.kind == "Z/2m" and (self.m is None or self.m < 1):
            raise NovikovError("Mod2m grading needs m >= 1")

    @property
    def modulus(self) -> Optional[int]:
        if self.kind == "Z":
            return None
        if self.kind == "Z/2":
            return 2
        return 2 * self.m

    def displayed(self, index: int) -> int:
        mod = self.modulus
        return index if mod is None else index % mod

    def add(self, degree: int, shift: int) -> int:
        return self.displayed(degree + shift)

    def describe(self) -> str:
        return self.kind if self.kind != "Z/2m" else f"Z/{2 * self.m}"


@dataclass(frozen=True)
class GeneratorInfo:
    """A basis element: a name and its integer (Conley-Zehnder-style) index."""

    name: str
    index: int = 0

    def degree(self, grading: GradingKind) -> int:
        return grading.displayed(self.index)


Scalar = Union[NovikovElem, USeries]


@dataclass
class OperatorMatrix:
    """Sparse matrix between based modules with a declared degree shift.

    ``entries`` maps (target position, source position) to a nonzero scalar
    (NovikovElem, or USeries for equivariant operators).
    """

    source: Tuple[GeneratorInfo, ...]
    target: Tuple[GeneratorInfo, ...]
    entries: Dict[Tuple[int, int], Scalar]
    degree: int = 0

    def __post_init__(self):
        self.source = tuple(self.source)
        self.target = tuple(self.target)
        self.entries = {k: v for k, v in self.entries.items() if v}

    def entry(self, ti: int, si: int, zero: Scalar) -> Scalar:
        return self.entries.get((ti, si), zero)

    def dense(self, zero: Scalar) -> List[List[Scalar]]:
        return [
            [self.entries.get((t, s), zero) for s in range(len(self.source))]
            for t in range(len(self.target))
        ]

    @staticmethod
    def from_dense(source, target, rows, degree=0) -> "OperatorMatrix":
        entries = {
            (t, s): rows[t][s]
            for t in range(len(target))
            for s in range(len(source))
            if rows[t][s]
        }
        return OperatorMatrix(tuple(source), tuple(target), entries, degree)

    def compose(self, other: "OperatorMatrix") -> "OperatorMatrix":
        """self after other (matrix product self @ other)."""
        if other.target != self.source:
            raise NovikovError("operator composition basis mismatch")
        acc: Dict[Tuple[int, int], Scalar] = {}
        by_mid: Dict[int, list] = {}
        for (m, s), v in other.entries.items():
            by_mid.setdefault(m, []).append((s, v))
        for (t, m), a in self.entries.items():
            for s, b in by_mid.get(m, ()):  # a * b
                key = (t, s)
                prod = a * b
                acc[key] = acc[key] + prod if key in acc else prod
        return OperatorMatrix(other.source, self.target, acc,
                              self.degree + other.degree)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.source != self.source or other.target != self.target:
            raise NovikovError("operator addition basis mismatch")
        acc = dict(self.entries)
        for k, v in other.entries.items():
            acc[k] = acc[k] + v if k in acc else v
        return OperatorMatrix(self.source, self.target, acc, self.degree)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(
            self.source, self.target, {k: -v for k, v in self.entries.items()},
            self.degree,
        )

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return self + (-other)

    def entrywise(self, fn, degree: Optional[int] = None) -> "OperatorMatrix":
        return OperatorMatrix(
            self.source, self.target,
            {k: fn(v) for k, v in self.entries.items()},
            self.degree if degree is None else degree,
        )

    def apply(self, vec: List[Scalar], zero: Scalar) -> List[Scalar]:
        out = [zero] * len(self.target)
        for (t, s), a in self.entries.items():
            if vec[s]:
                out[t] = out[t] + (a * vec[s])
        return out

    def is_visibly_zero(self) -> bool:
        return not any(bool(v) for v in self.entries.values())


@dataclass
class GradedComplex:
    """A finite free complex over the Novikov ring with a chosen basis."""

    setup: ScalarSetup
    grading: GradingKind
    basis: Tuple[GeneratorInfo, ...]
    d: OperatorMatrix
    q_degree_two: bool = False

    def __post_init__(self):
        self.basis = tuple(self.basis)

    @staticmethod
    def build(setup, grading, basis, entries, q_degree_two=False,
              degree: int = 1) -> "GradedComplex":
        basis = tuple(basis)
        d = OperatorMatrix(basis, basis, dict(entries), degree)
        return GradedComplex(setup, grading, basis, d, q_degree_two)

    def degrees_present(self) -> List[int]:
        return sorted({g.degree(self.grading) for g in self.basis})

    def generators_in_degree(self, k: int) -> List[int]:
        return [i for i, g in enumerate(self.basis)
                if g.degree(self.grading) == k]


# -- validation ---------------------------------------------------------------


def _homogeneity_violations(op: OperatorMatrix, grading: GradingKind,
                            opname: str = "d") -> List[dict]:
    """In the |q| = 2 regime: i(target) - i(source) + 2E = degree(op)."""
    out = []
    for (t, s), v in op.entries.items():
        gt, gs = op.target[t], op.source[s]
        scalars = v.coeffs[: v.valid] if isinstance(v, USeries) else [v]
        for upow, c in enumerate(scalars):
            if isinstance(v, USeries):
                shift = op.degree - 2 * upow
            else:
                shift = op.degree
            if not isinstance(c, NovikovElem):
                continue
            for e in c.exponents():
                if Fraction(gt.index - gs.index) + 2 * e != shift:
                    out.append({
                        "invariant": "q-degree-2 homogeneity",
                        "operator": opname,
                        "entry": [gt.name, gs.name],
                        "exponent": str(e),
                        "expected_degree": shift,
                        "observed": str(Fraction(gt.index - gs.index) + 2 * e),
                    })
    return out


def validate_complex(C: GradedComplex) -> List[dict]:
    """Every violated invariant, with the offending entry; empty iff valid."""
    out = []
    n = len(C.basis)
    if C.d.source != C.basis or C.d.target != C.basis:
        out.append({"invariant": "differential bases", "detail": "basis mismatch"})
        return out
    dd = C.d.compose(C.d)
    for (t, s), v in dd.entries.items():
        if v:
            out.append({
                "invariant": "d squared zero",
                "entry": [C.basis[t].name, C.basis[s].name],
                "value": str(v),
            })
    # degree compatibility of visible entries with the displayed grading
    if not C.q_degree_two:
        for (t, s), v in C.d.entries.items():
            gt, gs = C.basis[t], C.basis[s]
            if gt.degree(C.grading) != C.grading.add(gs.degree(C.grading),
                                                    C.d.degree):
                out.append({
                    "invariant": "degree shift",
                    "entry": [gt.name, gs.name],
                    "expected": C.grading.add(gs.degree(C.grading), C.d.degree),
                    "observed": gt.degree(C.grading),
                })
    if C.q_degree_two:
        out.extend(_homogeneity_violations(C.d, C.grading))
    return out


# -- cohomology over the Novikov field ---------------------------------------


def _block(C: GradedComplex, op: OperatorMatrix, k: int):
    """Dense block of op restricted to sources of displayed degree k."""
    src = C.generators_in_degree(k)
    tgt = C.generators_in_degree(C.grading.add(k, op.degree))
    zero = C.setup.zero()
    rows = [[op.entries.get((t, s), zero) for s in src] for t in tgt]
    return src, tgt, rows


def cohomology_over_novikov_field(C: GradedComplex,
                                  q_order: Optional[int] = None) -> dict:
    """Betti numbers and representative cocycles per displayed degree.

    Gaussian elimination over the Novikov field with q-valuation pivoting;
    the certificate records the q-order to which zero-decisions were
    verified (None = exact).
    """
    if not C.setup.ring.is_field:
        raise NovikovError("cohomology requires field coefficients")
    setup = C.setup
    degrees = C.degrees_present()
    reductions = {}
    verified = None
    for k in degrees:
        src, tgt, rows = _block(C, C.d, k)
        if not src:
            continue
        if not tgt:
            red = None
        else:
            red = linalg.row_reduce(rows, setup, q_order)
            if red.verified_trunc is not None:
                verified = (red.verified_trunc if verified is None
                            else min(verified, red.verified_trunc))
        reductions[k] = (src, tgt, rows, red)

    def block_rank(k):
        if k not in reductions:
            return 0
        red = reductions[k][3]
        return red.rank if red is not None else 0

    report = {"degrees": {}, "certificate": {
        "verified_q_order_index": verified,
        "pivot_rule": "minimal q-valuation, then row, then column",
    }}
    for k in degrees:
        n_k = len(C.generators_in_degree(k))
        if n_k == 0:
            continue
        # incoming differential: the degree whose image lands in degree k
        incoming = [j for j in degrees
                    if C.grading.add(j, C.d.degree) == k and block_rank(j)]
        r_in = sum(block_rank(j) for j in incoming)
        r_out = block_rank(k)
        betti = n_k - r_out - r_in
        reps = _representatives(C, reductions, k, incoming, q_order)
        assert len(reps) == betti, (
            f"representative count {len(reps)} != betti {betti} in degree {k}"
        )
        report["degrees"][k] = {
            "generators": n_k,
            "rank_out": r_out,
            "rank_in": r_in,
            "betti": betti,
            "representatives": reps,
        }
    return report


def _representatives(C, reductions, k, incoming, q_order):
    """Kernel of d^k reduced modulo the image of the incoming blocks.

    Vectors are returned in the coordinates of the degree-k generators.
    """
    setup = C.setup
    gens_k = C.generators_in_degree(k)
    nk = len(gens_k)
    if nk == 0:
        return []
    if k in reductions and reductions[k][3] is not None:
        src, tgt, rows, red = reductions[k]
        kern = linalg.kernel_basis(rows, setup, q_order, reduction=red)
    else:
        one, zero = setup.one(), setup.zero()
        kern = [[one if i == j else zero for j in range(nk)]
                for i in range(nk)]
    # image vectors of the incoming blocks, in degree-k coordinates
    images = []
    for j in incoming:
        src_j, tgt_j, rows_j, red_j = reductions[j]
        pos = {t: i for i, t in enumerate(tgt_j)}
        for _, pc in red_j.pivots:
            vec = [setup.zero()] * nk
            for i, t in enumerate(gens_k):
                if t in pos:
                    vec[i] = rows_j[pos[t]][pc]
            images.append(vec)
    if images:
        img_red = linalg.row_reduce(images, setup, q_order)
        reduced_kern = []
        for v in kern:
            w = list(v)
            for r, c in img_red.pivots:
                f = w[c]
                if f.has_terms():
                    w = [a - (f * b) for a, b in zip(w, img_red.reduced[r])]
            reduced_kern.append(w)
    else:
        reduced_kern = kern
    if not reduced_kern:
        return []
    final = linalg.row_reduce(reduced_kern, setup, q_order)
    return [final.reduced[r] for r, _ in final.pivots]


# -- DVR decomposition over Lambda[[u]] ---------------------------------------


@dataclass
class DecompositionReport:
    """Free rank, torsion orders and undetermined pivots, per degree."""

    order: int  # analysis order N
    per_degree: Dict[int, dict] = field(default_factory=dict)
    pivot_rule: str = ("minimal u-valuation, then q-valuation of that "
                       "coefficient, then row, then column")
    verified_q_order_index: Optional[int] = None
    torsion_with_degree: List[Tuple[int, int]] = field(default_factory=list)

    def degree_entry(self, k):
        return self.per_degree.setdefault(
            k, {"free_rank": 0, "torsion_orders": [], "undetermined": 0}
        )

    def as_json(self) -> dict:
        return {
            "analysis_order": self.order,
            "pivot_rule": self.pivot_rule,
            "verified_q_order_index": self.verified_q_order_index,
            "per_degree": {
                str(k): v for k, v in sorted(self.per_degree.items())
            },
        }


def dvr_diagonalize(rows: List[List[USeries]], setup: ScalarSetup,
                    analysis_order: int, q_order: Optional[int] = None):
    """Smith-style diagonalization over Lambda[[u]].

    Returns (pivots, verified_trunc) where pivots is a list of
    (row, col, u_valuation).  Pivot valuations >= analysis_order are still
    returned (callers classify them as undetermined).  Raises
    UndeterminedError when precision erosion makes a pivot choice unsound.
    """
    if q_order is None:
        q_order = linalg.DEFAULT_Q_ORDER()
    if not setup.ring.is_field:
        raise NovikovError("DVR decomposition requires field coefficients")
    m = len(rows)
    n = len(rows[0]) if m else 0
    M = [list(r) for r in rows]
    free_rows = set(range(m))
    free_cols = set(range(n))
    pivots = []
    verified = None

    def entry_key(e: USeries):
        v = e.u_valuation()
        if v is None:
            return None
        c = e.coeffs[v]
        return (v, c.valuation_index())

    while True:
        best = None
        for r in sorted(free_rows):
            for c in sorted(free_cols):
                key = entry_key(M[r][c])
                if key is None:
                    continue
                cand = (key[0], key[1], r, c)
                if best is None or cand < best:
                    best = cand
        if best is None:
            # remaining entries are visibly zero; check precision
            for r in free_rows:
                for c in free_cols:
                    e = M[r][c]
                    if e.valid < min(analysis_order, e.order):
                        raise UndeterminedError(
                            "precision exhausted before the remaining block "
                            f"could be certified zero (entry {r},{c} valid "
                            f"to u-order {e.valid})"
                        )
                    t = e.q_certificate()
                    if t is not None:
                        verified = t if verified is None else min(verified, t)
            break
        v, _, pr, pc = best
        pivot = M[pr][pc]
        if v >= pivot.valid and v < pivot.order:
            raise UndeterminedError(
                f"pivot at ({pr},{pc}) has valuation beyond its valid order"
            )
        punit = pivot.shift_down(v)
        pinv = useries_invert_unit(punit, q_order)
        # clear the pivot column with row operations
        for r in list(free_rows):
            if r == pr:
                continue
            e = M[r][pc]
            if not e:
                continue
            f = e.shift_down(v) * pinv
            M[r] = [a - (f * b) for a, b in zip(M[r], M[pr])]
        # clear the pivot row with column operations
        for c in list(free_cols):
            if c == pc:
                continue
            e = M[pr][c]
            if not e:
                continue
            g = e.shift_down(v) * pinv
            for r in range(m):
                M[r][c] = M[r][c] - (g * M[r][pc])
        pivots.append((pr, pc, v))
        free_rows.discard(pr)
        free_cols.discard(pc)
    return pivots, verified


def u_module_decomposition(d_eq: OperatorMatrix,
                           analysis_order: Optional[int] = None,
                           grading: Optional[GradingKind] = None,
                           q_order: Optional[int] = None,
                           check_square: bool = True) -> DecompositionReport:
    """Free/torsion normal form of equivariant cohomology over Lambda[[u]].

    ``d_eq`` must be an endomorphism matrix (source basis = target basis)
    with USeries entries squaring to zero within their truncation.  Torsion
    summands are reported at the displayed degree of the pivot's target
    generator; pivots of u-valuation >= analysis_order are undetermined.
    """
    if d_eq.source != d_eq.target:
        raise NovikovError("u_module_decomposition expects an endomorphism")
    basis = d_eq.source
    grading = grading or GradingKind("Z")
    sample = next(iter(d_eq.entries.values()), None)
    entry_order = sample.order if sample is not None else 1
    N = analysis_order if analysis_order is not None else entry_order
    setup = (sample.setup if sample is not None else None)
    if setup is None:
        # zero differential: everything is free
        rep = DecompositionReport(order=N)
        for g in basis:
            rep.degree_entry(grading.displayed(g.index))["free_rank"] += 1
        return rep
    if check_square:
        sq = d_eq.compose(d_eq)
        for (t, s), v in sq.entries.items():
            if not v.is_zero_to(N):
                raise NovikovError(
                    f"d_eq^2 != 0 within truncation at entry "
                    f"({basis[t].name},{basis[s].name}): {v}"
                )
    zero = USeries.zero(setup, entry_order)
    rows = d_eq.dense(zero)
    pivots, verified = dvr_diagonalize(rows, setup, N, q_order)
    rep = DecompositionReport(order=N, verified_q_order_index=verified)
    used = set()
    for pr, pc, v in pivots:
        used.add(pr)
        used.add(pc)
        deg = grading.displayed(basis[pr].index)
        entry = rep.degree_entry(deg)
        if v >= N:
            entry["undetermined"] += 1
        elif v >= 1:
            entry["torsion_orders"].append(v)
            rep.torsion_with_degree.append((basis[pr].index, v))
    for i, g in enumerate(basis):
        if i not in used:
            rep.degree_entry(grading.displayed(g.index))["free_rank"] += 1
    for entry in rep.per_degree.values():
        entry["torsion_orders"].sort()
    return rep


# -- long exact sequence bookkeeping ------------------------------------------


def les_consistency(C: GradedComplex, report: DecompositionReport,
                    q_order: Optional[int] = None) -> dict:
    """Check dim HF^k = free_k + torsion generated in k + torsion ending in k.

    A torsion summand Lambda[u]/u^j generated in degree D contributes to the
    ordinary cohomology in degree D (cokernel of u) and in degree
    D + 2j - 1 (kernel of u feeding the connecting map).
    """
    ordinary = cohomology_over_novikov_field(C, q_order)
    expected: Dict[int, int] = {}
    for k, entry in report.per_degree.items():
        expected[k] = expected.get(k, 0) + entry["free_rank"] \
            + len(entry["torsion_orders"])
    for D, j in report.torsion_with_degree:
        k = C.grading.displayed(D + 2 * j - 1)
        expected[k] = expected.get(k, 0) + 1
    undetermined = sum(e["undetermined"] for e in report.per_degree.values())
    out = {"balanced": True, "undetermined_pivots": undetermined,
           "degrees": {}}
    degrees = set(expected) | set(ordinary["degrees"])
    for k in sorted(degrees):
        lhs = ordinary["degrees"].get(k, {}).get("betti", 0)
        rhs = expected.get(k, 0)
        ok = lhs == rhs
        out["degrees"][k] = {"ordinary_betti": lhs,
                             "from_equivariant": rhs, "match": ok}
        if not ok:
            out["balanced"] = False
            out.setdefault("first_mismatch_degree", k)
    if undetermined:
        out["balanced"] = False if any(
            not v["match"] for v in out["degrees"].values()) else out["balanced"]
        out["note"] = ("undetermined pivots present; bookkeeping compared "
                       "on the determined part only")
    return out


# -- mapping cone -------------------------------------------------------------


def mapping_cone(c: OperatorMatrix, C_minus: GradedComplex,
                 C_plus: GradedComplex,
                 q_order: Optional[int] = None) -> dict:
    """Three-block cone of a degree-0 chain map c: C+ -> C-.

    Returns the cone complex, both projections, and quasi-isomorphism
    verdicts obtained by comparing induced maps on cohomology.
    """
    if c.source != C_plus.basis or c.target != C_minus.basis:
        raise NovikovError("chain map bases do not match the complexes")
    if C_minus.setup != C_plus.setup or C_minus.grading != C_plus.grading:
        raise NovikovError("mapping cone requires matching setups and gradings")
    setup = C_minus.setup
    grading = C_minus.grading
    # chain map check: d- o c = c o d+
    defect = C_minus.d.compose(c) - c.compose(C_plus.d)
    if not defect.is_visibly_zero():
        bad = next(k for k, v in defect.entries.items() if v)
        raise NovikovError(
            f"c is not a chain map: defect at "
            f"({C_minus.basis[bad[0]].name},{C_plus.basis[bad[1]].name})"
        )
    nm = len(C_minus.basis)
    np_ = len(C_plus.basis)
    basis = (
        tuple(GeneratorInfo(f"L.{g.name}", g.index) for g in C_minus.basis)
        + tuple(GeneratorInfo(f"M.{g.name}", g.index + 1) for g in C_minus.basis)
        + tuple(GeneratorInfo(f"R.{g.name}", g.index) for g in C_plus.basis)
    )
    entries: Dict[Tuple[int, int], NovikovElem] = {}
    one = setup.one()
    for (t, s), v in C_minus.d.entries.items():
        entries[(t, s)] = v                          # L -> L
        entries[(nm + t, nm + s)] = -v               # M -> M
    for i in range(nm):
        entries[(nm + i, i)] = one                   # L -> M (identity)
    for (t, s), v in c.entries.items():
        key = (nm + t, 2 * nm + s)                   # R -> M (minus c)
        entries[key] = entries[key] + (-v) if key in entries else -v
    cone = GradedComplex(
        setup, grading, basis,
        OperatorMatrix(basis, basis, entries, 1),
        C_minus.q_degree_two and C_plus.q_degree_two,
    )
    bad = validate_complex(cone)
    bad = [b for b in bad if b["invariant"] == "d squared zero"]
    assert not bad, f"cone differential does not square to zero: {bad}"

    proj_minus = OperatorMatrix(
        basis, C_minus.basis,
        {(i, i): one for i in range(nm)}, 0)
    proj_plus = OperatorMatrix(
        basis, C_plus.basis,
        {(i, 2 * nm + i): one for i in range(np_)}, 0)

    verdicts = {
        "minus": _quasi_iso_verdict(proj_minus, cone, C_minus, q_order),
        "plus": _quasi_iso_verdict(proj_plus, cone, C_plus, q_order),
    }
    return {"cone": cone, "projection_minus": proj_minus,
            "projection_plus": proj_plus, "quasi_isomorphisms": verdicts}


def _quasi_iso_verdict(proj: OperatorMatrix, source: GradedComplex,
                       target: GradedComplex, q_order=None) -> dict:
    """Is the induced map on cohomology an isomorphism in every degree?"""
    setup = source.setup
    hs = cohomology_over_novikov_field(source, q_order)
    ht = cohomology_over_novikov_field(target, q_order)
    degrees = set(hs["degrees"]) | set(ht["degrees"])
    zero = setup.zero()
    for k in sorted(degrees):
        dim_s = hs["degrees"].get(k, {}).get("betti", 0)
        dim_t = ht["degrees"].get(k, {}).get("betti", 0)
        if dim_s != dim_t:
            return {"quasi_isomorphism": False, "degree": k,
                    "reason": f"cohomology ranks differ ({dim_s} vs {dim_t})"}
        if dim_s == 0:
            continue
        # push source representatives through proj, reduce mod boundaries
        s_gens = source.generators_in_degree(k)
        t_gens = target.generators_in_degree(k)
        reps = hs["degrees"][k]["representatives"]
        pushed = []
        for rep in reps:
            full = [zero] * len(source.basis)
            for i, g in enumerate(s_gens):
                full[g] = rep[i]
            img = proj.apply(full, zero)
            pushed.append([img[g] for g in t_gens])
        # boundaries of the target in degree k
        incoming = [j for j in target.degrees_present()
                    if target.grading.add(j, target.d.degree) == k]
        boundary_vecs = []
        for j in incoming:
            src_j, tgt_j, rows_j = _block(target, target.d, j)
            pos = {t: i for i, t in enumerate(tgt_j)}
            for col in range(len(src_j)):
                vec = [zero] * len(t_gens)
                for i, t in enumerate(t_gens):
                    if t in pos:
                        vec[i] = rows_j[pos[t]][col]
                if any(v.has_terms() for v in vec):
                    boundary_vecs.append(vec)
        rank_b = (linalg.rank(boundary_vecs, setup, q_order)
                  if boundary_vecs else 0)
        rank_both = linalg.rank(boundary_vecs + pushed, setup, q_order)
        if rank_both - rank_b != dim_t:
            return {"quasi_isomorphism": False, "degree": k,
                    "reason": "induced map not surjective modulo boundaries"}
    return {"quasi_isomorphism": True}
