"""Command-line surface.

Exit codes: 0 = all checks pass; 1 = a mathematical check verified false;
2 = malformed input; 3 = undetermined (truncation exhausted before a
decision).  Reports go to stdout as deterministic JSON (sorted keys, fixed
indentation).

Default truncation orders come from the environment: EQCARTAN_Q_ORDER for
the q-order budget of truncated inverses (default 64) and EQCARTAN_U_ORDER
for the u-analysis order when a document does not fix one.
"""

from __future__ import annotations

import argparse
import sys

from . import cartan as cartan_mod
from . import complexes as cx
from . import finite2
from . import morse
from . import quantum as quantum_mod
from .cartan import DEFAULT_U_ORDER
from .linalg import UndeterminedError
from .novikov import NovikovError
from . import schema as schema_mod
from .schema import DocumentError

PASS, FAIL, MALFORMED, UNDETERMINED = 0, 1, 2, 3


def _emit(report) -> None:
    sys.stdout.write(schema_mod.dumps(report))


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = schema_mod.load_document(args.document)
    blocks = {}
    ok = True
    if "complex" in doc:
        C = schema_mod.complex_from(doc)
        viol = cx.validate_complex(C)
        blocks["complex"] = {"violations": viol, "valid": not viol}
        ok = ok and not viol
    if "d_family" in doc or "complex" in doc:
        diff = schema_mod.differential_family_from(doc, DEFAULT_U_ORDER(0))
        sq = cartan_mod._dmul(diff.as_useries(), diff.as_useries(),
                              diff.setup, diff.order)
        fails, _, _ = cartan_mod._scan_zero(sq, diff.basis, "d_eq squared")
        blocks["d_family"] = {"violations": fails, "valid": not fails}
        ok = ok and not fails
        lam_doc = schema_mod.lambda_family_from(doc, diff)
        if lam_doc is not None:
            mism = _lambda_mismatches(diff, lam_doc)
            blocks["lambda_family"] = {"violations": mism,
                                       "valid": not mism}
            ok = ok and not mism
    if "quantum_ring" in doc:
        Q = schema_mod.quantum_from(doc)
        viol = Q.validate()
        blocks["quantum_ring"] = {"violations": viol, "valid": not viol}
        ok = ok and not viol
    if "z2_data" in doc:
        Z = schema_mod.z2_from(doc)
        rep = finite2.verify_relations(Z)
        blocks["z2_data"] = {"violations": [
            f for r in rep["relations"] for f in r["failures"]],
            "valid": rep["all_hold"]}
        ok = ok and rep["all_hold"]
    if "cone" in doc:
        cmap, minus, plus = schema_mod.cone_from(doc)
        defect = minus.d.compose(cmap) - cmap.compose(plus.d)
        viol = [{"invariant": "chain map",
                 "entry": [minus.basis[t].name, plus.basis[s].name],
                 "value": str(v)}
                for (t, s), v in defect.entries.items() if v]
        blocks["cone"] = {"violations": viol, "valid": not viol}
        ok = ok and not viol
    _emit({"document": args.document, "blocks": blocks, "valid": ok})
    return PASS if ok else FAIL


def _lambda_mismatches(diff, lam_doc):
    derived = cartan_mod.lambda_components(diff, "cy")
    out = []
    n = diff.n
    for k, entries in enumerate(lam_doc):
        for t in range(n):
            for s in range(n):
                want = (derived[k][t][s] if k < len(derived)
                        else diff.setup.zero())
                got = entries.get((t, s), diff.setup.zero())
                if (want - got).has_terms():
                    out.append({
                        "invariant": "lambda = dq(d)",
                        "component": k,
                        "entry": [diff.basis[t].name, diff.basis[s].name],
                        "declared": str(got),
                        "derived": str(want),
                    })
    return out


def cmd_cohomology(args) -> int:
    doc = schema_mod.load_document(args.document)
    C = schema_mod.complex_from(doc)
    report = cx.cohomology_over_novikov_field(C, args.q_order)
    _emit(report)
    return PASS


def cmd_u_decompose(args) -> int:
    doc = schema_mod.load_document(args.document)
    diff = schema_mod.differential_family_from(
        doc, args.order or DEFAULT_U_ORDER(0))
    rep = cx.u_module_decomposition(
        diff.as_operator(), analysis_order=diff.order,
        grading=diff.grading, q_order=args.q_order)
    report = {"decomposition": rep.as_json()}
    code = PASS
    undet = sum(e["undetermined"] for e in rep.per_degree.values())
    if undet:
        code = UNDETERMINED
    if "complex" in doc:
        C = schema_mod.complex_from(doc)
        les = cx.les_consistency(C, rep, args.q_order)
        report["les_consistency"] = les
        if not les["balanced"]:
            code = FAIL
    _emit(report)
    return code


def cmd_cartan_verify(args) -> int:
    doc = schema_mod.load_document(args.document)
    data = schema_mod.cartan_from(doc, DEFAULT_U_ORDER(0))
    report = cartan_mod.identity_report(data, args.q_order)
    lam_doc = schema_mod.lambda_family_from(doc, data.diff)
    if lam_doc is not None:
        mism = _lambda_mismatches(data.diff, lam_doc)
        report["lambda_family_cross_check"] = {
            "mismatches": mism, "holds": not mism}
        report["all_hold"] = report["all_hold"] and not mism
    _emit(report)
    return PASS if report["all_hold"] else FAIL


def cmd_cartan_solve_iota(args) -> int:
    doc = schema_mod.load_document(args.document)
    diff = schema_mod.differential_family_from(doc, DEFAULT_U_ORDER(0))
    regime = args.regime or doc.get("iota_family", {}).get("regime",
                                                          "monotone")
    data, obstruction = cartan_mod.solve_iota(diff, regime,
                                              q_order=args.q_order)
    if obstruction is not None:
        _emit({"regime": regime, "solved": False,
               "obstruction": obstruction})
        return FAIL
    comps = []
    for k, op in enumerate(data.iota):
        comps.append({
            "u_order": k,
            "entries": [
                {"target": diff.basis[t].name, "source": diff.basis[s].name,
                 "value": str(v)}
                for (t, s), v in sorted(op.entries.items())
            ],
        })
    _emit({"regime": regime, "solved": True, "iota_family": comps})
    return PASS


def cmd_cartan_connection(args) -> int:
    doc = schema_mod.load_document(args.document)
    if "iota_family" in doc:
        data = schema_mod.cartan_from(doc, DEFAULT_U_ORDER(0))
    else:
        diff = schema_mod.differential_family_from(doc, DEFAULT_U_ORDER(0))
        data, obstruction = cartan_mod.solve_iota(
            diff, args.regime or "monotone", q_order=args.q_order)
        if obstruction is not None:
            _emit({"solved": False, "obstruction": obstruction})
            return FAIL
    which = "gamma_q" if args.which == "q" else "gamma_u"
    report = cartan_mod.induced_connection(data, which, args.q_order)
    _emit(report)
    return PASS if report["well_defined"] else FAIL


def cmd_quantum_check(args) -> int:
    doc = schema_mod.load_document(args.document)
    Q = schema_mod.quantum_from(doc)
    axioms = Q.validate()
    report = {"axiom_violations": axioms, "axioms_hold": not axioms}
    ok = not axioms
    if args.identity == "uq":
        rep = quantum_mod.uq_identity_check(Q, order=args.order)
        report["uq_identity"] = rep
        ok = ok and rep["holds"]
    _emit(report)
    return PASS if ok else FAIL


def cmd_quantum_obstruction(args) -> int:
    if args.ring == "Z":
        report = quantum_mod.forbidden_summand_check(args.lam, args.d, "Z")
    else:
        if not args.ring.startswith("F"):
            raise DocumentError(f"unknown ring {args.ring!r}")
        p = int(args.ring[1:])
        report = quantum_mod.forbidden_summand_check(args.lam, args.d,
                                                     "Fp", p)
    _emit(report)
    return MALFORMED if report["verdict"] == "inapplicable" else PASS


def cmd_finite2_verify(args) -> int:
    doc = schema_mod.load_document(args.document)
    Z = schema_mod.z2_from(doc)
    report = finite2.verify_relations(Z)
    _emit(report)
    return PASS if report["all_hold"] else FAIL


def cmd_finite2_assemble(args) -> int:
    doc = schema_mod.load_document(args.document)
    Z = schema_mod.z2_from(doc)
    relations = finite2.verify_relations(Z)
    if not relations["all_hold"]:
        _emit({"relations": relations,
               "error": "relation failures; not assembling"})
        return FAIL
    report = finite2.assemble_and_check(Z)
    _emit(report)
    return PASS if report["all_hold"] else FAIL


def cmd_morse_alpha1(args) -> int:
    report = morse.alpha1_winding(grid=args.grid)
    _emit(report)
    ok = report["abs_winding"] == 1 and report["residual"] < 0.01
    return PASS if ok else FAIL


def cmd_morse_additivity(args) -> int:
    deltas = [float(x) for x in args.delta.split(",") if x]
    if not deltas:
        raise DocumentError("empty delta list")
    report = morse.additivity_report(deltas)
    _emit(report)
    ok = report["monotone_decreasing"] and report["finest_error"] < 1e-3
    return PASS if ok else FAIL


def cmd_morse_weights(args) -> int:
    report = morse.weight_matrix_facts()
    _emit(report)
    ok = (report["composition_matches"] and report["in_GL2Z"]
          and report["kernel_vector_annihilated"])
    return PASS if ok else FAIL


def cmd_cone(args) -> int:
    doc = schema_mod.load_document(args.document)
    cmap, minus, plus = schema_mod.cone_from(doc)
    result = cx.mapping_cone(cmap, minus, plus, args.q_order)
    cone = result["cone"]
    report = {
        "cone_generators": [{"name": g.name, "index": g.index}
                            for g in cone.basis],
        "cone_differential": [
            {"target": cone.basis[t].name, "source": cone.basis[s].name,
             "value": str(v)}
            for (t, s), v in sorted(cone.d.entries.items())
        ],
        "quasi_isomorphisms": result["quasi_isomorphisms"],
    }
    _emit(report)
    return PASS


# -- wiring -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="eqcartan",
        description="Exact-arithmetic workbench for Novikov-coefficient "
                    "equivariant complexes and connections.")
    p.add_argument("--schema", action="store_true",
                   help="print the document JSON schema and exit")
    sub = p.add_subparsers(dest="command")

    def add_doc(sp):
        sp.add_argument("document", help="path to a workbench JSON document")

    def add_qorder(sp):
        sp.add_argument("--q-order", type=int, default=None,
                        help="q-truncation budget (default from "
                             "EQCARTAN_Q_ORDER or 64)")

    sp = sub.add_parser("validate", help="schema + invariant validation")
    add_doc(sp)
    sp.set_defaults(fn=cmd_validate)

    sp = sub.add_parser("cohomology",
                        help="Betti numbers over the Novikov field")
    add_doc(sp)
    add_qorder(sp)
    sp.set_defaults(fn=cmd_cohomology)

    sp = sub.add_parser("u-decompose",
                        help="free/torsion normal form over Lambda[[u]]")
    add_doc(sp)
    add_qorder(sp)
    sp.add_argument("--order", type=int, default=None,
                    help="u-analysis order (default: document, "
                         "EQCARTAN_U_ORDER, or K+2)")
    sp.set_defaults(fn=cmd_u_decompose)

    sp = sub.add_parser("cartan", help="Cartan calculus commands")
    csub = sp.add_subparsers(dest="subcommand", required=True)
    c1 = csub.add_parser("verify", help="identity self-test suite")
    add_doc(c1)
    add_qorder(c1)
    c1.set_defaults(fn=cmd_cartan_verify)
    c2 = csub.add_parser("solve-iota",
                         help="order-by-order contraction solver")
    add_doc(c2)
    add_qorder(c2)
    c2.add_argument("--regime", choices=["monotone", "cy"], default=None)
    c2.set_defaults(fn=cmd_cartan_solve_iota)
    c3 = csub.add_parser("connection",
                         help="induced connection matrix on cohomology")
    add_doc(c3)
    add_qorder(c3)
    c3.add_argument("--which", choices=["q", "u"], required=True)
    c3.add_argument("--regime", choices=["monotone", "cy"], default=None)
    c3.set_defaults(fn=cmd_cartan_connection)

    sp = sub.add_parser("quantum", help="quantum connection commands")
    qsub = sp.add_subparsers(dest="subcommand", required=True)
    q1 = qsub.add_parser("check", help="ring axioms + bracket identity")
    add_doc(q1)
    q1.add_argument("--identity", choices=["uq"], default="uq")
    q1.add_argument("--order", type=int, default=3,
                    help="u-order for sample expansions")
    q1.set_defaults(fn=cmd_quantum_check)
    q2 = qsub.add_parser("obstruction",
                         help="forbidden-summand classification")
    q2.add_argument("--lambda", dest="lam", required=True,
                    help="torsion eigenvalue (exact rational or residue)")
    q2.add_argument("--d", type=int, required=True,
                    help="torsion exponent (>= 1)")
    q2.add_argument("--ring", default="Z", help="Z or Fp (e.g. F5)")
    q2.set_defaults(fn=cmd_quantum_obstruction)

    sp = sub.add_parser("finite2", help="characteristic-2 finite analogue")
    fsub = sp.add_subparsers(dest="subcommand", required=True)
    f1 = fsub.add_parser("verify", help="operator relation check")
    add_doc(f1)
    f1.set_defaults(fn=cmd_finite2_verify)
    f2 = fsub.add_parser("assemble",
                         help="assemble d_eq, Gamma_q mod h^3 and certify")
    add_doc(f2)
    f2.set_defaults(fn=cmd_finite2_assemble)

    sp = sub.add_parser("morse", help="projective-space flow numerics")
    msub = sp.add_subparsers(dest="subcommand", required=True)
    m1 = msub.add_parser("alpha1", help="winding of the transport circle map")
    m1.add_argument("--grid", type=int, default=64)
    m1.set_defaults(fn=cmd_morse_alpha1)
    m2 = msub.add_parser("additivity",
                         help="near-broken trajectory additivity")
    m2.add_argument("--delta", default="1e-2,1e-3,1e-4",
                    help="comma-separated breaking distances")
    m2.set_defaults(fn=cmd_morse_additivity)
    m3 = msub.add_parser("weights", help="exact integer weight facts")
    m3.set_defaults(fn=cmd_morse_weights)

    sp = sub.add_parser("cone", help="three-block mapping cone")
    add_doc(sp)
    add_qorder(sp)
    sp.set_defaults(fn=cmd_cone)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.schema:
        _emit(schema_mod.SCHEMA)
        return PASS
    if not getattr(args, "fn", None):
        parser.print_help()
        return MALFORMED
    try:
        try:
            return args.fn(args)
        except DocumentError as exc:
            _emit({"error": str(exc), "kind": "malformed input"})
            return MALFORMED
        except UndeterminedError as exc:
            _emit({"error": str(exc), "kind": "undetermined at truncation"})
            return UNDETERMINED
        except NovikovError as exc:
            _emit({"error": str(exc), "kind": "verified false"})
            return FAIL
    except BrokenPipeError:
        return PASS


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
