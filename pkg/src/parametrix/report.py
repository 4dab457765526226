"""Serializable report documents (schema ``report-v1``) and their text rendering."""

from __future__ import annotations

import json
from importlib import resources

from .analysis import Parametrization, TestReport
from .diffop import OperatorMatrix, render_combination
from .janet import InvolutiveSystem, full_torsion_check
from .poly import DEGREVLEX, MonomialOrder

SCHEMA_VERSION = "report-v1"


def load_schema() -> dict:
    text = resources.files("parametrix").joinpath("schemas/report-v1.json").read_text()
    return json.loads(text)


def operator_doc(A: OperatorMatrix, order: MonomialOrder = DEGREVLEX) -> dict:
    return {
        "shape": [A.nrows, A.ncols],
        "unknowns": list(A.unknown_names),
        "equations": list(A.equation_names),
        "entries": A.to_strings(order),
        "rows": A.render_rows(order),
        "order": A.order,
    }


def _columns(P: Parametrization, order) -> dict:
    """``unknown -> expression in the potentials``."""
    op = P.operator
    return {
        name: render_combination(row, P.potential_names, order)
        for name, row in zip(op.equation_names, op.entries)
    }


def parametrization_doc(P: Parametrization, order=DEGREVLEX) -> dict:
    return {
        "potentials": list(P.potential_names),
        "count": P.count,
        "order": P.order,
        "formulas": _columns(P, order),
    }


def new_document(command: str, source: str, order: MonomialOrder) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "source": source,
        "monomial_order": order.kind,
        "verdict": None,
        "operators": {},
        "parametrization": None,
        "torsion": [],
        "counts": {},
        "timing": {},
    }


def five_step_document(report: TestReport, source: str, order=DEGREVLEX) -> dict:
    doc = new_document("test", source, order)
    names = report.input.unknown_names
    doc["verdict"] = {"torsion_free": report.torsion_free}
    doc["operators"] = {k: operator_doc(v, order) for k, v in report.operators().items()}
    P = Parametrization(
        report.candidate_parametrization,
        report.candidate_parametrization.unknown_names,
        report.candidate_parametrization.order,
    )
    doc["parametrization"] = parametrization_doc(P, order)
    doc["parametrization"]["parametrizes"] = "M" if report.torsion_free else "M/t(M)"
    doc["torsion"] = [
        {
            "element": render_combination(c.element.components, names, order),
            "annihilator": None if c.annihilator is None else c.annihilator.to_str(order),
            "status": "exhausted" if c.annihilator is None else "annihilated",
        }
        for c in report.torsion
    ]
    doc["counts"] = {
        "cc_of_adjoint_rows": report.cc_of_adjoint.nrows,
        "cc_of_candidate_rows": report.cc_of_candidate.nrows,
        "potentials": P.count,
        "torsion_certificates": len(report.torsion),
        "orders": dict(report.orders),
    }
    doc["timing"] = {k: round(v, 6) for k, v in report.timing.items()}
    return doc


def involution_document(sys: InvolutiveSystem, source: str, order=DEGREVLEX) -> dict:
    doc = new_document("involution", source, order)
    names = sys.unknown_names
    doc["operators"] = {"completed": operator_doc(sys.operator(), order)}
    doc["involution"] = {
        "involutive": sys.involutive,
        "order": sys.order,
        "permutation": None if sys.permutation is None else [p + 1 for p in sys.permutation],
        "coordinate_change": [list(r) for r in sys.coordinate_change],
        "equations": [
            {
                "equation": e.render(names),
                "order": e.order,
                "class": e.klass,
                "multiplicative": sorted(e.multiplicative),
            }
            for e in sys.equations
        ],
        "class_counts": {str(k): v for k, v in sorted(sys.class_counts().items())},
        "full_torsion": full_torsion_check(sys),
        "added": [render_combination(r.components, names, order) for r in sys.added],
    }
    doc["counts"] = {"equations": len(sys.equations)}
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


# -- text ------------------------------------------------------------------------


def _matrix_text(title: str, op: dict) -> list:
    r, m = op["shape"]
    lines = [f"{title}  [{r} x {m}, order {op['order']}]"]
    if not op["rows"]:
        lines.append("    (no rows)")
    for name, row in zip(op["equations"], op["rows"]):
        lines.append(f"    {name}: {row} = 0")
    return lines


def render_text(doc: dict) -> str:
    out = [f"{doc['command']}: {doc['source']}"]
    if doc["command"] == "gallery":
        for e in doc["gallery"]:
            rng = f"n={e['n_min']}" if e["n_min"] == e["n_max"] else f"n={e['n_min']}..{e['n_max']}"
            params = ", ".join(e["params"]) or "-"
            out.append(f"  {e['name']:<17} {rng:<8} params: {params:<4} {e['description']}")
            for v in e["expected"]:
                verdict = {True: "torsion-free", False: "torsion", None: "unknown"}[v["torsion_free"]]
                out.append(f"      {v['when']:<18} {verdict:<13} ({v['provenance']})")
        return "\n".join(out) + "\n"
    if doc["verdict"] is not None:
        out.append("verdict: " + ("torsion-free" if doc["verdict"]["torsion_free"] else "torsion"))
    for name, op in doc["operators"].items():
        out.extend(_matrix_text(name, op))
    P = doc["parametrization"]
    if P is not None:
        out.append(
            f"parametrization: {P['count']} potential(s) {', '.join(P['potentials'])}, order {P['order']}"
        )
        for unknown, expr in P["formulas"].items():
            out.append(f"    {unknown} = {expr}")
    for c in doc["torsion"]:
        if c["annihilator"] is None:
            out.append(f"torsion element: {c['element']}, annihilator search exhausted")
        else:
            out.append(f"torsion element: {c['element']}, annihilator {c['annihilator']}")
    inv = doc.get("involution")
    if inv:
        if inv["permutation"] is not None:
            out.append("permutation: " + " ".join(str(p) for p in inv["permutation"]))
        else:
            out.append("coordinate change: " + str(inv["coordinate_change"]))
        for e in inv["equations"]:
            mult = ",".join(str(j) for j in e["multiplicative"]) or "-"
            out.append(f"    {e['equation']} = 0    order {e['order']}, class {e['class']}, multiplicative {mult}")
        counts = "; ".join(f"class {k}: {v}" for k, v in sorted(inv["class_counts"].items(), reverse=True))
        out.append(f"classes: {counts}")
        out.append(f"full torsion: {'yes' if inv['full_torsion'] else 'no'}")
    if doc["counts"]:
        out.append("counts: " + json.dumps(doc["counts"], sort_keys=True))
    return "\n".join(out) + "\n"
