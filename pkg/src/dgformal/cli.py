"""Command line: ``dgformal <command> INPUT [options]``.

INPUT is a path, ``-`` for standard input, or ``example:NAME`` for a corpus
entry.  Exit status: 0 success, 1 negative verdict, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import documents as docs
from .complexes import cochain_algebra, example_corpus, run_corpus
from .dga import cup_length, induced_cohomology_algebra, reduce_if_unital, validate
from .errors import DGFormalError, MalformedInputError, NotApplicableError
from .formality import DEFAULT_CAP, certify_formality, theorem1_pipeline
from .linalg import ONE
from .massey import detection_sign, higher_massey_unique, massey_vanishes, triple_massey
from .transfer import transfer

OK, NEGATIVE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# input

def _find_example(name):
    for e in example_corpus():
        if e.name == name:
            return e
    raise UsageError(f"no corpus entry named {name!r}")


def load_input(spec: str, basepoint=None):
    """Returns (algebra, complex or None)."""
    if spec.startswith("example:"):
        e = _find_example(spec[len("example:"):])
        if e.complex is not None:
            X = e.complex()
            if basepoint is not None:
                X = docs.complex_from_document(docs.complex_to_document(X), basepoint)
            return cochain_algebra(X, name=e.name), X
        return e.algebra(), None
    text = sys.stdin.read() if spec == "-" else _read(spec)
    kind, doc = docs.read_document(text)
    if kind == "complex":
        X = docs.complex_from_document(doc, basepoint)
        return cochain_algebra(X, name=doc.get("name", "")), X
    return docs.algebra_from_document(doc), None


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def parse_class(text: str, H):
    """A class is a basis name, ``0@DEGREE``, or a JSON object {name: scalar}."""
    text = text.strip()
    if text.startswith("0@"):
        try:
            return {}, int(text[2:])
        except ValueError:
            raise UsageError(f"bad zero class {text!r}") from None
    if text.startswith("{"):
        raw = docs.load_json(text)
        vec = {}
        for name, c in raw.items():
            vec[_class_index(H, name)] = docs.parse_scalar(c, name)
        vec = {k: c for k, c in vec.items() if c}
        return vec, H.degree_of(vec) if vec else None
    k = _class_index(H, text)
    return {k: ONE}, H.degrees[k]


def _class_index(H, name):
    try:
        return H.index(name)
    except MalformedInputError:
        if not name.startswith("["):
            try:
                return H.index(f"[{name}]")
            except MalformedInputError:
                pass
        raise UsageError(f"unknown class {name!r}; available: {', '.join(H.names)}") from None


# --------------------------------------------------------------------------
# reports

def vec_doc(space, v):
    return {space.names[k]: docs.scalar_to_str(c) for k, c in sorted(v.items())}


def emit(report: dict, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "machine":
        out.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
        return
    for line in report.get("lines", []):
        out.write(line + "\n")


def _machine(report):
    return {k: v for k, v in report.items() if k != "lines"}


# --------------------------------------------------------------------------
# commands

def cmd_validate(args):
    A, _ = load_input(args.input, args.basepoint)
    rep = validate(A)
    lines = [f"{A.name or 'algebra'}: " + ("valid" if rep.ok else "INVALID")]
    for ident, witness, detail in rep.failures:
        lines.append(f"  {ident} fails at {', '.join(witness)}" + (f": {detail}" if detail else ""))
    report = {"command": "validate", "valid": rep.ok,
              "failures": [{"identity": i, "witness": list(w), "detail": d}
                           for i, w, d in rep.failures], "lines": lines}
    return report, OK if rep.ok else NEGATIVE


def cmd_cohomology(args):
    A, _ = load_input(args.input, args.basepoint)
    HA = induced_cohomology_algebra(A)
    H, c = HA.H, HA.contraction
    dims = {d: H.dim(d) for d in H.support}
    products = [[H.names[a], H.names[b], vec_doc(H, v)]
                for (a, b), v in sorted(HA.product.entries.items()) if v]
    cl = cup_length(HA)
    lines = ["dims: " + ", ".join(f"H^{d}={n}" for d, n in dims.items()) if dims else "dims: all zero",
             f"cup length: {cl}"]
    reps = {}
    for k in range(H.dim()):
        reps[H.names[k]] = vec_doc(A.space, c.i.columns.get(k, {}))
        lines.append(f"  {H.names[k]} (deg {H.degrees[k]}) = {A.space.format(c.i.columns.get(k, {}))}")
    for a, b, v in products:
        if H.degrees[H.index(a)] > 0 and H.degrees[H.index(b)] > 0:
            lines.append(f"  {a} * {b} = {H.format({H.index(n): docs.parse_scalar(x, n) for n, x in v.items()})}")
    report = {"command": "cohomology", "dims": {str(d): n for d, n in dims.items()},
              "representatives": reps, "products": products, "cup_length": cl,
              "contraction": {k: ok for k, ok in c.identities().items()}, "lines": lines}
    return report, OK


def cmd_transfer(args):
    if args.cap is not None and args.cap < 2:
        raise UsageError("--cap must be at least 2")
    A, _ = load_input(args.input, args.basepoint)
    R = reduce_if_unital(A)
    tr = transfer(R, arity_cap=args.cap)
    args.cap = tr.arity_cap
    H = tr.contraction.H
    entries = []
    lines = [f"transfer to arity {args.cap} on the {'reduced' if R.reduced else 'given'} algebra;"
             " Stasheff and morphism identities verified"]
    for n in range(3, args.cap + 1):
        for key, v in sorted(tr.m(n).entries.items()):
            entries.append({"n": n, "inputs": [H.names[k] for k in key], "value": vec_doc(H, v)})
            lines.append(f"  m_{n}({', '.join(H.names[k] for k in key)}) = {H.format(v)}")
    if not entries:
        lines.append("  no nonzero m_n for n >= 3")
    report = {"command": "transfer", "cap": args.cap, "reduced": R.reduced, "verified": tr.verified,
              "m2": [[H.names[a], H.names[b], vec_doc(H, v)]
                     for (a, b), v in sorted(tr.m(2).entries.items())],
              "entries": entries, "lines": lines}
    return report, OK


def cmd_massey(args):
    A, _ = load_input(args.input, args.basepoint)
    R = reduce_if_unital(A)
    HA = induced_cohomology_algebra(R)
    H = HA.H
    parsed = [parse_class(t, H) for t in args.classes]
    n = len(parsed)
    if args.n is not None and args.n != n:
        raise UsageError(f"--n {args.n} but {n} classes given")
    if n < 3:
        raise UsageError("a Massey product needs at least 3 classes")
    classes = [v for v, _ in parsed]
    degrees = [d for _, d in parsed]
    report = {"command": "massey", "classes": [vec_doc(H, v) for v in classes],
              "degrees": degrees, "n": n}
    names = ", ".join(H.format(v) for v in classes)
    if n == 3:
        out = triple_massey(R, *classes, contraction=HA.contraction, degrees=degrees)
    else:
        try:
            tr = transfer(R, HA.contraction, arity_cap=n)
            out = higher_massey_unique(R, tr, classes, degrees=degrees)
        except NotApplicableError as e:
            report.update(kind="not-applicable", reason=str(e),
                          lines=[f"<{names}>: not applicable: {e}"])
            return report, NEGATIVE
    report["kind"] = out.kind
    report["epsilon"] = out.epsilon
    report["detection_sign"] = detection_sign(out.degrees)
    if out.kind == "obstructed":
        pos, _, cls = out.obstruction
        report["obstruction"] = {"position": list(pos), "class": vec_doc(H, cls)}
        report["lines"] = [f"<{names}>: undefined, the product at {pos} has class {H.format(cls)} ≠ 0"]
        return report, NEGATIVE
    vanishes = massey_vanishes(out)
    report["value"] = vec_doc(H, out.value)
    report["indeterminacy"] = [vec_doc(H, v) for v in out.indeterminacy]
    report["vanishes"] = vanishes
    coset = H.format(out.value)
    if out.indeterminacy:
        coset += " + span{" + ", ".join(H.format(v) for v in out.indeterminacy) + "}"
    report["lines"] = [f"<{names}> = {coset}",
                       "vanishes (contains 0)" if vanishes else "nonvanishing"]
    return report, OK


def cmd_formality(args):
    A, _ = load_input(args.input, args.basepoint)
    report = {"command": "formality", "pipeline": args.pipeline, "cap": args.cap}
    try:
        cert = (theorem1_pipeline if args.pipeline == "theorem1" else certify_formality)(A, args.cap)
    except NotApplicableError as e:
        report.update(verdict="not-applicable", reason=str(e),
                      lines=[f"not applicable: {e}"])
        return report, NEGATIVE
    report.update(verdict=cert.verdict, cap=cert.cap, bound_is_absolute=cert.bound_is_absolute)
    lines = [f"verdict: {cert.verdict} (cap {cert.cap}"
             + (", bound is absolute)" if cert.bound_is_absolute else ", not an absolute bound)")]
    if cert.witness:
        w = {k: v for k, v in cert.witness.items() if k != "key"}
        report["witness"] = w
        lines.append(f"  witness: m_{w['n']}({', '.join(w['tuple'])}) ≠ 0; {w['reason']}")
    if cert.trace:
        report["trace"] = cert.trace
        for step in cert.trace:
            lines.append(f"  n={step['n']}: {step['tuples']} tuples, "
                         + ("all Massey products vanish" if step["vanishing"] else "nonvanishing"))
    report["lines"] = lines
    return report, OK if cert.verdict == "formal-up-to-cap" else NEGATIVE


def cmd_corpus(args):
    entries = example_corpus()
    if args.filter is not None:
        if not args.filter.strip():
            raise UsageError("empty filter")
        entries = [e for e in entries if args.filter.lower() in e.name.lower()]
        if not entries:
            raise UsageError(f"no corpus entry matches {args.filter!r}")
    if not args.run_all:
        lines = [f"{e.name}" + (f"  ({e.note})" if e.note else "") for e in entries]
        return {"command": "corpus", "entries": [e.name for e in entries], "lines": lines}, OK
    results = run_corpus(entries, args.cap)
    lines, out = [], []
    for name, bad in results:
        lines.append(f"{'PASS' if not bad else 'FAIL'}  {name}")
        for k, (want, got) in bad.items():
            lines.append(f"      {k}: expected {want!r}, got {got!r}")
        out.append({"name": name, "ok": not bad,
                    "mismatches": {k: {"expected": repr(w), "got": repr(g)} for k, (w, g) in bad.items()}})
    ok = all(r["ok"] for r in out)
    return {"command": "corpus", "results": out, "ok": ok, "lines": lines}, OK if ok else NEGATIVE


def cmd_export(args):
    e = _find_example(args.name)
    if e.complex is not None and not args.algebra:
        doc = docs.complex_to_document(e.complex())
    else:
        doc = docs.algebra_to_document(e.algebra() if e.complex is None
                                       else cochain_algebra(e.complex(), name=e.name))
    sys.stdout.write(docs.dumps(doc) + "\n")
    return None, OK


# --------------------------------------------------------------------------

def build_parser():
    # global options are accepted before or after the command name
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "machine"), default=argparse.SUPPRESS)
    common.add_argument("--basepoint", default=argparse.SUPPRESS,
                        help="basepoint vertex for complex documents")
    p = argparse.ArgumentParser(prog="dgformal", description=__doc__.split("\n")[0],
                                parents=[common])
    # no set_defaults here: the actions are shared with the subparsers
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    def with_input(name, fn, help):
        sp = add(name, help=help)
        sp.add_argument("input")
        sp.set_defaults(fn=fn)
        return sp

    with_input("validate", cmd_validate, "check dg-algebra identities")
    with_input("cohomology", cmd_cohomology, "cohomology, products and cup length")
    sp = with_input("transfer", cmd_transfer, "transferred A-infinity structure")
    sp.add_argument("--cap", type=int, default=None,
                    help="highest arity (default: min(8, degree bound))")
    sp = with_input("massey", cmd_massey, "Massey products of classes")
    sp.add_argument("classes", nargs="+")
    sp.add_argument("--n", type=int, default=None)
    sp = with_input("formality", cmd_formality, "formality certificate")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.add_argument("--pipeline", choices=("theorem1", "transfer"), default="transfer")
    sp = add("corpus", help="list or check the example corpus")
    sp.add_argument("--run-all", action="store_true")
    sp.add_argument("--filter", default=None)
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
    sp.set_defaults(fn=cmd_corpus)
    sp = add("export", help="print a corpus entry as a document")
    sp.add_argument("name")
    sp.add_argument("--algebra", action="store_true", help="export the cochain algebra of a complex")
    sp.set_defaults(fn=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.format = getattr(args, "format", "human")
    args.basepoint = getattr(args, "basepoint", None)
    try:
        report, code = args.fn(args)
    except (UsageError, MalformedInputError) as e:
        sys.stderr.write(f"error: {e}\n")
        return USAGE
    except DGFormalError as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return NEGATIVE
    if report is not None:
        emit(report if args.format == "human" else _machine(report), args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
