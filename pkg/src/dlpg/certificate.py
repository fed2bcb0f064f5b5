"""Certificate JSON: emission and layered re-verification.

``check_certificate`` trusts nothing in the document.  It rebuilds the
template from the intentional form and then checks, in order, the
surjection, the diagram it induces, and the concrete witness functions.
Each layer has its own exit code.
"""

from __future__ import annotations

from dataclasses import dataclass

from .delta import DeltaTemplate, TemplateTooLarge, build_template
from .diagram import Diagram, fails_in
from .normalize import conjunct_renamings
from .search import Certificate, CompatibleSurjection, fails_at_one, induced_diagram, surjection_defect
from .term import IntentionalEquation, Term, parse_equation, parse_word, print_equation, variables
from .zfunc import FzFunc, find_failure, verify_certificate

ACCEPT = 0
SCHEMA = 3
SURJECTION_LAYER = 4
DIAGRAM_LAYER = 5
WITNESS_LAYER = 6


@dataclass
class CheckResult:
    code: int
    message: str

    @property
    def ok(self) -> bool:
        return self.code == ACCEPT


def original_witness(s: Term, rel: str, t: Term, eps: IntentionalEquation, witness: list[FzFunc]):
    """A valuation of the original variables violating ``s rel t``, with a point.

    Some conjunct of the normalized form already fails under the witness;
    its renaming tells which witness function each original variable gets.
    """
    by_name = dict(zip(eps.names, witness))
    names = list(dict.fromkeys(variables(s) + variables(t)))
    for mapping in conjunct_renamings(s, rel, t):
        valuation = {n: by_name.get(mapping.get(n, ""), FzFunc.identity()) for n in names}
        p = find_failure(s, rel, t, valuation)
        if p is not None:
            return valuation, p
    return None


def certificate_json(cert: Certificate, source: tuple[Term, str, Term] | None = None) -> dict:
    eps = cert.surjection.template.equation
    out = {
        "equation": print_equation(*source) if source else str(eps),
        "intentional": eps.to_json(),
        "q": cert.q,
        "rank": cert.surjection.rank_json(),
        "diagram": cert.diagram.to_json(),
        "failure_point": cert.failure_point,
        "witness": [f.to_json(n) for n, f in zip(eps.names, cert.witness)],
    }
    if source is not None:
        found = original_witness(*source, eps, cert.witness)
        if found is not None:
            valuation, p = found
            out["original_witness"] = {
                "valuation": [f.to_json(n) for n, f in valuation.items()],
                "point": p,
            }
    return out


def _schema(data) -> tuple[IntentionalEquation, dict, int, Diagram, list[FzFunc]]:
    if not isinstance(data, dict):
        raise ValueError("certificate must be a JSON object")
    for key in ("intentional", "q", "rank", "diagram", "failure_point", "witness"):
        if key not in data:
            raise ValueError(f"missing field {key!r}")
    eps = IntentionalEquation.from_json(data["intentional"])
    if not isinstance(data["q"], int) or not isinstance(data["failure_point"], int):
        raise ValueError("q and failure_point must be integers")
    ranks = {}
    for entry in data["rank"]:
        word_text, r = entry
        if not isinstance(r, int):
            raise ValueError("ranks must be integers")
        ranks[parse_word(word_text, eps.names)] = r
    diagram = Diagram.from_json(data["diagram"])
    witness_by_name = {w["name"]: FzFunc.from_json(w) for w in data["witness"]}
    if set(witness_by_name) != set(eps.names):
        raise ValueError("witness must give one function per variable")
    return eps, ranks, data["failure_point"], diagram, [witness_by_name[n] for n in eps.names]


def check_certificate(data, cap: int | None = None) -> CheckResult:
    try:
        eps, ranks, p, diagram, witness = _schema(data)
    except (ValueError, KeyError, TypeError) as exc:
        return CheckResult(SCHEMA, f"schema: {exc}")

    try:
        template: DeltaTemplate = build_template(eps, cap)
    except TemplateTooLarge as exc:
        return CheckResult(SCHEMA, f"schema: {exc}")
    if set(ranks) != set(template.elements):
        return CheckResult(SURJECTION_LAYER, "surjection: rank is not defined exactly on the template")
    s = CompatibleSurjection(template, tuple(ranks[w] for w in template.elements))
    defect = surjection_defect(s)
    if defect is not None:
        return CheckResult(SURJECTION_LAYER, f"surjection: {defect}")
    if data["q"] != s.q:
        return CheckResult(SURJECTION_LAYER, "surjection: q is not the chain size")
    if p != s.failure_point:
        return CheckResult(SURJECTION_LAYER, "surjection: failure point is not the rank of 1")
    if not fails_at_one(s):
        return CheckResult(SURJECTION_LAYER, "surjection: some word is not ranked below 1")

    expected = induced_diagram(s)
    if diagram.chain != expected.chain or diagram.funcs != expected.funcs:
        return CheckResult(DIAGRAM_LAYER, "diagram: not the diagram induced by the ranks")
    if not fails_in(diagram, eps, p):
        return CheckResult(DIAGRAM_LAYER, "diagram: equation does not fail at the failure point")

    if not verify_certificate(eps, witness, p):
        return CheckResult(WITNESS_LAYER, "witness: some word does not evaluate below the failure point")
    ow = data.get("original_witness")
    if ow is not None:
        try:
            src = parse_equation(data["equation"])
            valuation = {w["name"]: FzFunc.from_json(w) for w in ow["valuation"]}
            q = find_failure(*src, valuation)
        except (ValueError, KeyError, TypeError) as exc:
            return CheckResult(SCHEMA, f"schema: original witness: {exc}")
        if q is None:
            return CheckResult(WITNESS_LAYER, "witness: original equation holds under the given valuation")
    return CheckResult(ACCEPT, "accepted")
