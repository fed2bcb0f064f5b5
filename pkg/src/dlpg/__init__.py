"""Decision procedure for equations of distributive lattice-ordered pregroups."""

from .delta import DEFAULT_CAP, DeltaTemplate, TemplateTooLarge, build_template
from .normalize import to_intentional
from .search import Verdict, decide
from .term import IntentionalEquation, ParseError, parse_equation, parse_term


def decide_text(text: str, cap: int | None = DEFAULT_CAP, **kwargs) -> Verdict:
    """Parse, normalize and decide an equation given as text."""
    s, rel, t = parse_equation(text)
    eps, _ = to_intentional(s, rel, t)
    return decide(eps, cap=cap, **kwargs)


__all__ = [
    "DEFAULT_CAP",
    "DeltaTemplate",
    "IntentionalEquation",
    "ParseError",
    "TemplateTooLarge",
    "Verdict",
    "build_template",
    "decide",
    "decide_text",
    "parse_equation",
    "parse_term",
    "to_intentional",
]
