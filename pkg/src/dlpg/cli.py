"""Command-line front end.

Exit codes: ``decide`` returns 0 for VALID, 1 for INVALID and 2 on error;
``check`` returns 0 on accept and a layer-specific code (3-6) on reject;
``fuzz`` returns 1 when it finds a counterexample and 0 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Iterable, TextIO

from .certificate import ACCEPT, SCHEMA, certificate_json, check_certificate
from .delta import DEFAULT_CAP, TemplateTooLarge, build_template
from .normalize import to_intentional
from .search import decide
from .term import ParseError, parse_equation, parse_term, print_equation, print_term
from .zfunc import FzFunc, eval_term, falsify, verify_certificate

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_ERROR = 2


@dataclass
class RunConfig:
    template_cap: int = DEFAULT_CAP
    fuzz_budget: int = 10_000
    seed: int = 0
    output: str = "text"
    threads: int = 1

    def __post_init__(self):
        if self.template_cap <= 0 or self.fuzz_budget <= 0 or self.threads <= 0:
            raise ValueError("cap, budget and threads must be positive")


def _emit(out: TextIO, cfg: RunConfig, payload: dict, text: str) -> None:
    if cfg.output == "json":
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        out.write(text + "\n")


def cmd_decide(text: str, cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    try:
        src = parse_equation(text)
        eps, _ = to_intentional(*src)
        verdict = decide(eps, cap=cfg.template_cap, threads=cfg.threads)
    except (ParseError, TemplateTooLarge, ValueError) as exc:
        _emit(out, cfg, {"equation": text, "error": str(exc)}, f"ERROR: {text}: {exc}")
        return EXIT_ERROR
    shown = print_equation(*src)
    if verdict.valid:
        _emit(out, cfg, {"equation": shown, "verdict": "VALID"}, f"VALID: {shown}")
        return EXIT_VALID
    cert = verdict.certificate
    if not verify_certificate(eps, cert.witness, cert.failure_point):
        # would mean a bug between search and witness construction
        _emit(out, cfg, {"equation": shown, "error": "witness failed to verify"}, f"ERROR: {shown}: witness failed to verify")
        return EXIT_ERROR
    doc = certificate_json(cert, src)
    if cfg.output == "json":
        _emit(out, cfg, {"equation": shown, "verdict": "INVALID", "certificate": doc}, "")
    else:
        lines = [f"INVALID: {shown}", f"  intentional form: {eps}", f"  chain size q = {cert.q}, failure point {cert.failure_point}"]
        lines += [f"  rank({w}) = {r}" for w, r in doc["rank"]]
        lines += [f"  witness {w['name']}: lo={w['lo']} vals={w['vals']}" for w in doc["witness"]]
        if "original_witness" in doc:
            lines.append(f"  original equation fails at {doc['original_witness']['point']}")
        out.write("\n".join(lines) + "\n")
    return EXIT_INVALID


def cmd_check(data, cfg: RunConfig | None = None, out: TextIO = sys.stdout) -> int:
    cfg = cfg or RunConfig()
    result = check_certificate(data)
    _emit(out, cfg, {"code": result.code, "message": result.message}, ("ACCEPT" if result.ok else "REJECT") + f": {result.message}")
    return result.code


def cmd_fuzz(text: str, cfg: RunConfig, out: TextIO = sys.stdout) -> int:
    try:
        s, rel, t = parse_equation(text)
    except ParseError as exc:
        _emit(out, cfg, {"equation": text, "error": str(exc)}, f"ERROR: {text}: {exc}")
        return EXIT_ERROR
    found = falsify(s, rel, t, budget=cfg.fuzz_budget, seed=cfg.seed)
    shown = print_equation(s, rel, t)
    if found is None:
        _emit(out, cfg, {"equation": shown, "found": False, "budget": cfg.fuzz_budget},
              f"no counterexample in {cfg.fuzz_budget} samples: {shown}")
        return 0
    valuation, p = found
    payload = {
        "equation": shown,
        "found": True,
        "budget": cfg.fuzz_budget,
        "point": p,
        "valuation": [f.to_json(n) for n, f in valuation.items()],
    }
    text_out = f"counterexample at {p}: " + ", ".join(f"{n}=lo {f.lo} vals {list(f.vals)}" for n, f in valuation.items())
    _emit(out, cfg, payload, text_out)
    return 1


def parse_valuation(data) -> dict[str, FzFunc]:
    """Accept a list of function objects or a ``name -> object`` mapping."""
    if isinstance(data, dict):
        return {n: FzFunc.from_json(f) for n, f in data.items()}
    return {f["name"]: FzFunc.from_json(f) for f in data}


def cmd_eval(term_text: str, valuation, point: int, out: TextIO = sys.stdout) -> int:
    value = eval_term(parse_term(term_text), parse_valuation(valuation), point)
    out.write(f"{value}\n")
    return value


def cmd_normalize(text: str, with_trace: bool = False) -> dict:
    eps, trace = to_intentional(*parse_equation(text))
    doc = {"intentional": eps.to_json(), "form": str(eps)}
    if with_trace:
        doc["trace"] = [{"rule": r, "before": print_term(a), "after": print_term(b)} for r, a, b in trace.steps]
    return doc


def _equations(arg: str | None, stdin: TextIO) -> Iterable[str]:
    if arg is not None and arg != "-":
        yield arg
        return
    for line in stdin:
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def _batch(fn, args, cfg, stdin) -> int:
    codes = [fn(e, cfg) for e in _equations(args.equation, stdin)]
    if not codes:
        return EXIT_VALID
    if EXIT_ERROR in codes:
        return EXIT_ERROR
    return max(codes)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dlpg", description="Decide equations of distributive lattice-ordered pregroups.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum template size")
    common.add_argument("--budget", type=int, default=10_000, help="fuzzing sample count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1)
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name, helptext in (("decide", "decide an equation (stdin: one per line)"),
                           ("fuzz", "search F_fs(Z) for a counterexample"),
                           ("normalize", "print the intentional form"),
                           ("template", "dump the search template")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("equation", nargs="?", help="equation text; omit or '-' to read stdin")
        if name == "normalize":
            p.add_argument("--trace", action="store_true")

    p = sub.add_parser("check", parents=[common], help="verify a certificate")
    p.add_argument("certificate", nargs="?", default="-", help="JSON file, or '-' for stdin")

    p = sub.add_parser("eval", parents=[common], help="evaluate a term at a point")
    p.add_argument("term")
    p.add_argument("valuation", help="JSON text or @file")
    p.add_argument("point", type=int)
    return ap


def _load_json(text: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return json.load(fh)
    return json.loads(text)


def main(argv: list[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    out = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.cap, args.budget, args.seed, "json" if args.json else "text", args.threads)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    if args.cmd == "decide":
        return _batch(lambda e, c: cmd_decide(e, c, out), args, cfg, stdin)
    if args.cmd == "fuzz":
        return _batch(lambda e, c: cmd_fuzz(e, c, out), args, cfg, stdin)
    if args.cmd == "check":
        try:
            if args.certificate == "-":
                data = json.load(stdin)
            else:
                with open(args.certificate) as fh:
                    data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            out.write(f"REJECT: schema: {exc}\n")
            return SCHEMA
        # accept the full decide --json record as well as a bare certificate
        if isinstance(data, dict) and "certificate" in data:
            data = data["certificate"]
        return cmd_check(data, cfg, out)
    if args.cmd == "eval":
        try:
            cmd_eval(args.term, _load_json(args.valuation), args.point, out)
        except (ParseError, ValueError, KeyError, TypeError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
        return 0
    code = 0
    for e in _equations(args.equation, stdin):
        try:
            if args.cmd == "normalize":
                doc = cmd_normalize(e, args.trace)
            else:
                s, rel, t = parse_equation(e)
                doc = build_template(to_intentional(s, rel, t)[0], cfg.template_cap).to_json()
        except (ParseError, TemplateTooLarge, ValueError) as exc:
            print(f"error: {e}: {exc}", file=sys.stderr)
            code = EXIT_ERROR
            continue
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
