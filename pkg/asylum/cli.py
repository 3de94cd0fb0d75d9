"""
Command-line surface.

Every command prints a plain-text report ending in `VERDICT: pass|fail <n>`
and exits 0 on pass, 1 on fail and 2 when the engine raises an error.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

import pandas as pd

from asylum.audit.manipulation import DOMAINS, audit_nom, audit_strategy_proofness
from asylum.audit.properties import (
    is_substitutable,
    is_unilaterally_substitutable,
    pinned_completion_witness,
    satisfies_IRC,
    satisfies_LAD,
)
from asylum.audit.stability import SELECTIONS, StableSelecting, enumerate_stable, is_stable
from asylum.bundled import example_names, resolve_name
from asylum.choice import ChoiceRule, build_trace, check_axioms, check_trace_invariants, rules_for, unique_axiom_rule_oracle
from asylum.completion import is_completion_on
from asylum.config import get_settings
from asylum.errors import AsylumMatchError
from asylum.generator import PROFILES, generate_instance, parse_dims
from asylum.instance import full_contract_universe, listed_contract_universe
from asylum.instance_io import load_instance, serialize_instance, write_instance
from asylum.mechanism import ORDER_POLICIES, CumulativeOffer, order_invariance, run_with_rule_variants
from asylum.models import Contract, Instance, parse_wait
from asylum.reports import (
    allocation_table,
    audit_report_table,
    choice_trace_table,
    manipulation_table,
    mechanism_trace_table,
    verdict_line,
)
from asylum.reproduce import reproduce
from asylum.schemas import AuditReport

logger = logging.getLogger(__name__)

CHOICE_PROPERTIES = ("sub", "usub", "lad", "irc", "axioms", "unique", "completion", "pinned-sub", "pinned-lad")
MECHANISMS = ("cumulative-offer",) + SELECTIONS


def _load(args) -> Instance:
    return load_instance(args.file, strict=not args.lenient)


def _finish(passed: bool, count: int) -> int:
    print(verdict_line(passed, count))
    return 0 if passed else 1


def _report(report: AuditReport) -> int:
    print(audit_report_table(report))
    return _finish(report.passed, len(report.witnesses))


def _contract(text: str) -> Contract:
    try:
        seeker, state, wait = text.split(":")
        return Contract(seeker, state, parse_wait(wait))
    except ValueError:
        raise argparse.ArgumentTypeError(f"contracts look like seeker:state:wait, got {text!r}")


def _mechanism(name: str, variant: str, order: Optional[str]):
    if name == "cumulative-offer":
        return CumulativeOffer(variant, order)
    return StableSelecting(name, variant)


def cmd_solve(args) -> int:
    inst = _load(args)
    trace = run_with_rule_variants(inst, args.variant, args.order, record=args.trace)
    if args.trace:
        print(mechanism_trace_table(trace))
        print()
    print(allocation_table(trace.outcome, inst.seeker_ids))
    print()
    return _report(is_stable(inst, rules_for(inst, completed=args.variant == "completed"), trace.outcome))


def cmd_trace(args) -> int:
    inst = _load(args)
    trace = build_trace(inst, args.state, args.contract or (), completed=args.completed)
    print(choice_trace_table(trace))
    print()
    return _report(check_trace_invariants(inst, args.state, trace))


def cmd_audit_choice(args) -> int:
    inst = _load(args)
    universe = full_contract_universe(inst) if args.universe == "full" else listed_contract_universe(inst)
    completed = args.rule == "completed"
    rule = ChoiceRule(inst, args.state, completed=completed)
    checks = {
        "sub": lambda: is_substitutable(inst, args.state, rule, universe),
        "usub": lambda: is_unilaterally_substitutable(inst, args.state, rule, universe),
        "lad": lambda: satisfies_LAD(inst, args.state, rule, universe),
        "irc": lambda: satisfies_IRC(inst, args.state, rule, universe),
        "axioms": lambda: check_axioms(inst, args.state, rule, universe),
        "unique": lambda: unique_axiom_rule_oracle(inst, args.state, universe),
        "completion": lambda: is_completion_on(
            inst, args.state, ChoiceRule(inst, args.state, completed=True), ChoiceRule(inst, args.state), universe
        ),
        "pinned-sub": lambda: pinned_completion_witness(inst, args.state, "substitutability", universe),
        "pinned-lad": lambda: pinned_completion_witness(inst, args.state, "LAD", universe),
    }
    return _report(checks[args.property]())


def cmd_audit_stability(args) -> int:
    inst = _load(args)
    rules = rules_for(inst, completed=args.variant == "completed")
    outcome = run_with_rule_variants(inst, args.variant, args.order, record=False).outcome
    print(f"cumulative offer outcome: {outcome}")
    if args.enumerate:
        stable = enumerate_stable(inst, rules)
        print(f"stable allocations ({len(stable)}):")
        for alloc in stable:
            print(f"  {alloc}")
        print()
    return _report(is_stable(inst, rules, outcome))


def cmd_audit_order(args) -> int:
    return _report(order_invariance(_load(args), args.variant))


def cmd_audit_sp(args) -> int:
    inst = _load(args)
    mechanism = _mechanism(args.mechanism, args.variant, args.order)
    reports = audit_strategy_proofness(
        inst, mechanism, args.domain, args.max_length, seekers=args.seeker or None
    )
    print(f"strategy-proofness of {mechanism.name} over {args.domain} misreports")
    print(manipulation_table(reports))
    return _finish(not reports, len(reports))


def cmd_audit_nom(args) -> int:
    inst = _load(args)
    mechanism = _mechanism(args.mechanism, args.variant, args.order)
    reports = audit_nom(
        inst, mechanism, args.domain, args.max_length,
        seekers=args.seeker or None, include_non_obvious=args.show_non_obvious,
    )
    obvious = [r for r in reports if r.obvious]
    print(f"obvious manipulations of {mechanism.name} over {args.domain} profiles")
    print(manipulation_table(reports, with_cases=True))
    return _finish(not obvious, len(obvious))


def cmd_reproduce(args) -> int:
    names = example_names() if args.example == "all" else [resolve_name(args.example)]
    claims = [claim for name in names for claim in reproduce(name)]
    frame = pd.DataFrame(claims, columns=["example", "name", "expected", "observed", "holds"])
    print(frame.to_string(index=False))
    failed = sum(not claim.holds for claim in claims)
    return _finish(failed == 0, failed)


def cmd_generate(args) -> int:
    inst = generate_instance(
        args.seed,
        profile=args.profile,
        dims=parse_dims(args.dims),
        max_burden=args.max_burden,
        waiting_room=args.waiting_room,
    )
    if args.output:
        write_instance(inst, args.output)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(serialize_instance(inst))
    return 0


def _instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="Instance document (JSON)")
    p.add_argument("--lenient", action="store_true", help="Skip the aggregate quota and capacity sums")


def _mechanism_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variant", choices=("base", "completed"), default="base")
    p.add_argument("--order", choices=sorted(ORDER_POLICIES), default=None)


def _manipulation_args(p: argparse.ArgumentParser) -> None:
    _mechanism_args(p)
    p.add_argument("--mechanism", choices=MECHANISMS, default="cumulative-offer")
    p.add_argument("--domain", choices=DOMAINS, default="listed")
    p.add_argument("--max-length", type=int, default=None)
    p.add_argument("--seeker", action="append", help="Only audit this seeker (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asylum", description="Asylum seeker matching with contracts")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="Run the cumulative offer mechanism")
    _instance_args(s)
    _mechanism_args(s)
    s.add_argument("--trace", action="store_true", help="Print the round-by-round table")
    s.set_defaults(func=cmd_solve)

    t = sub.add_parser("trace", help="Step table of one choice-rule run")
    _instance_args(t)
    t.add_argument("--state", required=True)
    t.add_argument("--contract", type=_contract, action="append", help="Offered contract seeker:state:wait")
    t.add_argument("--completed", action="store_true", help="Use the completed rule")
    t.set_defaults(func=cmd_trace)

    a = sub.add_parser("audit", help="Property, stability and manipulation audits")
    audit_sub = a.add_subparsers(dest="audit_cmd", required=True)

    ac = audit_sub.add_parser("choice")
    _instance_args(ac)
    ac.add_argument("--state", required=True)
    ac.add_argument("--property", choices=CHOICE_PROPERTIES, default="axioms")
    ac.add_argument("--rule", choices=("base", "completed"), default="base")
    ac.add_argument("--universe", choices=("listed", "full"), default="full")
    ac.set_defaults(func=cmd_audit_choice)

    ast = audit_sub.add_parser("stability")
    _instance_args(ast)
    _mechanism_args(ast)
    ast.add_argument("--enumerate", action="store_true", help="Also list every stable allocation")
    ast.set_defaults(func=cmd_audit_stability)

    ao = audit_sub.add_parser("order")
    _instance_args(ao)
    ao.add_argument("--variant", choices=("base", "completed"), default="base")
    ao.set_defaults(func=cmd_audit_order)

    asp = audit_sub.add_parser("sp")
    _instance_args(asp)
    _manipulation_args(asp)
    asp.set_defaults(func=cmd_audit_sp)

    an = audit_sub.add_parser("nom")
    _instance_args(an)
    _manipulation_args(an)
    an.add_argument("--show-non-obvious", action="store_true")
    an.set_defaults(func=cmd_audit_nom)

    r = sub.add_parser("reproduce", help="Check the claims of a bundled example")
    r.add_argument("example", help=f"One of {', '.join(example_names())}, an alias, or 'all'")
    r.set_defaults(func=cmd_reproduce)

    g = sub.add_parser("generate", help="Write a seeded random instance")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--profile", choices=PROFILES, default="unrestricted")
    g.add_argument("--dims", default="3x2x2", help="seekers x states x waits")
    g.add_argument("--max-burden", type=int, default=3)
    g.add_argument("--waiting-room", action="store_true")
    g.add_argument("--output", default="")
    g.set_defaults(func=cmd_generate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, get_settings().log_level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AsylumMatchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
