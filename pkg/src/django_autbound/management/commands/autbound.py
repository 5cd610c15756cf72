"""Compute the closed formulas and run the constraint engine.

Exit codes: 0 on success, 1 for a valid but negative result (an
infeasible candidate, a contradiction, a failed audit), and 2 for
input errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from django.core.management.base import BaseCommand, CommandError, CommandParser

from django_autbound import __version__, conf
from django_autbound.constraints import (
    Family,
    PetersCase,
    Verdict,
    census,
    check_candidate,
)
from django_autbound.covering import (
    GroupProfile,
    free_genus_bounds,
    parse_group_spec,
)
from django_autbound.dedekind import (
    DedekindInput,
    dedekind_sum_closed,
    dedekind_sum_direct,
)
from django_autbound.defect import (
    DefectValue,
    defect_closed,
    defect_direct,
    defect_sl2,
)
from django_autbound.equivindex import (
    CurveDatum,
    OrbifoldData,
    case_classify,
    claim2_check,
    cr_index,
    decomposition_audit,
    moduli_dim,
)
from django_autbound.exceptions import AutBoundError, PreconditionError
from django_autbound.gsignature import (
    BettiData,
    SurfaceInvariants,
    g_signature_balance,
    lefschetz_lower_bound,
    part1_contradiction,
)
from django_autbound.rendering import (
    approximate,
    dumps,
    envelope,
    exact,
    format_table,
)
from django_autbound.rules import CITATIONS, RuleId, RuleTable


@dataclass
class Outcome:
    """What a subcommand computed, before rendering."""

    inputs: dict
    result: dict
    heading: str
    lines: list[str] = field(default_factory=list)
    negative: str | None = None
    citations: list[str] = field(default_factory=list)


def _fraction_list(text: str) -> list[Fraction]:
    if not text.strip():
        return []
    try:
        return [Fraction(item.strip()) for item in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise PreconditionError(f"{text!r} is not a comma separated list of fractions.")


def _plain(value):
    return exact(value) if isinstance(value, Fraction) else value


class SubcommandParser(CommandParser):
    """Report bad subcommand arguments as input errors.

    From the command line argparse exits with status 2; through
    ``call_command`` the error is a ``CommandError`` with the same code.
    """

    def error(self, message):
        if self.called_from_command_line:
            super().error(message)
        raise CommandError(f"Error: {message}", returncode=2)


def _read_json(path: str):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as e:
        raise PreconditionError(f"Cannot read {path}: {e.strerror}.") from e
    except json.JSONDecodeError as e:
        raise PreconditionError(f"{path} is not valid JSON: {e}.") from e


class Command(BaseCommand):
    """Compute signature defects and bound automorphism groups of surfaces."""

    help = (
        "Compute Dedekind sums, signature defects and index formulas, and check"
        " candidate surfaces and automorphism groups against known obstructions."
    )
    requires_system_checks = []

    def get_version(self):
        return __version__

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(
            dest="subcommand", required=True, parser_class=SubcommandParser
        )

        def subcommand(name, help):
            sub = subparsers.add_parser(name, help=help)
            sub.called_from_command_line = parser.called_from_command_line
            sub.add_argument(
                "--json",
                action="store_true",
                help="Write the result as a JSON envelope instead of text.",
            )
            return sub

        sub = subcommand("dedekind", "Evaluate the Dedekind sum s(q, p).")
        sub.add_argument("--q", type=int, required=True)
        sub.add_argument("--p", type=int, required=True)
        sub.add_argument(
            "--method", choices=["direct", "closed", "both"], default="both"
        )

        sub = subcommand("defect", "Signature defect I_{p,q} of a fixed point.")
        sub.add_argument("--p", type=int, required=True)
        sub.add_argument("--q", type=int, required=True)
        sub.add_argument(
            "--oracle",
            action="store_true",
            help="Also evaluate the root of unity sum in floating point.",
        )
        sub.add_argument("--bits", type=int, help="Oracle precision in bits.")

        sub = subcommand("lefschetz", "Count fixed points of a map trivial on H^2.")
        sub.add_argument("--b1", type=int, required=True)
        sub.add_argument("--b2", type=int, required=True)
        sub.add_argument("--b3", type=int, required=True)
        sub.add_argument("--trace1", type=Fraction)
        sub.add_argument("--trace3", type=Fraction)

        sub = subcommand("balance", "Residual of the G-signature balance.")
        sub.add_argument("--order", type=int, required=True)
        sub.add_argument("--sign-quotient", type=int, required=True)
        sub.add_argument("--sign-total", type=int, required=True)
        sub.add_argument("--defects", default="", help="For example 2/3,-2/3.")

        sub = subcommand("part1", "Rule out automorphisms of order 4 and 9.")
        sub.add_argument("--p", type=int, choices=[2, 3], required=True)
        sub.add_argument("--c2", type=int, required=True)

        sub = subcommand("free-genus", "Bounds on the free genus of a group.")
        sub.add_argument("--group", required=True, help="For example C2^3.")

        sub = subcommand("index", "Equivariant index of orbifold data.")
        sub.add_argument("--file", required=True)

        sub = subcommand("audit", "Audit a canonical curve decomposition.")
        sub.add_argument("--file", required=True)
        sub.add_argument("--c1sq", type=int, required=True)
        sub.add_argument("--order", type=int, required=True)
        sub.add_argument("--group", help="Also check the free genus bound.")

        sub = subcommand("claim2", "Check c1(TM).C <= 0 for a curve.")
        sub.add_argument("--square", type=int, required=True)
        sub.add_argument("--k-dot", type=int, required=True)
        sub.add_argument("--not-minimal", action="store_true")

        rule_ids = [rule_id.value for rule_id in RuleId]

        sub = subcommand("check", "Check a surface and group against every rule.")
        sub.add_argument("--c1sq", type=int, required=True)
        sub.add_argument("--c2", type=int, required=True)
        sub.add_argument("--group", help="For example C2^2.")
        sub.add_argument("--order", type=int, help="Order of an opaque group.")
        sub.add_argument(
            "--min-generators", type=int, help="Generator count of an opaque group."
        )
        sub.add_argument("--disable-rule", action="append", choices=rule_ids)
        sub.add_argument("--enable-rule", action="append", choices=rule_ids)

        sub = subcommand("census", "Which group sizes survive every rule.")
        sub.add_argument("--case", choices=[c.value for c in PetersCase], required=True)
        sub.add_argument("--max-rank", type=int, required=True)
        sub.add_argument("--family", choices=[f.value for f in Family])
        sub.add_argument("--disable-rule", action="append", choices=rule_ids)
        sub.add_argument("--enable-rule", action="append", choices=rule_ids)

        subcommand("rules", "List the rule table.")

    def handle(self, *args, **options):
        name = options["subcommand"]
        handler = getattr(self, "handle_" + name.replace("-", "_"))
        try:
            outcome = handler(options)
        except AutBoundError as e:
            raise CommandError(str(e), returncode=2) from e

        if options["json"]:
            self.stdout.write(
                dumps(
                    envelope(name, outcome.inputs, outcome.result, outcome.citations)
                )
            )
        else:
            self.stdout.write(self.style.MIGRATE_HEADING(outcome.heading))
            for line in outcome.lines:
                self.stdout.write(f"  {line}")
        if outcome.negative:
            raise CommandError(outcome.negative, returncode=1)

    def rule_table(self, options) -> RuleTable:
        disabled = list(conf.disabled_rules()) + (options.get("disable_rule") or [])
        enabled = options.get("enable_rule") or []
        return RuleTable().enable(*enabled).disable(*disabled)

    def handle_dedekind(self, options):
        d = DedekindInput(q=options["q"], p=options["p"])
        method = options["method"]
        result = {}
        if method in ("direct", "both"):
            result["direct"] = dedekind_sum_direct(d)
        if method in ("closed", "both"):
            result["closed"] = dedekind_sum_closed(d)
        lines = [f"{key}: s({d.q},{d.p}) = {value}" for key, value in result.items()]
        negative = None
        if len(set(result.values())) > 1:
            negative = "The direct sum and the closed form disagree."
        return Outcome(
            inputs={"q": d.q, "p": d.p, "method": method},
            result=result,
            heading=f"Dedekind sum s({d.q},{d.p})",
            lines=lines,
            negative=negative,
        )

    def handle_defect(self, options):
        p, q = options["p"], options["q"]
        value = defect_closed(p, q).value
        result = {"defect": value}
        lines = [f"I_{{{p},{q}}} = {value}"]
        if (q + 1) % p == 0:
            result["sl2"] = defect_sl2(p).value
            lines.append(f"(p - 1)(p - 2) / 3 = {result['sl2']}")
        negative = None
        bits = options["bits"]
        if options["oracle"]:
            bits = bits or conf.oracle_bits()
            oracle = defect_direct(p, q, bits)
            agrees = oracle.agrees_with(value)
            result["oracle"] = {
                "value": approximate(oracle.value, bits),
                "bits": bits,
                "error_bound": approximate(oracle.error_bound, 53),
                "agrees": agrees,
            }
            lines.append(
                f"oracle ({bits} bits): {result['oracle']['value']}"
                f" +/- {result['oracle']['error_bound']}"
            )
            if not agrees:
                negative = "The floating point sum disagrees with the exact defect."
        return Outcome(
            inputs={"p": p, "q": q, "oracle": options["oracle"], "bits": bits},
            result=result,
            heading="Signature defect",
            lines=lines,
            negative=negative,
        )

    def handle_lefschetz(self, options):
        b = BettiData(
            b1=options["b1"],
            b2=options["b2"],
            b3=options["b3"],
            trace1=options["trace1"],
            trace3=options["trace3"],
        )
        count = lefschetz_lower_bound(b)
        exact_count = b.trace1 is not None
        return Outcome(
            inputs={
                "b1": b.b1,
                "b2": b.b2,
                "b3": b.b3,
                "trace1": None if b.trace1 is None else exact(b.trace1),
                "trace3": None if b.trace3 is None else exact(b.trace3),
            },
            result={"fixed_points": count, "exact": exact_count, "euler": b.euler},
            heading="Lefschetz fixed point count",
            lines=[
                f"fixed points {'=' if exact_count else '>='} {count}",
                f"Euler characteristic {b.euler}",
            ],
        )

    def handle_balance(self, options):
        defects = [DefectValue(value) for value in _fraction_list(options["defects"])]
        residual = g_signature_balance(
            options["order"], options["sign_quotient"], options["sign_total"], defects
        )
        return Outcome(
            inputs={
                "order": options["order"],
                "sign_quotient": options["sign_quotient"],
                "sign_total": options["sign_total"],
                "defects": options["defects"],
            },
            result={"residual": residual, "consistent": residual == 0},
            heading="G-signature balance",
            lines=[
                f"residual = {residual}"
                + (" (consistent)" if residual == 0 else " (inconsistent)")
            ],
            negative=None if residual == 0 else f"The residual is {residual}, not 0.",
        )

    def handle_part1(self, options):
        report = part1_contradiction(options["p"], options["c2"])
        p, order = report.p_small, report.order
        result = {
            "p": p,
            "order": order,
            "fixed_points_lower_bound": report.fixed_points_lower_bound,
            "fixed_point_defect": report.fixed_point_defect.value,
            "subgroup_defect": report.subgroup_defect.value,
            "subgroup_defects_nonnegative": report.subgroup_defects_nonnegative,
            "defect_sum_lower_bound": report.defect_sum_lower_bound,
            "signature_lower_bound": report.signature_lower_bound,
            "required_c1sq": report.required_c1sq,
            "miyaoka_yau_cap": report.miyaoka_yau_cap,
            "contradiction": report.contradiction,
        }
        lines = [
            f"|g| = {order}: at least c2 = {report.fixed_points_lower_bound}"
            " fixed points",
            f"defect per fixed point of g: {report.fixed_point_defect}",
            f"defect at fixed points of g^{p}: {report.subgroup_defect} >= 0",
            f"({order} - 1) sign(X) >= {report.defect_sum_lower_bound}",
            f"sign(X) >= {report.signature_lower_bound}",
            f"need c1^2 >= {report.required_c1sq}"
            f" but Miyaoka-Yau gives c1^2 <= {report.miyaoka_yau_cap}",
        ]
        if report.contradiction:
            lines.append(f"contradiction: no automorphism of order {order}")
        return Outcome(
            inputs={"p": p, "c2": report.c2},
            result=result,
            heading="Automorphisms of order p^2",
            lines=lines,
            negative=(
                f"Contradiction: no element of order {order}."
                if report.contradiction
                else None
            ),
            citations=[CITATIONS[RuleId.MIYAOKA_YAU]],
        )

    def handle_free_genus(self, options):
        g = parse_group_spec(options["group"])
        bounds = free_genus_bounds(g)
        return Outcome(
            inputs={"group": options["group"]},
            result={
                "group": str(g),
                "order": g.order,
                "min_generators": g.min_generators,
                "lower": bounds.lower,
                "upper": bounds.upper,
            },
            heading=f"Free genus of {g}",
            lines=[f"{bounds.lower} <= free genus <= {bounds.upper}"],
        )

    def handle_index(self, options):
        data = _read_json(options["file"])
        if not isinstance(data, dict):
            raise PreconditionError("Orbifold data must be a JSON object.")
        d = OrbifoldData.from_dict(data)
        index = cr_index(d)
        dim = moduli_dim(d.quotient_genus, d.k)
        result = {
            "data": d.to_dict(),
            "index": index,
            "moduli_dim": dim,
            "expected_dim": index + dim,
            "sl2": all(p.sl2 for p in d.marked),
        }
        lines = [
            f"d = {index}",
            f"moduli dimension = {dim}",
            f"d + dim = {index + dim}",
        ]
        negative = None
        if result["sl2"]:
            report = case_classify(d)
            governing = report.governing
            result["case"] = {
                "case": governing.case,
                "lhs": governing.lhs,
                "satisfied": governing.satisfied,
                "base": report.base
                and {"case": report.base.case, "lhs": report.base.lhs},
            }
            lines.append(
                f"case ({governing.case.value}): {governing.lhs} >= 0"
                + (" holds" if governing.satisfied else " fails")
            )
            if report.base:
                lines.append(f"sharpens ({report.base.case.value}): {report.base.lhs}")
            if not report.satisfied:
                negative = f"Inequality ({governing.case.value}) fails."
        else:
            lines.append("not all marked points are SL2; no case inequality")
        return Outcome(
            inputs={"file": options["file"]},
            result=result,
            heading="Equivariant index",
            lines=lines,
            negative=negative,
        )

    def handle_audit(self, options):
        data = _read_json(options["file"])
        if isinstance(data, dict):
            data = data.get("curves", [])
        if not isinstance(data, list):
            raise PreconditionError("Curve data must be a JSON list.")
        curves = [CurveDatum.from_dict(item) for item in data]
        group = parse_group_spec(options["group"]) if options["group"] else None
        report = decomposition_audit(
            options["c1sq"], options["order"], curves, group=group
        )
        lines = [
            f"{'ok  ' if check.passed else 'FAIL'} {check.name}"
            + ("" if check.curve is None else f" [curve {check.curve}]")
            + f": {check.detail}"
            for check in report.checks
        ]
        return Outcome(
            inputs={
                "file": options["file"],
                "c1sq": options["c1sq"],
                "order": options["order"],
                "group": options["group"],
            },
            result={
                "passed": report.passed,
                "kinds": list(report.kinds),
                "checks": [
                    {
                        "name": check.name,
                        "curve": check.curve,
                        "passed": check.passed,
                        "detail": check.detail,
                    }
                    for check in report.checks
                ],
            },
            heading="Decomposition audit: " + ("pass" if report.passed else "fail"),
            lines=lines,
            negative=None if report.passed else "The decomposition audit failed.",
        )

    def handle_claim2(self, options):
        verdict = claim2_check(
            options["square"], options["k_dot"], minimal=not options["not_minimal"]
        )
        return Outcome(
            inputs={
                "square": verdict.square,
                "k_dot": verdict.k_dot,
                "not_minimal": not verdict.minimal,
            },
            result={
                "status": verdict.status,
                "holds": verdict.holds,
                "genus": verdict.genus,
            },
            heading=f"Curve with C^2 = {verdict.square}",
            lines=[f"K.C = {verdict.k_dot}: {verdict.status.value.replace('_', ' ')}"],
            negative=None if verdict.holds else "c1(TM).C > 0.",
        )

    def group_profile(self, options) -> GroupProfile:
        if options["group"] and options["order"] is None:
            return parse_group_spec(options["group"])
        if options["group"] is None and options["order"] is not None:
            if options["min_generators"] is None:
                raise PreconditionError("--order needs --min-generators.")
            return GroupProfile.opaque(options["order"], options["min_generators"])
        raise PreconditionError("Give either --group, or --order and --min-generators.")

    def handle_check(self, options):
        rules = self.rule_table(options)
        s = SurfaceInvariants(c1sq=options["c1sq"], c2=options["c2"])
        g = self.group_profile(options)
        report = check_candidate(s, g, rules)
        lines = [
            f"{check.rule.value}: {check.status.value}"
            + (
                " ("
                + ", ".join(f"{k}={_plain(v)}" for k, v in check.witness.items())
                + ")"
                if check.witness
                else ""
            )
            for check in report.checks
        ]
        lines.append(f"verdict: {report.verdict.value}")
        return Outcome(
            inputs={
                "c1sq": s.c1sq,
                "c2": s.c2,
                "group": options["group"],
                "order": options["order"],
                "min_generators": options["min_generators"],
                "disable_rule": options["disable_rule"],
                "enable_rule": options["enable_rule"],
            },
            result={
                "group": str(g),
                "verdict": report.verdict,
                "checks": [
                    {
                        "rule": check.rule,
                        "status": check.status,
                        "witness": check.witness,
                    }
                    for check in report.checks
                ],
            },
            heading=f"Candidate c1^2 = {s.c1sq}, c2 = {s.c2}, G = {g}",
            lines=lines,
            negative=(
                "Infeasible: "
                + ", ".join(rule.value for rule in report.failing)
                + "."
                if report.verdict == Verdict.INFEASIBLE
                else None
            ),
            citations=[rule.citation for rule in rules if rule.enabled],
        )

    def handle_census(self, options):
        rules = self.rule_table(options)
        case = PetersCase(options["case"])
        family = Family(options["family"]) if options["family"] else None
        table = census(
            case,
            family,
            max_rank=options["max_rank"],
            rules=rules,
            workers=conf.census_workers(),
        )
        rows = []
        for row in table.rows:
            rows.append(
                {
                    "rank": row.rank,
                    "order": row.group.order,
                    "min_generators": row.group.min_generators,
                    "status": row.feasibility,
                    "chi_cap": row.chi_cap,
                    "survivors": list(row.survivors),
                    "witness": row.witness
                    and {"c1sq": row.witness.c1sq, "c2": row.witness.c2},
                }
            )
        lines = format_table(
            ["rank", "order", "r", "status", "chi cap", "c1^2 values"],
            [
                [
                    row.rank,
                    row.group.order,
                    row.group.min_generators,
                    row.feasibility.value,
                    "-" if row.chi_cap is None else row.chi_cap,
                    ", ".join(map(str, row.survivors))
                    or (f"e.g. {row.witness.c1sq}" if row.witness else "-"),
                ]
                for row in table.rows
            ],
        )
        lines.append(f"feasible ranks: {table.feasible_ranks}")
        lines.append(f"largest feasible order: {table.max_feasible_order}")
        return Outcome(
            inputs={
                "case": case.value,
                "max_rank": options["max_rank"],
                "family": table.family.value,
                "disable_rule": options["disable_rule"],
                "enable_rule": options["enable_rule"],
            },
            result={
                "family": table.family,
                "rows": rows,
                "feasible_ranks": table.feasible_ranks,
                "max_feasible_order": table.max_feasible_order,
            },
            heading=f"Census of case {case.value}, family {table.family.value}",
            lines=lines,
            citations=[rule.citation for rule in rules if rule.enabled],
        )

    def handle_rules(self, options):
        rules = self.rule_table(options)
        return Outcome(
            inputs={},
            result={
                "rules": [
                    {
                        "id": rule.id,
                        "enabled": rule.enabled,
                        "citation": rule.citation,
                    }
                    for rule in rules
                ]
            },
            heading="Rules",
            lines=[
                f"{rule.id.value} [{'on' if rule.enabled else 'off'}]: {rule.citation}"
                for rule in rules
            ],
        )
