"""Unit tests for the autbound command."""

import json
from fractions import Fraction
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from django_autbound import __version__, conf
from django_autbound.exceptions import InvalidSettingError
from django_autbound.rendering import echo_argv
from django_autbound.rules import RuleId


def autbound(*args):
    """Run the command and return its exit code and output."""
    out = StringIO()
    try:
        call_command("autbound", *args, stdout=out, no_color=True)
    except CommandError as e:
        return e.returncode, out.getvalue()
    return 0, out.getvalue()


def autbound_json(*args):
    code, out = autbound(*args, "--json")
    return code, json.loads(out)


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


class TestDedekind:
    def test_both_methods(self):
        code, out = autbound("dedekind", "--q", "1", "--p", "3")
        assert code == 0
        assert "direct: s(1,3) = 1/18" in out
        assert "closed: s(1,3) = 1/18" in out

    def test_json(self):
        code, data = autbound_json("dedekind", "--q", "-1", "--p", "5")
        assert code == 0
        assert data["result"] == {"direct": "-1/5", "closed": "-1/5"}

    def test_not_coprime(self):
        code, _ = autbound("dedekind", "--q", "2", "--p", "4")
        assert code == 2

    def test_trivial_modulus(self):
        assert autbound("dedekind", "--q=0", "--p=1", "--method=direct")[0] == 0
        assert autbound("dedekind", "--q", "0", "--p", "1")[0] == 2

    def test_bad_integer(self):
        code, _ = autbound("dedekind", "--q", "x", "--p", "3")
        assert code == 2


class TestDefect:
    def test_sl2_fixed_point(self):
        code, out = autbound("defect", "--p", "5", "--q", "-1")
        assert code == 0
        assert "I_{5,-1} = 4" in out
        assert "(p - 1)(p - 2) / 3 = 4" in out

    def test_exact_fraction(self):
        code, data = autbound_json("defect", "--p", "3", "--q", "1")
        assert code == 0
        assert data["result"] == {"defect": "-2/3"}

    def test_oracle(self):
        code, data = autbound_json("defect", "--p", "7", "--q", "3", "--oracle")
        assert code == 0
        oracle = data["result"]["oracle"]
        assert oracle["bits"] == 128
        assert oracle["agrees"] is True
        exact = Fraction(str(data["result"]["defect"]))
        assert float(oracle["value"]) == pytest.approx(float(exact))

    def test_oracle_bits_setting(self, settings):
        settings.AUTBOUND_ORACLE_BITS = 96
        code, data = autbound_json("defect", "--p", "5", "--q", "2", "--oracle")
        assert code == 0
        assert data["result"]["oracle"]["bits"] == 96
        assert data["inputs"]["bits"] == 96

    def test_oracle_bits_flag(self):
        code, data = autbound_json(
            "defect", "--p", "5", "--q", "2", "--oracle", "--bits", "200"
        )
        assert data["result"]["oracle"]["bits"] == 200

    def test_low_precision(self):
        code, _ = autbound("defect", "--p", "5", "--q", "2", "--oracle", "--bits", "32")
        assert code == 2

    def test_invalid_bits_setting(self, settings):
        settings.AUTBOUND_ORACLE_BITS = 16
        code, _ = autbound("defect", "--p", "5", "--q", "2", "--oracle")
        assert code == 2


class TestLefschetz:
    def test_bound(self):
        code, out = autbound("lefschetz", "--b1", "0", "--b2", "46", "--b3", "0")
        assert code == 0
        assert "fixed points >= 48" in out

    def test_traces(self):
        code, data = autbound_json(
            "lefschetz",
            "--b1=2",
            "--b2=10",
            "--b3=2",
            "--trace1=-2",
            "--trace3=-2",
        )
        assert code == 0
        assert data["result"] == {"fixed_points": 16, "exact": True, "euler": 8}

    def test_trace_too_large(self):
        args = ["--b1=2", "--b2=10", "--b3=2", "--trace1=3", "--trace3=2"]
        assert autbound("lefschetz", *args)[0] == 2


class TestBalance:
    def test_consistent(self):
        code, out = autbound(
            "balance",
            "--order",
            "3",
            "--sign-quotient",
            "0",
            "--sign-total",
            "0",
            "--defects=2/3,2/3,2/3,-2/3,-2/3,-2/3",
        )
        assert code == 0
        assert "residual = 0 (consistent)" in out

    def test_inconsistent(self):
        code, data = autbound_json(
            "balance",
            "--order=2",
            "--sign-quotient=1",
            "--sign-total=0",
            "--defects=0,0",
        )
        assert code == 1
        assert data["result"] == {"residual": 2, "consistent": False}

    def test_not_a_defect(self):
        code, _ = autbound(
            "balance",
            "--order=2",
            "--sign-quotient=0",
            "--sign-total=0",
            "--defects=1/2",
        )
        assert code == 2

    def test_malformed_defects(self):
        code, _ = autbound(
            "balance",
            "--order=2",
            "--sign-quotient=0",
            "--sign-total=0",
            "--defects=x",
        )
        assert code == 2


class TestPart1:
    def test_contradiction(self):
        code, out = autbound("part1", "--p", "2", "--c2", "8")
        assert code == 1
        assert "need c1^2 >= 32 but Miyaoka-Yau gives c1^2 <= 24" in out
        assert "contradiction: no automorphism of order 4" in out

    def test_json_trace(self):
        code, data = autbound_json("part1", "--p", "3", "--c2", "1")
        assert code == 1
        result = data["result"]
        assert result["fixed_point_defect"] == "56/3"
        assert result["subgroup_defect"] == "2/3"
        assert result["required_c1sq"] == 9
        assert result["miyaoka_yau_cap"] == 3
        assert result["contradiction"] is True
        assert any("Miyaoka-Yau" in citation for citation in data["citations"])

    def test_invalid_prime(self):
        assert autbound("part1", "--p", "5", "--c2", "1")[0] == 2

    def test_invalid_c2(self):
        assert autbound("part1", "--p", "2", "--c2", "0")[0] == 2


class TestFreeGenus:
    def test_bounds(self):
        code, out = autbound("free-genus", "--group", "C2^7")
        assert code == 0
        assert "385 <= free genus <= 769" in out

    def test_normalized_group(self):
        code, data = autbound_json("free-genus", "--group", "C4xC2xC2")
        assert data["result"]["group"] == "C2^2xC4"
        assert data["result"]["min_generators"] == 3

    def test_syntax_error(self):
        assert autbound("free-genus", "--group", "C2y")[0] == 2

    def test_trivial_group(self):
        assert autbound("free-genus", "--group", "C1")[0] == 2


class TestIndex:
    def test_index(self, write_json):
        path = write_json(
            "orbifold.json",
            {
                "h_order": 2,
                "quotient_genus": 0,
                "marked": [{"m": 2, "m1": 1, "m2": 1}, {"m": 2, "m1": 1, "m2": 1}],
                "degree": 4,
            },
        )
        code, out = autbound("index", "--file", path)
        assert code == 0
        assert "d = 2" in out
        assert "case (i'): 1 >= 0 holds" in out

    def test_case_violated(self, write_json):
        path = write_json(
            "sphere.json",
            {"h_order": 1, "quotient_genus": 0, "marked": [], "degree": 0},
        )
        code, data = autbound_json("index", "--file", path)
        assert code == 1
        assert data["result"]["case"]["case"] == "i'"
        assert data["result"]["case"]["lhs"] == -1
        assert data["result"]["case"]["base"] == {"case": "i", "lhs": 2}

    def test_not_sl2(self, write_json):
        path = write_json(
            "twisted.json",
            {
                "h_order": 1,
                "quotient_genus": 1,
                "marked": [{"m": 3, "m1": 1, "m2": 1}, {"m": 3, "m1": 2, "m2": 2}],
                "degree": 0,
            },
        )
        code, data = autbound_json("index", "--file", path)
        assert code == 0
        assert data["result"]["sl2"] is False
        assert "case" not in data["result"]

    def test_non_integral(self, write_json):
        path = write_json(
            "bad.json",
            {
                "h_order": 2,
                "quotient_genus": 0,
                "marked": [{"m": 2, "m1": 1, "m2": 1}],
                "degree": 1,
            },
        )
        assert autbound("index", "--file", path)[0] == 2

    def test_missing_file(self, tmp_path):
        assert autbound("index", "--file", str(tmp_path / "missing.json"))[0] == 2

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        assert autbound("index", "--file", str(path))[0] == 2

    def test_not_an_object(self, write_json):
        assert autbound("index", "--file", write_json("list.json", []))[0] == 2

    @pytest.mark.parametrize("field", ["quotient_genus", "degree"])
    def test_non_integer_field(self, write_json, field):
        data = {"h_order": 1, "quotient_genus": 1, "marked": [], "degree": 0}
        data[field] = 1.9 if field == "quotient_genus" else 0.7
        path = write_json("fractional.json", data)
        code, _ = autbound("index", "--file", path)
        assert code == 2

    def test_non_integer_rotation(self, write_json):
        path = write_json(
            "rotation.json",
            {
                "h_order": 2,
                "quotient_genus": 0,
                "marked": [{"m": 2, "m1": 1.0, "m2": 1}],
                "degree": 4,
            },
        )
        assert autbound("index", "--file", path)[0] == 2


class TestAudit:
    def test_pass(self, write_json):
        path = write_json(
            "curves.json",
            [{"genus": 17, "square": 16, "multiplicity": 1, "k_dot": 16}],
        )
        code, out = autbound(
            "audit", "--file", path, "--c1sq", "16", "--order", "4", "--group", "C2^2"
        )
        assert code == 0
        assert "Decomposition audit: pass" in out
        assert "ok   free_genus [curve 0]" in out

    def test_fail(self, write_json):
        path = write_json(
            "curves.json",
            {"curves": [{"genus": 16, "square": 15, "multiplicity": 1, "k_dot": 15}]},
        )
        code, out = autbound("audit", "--file", path, "--c1sq", "16", "--order", "4")
        assert code == 1
        assert "FAIL divisibility [curve 0]" in out

    def test_malformed_curve(self, write_json):
        path = write_json("curves.json", [{"genus": 1}])
        code, _ = autbound("audit", "--file", path, "--c1sq", "16", "--order", "4")
        assert code == 2

    @pytest.mark.parametrize(
        "curve",
        [
            {"genus": 17.5, "square": 16, "multiplicity": 1, "k_dot": 16},
            {"genus": 17, "square": 16, "multiplicity": True, "k_dot": 16},
            {"genus": 17, "square": "16", "multiplicity": 1, "k_dot": 16},
            {
                "genus": 17,
                "square": 16,
                "multiplicity": 1,
                "k_dot": 16,
                "stabilizer_order": 2.0,
            },
        ],
    )
    def test_non_integer_field(self, write_json, curve):
        path = write_json("curves.json", [curve])
        code, _ = autbound("audit", "--file", path, "--c1sq", "16", "--order", "4")
        assert code == 2


class TestClaim2:
    def test_holds(self):
        code, out = autbound("claim2", "--square", "2", "--k-dot", "2")
        assert code == 0
        assert "K.C = 2: holds" in out

    def test_minimality(self):
        code, data = autbound_json("claim2", "--square=-1", "--k-dot=-1")
        assert code == 1
        assert data["result"]["status"] == "minimality_contradiction"
        assert data["result"]["genus"] == 0

    def test_not_minimal(self):
        code, data = autbound_json(
            "claim2", "--square=-1", "--k-dot=-1", "--not-minimal"
        )
        assert code == 1
        assert data["result"]["status"] == "exceptional_curve"


class TestCheck:
    def test_feasible(self):
        code, out = autbound("check", "--c1sq", "16", "--c2", "8", "--group", "C2^2")
        assert code == 0
        assert "cai_threshold: vacuous" in out
        assert "verdict: feasible" in out

    def test_order_four_element(self):
        code, out = autbound("check", "--c1sq", "16", "--c2", "8", "--group", "C4")
        assert code == 1
        assert "peters_dichotomy: fail" in out
        assert "verdict: infeasible" in out

    def test_disable_rule(self):
        args = ["--c1sq", "16", "--c2", "8", "--group", "C4"]
        code, data = autbound_json("check", *args, "--disable-rule", "peters_dichotomy")
        assert code == 0
        checks = data["result"]["checks"]
        statuses = {check["rule"]: check["status"] for check in checks}
        assert statuses["peters_dichotomy"] == "disabled"
        assert len(data["citations"]) == len(RuleId) - 2

    def test_disabled_rules_setting(self, settings):
        settings.AUTBOUND_DISABLED_RULES = ["peters_dichotomy"]
        code, _ = autbound("check", "--c1sq", "16", "--c2", "8", "--group", "C4")
        assert code == 0

    def test_unknown_rule(self):
        code, _ = autbound(
            "check", "--c1sq", "16", "--c2", "8", "--group", "C4", "--disable-rule", "x"
        )
        assert code == 2

    def test_opaque_group(self):
        code, out = autbound(
            "check",
            "--c1sq=243",
            "--c2=81",
            "--order=27",
            "--min-generators=3",
        )
        assert code == 0
        assert "G = <order 27, r = 3>" in out

    def test_group_required(self):
        assert autbound("check", "--c1sq", "16", "--c2", "8")[0] == 2
        assert autbound("check", "--c1sq=16", "--c2=8", "--order=4")[0] == 2
        code, _ = autbound(
            "check", "--c1sq=16", "--c2=8", "--order=4", "--group=C2^2"
        )
        assert code == 2

    def test_not_general_type(self):
        assert autbound("check", "--c1sq=0", "--c2=8", "--group=C2")[0] == 2


class TestCensus:
    def test_two_c2(self):
        code, out = autbound("census", "--case", "2c2", "--max-rank", "10")
        assert code == 0
        assert "feasible ranks: [1, 2, 3, 4, 5, 6]" in out
        assert "largest feasible order: 64" in out
        assert "128, 192" in out

    def test_two_c2_json(self):
        code, data = autbound_json("census", "--case", "2c2", "--max-rank", "7")
        rows = data["result"]["rows"]
        assert [row["status"] for row in rows] == [
            "feasible-unbounded",
            "feasible-unbounded",
            "feasible",
            "feasible",
            "feasible",
            "feasible",
            "infeasible",
        ]
        assert rows[0]["witness"] == {"c1sq": 8, "c2": 4}
        assert rows[5]["survivors"] == [128, 192]
        assert rows[6]["witness"] is None

    def test_three_c2(self):
        code, data = autbound_json("census", "--case", "3c2", "--max-rank", "7")
        assert code == 0
        assert data["result"]["max_feasible_order"] == 243
        assert data["result"]["family"] == "three-group"

    def test_elementary_abelian_family(self):
        code, data = autbound_json(
            "census", "--case", "3c2", "--max-rank", "7", "--family", "elem-abelian-3"
        )
        assert data["result"]["max_feasible_order"] == 81

    def test_without_cai(self):
        code, data = autbound_json(
            "census", "--case=2c2", "--max-rank=8", "--disable-rule=cai_threshold"
        )
        assert code == 0
        assert {row["status"] for row in data["result"]["rows"]} == {
            "feasible-unbounded"
        }
        assert not any("188" in citation for citation in data["citations"])

    def test_structure_rule_enabled(self):
        code, data = autbound_json(
            "census",
            "--case=2c2",
            "--max-rank=10",
            "--disable-rule=cai_threshold",
            "--enable-rule=cai_structure",
        )
        assert code == 0
        assert data["result"]["feasible_ranks"] == [1, 2, 3, 4, 5, 6, 7, 8]
        assert data["result"]["rows"][6]["chi_cap"] == 188
        assert data["inputs"]["enable_rule"] == ["cai_structure"]

    def test_workers_setting(self, settings):
        _, serial = autbound_json("census", "--case", "2c2", "--max-rank", "8")
        settings.AUTBOUND_CENSUS_WORKERS = 3
        _, parallel = autbound_json("census", "--case", "2c2", "--max-rank", "8")
        assert parallel == serial

    def test_invalid_workers_setting(self, settings):
        settings.AUTBOUND_CENSUS_WORKERS = 0
        assert autbound("census", "--case", "2c2", "--max-rank", "2")[0] == 2

    def test_max_rank(self):
        assert autbound("census", "--case", "2c2", "--max-rank", "0")[0] == 2

    def test_unknown_case(self):
        assert autbound("census", "--case", "4c2", "--max-rank", "2")[0] == 2


class TestRules:
    def test_listing(self):
        code, out = autbound("rules")
        assert code == 0
        for rule_id in RuleId:
            state = "off" if rule_id == RuleId.CAI_STRUCTURE else "on"
            assert f"{rule_id.value} [{state}]" in out

    def test_disabled_setting(self, settings):
        settings.AUTBOUND_DISABLED_RULES = ["cai_threshold"]
        code, data = autbound_json("rules")
        enabled = {rule["id"]: rule["enabled"] for rule in data["result"]["rules"]}
        assert enabled["cai_threshold"] is False
        assert enabled["miyaoka_yau"] is True

    def test_string_setting_deprecated(self, settings):
        settings.AUTBOUND_DISABLED_RULES = "cai_threshold"
        with pytest.warns(DeprecationWarning):
            code, out = autbound("rules")
        assert code == 0
        assert "cai_threshold [off]" in out

    def test_invalid_setting(self, settings):
        settings.AUTBOUND_DISABLED_RULES = ["invalid"]
        assert autbound("rules")[0] == 2

    def test_non_list_setting(self, settings):
        settings.AUTBOUND_DISABLED_RULES = 1
        assert autbound("rules")[0] == 2


class TestSettings:
    def test_defaults(self, settings):
        del settings.AUTBOUND_DISABLED_RULES
        del settings.AUTBOUND_CENSUS_WORKERS
        del settings.AUTBOUND_ORACLE_BITS
        assert conf.disabled_rules() == ()
        assert conf.census_workers() == 1
        assert conf.oracle_bits() == 128

    def test_boolean_is_not_a_count(self, settings):
        settings.AUTBOUND_CENSUS_WORKERS = True
        with pytest.raises(ValueError):
            conf.census_workers()

    def test_invalid_setting_error(self, settings):
        settings.AUTBOUND_ORACLE_BITS = "many"
        with pytest.raises(InvalidSettingError):
            conf.oracle_bits()


class TestErrors:
    def test_library_errors_are_input_errors(self):
        with pytest.raises(CommandError) as e:
            call_command("autbound", "free-genus", "--group", "D4", stdout=StringIO())
        assert e.value.returncode == 2

    def test_unexpected_errors_propagate(self, mocker):
        mocker.patch(
            "django_autbound.management.commands.autbound.free_genus_bounds",
            side_effect=ValueError("math domain error"),
        )
        with pytest.raises(ValueError, match="math domain error"):
            call_command("autbound", "free-genus", "--group", "C2", stdout=StringIO())


class TestEnvelope:
    def test_keys(self):
        code, data = autbound_json("free-genus", "--group", "C2^2")
        assert code == 0
        assert set(data) == {
            "tool",
            "version",
            "subcommand",
            "inputs",
            "result",
            "citations",
        }
        assert data["tool"] == "django-autbound"
        assert data["version"] == __version__
        assert data["subcommand"] == "free-genus"
        assert data["inputs"] == {"group": "C2^2"}

    @pytest.mark.parametrize(
        "args",
        [
            ["dedekind", "--q", "-3", "--p", "7"],
            ["defect", "--p", "11", "--q", "-1", "--oracle"],
            ["lefschetz", "--b1=2", "--b2=10", "--b3=2", "--trace1=-1/2",
             "--trace3=1/2"],
            ["balance", "--order=3", "--sign-quotient=1", "--sign-total=0",
             "--defects=-2/3,2/3"],
            ["part1", "--p", "2", "--c2", "5"],
            ["free-genus", "--group", "C3xC9"],
            ["claim2", "--square=-1", "--k-dot=-1", "--not-minimal"],
            ["check", "--c1sq", "16", "--c2", "8", "--group", "C4",
             "--disable-rule", "cai_threshold", "--disable-rule", "thm_c_bound"],
            ["check", "--c1sq=243", "--c2=81", "--order=27", "--min-generators=3"],
            ["census", "--case", "3c2", "--max-rank", "6"],
            [
                "check",
                "--c1sq=1512",
                "--c2=756",
                "--group=C2^3",
                "--disable-rule=cai_threshold",
                "--enable-rule=cai_structure",
            ],
            ["rules"],
        ],
    )
    def test_round_trip(self, args):
        code, data = autbound_json(*args)
        echoed = echo_argv(data["subcommand"], data["inputs"])
        again_code, again = autbound_json(*echoed)
        assert again_code == code
        assert again["result"] == data["result"]
        assert again["inputs"] == data["inputs"]

    def test_round_trip_with_file(self, write_json):
        path = write_json(
            "curves.json",
            [{"genus": 17, "square": 16, "multiplicity": 1, "k_dot": 16}],
        )
        code, data = autbound_json("audit", "--file", path, "--c1sq=16", "--order=4")
        echoed = echo_argv(data["subcommand"], data["inputs"])
        assert autbound_json(*echoed)[1]["result"] == data["result"]
