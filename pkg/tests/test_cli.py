"""Command-line interface tests.

Oracles: frozen output values computed once by hand or with the library's
own exact routines and pinned here as literals; byte-for-byte comparison
of repeated runs for determinism; and the shipped JSON schema, which every
emitted line must validate against.
"""

import io
import json
import subprocess
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest

from xorlift.cli import RunConfig, cli_json, run

SCHEMA = json.loads((Path(__file__).resolve().parent.parent / "docs" / "cli-schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def invoke(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def invoke_json(*argv):
    code, text = invoke(*argv)
    lines = [json.loads(line) for line in text.strip().split("\n")] if text.strip() else []
    return code, lines


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------


def test_measure_all_on_parity():
    code, lines = invoke_json("measure", "--fn", "parity:3", "--all")
    assert code == 0
    got = {(line["fn"], line["selector"]): line["value"] for line in lines}
    assert got == {
        ("parity:3", "margin"): "1/1",
        ("parity:3", "wt"): "1/1",
        ("parity:3", "approxwt"): "2/3",
        ("parity:3", "oddeven"): 0,
        ("parity:3", "signdeg"): 3,
    }


def test_measure_selector_order_is_stable():
    code, lines = invoke_json("measure", "--fn", "parity:3", "--all")
    assert code == 0
    assert [line["selector"] for line in lines] == ["margin", "wt", "approxwt", "oddeven", "signdeg"]


def test_measure_majority_values():
    code, lines = invoke_json(
        "measure", "--fn", "maj:3", "--measure", "margin", "--measure", "oddeven",
        "--measure", "signdeg", "--measure", "gamma", "--measure", "r",
    )
    assert code == 0
    got = {line["selector"]: line["value"] for line in lines}
    # the middle-level sign change keeps the two-periodic window empty
    assert got == {"margin": "1/2", "oddeven": 2, "signdeg": 1, "gamma": 0, "r": None}


def test_measure_r_value_on_clearable_predicate():
    code, lines = invoke_json("measure", "--fn", "pred:++-++", "--measure", "r", "--measure", "gamma")
    assert code == 0
    got = {line["selector"]: line["value"] for line in lines}
    assert got == {"r": [1, 2, 2], "gamma": 1}


def test_measure_alternating_predicate_degree():
    code, lines = invoke_json("measure", "--fn", "pred:+-+-+", "--measure", "oddeven")
    assert code == 0
    assert lines[0]["value"] == 0


def test_measure_eps_flag_changes_approx_weight():
    code, lines = invoke_json(
        "measure", "--fn", "parity:3", "--measure", "approxwt", "--eps", "1/2"
    )
    assert code == 0
    assert lines[0]["value"] == "1/2"
    assert lines[0]["report"]["params"] == {"epsilon": "1/2"}


def test_measure_sufficient_bound_frozen():
    code, lines = invoke_json("measure", "--fn", "mod:3,{0};12", "--bound", "sufficient")
    assert code == 0
    report = lines[0]["report"]
    assert report["kind"] == "sign-rank"
    assert report["value"] == "440/81"
    assert report["slack"] == 0
    assert report["vacuous"] is False
    inputs = report["chain"][0]["inputs"]
    assert inputs["policy"] == "greedy"
    assert inputs["dropped_count"] == 2
    assert inputs["sign_verified"] is True


def test_measure_bound_battery_on_majority():
    code, lines = invoke_json(
        "measure", "--fn", "maj:3", "--bound", "pm", "--bound", "pp",
        "--bound", "upp", "--bound", "forster", "--bound", "bpp",
    )
    assert code == 0
    by_bound = {line["bound"]: line["report"] for line in lines}
    assert by_bound["pp"]["value"] == 3.0
    assert by_bound["pp"]["chain"][0]["inputs"]["disc"] == "1/8"
    assert by_bound["upp"]["value"] == 1.0
    assert by_bound["forster"]["value"] == "2/1"
    assert by_bound["pm"]["value"] == pytest.approx(0.7071067811865476, abs=1e-12)
    assert by_bound["bpp"]["vacuous"] is True
    assert by_bound["bpp"]["chain"][0]["inputs"]["correlation"] == "1/1"


def test_measure_reports_drop_timing_fields():
    code, lines = invoke_json("measure", "--fn", "maj:3", "--measure", "margin")
    assert code == 0
    assert set(lines[0]["report"]) == {"measure", "params", "value", "certificate"}


def test_measure_symmetric_only_selector_reports_invalid():
    code, lines = invoke_json("measure", "--fn", "tt:a6;3", "--measure", "oddeven")
    assert code == 0
    assert lines[0]["code"] == "invalid"
    assert "symmetric" in lines[0]["error"]


def test_measure_capacity_exit_code():
    # non-symmetric at arity 7: the dense margin program caps at 6
    code, lines = invoke_json(
        "measure", "--fn", "tt:deadbeefcafebabe0123456789abcdef;7", "--measure", "margin"
    )
    assert code == 3
    assert lines[0]["code"] == "capacity"


def test_measure_capacity_does_not_stop_other_items():
    code, lines = invoke_json(
        "measure", "--fn", "mod:3,{0};12", "--bound", "pm", "--bound", "forster"
    )
    assert code == 3
    by_bound = {line.get("bound"): line for line in lines}
    assert by_bound["pm"]["code"] == "capacity"
    assert "value" in by_bound["forster"]["report"]


def test_measure_text_format():
    code, text = invoke("measure", "--fn", "maj:3", "--measure", "margin", "--format", "text")
    assert code == 0
    assert text == "maj:3 margin = 1/2\n"


def test_measure_csv_format():
    code, text = invoke(
        "measure", "--fn", "maj:3", "--measure", "margin", "--measure", "oddeven",
        "--format", "csv",
    )
    assert code == 0
    assert text == "fn,selector,value,error\nmaj:3,margin,1/2,\nmaj:3,oddeven,2,\n"


def test_measure_multiple_fns_in_order():
    code, lines = invoke_json(
        "measure", "--fn", "parity:2", "--fn", "cq:4", "--measure", "margin"
    )
    assert code == 0
    assert [line["fn"] for line in lines] == ["parity:2", "cq:4"]
    assert lines[0]["value"] == "1/1"
    assert lines[1]["value"] == "1/4"


# ---------------------------------------------------------------------------
# exit codes and argument validation
# ---------------------------------------------------------------------------


def test_bad_function_spec_is_usage_error():
    code, text = invoke("measure", "--fn", "parity:", "--measure", "margin")
    assert code == 2
    assert text == ""


def test_missing_required_flag_is_usage_error():
    assert invoke("measure")[0] == 2


def test_unknown_command_is_usage_error():
    assert invoke("frobnicate")[0] == 2


def test_unknown_suite_is_usage_error():
    assert invoke("verify", "nonsense")[0] == 2


def test_bad_jobs_value_is_usage_error():
    assert invoke("measure", "--fn", "maj:3", "--jobs", "0")[0] == 2


def test_bad_eps_is_usage_error():
    assert invoke("measure", "--fn", "maj:3", "--eps", "5/3")[0] == 2


def test_even_modulus_sweep_is_usage_error():
    assert invoke("sweep", "modbound", "--m", "4", "--n", "8")[0] == 2


def test_sweep_capacity_exit_code():
    assert invoke("sweep", "measures", "--n", "25")[0] == 3


def test_help_exits_zero():
    assert invoke("--help")[0] == 0


def test_run_config_rejects_bad_values():
    for kwargs in (
        {"fmt": "yaml"},
        {"seed": -1},
        {"jobs": 0},
        {"max_n": 99},
        {"eps": Fraction(2)},
    ):
        with pytest.raises(ValueError):
            RunConfig(command="measure", **kwargs)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_sandwich_default():
    code, lines = invoke_json("verify", "sandwich")
    assert code == 0
    assert len(lines) == 1
    summary = lines[0]
    assert summary["check"] == "sandwich-sweep"
    assert summary["passed"] is True
    assert summary["values"]["functions"] == 16
    assert summary["values"]["max_margin_disc_ratio"] == "4/1"


def test_verify_sandwich_full_arity_three():
    code, lines = invoke_json("verify", "sandwich", "--n", "3")
    assert code == 0
    assert lines[-1]["values"]["functions"] == 256
    assert all(line["passed"] for line in lines)


def test_verify_duality_default():
    code, lines = invoke_json("verify", "duality")
    assert code == 0
    assert [line["values"]["n"] for line in lines] == [1, 2]
    assert all(line["values"]["product_exact"] and line["values"]["certificates"] for line in lines)


def test_verify_fourier():
    code, lines = invoke_json("verify", "fourier", "--max-n", "5", "--samples", "5")
    assert code == 0
    assert all(line["passed"] for line in lines)
    assert lines[-1]["check"] == "spectral-norm-svd"
    assert lines[-1]["values"]["max_gap"] <= 1e-9


def test_verify_bruck_line_count_and_pass():
    code, lines = invoke_json("verify", "bruck", "--max-n", "8")
    assert code == 0
    # even arities contribute two checks, odd arities one
    assert len(lines) == 11
    assert all(line["passed"] for line in lines)


def test_verify_bpp_small():
    code, lines = invoke_json("verify", "bpp", "--n", "4")
    assert code == 0
    values = lines[0]["values"]
    assert values["predicates"] == 32
    assert values["min_correlation"] == "7/8"


def test_verify_chains_small():
    code, lines = invoke_json("verify", "chains", "--max-m", "6", "--samples", "10")
    assert code == 0
    by_m = {line["values"]["m"]: line["values"] for line in lines if line["check"] == "reduction-chains"}
    assert by_m[3]["chains"] == 6
    assert by_m[3]["bases"] == {"odd": 6}
    assert by_m[4]["bases"] == {"mod-4": 12}
    assert lines[-1]["check"] == "mod4-report-values"
    assert lines[-1]["passed"] is True


def test_verify_all_passes():
    code, lines = invoke_json("verify", "all")
    assert code == 0
    assert len(lines) == 83
    assert all(line["passed"] for line in lines)
    assert {line["suite"] for line in lines} == {
        "sandwich", "duality", "fourier", "bruck", "modclaim",
        "lifts", "ppupper", "chains", "bpp",
    }


def test_verify_text_format_marks():
    code, text = invoke("verify", "sandwich", "--format", "text")
    assert code == 0
    assert text.startswith("[ok] sandwich/")


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def test_sweep_modbound_csv_shape():
    code, text = invoke("sweep", "modbound", "--m", "3,5", "--n", "10..12", "--format", "csv")
    assert code == 0
    rows = text.strip().split("\n")
    assert rows[0] == "m,n,signrank_bound,log2_bound,vacuous"
    assert len(rows) == 7
    assert rows[3] == "3,12,-0.37570492303002645,,True"


def test_sweep_modbound_json_rows():
    code, lines = invoke_json("sweep", "modbound", "--m", "3", "--n", "12", "--format", "json")
    assert code == 0
    assert lines == [
        {
            "m": 3,
            "n": 12,
            "signrank_bound": -0.37570492303002645,
            "log2_bound": "",
            "vacuous": True,
        }
    ]


def test_sweep_modbound_nonvacuous_region():
    code, lines = invoke_json("sweep", "modbound", "--m", "3", "--n", "40", "--format", "json")
    assert code == 0
    assert lines[0]["vacuous"] is False
    assert lines[0]["signrank_bound"] > 1
    assert isinstance(lines[0]["log2_bound"], float)


def test_sweep_measures_csv_frozen():
    code, text = invoke("sweep", "measures", "--n", "2", "--format", "csv")
    assert code == 0
    assert text.strip().split("\n") == [
        "predicate,oddeven,margin",
        "+++,0,1/1",
        "-++,1,1/2",
        "+-+,0,1/1",
        "--+,1,1/2",
        "++-,1,1/2",
        "-+-,0,1/1",
        "+--,1,1/2",
        "---,0,1/1",
    ]


def test_sweep_empty_grid_is_header_only():
    code, text = invoke("sweep", "measures")  # csv is the sweep default
    assert code == 0
    assert text == "predicate,oddeven,margin\n"


def test_sweep_defaults_to_csv_and_measure_to_json():
    code, text = invoke("sweep", "measures", "--n", "1")
    assert code == 0
    assert text.startswith("predicate,oddeven,margin\n")
    code, text = invoke("measure", "--fn", "parity:2", "--measure", "margin")
    assert code == 0
    assert text.startswith("{")


def test_sweep_parallel_matches_serial():
    serial = invoke("sweep", "modbound", "--m", "3,5,7", "--n", "8..14")
    parallel = invoke("sweep", "modbound", "--m", "3,5,7", "--n", "8..14", "--jobs", "4")
    assert serial == parallel


# ---------------------------------------------------------------------------
# lift
# ---------------------------------------------------------------------------


def test_lift_kp_frozen():
    code, lines = invoke_json("lift", "--kind", "kp", "--fn", "parity:2")
    assert code == 0
    assert lines[0] == {
        "kind": "kp",
        "source_arity": 2,
        "lifted": {"n": 6, "table": "66663c3c55aa0ff0"},
    }


def test_lift_symm_produces_checked_witness():
    code, lines = invoke_json("lift", "--kind", "symm", "--fn", "pred:+-+++")
    assert code == 0
    record = lines[0]
    assert record["base"] == "-+"
    assert record["monomials"]["m"] == 3
    assert len(record["monomials"]["monomials"]) == 4
    assert record["witness"]["pointwise_checked"] is True


def test_lift_thr_frozen():
    code, lines = invoke_json("lift", "--kind", "thr", "--weights", "2,-1,1", "--offset", "1/2")
    assert code == 0
    record = lines[0]
    assert record["weights"] == [
        "2/1", "-1/1", "1/1", "2/1", "-1/1", "1/1",
        "-2/1", "1/1", "-1/1", "2/1", "-1/1", "1/1",
    ]
    assert record["offset"] == "1/1"
    assert record["witness"]["lifted_arity"] == 12
    assert record["witness"]["pointwise_checked"] is True


def test_lift_family_report():
    code, lines = invoke_json("lift", "--kind", "family", "--fn", "pred:++-++")
    assert code == 0
    report = lines[0]["report"]
    assert report["odd_even_degree"] == 2
    assert report["members"]
    assert all(m["predicate"].count("+") + m["predicate"].count("-") == m["arity"] + 1 for m in report["members"])


def test_lift_requires_fn():
    assert invoke("lift", "--kind", "kp")[0] == 2


def test_lift_symm_rejects_nonsymmetric():
    assert invoke("lift", "--kind", "symm", "--fn", "tt:a6;3")[0] == 2


# ---------------------------------------------------------------------------
# modbound
# ---------------------------------------------------------------------------


def test_modbound_even_modulus_chain():
    code, lines = invoke_json("modbound", "--m", "6", "--accepted", "0", "--n", "40")
    assert code == 0
    record = lines[0]
    assert record["simple"] is False
    chain = record["chain"]
    assert [step["kind"] for step in chain["steps"]] == ["shift-xor"]
    assert chain["steps"][0]["shift"] == 3
    assert chain["steps"][0]["arity_loss"] == 6
    assert chain["base"] == "odd"
    upp = record["upp"]
    assert upp["kind"] == "UPP"
    assert upp["value"] == pytest.approx(1.8923260638517143, abs=1e-9)
    assert [s["theorem"] for s in upp["chain"]] == [
        "modulus-halving", "odd-spectral-gap", "upp-signrank-equivalence",
    ]


def test_modbound_simple_pattern_has_no_chain():
    code, lines = invoke_json("modbound", "--m", "6", "--accepted", "1,3,5", "--n", "20")
    assert code == 0
    record = lines[0]
    assert record["simple"] is True
    assert record["reason"] == "parity"
    assert record["chain"] is None
    assert record["upp"] is None


def test_modbound_odd_modulus_includes_spectral_bound():
    code, lines = invoke_json("modbound", "--m", "5", "--accepted", "0,2", "--n", "60")
    assert code == 0
    record = lines[0]
    assert record["odd_bound"]["kind"] == "sign-rank"
    assert record["chain"]["base"] == "odd"


def test_modbound_circuit_cost_adds_size_report():
    code, lines = invoke_json(
        "modbound", "--m", "4", "--accepted", "0,1", "--n", "10", "--circuit-cost", "4"
    )
    assert code == 0
    record = lines[0]
    assert record["upp"]["value"] == 5.0
    assert record["size"]["value"] == 8.0
    assert record["size"]["chain"][-1]["theorem"] == "rank-additivity"


def test_modbound_bad_residue_is_usage_error():
    assert invoke("modbound", "--m", "4", "--accepted", "5", "--n", "10")[0] == 2


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------


def test_same_seed_same_bytes():
    first = invoke("verify", "modclaim", "--samples", "3", "--seed", "11")
    second = invoke("verify", "modclaim", "--samples", "3", "--seed", "11")
    assert first == second


def test_different_seed_different_samples():
    first = invoke("verify", "modclaim", "--samples", "3", "--seed", "11")
    third = invoke("verify", "modclaim", "--samples", "3", "--seed", "12")
    assert first != third


def test_measure_output_is_reproducible():
    first = invoke("measure", "--fn", "mod:3,{0};12", "--bound", "sufficient", "--bound", "forster")
    second = invoke("measure", "--fn", "mod:3,{0};12", "--bound", "sufficient", "--bound", "forster")
    assert first == second


# ---------------------------------------------------------------------------
# schema and environment
# ---------------------------------------------------------------------------

SCHEMA_BATTERY = (
    ("measure", "--fn", "parity:3", "--all"),
    ("measure", "--fn", "mod:3,{0};12", "--bound", "sufficient", "--bound", "forster"),
    ("measure", "--fn", "maj:3", "--bound", "pm", "--bound", "bpp", "--bound", "pp", "--bound", "upp"),
    ("measure", "--fn", "tt:a6;3", "--measure", "oddeven"),
    ("verify", "sandwich"),
    ("verify", "chains", "--max-m", "6", "--samples", "5"),
    ("verify", "bpp", "--n", "3"),
    ("sweep", "modbound", "--m", "3,5", "--n", "10..12", "--format", "json"),
    ("sweep", "measures", "--n", "2", "--format", "json"),
    ("lift", "--kind", "kp", "--fn", "parity:2"),
    ("lift", "--kind", "symm", "--fn", "pred:+-+++"),
    ("lift", "--kind", "family", "--fn", "pred:++-++"),
    ("lift", "--kind", "thr", "--weights", "2,-1,1", "--offset", "1/2"),
    ("modbound", "--m", "6", "--accepted", "0", "--n", "40"),
    ("modbound", "--m", "6", "--accepted", "1,3,5", "--n", "20"),
    ("modbound", "--m", "4", "--accepted", "0,1", "--n", "10", "--circuit-cost", "4"),
)


@pytest.mark.parametrize("argv", SCHEMA_BATTERY, ids=lambda argv: " ".join(argv))
def test_json_lines_validate_against_shipped_schema(argv):
    code, lines = invoke_json(*argv)
    assert code in (0, 3)
    assert lines
    for obj in lines:
        VALIDATOR.validate(obj)


def test_env_var_sets_default_cap(monkeypatch):
    monkeypatch.setenv("XORLIFT_MAX_N", "6")
    code, lines = invoke_json("verify", "bruck")
    assert code == 0
    assert max(line["values"]["n"] for line in lines) == 6


def test_flag_overrides_env_cap(monkeypatch):
    monkeypatch.setenv("XORLIFT_MAX_N", "6")
    code, lines = invoke_json("verify", "bruck", "--max-n", "4")
    assert code == 0
    assert max(line["values"]["n"] for line in lines) == 4


def test_console_script_round_trip():
    proc = subprocess.run(
        ["xorlift", "measure", "--fn", "parity:3", "--measure", "margin"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == "1/1"


def test_cli_json_rejects_unknown_objects():
    with pytest.raises(TypeError):
        cli_json(object())
