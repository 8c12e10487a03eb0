import io
import json

import numpy as np
import pytest

from gate_witness.cli import capability_crossing, main, parse_range, validate_config, ConfigError
from gate_witness.report import BoundsReport


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_table_cnot(capsys, tmp_path):
    out_path = tmp_path / "t.json"
    code, out, _ = run(["table", "--out", str(out_path)], capsys)
    assert code == 0
    cells = json.loads(out_path.read_text())["cells"]
    assert cells == {
        "xx": "reverse-cnot", "xy": "entangle", "xz": "entangle",
        "yx": "reverse-cnot", "yy": "entangle", "yz": "entangle",
        "zx": "identity", "zy": "cnot", "zz": "cnot",
    }
    assert "reverse-cnot" in out


def test_table_identity_and_swap(capsys, tmp_path):
    out_path = tmp_path / "t.json"
    assert run(["table", "--gate", "identity", "--out", str(out_path)], capsys)[0] == 0
    assert set(json.loads(out_path.read_text())["cells"].values()) == {"identity"}
    code, out, _ = run(["table", "--gate", "swap"], capsys)
    assert code == 0 and "other" in out
    assert run(["table", "--gate", "toffoli"], capsys)[0] == 1


def test_table_custom_gate_from_config(capsys, tmp_path):
    cz = np.diag([1, 1, 1, -1])
    cfg = {"gate": [[float(x), 0.0] for x in cz.reshape(-1)]}
    out_path = tmp_path / "t.json"
    code, _, _ = run(["table", "--config", write(tmp_path, cfg), "--out", str(out_path)], capsys)
    assert code == 0
    cells = json.loads(out_path.read_text())["cells"]
    assert cells["zz"] == "identity"


def test_report_ideal(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, out, _ = run(["report", "--config", write(tmp_path, {"gate": "cnot"}), "--out", str(out_path)], capsys)
    assert code == 0
    rep = BoundsReport.from_json(out_path.read_text())
    classical = [r for r in rep.fidelities if r.measurement != "bell" and not r.measurement.startswith("local")]
    assert len(classical) == 5
    for r in rep.fidelities:
        assert r.value == pytest.approx(1, abs=1e-12)
    assert rep.process_bounds.lower == pytest.approx(1) and rep.process_bounds.upper == pytest.approx(1)
    assert rep.concurrence_lower == pytest.approx(1)
    assert "F_process" in out


def test_report_depolarizing(capsys, tmp_path):
    cfg = {"noise": {"type": "depolarizing", "p": "0.1"}, "output": str(tmp_path / "r.json")}
    code, _, _ = run(["report", "--config", write(tmp_path, cfg)], capsys)
    assert code == 0
    rep = BoundsReport.from_json((tmp_path / "r.json").read_text())
    assert rep.fidelity("F_zz->zz").value == pytest.approx(0.925, abs=1e-12)
    assert rep.process_fidelity_exact == pytest.approx(0.90625, abs=1e-12)
    assert rep.process_bounds.lower == pytest.approx(0.85, abs=1e-12)
    assert rep.process_bounds.upper == pytest.approx(0.925, abs=1e-12)


def test_report_round_trip(capsys, tmp_path):
    cfg = {"noise": {"type": "random", "rank": 3, "seed": 5}}
    out_path = tmp_path / "r.json"
    run(["report", "--config", write(tmp_path, cfg), "--out", str(out_path)], capsys)
    text = out_path.read_text()
    rep = BoundsReport.from_json(text)
    assert rep.to_json() == text


def test_report_sampled_schema_and_determinism(capsys, tmp_path):
    cfg = {"noise": {"type": "depolarizing", "p": 0.05}, "mode": "sampled",
           "shot_plan": {"shots_per_input": 100000, "seed": 42}}
    path = write(tmp_path, cfg)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["report", "--config", path, "--out", str(a)], capsys)[0] == 0
    assert run(["report", "--config", path, "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    d = json.loads(a.read_text())
    assert all("std_error" in r and r["shots"] == 100000 for r in d["fidelities"])
    assert "lower_std_error" in d["process_bounds"]
    assert d["concurrence_lower_std_error"] is not None
    assert d["seed"] == 42


def test_report_shots_flag_implies_sampling(capsys, tmp_path):
    out_path = tmp_path / "r.json"
    code, _, _ = run(["report", "--config", write(tmp_path, {}), "--shots", "500", "--seed", "3",
                      "--out", str(out_path)], capsys)
    assert code == 0
    assert json.loads(out_path.read_text())["shots_per_input"] == 500


def test_report_from_stdin(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"noise": {"type": "ideal"}}'))
    assert run(["report", "--config", "-"], capsys)[0] == 0


@pytest.mark.parametrize(
    "cfg",
    [
        {"gate": "cnot", "colour": "blue"},
        {"noise": {"type": "depolarizing"}},
        {"noise": {"type": "depolarizing", "p": 0.1, "q": 2}},
        {"noise": {"type": "depolarizing", "p": "lots"}},
        {"mode": "quantum"},
        {"gate": [[1, 0]] * 15},
    ],
)
def test_config_rejected(capsys, tmp_path, cfg):
    code, _, err = run(["report", "--config", write(tmp_path, cfg)], capsys)
    assert code == 1
    assert "invalid config" in err


def test_out_of_range_probability_is_config_error(capsys, tmp_path):
    cfg = {"noise": {"type": "depolarizing", "p": 1.5}}
    assert run(["report", "--config", write(tmp_path, cfg)], capsys)[0] == 1


def test_non_unitary_gate_rejected(capsys, tmp_path):
    cfg = {"gate": [[1.0, 0.0]] * 16}
    code, _, err = run(["report", "--config", write(tmp_path, cfg)], capsys)
    assert code == 1 and "unitary" in err


def test_bad_json_and_usage(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["report", "--config", str(p)], capsys)[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1


def test_sweep_depolarizing(capsys, tmp_path):
    cfg = {"noise": {"type": "depolarizing", "p": 0.0}}
    out_path = tmp_path / "s.json"
    code, out, _ = run(["sweep", "--config", write(tmp_path, cfg), "--param-range", "0:0.4:41",
                        "--out", str(out_path), "--workers", "4"], capsys)
    assert code == 0
    result = json.loads(out_path.read_text())
    ps = [r["p"] for r in result["rows"]]
    assert ps == sorted(ps) and len(ps) == 41
    for r in result["rows"]:
        assert r["capability"] == pytest.approx(1 - 3 * r["p"], abs=1e-12)
    assert abs(result["capability_crossing"] - 1 / 3) <= 0.01 + 1e-12
    below = [r for r in result["rows"] if r["p"] < 1 / 3]
    assert below[-1]["min_concurrence_exact"] > 0


def test_sweep_overrotation(capsys, tmp_path):
    cfg = {"noise": {"type": "overrotation", "theta": 0}}
    out_path = tmp_path / "s.json"
    assert run(["sweep", "--config", write(tmp_path, cfg), "--param-range", f"0:{np.pi}:9",
                "--out", str(out_path)], capsys)[0] == 0
    rows = json.loads(out_path.read_text())["rows"]
    assert all(abs(r["F_zz->zz"] - 1) < 1e-12 for r in rows)
    xx = [r["F_xx->xx"] for r in rows]
    assert all(a > b for a, b in zip(xx, xx[1:]))


def test_sweep_errors(capsys, tmp_path):
    cfg = write(tmp_path, {"noise": {"type": "depolarizing", "p": 0}})
    assert run(["sweep", "--config", cfg, "--param-range", "0:1:1"], capsys)[0] == 1
    assert run(["sweep", "--config", cfg, "--param-range", "a:b:c"], capsys)[0] == 1
    assert run(["sweep", "--config", cfg], capsys)[0] == 1
    assert run(["sweep", "--config", cfg, "--param-range", "0:1:3", "--param", "theta"], capsys)[0] == 1
    ideal = write(tmp_path, {"noise": {"type": "ideal"}}, "ideal.json")
    assert run(["sweep", "--config", ideal, "--param-range", "0:1:3"], capsys)[0] == 1


def test_parse_range_and_crossing():
    np.testing.assert_allclose(parse_range("0:1:3"), [0, 0.5, 1])
    with pytest.raises(ConfigError):
        parse_range("0:1")
    assert capability_crossing([0, 1, 2], [0.5, 0.1, -0.2]) == 2
    assert capability_crossing([0, 1], [0.5, 0.1]) is None


def test_verify_bounds(capsys, tmp_path):
    out_path = tmp_path / "v.json"
    code, _, _ = run(["verify-bounds", "--channels", "40", "--seed", "7", "--out", str(out_path)], capsys)
    assert code == 0
    summary = json.loads(out_path.read_text())
    assert summary["violations"] == 0 and summary["n_channels"] == 40


def test_verify_bounds_rank_one(capsys, tmp_path):
    code, out, _ = run(["verify-bounds", "--channels", "1", "--rank", "1", "--seed", "7"], capsys)
    assert code == 0
    assert json.loads(out)["violations"] == 0


def test_verify_bounds_rejects_zero(capsys):
    assert run(["verify-bounds", "--channels", "0"], capsys)[0] == 1


def test_verify_bounds_failure_exit_code(capsys, monkeypatch):
    import gate_witness.cli as cli

    monkeypatch.setattr(cli, "verify_ensemble", lambda *a: ({"pair_lower": -1.0}, [(3, "pair_lower", -1.0)]))
    code, out, err = run(["verify-bounds", "--channels", "5", "--seed", "9"], capsys)
    assert code == 2
    assert "seed 9 channel 3" in err


def test_invariant_violation_exit_code(capsys, tmp_path, monkeypatch):
    import gate_witness.cli as cli
    from gate_witness.exceptions import InvariantError

    def boom(*a, **k):
        raise InvariantError("broken")

    monkeypatch.setattr(cli, "build_report", boom)
    assert run(["report", "--config", write(tmp_path, {})], capsys)[0] == 2


def test_validate_config_accepts_all_channel_types():
    for noise in (
        {"type": "ideal"},
        {"type": "depolarizing", "p": 0.1},
        {"type": "dephasing", "p": "0.2", "qubit": "target", "axis": "y"},
        {"type": "overrotation", "theta": 1.5},
        {"type": "random", "rank": 4, "seed": 1},
    ):
        validate_config({"noise": noise, "mode": "analytic", "fidelities": ["zz", "F_xz->ent"]})


def test_log_env(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("GATE_WITNESS_LOG", "info")
    assert run(["table"], capsys)[0] == 0
