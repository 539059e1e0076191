import json
import math

import pytest

from kemst.cli import main
from kemst.scenario_io import save_scenario
from kemst.scenarios import gen_stationary


def run_cli(args):
    return main(args)


def test_gen_then_run_event(tmp_path, capsys):
    out = tmp_path / "cheb.json"
    assert run_cli(["gen", "chebyshev", "--s", "3", "--n", "11", "--k", "0.1",
                    "--out", str(out)]) == 0
    assert out.exists()
    assert run_cli(["run-event", str(out), "--out-dir", str(tmp_path)]) == 0
    captured = capsys.readouterr().out.splitlines()
    summary = captured[-1]
    assert summary.startswith("chebyshev_s3_n11 events=")
    events = int(summary.split("events=")[1].split()[0])
    assert events <= math.ceil(9 / 0.1)
    csv_path = tmp_path / "chebyshev_s3_n11_event.csv"
    header = csv_path.read_text().splitlines()[0]
    assert header == "time,event_type,tree_length,opt_length,ratio,displacement_since_ref"


def test_run_event_stationary_summary(tmp_path, capsys):
    sc_path = tmp_path / "still.json"
    save_scenario(sc_path, gen_stationary([[0.2, 0.2], [0.8, 0.6]], k=0.1))
    assert run_cli(["run-event", str(sc_path), "--out-dir", str(tmp_path)]) == 0
    assert "events=0" in capsys.readouterr().out


def test_oracle_on_generator_name(tmp_path, capsys, pinned):
    assert run_cli([
        "oracle", "--scenario", "circle", "--n", "7", "--mode", "slide",
        "--time-steps", str(pinned["settings"]["oracle_time_steps"]),
        "--e-len", str(pinned["settings"]["oracle_e_len"]),
    ]) == 0
    out = capsys.readouterr().out
    value = float(out.split("oracle_ratio=")[1])
    assert value == pytest.approx(pinned["circle_oracle_slide"]["7"], rel=1e-6)


def test_run_topo_diamond(tmp_path, capsys):
    assert run_cli([
        "run-topo", "diamond", "--per-side", "4", "--mode", "rotation",
        "--samples", "8", "--grid", "129", "--out-dir", str(tmp_path),
    ]) == 0
    out = capsys.readouterr().out
    ratio = float(out.split("max_ratio=")[1].split()[0])
    assert ratio >= (10 - 2 * math.sqrt(2)) / (9 - 2 * math.sqrt(2)) - 1e-6
    assert (tmp_path / "diamond_q4_topo.csv").exists()


def test_run_lipschitz_split(tmp_path, capsys):
    assert run_cli([
        "run-lipschitz", "split", "--n", "16", "--K", "0.02",
        "--samples", "9", "--out-dir", str(tmp_path),
    ]) == 0
    out = capsys.readouterr().out
    assert "events=0" in out  # no slide completes at this budget
    csv_path = tmp_path / "split_n16_lipschitz.csv"
    assert csv_path.read_text().splitlines()[0] == (
        "time,active_slides,completed_slides,tree_length,opt_length,ratio"
    )


def test_audit_subcommand_passes(tmp_path, capsys):
    sc_path = tmp_path / "c.json"
    assert run_cli(["gen", "chebyshev", "--s", "2", "--n", "6", "--k", "0.2",
                    "--out", str(sc_path)]) == 0
    assert run_cli(["audit", str(sc_path), "--samples", "16"]) == 0
    assert "max_slack" in capsys.readouterr().out


def test_bad_flags_exit_two(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run_cli(["run-event"])  # missing scenario
    assert exc.value.code == 2
    assert run_cli(["run-event", "no-such-generator", "--out-dir", str(tmp_path)]) == 2


def test_svg_emission(tmp_path):
    sc_path = tmp_path / "c.json"
    run_cli(["gen", "chebyshev", "--s", "2", "--n", "5", "--k", "0.2",
             "--out", str(sc_path)])
    run_cli(["run-event", str(sc_path), "--out-dir", str(tmp_path), "--svg"])
    svg = (tmp_path / "chebyshev_s2_n5_event.svg").read_text()
    assert svg.startswith("<svg") and "<polyline" in svg


def test_jobs_parallel_runs(tmp_path, capsys):
    paths = []
    for s in (2, 3):
        p = tmp_path / f"c{s}.json"
        run_cli(["gen", "chebyshev", "--s", str(s), "--n", "5", "--k", "0.2",
                 "--out", str(p)])
        paths.append(str(p))
    capsys.readouterr()
    assert run_cli(["run-event", *paths, "--out-dir", str(tmp_path), "--jobs", "2"]) == 0
    out = capsys.readouterr().out
    assert "chebyshev_s2_n5" in out and "chebyshev_s3_n5" in out


def test_every_generator_reachable_via_gen(tmp_path):
    flags = {
        "chebyshev": ["--s", "3", "--n", "5"],
        "rational-bumps": ["--s", "4", "--n", "4"],
        "circle": ["--n", "6"],
        "diamond": ["--per-side", "4"],
        "split": ["--n", "6"],
    }
    from kemst.scenarios import GENERATORS

    assert set(flags) == set(GENERATORS)
    for name, extra in flags.items():
        out = tmp_path / f"{name}.json"
        assert run_cli(["gen", name, *extra, "--out", str(out)]) == 0
        assert json.loads(out.read_text())["generator"]["name"] == name


def test_out_dir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KEMST_OUT_DIR", str(tmp_path / "envout"))
    sc_path = tmp_path / "c.json"
    run_cli(["gen", "chebyshev", "--s", "2", "--n", "5", "--k", "0.2",
             "--out", str(sc_path)])
    run_cli(["run-event", str(sc_path)])
    assert (tmp_path / "envout" / "chebyshev_s2_n5_event.csv").exists()
