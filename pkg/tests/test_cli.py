"""Command-line client, run as real subprocesses against the in-process service.

Claims covered:
    - bound/exact/simulate print the documented JSON with the right values
    - usage problems (contradictory selectors, missing flags, bad files)
      exit 2 with a one-line stderr diagnostic
    - verify emits the fixed CSV schema, exits 0 when every applicable
      bound dominates and 1 when a claimed certificate is falsified
    - outputs are byte-identical across runs and across MDEV_THREADS
    - rate fits a planted CSV exactly
"""

import json
import math
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "mdev.cli"]


def run_cli(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    env.pop("MDEV_THREADS", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, env=env, cwd=cwd
    )


def test_bound_theorem1_trivial_constant():
    res = run_cli("bound", "--theorem1", "--alpha", "0.5", "--x", "4", "--D", "1",
                  "--C1", "0", "--n", "1")
    assert res.returncode == 0
    body = json.loads(res.stdout)
    assert body["value"] == pytest.approx(2.0 * math.exp(-1.0), rel=1e-12)


def test_bound_pinelis_value():
    res = run_cli("bound", "--pinelis", "--n", "1", "--x-abs", "1", "--b", "1", "--D", "1")
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == pytest.approx(0.606531, abs=1e-6)


def test_bound_theorem2_zero():
    res = run_cli("bound", "--theorem2", "--p1", "3", "--p2", "3", "--r", "2",
                  "--D", "1", "--C1", "0", "--C2", "0", "--n", "5", "--x", "1")
    assert res.returncode == 0
    assert json.loads(res.stdout)["value"] == 0.0


def test_bound_selector_conflicts_exit_2():
    res = run_cli("bound", "--theorem1", "--fan", "--n", "1", "--x", "1")
    assert res.returncode == 2
    assert res.stderr.strip()
    res = run_cli("bound", "--n", "1", "--x", "1")
    assert res.returncode == 2


def test_bound_missing_params_exit_2():
    res = run_cli("bound", "--theorem1", "--n", "1", "--x", "1")
    assert res.returncode == 2
    assert "alpha" in res.stderr


def test_bound_numeric_overflow_exit_3():
    res = run_cli("bound", "--theorem2", "--p1", "3", "--p2", "2000", "--r", "2",
                  "--D", "1", "--C1", "1", "--C2", "1", "--n", "4", "--x", "1")
    assert res.returncode == 3
    assert res.stderr.strip()


def test_unreachable_server_exit_3():
    res = run_cli("--server", "http://127.0.0.1:9", "exact", "--n", "2", "--x", "0.5")
    assert res.returncode == 3
    assert "transport" in res.stderr


def test_exact_command():
    res = run_cli("exact", "--n", "4", "--x", "0.6")
    assert res.returncode == 0
    body = json.loads(res.stdout)
    assert body["p"] == "1/4" and body["hits"] == 4 and body["total"] == 16


def test_simulate_command_hits_oracle():
    res = run_cli("simulate", "--model", "rademacher_real", "--n", "4", "--x", "0.6",
                  "--paths", "20000", "--seed", "7")
    assert res.returncode == 0
    body = json.loads(res.stdout)
    assert body["ci_low"] <= 0.25 <= body["ci_high"]
    assert body["seed"] == 7 and body["paths"] == 20000


def test_simulate_model_args():
    res = run_cli("simulate", "--model", "pareto_radial", "--model-args",
                  '{"p": 4.0, "d": 2}', "--n", "8", "--x", "1.0",
                  "--paths", "2000", "--seed", "1")
    assert res.returncode == 0
    assert json.loads(res.stdout)["model"]["p"] == 4.0
    res = run_cli("simulate", "--model", "pareto_radial", "--model-args", "not json",
                  "--n", "8", "--x", "1.0", "--paths", "10", "--seed", "1")
    assert res.returncode == 2


def test_unknown_model_exit_2():
    res = run_cli("simulate", "--model", "nope", "--n", "2", "--x", "1.0",
                  "--paths", "10", "--seed", "0")
    assert res.returncode == 2


def write_campaign(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


GOOD_CAMPAIGN = {
    "models": [{"variant": "rademacher_real"}],
    "grid": {"n": [4, 8], "x": [0.5]},
    "paths": 20000,
    "seed": 11,
    "bounds": ["theorem1", "pinelis", "lv"],
}


def test_verify_exit_0_and_schema(tmp_path):
    camp = write_campaign(tmp_path / "c.json", GOOD_CAMPAIGN)
    res = run_cli("verify", "--campaign", camp)
    assert res.returncode == 0
    lines = res.stdout.splitlines()
    assert lines[0] == "model,n,x,paths,seed,p_hat,ci_low,ci_high,bound_name,bound_value,trivial,dominates"
    assert len(lines) == 1 + 2 * 3
    assert all(line.endswith(",true") for line in lines[1:])


def test_verify_out_file(tmp_path):
    camp = write_campaign(tmp_path / "c.json", GOOD_CAMPAIGN)
    out = tmp_path / "rows.csv"
    res = run_cli("verify", "--campaign", camp, "--out", str(out))
    assert res.returncode == 0
    assert res.stdout == ""
    assert out.read_text().splitlines()[0].startswith("model,")


def test_verify_falsification_exit_1(tmp_path):
    # claiming D = 1e-4 for the Euclidean plane is false; verify must catch it
    camp = write_campaign(tmp_path / "bad.json", {
        "models": [{
            "variant": "pareto_radial", "p": 3.0,
            "space": {"kind": "euclidean", "d": 2, "r": 2.0, "D": 1e-4},
        }],
        "grid": {"n": [4], "x": [0.3]},
        "paths": 20000,
        "seed": 5,
        "bounds": ["theorem2"],
    })
    res = run_cli("verify", "--campaign", camp)
    assert res.returncode == 1
    assert ",false" in res.stdout


def test_verify_bad_campaign_exit_2(tmp_path):
    camp = write_campaign(tmp_path / "c.json", {
        "models": [{"variant": "rademacher_real"}],
        "grid": {"n": [], "x": [0.5]}, "paths": 10, "seed": 0, "bounds": ["theorem1"],
    })
    assert run_cli("verify", "--campaign", camp).returncode == 2
    assert run_cli("verify", "--campaign", str(tmp_path / "missing.json")).returncode == 2
    (tmp_path / "garbage.json").write_text("{not json")
    assert run_cli("verify", "--campaign", str(tmp_path / "garbage.json")).returncode == 2


def test_outputs_byte_identical_across_runs_and_threads(tmp_path):
    camp = write_campaign(tmp_path / "c.json", {
        "models": [{"variant": "pareto_radial", "p": 3.0}, {"variant": "product_y0"}],
        "grid": {"n": [8, 16], "x": [0.5, 1.0]},
        "paths": 20000,
        "seed": 3,
        "bounds": ["theorem1", "theorem2"],
    })
    outs = set()
    for threads in ("1", "4", "1"):
        res = run_cli("verify", "--campaign", camp, env_extra={"MDEV_THREADS": threads})
        assert res.returncode == 0
        outs.add(res.stdout)
    assert len(outs) == 1
    sims = {
        run_cli("simulate", "--model", "weibull_radial", "--n", "16", "--x", "0.7",
                "--paths", "30000", "--seed", "2",
                env_extra={"MDEV_THREADS": threads}).stdout
        for threads in ("1", "4")
    }
    assert len(sims) == 1


def test_rate_planted_csv(tmp_path):
    csv_path = tmp_path / "rates.csv"
    rows = ["n,p_hat"] + [f"{n},{math.exp(-2.0 * math.sqrt(n))!r}" for n in (4, 9, 16, 25)]
    csv_path.write_text("\n".join(rows) + "\n")
    res = run_cli("rate", "--family", "log_linear_in_n_alpha", "--alpha", "0.5",
                  "--csv", str(csv_path))
    assert res.returncode == 0
    assert json.loads(res.stdout)["slope"] == pytest.approx(-2.0, abs=1e-9)
    res = run_cli("rate", "--family", "log_log")
    assert res.returncode == 2


def test_optimize_command():
    res = run_cli("optimize", "--theorem1", "--alpha", "0.5", "--C1", "1", "--D", "1",
                  "--n", "100", "--x", "1", "--t-points", "8", "--u-points", "8")
    assert res.returncode == 0
    body = json.loads(res.stdout)
    assert body["value"] <= body["paper_value"]
    assert body["n"] == 100 and body["kind"] == "theorem1"  # input echo
    res = run_cli("optimize", "--theorem1", "--theorem2-q", "--n", "4", "--x", "1")
    assert res.returncode == 2


def test_campaign_output_path_field(tmp_path):
    dest = tmp_path / "from_campaign.csv"
    camp = dict(GOOD_CAMPAIGN, output={"path": str(dest), "format": "csv"})
    res = run_cli("verify", "--campaign", write_campaign(tmp_path / "c.json", camp))
    assert res.returncode == 0
    assert res.stdout == ""
    assert dest.read_text().startswith("model,")


def test_remote_server_round_trip(tmp_path):
    """`mdev serve` plus `--server` reproduces the in-process outputs."""
    import time
    import urllib.request

    port = "8731"
    env = dict(os.environ)
    proc = subprocess.Popen(
        CLI + ["serve", "--host", "127.0.0.1", "--port", port],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL, env=env,
    )
    try:
        deadline = time.monotonic() + 30.0
        while True:
            try:
                with urllib.request.urlopen(f"http://127.0.0.1:{port}/health", timeout=1):
                    break
            except OSError:
                if time.monotonic() > deadline:
                    raise
                time.sleep(0.2)
        remote = run_cli("--server", f"http://127.0.0.1:{port}",
                         "exact", "--n", "4", "--x", "0.6")
        local = run_cli("exact", "--n", "4", "--x", "0.6")
        assert remote.returncode == 0
        assert remote.stdout == local.stdout
    finally:
        proc.terminate()
        proc.wait(timeout=10)
