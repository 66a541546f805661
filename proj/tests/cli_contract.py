"""End-to-end contract checks for the command-line tool.

Covers the exit-code contract (0 pass / 1 check failure / 2 invalid input),
byte-identical reruns for identical configs, and the file layout of each
subcommand.  Invoked by ctest with the binary path as argv[1].
"""

import json
import pathlib
import subprocess
import sys
import tempfile

BIN = sys.argv[1]


def run(*args, **kw):
    return subprocess.run([BIN, *args], capture_output=True, text=True, **kw)


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def main():
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="sattn_cli_"))

    # --- sample-init writes a parseable configuration document ---
    out = tmp / "init.json"
    r = run("sample-init", "--kind", "separated", "--n", "6", "--k", "2", "--eps", "0.01",
            "--beta", "40", "--seed", "3", "--out", str(out))
    assert r.returncode == 0, r.stderr
    doc = json.loads(out.read_text())
    assert doc["dim"] == 2 and doc["n"] == 6 and len(doc["points"]) == 6

    # --- simulate: deterministic CSV bodies, nondecreasing energy ---
    sim_cfg = {
        "schema_version": 1,
        "kind": "simulate",
        "model": "sa",
        "beta": 4.0,
        "dim": 2,
        "integrator": {"scheme": "euler-project", "dt": 0.1, "t_max": 20.0, "cadence": 2},
        "init": {"kind": "uniform", "n": 5, "seed": 7},
    }
    cfg_path = write(tmp / "sim.json", sim_cfg)
    out1, out2 = tmp / "sim_run1", tmp / "sim_run2"
    assert run("simulate", "--config", cfg_path, "--out", str(out1)).returncode == 0
    assert run("simulate", "--config", cfg_path, "--out", str(out2)).returncode == 0
    body1 = (out1 / "trace.csv").read_bytes()
    body2 = (out2 / "trace.csv").read_bytes()
    assert body1 == body2, "identical configs must produce byte-identical traces"

    rows = body1.decode().strip().splitlines()
    assert rows[0] == "t,energy,energy_normalized,grad_norm,min_pair_dist"
    energies = [float(line.split(",")[2]) for line in rows[1:]]
    assert all(b >= a - 1e-6 for a, b in zip(energies, energies[1:]))
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["pass"] is True and manifest["config_hash"]

    # --- t_max = 0 yields a single record ---
    empty_cfg = dict(sim_cfg)
    empty_cfg["integrator"] = {"dt": 0.1, "t_max": 0.0}
    write(tmp / "empty.json", empty_cfg)
    assert run("simulate", "--config", str(tmp / "empty.json"), "--out", str(tmp / "e")).returncode == 0
    assert len((tmp / "e" / "trace.csv").read_text().strip().splitlines()) == 2

    # --- invalid input: unknown field -> exit 2, no partial outputs ---
    bad_cfg = dict(sim_cfg)
    bad_cfg["unknown_knob"] = True
    write(tmp / "bad.json", bad_cfg)
    r = run("simulate", "--config", str(tmp / "bad.json"), "--out", str(tmp / "bad_out"))
    assert r.returncode == 2, (r.returncode, r.stderr)
    assert not (tmp / "bad_out" / "trace.csv").exists()

    # --- refused certificate -> exit 2 with the condition named ---
    refused = {
        "schema_version": 1,
        "kind": "metastability",
        "model": "usa",
        "beta": 5.0,
        "dim": 2,
        "n": 5,
        "k": 2,
        "eps": 0.01,
        "center_separation": 1.5707963267948966,
        "seeds": [1],
    }
    write(tmp / "refused.json", refused)
    r = run("metastability", "--config", str(tmp / "refused.json"), "--out", str(tmp / "r"))
    assert r.returncode == 2, (r.returncode, r.stderr)
    assert "gamma" in (r.stderr + r.stdout)

    # --- accepted metastability batch -> exit 0, PASS lines, summary file ---
    meta_cfg = {
        "schema_version": 1,
        "kind": "metastability",
        "model": "usa",
        "beta": 10.0,
        "dim": 2,
        "n": 4,
        "eps": 0.01,
        "k": 2,
        "seeds": [1, 2, 3],
        "horizon_factor": 1.5,
    }
    write(tmp / "meta.json", meta_cfg)
    r = run("metastability", "--config", str(tmp / "meta.json"), "--out", str(tmp / "meta_out"),
            "--workers", "2")
    assert r.returncode == 0, (r.returncode, r.stdout, r.stderr)
    assert r.stdout.count("PASS") >= 3
    summary = json.loads((tmp / "meta_out" / "metastability_summary.json").read_text())
    assert len(summary) == 3
    for entry in summary:
        assert entry["pass"] is True

    # --- staircase from flags ---
    r = run("staircase", "--n", "3", "--c0", "0.05", "--beta-list", "60,90",
            "--out", str(tmp / "stair"))
    assert r.returncode == 0, (r.stdout, r.stderr)
    stair_summary = json.loads((tmp / "stair" / "staircase_summary.json").read_text())
    assert all(run_["merge_events"] == 2 for run_ in stair_summary["runs"])
    assert (tmp / "stair" / "staircase_beta60.csv").exists()
    assert (tmp / "stair" / "staircase_beta60_events.json").exists()

    # --- simulate with caps: per-cap columns appear in the trace ---
    capped = {
        "schema_version": 1,
        "kind": "simulate",
        "model": "usa",
        "beta": 12.0,
        "dim": 2,
        "integrator": {"dt": 0.01, "t_max": 2.0, "cadence": 10},
        "init": {"kind": "separated", "n": 4, "k": 2, "eps": 0.01, "seed": 5},
        "caps": {"eps": 0.01},
    }
    write(tmp / "capped.json", capped)
    assert run("simulate", "--config", str(tmp / "capped.json"), "--out", str(tmp / "cap")).returncode == 0
    header = (tmp / "cap" / "trace.csv").read_text().splitlines()[0]
    assert "eta_0" in header and "rho_1" in header and "var_1" in header

    # --- numeric abort: exit 3 with the abort recorded in the manifest ---
    blowup = dict(sim_cfg)
    blowup["integrator"] = {"dt": 1e160, "t_max": 2e160}
    write(tmp / "blowup.json", blowup)
    r = run("simulate", "--config", str(tmp / "blowup.json"), "--out", str(tmp / "blow"))
    assert r.returncode == 3, (r.returncode, r.stderr)
    blow_manifest = json.loads((tmp / "blow" / "manifest.json").read_text())
    assert blow_manifest["pass"] is False
    assert any("numeric abort" in n for n in blow_manifest["notes"])

    # --- plot-data emits tidy long-format rows ---
    r = run("plot-data", "--figure", "trajectory", "--config", cfg_path, "--out", str(tmp / "plot"))
    assert r.returncode == 0, (r.stdout, r.stderr)
    lines = (tmp / "plot" / "trajectory_long.csv").read_text().splitlines()
    assert lines[0] == "t,series,value"
    assert any(",angle_0," in ln for ln in lines)

    # --- verify gradients exits 0 and prints a PASS line (also via --suite) ---
    r = run("verify", "gradients")
    assert r.returncode == 0 and "[PASS]" in r.stdout
    r = run("verify", "--suite", "gradients")
    assert r.returncode == 0 and "[PASS]" in r.stdout

    # --- verify pl emits the diagnostics CSV and summary ---
    r = run("verify", "pl", "--out", str(tmp / "pl"))
    assert r.returncode == 0, (r.stdout, r.stderr)
    assert (tmp / "pl" / "pl.csv").read_text().startswith("t,H,bound,pass")
    pl_summary = json.loads((tmp / "pl" / "pl_summary.json").read_text())
    assert pl_summary["checks_passed"] == pl_summary["checks_total"] > 0

    print("cli contract: all checks passed")


if __name__ == "__main__":
    main()
