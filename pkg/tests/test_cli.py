import json

import numpy as np
import pytest

from greedymc import benchlab, cli, synthgen


def run_cli(*argv):
    return cli.run(list(argv))


def gen_args(path, n=24, rank=1, density=0.9, error_rate=0.1, seed=7):
    return [
        "generate", "--n", str(n), "--rank", str(rank), "--density", str(density),
        "--error-rate", str(error_rate), "--model", "gauss", "--seed", str(seed),
        "--out", str(path),
    ]


def sweep_config(tmp_path, **overrides):
    config = {
        "rank": 1,
        "solvers": ["alm_only"],
        "x_axis": "density",
        "x_grid": [0.8, 1.0],
        "scan_axis": "error_rate",
        "scan_grid": [0.02, 0.05],
        "n": 24,
        "trials_per_point": 2,
        "seed_base": 11,
        "alm": {"lambda": 0.3},
        "greedy": {"max_outer": 3},
    }
    config.update(overrides)
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(config))
    return path


def test_generate_writes_readable_instance(tmp_path, capsys):
    out = tmp_path / "inst.bin"
    assert run_cli(*gen_args(out)) == 0
    assert "wrote" in capsys.readouterr().out
    inst = synthgen.read_instance(out)
    assert inst.spec.n == 24
    assert inst.spec.error_model == "additive_gaussian"


def test_generate_is_byte_deterministic(tmp_path):
    a = tmp_path / "a.bin"
    b = tmp_path / "b.bin"
    assert run_cli(*gen_args(a)) == 0
    assert run_cli(*gen_args(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_rejects_bad_rank(tmp_path):
    assert run_cli(*gen_args(tmp_path / "x.bin", rank=24)) == 1


def test_unknown_arguments_exit_1(tmp_path):
    assert run_cli("generate", "--frobnicate") == 1
    assert run_cli("frobnicate") == 1


def test_solve_prints_rel_error_and_writes_report(tmp_path, capsys):
    inst_path = tmp_path / "inst.bin"
    run_cli(*gen_args(inst_path, n=32, rank=2, density=0.9, error_rate=0.05))
    report_path = tmp_path / "report.json"
    dump_path = tmp_path / "estimate.f64"
    code = run_cli(
        "solve", "--in", str(inst_path), "--solver", "sgmca",
        "--lambda", "0.3", "--max-outer", "3",
        "--report", str(report_path), "--dump-estimate", str(dump_path),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "rel_error=" in out
    report = json.loads(report_path.read_text())
    assert report["solver"] == "sgmca"
    assert report["rel_error"] < 1e-3
    assert report["total_svds"] > 0
    estimate = np.frombuffer(dump_path.read_bytes(), dtype="<f8")
    assert estimate.size == 32 * 32


def test_solve_alm_uses_default_lambda(tmp_path, capsys):
    inst_path = tmp_path / "inst.bin"
    run_cli(*gen_args(inst_path, n=25, rank=1, density=1.0, error_rate=0.0))
    assert run_cli("solve", "--in", str(inst_path), "--solver", "alm") == 0
    out = capsys.readouterr().out
    assert "lambda=0.2" in out  # 1/sqrt(25)


def test_solve_missing_input_exits_3(tmp_path):
    assert run_cli("solve", "--in", str(tmp_path / "nope.bin")) == 3


def test_numeric_failure_exits_2(tmp_path, monkeypatch):
    from greedymc.errors import NumericError

    inst_path = tmp_path / "inst.bin"
    run_cli(*gen_args(inst_path))

    def boom(*args, **kwargs):
        raise NumericError("synthetic failure")

    monkeypatch.setattr(cli.sgmca, "solve", boom)
    assert run_cli("solve", "--in", str(inst_path), "--solver", "sgmca") == 2


def test_sweep_writes_csv_and_plot(tmp_path, capsys):
    cfg = sweep_config(tmp_path)
    csv_path = tmp_path / "curve.csv"
    svg_path = tmp_path / "curve.svg"
    code = run_cli("sweep", "--config", str(cfg), "--out-csv", str(csv_path),
                   "--out-plot", str(svg_path))
    assert code == 0
    points = benchlab.parse_csv(csv_path.read_text())
    assert [p.x for p in points] == [0.8, 1.0]
    assert all(p.solver == "alm_only" for p in points)
    assert svg_path.exists()
    out = capsys.readouterr().out
    assert benchlab.CSV_HEADER in out


def test_sweep_is_byte_deterministic(tmp_path):
    cfg = sweep_config(tmp_path)
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli("sweep", "--config", str(cfg), "--out-csv", str(a)) == 0
    assert run_cli("sweep", "--config", str(cfg), "--out-csv", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_compare_runs_both_solvers(tmp_path):
    cfg = sweep_config(tmp_path, x_grid=[1.0], scan_grid=[0.02])
    csv_path = tmp_path / "cmp.csv"
    assert run_cli("compare", "--config", str(cfg), "--out-csv", str(csv_path)) == 0
    points = benchlab.parse_csv(csv_path.read_text())
    assert sorted({p.solver for p in points}) == ["alm_only", "sgmca"]


def test_sweep_rejects_bad_configs(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run_cli("sweep", "--config", str(broken), "--out-csv",
                   str(tmp_path / "x.csv")) == 1

    unknown = sweep_config(tmp_path, banana=1)
    assert run_cli("sweep", "--config", str(unknown), "--out-csv",
                   str(tmp_path / "y.csv")) == 1

    missing = tmp_path / "absent.json"
    assert run_cli("sweep", "--config", str(missing), "--out-csv",
                   str(tmp_path / "z.csv")) == 3


def test_sweep_config_accepts_all_solver_fields(tmp_path):
    cfg = sweep_config(
        tmp_path,
        x_grid=[1.0],
        scan_grid=[0.02],
        alm={
            "lambda": 0.3, "mu0_factor": 0.3, "rho_base": 1.1, "rho_slope": 0.5,
            "tol": 1e-6, "max_iter": 100, "rank_cap": None,
            "inf_norm_mode": "operator",
        },
        greedy={"t1_factor": 0.3, "decay": 0.65, "max_outer": 2, "min_density": 0.01},
        error_model="additive_gaussian",
        success_tol=1e-3,
    )
    csv_path = tmp_path / "full.csv"
    assert run_cli("sweep", "--config", str(cfg), "--out-csv", str(csv_path)) == 0
    points = benchlab.parse_csv(csv_path.read_text())
    assert points[0].lam == 0.3
