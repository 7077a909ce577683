"""plotkit tests: parsing, refusals, figure generation from handcrafted
CSVs, and the end-to-end regeneration from solver artifacts (driven through
the solver's command line, the only interface plotkit depends on)."""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from plotkit import (
    MetadataMismatch,
    ProfileSet,
    entropy_scatter_deviation,
    plot_entropy_plane,
    plot_field2d,
    plot_profiles,
    read_table,
)


def write_field_csv(path, problem="toy", t=0.0, n=16, dim=1, cells=None):
    x = np.linspace(0, 1, n)
    rho = 1.0 + 0.1 * np.sin(2 * np.pi * x)
    v = np.zeros(n)
    p = np.ones(n)
    e = 2.5 * np.ones(n)
    sigma = e * 1.0
    with open(path, "w") as fh:
        fh.write(f"# problem: {problem}\n# eos: {{}}\n# t: {t}\n")
        fh.write(f"# cells: {cells or n}\n# dim: {dim}\n# domain: 0 1\n")
        fh.write("x,rho,v,p,e,sigma\n")
        for k in range(n):
            fh.write(f"{x[k]},{rho[k]},{v[k]},{p[k]},{e[k]},{sigma[k]}\n")
    return path


def test_read_table_parses_metadata_and_columns(tmp_path):
    path = write_field_csv(tmp_path / "f.csv", t=0.25)
    table = read_table(path)
    assert table.problem == "toy"
    assert table.time == 0.25
    assert set(table.columns) == {"x", "rho", "v", "p", "e", "sigma"}
    assert len(table["rho"]) == 16


def test_profiles_single_and_overlay(tmp_path):
    a = write_field_csv(tmp_path / "a.csv")
    b = write_field_csv(tmp_path / "b.csv")
    out = plot_profiles(ProfileSet([("coarse", a)]), tmp_path / "one.png")
    assert Path(out).stat().st_size > 0
    out = plot_profiles(ProfileSet([("coarse", a), ("fine", b)], quantity="p"),
                        tmp_path / "two.png")
    assert Path(out).stat().st_size > 0


def test_profiles_refusals(tmp_path):
    a = write_field_csv(tmp_path / "a.csv", problem="toy")
    b = write_field_csv(tmp_path / "b.csv", problem="other")
    with pytest.raises(ValueError):
        plot_profiles(ProfileSet([]), tmp_path / "x.png")
    with pytest.raises(MetadataMismatch):
        plot_profiles(ProfileSet([("a", a), ("b", b)]), tmp_path / "x.png")
    with pytest.raises(ValueError):
        plot_profiles(ProfileSet([("a", a)], quantity="vorticity"), tmp_path / "x.png")


def test_entropy_plane_and_deviation(tmp_path):
    fields = write_field_csv(tmp_path / "f.csv")
    curve = tmp_path / "curve.csv"
    taus = np.linspace(0.5, 2.0, 50)
    with open(curve, "w") as fh:
        fh.write("# problem: toy\ntau,e\n")
        for tv in taus:
            fh.write(f"{tv},2.5\n")  # flat curve matching the constant e
    out = plot_entropy_plane(fields, curve, tmp_path / "plane.png")
    assert Path(out).stat().st_size > 0
    dev = entropy_scatter_deviation(read_table(fields), read_table(curve))
    assert dev == 0.0
    with pytest.raises(FileNotFoundError):
        plot_entropy_plane(fields, tmp_path / "missing.csv", tmp_path / "x.png")
    with pytest.raises(ValueError):
        plot_entropy_plane(fields, fields, tmp_path / "x.png")  # not a curve file


def test_field2d_requires_two_dimensions(tmp_path):
    one_d = write_field_csv(tmp_path / "f.csv")
    with pytest.raises(ValueError):
        plot_field2d(one_d, tmp_path / "x.png")


# ---------------------------------------------------------------------------
# end-to-end: regenerate the benchmark figures from solver artifacts
# ---------------------------------------------------------------------------


def solver(args, timeout=560):
    res = subprocess.run([sys.executable, "-m", "eulerkit.cli", *args],
                         capture_output=True, text=True, timeout=timeout)
    assert res.returncode == 0, res.stderr
    return res


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("runs")
    solver(["run", "--problem", "pull_apart_1d", "--cells", "200",
            "--t-final", "0.01", "--outdir", str(root / "pa200")])
    solver(["run", "--problem", "pull_apart_1d", "--cells", "400",
            "--t-final", "0.01", "--outdir", str(root / "pa400")])
    solver(["run", "--problem", "entropy_test", "--cells", "800",
            "--t-final", "0.01", "--outdir", str(root / "ent")])
    solver(["run", "--problem", "pull_apart_2d_corrected", "--cells", "32",
            "--t-final", "0.001", "--outdir", str(root / "p2d")])
    return root


def test_refinement_overlay_from_solver_runs(artifacts, tmp_path):
    for quantity in ("p", "rho"):
        out = plot_profiles(
            ProfileSet([("200 cells", artifacts / "pa200" / "fields_0.01.csv"),
                        ("400 cells", artifacts / "pa400" / "fields_0.01.csv")],
                       quantity=quantity),
            tmp_path / f"overlay_{quantity}.png",
        )
        assert Path(out).stat().st_size > 0


def test_entropy_plane_from_solver_runs(artifacts, tmp_path):
    initial = artifacts / "ent" / "fields_0.csv"
    final = artifacts / "ent" / "fields_0.01.csv"
    curve = artifacts / "ent" / "isentrope_curve.csv"
    for tag, csv in (("initial", initial), ("final", final)):
        out = plot_entropy_plane(csv, curve, tmp_path / f"plane_{tag}.png")
        assert Path(out).stat().st_size > 0
    # machine check re-done from the CSVs: the t=0 scatter sits on the curve
    dev0 = entropy_scatter_deviation(read_table(initial), read_table(curve))
    assert dev0 < 1e-6


def test_field2d_from_solver_run(artifacts, tmp_path):
    csv = artifacts / "p2d" / "fields_0.001.csv"
    out = plot_field2d(csv, tmp_path / "density.png", quantity="rho")
    assert Path(out).stat().st_size > 0


def test_cli_end_to_end(artifacts, tmp_path):
    from plotkit.cli import main

    assert main(["profiles", f"coarse={artifacts/'pa200'/'fields_0.01.csv'}",
                 f"fine={artifacts/'pa400'/'fields_0.01.csv'}",
                 "--quantity", "rho", "--out", str(tmp_path / "cli.png")]) == 0
    assert main(["entropy", str(artifacts / "ent" / "fields_0.csv"),
                 str(artifacts / "ent" / "isentrope_curve.csv"),
                 "--out", str(tmp_path / "cli_plane.png"),
                 "--max-deviation", "1e-6"]) == 0
    assert main(["field2d", str(artifacts / "p2d" / "fields_0.001.csv"),
                 "--out", str(tmp_path / "cli_2d.png")]) == 0
    assert main(["entropy", str(artifacts / "ent" / "fields_0.csv"),
                 str(tmp_path / "nope.csv"), "--out", str(tmp_path / "x.png")]) == 2
