import csv
import runpy
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def _main(name):
    return runpy.run_path(str(SCRIPTS / name))["main"]


def test_density_sweep_writes_both_densities(tmp_path):
    out = tmp_path / "sweep.csv"
    _main("density_sweep.py")(["--nodes", "40", "--n-grid", "4,40", "--subsets", "5", "--out", str(out)])
    rows = list(csv.DictReader(out.open()))
    assert {r["target_density"] for r in rows} == {"0.59", "0.2"}
    assert {r["flavor"] for r in rows} == {"r0", "rOmega0"}


def test_cm_scatter_rows_match_nodes(tmp_path):
    out = tmp_path / "scatter.csv"
    _main("cm_scatter.py")(["--nodes", "30", "--out", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == "y,x" and len(lines) == 31
