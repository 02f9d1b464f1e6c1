"""Frozen outputs. Regenerate only on an intentional model change:

    vsplit compare --config tests/golden/seeded_default.yaml --out tests/golden/seeded_default
"""
from pathlib import Path

import pytest

from vsplit import load_scenario
from vsplit.cli import main

GOLDEN = Path(__file__).parent / "golden"


def test_residential_jan_digest():
    expected = (GOLDEN / "residential_jan.digest").read_text(encoding="utf-8").strip()
    assert load_scenario(preset="residential_jan").digest() == expected


@pytest.mark.parametrize("name", ["schedule.csv", "steps.csv", "summary.csv"])
def test_seeded_compare_report(tmp_path, name):
    assert main(["compare", "--config", str(GOLDEN / "seeded_default.yaml"), "--out", str(tmp_path)]) == 0
    assert (tmp_path / name).read_bytes() == (GOLDEN / "seeded_default" / name).read_bytes()


def test_golden_optimum_matches_milp():
    pytest.importorskip("scipy")
    from milp_oracle import milp_optimum

    import csv

    with open(GOLDEN / "seeded_default" / "summary.csv", newline="", encoding="utf-8") as fh:
        frozen = {row["policy"]: float(row["total_cost"]) for row in csv.DictReader(fh)}
    value, _ = milp_optimum(load_scenario(GOLDEN / "seeded_default.yaml"))
    assert frozen["Optimal"] == pytest.approx(value, abs=5e-7)
