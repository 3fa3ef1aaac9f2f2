import csv
import io
import json
import os
import time

import numpy as np
import pytest
from pydantic import ValidationError

import main
from settings import VLTS_DIR_ENV, Algorithm
from solvers import hhk, sa
from tools import bench_tool
from tools.bench_tool import BenchModel, BenchSpec, BenchTool, load_model
from tools.generator_tool import GenSpec, scaling_family

SMALL = {"name": "small", "generator": {"num_states": 12, "num_labels": 2, "edge_density": 0.2, "seed": 1}}


def read_table(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text), delimiter="\t"))


class TestSpec:
    def test_one_source_per_model(self):
        with pytest.raises(ValidationError):
            BenchModel(name="x", path="m.aut", copies=2)

    def test_from_file(self, write_file):
        path = write_file("bench.json", json.dumps({"models": [SMALL], "algorithms": ["sa"]}))
        spec = BenchSpec.from_file(path)
        assert spec.algorithms == [Algorithm.SA]
        assert spec.models[0].generator == GenSpec(num_states=12, num_labels=2, edge_density=0.2, seed=1)

    def test_unknown_algorithm(self):
        with pytest.raises(ValidationError):
            BenchSpec(models=[SMALL], algorithms=["fastest"])

    def test_vlts_name_resolves_in_data_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(VLTS_DIR_ENV, str(tmp_path))
        (tmp_path / "tiny.aut").write_text('des (0,1,2)\n(0,"a",1)\n', encoding="utf-8")
        ks = load_model(BenchModel(name="tiny"))
        assert ks.num_states == 3


class TestRows:
    def test_row_columns(self):
        tool = BenchTool(BenchSpec(models=[SMALL, {"name": "scaled", "copies": 2}]))
        rows = tool.run()
        assert [r["model"] for r in rows] == ["small", "scaled"]
        for row in rows:
            assert set(row) <= set(tool.columns())
            assert row["blocks_created"] == 2 * (row["sim_blocks"] - row["initial_blocks"])
            assert float(row["time_sa"]) >= 0 and float(row["time_hhk"]) >= 0
        assert rows[1]["states"] == 16 and rows[1]["transitions"] == 24

    def test_hhk_skipped_above_limit(self, monkeypatch):
        monkeypatch.setattr(bench_tool, "HHK_BENCH_MAX_STATES", 4)
        row = BenchTool(BenchSpec(models=[{"name": "scaled", "copies": 1}])).run()[0]
        assert row["time_hhk"] == ""
        assert row["time_sa"] != ""

    def test_trace_memory(self):
        tool = BenchTool(BenchSpec(models=[SMALL], algorithms=["sa"], trace_memory=True))
        row = tool.run()[0]
        assert "peak_bytes_sa" in tool.columns()
        assert row["peak_bytes_sa"] > 0

    def test_parallel_rows_keep_order(self):
        models = [{"name": f"m{i}", "generator": {"num_states": 6 + i, "seed": i}} for i in range(3)]
        rows = BenchTool(BenchSpec(models=models, algorithms=["sa"], jobs=2)).run()
        assert [r["model"] for r in rows] == ["m0", "m1", "m2"]
        assert [r["states"] for r in rows] == [6, 7, 8]

    def test_table_is_tab_separated(self):
        tool = BenchTool(BenchSpec(models=[SMALL], algorithms=["sa"]))
        out = io.StringIO()
        tool.write_table(tool.run(), out)
        header = out.getvalue().splitlines()[0].split("\t")
        assert header == tool.columns()
        (row,) = read_table(out.getvalue())
        assert row["model"] == "small"
        assert float(row["time_sa"]) >= 0


class TestCommand:
    def test_bench_command_overrides(self, write_file):
        path = write_file("bench.json", json.dumps({"models": [SMALL]}))
        out = io.StringIO()
        assert main.main(["bench", "--spec", str(path), "--algos", "sa"], out=out) == main.EXIT_OK
        (row,) = read_table(out.getvalue())
        assert "time_hhk" not in row
        assert int(row["states"]) == 12

    def test_bench_command_bad_spec(self, write_file):
        path = write_file("bench.json", json.dumps({"models": [{"name": "x", "copies": 0}]}))
        assert main.main(["bench", "--spec", str(path)], out=io.StringIO()) == main.EXIT_INPUT


def _best_time(run, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        run()
        best = min(best, time.perf_counter() - started)
    return best


@pytest.mark.slow
@pytest.mark.skipif(not os.environ.get("SIMSHELL_SLOW_TESTS"), reason="set SIMSHELL_SLOW_TESTS=1 to run")
class TestScaling:
    """Trend checks on the replicated gadget; absolute times are never compared."""

    COPIES = [1042 * 2**k for k in range(5)]

    def test_sa_time_grows_linearly_with_transitions(self):
        transitions, times = [], []
        for copies in self.COPIES:
            ks = scaling_family(copies)
            transitions.append(ks.num_transitions)
            times.append(_best_time(lambda: sa(ks)))
        assert transitions[-1] >= 190_000
        slope = np.polyfit(np.log(transitions), np.log(times), 1)[0]
        assert slope <= 1.4

    def test_sa_beats_hhk(self):
        ks = scaling_family(bench_tool.HHK_BENCH_MAX_STATES // 8)
        assert _best_time(lambda: sa(ks), 1) < _best_time(lambda: hhk(ks), 1)
