"""End-to-end command-line pipeline: mine, generate, determinism, exit codes."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from precis.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture()
def fig_graph_path(tmp_path) -> Path:
    out = tmp_path / "graph.json"
    code = main(["mine", "--log", str(FIXTURES / "fig1a.sql"),
                 "--statements", str(FIXTURES / "basic.pilang"),
                 "--pairing", "all", "--out", str(out)])
    assert code == 0
    return out


class TestMineCommand:
    def test_fig_fixture(self, tmp_path, capsys, fig_graph_path):
        data = json.loads(fig_graph_path.read_text())
        assert len(data["nodes"]) == 4
        assert len(data["edges"]) == 4

    def test_dot_output(self, tmp_path):
        dot = tmp_path / "graph.dot"
        code = main(["mine", "--log", str(FIXTURES / "fig1a.sql"),
                     "--statements", str(FIXTURES / "basic.pilang"),
                     "--pairing", "all",
                     "--out", str(tmp_path / "g.json"), "--dot", str(dot)])
        assert code == 0
        text = dot.read_text()
        assert text.startswith("digraph") and "color=red" in text

    def test_missing_log(self, tmp_path, capsys):
        code = main(["mine", "--log", str(tmp_path / "nope.sql"),
                     "--statements", str(FIXTURES / "basic.pilang"),
                     "--out", str(tmp_path / "g.json")])
        assert code == 1
        assert "nope.sql" in capsys.readouterr().err

    def test_dirty_log_yields_diagnostics_exit(self, tmp_path):
        log = tmp_path / "dirty.sql"
        log.write_text("SELECT * FROM t;\nNOT EVEN SQL;\nSELECT * FROM u;\n")
        out = tmp_path / "g.json"
        code = main(["mine", "--log", str(log),
                     "--statements", str(FIXTURES / "basic.pilang"),
                     "--out", str(out)])
        assert code == 2
        assert len(json.loads(out.read_text())["nodes"]) == 2


class TestGenerateCommand:
    def test_fig_interface(self, tmp_path, capsys, fig_graph_path):
        out = tmp_path / "interface.json"
        code = main(["generate", "--graph", str(fig_graph_path),
                     "--budget", "10", "--out", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "coverage: 4/4" in stdout
        spec = json.loads(out.read_text())
        assert len(spec["panels"]) == 2
        widgets = [w for p in spec["panels"] for w in p["widgets"]]
        kinds = sorted(w["kind"] for w in widgets)
        assert kinds == ["checkbox", "dropdown"]
        dropdown = next(w for w in widgets if w["kind"] == "dropdown")
        assert dropdown["domain"]["options"] == ["UK", "US"]

    def test_zero_budget(self, tmp_path, fig_graph_path):
        out = tmp_path / "interface.json"
        assert main(["generate", "--graph", str(fig_graph_path),
                     "--budget", "0", "--out", str(out)]) == 0
        spec = json.loads(out.read_text())
        assert all(p["widgets"] == [] for p in spec["panels"])
        assert spec["stats"]["coverage"]["covered"] == 2

    def test_malformed_graph(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"nodes": "nope"}')
        code = main(["generate", "--graph", str(bad), "--budget", "5",
                     "--out", str(tmp_path / "i.json")])
        assert code == 1
        assert "malformed graph" in capsys.readouterr().err

    def test_costs_override(self, tmp_path, fig_graph_path):
        # Pricing the dropdown out of the budget pushes the filter slot onto
        # a textbox instead.
        costs = tmp_path / "costs.json"
        costs.write_text(json.dumps({"dropdown": {"c_c": 9.5}}))
        out = tmp_path / "interface.json"
        assert main(["generate", "--graph", str(fig_graph_path),
                     "--budget", "10", "--costs", str(costs),
                     "--out", str(out)]) == 0
        spec = json.loads(out.read_text())
        kinds = sorted(w["kind"] for p in spec["panels"] for w in p["widgets"])
        assert kinds == ["checkbox", "textbox"]
        assert spec["stats"]["C_c"] == 3.0

    def test_pipeline_byte_determinism(self, tmp_path):
        outputs = []
        for run in range(2):
            graph = tmp_path / f"g{run}.json"
            interface = tmp_path / f"i{run}.json"
            assert main(["mine", "--log", str(FIXTURES / "fig1a.sql"),
                         "--statements", str(FIXTURES / "basic.pilang"),
                         "--pairing", "all", "--out", str(graph)]) == 0
            assert main(["generate", "--graph", str(graph), "--budget", "10",
                         "--out", str(interface)]) == 0
            outputs.append((graph.read_bytes(), interface.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_budget_sweep_coverage_monotone(self, tmp_path):
        from precis.synthlog import ClusterSpec, generate_log
        import random

        log = generate_log([ClusterSpec(table="flights",
                                        filter_values=("NY", "CA", "TX"),
                                        threshold_values=("100", "200"),
                                        top_toggle=True)],
                           steps_per_cluster=12, rng=random.Random(3))
        log_path = tmp_path / "log.sql"
        log_path.write_text(log.text())
        graph = tmp_path / "g.json"
        assert main(["mine", "--log", str(log_path),
                     "--statements", str(FIXTURES / "standard.pilang"),
                     "--pairing", "all", "--out", str(graph)]) == 0
        coverages = []
        for budget in range(0, 11):
            out = tmp_path / f"i{budget}.json"
            assert main(["generate", "--graph", str(graph),
                         "--budget", str(budget), "--out", str(out)]) == 0
            coverages.append(json.loads(out.read_text())["stats"]["coverage"]["covered"])
        assert coverages == sorted(coverages)
