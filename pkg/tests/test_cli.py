import json

import pytest

from vizrec.bundle import save_bundle
from vizrec.cli import dispatch, load_table_file

from conftest import write_corpus_file


@pytest.fixture(scope="module")
def model_path(small_bundle, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "m.kgv"
    save_bundle(small_bundle, path)
    return path


@pytest.fixture()
def csv_table(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text(
        "date,price\n2021-01-01,10.5\n2021-01-02,11.0\n2021-01-03,12.5\n",
        encoding="utf-8",
    )
    return path


class TestDispatch:
    def test_missing_model_is_usage_error(self, capsys):
        code = dispatch(["recommend", "--table", "t.csv"])
        assert code == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_unknown_flag_is_usage_error(self, capsys):
        code = dispatch(["rules", "--model", "m", "--bogus"])
        assert code == 1

    def test_unknown_command_is_usage_error(self):
        assert dispatch(["frobnicate"]) == 1

    def test_missing_file_is_runtime_error(self, capsys, tmp_path):
        code = dispatch(
            ["recommend", "--model", str(tmp_path / "nope.kgv"), "--table", "t.csv"]
        )
        assert code == 2

    def test_help_exits_zero(self):
        assert dispatch(["--help"]) == 0

    def test_recommend_writes_json(self, model_path, csv_table, tmp_path, capsys):
        out = tmp_path / "rec.json"
        code = dispatch(
            [
                "recommend",
                "--model", str(model_path),
                "--table", str(csv_table),
                "-k", "2",
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert len(payload["recommendations"]) == 2
        assert [r["rank"] for r in payload["recommendations"]] == [1, 2]
        for rec in payload["recommendations"]:
            cols = sorted(enc["column"] for enc in rec["encodings"])
            assert cols == [0, 1]

    def test_rules_output_bounded(self, model_path, tmp_path):
        out = tmp_path / "rules.json"
        code = dispatch(
            ["rules", "--model", str(model_path), "--per-type", "5", "--out", str(out)]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        total = sum(len(rules) for rules in payload["groups"].values())
        assert total <= 30
        assert set(payload["groups"]) == {"bar", "box", "heatmap", "histogram", "line", "scatter"}

    def test_train_then_recommend(self, tmp_path, csv_table, capsys):
        corpus = write_corpus_file(tmp_path, tables_per_family=4, rows=12, seed=1)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "dim": 16,
                    "batch_size": 32,
                    "steps": 60,
                    "n_neg": 4,
                    "seed": 3,
                    "learning_rate": 0.01,
                }
            )
        )
        model = tmp_path / "demo.kgv"
        telemetry = tmp_path / "loss.csv"
        code = dispatch(
            [
                "train",
                "--corpus", str(corpus),
                "--out", str(model),
                "--config", str(cfg_path),
                "--telemetry", str(telemetry),
            ]
        )
        assert code == 0
        assert model.exists()
        lines = telemetry.read_text().strip().splitlines()
        assert lines[0] == "step,loss"
        assert len(lines) > 1
        capsys.readouterr()
        code = dispatch(["recommend", "--model", str(model), "--table", str(csv_table)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["recommendations"]

    def test_evaluate_writes_report(self, tmp_path):
        corpus = write_corpus_file(tmp_path, tables_per_family=4, rows=12, seed=2)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps({"dim": 16, "batch_size": 32, "steps": 60, "n_neg": 4, "learning_rate": 0.01})
        )
        out = tmp_path / "report.json"
        code = dispatch(
            [
                "evaluate",
                "--corpus", str(corpus),
                "--folds", "3",
                "--config", str(cfg_path),
                "--out", str(out),
            ]
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert len(report["folds"]) == 3
        assert "mr" in report and "hits_at_2" in report and "axis_accuracy" in report


class TestTableLoading:
    def test_csv(self, csv_table):
        table = load_table_file(csv_table)
        assert [c.name for c in table.columns] == ["date", "price"]
        assert table.columns[0].general_type == "temporal"
        assert table.columns[1].specific_type == "decimal"

    def test_json(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(
            json.dumps(
                {"id": "tj", "columns": [{"name": "a", "values": [1, 2, None]}]}
            )
        )
        table = load_table_file(path)
        assert table.id == "tj"
        assert table.columns[0].specific_type == "integer"
        assert table.columns[0].values[2].is_missing


class TestRuleMatrix:
    def test_matrix_export(self, model_path, tmp_path):
        matrix_path = tmp_path / "matrix.json"
        code = dispatch(
            [
                "rules",
                "--model", str(model_path),
                "--out", str(tmp_path / "rules.json"),
                "--matrix", str(matrix_path),
            ]
        )
        assert code == 0
        matrix = json.loads(matrix_path.read_text())
        assert matrix["vis_types"] == ["bar", "box", "heatmap", "histogram", "line", "scatter"]
        assert len(matrix["scores"]) == len(matrix["features"])
        flat = [v for row in matrix["scores"] for v in row]
        assert all(0.0 <= v <= 1.0 for v in flat)
