import json

import pytest

from scriptorium.cli import main


@pytest.fixture(scope="module")
def snapshot_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-kb") / "snap"
    code = main(["synth", "--seed", "7", "--classes", "8", "--fragments", "10",
                 "--out", str(out)])
    assert code == 0
    assert main(["ingest", str(out)]) == 0
    return out


def test_synth_then_ingest_exit_zero(snapshot_dir):
    assert (snapshot_dir / "manifest.json").is_file()
    assert (snapshot_dir / "stores" / "rubbings.jsonl").is_file()


def test_unknown_flag_exits_one(capsys):
    assert main(["--bogus"]) == 1
    assert main(["synth", "--not-a-flag", "x"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err


def test_missing_kb_is_runtime_error(capsys):
    assert main(["bench", "--kb", "/does/not/exist"]) == 2


def test_bench_oracle_all_perfect(snapshot_dir, tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main(["bench", "--kb", str(snapshot_dir), "--task", "all",
                 "--client", "oracle", "--seed", "7",
                 "--out", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    metrics = report["metrics"]
    for task, values in metrics.items():
        for name, value in values.items():
            if name.startswith(("acc", "recall", "map", "precision", "recall",
                                "f1", "coverage", "miou", "ssim")):
                assert value == pytest.approx(1.0), (task, name, value)
    assert metrics["detection"]["mre"] == 0.0


def test_bench_single_task(snapshot_dir, capsys):
    assert main(["bench", "--kb", str(snapshot_dir), "--task", "modality",
                 "--n", "8", "--client", "oracle"]) == 0
    out = capsys.readouterr().out
    assert "modality" in out and "acc@1" in out


def test_query_command(snapshot_dir, capsys):
    code = main(["query", "--kb", str(snapshot_dir),
                 "what catalogues mention token-C01"])
    assert code == 0
    out = capsys.readouterr().out
    assert "retrieve_texts" in out


def test_query_with_image(snapshot_dir, tmp_path, capsys):
    rubbing = snapshot_dir / "images" / "rubbings" / "synth-0000.png"
    code = main(["query", "--kb", str(snapshot_dir),
                 "Please analyze this rubbing.", "--image", str(rubbing),
                 "--trace"])
    assert code == 0
    out = capsys.readouterr().out
    assert "interpret_fragment" in out
