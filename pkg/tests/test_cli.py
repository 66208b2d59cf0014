"""Command-line interface: exit codes, output, flag handling."""

import json
import re

import numpy as np
import pytest

from jrpnet.cli import main
from jrpnet.config import PipelineConfig
from jrpnet.errors import (
    DegenerateInputError,
    FormatError,
    InputError,
    JrpnetError,
    NumericError,
    ParseError,
    SchemaError,
)
from jrpnet.synth import three_regime_specs, write_dataset

SMALL_CONFIG = {"k_folds": 2, "n_null": 2, "lambda_points": 4, "tau_max": 8, "m_max": 6}


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("cli-data")
    specs, labels = three_regime_specs(n_per_regime=2, seed=11, length_samples=640)
    write_dataset(specs, labels, data_dir)
    return data_dir


@pytest.fixture(scope="module")
def config_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli-cfg") / "config.json"
    path.write_text(json.dumps(SMALL_CONFIG))
    return path


def test_error_hierarchy():
    assert issubclass(FormatError, InputError)
    assert issubclass(ParseError, InputError)
    assert issubclass(SchemaError, InputError)
    assert issubclass(DegenerateInputError, NumericError)
    assert issubclass(InputError, JrpnetError)
    assert issubclass(NumericError, JrpnetError)
    assert not issubclass(NumericError, InputError)


def test_synth_preset(tmp_path, capsys):
    spec = tmp_path / "dataset.json"
    spec.write_text(json.dumps({"preset": "three_regime", "n_per_regime": 1, "seed": 4,
                                "length_samples": 64}))
    out = tmp_path / "out"
    assert main(["synth", "--spec", str(spec), "--out", str(out)]) == 0
    assert "wrote 3 trials" in capsys.readouterr().out
    assert (out / "labels.csv").is_file()
    assert (out / "dense_000.csv").is_file()
    assert (out / "dense_000.schema.json").is_file()
    assert (out / "dense_000.spec.json").is_file()


def test_synth_single_spec_and_seed_override(tmp_path, capsys):
    raw = {
        "n_channels": 2,
        "modality_map": {"a": "EEG", "b": "EMG"},
        "coupling_matrix": [[0.0, 0.2], [0.2, 0.0]],
        "length_samples": 32,
        "trial_id": "solo",
    }
    spec = tmp_path / "solo.json"
    spec.write_text(json.dumps(raw))
    out1, out2, out3 = tmp_path / "o1", tmp_path / "o2", tmp_path / "o3"
    assert main(["synth", "--spec", str(spec), "--out", str(out1)]) == 0
    assert main(["synth", "--spec", str(spec), "--out", str(out2), "--seed", "9"]) == 0
    assert main(["synth", "--spec", str(spec), "--out", str(out3)]) == 0
    capsys.readouterr()
    base = (out1 / "solo.csv").read_bytes()
    assert base == (out3 / "solo.csv").read_bytes()
    assert base != (out2 / "solo.csv").read_bytes()
    assert json.loads((out2 / "solo.spec.json").read_text())["seed"] == 9


def test_pipeline_command(dataset, config_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "pipeline", "--in", str(dataset), "--out", str(out),
        "--config", str(config_file),
    ])
    assert code == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l]
    assert len(lines) == 4
    pattern = re.compile(
        r"^(valence|arousal)/(JDET|JLAM): accuracy [01]\.\d{3} at lambda [0-9.e+-]+$"
    )
    for line in lines:
        assert pattern.match(line), line
    assert (out / "evaluation.json").is_file()
    assert (out / "model_arousal_JLAM.json").is_file()


def test_metric_flag_restricts_outputs(dataset, config_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "analyze", "--in", str(dataset), "--out", str(out),
        "--config", str(config_file), "--metric", "JDET",
    ])
    assert code == 0
    binaries = sorted(p.name for p in (out / "networks").glob("*.binary.jsonl"))
    assert binaries
    assert all(".JDET." in name for name in binaries)


def test_embed_params_prints_the_artifact(dataset, config_file, tmp_path, capsys):
    out = tmp_path / "out"
    code = main([
        "embed-params", "--in", str(dataset), "--out", str(out),
        "--config", str(config_file), "--seed", "3",
    ])
    assert code == 0
    printed = json.loads(capsys.readouterr().out)
    assert set(printed) == {
        "dense_000", "dense_001", "none_000", "none_001", "sparse_000", "sparse_001"
    }
    artifact = json.loads((out / "embedding_params.json").read_text())
    assert artifact["config"]["seed"] == 3
    assert artifact["config"]["k_folds"] == 2
    sample = printed["dense_000"]["m1a"]
    assert set(sample) == {"tau", "m", "saturated", "epsilon"}


def test_missing_labels_exits_2(dataset, config_file, tmp_path, capsys):
    nolabel = tmp_path / "nolabel"
    nolabel.mkdir()
    for path in dataset.iterdir():
        if path.name != "labels.csv":
            (nolabel / path.name).write_bytes(path.read_bytes())
    out = tmp_path / "out"
    code = main([
        "evaluate", "--in", str(nolabel), "--out", str(out),
        "--config", str(config_file),
    ])
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "labels" in err


def test_degenerate_trial_exits_3(tmp_path, capsys):
    # 60 samples at 10 Hz: the 5 s window fits, the delay scan cannot run
    rng = np.random.default_rng(0)
    data_dir = tmp_path / "tiny"
    data_dir.mkdir()
    rows = ["a,b"] + [f"{rng.normal()!r},{rng.normal()!r}" for _ in range(60)]
    (data_dir / "t1.csv").write_text("\n".join(rows) + "\n")
    (data_dir / "t1.schema.json").write_text(
        json.dumps({"sampling_rate_hz": 10.0, "channels": {"a": "EEG", "b": "EMG"}})
    )
    (data_dir / "labels.csv").write_text("trial_id,valence,arousal\nt1,5.0,5.0\n")
    out = tmp_path / "out"
    code = main(["embed-params", "--in", str(data_dir), "--out", str(out)])
    assert code == 3
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "t1" in err  # stage context names the failing trial


def test_bad_invocations(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["pipeline", "--in", str(tmp_path)])  # --out is required
    with pytest.raises(SystemExit):
        main(["analyze", "--in", ".", "--out", ".", "--metric", "DET"])
    with pytest.raises(SystemExit):
        main(["no-such-command"])
    capsys.readouterr()


def test_nonexistent_data_dir_exits_2(tmp_path, capsys):
    code = main(["features", "--in", str(tmp_path / "missing"), "--out", str(tmp_path)])
    assert code == 2
    assert "does not exist" in capsys.readouterr().err


def test_config_file_validation_error_exits_2(dataset, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"overlap": 2.0}))
    code = main([
        "features", "--in", str(dataset), "--out", str(tmp_path / "out"),
        "--config", str(bad),
    ])
    assert code == 2
    assert "overlap" in capsys.readouterr().err
