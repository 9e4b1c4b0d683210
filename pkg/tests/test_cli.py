import json
import subprocess
import sys

import numpy as np
import pytest

from pnel.cli import build_parser, main, resolve_config
from pnel.pipeline import toy_path
from pnel.pointer_net import init_model, load_checkpoint

FAST = ["--hidden", "8", "--attention-dim", "4", "--epochs", "2", "--top-l", "5"]


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    ckpt = root / "m.pnck"
    assert main(["train", "--toy", *FAST, "--checkpoint", str(ckpt)]) == 0
    return ckpt


def test_build_index(tmp_path, capsys):
    out = tmp_path / "i.pnix"
    assert main(["build-index", "--toy", "--index", str(out)]) == 0
    assert "n_docs=100" in capsys.readouterr().out
    first = out.read_bytes()
    assert main(["build-index", "--toy", "--index", str(out)]) == 0
    assert out.read_bytes() == first


def test_missing_entities_file(tmp_path, capsys):
    code = main(["build-index", "--entities", str(tmp_path / "nope.jsonl"), "--index", str(tmp_path / "i")])
    assert code == 2
    assert "entities file not found" in capsys.readouterr().err


def test_unknown_flag_exits_64():
    with pytest.raises(SystemExit) as exc:
        main(["build-index", "--bogus"])
    assert exc.value.code == 64


@pytest.mark.parametrize("command", ["build-index", "train", "link", "eval", "ablate", "gradcheck", "profile"])
def test_help_lists_flags(command, capsys):
    with pytest.raises(SystemExit) as exc:
        main([command, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    assert "--config" in text
    if command not in ("gradcheck", "build-index"):
        assert "--checkpoint" in text or "--train" in text


def test_precedence(tmp_path):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text(json.dumps({"epochs": 9, "hidden": 16, "seed": 3}))
    cfg = resolve_config({"epochs": 4}, str(cfg_file), env={"PNEL_SEED": "99"})
    assert (cfg.epochs, cfg.hidden, cfg.seed, cfg.lr) == (4, 16, 3, 0.001)


def test_seed_from_environment():
    assert resolve_config({}, None, env={"PNEL_SEED": "99"}).seed == 99
    assert resolve_config({"seed": 5}, None, env={"PNEL_SEED": "99"}).seed == 5
    assert resolve_config({}, None, env={}).seed == 7


def test_unknown_config_key(tmp_path, capsys):
    cfg_file = tmp_path / "run.json"
    cfg_file.write_text('{"hiden": 3}')
    assert main(["gradcheck", "--config", str(cfg_file)]) == 64
    assert "hiden" in capsys.readouterr().err


def test_train_outputs_and_determinism(tmp_path, trained):
    again = tmp_path / "again.pnck"
    assert main(["train", "--toy", *FAST, "--checkpoint", str(again)]) == 0
    hist_a = trained.with_suffix(".history.json").read_text()
    hist_b = again.with_suffix(".history.json").read_text()
    assert hist_a == hist_b
    assert len(json.loads(hist_a)["epoch_loss"]) == 2


def test_zero_epochs_keeps_initialisation(tmp_path):
    ckpt = tmp_path / "zero.pnck"
    assert main(["train", "--toy", *FAST[:4], "--epochs", "0", "--checkpoint", str(ckpt)]) == 0
    model = load_checkpoint(ckpt)
    fresh = init_model(model.config)
    assert all(np.array_equal(model.params[k], fresh.params[k]) for k in fresh.params)


def test_no_usable_episodes(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    data.write_text('{"id": "x", "question": "Who founded Tesla?", "entities": ["Q999999"]}\n')
    code = main(["train", "--toy", *FAST, "--train", str(data), "--checkpoint", str(tmp_path / "m")])
    assert code == 3
    assert "usable" in capsys.readouterr().err


def test_link_outputs(trained, capsys):
    assert main(["link", "--toy", "--top-l", "5", "--checkpoint", str(trained), "Who founded Tesla?"]) == 0
    lines = capsys.readouterr().out.split()
    assert len(lines) == len(set(lines))
    assert main(["link", "--toy", "--checkpoint", str(trained), "xyzzy plugh"]) == 0
    assert capsys.readouterr().out == ""


def test_link_verbose(trained, capsys):
    assert main(["link", "--toy", "--top-l", "5", "--verbose", "--checkpoint", str(trained),
                 "Who founded Tesla?"]) == 0
    for line in capsys.readouterr().out.splitlines():
        assert "anchor=" in line and "tile=" in line and "rank=" in line


def test_link_missing_checkpoint(tmp_path):
    assert main(["link", "--toy", "--checkpoint", str(tmp_path / "none"), "q"]) == 2


def test_eval_and_profile(trained, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["eval", "--toy", "--top-l", "5", "--checkpoint", str(trained), "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert 0.0 <= report["macro"]["f1"] <= 1.0
    assert len(report["per_question"]) == 10
    capsys.readouterr()
    assert main(["profile", "--toy", "--checkpoint", str(trained), "--k-values", "10,20,30"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["k"] for r in rows] == [10, 20, 30]


def test_eval_table_format(trained, capsys):
    assert main(["eval", "--toy", "--top-l", "5", "--checkpoint", str(trained), "--format", "table"]) == 0
    assert capsys.readouterr().out.splitlines()[0].split()[0] == "qid"


def test_bad_ablation_group(trained):
    assert main(["eval", "--toy", "--checkpoint", str(trained), "--ablate", "colour"]) == 64


def test_gradcheck(capsys):
    assert main(["gradcheck"]) == 0
    assert "max relative error" in capsys.readouterr().out
    assert main(["gradcheck", "--threshold", "1e-30"]) == 4


def test_parser_version():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["--version"])
    assert exc.value.code == 0


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "pnel.cli", "build-index", "--entities",
                          str(toy_path("entities.jsonl")), "--index", str(tmp_path / "i")],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "n_docs=100" in out.stdout
