import json

import pytest

from clonescope.cli import main
from clonescope.config import SEED_ENV_VAR, load_config, parse_config_file
from clonescope.gbdt import save_model

from helpers import random_function


@pytest.fixture(scope="module")
def model_path(small_model, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.json"
    save_model(small_model, path)
    return str(path)


@pytest.fixture()
def source_file(tmp_path):
    def write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


# ── parse / decompose / extract ──────────────────────────────────


def test_parse_emits_stable_ast_json(source_file, tmp_path, capsys):
    path = source_file("f.sol", "function f(uint a) public { a = a + 1; }")
    out = tmp_path / "ast.json"
    assert main(["parse", path, "--json", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["schema_version"] == 1
    func = payload["functions"][0]
    assert func["name"] == "f"
    node = func["ast"]
    assert list(node) == ["kind", "value", "span", "children"]
    assert list(node["span"]) == ["sl", "sc", "el", "ec"]

    def no_floats(obj):
        if isinstance(obj, float):
            return False
        if isinstance(obj, dict):
            return all(no_floats(v) for v in obj.values())
        if isinstance(obj, list):
            return all(no_floats(v) for v in obj)
        return True

    assert no_floats(payload)


def test_parse_json_deterministic(source_file, tmp_path):
    path = source_file("f.sol", random_function(17))
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    main(["parse", path, "--json", str(out_a)])
    main(["parse", path, "--json", str(out_b)])
    assert out_a.read_bytes() == out_b.read_bytes()


def test_decompose_json(source_file, capsys):
    path = source_file("f.sol", "function f(uint a) public {\n    a = a + 1;\n    return a;\n}\n")
    assert main(["decompose", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    kinds = [tree["kind"] for tree in payload["trees"]]
    assert kinds == ["AssignmentOperation", "OtherOperation"]
    assert payload["trees"][0]["span"] == {"sl": 2, "sc": 5, "el": 2, "ec": 13}
    assert [tree["index"] for tree in payload["trees"]] == [0, 1]


def test_extract_json_sorted_tokens(source_file, capsys):
    path = source_file("f.sol", "function f(uint a) public {\n    uint b = a + a;\n}\n")
    assert main(["extract", path]) == 0
    payload = json.loads(capsys.readouterr().out)
    feats = payload["features"][0]
    assert feats["kind"] == "VariableDefinition"
    assert feats["bags"]["Identifier"] == ["ID", "ID", "ID"]
    for tokens in feats["bags"].values():
        assert tokens == sorted(tokens)


def test_function_selector(source_file, capsys):
    source = (
        "contract C {\n"
        "    function one() public { sha3(1); }\n"
        "    function two() public { sha3(2); }\n"
        "}\n"
    )
    path = source_file("c.sol", source)
    assert main(["decompose", path, "--function", "two"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["function"] == "C.two"


# ── compare exit codes ───────────────────────────────────────────


def test_identical_files_are_clones_exit_one(source_file, model_path, capsys):
    source = random_function(19)
    path_a = source_file("a.sol", source)
    path_b = source_file("b.sol", source)
    code = main(["compare", path_a, path_b, "--model", model_path, "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1
    assert payload["verdict"] == "clone"
    assert payload["s_a"] == 1.0
    assert payload["s_b"] == 1.0


def test_empty_function_is_error_exit_two(source_file, model_path, capsys):
    path_a = source_file("a.sol", "function a() public {}")
    path_b = source_file("b.sol", random_function(19))
    assert main(["compare", path_a, path_b, "--model", model_path]) == 2


def test_dissimilar_functions_exit_zero(source_file, model_path, small_corpus):
    templates, _ = small_corpus
    path_a = source_file("a.sol", templates[0][1])
    path_b = source_file("b.sol", templates[5][1])
    assert main(["compare", path_a, path_b, "--model", model_path]) == 0


def test_missing_file_is_error(model_path):
    assert main(["compare", "missing_a.sol", "missing_b.sol",
                 "--model", model_path]) == 2


# ── report bundle ────────────────────────────────────────────────


def test_report_bundle_files(source_file, model_path, tmp_path, capsys):
    source = random_function(25)
    path_a = source_file("a.sol", source)
    path_b = source_file("b.sol", source)
    out_dir = tmp_path / "bundle"
    code = main(["report", path_a, path_b, "--model", model_path,
                 "--out-dir", str(out_dir)])
    assert code == 1
    for name in ("report.json", "report.txt", "matches.csv", "similarity_matrix.png"):
        assert (out_dir / name).exists(), name
    text = (out_dir / "report.txt").read_text()
    assert "Verdict: CLONE" in text
    csv_lines = (out_dir / "matches.csv").read_text().strip().splitlines()
    assert csv_lines[0] == "a_start_line,a_end_line,b_start_line,b_end_line,score"
    assert len(csv_lines) > 1


def test_report_bundle_bytes_deterministic(source_file, model_path, tmp_path):
    source = random_function(26)
    path_a = source_file("a.sol", source)
    path_b = source_file("b.sol", source)
    dir_a = tmp_path / "one"
    dir_b = tmp_path / "two"
    main(["report", path_a, path_b, "--model", model_path, "--out-dir", str(dir_a)])
    main(["report", path_a, path_b, "--model", model_path, "--out-dir", str(dir_b)])
    assert (dir_a / "report.json").read_bytes() == (dir_b / "report.json").read_bytes()
    assert (dir_a / "matches.csv").read_bytes() == (dir_b / "matches.csv").read_bytes()


# ── sweep ────────────────────────────────────────────────────────


def test_sweep_rows_and_figure(model_path, small_corpus, tmp_path):
    _, records = small_corpus
    from clonescope.corpus import save_pairs

    pairs_path = tmp_path / "pairs.jsonl"
    save_pairs(records[:60], pairs_path)
    out_csv = tmp_path / "sweep.csv"
    fig = tmp_path / "sweep.png"
    code = main(["sweep", "--pairs", str(pairs_path), "--model", model_path,
                 "--out", str(out_csv), "--fig", str(fig)])
    assert code == 0
    rows = out_csv.read_text().strip().splitlines()
    assert rows[0] == "delta,precision,recall"
    assert len(rows) == 1 + 9  # 0.5..0.9 step 0.05
    assert fig.exists()


def test_sweep_single_delta(model_path, small_corpus, tmp_path):
    _, records = small_corpus
    from clonescope.corpus import save_pairs

    pairs_path = tmp_path / "pairs.jsonl"
    save_pairs(records[:30], pairs_path)
    out_csv = tmp_path / "sweep.csv"
    code = main(["sweep", "--pairs", str(pairs_path), "--model", model_path,
                 "--deltas", "0.7", "--out", str(out_csv)])
    assert code == 0
    assert len(out_csv.read_text().strip().splitlines()) == 2


# ── synth / train / optimize / group ─────────────────────────────


def test_synth_train_group_round_trip(tmp_path, capsys):
    templates_dir = tmp_path / "templates"
    pairs_path = tmp_path / "pairs.jsonl"
    assert main(["synth", "--templates", str(templates_dir), "--out", str(pairs_path),
                 "--generate", "6", "--seed", "2"]) == 0
    assert pairs_path.exists()

    model_out = tmp_path / "model.json"
    importance_csv = tmp_path / "importance.csv"
    importance_fig = tmp_path / "importance.png"
    assert main(["train", "--pairs", str(pairs_path), "--out", str(model_out),
                 "--importance", str(importance_csv), "--fig", str(importance_fig),
                 "--seed", "2"]) == 0
    assert model_out.exists() and importance_csv.exists() and importance_fig.exists()
    table = importance_csv.read_text().strip().splitlines()
    assert table[0] == "rank,feature,weight"

    groups_out = tmp_path / "groups.json"
    assert main(["group", "--corpus", str(templates_dir), "--model", str(model_out),
                 "--out", str(groups_out)]) == 0
    payload = json.loads(groups_out.read_text())
    members = [m for g in payload["groups"] for m in g["members"]]
    assert sorted(members) == list(range(6))


def test_train_is_byte_deterministic(tmp_path):
    templates_dir = tmp_path / "templates"
    pairs_path = tmp_path / "pairs.jsonl"
    main(["synth", "--templates", str(templates_dir), "--out", str(pairs_path),
          "--generate", "4", "--seed", "3"])
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    main(["train", "--pairs", str(pairs_path), "--out", str(out_a), "--seed", "3"])
    main(["train", "--pairs", str(pairs_path), "--out", str(out_b), "--seed", "3"])
    assert out_a.read_bytes() == out_b.read_bytes()


def test_optimize_cli_small_budget(tmp_path, capsys):
    templates_dir = tmp_path / "templates"
    pairs_path = tmp_path / "pairs.jsonl"
    main(["synth", "--templates", str(templates_dir), "--out", str(pairs_path),
          "--generate", "6", "--seed", "4"])
    hyper_out = tmp_path / "hyper.json"
    history = tmp_path / "history.jsonl"
    code = main(["optimize", "--train", str(pairs_path), "--val", str(pairs_path),
                 "--budget", "5", "--k", "4", "--steps", "4", "--seed", "4",
                 "--out", str(hyper_out), "--history", str(history)])
    assert code == 0
    payload = json.loads(hyper_out.read_text())
    assert set(payload["hyper"]) == {
        "num_leaves", "max_depth", "learning_rate", "num_rounds",
        "min_samples_leaf", "feature_fraction", "bagging_fraction",
    }
    assert len(history.read_text().strip().splitlines()) == 5


# ── config and seed resolution ───────────────────────────────────


def test_config_file_parsing(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("seed = 7\ndelta = 0.8  # tighter\nmode = literal\n")
    values = parse_config_file(config)
    assert values == {"seed": 7, "delta": 0.8, "mode": "literal"}


def test_env_seed_overrides_config(tmp_path, monkeypatch):
    config = tmp_path / "run.cfg"
    config.write_text("seed = 7\n")
    monkeypatch.setenv(SEED_ENV_VAR, "99")
    assert load_config(config).seed == 99


def test_flag_overrides_env(monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "99")
    assert load_config(None, overrides={"seed": 5}).seed == 5


def test_bad_config_key(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("unknown = 1\n")
    with pytest.raises(ValueError):
        parse_config_file(config)


def test_config_file_drives_compare(source_file, model_path, tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("delta = 0.25\nmode = literal\n")
    source = random_function(31)
    path_a = source_file("a.sol", source)
    path_b = source_file("b.sol", source)
    code = main(["--config", str(config), "compare", path_a, path_b,
                 "--model", model_path, "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1
    assert payload["delta"] == 0.25
    assert payload["mode"] == "literal"
    # flags still beat the config file
    main(["--config", str(config), "compare", path_a, path_b,
          "--model", model_path, "--delta", "0.99", "--mode", "proportion", "--json"])
    payload = json.loads(capsys.readouterr().out)
    assert payload["delta"] == 0.99
    assert payload["mode"] == "proportion"
