import csv
import io
import json

import pytest

from corefdiv.cli import main
from corefdiv.samples import parse_dir, sample_path

T3 = str(sample_path("news"))
T3MIN = str(sample_path("news_minspan"))


def run(*argv):
    buf = io.StringIO()
    code = main(list(map(str, argv)), out=buf)
    return code, buf.getvalue()


def test_validate_ok():
    code, out = run("validate", T3)
    assert code == 0 and out.startswith("ok")


def test_validate_errors(tmp_path):
    data = json.loads(open(T3).read())
    data["chains"][0]["mentions"][0]["head"] = 99
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    code, out = run("validate", p)
    assert code == 2
    assert "head_outside_span" in out


def test_missing_file_is_io_error(tmp_path):
    code, _ = run("stats", tmp_path / "nope.json")
    assert code == 1


def test_convert_round_trip(tmp_path):
    conll = tmp_path / "t3.conll"
    assert run("convert", T3, conll, "--grouping", "subtopic")[0] == 0
    back = tmp_path / "back.json"
    assert run("convert", conll, back)[0] == 0
    data = json.loads(back.read_text())
    assert sorted(len(c["mentions"]) for c in data["chains"]) == [6, 6]


def test_stats_table_and_json(tmp_path):
    code, out = run("stats", T3, "--out", tmp_path)
    assert code == 0
    assert "Phrasing diversity (PD)*" in out
    assert "1.5" in out
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["mentions"] == 12 and summary["chains"] == 2
    assert summary["pd_weighted"] == pytest.approx(23 / 15)


def test_stats_two_datasets(tmp_path):
    code, out = run("stats", T3, T3MIN, "--labels", "max", "min", "--out", tmp_path)
    assert code == 0
    assert (tmp_path / "max.summary.json").exists() and (tmp_path / "min.summary.json").exists()
    header = out.splitlines()[0].split()
    assert header[-2:] == ["max", "min"]


def test_diversity_csv(tmp_path):
    code, _ = run("diversity", T3, "--out", tmp_path)
    assert code == 0
    rows = list(csv.DictReader(open(tmp_path / "chains.csv")))
    assert [(r["chain_id"], r["size"], r["unique_lemmas"]) for r in rows] == \
        [("chain1", "6", "2"), ("chain2", "6", "2")]
    assert float(rows[0]["pd"]) == pytest.approx(16 / 15)


def test_diversity_both_variants(tmp_path):
    code, _ = run("diversity", T3MIN, "--parses", parse_dir(), "--out", tmp_path)
    assert code == 0
    orig = list(csv.DictReader(open(tmp_path / "chains.csv")))
    exp = list(csv.DictReader(open(tmp_path / "chains_expanded.csv")))
    assert [round(float(r["pd"]), 4) for r in orig] == [0.4, 0.2222]
    assert [round(float(r["pd"]), 4) for r in exp] == [1.0667, 2.0]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary) == {"original", "expanded"}


def test_plotdata(tmp_path):
    code, out = run("plotdata", T3, "--y", "pd")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["dataset", "chain_id", "size", "pd"]
    assert rows[1:] == [["news", "chain1", "6", "1.0667"], ["news", "chain2", "6", "2.0000"]]


def test_plotdata_two_datasets_labels():
    code, out = run("plotdata", T3, T3MIN, "--labels", "A", "B")
    labels = {r["dataset"] for r in csv.DictReader(io.StringIO(out))}
    assert labels == {"A", "B"}


def test_plotdata_no_singletons(tmp_path):
    data = json.loads(open(T3).read())
    m = data["chains"][0]["mentions"].pop()
    data["chains"].append({"id": "lonely", "mentions": [m]})
    p = tmp_path / "s.json"
    p.write_text(json.dumps(data))
    _, out = run("plotdata", p)
    assert all(r["size"] != "1" for r in csv.DictReader(io.StringIO(out)))
    _, out = run("plotdata", p, "--no-exclude-singletons")
    assert any(r["size"] == "1" for r in csv.DictReader(io.StringIO(out)))


def test_baseline_and_score(tmp_path):
    code, out = run("baseline", T3, "--level", "subtopic", "--exclude-singletons", "--out", tmp_path)
    assert code == 0 and "conll_f1" in out
    report = json.loads((tmp_path / "score.json").read_text())
    code, out = run("score", "--key", tmp_path / "key.conll", "--response", tmp_path / "response.conll")
    assert code == 0
    assert json.loads(out) == report
    # four decimals
    assert all(len(str(v).split(".")[-1]) <= 4 for v in report["muc"].values())


def test_score_self_is_perfect(tmp_path):
    run("convert", T3, tmp_path / "k.conll")
    code, out = run("score", "--key", tmp_path / "k.conll", "--response", tmp_path / "k.conll")
    assert json.loads(out)["conll_f1"] == 1.0


def test_score_universe_mismatch(tmp_path):
    run("convert", T3, tmp_path / "k.conll")
    run("convert", T3MIN, tmp_path / "r.conll")
    code, _ = run("score", "--key", tmp_path / "k.conll", "--response", tmp_path / "r.conll")
    assert code == 2


def test_expand(tmp_path):
    out = tmp_path / "expanded.json"
    code, msg = run("expand", T3MIN, "--parses", parse_dir(), "--out", out, "--log", tmp_path / "log.csv")
    assert code == 0 and "expanded=12" in msg
    assert json.loads(out.read_text())["chains"] == json.loads(open(T3).read())["chains"]
    assert len(list(csv.DictReader(open(tmp_path / "log.csv")))) == 12


def test_expand_without_parses(tmp_path):
    code, _ = run("pipeline", T3, "--expand", "--out", tmp_path / "o")
    assert code == 2
    assert not (tmp_path / "o").exists()


def test_bad_parse_dir(tmp_path):
    code, _ = run("pipeline", T3, "--expand", "--parses", tmp_path / "nothing", "--out", tmp_path / "o")
    assert code == 2


def test_pipeline_bundle(tmp_path):
    out = tmp_path / "bundle"
    code, _ = run("pipeline", T3MIN, "--expand", "--parses", parse_dir(), "--out", out)
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == sorted(["chains.csv", "expansion_log.csv", "key.conll", "manifest.json",
                            "plotdata.csv", "response.conll", "score.json", "stats.txt",
                            "summary.json", "summary_original.json"])
    rows = list(csv.DictReader(open(out / "chains.csv")))
    assert [round(float(r["pd"]), 4) for r in rows] == [1.0667, 2.0]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["version"] and len(manifest["inputs"]) == 5


def test_pipeline_deterministic(tmp_path):
    for name in ("a", "b"):
        assert run("pipeline", T3, "--out", tmp_path / name)[0] == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_manifest_tracks_config_and_input(tmp_path):
    def run_hash(*extra, src=T3):
        out = tmp_path / f"o{len(list(tmp_path.iterdir()))}"
        assert run("pipeline", src, "--out", out, *extra)[0] == 0
        return json.loads((out / "manifest.json").read_text())["run_sha256"]

    base = run_hash()
    assert run_hash() == base
    assert run_hash("--level", "topic") != base
    copy = tmp_path / "copy.json"
    data = json.loads(open(T3).read())
    data["documents"][0]["sentences"][0][0]["surface"] = "Donald!"
    copy.write_text(json.dumps(data))
    assert run_hash(src=copy) != base


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"inputs": [T3], "level": "document", "out": str(tmp_path / "o")}))
    assert run("pipeline", "--config", cfg)[0] == 0
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["config"]["level"] == "document"
    assert run("pipeline", "--config", cfg, "--level", "topic")[0] == 0
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["config"]["level"] == "topic"


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"inputs": [T3], "colour": "red"}))
    assert run("stats", "--config", cfg)[0] == 2


def test_empty_corpus_stats(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text(json.dumps({"name": "empty", "documents": [], "chains": []}))
    code, out = run("stats", p, "--out", tmp_path)
    assert code == 0
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["mentions"] == 0 and s["avg_chain_size"] is None and s["pd_weighted"] is None


def test_threads_env(monkeypatch, tmp_path):
    monkeypatch.setenv("COREFDIV_THREADS", "4")
    assert run("pipeline", T3, "--out", tmp_path / "x")[0] == 0
