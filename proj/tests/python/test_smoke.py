"""End-to-end smoke tests for the psaw python module and the CLI."""

import json
import os
import re
import subprocess

import pytest

import psaw

SPEC = {
    "vocabulary": [f"bg{i}" for i in range(30)] + ["fever", "child", "adult"],
    "doc_count": 400,
    "tokens_per_doc": [6, 12],
    "classes": [
        {
            "name": "target",
            "chain": [["fever"], ["child"]],
            "gaps": [10],
            "forbidden": ["adult"],
            "distractor_rate": 0.06,
            "filter_rate": 0.06,
        },
        {"name": "other", "weight": 2.0},
    ],
}


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "spec.json"
    path.write_text(json.dumps(SPEC))
    return psaw.generate_synthetic_corpus(str(path), seed=5)


def test_tokenize():
    assert psaw.tokenize("my girl coughs", stop_words=["my"]) == ["girl", "coughs"]
    assert psaw.tokenize("咳嗽", mode="character") == ["咳", "嗽"]
    assert psaw.tokenize("") == []


def test_corpus_roundtrip(corpus, tmp_path):
    assert len(corpus) == 400
    assert corpus.classes == {"target", "other"}
    out = tmp_path / "corpus.tsv"
    psaw.save_corpus(corpus, str(out), "tsv")
    loaded = psaw.load_corpus(str(out), "tsv")
    assert len(loaded) == len(corpus)
    assert loaded.documents[0].tokens == corpus.documents[0].tokens


def test_train_evaluate_decode(corpus):
    emb = psaw.build_fallback_embeddings(corpus, window=4, dimension_cap=64)
    ds = psaw.split_binary(corpus, "target")
    cfg = psaw.AnnealConfig()
    cfg.total_iterations = 150
    cfg.pool_capacity = 6
    cfg.seed = 3
    result = psaw.train(ds, emb, cfg, "psaw")
    assert result.metrics.f_beta > 0.8
    assert len(result.best) == 3

    metrics = psaw.evaluate(result.best, ds, beta=0.2)
    assert metrics.f_beta == pytest.approx(result.metrics.f_beta)

    # decoded patterns agree with python's re on the corpus
    rules = [psaw.decode(r) for r in result.best.rules]
    compiled = [(re.compile(p), re.compile(n)) for p, n in rules]
    for doc in corpus.documents[:100]:
        engine = any(p.search(doc.text) and not n.search(doc.text) for p, n in compiled)
        assert engine == result.best.matches(doc.text)


def test_determinism(corpus):
    emb = psaw.build_fallback_embeddings(corpus, window=4, dimension_cap=64)
    ds = psaw.split_binary(corpus, "target")
    cfg = psaw.AnnealConfig()
    cfg.total_iterations = 60
    cfg.pool_capacity = 5
    cfg.seed = 11
    a = psaw.train(ds, emb, cfg, "psaw")
    b = psaw.train(ds, emb, cfg, "psaw")
    assert [str(r) for r in a.best.rules] == [str(r) for r in b.best.rules]
    assert [h.best_objective for h in a.history] == [h.best_objective for h in b.history]


def test_strategies_run(corpus):
    emb = psaw.build_fallback_embeddings(corpus, window=4, dimension_cap=64)
    ds = psaw.split_binary(corpus, "target")
    cfg = psaw.AnnealConfig()
    cfg.total_iterations = 40
    cfg.pool_capacity = 4
    cfg.seed = 2
    for strategy in ("psaw-i", "psaw-p-kmeans", "psaw-p-random"):
        result = psaw.train(ds, emb, cfg, strategy)
        assert len(result.best) >= 2
        assert 0.0 <= result.metrics.f_beta <= 1.0


def test_classifier_file_roundtrip(corpus, tmp_path):
    rule = psaw.rule_from_canonical("((fever|cough).{0,10}child).(#_#(adult))")
    clf = psaw.Classifier()
    clf.rules = [rule]
    path = tmp_path / "clf.json"
    psaw.save_classifier(clf, str(path), target_class="target", beta=0.2, seed=9)
    loaded, target, beta, seed, strategy = psaw.load_classifier(str(path))
    assert target == "target"
    assert seed == 9
    assert [str(r) for r in loaded.rules] == [str(rule)]
    assert psaw.match_rule(rule, "my child has a fever today") is False  # wrong order
    assert psaw.match_rule(rule, "fever in child") is True
    assert psaw.match_rule(rule, "fever in child of adult") is False


def test_errors():
    with pytest.raises(ValueError):
        psaw.load_corpus("/no/such/file.tsv", "tsv")
    table = psaw.EmbeddingTable()
    with pytest.raises(KeyError):
        psaw.cosine_similarity(table, "a", "b")


# ---- CLI behavior ----------------------------------------------------------

CLI = os.environ.get("PSAW_CLI")
needs_cli = pytest.mark.skipif(not CLI, reason="PSAW_CLI not set")


def run_cli(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


@needs_cli
def test_cli_exit_codes(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(SPEC))
    corpus = tmp_path / "corpus.tsv"
    r = run_cli("synth", "--spec", str(spec), "--seed", "4", "--out", str(corpus))
    assert r.returncode == 0

    # unknown class: data error naming the class
    r = run_cli("train", "--corpus", str(corpus), "--class", "missing_class",
                "--iterations", "5", "--out", str(tmp_path / "out"))
    assert r.returncode == 2
    assert "missing_class" in r.stderr

    # unreadable corpus: data error
    r = run_cli("train", "--corpus", str(tmp_path / "nope.tsv"))
    assert r.returncode == 2

    # bad flag value: config error
    r = run_cli("train", "--corpus", str(corpus), "--strategy", "nonsense",
                "--iterations", "5", "--out", str(tmp_path / "out2"))
    assert r.returncode == 1

    # a class with no usable vocabulary: training failure
    dead = tmp_path / "dead.tsv"
    dead.write_text("pos\tstop stop stop\nneg\tcalm words here\n" * 5)
    stopwords = tmp_path / "stop.txt"
    stopwords.write_text("stop\n")
    r = run_cli("train", "--corpus", str(dead), "--class", "pos", "--stopwords",
                str(stopwords), "--iterations", "5", "--out", str(tmp_path / "out3"))
    assert r.returncode == 3
    assert "no discriminative vocabulary" in r.stderr


@needs_cli
def test_cli_train_eval_export(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(SPEC))
    corpus = tmp_path / "corpus.tsv"
    test_corpus = tmp_path / "test.tsv"
    assert run_cli("synth", "--spec", str(spec), "--seed", "4",
                   "--out", str(corpus)).returncode == 0
    assert run_cli("synth", "--spec", str(spec), "--seed", "6",
                   "--out", str(test_corpus)).returncode == 0

    out = tmp_path / "run"
    r = run_cli("train", "--corpus", str(corpus), "--test-corpus", str(test_corpus),
                "--class", "target", "--iterations", "120", "--pool", "6",
                "--seed", "8", "--out", str(out))
    assert r.returncode == 0, r.stderr
    for artifact in ("target.classifier.json", "target.history.tsv",
                     "target.metrics.json", "target.patterns.txt"):
        assert (out / artifact).exists()

    metrics = json.loads((out / "target.metrics.json").read_text())
    assert metrics["train"]["f_beta"] > 0.7
    assert "test" in metrics

    # cmd_train then cmd_eval on the training corpus reproduces train metrics
    report_path = tmp_path / "report.json"
    r = run_cli("eval", "--classifier", str(out / "target.classifier.json"),
                "--corpus", str(corpus), "--out", str(report_path))
    assert r.returncode == 0
    report = json.loads(report_path.read_text())
    assert report["classes"][0]["f_beta"] == pytest.approx(metrics["train"]["f_beta"])
    assert report["classes"][0]["true_matches"] == metrics["train"]["true_matches"]

    r = run_cli("export", "--classifier", str(out / "target.classifier.json"))
    assert r.returncode == 0
    assert "positive:" in r.stdout
    assert "accept: positive matches AND negative does not" in r.stdout


@needs_cli
def test_cli_eval_many_classes(tmp_path):
    # 30 classifier files -> 30 report rows plus decile summaries
    lines = []
    class_names = [f"class{i}" for i in range(30)]
    for i, name in enumerate(class_names):
        for d in range(4):
            lines.append(f"{name}\tmarker{i} filler text number {d}")
    corpus = tmp_path / "many.tsv"
    corpus.write_text("\n".join(lines) + "\n")

    paths = []
    for i, name in enumerate(class_names):
        clf = psaw.Classifier()
        clf.rules = [psaw.rule_from_canonical(f"(marker{i}).(#_#())")]
        path = tmp_path / f"{name}.classifier.json"
        psaw.save_classifier(clf, str(path), target_class=name)
        paths.append(str(path))

    args = ["eval", "--corpus", str(corpus), "--out", str(tmp_path / "report.json")]
    for p in paths:
        args += ["--classifier", p]
    r = run_cli(*args)
    assert r.returncode == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert len(report["classes"]) == 30
    assert len(report["deciles"]["precision"]) == 11
    assert all(row["precision"] == 1.0 and row["recall"] == 1.0
               for row in report["classes"])
