import io

import numpy as np
import pytest

from punctbin.errors import ConfigError, FormatError, ModelFormatError
from punctbin.headfinding import (HeadGoldCorpus, HeadModel, Mode, TrainConfig, align_heads,
                                  build_gold_corpus, collins_head,
                                  corpus_from_cache, evaluate_heads,
                                  evaluate_seeds, extract_features,
                                  load_head_table, read_gold_cache,
                                  train_head_model, write_gold_cache)
from punctbin.headfinding.align import lexical_heads
from punctbin.headfinding.model import _examples, _gradients
from punctbin.headfinding.features import PAD, features_from_children
from punctbin.synthetic import (mismatched_table, synthetic_head_rule,
                                synthetic_head_treebank, true_table)
from punctbin.treebank_io import DEFAULT_PUNCT_MAP, DepGraph, parse_tree

SMALL = TrainConfig(epochs=3, hidden=(16, 8), embed=8)


# --- rules ---------------------------------------------------------------

@pytest.mark.parametrize("label, kids, head", [
    ("NP", [("DT", False), ("JJ", False), ("NN", False)], 2),
    ("VP", [("RB", False), ("VBD", False), ("NP", False)], 1),
    ("S", [("NP", False), ("VP", False), (".", True)], 1),
    ("PP", [("IN", False), ("NP", False)], 0),
    # NP: second directive looks for NP left to right
    ("NP", [("NP", False), (",", True), ("NP", False)], 0),
    # punctuation never heads while other material exists
    ("S", [(",", True), ("FOO", False)], 1),
    ("S", [(",", True), (".", True)], 0),
])
def test_collins_head(label, kids, head):
    assert collins_head(label, kids) == head


def test_collins_fallback_follows_first_direction():
    assert collins_head("ADVP", [("DT", False), ("DT", False)]) == 1
    assert collins_head("UNKNOWN", [("DT", False), ("DT", False)]) == 0


def test_functional_and_intermediate_labels():
    kids = [("NP-SBJ", False), ("VP", False)]
    assert collins_head("@S-TPC", kids) == 1


def test_head_table_parsing():
    table = load_head_table("# c\nXP LEFT_TO_RIGHT A\nXP right_to_left B\n"
                            "* RIGHT_TO_LEFT\n")
    assert len(table.directives("XP")) == 2
    assert table("YP", [("Q", False), ("Q", False)]) == 1
    with pytest.raises(ConfigError) as err:
        load_head_table("XP LEFT A\n")
    assert err.value.line == 1
    with pytest.raises(ConfigError):
        load_head_table("* LEFT_TO_RIGHT\n* RIGHT_TO_LEFT\n")


# --- alignment -----------------------------------------------------------

def test_align_simple():
    t = parse_tree("(S (NP (NNP John)) (VP (VBD smiled)) (. .))")
    deps = DepGraph((("John", 2), ("smiled", 0), (".", 2)))
    (inst,) = align_heads(t, deps)
    assert inst.path == () and inst.gold == 1


def test_align_word_mismatch():
    t = parse_tree("(S (NP (NNP John)) (VP (VBD smiled)))")
    assert align_heads(t, DepGraph((("Jon", 2), ("smiled", 0)))) is None
    corpus = build_gold_corpus([t], [DepGraph((("Jon", 2), ("smiled", 0)))])
    assert corpus.alignment_rate == 0.0 and len(corpus) == 0


def test_align_non_unique_head_skipped():
    # "a" and "b" both attach outside the NP
    t = parse_tree("(S (NP (NN a) (NN b)) (VB c))")
    deps = DepGraph((("a", 3), ("b", 3), ("c", 0)))
    instances = align_heads(t, deps)
    assert [i.path for i in instances] == [()]


def test_lexical_heads():
    t = parse_tree("(S (NP (DT the) (NN dog)) (VP (VBD ran)))")
    lex = lexical_heads(t, [2, 3, 0])
    assert lex[()] == [2] and lex[(0,)] == [1]


def test_alignment_recovers_generator_heads():
    tb = synthetic_head_treebank(200, seed=5)
    corpus = build_gold_corpus(tb.trees, tb.graphs)
    assert corpus.alignment_rate == 1.0
    assert len(corpus) == tb.constituents
    for inst in corpus:
        assert inst.gold == synthetic_head_rule(inst.node.label,
                                                list(inst.node.children))


def test_gold_cache_roundtrip():
    tb = synthetic_head_treebank(30, seed=1)
    corpus = build_gold_corpus(tb.trees, tb.graphs)
    buf = io.StringIO()
    write_gold_cache(corpus, buf)
    buf.seek(0)
    again = corpus_from_cache(tb.trees, read_gold_cache(buf))
    assert again.instances == corpus.instances


@pytest.mark.parametrize("text", ["1\t-\n", "1\t-\tx\n", "9\t-\t0\n",
                                  "1\t5.5\t0\n", "1\t-\t99\n"])
def test_gold_cache_errors(text):
    tb = synthetic_head_treebank(2, seed=1)
    with pytest.raises(FormatError):
        corpus_from_cache(tb.trees, read_gold_cache(io.StringIO(text)))


# --- features ------------------------------------------------------------

def test_features_punct_mode():
    t = parse_tree("(S (NP-SBJ (NN a)) (, ,) (VP (VB b)) (. .))")
    f = extract_features(t, Mode.PUNCT, window=4)
    assert f.parent_label == "S"
    assert f.child_labels == ("NP", "VP", PAD, PAD)
    assert f.functional_tags[0] == "SBJ"
    assert f.positions == (0, 2)
    assert f.punct_adjacent == ((False, True), (True, True))
    assert extract_features(t, Mode.BASE).punct_adjacent is None


def test_feature_window_overflow():
    kids = [("NN", False)] * 6
    f = features_from_children("NP", kids, Mode.BASE, window=4)
    assert f.slot_of(5) == 3 and f.slot_of(2) == 2
    assert f.child_of(3) == 3


# --- model ---------------------------------------------------------------

@pytest.fixture(scope="module")
def small_data():
    tb = synthetic_head_treebank(300, seed=11)
    dv = synthetic_head_treebank(80, seed=12)
    return (build_gold_corpus(tb.trees, tb.graphs),
            build_gold_corpus(dv.trees, dv.graphs))


def test_training_is_deterministic(small_data):
    train, dev = small_data
    a = train_head_model(train, dev, Mode.PUNCT, seed=3, config=SMALL)
    b = train_head_model(train, dev, Mode.PUNCT, seed=3, config=SMALL)
    c = train_head_model(train, dev, Mode.PUNCT, seed=4, config=SMALL)
    assert a.to_bytes() == b.to_bytes()
    assert a.to_bytes() != c.to_bytes()


def test_model_persistence(small_data, tmp_path):
    train, dev = small_data
    m = train_head_model(train, dev, Mode.BASE, seed=0, config=SMALL)
    path = tmp_path / "m.bin"
    m.save(path)
    back = HeadModel.load(path)
    assert back.to_bytes() == m.to_bytes()
    assert back.predict([i.node for i in dev]) == \
        m.predict([i.node for i in dev])
    data = path.read_bytes()
    with pytest.raises(ModelFormatError):
        HeadModel.from_bytes(b"garbage")
    with pytest.raises(ModelFormatError):
        HeadModel.from_bytes(data[:-8])
    bumped = bytearray(data)
    bumped[len(b"PUNCTBIN-HEADMODEL\n")] = 99
    with pytest.raises(ModelFormatError, match="version"):
        HeadModel.from_bytes(bytes(bumped))


def test_predictions_are_candidates(small_data):
    train, dev = small_data
    m = train_head_model(train, None, Mode.PUNCT, seed=0, config=SMALL)
    for inst, guess in zip(dev, m.predict([i.node for i in dev])):
        assert 0 <= guess < len(inst.node.children)
        assert inst.node.children[guess].token != ","


def test_model_as_head_finder(small_data):
    train, _ = small_data
    m = train_head_model(train, None, Mode.PUNCT, seed=0, config=SMALL)
    assert m("XP", [("A", False)]) == 0
    h = m("XP", [("A", False), (",", True), ("B", False)])
    assert h in (0, 2)


def test_softmax_masks_padding():
    logits = np.array([[1.0, 2.0, 3.0]])
    mask = np.array([[True, True, False]])
    p = HeadModel._softmax(logits, mask)
    assert p[0, 2] == 0 and abs(p.sum() - 1) < 1e-12


def test_gradients_match_finite_differences(small_data):
    train, _ = small_data
    m = train_head_model(train, None, Mode.PUNCT, seed=0,
                         config=TrainConfig(epochs=1, hidden=(6, 5),
                                            embed=4))
    feats, slots = _examples(train, Mode.PUNCT, DEFAULT_PUNCT_MAP, m.window)
    enc = m.encode(feats[:8])
    target = np.asarray(slots[:8])
    grads = _gradients(m, enc, target)

    def loss():
        p = m.predict_proba(feats[:8])
        return -np.mean(np.log(p[np.arange(8), target]))

    rng = np.random.default_rng(0)
    for name in ("W1", "b2", "W3", "E_child"):
        w = m.params[name]
        for _ in range(3):
            idx = tuple(rng.integers(0, s) for s in w.shape)
            if name == "E_child":
                idx = (int(enc[1][0, 0]),) + idx[1:]
            old = w[idx]
            w[idx] = old + 1e-6
            up = loss()
            w[idx] = old - 1e-6
            down = loss()
            w[idx] = old
            assert abs((up - down) / 2e-6 - grads[name][idx]) < 1e-5


# --- evaluation ----------------------------------------------------------

def test_evaluate_tables(small_data):
    _, dev = small_data
    report = evaluate_heads(true_table(), dev)
    wrong = evaluate_heads(mismatched_table(), dev)
    oracle = evaluate_heads(lambda i: synthetic_head_rule(
        i.node.label, list(i.node.children)), dev)
    assert oracle.accuracy == 100.0
    assert wrong.accuracy < report.accuracy < 100.0
    assert set(report.by_label) <= {"XP", "YP", "ZP"}
    assert "accuracy" in report.table()


def test_evaluate_seeds(small_data):
    train, dev = small_data
    models = [train_head_model(train, dev, Mode.BASE, seed=s, config=SMALL)
              for s in (0, 1)]
    summary = evaluate_seeds(models, dev)
    assert len(summary.runs) == 2
    assert summary.sd >= 0
    assert "+-" in summary.summary()


def test_evaluate_empty_rejected():
    with pytest.raises(ValueError):
        evaluate_heads(true_table(), HeadGoldCorpus())
