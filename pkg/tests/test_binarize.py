import random
from pathlib import Path

import pytest
from hypothesis import given, settings

from punctbin.binarize import (BinarizeSignature, Origin, binarize,
                               debinarize, is_binary,
                               roundtrip_check, transform)
from punctbin.errors import ConfigError, IntegrityError
from punctbin.headfinding import collins_head
from punctbin.restructure import restructure
from punctbin.synthetic import random_tree, right_branching_chain
from punctbin.treebank_io import parse_tree, read_corpus, serialize_tree
from strategies import plain_trees, trees

GOLDEN = Path(__file__).parent / "golden"


def full(t, **kw):
    return binarize(restructure(t)[0], **kw)


def test_samples_golden():
    originals = list(read_corpus(GOLDEN / "samples.mrg"))
    expected = (GOLDEN / "samples.binarized").read_text().splitlines()
    assert [serialize_tree(transform(t)) for t in originals] == expected


def test_np_head_outward():
    t = parse_tree("(NP (DT The) (JJ little) (NN boy))")
    out, sigs = binarize(t)
    assert serialize_tree(out) == "(NP (DT The) (@NP (JJ little) (NN boy)))"
    assert sigs == [BinarizeSignature((1,), Origin.ARITY_REDUCTION)]
    assert out.head == 1 and out.children[1].head == 1


def test_boy_signatures():
    t = next(read_corpus(GOLDEN / "samples.mrg"))
    _, sigs = full(t)
    assert sigs == [BinarizeSignature((0,), Origin.PUNCT_RULE),
                    BinarizeSignature((0, 0, 1), Origin.ARITY_REDUCTION)]


def test_right_siblings_folded_first():
    # VP head is the verb at index 1
    t = parse_tree("(VP (RB a) (VBD b) (NP (NN c)) (PP (IN d)))")
    out, _ = binarize(t)
    assert serialize_tree(out) == \
        "(VP (RB a) (@VP (@VP (VBD b) (NP (NN c))) (PP (IN d))))"


def test_binary_tree_unchanged():
    t = parse_tree("(S (NP (NN a)) (VP (VB b) (NP (NN c))))")
    out, sigs = binarize(t)
    assert out == t and sigs == []


def test_unary_chains_kept():
    t = parse_tree("(S (VP (VB go)))")
    out, _ = binarize(t)
    assert out == t


def test_invalid_head_finder():
    t = parse_tree("(NP (DT a) (JJ b) (NN c))")
    with pytest.raises(ConfigError):
        binarize(t, head_finder=lambda label, kids: 7)


def test_debinarize_identity_without_intermediates():
    t = parse_tree("(S (NP (NN a)) (VP (VB b)))")
    assert debinarize(t) == t


def test_signature_checks():
    t = next(read_corpus(GOLDEN / "samples.mrg"))
    out, sigs = full(t)
    with pytest.raises(IntegrityError):
        debinarize(out, sigs[:1])
    with pytest.raises(IntegrityError):
        debinarize(out, sigs + [BinarizeSignature((1,),
                                                  Origin.ARITY_REDUCTION)])


@settings(max_examples=300)
@given(trees())
def test_roundtrip_both_routes(t):
    r, records = restructure(t)
    out, sigs = binarize(r)
    assert debinarize(out, sigs, records) == t
    assert debinarize(parse_tree(serialize_tree(out))) == t


@settings(max_examples=200)
@given(trees())
def test_binarity_and_yield(t):
    out, _ = full(t)
    assert is_binary(out)
    assert out.pos() == t.pos()


def head_position(node, start):
    while node.children:
        for child in node.children[:node.head]:
            start += child.size
        node = node.children[node.head]
    return start


@settings(max_examples=200)
@given(plain_trees())
def test_head_persistence(t):
    """The head chosen at each k-ary node is reached by following head
    indices in the output."""
    out, _ = binarize(t)
    new = {(n.label, s, e): (n, s) for _, n, s, e in out.spans()
           if n.children and not n.label.startswith("@")}
    for _, orig, s, e in t.spans():
        if not orig.children:
            continue
        h = collins_head(orig.label, [(c.label, False)
                                      for c in orig.children])
        hs = s + sum(c.size for c in orig.children[:h])
        node, start = new[(orig.label, s, e)]
        assert hs <= head_position(node, start) < hs + orig.children[h].size


@settings(max_examples=100)
@given(trees(), trees())
def test_injective(a, b):
    if a != b:
        assert serialize_tree(transform(a)) != serialize_tree(transform(b))


def test_roundtrip_report():
    t = list(read_corpus(GOLDEN / "samples.mrg"))
    report = roundtrip_check(t)
    assert report.summary() == "2/2 restored"
    assert roundtrip_check([]).summary() == "0/0 restored"


def test_punct_only_reported_as_skipped():
    t = parse_tree("(S (NP (NN a)) (PRN (-LRB- -LRB-) (-RRB- -RRB-)))")
    report = roundtrip_check([t])
    assert report.ok and report.restored == 1 and report.skipped_by_rule == 1


def test_random_corpus_smoke():
    rng = random.Random(7)
    report = roundtrip_check(random_tree(rng) for _ in range(300))
    assert report.ok, report.summary()


def test_long_chain():
    chain = right_branching_chain(10000)
    out = transform(chain)
    assert debinarize(parse_tree(serialize_tree(out))) == chain
