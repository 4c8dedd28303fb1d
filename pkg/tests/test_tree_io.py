import io
import re

import pytest
from hypothesis import given, settings

from punctbin.errors import ConfigError, FormatError, TreeParseError
from punctbin.tree import AttachDirection, Tree, fold
from punctbin.treebank_io import (DEFAULT_PUNCT_MAP, AttachClass,
                                  functional_tags, load_punct_map, parse_tree,
                                  read_conll, read_corpus, serialize_tree,
                                  strip_functional_tags, write_corpus)
from strategies import trees

JOHN = "(S (NP (NNP John)) (VP (VBD smiled)) (, ,))"


def test_parse_simple():
    t = parse_tree("(S (NP (DT The)) (VP (VBD ran)) (. .))")
    assert t.label == "S"
    assert len(t.children) == 3
    assert t.size == 3
    assert t.words() == ["The", "ran", "."]


def test_parse_comma_tree_shape():
    t = parse_tree(JOHN)
    assert [c.label for c in t.children] == ["NP", "VP", ","]
    assert serialize_tree(t) == JOHN


def test_whitespace_insensitive():
    spaced = "(S\n  (NP   (NNP John))\n\t(VP (VBD smiled))\n  (, ,))"
    assert parse_tree(spaced) == parse_tree(JOHN)


@pytest.mark.parametrize("text, offset", [("(S (NP", 6), ("", 0),
                                          ("   ", 3)])
def test_parse_errors_report_offset(text, offset):
    with pytest.raises(TreeParseError) as err:
        parse_tree(text)
    assert err.value.offset == offset


def test_childless_node_rejected():
    with pytest.raises(TreeParseError, match="no children"):
        parse_tree("(S (NP) (VP (VB go)))")


def test_trailing_input_rejected():
    with pytest.raises(TreeParseError, match="trailing"):
        parse_tree("(S (NN a)) (S (NN b))")


def test_flag_roundtrip():
    text = "(S (@S (NP (NNP John)) (VP (VBD smiled))) (,#L ,))"
    t = parse_tree(text)
    comma = t.children[1]
    assert comma.label == "," and comma.flag is AttachDirection.LEFT
    assert serialize_tree(t) == text
    assert serialize_tree(t, markers=False) == \
        "(S (@S (NP (NNP John)) (VP (VBD smiled))) (, ,))"


def test_paren_tokens_escaped():
    t = Tree("NP", [Tree.leaf("NN", "a(b)")])
    assert serialize_tree(t) == "(NP (NN a-LRB-b-RRB-))"


@settings(max_examples=200)
@given(trees())
def test_parse_serialize_bijective(t):
    assert parse_tree(serialize_tree(t)) == t


@settings(max_examples=100)
@given(trees())
def test_spans_concatenate(t):
    for path, node, start, end in t.spans():
        if node.children:
            pos = start
            for i, child in enumerate(node.children):
                assert t[path + (i,)] is child
                pos += child.size
            assert pos == end


def test_read_corpus_multiline_and_wrapper():
    text = "( (S (NP (NN a))\n  (VP (VB b))) )\n(S\n (NN c))\n"
    out = list(read_corpus(io.StringIO(text)))
    assert [t.label for t in out] == ["S", "S"]
    assert out[0].words() == ["a", "b"]


def test_read_corpus_bytes_stream():
    out = list(read_corpus(io.BytesIO(b"(S (NN a))\n(S (NN b))\n")))
    assert len(out) == 2


def test_read_corpus_error_names_tree_index():
    text = "(S (NN a))\n(S (NN b)\n"
    with pytest.raises(TreeParseError) as err:
        list(read_corpus(io.StringIO(text)))
    assert err.value.tree_index == 2


def test_read_corpus_trailing_garbage():
    with pytest.raises(TreeParseError, match="between trees"):
        list(read_corpus(io.StringIO("(S (NN a)) junk")))


def test_read_corpus_preprocessing():
    text = "(S (NP-SBJ-1 (-NONE- *T*)) (NP-SBJ (NN a)) (VP (VB b)))"
    (t,) = read_corpus(io.StringIO(text))
    assert serialize_tree(t) == "(S (NP (NN a)) (VP (VB b)))"
    (t,) = read_corpus(io.StringIO(text), strip_functional=False)
    assert t.children[0].label == "NP-SBJ"


@settings(max_examples=50)
@given(st_trees=trees())
def test_corpus_terminal_count(st_trees):
    buf = io.StringIO()
    write_corpus([st_trees, st_trees], buf)
    text = buf.getvalue()
    # every terminal is the second token of an innermost bracket
    expected = len(re.findall(r"\([^\s()]+ [^\s()]+\)", text))
    got = sum(t.size for t in read_corpus(io.StringIO(text),
                                         remove_empty=False))
    assert got == expected


def test_functional_tags():
    assert strip_functional_tags("NP-SBJ-1") == "NP"
    assert strip_functional_tags("-NONE-") == "-NONE-"
    assert strip_functional_tags("-LRB-") == "-LRB-"
    assert strip_functional_tags("@NP-SBJ") == "@NP"
    assert functional_tags("NP-SBJ-1") == ("SBJ",)
    assert functional_tags("PP-LOC=2") == ("LOC",)


def test_default_punct_map():
    pm = DEFAULT_PUNCT_MAP
    for tok in [",", ".", ":", ";", "!", "?", "''", "-RRB-", "--", "..."]:
        assert pm.attach_class(tok) is AttachClass.RIGHT_ATTACHING, tok
    for tok in ["``", "-LRB-"]:
        assert pm.attach_class(tok) is AttachClass.LEFT_ATTACHING, tok
    assert pm.attach_class('"') is AttachClass.PAIRED
    assert pm.partner("``") == "''"
    assert pm.attach_class("dog") is None


def test_punct_key_prefers_tag():
    # a word-class tag on a punctuation-looking token is not punctuation
    assert not DEFAULT_PUNCT_MAP.is_punct(Tree.leaf("NN", "--"))
    assert DEFAULT_PUNCT_MAP.is_punct(Tree.leaf(":", "--"))
    assert DEFAULT_PUNCT_MAP.is_punct(Tree.leaf("PUNCT", '"'))


def test_punct_map_parsing():
    pm = load_punct_map("# comment\n, RIGHT\n`` PAIRED ''\n")
    assert pm.attach_class(",") is AttachClass.RIGHT_ATTACHING
    assert pm.attach_class("``") is AttachClass.LEFT_ATTACHING
    assert pm.attach_class("''") is AttachClass.RIGHT_ATTACHING
    assert len(load_punct_map("")) == 0


@pytest.mark.parametrize("text, line", [(", RIGHT\n; SIDEWAYS\n", 2),
                                        ("`` PAIRED\n", 1)])
def test_punct_map_errors(text, line):
    with pytest.raises(ConfigError) as err:
        load_punct_map(text)
    assert err.value.line == line


def conll(rows):
    return io.StringIO("".join("%d\t%s\t_\t_\t_\t_\t%s\t_\t_\t_\n" % r
                               for r in rows) + "\n")


def test_read_conll():
    (g,) = read_conll(conll([(1, "John", "2"), (2, "smiled", "0")]))
    assert g.forms == ["John", "smiled"]
    assert g.heads == [2, 0]
    assert list(read_conll(io.StringIO(""))) == []


def test_read_conll_skips_ranges():
    text = ("1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tdo\t_\t_\t_\t_\t0\t_\t_\t_\n"
            "2\tn't\t_\t_\t_\t_\t1\t_\t_\t_\n\n")
    (g,) = read_conll(io.StringIO(text))
    assert g.forms == ["do", "n't"]


@pytest.mark.parametrize("rows, line", [
    ([(1, "a", "0"), (2, "b", "5"), (3, "c", "1")], 2),
    ([(1, "a", "x")], 1),
    ([(1, "a", "0"), (2, "b", "2")], 2),
])
def test_read_conll_errors(rows, line):
    with pytest.raises(FormatError) as err:
        list(read_conll(conll(rows)))
    assert err.value.line == line


def test_tree_immutable_and_hashable():
    t = parse_tree(JOHN)
    with pytest.raises(AttributeError):
        t.label = "X"
    assert hash(t) == hash(parse_tree(JOHN))
    with pytest.raises(ValueError):
        Tree("S", [])


def test_deep_tree_is_iterative():
    node = Tree.leaf("NN", "x")
    for _ in range(20000):
        node = Tree("S", [node])
    text = serialize_tree(node)
    assert parse_tree(text) == node
    assert fold(node, lambda n, kids: 1 + sum(kids)) == 20001
