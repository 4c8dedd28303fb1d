"""Hypothesis strategies for trees."""
from __future__ import annotations

from hypothesis import strategies as st

from punctbin.tree import Tree

PHRASES = st.sampled_from(["S", "NP", "VP", "PP", "SBAR", "PRN", "ADJP"])
WORD_TAGS = st.sampled_from(["DT", "NN", "VBD", "JJ", "IN", "NNP"])
WORDS = st.sampled_from(["the", "dog", "ran", "big", "of", "John", "3.5",
                         "u.s."])
PUNCT = st.sampled_from([(",", ","), (".", "."), (":", ";"), ("``", "``"),
                         ("''", "''"), ("-LRB-", "-LRB-"),
                         ("-RRB-", "-RRB-"), ("PUNCT", '"'), (":", "--")])

words = st.builds(Tree.leaf, WORD_TAGS, WORDS)
punct = PUNCT.map(lambda lt: Tree.leaf(*lt))


def trees(max_leaves: int = 40, punct_weight: int = 1) -> st.SearchStrategy:
    """Phrase-rooted trees mixing words and punctuation leaves."""
    leaf = st.one_of(*([words] * 2), *([punct] * punct_weight))
    nodes = st.recursive(
        leaf,
        lambda kids: st.builds(Tree, PHRASES, st.lists(kids, min_size=1,
                                                       max_size=6)),
        max_leaves=max_leaves)
    return st.builds(Tree, PHRASES, st.lists(nodes, min_size=1, max_size=6))


def plain_trees(max_leaves: int = 30) -> st.SearchStrategy:
    nodes = st.recursive(
        words,
        lambda kids: st.builds(Tree, PHRASES, st.lists(kids, min_size=1,
                                                       max_size=5)),
        max_leaves=max_leaves)
    return st.builds(Tree, PHRASES, st.lists(nodes, min_size=1, max_size=5))
