"""Random treebanks for property tests and desk-scale experiments."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .headfinding.rules import HeadTable, load_head_table
from .tree import Tree
from .treebank_io import DepGraph

PHRASES = ("S", "NP", "VP", "PP", "ADJP", "SBAR", "PRN")
TAGS = ("DT", "NN", "NNS", "VBD", "JJ", "IN", "RB", "PRP", "CD")

# (label, token) leaves used for punctuation insertion
SEPARATORS = ((",", ","), (".", "."), (":", ";"), (":", "--"), (".", "?"),
              (":", "..."))
PAIRS = (((("``", "``"), ("''", "''"))),
         (("-LRB-", "-LRB-"), ("-RRB-", "-RRB-")),
         (("PUNCT", '"'), ("PUNCT", '"')))
LONE = (("``", "``"), ("''", "''"), ("-LRB-", "-LRB-"), ("-RRB-", "-RRB-"))


def random_tree(rng: random.Random, max_depth: int = 8, max_arity: int = 8,
                punct_rate: float = 0.3) -> Tree:
    """Random tree with punctuation inserted among the children.

    Nodes get up to ``max_arity`` children before punctuation is added;
    punctuation may be separators, stray openers/closers, or matched pairs
    (possibly nested) enclosing a run of children. Occasionally a
    constituent consists of punctuation only.
    """
    counter = [0]

    def leaf(label=None, token=None):
        if label is None:
            counter[0] += 1
            return Tree.leaf(rng.choice(TAGS), "w%d" % counter[0])
        return Tree.leaf(label, token)

    def build(depth: int) -> Tree:
        if depth >= max_depth or (depth > 0 and
                                  rng.random() < 0.25 + 0.1 * depth):
            return leaf()
        if rng.random() < 0.003:
            return Tree(rng.choice(PHRASES),
                        [leaf(*rng.choice(SEPARATORS + LONE))
                         for _ in range(rng.randint(1, 3))])
        weights = [max_arity + 1 - k for k in range(1, max_arity + 1)]
        arity = rng.choices(range(1, max_arity + 1), weights)[0]
        children = [build(depth + 1) for _ in range(arity)]
        if rng.random() < punct_rate:
            for _ in range(rng.randint(1, 3)):
                kind = rng.random()
                if kind < 0.5:
                    pos = rng.randint(0, len(children))
                    children.insert(pos, leaf(*rng.choice(SEPARATORS)))
                elif kind < 0.65:
                    pos = rng.randint(0, len(children))
                    children.insert(pos, leaf(*rng.choice(LONE)))
                else:
                    opener, closer = rng.choice(PAIRS)
                    i = rng.randint(0, len(children))
                    j = rng.randint(i, len(children))
                    children.insert(j, leaf(*closer))
                    children.insert(i, leaf(*opener))
        return Tree(rng.choice(PHRASES), children)

    return build(0)


def right_branching_chain(n_tokens: int, punct_every: int = 3) -> Tree:
    """``(S (NN w0) (, ,) (S (NN w1) (S ...)))``: depth grows with length."""
    node = Tree("S", [Tree.leaf("NN", "w%d" % (n_tokens - 1))])
    for i in range(n_tokens - 2, -1, -1):
        kids = [Tree.leaf("NN", "w%d" % i)]
        if punct_every and i % punct_every == 0:
            kids.append(Tree.leaf(",", ","))
        kids.append(node)
        node = Tree("S", kids)
    return node


# --- synthetic head-finding data ------------------------------------------

HEAD_PHRASES = ("XP", "YP", "ZP")
HEAD_TAGS = ("A", "B", "C", "D")

# Heads of constituents without a comma follow these label priorities; a
# constituent with a comma is headed by the child just before it.
TRUE_TABLE_TEXT = """\
XP LEFT_TO_RIGHT A B
YP RIGHT_TO_LEFT B C
ZP LEFT_TO_RIGHT D
* LEFT_TO_RIGHT
"""

_TRUE_TABLE = load_head_table(TRUE_TABLE_TEXT)

# Same priorities searched in the opposite direction.
MISMATCHED_TABLE_TEXT = """\
XP RIGHT_TO_LEFT A B
YP LEFT_TO_RIGHT B C
ZP RIGHT_TO_LEFT D
* RIGHT_TO_LEFT
"""


def true_table() -> HeadTable:
    return _TRUE_TABLE


def mismatched_table() -> HeadTable:
    return load_head_table(MISMATCHED_TABLE_TEXT)


def synthetic_head_rule(label: str, children: list[Tree]) -> int:
    """Gold head index of the generating process."""
    for i, child in enumerate(children):
        if child.token == "," and i > 0:
            return i - 1
    descriptors = [(c.label, c.token == ",") for c in children]
    return _TRUE_TABLE(label, descriptors)


@dataclass
class HeadTreebank:
    trees: list[Tree]
    graphs: list[DepGraph]

    @property
    def constituents(self) -> int:
        return sum(1 for t in self.trees for n in t.subtrees()
                   if len(n.children) >= 2)


def synthetic_head_treebank(n_sentences: int, seed: int = 0,
                            comma_rate: float = 0.5,
                            max_depth: int = 3) -> HeadTreebank:
    """Trees plus dependency graphs whose heads follow
    :func:`synthetic_head_rule`."""
    rng = random.Random(seed)
    trees, graphs = [], []
    for _ in range(n_sentences):
        counter = [0]

        def build(depth):
            kids = []
            for _ in range(rng.randint(2, 5)):
                if depth < max_depth and rng.random() < 0.3:
                    kids.append(build(depth + 1))
                else:
                    kids.append(Tree.leaf(rng.choice(HEAD_TAGS), "w"))
            if rng.random() < comma_rate:
                kids.insert(rng.randint(1, len(kids) - 1),
                            Tree.leaf(",", ","))
            return Tree(rng.choice(HEAD_PHRASES), kids)

        tree = _number_words(build(0), counter)
        trees.append(tree)
        graphs.append(_dependencies(tree))
    return HeadTreebank(trees, graphs)


def _number_words(tree: Tree, counter) -> Tree:
    if tree.token is not None:
        counter[0] += 1
        token = tree.token if tree.token == "," else "w%d" % counter[0]
        return Tree.leaf(tree.label, token)
    return Tree(tree.label, [_number_words(c, counter) for c in tree.children])


def _dependencies(tree: Tree) -> DepGraph:
    heads = [0] * tree.size

    def lexhead(node: Tree, start: int) -> int:
        if node.token is not None:
            return start
        offsets, pos = [], start
        for child in node.children:
            offsets.append(pos)
            pos += child.size
        subs = [lexhead(c, o) for c, o in zip(node.children, offsets)]
        h = synthetic_head_rule(node.label, list(node.children))
        for i, s in enumerate(subs):
            if i != h:
                heads[s] = subs[h] + 1
        return subs[h]

    root = lexhead(tree, 0)
    heads[root] = 0
    return DepGraph(tuple(zip(tree.words(), heads)))
