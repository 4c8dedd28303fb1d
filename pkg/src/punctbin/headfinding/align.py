"""Gold head children from a dependency analysis of the same sentence."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from ..errors import FormatError
from ..tree import Tree
from ..treebank_io import DepGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeadInstance:
    sent_id: int                 # 1-based position of the tree in its corpus
    path: tuple[int, ...]        # child indices from the root
    node: Tree
    gold: int                    # index of the head child


@dataclass
class HeadGoldCorpus:
    instances: list[HeadInstance] = field(default_factory=list)
    sentences: int = 0
    aligned: int = 0

    @property
    def alignment_rate(self) -> float:
        return self.aligned / self.sentences if self.sentences else 0.0

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)


def lexical_heads(tree: Tree, heads: Sequence[int]
                  ) -> dict[tuple[int, ...], list[int]]:
    """For every internal node (by path), the terminals of its span whose
    dependency head lies outside the span. ``heads`` are 1-based, 0 = root.
    """
    nodes = list(tree.spans())
    outside: dict[tuple[int, ...], list[int]] = {}
    for path, node, start, end in reversed(nodes):
        if node.token is not None:
            outside[path] = [start]
        else:
            cands = []
            for i in range(len(node.children)):
                cands.extend(outside[path + (i,)])
            outside[path] = [t for t in cands
                             if not start < heads[t] <= end]
    return {p: v for p, v in outside.items() if tree[p].token is None}


def align_heads(tree: Tree, deps: DepGraph,
                sent_id: int = 0) -> list[HeadInstance] | None:
    """Gold head-child instances for every node with two or more children.

    Returns None when the tree's words differ from the dependency tokens.
    A node's head child is the child containing its lexical head, the one
    terminal of its span attached outside it; nodes where this terminal is
    not unique are skipped with a warning.
    """
    if tree.words() != deps.forms:
        return None
    heads = deps.heads
    lex = lexical_heads(tree, heads)
    instances = []
    for path, node, start, end in tree.spans():
        if node.token is not None or len(node.children) < 2:
            continue
        cands = lex[path]
        if len(cands) != 1:
            log.warning("sentence %d node %s at %r: %d lexical head "
                        "candidates; skipped", sent_id, node.label, path,
                        len(cands))
            continue
        offset = start
        for i, child in enumerate(node.children):
            if offset <= cands[0] < offset + child.size:
                instances.append(HeadInstance(sent_id, path, node, i))
                break
            offset += child.size
    return instances


def build_gold_corpus(trees: Iterable[Tree],
                      graphs: Iterable[DepGraph]) -> HeadGoldCorpus:
    """Align two parallel corpora; unaligned sentences are excluded."""
    corpus = HeadGoldCorpus()
    trees, graphs = list(trees), list(graphs)
    if len(trees) != len(graphs):
        raise ValueError("%d trees but %d dependency graphs"
                         % (len(trees), len(graphs)))
    for sent_id, (tree, deps) in enumerate(zip(trees, graphs), 1):
        corpus.sentences += 1
        found = align_heads(tree, deps, sent_id)
        if found is None:
            continue
        corpus.aligned += 1
        corpus.instances.extend(found)
    return corpus


def _format_path(path: tuple[int, ...]) -> str:
    return ".".join(map(str, path)) if path else "-"


def _parse_path(text: str) -> tuple[int, ...]:
    return () if text == "-" else tuple(int(x) for x in text.split("."))


def write_gold_cache(corpus: HeadGoldCorpus, handle: IO[str]) -> None:
    """One instance per line: sentence id, node path, gold index."""
    for inst in corpus.instances:
        handle.write("%d\t%s\t%d\n" % (inst.sent_id, _format_path(inst.path),
                                       inst.gold))


def read_gold_cache(source: str | os.PathLike | IO[str]
                    ) -> list[tuple[int, tuple[int, ...], int]]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as f:
            return read_gold_cache(f)
    rows = []
    for lineno, line in enumerate(source, 1):
        if not line.strip():
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 3:
            raise FormatError("expected 3 tab-separated columns", lineno)
        try:
            rows.append((int(cols[0]), _parse_path(cols[1]), int(cols[2])))
        except ValueError:
            raise FormatError("malformed row %r" % line.strip(),
                              lineno) from None
    return rows


def corpus_from_cache(trees: Sequence[Tree],
                      rows: Iterable[tuple[int, tuple[int, ...], int]]
                      ) -> HeadGoldCorpus:
    """Rebuild instances from cached rows and the trees they refer to."""
    corpus = HeadGoldCorpus(sentences=len(trees))
    seen = set()
    for sent_id, path, gold in rows:
        if not 1 <= sent_id <= len(trees):
            raise FormatError("sentence id %d out of range" % sent_id)
        try:
            node = trees[sent_id - 1][path]
        except IndexError:
            raise FormatError("sentence %d has no node at %s"
                              % (sent_id, _format_path(path))) from None
        if node.token is not None or not 0 <= gold < len(node.children):
            raise FormatError("invalid gold index %d at sentence %d node %s"
                              % (gold, sent_id, _format_path(path)))
        corpus.instances.append(HeadInstance(sent_id, path, node, gold))
        seen.add(sent_id)
    corpus.aligned = len(seen)
    return corpus
