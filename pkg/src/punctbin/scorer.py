"""Labeled-bracket scoring that can keep punctuation in the index space."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple

from .restructure import splice, strip_flags
from .tree import Tree, fold
from .treebank_io import DEFAULT_PUNCT_MAP, PunctMap

NT = "nt"


class Bracket(NamedTuple):
    label: str
    start: int
    end: int


class BracketSet(Counter):
    """Multiset of brackets; ``&`` gives the multiset intersection."""

    @property
    def total(self) -> int:
        return sum(self.values())

    def matched(self, other: BracketSet) -> int:
        return sum((self & other).values())


def extract_brackets(tree: Tree, include_preterminals: bool = False,
                     keep_punct: bool = True,
                     pmap: PunctMap = DEFAULT_PUNCT_MAP) -> BracketSet:
    """One bracket per internal node, spans over the terminal yield.

    Without ``keep_punct`` punctuation terminals are dropped from the index
    space first, and nodes left without terminals contribute nothing.
    """
    out = BracketSet()
    pos = 0

    def visit(node, kids):
        nonlocal pos
        if node.token is not None:
            if not keep_punct and (node.flag is not None or pmap.is_punct(node)):
                return None
            start = pos
            pos += 1
            if include_preterminals:
                out[Bracket(node.label, start, pos)] += 1
            return start
        starts = [k for k in kids if k is not None]
        if not starts:
            return None
        out[Bracket(node.label, starts[0], pos)] += 1
        return starts[0]

    fold(tree, visit)
    return out


def simplify_for_alignment(tree: Tree) -> Tree:
    """Relabel phrasal nodes ``nt`` and collapse unary chains.

    Every phrasal node with a single child is replaced by that child; if
    this leaves a bare preterminal, one ``nt`` node is kept above it.
    Preterminals keep their POS and word.
    """
    def visit(node, kids):
        if node.token is not None:
            return node
        return kids[0] if len(kids) == 1 else Tree(NT, kids)

    out = fold(tree, visit)
    if tree.token is None and out.token is not None:
        return Tree(NT, [out])
    return out


@dataclass(frozen=True)
class Alignment:
    ok: bool
    mismatch: int | None = None

    def __bool__(self):
        return self.ok


def terminal_align(gold: Tree, pred: Tree) -> Alignment:
    a, b = gold.words(), pred.words()
    if a == b:
        return Alignment(True)
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return Alignment(False, i)
    return Alignment(False, min(len(a), len(b)))


@dataclass
class SentenceScore:
    sent_id: int
    gold: int
    pred: int
    matched: int


@dataclass
class ScoreReport:
    matched: int = 0
    gold_total: int = 0
    pred_total: int = 0
    sentences_scored: int = 0
    sentences_skipped: int = 0
    sentences: list[SentenceScore] = field(default_factory=list)
    skipped_at: list[tuple[int, int]] = field(default_factory=list)

    @property
    def precision(self) -> float:
        if not self.pred_total:
            return 100.0 if not self.gold_total else 0.0
        return 100.0 * self.matched / self.pred_total

    @property
    def recall(self) -> float:
        if not self.gold_total:
            return 100.0 if not self.pred_total else 0.0
        return 100.0 * self.matched / self.gold_total

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def add(self, sent_id: int, gold: BracketSet, pred: BracketSet) -> None:
        m = gold.matched(pred)
        self.matched += m
        self.gold_total += gold.total
        self.pred_total += pred.total
        self.sentences_scored += 1
        self.sentences.append(SentenceScore(sent_id, gold.total, pred.total, m))

    def table(self) -> str:
        rows = [("Sentences scored", str(self.sentences_scored)),
                ("Sentences skipped", str(self.sentences_skipped)),
                ("Gold brackets", str(self.gold_total)),
                ("Pred brackets", str(self.pred_total)),
                ("Matched", str(self.matched)),
                ("Precision", "%.2f" % self.precision),
                ("Recall", "%.2f" % self.recall),
                ("F1", "%.2f" % self.f1)]
        width = max(len(k) for k, _ in rows)
        return "\n".join("%-*s  %s" % (width, k, v) for k, v in rows)

    def key_values(self) -> str:
        return ("P=%.4f, R=%.4f, F1=%.4f, matched=%d, skipped=%d"
                % (self.precision, self.recall, self.f1, self.matched,
                   self.sentences_skipped))

    def write_tsv(self, handle: IO[str]) -> None:
        handle.write("sent_id\tgold\tpred\tmatched\n")
        for s in self.sentences:
            handle.write("%d\t%d\t%d\t%d\n" % (s.sent_id, s.gold, s.pred,
                                               s.matched))


def _has_intermediate(tree: Tree) -> bool:
    return any(n.token is None and n.label.startswith("@")
               for n in tree.subtrees())


def _undo(tree: Tree) -> Tree:
    return strip_flags(splice(tree))


def score(gold: Iterable[Tree], pred: Iterable[Tree],
          keep_punct: bool = True, simplify: bool = False,
          include_preterminals: bool = False,
          pmap: PunctMap = DEFAULT_PUNCT_MAP) -> ScoreReport:
    """Micro-averaged labeled-bracket P/R/F1 over two parallel corpora.

    Pairs whose terminal sequences differ are skipped. When only one side of
    a pair contains ``@X`` nodes it is debinarized before extraction.
    """
    gold, pred = list(gold), list(pred)
    if len(gold) != len(pred):
        raise ValueError("gold has %d trees but pred has %d"
                         % (len(gold), len(pred)))
    report = ScoreReport()
    for sent_id, (g, p) in enumerate(zip(gold, pred), 1):
        verdict = terminal_align(g, p)
        if not verdict:
            report.sentences_skipped += 1
            report.skipped_at.append((sent_id, verdict.mismatch))
            continue
        gi, pi = _has_intermediate(g), _has_intermediate(p)
        if gi != pi:
            g, p = (_undo(g), p) if gi else (g, _undo(p))
        if simplify:
            g, p = simplify_for_alignment(g), simplify_for_alignment(p)
        report.add(sent_id,
                   extract_brackets(g, include_preterminals, keep_punct, pmap),
                   extract_brackets(p, include_preterminals, keep_punct, pmap))
    return report
