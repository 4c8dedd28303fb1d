"""Head-outward binarization with ``@X`` intermediate nodes, and its inverse."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

from .errors import ConfigError, IntegrityError
from .headfinding.rules import DEFAULT_HEAD_TABLE, base_category
from .restructure import (RestructureRecord, check_records, restructure,
                          restructure_with_stats, splice, strip_flags)
from .tree import Tree, first_difference, fold
from .treebank_io import DEFAULT_PUNCT_MAP, PunctMap, parse_tree, \
    serialize_tree

log = logging.getLogger(__name__)

HeadFinder = Callable[[str, Sequence[tuple[str, bool]]], int]


class Origin(enum.Enum):
    PUNCT_RULE = "punct"
    ARITY_REDUCTION = "arity"


@dataclass(frozen=True)
class BinarizeSignature:
    node_path: tuple[int, ...]
    origin: Origin


class _Bin(NamedTuple):
    tree: Tree
    category: str      # category of the lexical head, for head finding
    punct: bool


def binarize(tree: Tree, head_finder: HeadFinder | None = None,
             pmap: PunctMap = DEFAULT_PUNCT_MAP, signatures: bool = True
             ) -> tuple[Tree, list[BinarizeSignature]]:
    """Binarize a restructured (or punctuation-free) tree.

    A node with k > 2 children keeps its head child innermost and takes in
    its right siblings, then its left siblings, one at a time, each through
    a new ``@X`` node; the last step is the node itself. ``@X`` nodes
    already present are kept as single children. Every internal node of the
    result has its ``head`` set to the index of the child holding the
    lexical head.

    With ``signatures`` unset the (path-based, hence costlier) signature
    list is not computed and an empty list is returned.
    """
    if head_finder is None:
        head_finder = DEFAULT_HEAD_TABLE
    arity_nodes: set[int] = set()

    def visit(node, kids):
        if node.token is not None:
            return _Bin(node, node.label,
                        node.flag is not None or pmap.is_punct(node))
        children = [k.tree for k in kids]
        labels = [(k.category, k.punct) for k in kids]
        h = head_finder(node.label, labels)
        if not isinstance(h, int) or not 0 <= h < len(children):
            raise ConfigError("head finder gave no valid head for %s (got %r)"
                              % (node.label, h))
        category = kids[h].category if node.label.startswith("@") \
            else base_category(node.label)
        if len(children) <= 2:
            new = Tree(node.label, children, head=h)
        else:
            intermediate = "@" + node.label.lstrip("@")
            steps = [(j, 0) for j in range(h + 1, len(children))]
            steps += [(j, 1) for j in range(h - 1, -1, -1)]
            cur = children[h]
            last = len(steps) - 1
            for n, (j, head_side) in enumerate(steps):
                label = node.label if n == last else intermediate
                pair = (cur, children[j]) if head_side == 0 \
                    else (children[j], cur)
                cur = Tree(label, pair, head=head_side)
                if n != last:
                    arity_nodes.add(id(cur))
            new = cur
        return _Bin(new, category, False)

    result = fold(tree, visit).tree
    sigs: list[BinarizeSignature] = []
    if signatures:
        for path, node, _, _ in result.spans():
            if node.token is None and node.label.startswith("@"):
                origin = Origin.ARITY_REDUCTION if id(node) in arity_nodes \
                    else Origin.PUNCT_RULE
                sigs.append(BinarizeSignature(path, origin))
    return result, sigs


def debinarize(tree: Tree,
               signatures: Sequence[BinarizeSignature] | None = None,
               records: Sequence[RestructureRecord] | None = None) -> Tree:
    """Undo :func:`binarize` and the punctuation restructuring before it.

    Without ``signatures`` the tree is taken to be self-describing: flagged
    leaves mark punctuation groups and every other ``@X`` node came from
    arity reduction. With them, each ``@X`` node must be covered by a
    signature or directly hold a flagged leaf, and every signature must
    point at an ``@X`` node.
    """
    if signatures is not None:
        _check_signatures(tree, signatures)
    spliced = splice(tree)
    if records:
        check_records(spliced, records)
    return strip_flags(spliced)


def _check_signatures(tree: Tree,
                      signatures: Sequence[BinarizeSignature]) -> None:
    paths = {s.node_path for s in signatures}
    seen = 0
    for path, node, _, _ in tree.spans():
        if node.token is not None or not node.label.startswith("@"):
            if path in paths:
                raise IntegrityError("signature %r does not point at an @X "
                                     "node" % (path,))
            continue
        if path in paths:
            seen += 1
        elif not any(c.flag is not None for c in node.children):
            raise IntegrityError("%s node at %r has no signature and no "
                                 "flagged punctuation" % (node.label, path))
    if seen != len(paths):
        raise IntegrityError("signatures point outside the tree")


def is_binary(tree: Tree) -> bool:
    return all(len(node.children) <= 2 for node in tree.subtrees())


def head_leaf(tree: Tree) -> Tree:
    """Leaf reached by following ``head`` indices down from ``tree``."""
    node = tree
    while node.token is None:
        node = node.children[node.head or 0]
    return node


def transform(tree: Tree, head_finder: HeadFinder | None = None,
              pmap: PunctMap = DEFAULT_PUNCT_MAP) -> Tree:
    """Restructure then binarize, for file output (no side data)."""
    restructured, _ = restructure(tree, pmap)
    return binarize(restructured, head_finder, pmap, signatures=False)[0]


@dataclass
class RoundtripFailure:
    index: int                 # 1-based position in the corpus
    path: tuple[int, ...] | None
    route: str                 # "signatures" or "file"
    message: str = ""


@dataclass
class RoundtripReport:
    total: int = 0
    restored: int = 0
    skipped_by_rule: int = 0   # trees with punctuation-only constituents
    failures: list[RoundtripFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = ["%d/%d restored" % (self.restored, self.total)]
        if self.skipped_by_rule:
            lines.append("%d tree(s) with punctuation-only constituents "
                         "left unrestructured" % self.skipped_by_rule)
        for f in self.failures:
            where = "/".join(map(str, f.path)) if f.path is not None else "-"
            lines.append("tree %d (%s): first difference at %s %s"
                         % (f.index, f.route, where, f.message).rstrip())
        return "\n".join(lines)


def roundtrip_check(corpus: Iterable[Tree], pmap: PunctMap = DEFAULT_PUNCT_MAP,
                    head_finder: HeadFinder | None = None,
                    through_text: bool = True) -> RoundtripReport:
    """Run every tree through restructure and binarize and back.

    Two inverse routes are checked: the in-memory one with records and
    signatures, and (with ``through_text``) serialization to the marker
    format, re-parsing, and self-describing debinarization.
    """
    report = RoundtripReport()
    for index, tree in enumerate(corpus, 1):
        report.total += 1
        ok = True
        try:
            restructured, records, skipped = restructure_with_stats(tree, pmap)
            if skipped:
                report.skipped_by_rule += 1
            binary, sigs = binarize(restructured, head_finder, pmap)
            routes = [("signatures",
                       lambda: debinarize(binary, sigs, records))]
            if through_text:
                routes.append(("file", lambda: debinarize(
                    parse_tree(serialize_tree(binary)))))
        except Exception as exc:  # failures are data here
            report.failures.append(RoundtripFailure(
                index, None, "forward", "%s: %s" % (type(exc).__name__, exc)))
            continue
        for route, back in routes:
            try:
                restored = back()
            except Exception as exc:
                report.failures.append(RoundtripFailure(
                    index, None, route, "%s: %s" % (type(exc).__name__, exc)))
                ok = False
                continue
            if restored != tree:
                report.failures.append(RoundtripFailure(
                    index, first_difference(tree, restored), route))
                ok = False
        if ok:
            report.restored += 1
    return report
