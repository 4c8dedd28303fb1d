"""Punctuation attachment before binarization.

Every punctuation mark is made the sibling of the material it attaches to,
inside an ``@X`` node (``X`` being the label of the constituent that holds
the mark). With ``nt`` a non-punctuation child:

* a mark attaching leftward (``,`` ``.`` closers) groups everything to its
  left:  ``(X .. nt_i , nt_j ..) -> (X (@X (@X .. nt_i) ,) nt_j ..)``
* a mark attaching rightward (openers) groups everything to its right:
  ``(X .. nt_i `` nt_j ..) -> (X .. nt_i (@X `` (@X nt_j ..)))``
* an opener and its declared closer under the same parent enclose the
  material between them:
  ``(X .. nt_i `` nt_j .. '' nt_k ..) -> (X .. nt_i (@X (@X `` (@X nt_j ..)) '') nt_k ..)``

A group of a single element is not wrapped, and when a mark is the last
(or, for an opener, the first) thing left in its constituent the outer
``@X`` is the constituent itself, so ``(S NP VP ,)`` becomes
``(S (@S NP VP) ,)``. Marks are handled left to right. Restructured
punctuation leaves carry their direction as a flag, which makes the output
self-describing; removing every ``@X`` node and every flag restores the
input exactly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import IntegrityError
from .tree import AttachDirection, Tree, fold
from .treebank_io import DEFAULT_PUNCT_MAP, AttachClass, PunctMap

log = logging.getLogger(__name__)

LEFT = AttachDirection.LEFT
RIGHT = AttachDirection.RIGHT

OPEN, CLOSE = "open", "close"


@dataclass(frozen=True)
class RestructureRecord:
    """One restructured punctuation mark.

    ``node_index`` is the preorder index, in the original tree, of the
    constituent holding the mark.
    """

    punct_token: str
    direction: AttachDirection
    parent_label: str
    original_child_index: int
    node_index: int = 0


class _Item(NamedTuple):
    tree: Tree
    key: str | None          # punctuation map symbol, None for material
    role: str | None         # OPEN/CLOSE for context-resolved symbols
    index: int | None        # position among the original children


def classify_punct(leaf: Tree, pmap: PunctMap = DEFAULT_PUNCT_MAP,
                   siblings: Sequence[Tree] = (), index: int = 0,
                   paired_role: str | None = None) -> AttachDirection | None:
    """Attachment direction of ``leaf`` at ``siblings[index]``.

    Returns None for non-punctuation. A mark with no material before it in
    ``siblings`` attaches rightward and one with no material after it
    attaches leftward, whatever its class. ``paired_role`` resolves
    self-paired symbols; an unresolved one behaves as a closer.
    """
    key = pmap.key(leaf)
    if key is None:
        return None
    if siblings:
        before = any(not pmap.is_punct(s) for s in siblings[:index])
        after = any(not pmap.is_punct(s) for s in siblings[index + 1:])
        if after and not before:
            return RIGHT
        if before and not after:
            return LEFT
    cls = pmap.attach_class(key)
    if cls is AttachClass.PAIRED:
        if paired_role == OPEN:
            return RIGHT
        if paired_role is None:
            log.info("unpaired %r treated as a closer", leaf.token)
        return LEFT
    return LEFT if cls is AttachClass.RIGHT_ATTACHING else RIGHT


class _Restructurer:
    def __init__(self, pmap: PunctMap):
        self.pmap = pmap
        self.records: list[RestructureRecord] = []
        self.skipped = 0

    def _direction(self, items: list[_Item], i: int) -> AttachDirection:
        before = i > 0
        after = any(it.key is None for it in items[i + 1:])
        if after and not before:
            return RIGHT
        if before and not after:
            return LEFT
        return classify_punct(items[i].tree, self.pmap,
                              paired_role=items[i].role)

    def _mark(self, item: _Item, direction: AttachDirection, label: str,
              node_index: int) -> Tree:
        self.records.append(RestructureRecord(
            item.tree.token, direction, label[1:], item.index, node_index))
        return Tree(item.tree.label, (), item.tree.token, direction)

    def _partner(self, items: list[_Item], i: int) -> int | None:
        """Index of the closer matching the opener at ``i``, if it follows
        under the same parent with material in between."""
        opener = items[i]
        pmap = self.pmap
        if pmap.is_self_paired(opener.key):
            if opener.role != OPEN:
                return None
            j = next((j for j in range(i + 1, len(items))
                      if items[j].key == opener.key), None)
            if j is None or items[j].role != CLOSE:
                return None
        else:
            closer = pmap.partner(opener.key)
            if closer is None or closer == opener.key:
                return None
            depth = 0
            j = None
            for k in range(i + 1, len(items)):
                key = items[k].key
                if key == opener.key:
                    depth += 1
                elif key == closer:
                    if depth == 0:
                        j = k
                        break
                    depth -= 1
            if j is None:
                return None
        if any(it.key is None for it in items[i + 1:j]):
            return j
        return None

    def attach(self, items: list[_Item], label: str,
               node_index: int) -> list[Tree]:
        """Children for a node (``label`` is its ``@X`` label) holding
        ``items``; at least one item must be material."""
        while True:
            i = next((k for k, it in enumerate(items) if it.key is not None),
                     None)
            if i is None:
                return [it.tree for it in items]
            direction = self._direction(items, i)
            punct = self._mark(items[i], direction, label, node_index)
            if direction is LEFT:
                group = self._group([it.tree for it in items[:i]], label)
                rest = items[i + 1:]
                if not rest:
                    return [group, punct]
                items = [_Item(Tree(label, (group, punct)), None, None, None)]
                items.extend(rest)
                continue
            j = self._partner(items, i)
            if j is not None:
                closer = self._mark(items[j], LEFT, label, node_index)
                inner = self._group(
                    self.attach(items[i + 1:j], label, node_index), label)
                quoted = Tree(label, (punct, inner))
                left, rest = items[:i], items[j + 1:]
                if not left and not rest:
                    return [quoted, closer]
                items = left + [_Item(Tree(label, (quoted, closer)),
                                      None, None, None)] + rest
                continue
            right = self._group(
                self.attach(items[i + 1:], label, node_index), label)
            if i == 0:
                return [punct, right]
            return [it.tree for it in items[:i]] + [
                Tree(label, (punct, right))]

    @staticmethod
    def _group(trees: list[Tree], label: str) -> Tree:
        return trees[0] if len(trees) == 1 else Tree(label, trees)

    def run(self, tree: Tree) -> Tree:
        pmap = self.pmap
        roles = _paired_roles(tree, pmap)
        counter = iter(range(len(roles)))

        def visit(node, kids, pre):
            if node.token is not None:
                if node.flag is not None:
                    raise ValueError("tree is already restructured "
                                     "(flagged leaf %r)" % node.token)
                key = pmap.key(node)
                role = roles[next(counter)] if key is not None \
                    and pmap.is_self_paired(key) else None
                return _Item(node, key, role, None)
            if node.label.startswith("@"):
                raise ValueError("tree is already restructured "
                                 "(label %r)" % node.label)
            items = [it._replace(index=i) for i, it in enumerate(kids)]
            unchanged = all(it.tree is c for it, c in zip(items,
                                                          node.children))
            if all(it.key is None for it in items):
                new = node if unchanged else Tree(
                    node.label, [it.tree for it in items])
            elif all(it.key is not None for it in items):
                self.skipped += 1
                log.warning("constituent %s holds only punctuation; left "
                            "unchanged", node.label)
                new = node if unchanged else Tree(
                    node.label, [it.tree for it in items])
            else:
                children = self.attach(items, "@" + node.label, pre)
                new = Tree(node.label, children)
            return _Item(new, None, None, None)

        return fold(tree, visit, indexed=True).tree


def _paired_roles(tree: Tree, pmap: PunctMap) -> list[str | None]:
    """OPEN/CLOSE for each occurrence of a self-paired symbol, in document
    order; an occurrence left without a partner gets None."""
    occurrences = [pmap.key(leaf) for leaf in tree.leaves()]
    occurrences = [k for k in occurrences
                   if k is not None and pmap.is_self_paired(k)]
    totals: dict[str, int] = {}
    for k in occurrences:
        totals[k] = totals.get(k, 0) + 1
    seen: dict[str, int] = {}
    roles: list[str | None] = []
    for k in occurrences:
        n = seen.get(k, 0)
        seen[k] = n + 1
        if n % 2:
            roles.append(CLOSE)
        elif n + 1 < totals[k]:
            roles.append(OPEN)
        else:
            roles.append(None)
    return roles


def restructure_with_stats(tree: Tree, pmap: PunctMap = DEFAULT_PUNCT_MAP
                           ) -> tuple[Tree, list[RestructureRecord], int]:
    """Like :func:`restructure`, also returning the number of
    punctuation-only constituents that were left untouched."""
    worker = _Restructurer(pmap)
    new = worker.run(tree)
    records = sorted(worker.records,
                     key=lambda r: (r.node_index, r.original_child_index))
    return new, records, worker.skipped


def restructure(tree: Tree, pmap: PunctMap = DEFAULT_PUNCT_MAP
                ) -> tuple[Tree, list[RestructureRecord]]:
    """Attach every punctuation mark inside an ``@X`` group.

    Raises ValueError if the tree already contains ``@`` labels or flagged
    leaves.
    """
    new, records, _ = restructure_with_stats(tree, pmap)
    return new, records


def splice(tree: Tree) -> Tree:
    """Remove every ``@X`` node, moving its children into its parent.

    Leaf flags are kept. An ``@X`` node whose nearest ordinary ancestor is
    not labeled ``X`` raises :class:`IntegrityError`.
    """

    def visit(node, kids):
        if node.token is not None:
            return [node], None
        children = []
        labels = None
        for trees, labs in kids:
            children.extend(trees)
            if labs:
                labels = labs if labels is None else labels | labs
        if node.label.startswith("@"):
            return children, ({node.label} | labels) if labels \
                else {node.label}
        if labels and labels != {"@" + node.label}:
            raise IntegrityError("%s found under %s" % (
                ", ".join(sorted(labels - {"@" + node.label})), node.label))
        if len(children) == len(node.children) and all(
                a is b for a, b in zip(children, node.children)):
            return [node if node.head is None
                    else Tree(node.label, children)], None
        return [Tree(node.label, children)], None

    result, _ = fold(tree, visit)
    if len(result) != 1:
        raise IntegrityError("root is an intermediate @X node")
    return result[0]


def strip_flags(tree: Tree) -> Tree:
    def visit(node, kids):
        if node.token is not None:
            if node.flag is None:
                return node
            return Tree(node.label, (), node.token)
        if all(a is b for a, b in zip(kids, node.children)):
            return node
        return Tree(node.label, kids)

    return fold(tree, visit)


def check_records(spliced: Tree, records: Sequence[RestructureRecord]) -> None:
    """Verify side records against a spliced (still flagged) tree."""
    if not records:
        return
    wanted: dict[int, list[RestructureRecord]] = {}
    for rec in records:
        wanted.setdefault(rec.node_index, []).append(rec)
    found = 0
    for pre, node in enumerate(spliced.subtrees()):
        recs = wanted.get(pre)
        if not recs:
            continue
        found += 1
        for rec in recs:
            if node.label != rec.parent_label:
                raise IntegrityError(
                    "record for %r points at node %d labeled %r"
                    % (rec.parent_label, pre, node.label))
            i = rec.original_child_index
            if not 0 <= i < len(node.children):
                raise IntegrityError("record child index %d out of range "
                                     "at node %d" % (i, pre))
            child = node.children[i]
            if child.token != rec.punct_token or child.flag != rec.direction:
                raise IntegrityError(
                    "no %s-attached %r at child %d of node %d"
                    % (rec.direction.name, rec.punct_token, i, pre))
    if found != len(wanted):
        raise IntegrityError("records reference nodes missing from the tree")


def unrestructure(tree: Tree,
                  records: Sequence[RestructureRecord] | None = None) -> Tree:
    """Inverse of :func:`restructure`.

    All ``@X`` nodes are spliced out and the flags removed. When
    ``records`` are given they are checked against the result and an
    :class:`IntegrityError` is raised on any mismatch.
    """
    spliced = splice(tree)
    if records:
        check_records(spliced, records)
    return strip_flags(spliced)
