"""Immutable ordered trees.

A leaf is a preterminal: it carries a POS label and a token. Every other
node carries a label and at least one child. Restructured punctuation
leaves additionally carry an attachment flag; binarized nodes may carry a
head index. All traversals are iterative so that very deep chains do not
exhaust the interpreter stack.
"""
from __future__ import annotations

import enum
from typing import Callable, Iterator, Sequence, TypeVar

R = TypeVar("R")


class AttachDirection(enum.Enum):
    """Side a restructured punctuation mark groups with.

    LEFT groups the mark with the material on its left (closers, commas,
    periods); RIGHT groups it with the material on its right (openers).
    """

    LEFT = "L"
    RIGHT = "R"


class Tree:
    """Rooted ordered tree node.

    ``head`` (index of the head child) is an annotation set by binarization;
    it takes no part in equality or hashing.
    """

    __slots__ = ("label", "children", "token", "flag", "head", "size", "_hash")

    def __init__(self, label: str, children: Sequence[Tree] = (),
                 token: str | None = None, flag: AttachDirection | None = None,
                 head: int | None = None):
        children = tuple(children)
        if token is None:
            if not children:
                raise ValueError("internal node %r has no children" % label)
            size = 0
            for child in children:
                size += child.size
        else:
            if children:
                raise ValueError("leaf %r cannot have children" % label)
            size = 1
        if flag is not None and token is None:
            raise ValueError("only leaves carry attachment flags")
        setattr_ = object.__setattr__
        setattr_(self, "label", label)
        setattr_(self, "children", children)
        setattr_(self, "token", token)
        setattr_(self, "flag", flag)
        setattr_(self, "head", head)
        setattr_(self, "size", size)
        setattr_(self, "_hash", hash((label, token, flag,
                                      tuple(c._hash for c in children))))

    def __setattr__(self, name, value):
        raise AttributeError("Tree is immutable")

    def __delattr__(self, name):
        raise AttributeError("Tree is immutable")

    def __reduce__(self):
        return (Tree, (self.label, self.children, self.token, self.flag,
                       self.head))

    @classmethod
    def leaf(cls, label: str, token: str,
             flag: AttachDirection | None = None) -> Tree:
        return cls(label, (), token, flag)

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    @property
    def is_intermediate(self) -> bool:
        return self.label.startswith("@")

    @property
    def base_label(self) -> str:
        """Label with the intermediate-node ``@`` prefix removed."""
        return self.label[1:] if self.label.startswith("@") else self.label

    @property
    def head_direction(self) -> str | None:
        if self.head is None or len(self.children) != 2:
            return None
        return "LEFT_CHILD" if self.head == 0 else "RIGHT_CHILD"

    def replace(self, **kwargs) -> Tree:
        fields = dict(label=self.label, children=self.children,
                      token=self.token, flag=self.flag, head=self.head)
        fields.update(kwargs)
        return Tree(**fields)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if (a._hash != b._hash or a.label != b.label or a.token != b.token
                    or a.flag != b.flag or len(a.children) != len(b.children)):
                return False
            stack.extend(zip(a.children, b.children))
        return True

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __len__(self):
        return len(self.children)

    def __getitem__(self, path):
        """Index by child number or by a path tuple of child numbers."""
        if isinstance(path, int):
            return self.children[path]
        node = self
        for i in path:
            node = node.children[i]
        return node

    def __repr__(self):
        from .treebank_io import serialize_tree
        return "Tree(%r)" % serialize_tree(self)

    def __str__(self):
        from .treebank_io import serialize_tree
        return serialize_tree(self)

    def leaves(self) -> list[Tree]:
        """Leaf nodes in document order."""
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.token is not None:
                out.append(node)
            else:
                stack.extend(reversed(node.children))
        return out

    def words(self) -> list[str]:
        return [leaf.token for leaf in self.leaves()]

    def pos(self) -> list[tuple[str, str]]:
        return [(leaf.token, leaf.label) for leaf in self.leaves()]

    def subtrees(self) -> Iterator[Tree]:
        """All nodes, preorder."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def spans(self) -> Iterator[tuple[tuple[int, ...], Tree, int, int]]:
        """Yield ``(path, node, start, end)`` preorder; spans are 0-based,
        end-exclusive, over the terminal yield."""
        stack = [((), self, 0)]
        while stack:
            path, node, start = stack.pop()
            yield path, node, start, start + node.size
            offset = start + node.size
            for i in range(len(node.children) - 1, -1, -1):
                child = node.children[i]
                offset -= child.size
                stack.append((path + (i,), child, offset))

    def height(self) -> int:
        best = 0
        stack = [(self, 1)]
        while stack:
            node, depth = stack.pop()
            best = max(best, depth)
            stack.extend((c, depth + 1) for c in node.children)
        return best


def fold(tree: Tree, fn: Callable[..., R], indexed: bool = False) -> R:
    """Bottom-up fold: ``fn(node, child_results)`` is called for every node
    in postorder (leaves get an empty list). Leaves are visited in document
    order. With ``indexed``, ``fn`` also receives the node's preorder index.
    """
    stack = [(tree, 0, 0)]
    counter = 1
    results: list[list] = [[], []]
    while stack:
        node, i, pre = stack[-1]
        if i < len(node.children):
            stack[-1] = (node, i + 1, pre)
            stack.append((node.children[i], 0, counter))
            counter += 1
            results.append([])
        else:
            stack.pop()
            kids = results.pop()
            if indexed:
                results[-1].append(fn(node, kids, pre))
            else:
                results[-1].append(fn(node, kids))
    return results[0][0]


def first_difference(a: Tree, b: Tree) -> tuple[int, ...] | None:
    """Path of the first (preorder) node at which two trees differ, or None."""
    stack = [((), a, b)]
    while stack:
        path, x, y = stack.pop()
        if (x.label != y.label or x.token != y.token or x.flag != y.flag
                or len(x.children) != len(y.children)):
            return path
        for i in range(len(x.children) - 1, -1, -1):
            stack.append((path + (i,), x.children[i], y.children[i]))
    return None
