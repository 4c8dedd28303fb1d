"""Reading and writing bracketed trees, punctuation maps and CoNLL files."""
from __future__ import annotations

import enum
import io
import logging
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Iterator, Mapping, Union

from .errors import ConfigError, FormatError, TreeParseError
from .tree import AttachDirection, Tree, fold

log = logging.getLogger(__name__)

Source = Union[str, os.PathLike, IO[str], IO[bytes]]

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")
_FUNC_RE = re.compile(r"^(@?[^-=@][^-=]*)[-=].*$")
_FLAG_SUFFIX = {"#L": AttachDirection.LEFT, "#R": AttachDirection.RIGHT}
_ESCAPES = {"(": "-LRB-", ")": "-RRB-"}

# Penn Treebank word-class tags; a leaf carrying one of these is never
# punctuation, whatever its token (e.g. possessive ``(POS ')``).
PTB_WORD_TAGS = frozenset(
    "CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$ RB "
    "RBR RBS RP SYM TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB $ #".split())


# --- bracketed trees -------------------------------------------------------

def _leaf_label(label: str) -> tuple[str, AttachDirection | None]:
    if len(label) > 2 and label[-2:] in _FLAG_SUFFIX:
        return label[:-2], _FLAG_SUFFIX[label[-2:]]
    return label, None


def _build(tokens: Iterable[tuple[str, int]], end: int,
           tree_index: int | None = None) -> Tree:
    """Assemble one tree from ``(token, offset)`` pairs."""
    # frame: [label, children, token, offset]
    stack: list[list] = []
    result = None
    for tok, offset in tokens:
        if result is not None:
            raise TreeParseError("trailing input after complete tree",
                                 offset, tree_index)
        if tok == "(":
            stack.append([None, [], None, offset])
        elif tok == ")":
            if not stack:
                raise TreeParseError("unbalanced ')'", offset, tree_index)
            label, children, token, start = stack.pop()
            if label is None:
                if len(children) != 1:
                    raise TreeParseError(
                        "unlabeled bracket must wrap exactly one tree",
                        start, tree_index)
                node = children[0]
            elif token is not None:
                leaf_label, flag = _leaf_label(label)
                node = Tree(leaf_label, (), token, flag)
            elif children:
                node = Tree(label, children)
            else:
                raise TreeParseError("node %r has no children" % label,
                                     start, tree_index)
            if stack:
                stack[-1][1].append(node)
            else:
                result = node
        else:
            if not stack:
                raise TreeParseError("token %r outside brackets" % tok,
                                     offset, tree_index)
            frame = stack[-1]
            if frame[0] is None and not frame[1]:
                frame[0] = tok
            elif frame[2] is None and not frame[1] and frame[0] is not None:
                frame[2] = tok
            else:
                raise TreeParseError("unexpected token %r" % tok, offset,
                                     tree_index)
    if stack:
        raise TreeParseError("unbalanced '(': unexpected end of input", end,
                             tree_index)
    if result is None:
        raise TreeParseError("empty input", end, tree_index)
    return result


def parse_tree(text: str) -> Tree:
    """Parse one bracketed tree, e.g. ``(S (NP (DT The)) (VP (VBD ran)))``.

    An optional unlabeled outer bracket (``( (S ...) )``) is removed. Leaf
    labels ending in ``#L``/``#R`` are read as attachment flags.
    """
    tokens = ((m.group(), m.start()) for m in _TOKEN_RE.finditer(text))
    return _build(tokens, len(text))


def _escape(token: str) -> str:
    if "(" in token or ")" in token:
        for raw, esc in _ESCAPES.items():
            token = token.replace(raw, esc)
    return token


def serialize_tree(tree: Tree, markers: bool = True) -> str:
    """Single-line bracketed form.

    With ``markers`` set, flagged punctuation leaves are written as
    ``(,#L ,)``; without it the flags are dropped. Intermediate ``@X``
    labels are written as they are.
    """
    out: list[str] = []
    stack: list = [tree]
    while stack:
        node = stack.pop()
        if node is None:
            out[-1] += ")"
        elif node.token is not None:
            label = node.label
            if markers and node.flag is not None:
                label += "#" + node.flag.value
            out.append("(%s %s)" % (label, _escape(node.token)))
        else:
            out.append("(" + node.label)
            stack.append(None)
            stack.extend(reversed(node.children))
    return " ".join(out)


def _open_text(source: Source):
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8"), True
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or (
            hasattr(source, "mode") and "b" in getattr(source, "mode", "")):
        return io.TextIOWrapper(source, encoding="utf-8"), False
    return source, False


def _lines(source: Source) -> Iterator[str]:
    handle, owned = _open_text(source)
    try:
        for line in handle:
            if isinstance(line, bytes):
                line = line.decode("utf-8")
            yield line
    finally:
        if owned:
            handle.close()
        elif isinstance(handle, io.TextIOWrapper):
            handle.detach()


def read_corpus(source: Source, strip_functional: bool = True,
                remove_empty: bool = True) -> Iterator[Tree]:
    """Stream trees from a (possibly multi-line, PTB ``.mrg`` style) file.

    Trees are parsed one at a time as their brackets close, so memory use is
    bounded by the largest tree. Errors name the 1-based tree index and the
    line. Trees that become empty after removing ``-NONE-`` elements are
    dropped with a warning.
    """
    index = 1
    depth = 0
    pending: list[tuple[str, int]] = []
    start_line = 1
    lineno = 0
    for lineno, line in enumerate(_lines(source), 1):
        for m in _TOKEN_RE.finditer(line):
            tok = m.group()
            if depth == 0:
                if tok != "(":
                    raise TreeParseError("unexpected %r between trees" % tok,
                                         m.start(), index, lineno)
                start_line = lineno
            if tok == "(":
                depth += 1
            elif tok == ")":
                depth -= 1
            pending.append((tok, m.start()))
            if depth == 0:
                try:
                    tree = _build(pending, m.end(), index)
                except TreeParseError as exc:
                    raise TreeParseError(exc.reason, exc.offset, index,
                                         start_line) from exc
                pending = []
                index += 1
                tree = preprocess(tree, strip_functional, remove_empty)
                if tree is None:
                    log.warning("tree %d is empty after removing -NONE- "
                                "elements; dropped", index - 1)
                else:
                    yield tree
    if depth:
        raise TreeParseError("unbalanced '(': unexpected end of input", None,
                             index, lineno)


def write_corpus(trees: Iterable[Tree], handle: IO[str],
                 markers: bool = True) -> int:
    n = 0
    for tree in trees:
        handle.write(serialize_tree(tree, markers))
        handle.write("\n")
        n += 1
    return n


def strip_functional_tags(label: str) -> str:
    """``NP-SBJ-1`` -> ``NP``; ``-NONE-``, ``-LRB-`` are left alone."""
    m = _FUNC_RE.match(label)
    return m.group(1) if m else label


def functional_tags(label: str) -> tuple[str, ...]:
    """Functional tags of a label, e.g. ``NP-SBJ-1`` -> ``('SBJ',)``."""
    m = _FUNC_RE.match(label)
    if not m:
        return ()
    rest = label[len(m.group(1)):]
    return tuple(t for t in re.split(r"[-=]", rest) if t and not t.isdigit())


def preprocess(tree: Tree, strip_functional: bool = True,
               remove_empty: bool = True) -> Tree | None:
    """Standard PTB cleanup: drop ``-NONE-`` leaves (and parents left empty
    by their removal) and strip functional tags from phrase labels."""

    def visit(node, kids):
        if node.token is not None:
            if remove_empty and node.label == "-NONE-":
                return None
            return node
        kids = [k for k in kids if k is not None]
        if not kids:
            return None
        label = strip_functional_tags(node.label) if strip_functional \
            else node.label
        if label == node.label and all(
                a is b for a, b in zip(kids, node.children)) \
                and len(kids) == len(node.children):
            return node
        return Tree(label, kids)

    return fold(tree, visit)


# --- punctuation map -------------------------------------------------------

class AttachClass(enum.Enum):
    LEFT_ATTACHING = "LEFT"
    RIGHT_ATTACHING = "RIGHT"
    PAIRED = "PAIRED"


@dataclass(frozen=True, eq=False)
class PunctMap:
    """Punctuation symbols and their attachment classes.

    A PAIRED opener with a distinct partner behaves as left-attaching (it
    opens toward the right) and its partner as right-attaching. A symbol
    paired with itself (``"``) is resolved by context: the first unmatched
    occurrence opens.
    """

    entries: Mapping[str, AttachClass] = field(default_factory=dict)
    pair_partners: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for opener in self.pair_partners:
            if self.entries.get(opener) is not AttachClass.PAIRED:
                raise ConfigError("partner declared for non-PAIRED %r"
                                  % opener)
        for tok, cls in self.entries.items():
            if cls is AttachClass.PAIRED and tok not in self.pair_partners:
                raise ConfigError("PAIRED token %r has no partner" % tok)
        object.__setattr__(self, "_closers",
                           {c: o for o, c in self.pair_partners.items()
                            if c != o})

    def __len__(self):
        return len(self.entries) + len(
            [c for c in self._closers if c not in self.entries])

    def __contains__(self, token):
        return token in self.entries or token in self._closers

    def attach_class(self, token: str) -> AttachClass | None:
        """Effective class of a symbol, or None if it is not punctuation."""
        cls = self.entries.get(token)
        if cls is AttachClass.PAIRED:
            if self.pair_partners[token] == token:
                return AttachClass.PAIRED
            return AttachClass.LEFT_ATTACHING
        if cls is None and token in self._closers:
            return AttachClass.RIGHT_ATTACHING
        return cls

    def is_self_paired(self, token: str) -> bool:
        return self.pair_partners.get(token) == token

    def partner(self, token: str) -> str | None:
        return self.pair_partners.get(token)

    def key(self, leaf: Tree) -> str | None:
        """Map symbol under which a leaf is punctuation, or None.

        The POS label is consulted first; the token is used only when the
        label is not a word-class tag.
        """
        if leaf.token is None:
            return None
        if leaf.label in self:
            return leaf.label
        if leaf.token in self and leaf.label not in PTB_WORD_TAGS:
            return leaf.token
        return None

    def is_punct(self, node: Tree) -> bool:
        return node.token is not None and self.key(node) is not None


def load_punct_map(text: str) -> PunctMap:
    """Parse ``<token> <LEFT|RIGHT|PAIRED> [<partner>]`` lines.

    ``#`` at the start of a line or after whitespace begins a comment.
    """
    entries: dict[str, AttachClass] = {}
    partners: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        fields = []
        for f in line.split():
            if f.startswith("#"):
                break
            fields.append(f)
        if not fields:
            continue
        if len(fields) < 2:
            raise ConfigError("missing attachment class", lineno)
        tok, keyword, rest = fields[0], fields[1].upper(), fields[2:]
        keyword = keyword.replace("_ATTACHING", "")
        try:
            cls = AttachClass(keyword)
        except ValueError:
            raise ConfigError("unknown attachment class %r" % fields[1],
                              lineno) from None
        if cls is AttachClass.PAIRED:
            if len(rest) != 1:
                raise ConfigError("PAIRED token %r needs one partner" % tok,
                                  lineno)
            partners[tok] = rest[0]
        elif rest:
            raise ConfigError("unexpected fields after %s" % keyword, lineno)
        entries[tok] = cls
    return PunctMap(entries, partners)


def read_punct_map(path: str | os.PathLike) -> PunctMap:
    with open(path, encoding="utf-8") as f:
        return load_punct_map(f.read())


def _data_text(name: str) -> str:
    return resources.files("punctbin").joinpath("data", name).read_text(
        encoding="utf-8")


DEFAULT_PUNCT_MAP = load_punct_map(_data_text("english.punct"))


# --- dependency graphs -----------------------------------------------------

@dataclass(frozen=True)
class DepGraph:
    """Dependency tree over a sentence; heads are 1-based, 0 is the root."""

    tokens: tuple[tuple[str, int], ...]

    def __post_init__(self):
        n = len(self.tokens)
        for i, (form, head) in enumerate(self.tokens, 1):
            if not 0 <= head <= n:
                raise FormatError("head %d of token %d out of range"
                                  % (head, i))
            if head == i:
                raise FormatError("token %d is its own head" % i)

    @property
    def forms(self) -> list[str]:
        return [form for form, _ in self.tokens]

    @property
    def heads(self) -> list[int]:
        return [head for _, head in self.tokens]

    def __len__(self):
        return len(self.tokens)


def read_conll(source: Source) -> Iterator[DepGraph]:
    """Sentences from a tab-separated CoNLL(-X/U) file.

    Only column 1 (index), 2 (form) and 7 (head) are read; multiword-range
    and empty-node rows are skipped.
    """
    rows: list[tuple[str, int]] = []
    lines: list[int] = []
    for lineno, line in enumerate(_lines(source), 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            if rows:
                yield _make_graph(rows, lines)
                rows, lines = [], []
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 7:
            raise FormatError("expected at least 7 tab-separated columns",
                              lineno)
        if "-" in cols[0] or "." in cols[0]:
            continue
        try:
            head = int(cols[6])
        except ValueError:
            raise FormatError("non-integer head %r" % cols[6],
                              lineno) from None
        rows.append((cols[1], head))
        lines.append(lineno)
    if rows:
        yield _make_graph(rows, lines)


def _make_graph(rows, lines) -> DepGraph:
    n = len(rows)
    for i, ((_, head), lineno) in enumerate(zip(rows, lines), 1):
        if not 0 <= head <= n:
            raise FormatError("head %d out of range for a %d-token sentence"
                              % (head, n), lineno)
        if head == i:
            raise FormatError("token %d is its own head" % i, lineno)
    return DepGraph(tuple(rows))


def write_conll(graphs: Iterable[DepGraph], handle: IO[str]) -> None:
    """Ten-column CoNLL-X with only ID, FORM and HEAD filled in."""
    for graph in graphs:
        for i, (form, head) in enumerate(graph.tokens, 1):
            handle.write("%d\t%s\t_\t_\t_\t_\t%d\t_\t_\t_\n" % (i, form, head))
        handle.write("\n")
