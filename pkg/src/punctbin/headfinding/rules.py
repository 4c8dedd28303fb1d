"""Rule-based head finding with a percolation table."""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import ConfigError
from ..treebank_io import _data_text, strip_functional_tags


class Direction(enum.Enum):
    LEFT_TO_RIGHT = "LEFT_TO_RIGHT"
    RIGHT_TO_LEFT = "RIGHT_TO_LEFT"


Directive = tuple[Direction, tuple[str, ...]]


def base_category(label: str) -> str:
    """``@NP-SBJ`` -> ``NP``."""
    if label.startswith("@"):
        label = label[1:]
    return strip_functional_tags(label)


@dataclass(frozen=True)
class HeadTable:
    rules: Mapping[str, tuple[Directive, ...]] = field(default_factory=dict)
    default_rule: Directive = (Direction.LEFT_TO_RIGHT, ())

    def directives(self, parent_label: str) -> tuple[Directive, ...]:
        return self.rules.get(base_category(parent_label),
                              (self.default_rule,))

    def find_head(self, parent_label: str,
                  children: Sequence[tuple[str, bool]]) -> int:
        return collins_head(parent_label, children, self)

    __call__ = find_head


def load_head_table(text: str) -> HeadTable:
    """Parse ``PARENT DIRECTION label1 label2 ...`` lines.

    Lines starting with ``#`` are comments. Lines for the same parent
    accumulate in order; ``*`` sets the default.
    """
    rules: dict[str, list[Directive]] = {}
    default = None
    for lineno, line in enumerate(text.splitlines(), 1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        if len(fields) < 2:
            raise ConfigError("missing search direction", lineno)
        try:
            direction = Direction(fields[1].upper())
        except ValueError:
            raise ConfigError("unknown direction %r" % fields[1],
                              lineno) from None
        directive = (direction, tuple(fields[2:]))
        if fields[0] == "*":
            if default is not None:
                raise ConfigError("duplicate default rule", lineno)
            default = directive
        else:
            rules.setdefault(fields[0], []).append(directive)
    frozen = {k: tuple(v) for k, v in rules.items()}
    if default is None:
        return HeadTable(frozen)
    return HeadTable(frozen, default)


def read_head_table(path: str | os.PathLike) -> HeadTable:
    with open(path, encoding="utf-8") as f:
        return load_head_table(f.read())


DEFAULT_HEAD_TABLE = load_head_table(_data_text("collins.heads"))


def collins_head(parent_label: str, children: Sequence[tuple[str, bool]],
                 table: HeadTable | None = None) -> int:
    """Index of the head child among ``(label, is_punct)`` children.

    Punctuation is never chosen while another child exists. For each
    directive of the parent, each priority label is tried in turn against
    the children in the directive's direction; without a match the first
    non-punctuation child in the first directive's direction is taken.
    """
    if table is None:
        table = DEFAULT_HEAD_TABLE
    candidates = [i for i, (_, punct) in enumerate(children) if not punct]
    if len(candidates) <= 1:
        return candidates[0] if candidates else 0
    cats = {i: base_category(children[i][0]) for i in candidates}
    directives = table.directives(parent_label)
    for direction, priority in directives:
        order = candidates if direction is Direction.LEFT_TO_RIGHT \
            else candidates[::-1]
        for label in priority:
            for i in order:
                if cats[i] == label:
                    return i
    if directives[0][0] is Direction.LEFT_TO_RIGHT:
        return candidates[0]
    return candidates[-1]
