"""Feature vectors for head-child classification."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from ..tree import Tree
from ..treebank_io import DEFAULT_PUNCT_MAP, PunctMap, functional_tags
from .rules import base_category

PAD = "<pad>"
NONE = "<none>"
WINDOW = 16


class Mode(enum.Enum):
    BASE = "base"
    PUNCT = "punct"


@dataclass(frozen=True)
class HeadFeatureVector:
    """Context of one constituent.

    Candidates are the non-punctuation children (all children if there are
    none); per-candidate fields have length ``window`` and are padded with
    PAD. ``punct_adjacent`` holds ``(punct before, punct after)`` per
    candidate and is None in BASE mode.
    """

    parent_label: str
    child_labels: tuple[str, ...]
    functional_tags: tuple[str, ...]
    positions: tuple[int, ...]           # child index of each candidate
    norm_positions: tuple[float, ...]
    punct_adjacent: tuple[tuple[bool, bool], ...] | None

    @property
    def n_candidates(self) -> int:
        return len(self.positions)

    def slot_of(self, child_index: int) -> int | None:
        """Output slot for a child; candidates past the window share the
        last slot."""
        try:
            slot = self.positions.index(child_index)
        except ValueError:
            return None
        return min(slot, len(self.child_labels) - 1)

    def child_of(self, slot: int) -> int:
        return self.positions[min(slot, len(self.positions) - 1)]


def features_from_children(parent_label: str,
                           children: Sequence[tuple[str, bool]],
                           mode: Mode = Mode.PUNCT,
                           window: int = WINDOW) -> HeadFeatureVector:
    """Build a feature vector from ``(label, is_punct)`` children."""
    candidates = [i for i, (_, punct) in enumerate(children) if not punct]
    if not candidates:
        candidates = list(range(len(children)))
    m = len(candidates)
    shown = candidates[:window]
    labels = [base_category(children[i][0]) for i in shown]
    tags = [(functional_tags(children[i][0]) or (NONE,))[0] for i in shown]
    pad = window - len(shown)
    adjacent = None
    if mode is Mode.PUNCT:
        n = len(children)
        adjacent = tuple((i > 0 and children[i - 1][1],
                          i + 1 < n and children[i + 1][1])
                         for i in candidates)
    return HeadFeatureVector(
        parent_label=base_category(parent_label),
        child_labels=tuple(labels) + (PAD,) * pad,
        functional_tags=tuple(tags) + (PAD,) * pad,
        positions=tuple(candidates),
        norm_positions=tuple(j / (m - 1) if m > 1 else 0.0
                             for j in range(m)),
        punct_adjacent=adjacent,
    )


def child_descriptors(node: Tree, pmap: PunctMap = DEFAULT_PUNCT_MAP
                      ) -> list[tuple[str, bool]]:
    return [(c.label, c.flag is not None or pmap.is_punct(c))
            for c in node.children]


def extract_features(parent: Tree, mode: Mode = Mode.PUNCT,
                     pmap: PunctMap = DEFAULT_PUNCT_MAP,
                     window: int = WINDOW) -> HeadFeatureVector:
    """Feature vector for an internal node.

    Punctuation children are never candidates; in PUNCT mode each
    candidate records whether punctuation immediately precedes or follows
    it, which is exactly the sibling a restructured mark attaches to.
    """
    if parent.token is not None:
        raise ValueError("features are defined for internal nodes only")
    return features_from_children(parent.label,
                                  child_descriptors(parent, pmap), mode,
                                  window)
