"""Punctuation-aware, reversible treebank binarization."""

__version__ = "0.1.0"

from .tree import AttachDirection, Tree
from .treebank_io import (DEFAULT_PUNCT_MAP, AttachClass, DepGraph, PunctMap,
                          load_punct_map, parse_tree, read_conll, read_corpus,
                          serialize_tree)
from .restructure import (RestructureRecord, classify_punct, restructure,
                          unrestructure)
from .binarize import (BinarizeSignature, Origin, binarize, debinarize,
                       roundtrip_check)
