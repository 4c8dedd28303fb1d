"""Head-child identification: percolation rules, gold alignment from
dependencies, and a feed-forward classifier."""

from .rules import (DEFAULT_HEAD_TABLE, Direction, HeadTable, collins_head,
                    load_head_table, read_head_table)
from .align import (HeadGoldCorpus, HeadInstance, align_heads,
                    build_gold_corpus, corpus_from_cache, read_gold_cache,
                    write_gold_cache)
from .features import HeadFeatureVector, Mode, extract_features
from .model import HeadModel, TrainConfig, train_head_model
from .evaluate import (AccuracyReport, MultiSeedReport, evaluate_heads,
                       evaluate_seeds)
