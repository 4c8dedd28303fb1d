"""Head-child accuracy for rule tables and trained models."""
from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

from ..treebank_io import DEFAULT_PUNCT_MAP, PunctMap
from .align import HeadGoldCorpus, HeadInstance
from .features import child_descriptors
from .model import HeadModel
from .rules import HeadTable, base_category, collins_head

Predictor = Union[HeadTable, HeadModel, Callable[[HeadInstance], int]]


@dataclass
class AccuracyReport:
    correct: int = 0
    total: int = 0
    by_label: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def accuracy(self) -> float:
        return 100.0 * self.correct / self.total if self.total else 0.0

    def table(self) -> str:
        lines = ["accuracy %.2f%% (%d/%d)" % (self.accuracy, self.correct,
                                              self.total)]
        for label in sorted(self.by_label):
            c, t = self.by_label[label]
            lines.append("  %-8s %6.2f%% %6d" % (label, 100.0 * c / t, t))
        return "\n".join(lines)


@dataclass
class MultiSeedReport:
    runs: list[AccuracyReport]

    @property
    def accuracies(self) -> list[float]:
        return [r.accuracy for r in self.runs]

    @property
    def mean(self) -> float:
        return statistics.fmean(self.accuracies)

    @property
    def sd(self) -> float:
        acc = self.accuracies
        return statistics.stdev(acc) if len(acc) > 1 else 0.0

    def summary(self) -> str:
        return "accuracy %.2f +- %.2f over %d run(s)" % (self.mean, self.sd,
                                                          len(self.runs))


def predict_heads(predictor: Predictor, instances: Sequence[HeadInstance],
                  pmap: PunctMap = DEFAULT_PUNCT_MAP) -> list[int]:
    if isinstance(predictor, HeadModel):
        return predictor.predict([inst.node for inst in instances], pmap)
    if isinstance(predictor, HeadTable):
        return [collins_head(inst.node.label,
                             child_descriptors(inst.node, pmap), predictor)
                for inst in instances]
    return [predictor(inst) for inst in instances]


def evaluate_heads(predictor: Predictor, corpus: HeadGoldCorpus,
                   pmap: PunctMap = DEFAULT_PUNCT_MAP) -> AccuracyReport:
    """Micro-averaged accuracy with a per-parent-label breakdown."""
    if not corpus.instances:
        raise ValueError("empty evaluation corpus")
    predicted = predict_heads(predictor, corpus.instances, pmap)
    hits: Counter = Counter()
    totals: Counter = Counter()
    for guess, inst in zip(predicted, corpus.instances):
        label = base_category(inst.node.label)
        totals[label] += 1
        hits[label] += guess == inst.gold
    report = AccuracyReport(sum(hits.values()), sum(totals.values()))
    report.by_label = {k: (hits[k], totals[k]) for k in totals}
    return report


def evaluate_seeds(models: Sequence[HeadModel], corpus: HeadGoldCorpus,
                   pmap: PunctMap = DEFAULT_PUNCT_MAP) -> MultiSeedReport:
    """Mean and sample standard deviation over independently seeded runs."""
    return MultiSeedReport([evaluate_heads(m, corpus, pmap) for m in models])
