"""Feed-forward head-child classifier (numpy).

Embeddings for the parent label and for each candidate's label and
functional tag are concatenated with per-candidate numeric features, passed
through two ReLU layers, and scored with a softmax over candidate slots
(slots beyond the candidate count are masked).
"""
from __future__ import annotations

import io
import json
import logging
import os
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ModelFormatError
from ..tree import Tree
from ..treebank_io import DEFAULT_PUNCT_MAP, PunctMap
from .align import HeadGoldCorpus
from .features import (NONE, PAD, WINDOW, HeadFeatureVector, Mode,
                       child_descriptors, features_from_children)

log = logging.getLogger(__name__)

MAGIC = b"PUNCTBIN-HEADMODEL"
FORMAT_VERSION = 1
UNK = "<unk>"
PARAM_NAMES = ("E_parent", "E_child", "E_ftag", "W1", "b1", "W2", "b2",
               "W3", "b3")


@dataclass
class TrainConfig:
    epochs: int = 10
    patience: int = 3
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    hidden: tuple[int, int] = (128, 64)
    embed: int = 32
    window: int = WINDOW


class Vocab:
    def __init__(self, items: Sequence[str] = ()):
        self.items = [PAD, UNK]
        self.index = {PAD: 0, UNK: 1}
        for item in items:
            self.add(item)

    def add(self, item: str) -> int:
        if item not in self.index:
            self.index[item] = len(self.items)
            self.items.append(item)
        return self.index[item]

    def __getitem__(self, item: str) -> int:
        return self.index.get(item, 1)

    def __len__(self):
        return len(self.items)


@dataclass
class HeadModel:
    mode: Mode
    window: int
    parents: Vocab
    labels: Vocab
    ftags: Vocab
    params: dict[str, np.ndarray]
    training_meta: dict = field(default_factory=dict)

    @property
    def n_dense(self) -> int:
        return 4 if self.mode is Mode.PUNCT else 2

    # -- encoding ----------------------------------------------------------

    def encode(self, feats: Sequence[HeadFeatureVector]):
        n, w = len(feats), self.window
        parent = np.zeros(n, dtype=np.int64)
        child = np.zeros((n, w), dtype=np.int64)
        ftag = np.zeros((n, w), dtype=np.int64)
        dense = np.zeros((n, w, self.n_dense))
        mask = np.zeros((n, w), dtype=bool)
        for r, f in enumerate(feats):
            parent[r] = self.parents[f.parent_label]
            k = min(f.n_candidates, w)
            mask[r, :k] = True
            for s in range(k):
                child[r, s] = self.labels[f.child_labels[s]]
                ftag[r, s] = self.ftags[f.functional_tags[s]]
                dense[r, s, 0] = 1.0
                dense[r, s, 1] = f.norm_positions[s]
                if f.punct_adjacent is not None:
                    before, after = f.punct_adjacent[s]
                    dense[r, s, 2] = before
                    dense[r, s, 3] = after
        return parent, child, ftag, dense, mask

    # -- forward / backward ------------------------------------------------

    def _forward(self, parent, child, ftag, dense):
        p = self.params
        n = len(parent)
        x = np.concatenate([p["E_parent"][parent],
                            p["E_child"][child].reshape(n, -1),
                            p["E_ftag"][ftag].reshape(n, -1),
                            dense.reshape(n, -1)], axis=1)
        z1 = x @ p["W1"] + p["b1"]
        a1 = np.maximum(z1, 0.0)
        z2 = a1 @ p["W2"] + p["b2"]
        a2 = np.maximum(z2, 0.0)
        logits = a2 @ p["W3"] + p["b3"]
        return logits, (x, z1, a1, z2, a2)

    @staticmethod
    def _softmax(logits, mask):
        logits = np.where(mask, logits, -np.inf)
        logits = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        return e / e.sum(axis=1, keepdims=True)

    def predict_proba(self, feats: Sequence[HeadFeatureVector]) -> np.ndarray:
        parent, child, ftag, dense, mask = self.encode(feats)
        logits, _ = self._forward(parent, child, ftag, dense)
        return self._softmax(logits, mask)

    def predict_features(self, feats: Sequence[HeadFeatureVector]
                         ) -> list[int]:
        """Child index (not slot) predicted for each vector."""
        if not feats:
            return []
        probs = self.predict_proba(feats)
        return [f.child_of(int(np.argmax(row))) if f.n_candidates > 1
                else f.positions[0] for f, row in zip(feats, probs)]

    def features(self, node: Tree, pmap: PunctMap = DEFAULT_PUNCT_MAP
                 ) -> HeadFeatureVector:
        return features_from_children(node.label,
                                      child_descriptors(node, pmap),
                                      self.mode, self.window)

    def predict(self, nodes: Sequence[Tree],
                pmap: PunctMap = DEFAULT_PUNCT_MAP) -> list[int]:
        return self.predict_features([self.features(n, pmap) for n in nodes])

    def __call__(self, parent_label: str,
                 children: Sequence[tuple[str, bool]]) -> int:
        """Head finder interface used by binarization."""
        if len(children) == 1:
            return 0
        f = features_from_children(parent_label, children, self.mode,
                                   self.window)
        return self.predict_features([f])[0]

    # -- persistence -------------------------------------------------------

    def to_bytes(self) -> bytes:
        header = {
            "mode": self.mode.value,
            "window": self.window,
            "vocab": {"parents": self.parents.items,
                      "labels": self.labels.items,
                      "ftags": self.ftags.items},
            "params": [[name, list(self.params[name].shape)]
                       for name in PARAM_NAMES],
            "training_meta": self.training_meta,
        }
        blob = json.dumps(header, sort_keys=True,
                          separators=(",", ":")).encode("utf-8")
        out = io.BytesIO()
        out.write(MAGIC + b"\n")
        out.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        out.write(blob)
        for name in PARAM_NAMES:
            out.write(np.ascontiguousarray(self.params[name],
                                           dtype="<f8").tobytes())
        return out.getvalue()

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "wb") as f:
            f.write(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> HeadModel:
        if not data.startswith(MAGIC + b"\n"):
            raise ModelFormatError("not a head model file")
        pos = len(MAGIC) + 1
        try:
            version, size = struct.unpack_from("<II", data, pos)
        except struct.error:
            raise ModelFormatError("truncated header") from None
        if version != FORMAT_VERSION:
            raise ModelFormatError("model format version %d, expected %d"
                                   % (version, FORMAT_VERSION))
        pos += 8
        header = json.loads(data[pos:pos + size].decode("utf-8"))
        pos += size
        params = {}
        for name, shape in header["params"]:
            count = int(np.prod(shape))
            end = pos + 8 * count
            if end > len(data):
                raise ModelFormatError("truncated parameter %s" % name)
            params[name] = np.frombuffer(data[pos:end], dtype="<f8").reshape(
                shape).astype(np.float64)
            pos = end
        if pos != len(data):
            raise ModelFormatError("trailing bytes after parameters")
        vocab = header["vocab"]

        def load_vocab(items):
            v = Vocab()
            for item in items[2:]:
                v.add(item)
            return v

        return cls(Mode(header["mode"]), header["window"],
                   load_vocab(vocab["parents"]), load_vocab(vocab["labels"]),
                   load_vocab(vocab["ftags"]), params,
                   header["training_meta"])

    @classmethod
    def load(cls, path: str | os.PathLike) -> HeadModel:
        with open(path, "rb") as f:
            return cls.from_bytes(f.read())


def _init_params(rng: np.random.Generator, sizes: dict, cfg: TrainConfig,
                 n_dense: int) -> dict[str, np.ndarray]:
    e, w = cfg.embed, cfg.window
    h1, h2 = cfg.hidden
    d_in = e + 2 * w * e + w * n_dense

    def he(fan_in, fan_out):
        return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_in, fan_out))

    return {
        "E_parent": rng.normal(0.0, 0.1, size=(sizes["parents"], e)),
        "E_child": rng.normal(0.0, 0.1, size=(sizes["labels"], e)),
        "E_ftag": rng.normal(0.0, 0.1, size=(sizes["ftags"], e)),
        "W1": he(d_in, h1), "b1": np.zeros(h1),
        "W2": he(h1, h2), "b2": np.zeros(h2),
        "W3": he(h2, w), "b3": np.zeros(w),
    }


def _examples(corpus: HeadGoldCorpus, mode: Mode, pmap: PunctMap,
              window: int) -> tuple[list[HeadFeatureVector], list[int]]:
    feats, slots = [], []
    for inst in corpus.instances:
        f = features_from_children(inst.node.label,
                                   child_descriptors(inst.node, pmap), mode,
                                   window)
        slot = f.slot_of(inst.gold)
        if slot is None or f.n_candidates < 2:
            continue
        feats.append(f)
        slots.append(slot)
    return feats, slots


def _accuracy(model: HeadModel, corpus: HeadGoldCorpus,
              pmap: PunctMap) -> float:
    if not corpus.instances:
        return 0.0
    predicted = model.predict([inst.node for inst in corpus.instances], pmap)
    correct = sum(p == inst.gold
                  for p, inst in zip(predicted, corpus.instances))
    return correct / len(corpus.instances)


def train_head_model(train: HeadGoldCorpus, dev: HeadGoldCorpus | None = None,
                     mode: Mode = Mode.PUNCT, seed: int = 0,
                     pmap: PunctMap = DEFAULT_PUNCT_MAP,
                     config: TrainConfig | None = None) -> HeadModel:
    """Train with Adam and early stopping on dev accuracy.

    Dev accuracy is measured after every epoch; training stops after
    ``patience`` epochs without improvement (or ``epochs`` in total) and
    the best-scoring parameters are returned. Identical inputs and seed
    give identical parameters.
    """
    cfg = config or TrainConfig()
    feats, slots = _examples(train, mode, pmap, cfg.window)
    if not train.instances:
        raise ValueError("empty training corpus")
    if dev is None or not dev.instances:
        log.warning("no development data: training %d epochs without "
                    "early stopping", cfg.epochs)
        dev = None

    parents, labels, ftags = Vocab(), Vocab(), Vocab([NONE])
    for inst in train.instances:
        f = features_from_children(inst.node.label,
                                   child_descriptors(inst.node, pmap), mode,
                                   cfg.window)
        parents.add(f.parent_label)
        for lab, tag in zip(f.child_labels, f.functional_tags):
            labels.add(lab)
            ftags.add(tag)

    rng = np.random.default_rng(seed)
    n_dense = 4 if mode is Mode.PUNCT else 2
    params = _init_params(rng, {"parents": len(parents),
                                "labels": len(labels),
                                "ftags": len(ftags)}, cfg, n_dense)
    model = HeadModel(mode, cfg.window, parents, labels, ftags, params)
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(val) for k, val in params.items()}
    step = 0

    history: list[float] = []
    best = (-1.0, None, 0)
    stale = 0
    epochs_run = 0
    if feats:
        enc = model.encode(feats)
        target = np.asarray(slots, dtype=np.int64)
    for epoch in range(1, cfg.epochs + 1):
        epochs_run = epoch
        if feats:
            order = rng.permutation(len(feats))
            for start in range(0, len(order), cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                grads = _gradients(model, [a[idx] for a in enc],
                                   target[idx])
                step += 1
                lr_t = cfg.lr * np.sqrt(1 - cfg.beta2 ** step) / (
                    1 - cfg.beta1 ** step)
                for k, g in grads.items():
                    m[k] = cfg.beta1 * m[k] + (1 - cfg.beta1) * g
                    v[k] = cfg.beta2 * v[k] + (1 - cfg.beta2) * g * g
                    params[k] -= lr_t * m[k] / (np.sqrt(v[k]) + cfg.eps)
        if dev is None:
            continue
        acc = _accuracy(model, dev, pmap)
        history.append(acc)
        if acc > best[0]:
            best = (acc, {k: val.copy() for k, val in params.items()}, epoch)
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    if best[1] is not None:
        model.params = best[1]
    model.training_meta = {
        "seed": seed,
        "mode": mode.value,
        "epochs_run": epochs_run,
        "best_epoch": best[2] if dev is not None else epochs_run,
        "dev_accuracy": history,
        "train_examples": len(feats),
        "optimizer": {"name": "adam", "lr": cfg.lr, "beta1": cfg.beta1,
                      "beta2": cfg.beta2, "eps": cfg.eps,
                      "batch_size": cfg.batch_size},
        "hidden": list(cfg.hidden),
        "embed": cfg.embed,
        "patience": cfg.patience,
    }
    return model


def _gradients(model: HeadModel, batch, target) -> dict[str, np.ndarray]:
    parent, child, ftag, dense, mask = batch
    p = model.params
    n = len(parent)
    e = p["E_parent"].shape[1]
    w = model.window
    logits, (x, z1, a1, z2, a2) = model._forward(parent, child, ftag, dense)
    probs = HeadModel._softmax(logits, mask)
    d3 = probs
    d3[np.arange(n), target] -= 1.0
    d3 /= n
    grads = {"W3": a2.T @ d3, "b3": d3.sum(axis=0)}
    d2 = (d3 @ p["W3"].T) * (z2 > 0)
    grads["W2"] = a1.T @ d2
    grads["b2"] = d2.sum(axis=0)
    d1 = (d2 @ p["W2"].T) * (z1 > 0)
    grads["W1"] = x.T @ d1
    grads["b1"] = d1.sum(axis=0)
    dx = d1 @ p["W1"].T
    for name, ids, lo, hi in (("E_parent", parent, 0, e),
                              ("E_child", child, e, e + w * e),
                              ("E_ftag", ftag, e + w * e, e + 2 * w * e)):
        g = np.zeros_like(p[name])
        np.add.at(g, ids.ravel(), dx[:, lo:hi].reshape(-1, e))
        grads[name] = g
    return grads
