"""``punctbin`` command line."""
from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import logging
import multiprocessing
import os
import sys
from pathlib import Path
from typing import IO, Iterator

from . import __version__
from .binarize import debinarize, roundtrip_check, transform
from .errors import (ConfigError, FormatError, IntegrityError,
                     ModelFormatError, TreeParseError)
from .headfinding import (DEFAULT_HEAD_TABLE, HeadModel, Mode,
                          build_gold_corpus, corpus_from_cache,
                          evaluate_heads, read_gold_cache, read_head_table,
                          train_head_model, write_gold_cache)
from .headfinding.evaluate import MultiSeedReport
from .scorer import score
from .treebank_io import (DEFAULT_PUNCT_MAP, parse_tree, read_conll,
                          read_corpus, read_punct_map, serialize_tree)

log = logging.getLogger("punctbin")

HEAD_MODES = ("COLLINS", "MODEL_BASE", "MODEL_PUNCT")
ALIGN_REFERENCE = 84.3   # sentence alignment rate reported on PTB/CoNLL


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# --- helpers ---------------------------------------------------------------

def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _require(path: str | None, flag: str) -> str:
    if not path:
        raise CliError(2, "%s is required" % flag)
    if not os.path.isfile(path):
        raise CliError(2, "%s: no such file" % path)
    return path


def _trees(path: str, strip_functional: bool = True) -> Iterator:
    """Stream a corpus, turning parse errors into file:line diagnostics."""
    try:
        yield from read_corpus(path, strip_functional=strip_functional)
    except TreeParseError as exc:
        raise CliError(1, "%s:%s: tree %s: %s" % (
            path, exc.line or "?", exc.tree_index or "?", exc.reason)) from exc


def _load_config(args):
    try:
        pmap = read_punct_map(args.punct_map) if args.punct_map \
            else DEFAULT_PUNCT_MAP
    except (ConfigError, OSError) as exc:
        raise CliError(2, "%s: %s" % (args.punct_map, exc)) from exc
    try:
        table = read_head_table(args.head_table) if args.head_table \
            else DEFAULT_HEAD_TABLE
    except (ConfigError, OSError) as exc:
        raise CliError(2, "%s: %s" % (args.head_table, exc)) from exc
    return pmap, table


def _load_model(path: str) -> HeadModel:
    _require(path, "--model")
    try:
        return HeadModel.load(path)
    except ModelFormatError as exc:
        raise CliError(2, "%s: %s" % (path, exc)) from exc


def _head_finder(args, table):
    if args.head_mode == "COLLINS":
        return table
    if not args.model:
        raise CliError(2, "--head-mode %s needs --model" % args.head_mode)
    model = _load_model(args.model[0])
    want = Mode.BASE if args.head_mode == "MODEL_BASE" else Mode.PUNCT
    if model.mode is not want:
        raise CliError(2, "%s is a %s model, not %s" % (
            args.model[0], model.mode.name, args.head_mode))
    return model


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as f:
            yield f


def _seeds(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise CliError(2, "--seeds expects comma-separated integers") from None
    if not seeds:
        raise CliError(2, "--seeds is empty")
    return seeds


def _model_paths(template: str, seeds: list[int]) -> list[str]:
    if "{seed}" in template:
        return [template.format(seed=s) for s in seeds]
    if len(seeds) == 1:
        return [template]
    p = Path(template)
    return [str(p.with_name("%s.seed%d%s" % (p.stem, s, p.suffix)))
            for s in seeds]


# --- worker pool -----------------------------------------------------------

_WORKER: dict = {}


def _init_worker(kind, head_finder, pmap, markers):
    _WORKER.update(kind=kind, head_finder=head_finder, pmap=pmap,
                   markers=markers)


def _process(text: str) -> str:
    tree = parse_tree(text)
    if _WORKER["kind"] == "binarize":
        out = transform(tree, _WORKER["head_finder"], _WORKER["pmap"])
        return serialize_tree(out, _WORKER["markers"])
    return serialize_tree(debinarize(tree))


def _stream(kind, trees, head_finder, pmap, markers, jobs, out) -> int:
    """Transform trees in input order, optionally on a worker pool."""
    n = 0
    if jobs <= 1:
        _init_worker(kind, head_finder, pmap, markers)
        for tree in trees:
            if kind == "binarize":
                line = serialize_tree(transform(tree, head_finder, pmap),
                                      markers)
            else:
                line = serialize_tree(debinarize(tree))
            out.write(line + "\n")
            n += 1
        return n
    texts = (serialize_tree(t) for t in trees)
    with multiprocessing.Pool(jobs, _init_worker,
                              (kind, head_finder, pmap, markers)) as pool:
        for line in pool.imap(_process, texts, chunksize=64):
            out.write(line + "\n")
            n += 1
    return n


# --- commands --------------------------------------------------------------

def cmd_binarize(args, manifest) -> int:
    pmap, table = _load_config(args)
    finder = _head_finder(args, table)
    path = _require(args.input, "--input")
    if not args.markers:
        log.warning("writing without attachment markers: the output cannot "
                    "be debinarized without side data")
    with _output(args.output) as out:
        n = _stream("binarize", _trees(path), finder, pmap, args.markers,
                    args.jobs, out)
    manifest["trees"] = n
    return 0


def cmd_debinarize(args, manifest) -> int:
    path = _require(args.input, "--input")
    with _output(args.output) as out:
        n = _stream("debinarize", _trees(path, strip_functional=False), None,
                    None, True, args.jobs, out)
    manifest["trees"] = n
    return 0


def cmd_roundtrip(args, manifest) -> int:
    pmap, table = _load_config(args)
    finder = _head_finder(args, table)
    report = roundtrip_check(_trees(_require(args.input, "--input")), pmap,
                             finder)
    with _output(args.output) as out:
        out.write(report.summary() + "\n")
    manifest["trees"] = report.total
    manifest["restored"] = report.restored
    return 0 if report.ok else 1


def cmd_align(args, manifest) -> int:
    trees = list(_trees(_require(args.input, "--input"),
                        strip_functional=False))
    deps_path = _require(args.deps, "--deps")
    try:
        graphs = list(read_conll(deps_path))
    except FormatError as exc:
        raise CliError(1, "%s:%s: %s" % (deps_path, exc.line or "?",
                                         exc.reason)) from exc
    try:
        corpus = build_gold_corpus(trees, graphs)
    except ValueError as exc:
        raise CliError(1, str(exc)) from exc
    if args.output:
        with _output(args.output) as out:
            write_gold_cache(corpus, out)
    rate = 100.0 * corpus.alignment_rate
    print("aligned %d/%d sentences (%.2f%%; reference %.1f%%), "
          "%d head instances" % (corpus.aligned, corpus.sentences, rate,
                                 ALIGN_REFERENCE, len(corpus)))
    manifest.update(sentences=corpus.sentences, aligned=corpus.aligned,
                    instances=len(corpus))
    return 0


def _gold(trees_path: str | None, gold_path: str | None, flag: str):
    trees = list(_trees(_require(trees_path, flag), strip_functional=False))
    gold_path = _require(gold_path, flag.replace("input", "gold"))
    try:
        return corpus_from_cache(trees, read_gold_cache(gold_path))
    except FormatError as exc:
        raise CliError(1, "%s:%s: %s" % (gold_path, exc.line or "?",
                                         exc.reason)) from exc


def _mode(args) -> Mode:
    if args.head_mode == "COLLINS":
        raise CliError(2, "train-heads needs --head-mode MODEL_BASE or "
                          "MODEL_PUNCT")
    return Mode.BASE if args.head_mode == "MODEL_BASE" else Mode.PUNCT


def cmd_train_heads(args, manifest) -> int:
    pmap, _ = _load_config(args)
    mode = _mode(args)
    if not args.model:
        raise CliError(2, "--model is required")
    seeds = _seeds(args.seeds)
    train = _gold(args.input, args.gold, "--input")
    dev = _gold(args.dev_input, args.dev_gold, "--dev-input") \
        if args.dev_input else None
    paths = _model_paths(args.model[0], seeds)
    for seed, path in zip(seeds, paths):
        model = train_head_model(train, dev, mode, seed, pmap)
        model.save(path)
        history = model.training_meta["dev_accuracy"]
        print("seed %d: best dev accuracy %s -> %s" % (
            seed, "%.2f" % (100 * max(history)) if history else "n/a", path))
    manifest["models"] = {p: _sha256(p) for p in paths}
    return 0


def cmd_eval_heads(args, manifest) -> int:
    pmap, table = _load_config(args)
    corpus = _gold(args.input, args.gold, "--input")
    if args.head_mode == "COLLINS":
        reports = [evaluate_heads(table, corpus, pmap)]
    else:
        if not args.model:
            raise CliError(2, "--head-mode %s needs --model" % args.head_mode)
        reports = []
        for path in args.model:
            model = _load_model(path)
            reports.append(evaluate_heads(model, corpus, pmap))
            manifest.setdefault("models", {})[path] = _sha256(path)
    summary = MultiSeedReport(reports)
    with _output(args.output) as out:
        for path, r in zip(args.model or ["collins"], reports):
            out.write("%s: %.2f%% (%d/%d)\n" % (path, r.accuracy, r.correct,
                                                r.total))
        out.write(summary.summary() + "\n")
        if len(reports) == 1:
            out.write(reports[0].table() + "\n")
    manifest["accuracy_mean"] = round(summary.mean, 6)
    manifest["accuracy_sd"] = round(summary.sd, 6)
    return 0


def cmd_score(args, manifest) -> int:
    pmap, _ = _load_config(args)
    gold = list(_trees(_require(args.gold, "--gold"), strip_functional=False))
    pred = list(_trees(_require(args.input, "--input"),
                       strip_functional=False))
    try:
        report = score(gold, pred, args.keep_punct, args.simplify,
                       args.preterminals, pmap)
    except ValueError as exc:
        raise CliError(1, str(exc)) from exc
    with _output(args.output) as out:
        out.write(report.table() + "\n")
        out.write(report.key_values() + "\n")
    for sent_id, at in report.skipped_at:
        log.warning("sentence %d skipped: terminals differ at position %d",
                    sent_id, at)
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8") as f:
            report.write_tsv(f)
    manifest.update(P=round(report.precision, 4), R=round(report.recall, 4),
                    F1=round(report.f1, 4), matched=report.matched,
                    skipped=report.sentences_skipped)
    return 0


COMMANDS = {
    "binarize": (cmd_binarize, "restructure punctuation and binarize"),
    "debinarize": (cmd_debinarize, "restore original trees"),
    "roundtrip": (cmd_roundtrip, "check that every tree survives both "
                                 "directions"),
    "align": (cmd_align, "derive gold head children from dependencies"),
    "train-heads": (cmd_train_heads, "train head classifiers, one per seed"),
    "eval-heads": (cmd_eval_heads, "head-child accuracy"),
    "score": (cmd_score, "labeled-bracket P/R/F1"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input corpus")
    common.add_argument("--output", help="output file (default stdout)")
    common.add_argument("--punct-map", help="punctuation map file")
    common.add_argument("--head-table", help="head percolation table")
    common.add_argument("--head-mode", choices=HEAD_MODES, default="COLLINS")
    common.add_argument("--model", nargs="+",
                        help="head model file(s); train-heads accepts a "
                             "{seed} template")
    common.add_argument("--seeds", default="0",
                        help="comma-separated seeds (default 0)")
    common.add_argument("--keep-punct", action=argparse.BooleanOptionalAction,
                        default=True, help="score punctuation brackets")
    common.add_argument("--simplify", action="store_true",
                        help="relabel nonterminals nt and collapse unaries "
                             "before scoring")
    common.add_argument("--preterminals", action="store_true",
                        help="score preterminal brackets too")
    common.add_argument("--markers", action=argparse.BooleanOptionalAction,
                        default=True, help="write attachment markers")
    common.add_argument("--manifest", help="manifest path (default "
                        "<output>.manifest.json, else stderr)")
    common.add_argument("--deps", help="CoNLL dependency file")
    common.add_argument("--gold", help="gold trees (score) or gold head "
                        "cache (train/eval-heads)")
    common.add_argument("--dev-input", help="development trees")
    common.add_argument("--dev-gold", help="development gold head cache")
    common.add_argument("--tsv", help="per-sentence score table")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker processes for binarize/debinarize")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="punctbin")
    parser.add_argument("--version", action="version",
                        version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


CONFIG_KEYS = ("input", "output", "punct_map", "head_table", "head_mode",
               "model", "seeds", "keep_punct", "simplify", "preterminals",
               "markers", "deps", "gold", "dev_input", "dev_gold")
INPUT_KEYS = ("input", "punct_map", "head_table", "deps", "gold",
              "dev_input", "dev_gold")


def _manifest(args, extra: dict) -> dict:
    config = {k: getattr(args, k) for k in CONFIG_KEYS}
    inputs = {}
    for key in INPUT_KEYS:
        path = getattr(args, key)
        if path and os.path.isfile(path):
            inputs[path] = _sha256(path)
    if args.command != "train-heads":
        for path in args.model or ():
            if os.path.isfile(path):
                inputs[path] = _sha256(path)
    out = {"tool": "punctbin", "version": __version__,
           "command": args.command, "config": config, "inputs": inputs}
    if args.output and args.output != "-" and os.path.isfile(args.output):
        out["outputs"] = {args.output: _sha256(args.output)}
    out["results"] = extra
    return out


def _write_manifest(args, manifest: dict) -> None:
    text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    target = args.manifest
    if not target and args.output and args.output != "-":
        target = args.output + ".manifest.json"
    if target:
        with open(target, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stderr.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else
                        logging.WARNING, format="%(levelname)s: %(message)s")
    handler = COMMANDS[args.command][0]
    results: dict = {}
    try:
        if args.jobs < 1:
            raise CliError(2, "--jobs must be positive")
        status = handler(args, results)
    except CliError as exc:
        print("punctbin: %s" % exc, file=sys.stderr)
        return exc.code
    except (IntegrityError, ConfigError) as exc:
        print("punctbin: %s" % exc, file=sys.stderr)
        return 1
    _write_manifest(args, _manifest(args, results))
    return status


if __name__ == "__main__":
    sys.exit(main())
