"""Command-line interface: vocabulary building, training, analogy
evaluation, neighbor and algebra queries, and format conversion.

Exit codes: 0 success, 1 usage error, 2 data/IO error.  Progress goes to
stderr, results to stdout.  ``--mode sense2vec`` is ``--mode word2vec`` plus
tagged tokenization: the tag-disambiguated model costs nothing beyond the
annotated corpus.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from .config import TrainingConfig
from .corpus import LineCorpus, MalformedTokenError, build_vocab
from .evaluation import (
    AnalogyParseError, OOVError, evaluate_analogies, nearest_neighbors,
    parse_analogy_file, vector_algebra,
)
from .mssg import train_mssg
from .sgns import TrainingDiverged, train_skipgram
from .store import LoadError, load, save_binary, save_text
from .training import EmptyVocabularyError

logger = logging.getLogger("senseforge")


class UsageError(Exception):
    def __init__(self, message: str, parser: argparse.ArgumentParser | None = None):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1 here
        raise UsageError(message, self)


def _default_workers() -> int:
    env = os.environ.get("SENSEFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _add_corpus_flags(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="corpus file, one sentence per line")
    p.add_argument("--no-lowercase", action="store_true", help="keep original casing")
    p.add_argument("--keep-punct", action="store_true",
                   help="do not strip surrounding punctuation")


def _add_training_flags(p: argparse.ArgumentParser):
    p.add_argument("--dim", type=int, default=300, help="vector dimensionality")
    p.add_argument("--window", type=int, default=5, help="context window size")
    p.add_argument("--lr", type=float, default=0.025, help="initial learning rate")
    p.add_argument("--min-count", type=int, default=10, help="minimum token frequency")
    p.add_argument("--negatives", type=int, default=5, help="negative samples per pair")
    p.add_argument("--epochs", type=int, default=1, help="training passes over the corpus")
    p.add_argument("--senses", type=int, default=3, help="senses per word (mssg mode)")
    p.add_argument("--sense-min-count", type=int, default=0,
                   help="words rarer than this train a single sense")
    p.add_argument("--subsample", type=float, default=0.0,
                   help="frequent-word subsampling threshold (0 disables)")
    p.add_argument("--seed", type=int, default=1, help="random seed")
    p.add_argument("--workers", type=int, default=None,
                   help="training threads (default: SENSEFORGE_THREADS or 1)")


def build_parser() -> _Parser:
    parser = _Parser(prog="senseforge",
                     description="Train and query word, tagged and multi-sense embeddings.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("vocab", parents=[], help="build and export a vocabulary")
    _add_corpus_flags(p)
    p.add_argument("--tagged", action="store_true", help="corpus uses surface|TAG tokens")
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--output", default=None, help="write token<TAB>count lines here (default stdout)")

    p = sub.add_parser("train", help="train a model")
    _add_corpus_flags(p)
    _add_training_flags(p)
    p.add_argument("--mode", choices=["word2vec", "sense2vec", "mssg"], default="word2vec")
    p.add_argument("--output", required=True, help="model file to write")
    p.add_argument("--format", choices=["auto", "binary", "text"], default="auto",
                   help="output format (auto: by extension, .txt is text)")

    p = sub.add_parser("eval", help="run the analogy benchmark")
    p.add_argument("--model", required=True)
    p.add_argument("--analogies", required=True, help="': category' + quadruple lines")
    p.add_argument("--space", choices=["global", "sense"], default="global")
    p.add_argument("--restrict-vocab", type=int, default=None,
                   help="rank only the N most frequent rows")
    p.add_argument("--oov-as-wrong", action="store_true",
                   help="count OOV quadruples as wrong instead of skipping")
    p.add_argument("--machine", action="store_true",
                   help="also print tab-separated result lines")

    p = sub.add_parser("nn", help="nearest neighbors of a row")
    p.add_argument("--model", required=True)
    p.add_argument("--query", required=True, help="word, word|TAG or word#k")
    p.add_argument("--topn", type=int, default=10)
    p.add_argument("--space", choices=["global", "sense"], default="global")

    p = sub.add_parser("algebra", help="signed vector arithmetic, e.g. 'banco + dados - dinheiro'")
    p.add_argument("--model", required=True)
    p.add_argument("--expr", required=True)
    p.add_argument("--topn", type=int, default=10)
    p.add_argument("--space", choices=["global", "sense"], default="global")
    p.add_argument("--restrict-vocab", type=int, default=None)

    p = sub.add_parser("convert", help="convert between model formats")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--to", choices=["text", "binary"], required=True)
    p.add_argument("--include", choices=["global", "senses", "both"], default="both")

    return parser


def _cmd_vocab(args) -> int:
    corpus = LineCorpus(args.input, tagged=args.tagged,
                        lowercase=not args.no_lowercase, strip_punct=not args.keep_punct)
    vocab = build_vocab(corpus, min_count=args.min_count)
    if args.output:
        vocab.save(args.output)
        print(f"vocabulary: {len(vocab)} entries, {vocab.total_tokens} tokens -> {args.output}")
    else:
        for word, count in zip(vocab.words, vocab.counts):
            print(f"{word}\t{int(count)}")
    return 0


def _cmd_train(args) -> int:
    config = TrainingConfig(
        dim=args.dim, window=args.window, lr0=args.lr, min_count=args.min_count,
        negatives=args.negatives, epochs=args.epochs, subsample_t=args.subsample,
        senses=args.senses, sense_min_count=args.sense_min_count, seed=args.seed,
        workers=args.workers if args.workers is not None else _default_workers(),
    )
    tagged = args.mode == "sense2vec"
    corpus = LineCorpus(args.input, tagged=tagged,
                        lowercase=not args.no_lowercase, strip_punct=not args.keep_punct)
    logger.info("building vocabulary from %s", args.input)
    vocab = build_vocab(corpus, min_count=config.min_count)
    logger.info("vocabulary: %d entries, %d tokens", len(vocab), vocab.total_tokens)
    started = time.perf_counter()
    if args.mode == "mssg":
        model = train_mssg(corpus, vocab, config)
    else:
        model = train_skipgram(corpus, vocab, config)
    fmt = args.format
    if fmt == "auto":
        fmt = "text" if args.output.endswith(".txt") else "binary"
    if fmt == "text":
        save_text(model, args.output)
    else:
        save_binary(model, args.output)
    stats = model.train_stats or {}
    elapsed = stats.get("seconds", time.perf_counter() - started)
    tokens = stats.get("tokens", 0)
    rate = stats.get("tok_per_sec", 0.0)
    print(f"tokens={tokens} time={elapsed:.2f}s tok/s={rate:.0f}")
    return 0


def _cmd_eval(args) -> int:
    vectors = load(args.model)
    dataset = parse_analogy_file(args.analogies)
    report = evaluate_analogies(vectors, dataset, space=args.space,
                                restrict_vocab=args.restrict_vocab,
                                oov_as_wrong=args.oov_as_wrong)
    print(report.table())
    if args.machine:
        for line in report.machine_lines():
            print(line)
    return 0


def _print_result(result) -> None:
    if result.note:
        print(f"warning: {result.note}", file=sys.stderr)
    for label, score in result.pairs:
        print(f"{label}\t{score:.4f}")


def _cmd_nn(args) -> int:
    vectors = load(args.model)
    _print_result(nearest_neighbors(vectors, args.query, topn=args.topn, space=args.space))
    return 0


def _cmd_algebra(args) -> int:
    vectors = load(args.model)
    _print_result(vector_algebra(vectors, args.expr, topn=args.topn, space=args.space,
                                 restrict_vocab=args.restrict_vocab))
    return 0


def _cmd_convert(args) -> int:
    vectors = load(args.input)
    writer = save_text if args.to == "text" else save_binary
    rows = writer(vectors, args.output, include=args.include)
    print(f"wrote {rows} rows -> {args.output}")
    return 0


_COMMANDS = {
    "vocab": _cmd_vocab,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "nn": _cmd_nn,
    "algebra": _cmd_algebra,
    "convert": _cmd_convert,
}


def run(argv=None) -> int:
    """Parse argv and execute; returns the process exit code."""
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # argparse exits itself for -h/--help
            return int(exc.code or 0)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        try:
            return _COMMANDS[args.command](args)
        except ValueError as exc:
            # Bad flag values (e.g. --dim 0) surface as usage errors; data
            # problems keep their own types and map to exit code 2 below.
            if isinstance(exc, (MalformedTokenError, AnalogyParseError, LoadError,
                                EmptyVocabularyError)):
                raise
            raise UsageError(str(exc)) from exc
    except UsageError as exc:
        if exc.parser is not None:
            exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, MalformedTokenError, AnalogyParseError, LoadError, OOVError,
            EmptyVocabularyError, TrainingDiverged) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(asctime)s %(levelname)s %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
