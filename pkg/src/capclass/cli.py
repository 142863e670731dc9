"""Command-line front end: train, predict, eval, crossval, inspect.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional

from .capgrowth import ExtractionParams
from .dataset import DatasetError, Vocabulary, balance_subsample, load_tabular, load_transactions
from .ensemble import ModelFormatError, read_model, train, write_model
from .evaluation import EvalResult, TrainConfig, crossval, evaluate_split, holdout
from .predict import VotingParams, format_scores, score_batch

log = logging.getLogger("capclass")

EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    minsup: float = 0.01
    minconf: float = 0.5
    minchi2: float = 3.841
    n_partitions: int = 10
    ratio: Optional[float] = None
    g: str = "max"
    f: str = "max"
    m: str = "confidence"
    seed: int = 0
    balance: bool = False
    coverage: bool = False
    with_replacement: bool = True
    workers: int = 1

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        cfg = cls(**{k: getattr(args, k) for k in cls.__dataclass_fields__ if hasattr(args, k)})
        cfg.validate()
        return cfg

    def validate(self):
        if not 0.0 < self.minsup <= 1.0:
            raise UsageError(f"--minsup must be in (0, 1], got {self.minsup}")
        if not 0.0 < self.minconf <= 1.0:
            raise UsageError(f"--minconf must be in (0, 1], got {self.minconf}")
        if self.minchi2 < 0:
            raise UsageError(f"--minchi2 must be >= 0, got {self.minchi2}")
        if self.n_partitions < 1:
            raise UsageError("--partitions must be positive")
        if self.ratio is not None and not 0.0 < self.ratio <= 1.0:
            raise UsageError(f"--ratio must be in (0, 1], got {self.ratio}")
        if self.workers < 1:
            raise UsageError("--workers must be positive")

    @property
    def extraction(self) -> ExtractionParams:
        return ExtractionParams(self.minsup, self.minconf, self.minchi2)

    @property
    def voting(self) -> VotingParams:
        return VotingParams(self.f, self.m)

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(self.extraction, self.n_partitions, self.ratio, self.g, self.coverage,
                           self.with_replacement, self.workers)


def _add_input(p, labeled_flag=False):
    p.add_argument("--format", choices=("transactions", "tabular"), default="transactions",
                   help="input file format (default: transactions)")
    p.add_argument("--label-position", choices=("first", "last"), default="last",
                   help="label token position in transaction files")
    p.add_argument("--sep", default=",", help="tabular column separator")
    p.add_argument("--label-column", type=int, default=-1,
                   help="tabular label column index, negative counts from the end")
    p.add_argument("--null-token", default="", help="tabular cell value meaning 'missing'")
    if labeled_flag:
        p.add_argument("--unlabeled", action="store_true",
                       help="input rows carry no label (transactions: all tokens are items)")


def _add_training(p):
    p.add_argument("--minsup", type=float, default=0.01)
    p.add_argument("--minconf", type=float, default=0.5)
    p.add_argument("--minchi2", type=float, default=3.841)
    p.add_argument("--partitions", dest="n_partitions", type=int, default=10)
    p.add_argument("--ratio", type=float, default=None, help="sampling ratio (default 1/partitions)")
    p.add_argument("--g", choices=("max", "min", "product"), default="max",
                   help="consolidation function")
    p.add_argument("--coverage", action="store_true", help="database coverage pruning per partition")
    p.add_argument("--balance", action="store_true", help="subsample majority classes before training")
    p.add_argument("--no-replacement", dest="with_replacement", action="store_false",
                   help="sample partitions without replacement")
    p.add_argument("--seed", type=int, default=0)
    _add_workers(p)


def _add_voting(p):
    p.add_argument("--f", choices=("max", "min", "mean"), default="max", help="per-label aggregate")
    p.add_argument("--m", choices=("confidence", "one_minus_support"), default="confidence",
                   help="rule measure used in voting")


def _add_workers(p):
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)


def _load(args, path, *, labeled=True, dictionary=None, label_names=None):
    unknown: list = []
    if args.format == "tabular":
        label_col = args.label_column if labeled else None
        d = load_tabular(path, args.sep, label_col, args.null_token, dictionary=dictionary,
                         label_names=label_names, unknown=unknown)
    else:
        d = load_transactions(path, args.label_position, labeled=labeled, dictionary=dictionary,
                              label_names=label_names, unknown=unknown)
    if unknown:
        log.warning("%s: %d item occurrence(s) unknown to the model were ignored",
                    path, len(unknown))
    return d


def cmd_train(args) -> int:
    cfg = RunConfig.from_args(args)
    d = _load(args, args.input)
    if cfg.balance:
        d = balance_subsample(d, cfg.seed)
    start = time.perf_counter()
    model = train(d, cfg.n_partitions, cfg.ratio, cfg.extraction, cfg.g, cfg.seed, cfg.coverage,
                  cfg.workers, cfg.with_replacement)
    elapsed = time.perf_counter() - start
    write_model(model, args.model)
    print(f"{len(model.rules)} rules written to {args.model} in {elapsed:.3f}s")
    return 0


def cmd_predict(args) -> int:
    cfg = RunConfig.from_args(args)
    model = read_model(args.model)
    d = _load(args, args.input, labeled=not args.unlabeled, dictionary=model.dictionary,
              label_names=Vocabulary(model.label_names.tokens))
    scores = score_batch(model, d, cfg.voting, workers=cfg.workers)
    text = format_scores(model, scores)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _positive(d, label: Optional[str]) -> int:
    if label is None:
        return 1
    idx = d.label_names.lookup(label)
    if idx is None:
        raise UsageError(f"unknown positive label {label!r}")
    return idx


def _report(result, args):
    print(result.delimited(args.sep_out) if args.delimited else result.table())


def cmd_eval(args) -> int:
    cfg = RunConfig.from_args(args)
    d = _load(args, args.input)
    positive = _positive(d, args.positive)
    if args.test:
        test_d = _load(args, args.test, dictionary=d.dictionary, label_names=d.label_names)
        fold = evaluate_split(d, test_d, cfg.train_config, cfg.voting, cfg.seed, cfg.balance, positive)
        result = EvalResult(fold.auroc, fold.accuracy, fold.n_test, [fold])
    else:
        result = holdout(d, args.holdout, cfg.train_config, cfg.voting, cfg.seed, cfg.balance, positive)
    _report(result, args)
    return 0


def cmd_crossval(args) -> int:
    cfg = RunConfig.from_args(args)
    d = _load(args, args.input)
    if args.folds < 2:
        raise UsageError("--folds must be at least 2")
    result = crossval(d, args.folds, cfg.train_config, cfg.voting, cfg.seed, cfg.balance,
                      _positive(d, args.positive))
    _report(result, args)
    return 0


def cmd_inspect(args) -> int:
    print(read_model(args.model).describe())
    return 0


def cmd_oracle(args) -> int:
    from .oracle import mine_all_cars
    d = _load(args, args.input)
    for r in mine_all_cars(d, args.minsup, args.minconf):
        ante = ", ".join(sorted(d.dictionary.token(i) for i in r.antecedent))
        print(f"{ante} => {d.label_names.token(r.consequent)} "
              f"(sup={r.support:.3f}, conf={r.confidence:.3f}, chi2={r.chi2:.3f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="capclass", description="Bagged associative classifier (CAP-growth).")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("train", help="train a model and write it to a file")
    p.add_argument("input")
    p.add_argument("-o", "--model", required=True, help="output model file")
    _add_input(p)
    _add_training(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score records with a trained model")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="score file (default: stdout)")
    _add_input(p, labeled_flag=True)
    _add_voting(p)
    _add_workers(p)
    p.set_defaults(func=cmd_predict)

    for name, func, helptext in (("eval", cmd_eval, "train/test evaluation (holdout or --test file)"),
                                 ("crossval", cmd_crossval, "k-fold cross-validation")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("input")
        _add_input(p)
        _add_training(p)
        _add_voting(p)
        p.add_argument("--positive", help="label treated as positive for AUROC (default: second label)")
        p.add_argument("--delimited", action="store_true", help="print separator-delimited rows")
        p.add_argument("--sep-out", default="\t", help="separator for --delimited output")
        if name == "eval":
            p.add_argument("--test", help="separate labeled test file")
            p.add_argument("--holdout", type=float, default=0.3, help="held-out fraction without --test")
        else:
            p.add_argument("--folds", type=int, default=5)
        p.set_defaults(func=func)

    p = sub.add_parser("inspect", help="print a model's rules")
    p.add_argument("model")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("oracle", help=argparse.SUPPRESS)
    p.add_argument("input")
    p.add_argument("--minsup", type=float, required=True)
    p.add_argument("--minconf", type=float, required=True)
    _add_input(p)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"capclass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, ModelFormatError, OSError, ValueError) as exc:
        print(f"capclass: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
