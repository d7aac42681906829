"""Command-line interface.

Subcommands mirror the pipeline stages plus 'pipeline' (run everything) and
'toylang' (write a synthetic corpus with gold annotations). Options can
come from a key=value config file, with command-line flags winning.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys

from .errors import ConfigError, MorphmineError
from .evaluate import generate_toy_language, write_toy_language
from .pipeline import STAGES, load_config, run_pipeline, run_stage


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 (argparse hook)
        raise ConfigError(message)


# flag dest -> PipelineConfig field; all parsed as strings, coerced centrally
_OPTIONS = {
    "corpus": "corpus_path",
    "clusters": "cluster_source",
    "embeddings": "embedding_source",
    "inflector": "inflector",
    "gold": "gold_path",
    "test": "test_path",
    "out_dir": "out_dir",
    "seed": "seed",
    "alpha": "alpha",
    "beta": "beta",
    "beta_unit": "beta_unit",
    "n_tags": "n_tags",
    "distance_threshold": "distance_threshold",
    "linkage": "linkage",
    "max_contexts": "max_contexts",
    "min_lcs_ratio": "min_lcs_ratio",
    "min_count": "min_count",
    "min_stem_len": "min_stem_len",
    "em_max_iters": "em_max_iters",
    "em_tol": "em_tol",
    "em_restarts": "em_restarts",
    "embed_dim": "embed_dim",
    "embed_window": "embed_window",
    "embed_epochs": "embed_epochs",
    "embed_negatives": "embed_negatives",
    "embed_lr": "embed_lr",
    "embed_min_n": "embed_min_n",
    "embed_max_n": "embed_max_n",
    "predictor_epochs": "predictor_epochs",
    "predictor_lr": "predictor_lr",
    "bmacc_average": "bmacc_average",
}

_BOOL_OPTIONS = {"lowercase": "lowercase", "figures": "figures"}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    for dest in _OPTIONS:
        parser.add_argument(f"--{dest.replace('_', '-')}", dest=dest, default=None)
    for dest in _BOOL_OPTIONS:
        parser.add_argument(
            f"--{dest.replace('_', '-')}",
            dest=dest,
            action=argparse.BooleanOptionalAction,
            default=None,
        )


def _build_parser() -> _Parser:
    parser = _Parser(prog="morphmine", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log stage progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("pipeline", help="run all stages")
    _add_config_flags(run)
    for stage in STAGES:
        p = sub.add_parser(stage, help=f"run only the {stage} stage")
        _add_config_flags(p)

    toy = sub.add_parser("toylang", help="write a synthetic corpus with gold paradigms")
    toy.add_argument(
        "--pos",
        action="append",
        required=True,
        metavar="NAME=sfx1,sfx2,...",
        help="POS with its suffix list; repeatable; empty suffix allowed",
    )
    toy.add_argument("--lemmas", type=int, default=20, help="lemmas per POS")
    toy.add_argument("--sentences", type=int, default=1000)
    toy.add_argument("--seed", type=int, default=0)
    toy.add_argument("--out-dir", default="toy")
    return parser


def _parse_pos_specs(specs: list[str]) -> dict[str, list[str]]:
    suffixes: dict[str, list[str]] = {}
    for spec in specs:
        if "=" not in spec:
            raise ConfigError(f"--pos needs NAME=suffixes, got {spec!r}")
        name, _, raw = spec.partition("=")
        name = name.strip()
        if not name:
            raise ConfigError(f"--pos with empty name: {spec!r}")
        if name in suffixes:
            raise ConfigError(f"--pos {name} given twice")
        suffixes[name] = raw.split(",") if raw != "" else [""]
    return suffixes


def _cmd_toylang(args: argparse.Namespace) -> int:
    suffixes = _parse_pos_specs(args.pos)
    try:
        toy = generate_toy_language(suffixes, args.lemmas, args.sentences, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    digest = hashlib.sha256(
        f"{sorted(suffixes.items())}|{args.lemmas}|{args.sentences}|{args.seed}".encode()
    ).hexdigest()[:12]
    write_toy_language(toy, args.out_dir, f"# config={digest} seed={args.seed}\n")
    print(
        f"wrote {args.out_dir}/corpus.txt ({len(toy.corpus.sentences)} sentences), "
        f"gold.tsv ({len(toy.paradigms)} paradigms), clusters.tsv"
    )
    return 0


def _report_summary(report) -> str:
    per_pos = " ".join(f"{pos}={val:.4f}" for pos, val in sorted(report.per_pos.items()))
    line = f"bmacc={report.bmacc:.4f} ({report.average})"
    if per_pos:
        line += f" | per-pos: {per_pos}"
    if report.bmf1 is not None:
        line += f" | bmf1={report.bmf1:.4f}"
    return line


def main(argv: list[str] | None = None) -> int:
    args_list = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _build_parser().parse_args(args_list)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        if args.command == "toylang":
            return _cmd_toylang(args)
        overrides = {key: getattr(args, dest) for dest, key in _OPTIONS.items()}
        overrides.update({key: getattr(args, dest) for dest, key in _BOOL_OPTIONS.items()})
        cfg = load_config(args.config, overrides)
        if args.command == "pipeline":
            report = run_pipeline(cfg)
            if report is not None:
                print(_report_summary(report))
            else:
                print(f"pipeline finished (no evaluation requested); artifacts in {cfg.out_dir}")
        else:
            result = run_stage(args.command, cfg)
            if args.command == "evaluate" and result is not None:
                print(_report_summary(result))
            else:
                print(f"stage {args.command} finished; artifacts in {cfg.out_dir}")
        return 0
    except MorphmineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
