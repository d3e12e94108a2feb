"""Command-line front end.

Subcommands mirror the pipeline stages (generate, block, match, cleanup,
evaluate, export-pairs) plus a one-shot ``pipeline`` command; every stage
can also run standalone on the files of the previous one, which is how
externally computed predictions are spliced in between block and cleanup.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import io
from .blocking import BlockingKind
from .core import DataError, RecordKind
from .corpus import bundled_corpus_path, load_base_corpus
from .datagen import (
    ArtifactKind,
    GenerationParams,
    SplitAssignment,
    export_training_pairs,
    generate,
    split_groups,
)
from .graph import (
    CleanupParams,
    build_graph,
    connected_components,
    graph_cleanup,
    pre_cleanup,
)
from .matcher import MatcherKind, MatcherSpec, group_by_issuer, import_predictions, predict_all
from .metrics import Stage, StageScores, group_scores, pairwise_scores
from .pipeline import compute_candidates, run_pipeline


@dataclass(frozen=True)
class Preset:
    kind: RecordKind
    blockings: tuple[BlockingKind, ...]
    gamma: float
    mu: int


PRESETS = {
    "synthetic-companies": Preset(
        RecordKind.COMPANY, (BlockingKind.ID_OVERLAP, BlockingKind.TOKEN_OVERLAP), 25, 5
    ),
    "synthetic-securities": Preset(
        RecordKind.SECURITY, (BlockingKind.ID_OVERLAP, BlockingKind.ISSUER_MATCH), 25, 5
    ),
    "real-companies": Preset(
        RecordKind.COMPANY, (BlockingKind.ID_OVERLAP, BlockingKind.TOKEN_OVERLAP), 40, 8
    ),
    "real-securities": Preset(
        RecordKind.SECURITY, (BlockingKind.ID_OVERLAP, BlockingKind.ISSUER_MATCH), 40, 8
    ),
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this artifact reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _gamma(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return _positive_int(text)


def _rate(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return value


def _artifact_rate(text: str) -> tuple[ArtifactKind, float]:
    kind_name, _, rate_text = text.partition("=")
    try:
        kind = ArtifactKind(kind_name)
    except ValueError:
        names = ", ".join(k.value for k in ArtifactKind)
        raise argparse.ArgumentTypeError(
            f"unknown artifact {kind_name!r} (choose from {names})"
        ) from None
    return kind, _rate(rate_text)


def _blocking_list(text: str) -> tuple[BlockingKind, ...]:
    try:
        return tuple(BlockingKind(part) for part in text.split(",") if part)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="groupmatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate a synthetic benchmark dataset")
    p.add_argument("--base-corpus", help="seed CSV (default: bundled fixture corpus)")
    p.add_argument("--groups", type=_positive_int, required=True)
    p.add_argument("--sources", type=_positive_int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--artifact-rate", type=_artifact_rate, action="append", default=[],
                   metavar="KIND=RATE", help="override one artifact rate; repeatable")
    p.add_argument("--default-artifact-rate", type=_rate, default=None,
                   help="rate for artifacts not overridden explicitly")
    p.add_argument("--naming-jitter", type=_rate, default=0.15)
    p.add_argument("--securities-min", type=_positive_int, default=1)
    p.add_argument("--securities-max", type=_positive_int, default=2)
    p.add_argument("--neg-ratio", type=int, default=5)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("block", help="produce candidate pairs")
    _add_table_flags(p)
    p.add_argument("--blockings", type=_blocking_list,
                   help="comma-separated list, e.g. IdOverlap,TokenOverlap")
    p.add_argument("--token-top-n", type=_positive_int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("match", help="score candidate pairs")
    _add_table_flags(p)
    p.add_argument("--candidates", required=True)
    p.add_argument("--matcher", choices=[m.value for m in MatcherKind],
                   default=MatcherKind.NAME_JACCARD.value)
    p.add_argument("--threshold", type=_rate, default=0.5)
    p.add_argument("--predictions", help="external predictions CSV (matcher=external)")
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("cleanup", help="build the match graph, clean it, emit groups")
    _add_table_flags(p)
    p.add_argument("--predictions", required=True)
    p.add_argument("--candidates", help="attach blocking provenance to predictions")
    p.add_argument("--gamma", type=_gamma, default=None)
    p.add_argument("--mu", type=_positive_int, default=None)
    p.add_argument("--pre-cleanup-limit", type=_positive_int, default=50)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_cleanup)

    p = sub.add_parser("evaluate", help="score a grouping (and optionally predictions)")
    p.add_argument("--groups", required=True, help="groups CSV to evaluate")
    p.add_argument("--truth", required=True, help="ground-truth groups CSV")
    p.add_argument("--predictions", help="adds pairwise and pre-cleanup stages")
    p.add_argument("--report", help="write the metrics report JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-pairs", help="labeled training pairs per split")
    p.add_argument("--truth", required=True, help="ground-truth groups CSV")
    p.add_argument("--splits", help="existing splits CSV (default: compute fresh)")
    p.add_argument("--split-ratios", default="0.6,0.2,0.2")
    p.add_argument("--neg-ratio", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_export_pairs)

    p = sub.add_parser("pipeline", help="block + match + cleanup + evaluate in one go")
    _add_table_flags(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--blockings", type=_blocking_list)
    p.add_argument("--matcher", choices=[m.value for m in MatcherKind],
                   default=MatcherKind.NAME_JACCARD.value)
    p.add_argument("--threshold", type=_rate, default=0.5)
    p.add_argument("--predictions", help="external predictions CSV")
    p.add_argument("--token-top-n", type=_positive_int, default=5)
    p.add_argument("--gamma", type=_gamma, default=None)
    p.add_argument("--mu", type=_positive_int, default=None)
    p.add_argument("--pre-cleanup-limit", type=_positive_int, default=50)
    p.add_argument("--truth", help="ground-truth groups CSV enables scoring")
    p.add_argument("--report", help="write the metrics report JSON here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_pipeline)

    return parser


def _add_table_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--companies", help="companies CSV")
    p.add_argument("--securities", help="securities CSV")
    p.add_argument("--company-groups", help="company groups CSV for IssuerMatch")
    p.add_argument("--kind", choices=[k.value for k in RecordKind], default=None,
                   help="which table to match (default: inferred)")


def _resolve_kind(args) -> RecordKind:
    preset = PRESETS.get(getattr(args, "preset", None) or "")
    if args.kind:
        return RecordKind(args.kind)
    if preset:
        return preset.kind
    if args.securities and not args.companies:
        return RecordKind.SECURITY
    if args.companies:
        return RecordKind.COMPANY
    raise DataError("no record table given; pass --companies or --securities")


def _load_tables(args):
    companies = io.read_companies_csv(args.companies) if args.companies else None
    securities = io.read_securities_csv(args.securities) if args.securities else None
    company_groups = None
    if args.company_groups:
        truth = io.read_groups_csv(args.company_groups, RecordKind.COMPANY)
        company_groups = [g.member_ids for g in truth.groups]
    return companies, securities, company_groups


def _default_blockings(kind: RecordKind) -> tuple[BlockingKind, ...]:
    if kind is RecordKind.COMPANY:
        return (BlockingKind.ID_OVERLAP, BlockingKind.TOKEN_OVERLAP)
    return (BlockingKind.ID_OVERLAP, BlockingKind.ISSUER_MATCH)


def _cleanup_params(args, records) -> CleanupParams:
    """Resolve gamma/mu: explicit flags beat presets; mu falls back to the
    number of data sources seen in the target table, gamma to 5 * mu."""
    preset = PRESETS.get(getattr(args, "preset", None) or "")
    mu = args.mu if args.mu is not None else (preset.mu if preset else None)
    if mu is None:
        mu = len({rec.source for rec in records}) or 1
    gamma = args.gamma if args.gamma is not None else (preset.gamma if preset else None)
    if gamma is None:
        gamma = 5 * mu
    return CleanupParams(gamma=gamma, mu=mu, pre_cleanup_limit=args.pre_cleanup_limit)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    return os.cpu_count() or 1


def _matcher_spec(args) -> MatcherSpec:
    kind = MatcherKind(args.matcher)
    if kind is MatcherKind.EXTERNAL:
        if not args.predictions:
            raise DataError("matcher=external requires --predictions")
        return MatcherSpec.external(args.predictions)
    if args.predictions:
        return MatcherSpec.external(args.predictions)
    return MatcherSpec(kind, threshold=args.threshold)


def _print_scores(scores: list[StageScores]) -> None:
    for s in scores:
        line = (
            f"{s.stage.value:<13} P={s.precision:.4f} R={s.recall:.4f} F1={s.f1:.4f}"
            f" tp={s.tp} fp={s.fp} fn={s.fn}"
        )
        if s.cluster_purity is not None:
            line += f" ClPur={s.cluster_purity:.4f} components={s.n_components}"
            line += f" max_size={s.max_component_size}"
        print(line)


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    corpus_path = args.base_corpus or bundled_corpus_path()
    corpus = load_base_corpus(corpus_path)
    rates = dict(args.artifact_rate)
    if args.default_artifact_rate is not None:
        for kind in ArtifactKind:
            rates.setdefault(kind, args.default_artifact_rate)
    params = GenerationParams(
        num_groups=args.groups,
        num_sources=args.sources,
        artifact_rates=rates,
        rng_seed=args.seed,
        securities_per_company=(args.securities_min, args.securities_max),
        naming_jitter=args.naming_jitter,
    )
    dataset = generate(corpus.seeds, params)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_companies_csv(out / "companies.csv", dataset.companies)
    io.write_securities_csv(out / "securities.csv", dataset.securities)
    io.write_groups_csv(out / "company_groups.csv", dataset.company_truth.groups)
    io.write_groups_csv(out / "security_groups.csv", dataset.security_truth.groups)
    io.write_provenance_jsonl(out / "provenance.jsonl", dataset.provenance_log)

    company_splits = split_groups(dataset.company_truth, seed=args.seed)
    security_splits = split_groups(dataset.security_truth, seed=args.seed)
    merged = dict(company_splits.split_of)
    merged.update(security_splits.split_of)
    io.write_splits_csv(out / "splits.csv", SplitAssignment(merged))
    for which in ("train", "val", "test"):
        pairs = export_training_pairs(
            dataset.company_truth, company_splits, which, args.neg_ratio, args.seed
        ) + export_training_pairs(
            dataset.security_truth, security_splits, which, args.neg_ratio, args.seed
        )
        io.write_pairs_csv(out / f"pairs_{which}.csv", pairs)

    for label, records, truth in (
        ("companies", dataset.companies, dataset.company_truth),
        ("securities", dataset.securities, dataset.security_truth),
    ):
        print(
            f"{label}: {len(truth)} groups, {len(records)} records, "
            f"{truth.n_true_pairs()} matches"
        )
    return 0


def cmd_block(args) -> int:
    kind = _resolve_kind(args)
    companies, securities, company_groups = _load_tables(args)
    blockings = args.blockings or _default_blockings(kind)
    candidates = compute_candidates(
        kind, blockings, companies, securities, company_groups, args.token_top_n
    )
    io.write_candidates_csv(args.out, candidates)
    print(f"{len(candidates)} candidate pairs -> {args.out}")
    return 0


def cmd_match(args) -> int:
    kind = _resolve_kind(args)
    companies, securities, _ = _load_tables(args)
    candidates = io.read_candidates_csv(args.candidates)
    spec = _matcher_spec(args)
    target = companies if kind is RecordKind.COMPANY else securities
    if target is None:
        raise DataError(f"no {kind.value} table given")
    records_by_id = {rec.id: rec for rec in target}
    securities_by_issuer = (
        group_by_issuer(securities)
        if kind is RecordKind.COMPANY and securities
        else None
    )
    try:
        predictions = predict_all(
            candidates, records_by_id, spec, securities_by_issuer, _threads(args)
        )
    except KeyError as exc:
        raise DataError(f"match stage: {exc.args[0]}") from None
    io.write_predictions_csv(args.out, predictions)
    positive = sum(1 for p in predictions if p.is_match)
    print(f"{len(predictions)} predictions ({positive} positive) -> {args.out}")
    return 0


def cmd_cleanup(args) -> int:
    kind = _resolve_kind(args)
    companies, securities, _ = _load_tables(args)
    target = companies if kind is RecordKind.COMPANY else securities
    if target is None:
        raise DataError(f"no {kind.value} table given")
    if args.candidates:
        candidates = io.read_candidates_csv(args.candidates)
        predictions = import_predictions(args.predictions, candidates).predictions
    else:
        predictions = io.read_predictions_csv(args.predictions)
    try:
        graph = build_graph(predictions, [rec.id for rec in target])
    except KeyError as exc:
        raise DataError(f"graph stage: {exc.args[0]}") from None
    params = _cleanup_params(args, target)
    removed = []
    token_declared = any(
        BlockingKind.TOKEN_OVERLAP in p.provenance for p in predictions
    )
    if kind is RecordKind.COMPANY and token_declared:
        graph, dropped = pre_cleanup(graph, params.pre_cleanup_limit)
        removed.extend((edge, "precleanup") for edge in dropped)
    result = graph_cleanup(graph, params, workers=_threads(args))
    removed.extend(result.removed)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    groups = io.components_to_groups((c.nodes for c in result.components), kind)
    io.write_groups_csv(out / "groups.csv", groups)
    io.write_audit_jsonl(out / "cleanup_audit.jsonl", removed)
    print(
        f"{len(result.components)} groups "
        f"(max size {max((len(c) for c in result.components), default=0)}), "
        f"{len(removed)} edges removed -> {out / 'groups.csv'}"
    )
    return 0


def cmd_evaluate(args) -> int:
    # the kind tag on loaded groups does not affect the metrics
    grouping = io.read_groups_csv(args.groups, RecordKind.COMPANY)
    truth = io.read_groups_csv(args.truth, RecordKind.COMPANY)
    scores: list[StageScores] = []
    if args.predictions:
        predictions = io.read_predictions_csv(args.predictions)
        positive = {p.pair for p in predictions if p.is_match}
        scores.append(pairwise_scores(positive, truth))
        try:
            graph = build_graph(predictions, sorted(truth.record_ids()))
        except KeyError as exc:
            raise DataError(f"graph stage: {exc.args[0]}") from None
        raw = connected_components(graph)
        scores.append(group_scores([c.nodes for c in raw], truth, Stage.PRE_CLEANUP))
    scores.append(
        group_scores(
            [g.member_ids for g in grouping.groups], truth, Stage.POST_CLEANUP
        )
    )
    _print_scores(scores)
    if args.report:
        io.write_metrics_json(args.report, scores)
    return 0


def cmd_export_pairs(args) -> int:
    truth = io.read_groups_csv(args.truth, RecordKind.COMPANY)
    if args.splits:
        assignment = io.read_splits_csv(args.splits)
    else:
        ratios = tuple(float(r) for r in args.split_ratios.split(","))
        if len(ratios) != 3:
            raise DataError(f"--split-ratios needs three numbers, got {args.split_ratios!r}")
        total = sum(ratios)
        if abs(total - 1.0) > 1e-9:
            print(
                f"warning: split ratios sum to {total:g}; re-normalizing",
                file=sys.stderr,
            )
            ratios = tuple(r / total for r in ratios)
        assignment = split_groups(truth, ratios, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not args.splits:
        io.write_splits_csv(out / "splits.csv", assignment)
    for which in ("train", "val", "test"):
        pairs = export_training_pairs(truth, assignment, which, args.neg_ratio, args.seed)
        path = out / f"pairs_{which}.csv"
        io.write_pairs_csv(path, pairs)
        positive = sum(1 for p in pairs if p.is_match)
        print(f"{which}: {positive} positive + {len(pairs) - positive} negative -> {path}")
    return 0


def cmd_pipeline(args) -> int:
    kind = _resolve_kind(args)
    companies, securities, company_groups = _load_tables(args)
    preset = PRESETS.get(args.preset or "")
    blockings = args.blockings or (preset.blockings if preset else _default_blockings(kind))
    target = companies if kind is RecordKind.COMPANY else securities
    if target is None:
        raise DataError(f"no {kind.value} table given")
    params = _cleanup_params(args, target)
    spec = _matcher_spec(args)
    truth = io.read_groups_csv(args.truth, kind) if args.truth else None

    result = run_pipeline(
        kind=kind,
        blockings=blockings,
        matcher_spec=spec,
        cleanup_params=params,
        companies=companies,
        securities=securities,
        company_groups=company_groups,
        token_top_n=args.token_top_n,
        truth=truth,
        workers=_threads(args),
    )

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_candidates_csv(out / "candidates.csv", result.candidates)
    io.write_predictions_csv(out / "predictions.csv", result.predictions)
    groups = io.components_to_groups((c.nodes for c in result.components), kind)
    io.write_groups_csv(out / "groups.csv", groups)
    io.write_audit_jsonl(out / "cleanup_audit.jsonl", result.removed)
    if result.scores:
        _print_scores(result.scores)
        report_path = args.report or (out / "report.json")
        io.write_metrics_json(report_path, result.scores)
    print(
        f"{len(groups)} groups from {len(result.predictions)} predictions -> "
        f"{out / 'groups.csv'}"
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:  # bad flag combinations (e.g. gamma < mu)
        print(f"groupmatch: error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"groupmatch: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
