#!/usr/bin/env python3
"""Desk-scale benchmark: generate a synthetic companies dataset and score the
pipeline at all three stages, including the cut-only and betweenness-only
cleanup variants.

Usage:
    python scripts/run_synthetic_benchmark.py [--groups 1000] [--seed 7]
"""

import argparse
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from groupmatch.blocking import BlockingKind
from groupmatch.core import RecordKind
from groupmatch.corpus import synthesize_seeds
from groupmatch.datagen import GenerationParams, generate
from groupmatch.graph import CleanupParams
from groupmatch.matcher import MatcherSpec
from groupmatch.pipeline import run_pipeline


def fmt(scores):
    out = []
    for s in scores:
        line = f"  {s.stage.value:<13} P={s.precision:.4f} R={s.recall:.4f} F1={s.f1:.4f}"
        if s.cluster_purity is not None:
            line += f" ClPur={s.cluster_purity:.4f} max_size={s.max_component_size}"
        out.append(line)
    return "\n".join(out)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--groups", type=int, default=1000)
    parser.add_argument("--sources", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    started = time.monotonic()
    seeds = synthesize_seeds(args.groups, seed=args.seed)
    dataset = generate(
        seeds,
        GenerationParams(
            num_groups=args.groups, num_sources=args.sources, rng_seed=args.seed
        ),
    )
    print(
        f"generated {len(dataset.companies)} company and "
        f"{len(dataset.securities)} security records "
        f"({len(dataset.company_truth)} / {len(dataset.security_truth)} groups) "
        f"in {time.monotonic() - started:.1f}s"
    )

    variants = [
        ("default (cut above 25, then betweenness down to 5)", CleanupParams(25, 5)),
        ("cut-only (gamma = mu)", CleanupParams(5, 5)),
        ("betweenness-only (gamma = inf)", CleanupParams(math.inf, 5)),
    ]
    for label, params in variants:
        started = time.monotonic()
        result = run_pipeline(
            kind=RecordKind.COMPANY,
            blockings=(BlockingKind.ID_OVERLAP, BlockingKind.TOKEN_OVERLAP),
            matcher_spec=MatcherSpec.name_jaccard(0.5),
            cleanup_params=params,
            companies=dataset.companies,
            securities=dataset.securities,
            truth=dataset.company_truth,
        )
        elapsed = time.monotonic() - started
        removed = {"mincut": 0, "betweenness": 0, "precleanup": 0}
        for _, phase in result.removed:
            removed[phase] += 1
        print(f"\n{label}: {elapsed:.1f}s, removed {removed}")
        print(fmt(result.scores))


if __name__ == "__main__":
    main()
