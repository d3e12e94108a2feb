#!/usr/bin/env python3
"""Regenerate the bundled fixture corpus (src/groupmatch/data/company_seeds.csv).

The fixture is 200 synthesized seeds under a fixed seed, so rerunning this
script is a no-op unless the synthesizer changes.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from groupmatch.corpus import synthesize_seeds, write_corpus_csv

OUT = Path(__file__).resolve().parents[1] / "src" / "groupmatch" / "data" / "company_seeds.csv"
N_SEEDS = 200
SEED = 20240501


def main() -> None:
    OUT.parent.mkdir(parents=True, exist_ok=True)
    write_corpus_csv(OUT, synthesize_seeds(N_SEEDS, SEED))
    print(f"wrote {N_SEEDS} seeds -> {OUT}")


if __name__ == "__main__":
    main()
