"""Base company seeds: CSV loading and a built-in synthesizer.

The generator replicates a corpus of base company seeds across data
sources. Any CSV with at least a ``name`` column works; the package also
ships a small fixture corpus and can synthesize arbitrarily many plausible
seeds from word lists, which is how the fixture itself was produced.
"""

import csv
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator

from .core import ParseError

log = logging.getLogger(__name__)

CORPUS_COLUMNS = ("name", "city", "region", "country_code", "description")


@dataclass(frozen=True)
class CompanySeed:
    name: str
    city: str | None = None
    region: str | None = None
    country_code: str | None = None
    description: str | None = None


@dataclass(frozen=True)
class BaseCorpus:
    seeds: tuple[CompanySeed, ...]
    n_skipped: int = 0  # rows dropped for having an empty name

    def __len__(self) -> int:
        return len(self.seeds)

    def __iter__(self) -> Iterator[CompanySeed]:
        return iter(self.seeds)


def load_base_corpus(path: str | Path) -> BaseCorpus:
    """Read seeds from a CSV file, preserving row order.

    The header must contain ``name``; the other corpus columns are optional
    and empty cells load as absent (None), not as empty strings. Rows with
    an empty name are skipped and counted.
    """
    seeds: list[CompanySeed] = []
    skipped = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "name" not in reader.fieldnames:
            raise ParseError(f"{path}: corpus header must contain a name column")
        for row in reader:
            name = (row.get("name") or "").strip()
            if not name:
                skipped += 1
                continue
            seeds.append(
                CompanySeed(
                    name=name,
                    city=(row.get("city") or "").strip() or None,
                    region=(row.get("region") or "").strip() or None,
                    country_code=(row.get("country_code") or "").strip() or None,
                    description=(row.get("description") or "").strip() or None,
                )
            )
    if skipped:
        log.warning("%s: skipped %d rows with empty names", path, skipped)
    return BaseCorpus(tuple(seeds), skipped)


def write_corpus_csv(path: str | Path, seeds: list[CompanySeed] | tuple[CompanySeed, ...]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CORPUS_COLUMNS)
        for seed in seeds:
            writer.writerow(
                [seed.name, seed.city or "", seed.region or "", seed.country_code or "", seed.description or ""]
            )


def bundled_corpus_path() -> Path:
    """Path of the fixture corpus shipped with the package (200 seeds)."""
    return Path(str(resources.files("groupmatch").joinpath("data/company_seeds.csv")))


# ---------------------------------------------------------------------------
# Seed synthesizer. Names are unique (adjective, noun) combinations so that
# distinct seeds never share more than one name token.
# ---------------------------------------------------------------------------

NAME_ADJECTIVES = (
    "Azure", "Bright", "Coastal", "Dynamic", "Eastern", "Frontier", "Golden",
    "Harbor", "Ivory", "Jade", "Keystone", "Lunar", "Meridian", "Northern",
    "Orion", "Pacific", "Quantum", "Redwood", "Sterling", "Tidal", "Unified",
    "Vertex", "Western", "Xenon", "Yonder", "Zenith", "Alpine", "Birch",
    "Cedar", "Delta", "Ember", "Falcon", "Granite", "Horizon", "Iron",
    "Juniper", "Kinetic", "Laurel", "Mosaic", "Nimbus", "Opal", "Pinnacle",
    "Quarry", "Ridge", "Summit", "Terra", "Umber", "Vista", "Willow", "Yukon",
    "Atlas", "Beacon", "Cobalt", "Drift", "Echo", "Fable", "Glacier", "Helix",
    "Indigo", "Jetstream",
)

# Kept deliberately compact: real multi-source corpora share sector words
# across unrelated companies, and that cross-group token overlap is what
# makes text-based candidate pairs (and their false positives) non-trivial.
NAME_NOUNS = (
    "Analytics", "Biotech", "Capital", "Dynamics", "Energy", "Foods",
    "Genomics", "Hardware", "Imaging", "Journeys", "Kitchens", "Logistics",
    "Materials", "Networks", "Optics", "Pharma", "Robotics",
    "Semiconductors", "Textiles", "Utilities", "Ventures", "Works",
    "Aerospace", "Brands", "Computing", "Diagnostics", "Electronics",
    "Freight", "Gaming", "Housing", "Instruments", "Labs", "Media",
)

CITIES = (
    ("Zurich", "Zurich", "CH"), ("Geneva", "Geneva", "CH"),
    ("Berlin", "Berlin", "DE"), ("Munich", "Bavaria", "DE"),
    ("Paris", "Ile-de-France", "FR"), ("Lyon", "Rhone", "FR"),
    ("London", "England", "GB"), ("Manchester", "England", "GB"),
    ("Dublin", "Leinster", "IE"), ("Oslo", "Oslo", "NO"),
    ("Stockholm", "Stockholm", "SE"), ("Copenhagen", "Hovedstaden", "DK"),
    ("Helsinki", "Uusimaa", "FI"), ("Amsterdam", "North Holland", "NL"),
    ("Rotterdam", "South Holland", "NL"), ("Brussels", "Brussels", "BE"),
    ("Vienna", "Vienna", "AT"), ("Lisbon", "Lisbon", "PT"),
    ("Madrid", "Madrid", "ES"), ("Barcelona", "Catalonia", "ES"),
    ("Milan", "Lombardy", "IT"), ("Rome", "Lazio", "IT"),
    ("Warsaw", "Masovia", "PL"), ("Prague", "Prague", "CZ"),
    ("Budapest", "Budapest", "HU"), ("New York", "New York", "US"),
    ("Boston", "Massachusetts", "US"), ("Chicago", "Illinois", "US"),
    ("Austin", "Texas", "US"), ("Denver", "Colorado", "US"),
    ("Seattle", "Washington", "US"), ("Toronto", "Ontario", "CA"),
    ("Vancouver", "British Columbia", "CA"), ("Montreal", "Quebec", "CA"),
    ("Sydney", "New South Wales", "AU"), ("Melbourne", "Victoria", "AU"),
    ("Auckland", "Auckland", "NZ"), ("Singapore", "Singapore", "SG"),
    ("Tokyo", "Tokyo", "JP"), ("Osaka", "Osaka", "JP"),
)

_VERBS = ("designs", "builds", "operates", "develops", "supplies", "maintains", "distributes", "manages")
_OFFERINGS = (
    "industrial sensors", "freight corridors", "retail storefronts",
    "payment rails", "clinical software", "irrigation systems",
    "modular housing", "battery packs", "satellite links", "cargo fleets",
    "water treatment plants", "wind farms", "cold storage depots",
    "fiber networks", "testing benches", "packaging lines",
    "harbor cranes", "greenhouse arrays", "print facilities",
    "recycling plants", "vehicle depots", "broadcast studios",
    "grain silos", "assembly robots",
)
_AUDIENCES = (
    "regional utilities", "independent grocers", "municipal agencies",
    "commercial fleets", "hospital networks", "small manufacturers",
    "port operators", "rural cooperatives",
)
_GEOS = (
    "three continents", "the nordics", "coastal markets",
    "emerging markets", "the alpine region", "inland waterways",
)


def synthesize_seeds(n: int, seed: int = 0) -> list[CompanySeed]:
    """Deterministically fabricate ``n`` distinct company seeds.

    A minority of rows miss optional attributes, mirroring the gaps found
    in real multi-source feeds.
    """
    import random

    limit = len(NAME_ADJECTIVES) * len(NAME_NOUNS)
    if n > limit:
        raise ValueError(f"can synthesize at most {limit} distinct seeds, requested {n}")
    rng = random.Random(seed)
    combos = rng.sample(range(limit), n)
    seeds = []
    for combo in combos:
        adj = NAME_ADJECTIVES[combo // len(NAME_NOUNS)]
        noun = NAME_NOUNS[combo % len(NAME_NOUNS)]
        city = region = country = None
        if rng.random() < 0.88:
            city, region, country = rng.choice(CITIES)
            if rng.random() < 0.15:
                region = None
        description = None
        if rng.random() < 0.65:
            clauses = [f"{rng.choice(_VERBS)} {rng.choice(_OFFERINGS)}"]
            if rng.random() < 0.8:
                clauses.append(f"serves {rng.choice(_AUDIENCES)}")
            if rng.random() < 0.35:
                clauses.append(f"operating across {rng.choice(_GEOS)}")
            description = ", ".join(clauses)
        seeds.append(
            CompanySeed(
                name=f"{adj} {noun}",
                city=city,
                region=region,
                country_code=country,
                description=description,
            )
        )
    return seeds
