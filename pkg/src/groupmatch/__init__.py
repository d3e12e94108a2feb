"""Entity group matching across multiple data sources.

Blocking selects candidate record pairs, a pluggable pairwise matcher
labels them, and a structural graph cleanup removes likely false positive
edges before connected components are completed into entity groups. A
seeded synthetic benchmark generator ships alongside the pipeline.
"""

from .blocking import BlockingKind, CandidatePair, tokenize
from .core import (
    CompanyRecord,
    DataError,
    EntityGroup,
    GroundTruth,
    IdScheme,
    PartitionError,
    RecordKind,
    SecurityRecord,
    SecurityType,
    canonical_pair,
)
from .corpus import CompanySeed, load_base_corpus, synthesize_seeds
from .datagen import ArtifactKind, GenerationParams, GeneratedDataset, generate
from .graph import (
    CleanupParams,
    CleanupResult,
    Component,
    MatchGraph,
    build_graph,
    connected_components,
    edge_betweenness,
    graph_cleanup,
    min_edge_cut,
    pre_cleanup,
    transitive_completion,
)
from .matcher import MatcherKind, MatcherSpec, Prediction, predict_all
from .metrics import Stage, StageScores, cluster_purity, group_scores, pairwise_scores
from .pipeline import PipelineResult, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "ArtifactKind",
    "BlockingKind",
    "CandidatePair",
    "CleanupParams",
    "CleanupResult",
    "CompanyRecord",
    "CompanySeed",
    "Component",
    "DataError",
    "EntityGroup",
    "GeneratedDataset",
    "GenerationParams",
    "GroundTruth",
    "IdScheme",
    "MatchGraph",
    "MatcherKind",
    "MatcherSpec",
    "PartitionError",
    "PipelineResult",
    "Prediction",
    "RecordKind",
    "SecurityRecord",
    "SecurityType",
    "Stage",
    "StageScores",
    "build_graph",
    "canonical_pair",
    "cluster_purity",
    "connected_components",
    "edge_betweenness",
    "generate",
    "graph_cleanup",
    "group_scores",
    "load_base_corpus",
    "min_edge_cut",
    "pairwise_scores",
    "pre_cleanup",
    "run_pipeline",
    "synthesize_seeds",
    "tokenize",
    "transitive_completion",
]
