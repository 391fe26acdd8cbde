"""MADD-based clustering for high-dimension, low-sample-size data."""

from .clustering import (
    ClusterAssignment,
    Dendrogram,
    KMeansConfig,
    SpectralConfig,
    agglomerate,
    cut,
    hierarchical,
    kmeans_euclid,
    kmeans_madd,
    spectral,
)
from .datagen import SCENARIOS, ScenarioSpec, sample_scenario, true_k
from .dissimilarity import (
    RHO0,
    RHO1,
    RHO2,
    DissimilarityMatrix,
    TransformSpec,
    base_distance,
    base_distance_matrix,
    euclidean_matrix,
    madd_cross,
    madd_matrix,
)
from .evaluation import rand_index
from .harness import ExperimentConfig, run_experiment
from .io import ingest_csv, write_csv
from .methods import Method
from .selection import estimate_k

__version__ = "0.1.0"

__all__ = [
    "RHO0", "RHO1", "RHO2", "SCENARIOS",
    "ClusterAssignment", "Dendrogram", "DissimilarityMatrix", "ExperimentConfig", "KMeansConfig",
    "Method", "ScenarioSpec", "SpectralConfig", "TransformSpec",
    "agglomerate", "base_distance", "base_distance_matrix", "cut", "estimate_k", "euclidean_matrix",
    "hierarchical", "ingest_csv", "kmeans_euclid", "kmeans_madd", "madd_cross", "madd_matrix",
    "rand_index", "run_experiment", "sample_scenario", "spectral", "true_k", "write_csv",
]
