from .assignment import ClusterAssignment
from .hierarchical import LINKAGES, Dendrogram, agglomerate, cut, cut_all, hierarchical
from .kmeans import KMeansConfig, kmeans_euclid, kmeans_madd, objective_phi_star
from .spectral import SpectralConfig, median_sigma, rbf_similarity, spectral

__all__ = [
    "ClusterAssignment",
    "Dendrogram",
    "KMeansConfig",
    "LINKAGES",
    "SpectralConfig",
    "agglomerate",
    "cut",
    "cut_all",
    "hierarchical",
    "kmeans_euclid",
    "kmeans_madd",
    "median_sigma",
    "objective_phi_star",
    "rbf_similarity",
    "spectral",
]
