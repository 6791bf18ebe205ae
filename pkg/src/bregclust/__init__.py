"""Bregman power k-means, KNN-gravity dataset improvement and the guarded
parameter search that couples them."""

__version__ = "0.1.0"

from .baselines import PeakConfig, agglomerative, density_peak
from .clustering import ClusterConfig, ClusterResult, CentroidSet, fit
from .data import DataMatrix, GeneratorSpec, PreprocessSpec, generate, load_csv, preprocess, write_csv
from .divergence import DivergenceFamily, bregman, grad_phi, phi
from .gravity import GravityConfig, improve, knn
from .metrics import ari, nmi
from .power_mean import PowerMeanConfig, mm_weights, power_mean, power_mean_grad
from .search import SearchGrid, search

__all__ = [
    "CentroidSet", "ClusterConfig", "ClusterResult", "DataMatrix", "DivergenceFamily",
    "GeneratorSpec", "GravityConfig", "PeakConfig", "PowerMeanConfig", "PreprocessSpec",
    "SearchGrid", "agglomerative", "ari", "bregman", "density_peak", "fit", "generate",
    "grad_phi", "improve", "knn", "load_csv", "mm_weights", "nmi", "phi", "power_mean",
    "power_mean_grad", "preprocess", "search", "write_csv",
]
