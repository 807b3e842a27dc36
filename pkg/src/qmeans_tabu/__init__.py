"""K-Means clustering by tabu search over quantized means, with Lloyd baselines."""

from .dataset import Dataset, load_csv, load_dataset, normalize, synth_gaussian_mixture
from .lloyd import ClusteringResult, LloydConfig, init_kmeanspp, init_random, kmeans, lloyd_run
from .objective import Assignment, CenterSet, assign, centroids, icss
from .qmts import QmtsConfig, TabuList, delta_j, qmts_run, refine

__all__ = [
    "Assignment", "CenterSet", "ClusteringResult", "Dataset", "LloydConfig", "QmtsConfig",
    "TabuList", "assign", "centroids", "delta_j", "icss", "init_kmeanspp", "init_random",
    "kmeans", "lloyd_run", "load_csv", "load_dataset", "normalize", "qmts_run", "refine",
    "synth_gaussian_mixture",
]
