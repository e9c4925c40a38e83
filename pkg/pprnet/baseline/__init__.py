""" Feature-based comparator: handcrafted features, PCA and a dense network. """
from .dense import DenseNetClassifier, train_dense
from .features import FeatureExtractor, extract_features
from .projection import PcaProjector, fit_pca

__all__ = [
    "DenseNetClassifier",
    "train_dense",
    "FeatureExtractor",
    "extract_features",
    "PcaProjector",
    "fit_pca",
]
