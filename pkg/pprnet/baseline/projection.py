import logging

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.decomposition import PCA
from sklearn.feature_selection import VarianceThreshold
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import StandardScaler

log = logging.getLogger(__name__)


class PcaProjector(BaseEstimator, TransformerMixin):
    """Drops zero-variance columns, standardizes and projects onto principal axes.

    Parameters
    ----------
    n_components: int (default=12)
        Dimension of the projection. Reduced (with a warning) when fewer
        informative columns or samples are available.
    standardize: bool (default=True)
        Scale columns to unit variance before the projection.
    """

    def __init__(self, n_components: int = 12, standardize: bool = True):
        self.n_components = n_components
        self.standardize = standardize

    def fit(self, x, y=None):
        x = np.asarray(x, dtype=np.float64)
        if not (x.var(axis=0) > 0).any():
            raise ValueError("Every feature column is constant, nothing to project.")
        selector = VarianceThreshold(threshold=0.0).fit(x)
        kept = selector.get_support()
        if not kept.all():
            log.info(f"Dropping zero-variance feature columns {np.flatnonzero(~kept)}.")
        n_components = min(self.n_components, int(kept.sum()), len(x))
        if n_components < self.n_components:
            log.warning(
                f"Projecting to {n_components} instead of {self.n_components} "
                "components, the training data has too few columns or rows."
            )
        steps = [("variance", selector)]
        if self.standardize:
            steps.append(("scale", StandardScaler()))
        steps.append(("pca", PCA(n_components=n_components, svd_solver="full")))
        self.pipeline_ = Pipeline(steps)
        self.pipeline_.fit(x)
        self.dropped_columns_ = np.flatnonzero(~kept)
        return self

    @property
    def components_(self) -> np.ndarray:
        return self.pipeline_.named_steps["pca"].components_

    @property
    def explained_variance_ratio_(self) -> np.ndarray:
        return self.pipeline_.named_steps["pca"].explained_variance_ratio_

    def transform(self, x) -> np.ndarray:
        return self.pipeline_.transform(np.asarray(x, dtype=np.float64))

    def inverse_transform(self, z) -> np.ndarray:
        """Back-projection into the space of the kept columns."""
        steps = self.pipeline_.steps[1:]
        return Pipeline(steps).inverse_transform(z)


def fit_pca(features: np.ndarray, n_components: int = 12) -> PcaProjector:
    """Fit a projector on training-fold features only."""
    return PcaProjector(n_components).fit(features)
