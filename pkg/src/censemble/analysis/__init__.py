"""Downstream statistics on corpus matrices."""

from .importance import Importance, feature_importance, logistic_t
from .knn import cosine_knn, cosine_similarities, same_artist_as, vector_arith
from .lda import (ClassificationResult, LDAModel, StepwiseRow, classify, lda_fit,
                  lda_fit_arrays, lda_predict, stepwise_accuracy)
from .pca import PCAModel, pca_fit, pca_project, pca_reconstruct
from .regression import LinRegModel, RegressionReport, linreg_fit, linreg_fit_eval
from .temporal import TemporalProfile, loess, neighbor_offsets, smooth_residuals, temporal_resemblance
from .trend import QUANTILES, TrendRow, rolling_trend

__all__ = [
    "ClassificationResult", "Importance", "LDAModel", "LinRegModel", "PCAModel",
    "QUANTILES", "RegressionReport", "StepwiseRow", "TemporalProfile", "TrendRow",
    "classify", "cosine_knn", "cosine_similarities", "feature_importance",
    "lda_fit", "lda_fit_arrays", "lda_predict", "linreg_fit", "linreg_fit_eval",
    "loess", "logistic_t", "neighbor_offsets", "pca_fit", "pca_project",
    "pca_reconstruct", "rolling_trend", "same_artist_as", "smooth_residuals",
    "stepwise_accuracy", "temporal_resemblance", "vector_arith",
]
