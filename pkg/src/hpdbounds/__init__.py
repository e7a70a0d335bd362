"""Intrinsic and Euclidean Bayesian Cramér-Rao bounds for covariance estimation.

Gaussian samples, inverse-Wishart prior, SCM/MAP/MMSE estimators and Monte
Carlo sweeps on the manifold of Hermitian positive definite matrices.
"""
from .bounds import (
    BoundReport,
    FisherMatrix,
    bcrb_euclidean,
    bcrb_euclidean_asymptotic,
    bicrb_affine_invariant,
    crb_euclidean_deterministic,
    fprior_affine_invariant,
    fprior_euclidean_iw,
    icrb_ai_asymptotic,
)
from .distributions import GaussianModel, InverseWishartPrior, RngStream
from .estimators import map_iw, mmse_iw, scm
from .experiments import DEFAULT_N_GRID, ExperimentConfig, SummaryRow, run_sweep, toeplitz_center
from .manifold import dist_affine_invariant, dist_euclidean

__version__ = "0.1.0"
