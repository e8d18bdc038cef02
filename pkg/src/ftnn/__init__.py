"""Low-rank tensor completion and tensor robust PCA under a framelet-transformed
tensor nuclear norm, solved by ADMM."""

from ftnn.estimators import FTNNCompletion, FTNNRobustPCA
from ftnn.framelet import FrameletSystem, FrameletTransform, build_system
from ftnn.solvers import SolveReport, SolverConfig, complete, ftnn, rpca
from ftnn.tensor import Mask

__version__ = "0.1.0"

__all__ = [
    "FTNNCompletion",
    "FTNNRobustPCA",
    "FrameletSystem",
    "FrameletTransform",
    "Mask",
    "SolveReport",
    "SolverConfig",
    "build_system",
    "complete",
    "ftnn",
    "rpca",
]
