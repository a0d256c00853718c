"""Computational toolkit for the S3-symmetric tridiagonal algebra acting on V⊗3
of a Q-polynomial distance-regular graph."""

__version__ = "0.1.0"

from .graphs import Graph, NotDistanceRegular, build_complete, build_hamming, build_named, resolve_graph  # noqa: E402
from .spectral import NotQPolynomial, SpectralData, spectral_data  # noqa: E402
from .tensor3 import TensorVector  # noqa: E402

__all__ = [
    "Graph",
    "NotDistanceRegular",
    "NotQPolynomial",
    "SpectralData",
    "TensorVector",
    "build_complete",
    "build_hamming",
    "build_named",
    "resolve_graph",
    "spectral_data",
]
