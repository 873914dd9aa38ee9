"""kronlab: Kronecker sets, spectral measures and Gaussian flows at desk scale."""

__version__ = "0.1.0"
