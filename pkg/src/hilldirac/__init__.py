"""Band/gap spectral geometry of periodic Hill and Dirac operators."""

__version__ = "0.1.0"
