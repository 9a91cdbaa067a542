"""Free resolvent kernels, regularised spectral integrals and oscillating-potential experiments."""

__version__ = "0.1.0"
