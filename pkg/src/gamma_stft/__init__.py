"""Time-frequency certification toolkit for Laplace transformable distributions.

Supporting functions of convex bodies, exponential weight systems and their
structural conditions, the short-time Fourier transform on a symbolic testbed
of distributions, and numerical checks of explicit seminorm estimates.
"""

__version__ = "0.1.0"

SCHEMA = "gamma-stft/1"
