"""Pulse-level quantum Fourier models.

Builds data-reuploading circuits over a {RX, RY, RZ, CZ} basis, realises
trainable gates through an effective pulse-area model, trains them against
Fourier-series targets in gate / decomposed / pulse modes, and computes the
spectral and geometric diagnostics of the pulse extension (coefficient
variances, Jacobian ranks, FCC, expressibility, state distortion).
"""

from .kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
