"""Toolkit for the three equivalent trace-positivity statements of the BMV conjecture.

Computes the coefficients of Tr (A + x B)^p by three independent engines,
verifies the derivative identity coupling inverse powers to those
coefficients, probes complete monotonicity of Tr exp(A - x B) and
Tr (A + x B)^-p, and searches for (and exactly certifies) negative trace
monomials.
"""

from ._kernels import BACKEND as kernel_backend
from .matcore import (
    HermitianMatrix,
    Spectrum,
    diagonal,
    dual_pair,
    eigh,
    hermitian,
    identity,
    matfn,
    random_hermitian,
    random_pd,
    random_psd,
)
from .rng import Stream
from .tracepoly import TracePolynomial, coeff_gradient, derivative_at_zero, trace_poly
from .words import (
    BinaryWord,
    NecklaceClass,
    coeff_bruteforce,
    coeff_by_necklaces,
    enumerate_words,
    min_term,
    necklaces,
    word_trace,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryWord",
    "HermitianMatrix",
    "NecklaceClass",
    "Spectrum",
    "Stream",
    "TracePolynomial",
    "coeff_bruteforce",
    "coeff_by_necklaces",
    "coeff_gradient",
    "derivative_at_zero",
    "diagonal",
    "dual_pair",
    "eigh",
    "enumerate_words",
    "hermitian",
    "identity",
    "kernel_backend",
    "matfn",
    "min_term",
    "necklaces",
    "random_hermitian",
    "random_pd",
    "random_psd",
    "trace_poly",
    "word_trace",
    "__version__",
]
