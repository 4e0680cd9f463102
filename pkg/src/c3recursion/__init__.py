"""Exact Eynard-Orantin topological recursion on the framed mirror curve of C^3."""

__version__ = "1.0.0"

from .curve import MirrorCurveC3, build_curve, default_order  # noqa: E402
from .exactmath import Framing, RatFunc, bernoulli, faber_pandharipande  # noqa: E402
from .recursion import (  # noqa: E402
    CorrelatorTensor,
    FreeEnergy,
    HodgeCoefficientTable,
    compute_correlator,
    decompose_in_zeta_basis,
    free_energy,
    solve_correlator,
    solve_free_energy,
    solve_hodge_table,
)
from .series import TruncatedSeries  # noqa: E402

__all__ = [
    "__version__",
    "CorrelatorTensor",
    "Framing",
    "FreeEnergy",
    "HodgeCoefficientTable",
    "MirrorCurveC3",
    "RatFunc",
    "TruncatedSeries",
    "bernoulli",
    "build_curve",
    "compute_correlator",
    "decompose_in_zeta_basis",
    "default_order",
    "faber_pandharipande",
    "free_energy",
    "solve_correlator",
    "solve_free_energy",
    "solve_hodge_table",
]
