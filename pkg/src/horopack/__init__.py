"""Ball and horoball packings of truncated hyperbolic Coxeter orthoschemes.

Submodules: ``lorentz`` (projective model primitives), ``coxeter`` (Gram
matrices and realizations), ``volume``, ``inball``, ``horoball``, ``report``
and ``cli``.
"""

from .coxeter import CATALOG, OrthoschemeSpec, RealizedOrthoscheme, SymbolError, catalog, parse_symbol, realize
from .horoball import Horoball, PackingError, horoball_piece_volume, max_admissible_horoball, optimize_two_horoballs
from .inball import InballResult, ball_density, ball_volume, inball_truncated
from .report import run_case
from .volume import VolumeResult, mc_volume, vol_truncated_orthoscheme

__all__ = [
    "CATALOG",
    "Horoball",
    "InballResult",
    "OrthoschemeSpec",
    "PackingError",
    "RealizedOrthoscheme",
    "SymbolError",
    "VolumeResult",
    "ball_density",
    "ball_volume",
    "catalog",
    "horoball_piece_volume",
    "inball_truncated",
    "max_admissible_horoball",
    "mc_volume",
    "optimize_two_horoballs",
    "parse_symbol",
    "realize",
    "run_case",
    "vol_truncated_orthoscheme",
]
