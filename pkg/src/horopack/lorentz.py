"""Lorentzian linear algebra and Klein-model primitives.

Vectors are plain 1-d numpy arrays of length n+1 with the time-like
coordinate first.  The bilinear form has signature (-, +, ..., +) and the
sectional curvature is fixed to -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INNER = "inner"
IDEAL = "ideal"
OUTER = "outer"


@dataclass
class Tolerances:
    """Global tolerances for algebraic identities and sign classification."""

    alg: float = 1e-9
    cls: float = 1e-9


TOL = Tolerances()


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError(f"expected a 1-d vector of length >= 2, got shape {v.shape}")
    return v


def form_matrix(n: int) -> np.ndarray:
    """Diagonal matrix of the Lorentz form on R^{n+1}."""
    J = np.eye(n + 1)
    J[0, 0] = -1.0
    return J


def inner(x, y) -> float:
    """Lorentz product -x0*y0 + sum_i xi*yi."""
    x = as_vector(x)
    y = as_vector(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    return float(-x[0] * y[0] + x[1:] @ y[1:])


def gram_of(rows) -> np.ndarray:
    """Matrix of pairwise Lorentz products of the rows of ``rows``."""
    R = np.asarray(rows, dtype=float)
    return R @ form_matrix(R.shape[1] - 1) @ R.T


def classify(x, tol: float | None = None) -> str:
    """Return ``"inner"``, ``"ideal"`` or ``"outer"`` for a projective point.

    The norm is taken after scaling so that the largest coordinate has
    magnitude one, so the test does not depend on the representative.
    """
    x = as_vector(x)
    tol = TOL.cls if tol is None else tol
    scale = np.abs(x).max()
    if scale == 0:
        raise ValueError("the zero vector is not a projective point")
    q = inner(x / scale, x / scale)
    if q < -tol:
        return INNER
    if q > tol:
        return OUTER
    return IDEAL


def normalize(x, tol: float | None = None) -> np.ndarray:
    """Scale ``x`` so that its time-like coordinate equals one.

    Vectors with vanishing time coordinate (points at infinity of the affine
    chart, and most hyperplane forms) are returned unchanged.
    """
    x = as_vector(x)
    tol = TOL.alg if tol is None else tol
    if abs(x[0]) > tol:
        return x / x[0]
    if not np.any(x):
        raise ValueError("the zero vector is not a projective point")
    return x.copy()


def klein(x) -> np.ndarray:
    """Affine Klein-model coordinates y_i = x_i / x_0."""
    x = as_vector(x)
    if x[0] == 0:
        raise ValueError("point at infinity of the affine chart")
    return x[1:] / x[0]


def hyperboloid(x) -> np.ndarray:
    """Representative of an inner point with <x,x> = -1 and x0 > 0."""
    x = as_vector(x)
    q = inner(x, x)
    if q >= 0:
        raise ValueError("not an inner point")
    x = x / math.sqrt(-q)
    return x if x[0] > 0 else -x


def _require_inner(x, name: str) -> None:
    if classify(x) != INNER:
        raise ValueError(f"{name} is not an inner point")


def distance(x, y) -> float:
    """Hyperbolic distance between two inner points.

    Evaluated as 2 asinh(|X - Y| / 2) on hyperboloid representatives, which
    equals acosh(-<x,y> / sqrt(<x,x><y,y>)) but keeps full precision for
    nearby points.
    """
    _require_inner(x, "x")
    _require_inner(y, "y")
    X, Y = hyperboloid(x), hyperboloid(y)
    c = -inner(X, Y)
    if c < 1 - TOL.alg:
        raise ValueError(f"acosh argument {c} < 1")
    D = X - Y
    chord2 = max(inner(D, D), 0.0)
    return 2.0 * math.asinh(math.sqrt(chord2) / 2.0)


def horocyclic_length(d: float) -> float:
    """Intrinsic length 2 sinh(d/2) of the horocyclic arc over a chord d."""
    return 2.0 * math.sinh(d / 2.0)


def project_to_hyperplane(x, u) -> np.ndarray:
    """Foot of ``x`` on the hyperplane ``{y : <y,u> = 0}``."""
    x = as_vector(x)
    u = as_vector(u)
    uu = inner(u, u)
    if abs(uu) <= TOL.alg:
        raise ValueError("light-like form has no orthogonal projection")
    return x - (inner(x, u) / uu) * u


def polar(x) -> np.ndarray:
    """Unit form of the polar hyperplane of an outer point."""
    x = as_vector(x)
    q = inner(x, x)
    if q <= TOL.cls:
        raise ValueError("polar hyperplane requires an outer point")
    return x / math.sqrt(q)


def distance_to_hyperplane(x, u) -> float:
    """Distance from an inner point to the hyperplane of a space-like form.

    sinh d = |<x,u>| / sqrt(-<x,x>) for unit ``u``.
    """
    _require_inner(x, "x")
    u = as_vector(u)
    uu = inner(u, u)
    if uu <= TOL.alg:
        raise ValueError("hyperplane form must be space-like")
    x = as_vector(x)
    return math.asinh(abs(inner(x, u)) / math.sqrt(-inner(x, x) * uu))


def signed_offset(x, u) -> float:
    """Signed version of :func:`distance_to_hyperplane`, positive where <x,u> > 0."""
    x = as_vector(x)
    u = as_vector(u)
    return math.asinh(inner(x, u) / math.sqrt(-inner(x, x) * inner(u, u)))


def reflect(x, u) -> np.ndarray:
    """Reflection of ``x`` in the hyperplane of the space-like form ``u``."""
    x = as_vector(x)
    u = as_vector(u)
    return x - 2.0 * inner(x, u) / inner(u, u) * u


def is_lorentz_map(L, tol: float | None = None) -> bool:
    """True when ``L`` preserves the Lorentz form."""
    L = np.asarray(L, dtype=float)
    J = form_matrix(L.shape[0] - 1)
    tol = TOL.alg if tol is None else tol
    return bool(np.abs(L.T @ J @ L - J).max() < tol)
