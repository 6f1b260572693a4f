"""Largest ball inscribed in a truncated orthoscheme."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb, gamma

from . import lorentz as lz
from .coxeter import RealizedOrthoscheme
from .volume import vol_truncated_orthoscheme

TYPE1 = "type1_complete"
TYPE2 = "type2_truncation_bound"


class InballError(RuntimeError):
    """Raised when the algebraic and geometric descriptions disagree."""


@dataclass(frozen=True)
class InballResult:
    """Inscribed ball: center with time coordinate one, radius and tangencies.

    Facet indices follow :attr:`RealizedOrthoscheme.facets`, so index n+1 is
    the truncating facet.
    """

    center: np.ndarray
    radius: float
    touched_faces: tuple[int, ...]
    type: str
    criterion: float | None = None

    @property
    def sinh_radius(self) -> float:
        return math.sinh(self.radius)


def cofactors(gram: np.ndarray) -> np.ndarray:
    """Matrix of signed cofactors cof_ij of the Gram matrix."""
    return np.linalg.det(gram) * np.linalg.inv(gram).T


def inball_exists(gram: np.ndarray) -> bool:
    """Whether the complete orthoscheme has an inscribed ball of finite radius."""
    return bool(cofactors(gram).sum() > 0)


def inradius_complete(gram: np.ndarray) -> float:
    """r = asinh sqrt(-1 / sum_ij a_ij) with (a_ij) the inverse Gram matrix."""
    total = np.linalg.inv(gram).sum()
    if total >= 0:
        raise InballError("inverse Gram entries sum to a non-negative value: no finite inball")
    return math.asinh(math.sqrt(-1.0 / total))


def truncation_criterion(gram: np.ndarray, index: int) -> float:
    """sum_j cof_ij / (det * cof_ii) for an ultra-ideal vertex ``index``.

    A value of at least one means the complete inball stays clear of the
    polar hyperplane of that vertex.
    """
    cof = cofactors(gram)
    denom = np.linalg.det(gram) * cof[index, index]
    if abs(denom) <= lz.TOL.alg:
        raise InballError(f"vanishing cofactor denominator at vertex {index}")
    return float(cof[index].sum() / denom)


def truncation_preserves_inradius(gram: np.ndarray, ultra_indices) -> bool:
    ultra_indices = list(ultra_indices)
    if not ultra_indices:
        raise ValueError("no ultra-ideal vertex given")
    return all(truncation_criterion(gram, i) >= 1.0 for i in ultra_indices)


def _equidistant_point(forms: np.ndarray) -> np.ndarray | None:
    """Point c with <c, f> = 1 for each row f, or None if it is not inner."""
    J = lz.form_matrix(forms.shape[1] - 1)
    try:
        c = np.linalg.solve(forms @ J, np.ones(forms.shape[0]))
    except np.linalg.LinAlgError:
        return None
    if c[0] <= 0 or lz.inner(c, c) >= 0:
        return None
    return c


def _result(orth, c: np.ndarray, kind: str, criterion) -> InballResult:
    # with <c, f> = 1 on the touched facets, sinh r = 1 / sqrt(-<c, c>)
    scale = math.sqrt(-lz.inner(c, c))
    radius = math.asinh(1.0 / scale)
    touched = tuple(k for k, f in enumerate(orth.facets) if abs(lz.inner(c, f) - 1.0) <= 1e-9 * max(1.0, scale))
    return InballResult(lz.normalize(c), radius, touched, kind, criterion)


def _clearance(orth, c: np.ndarray) -> float:
    """min_f <c, f> with c scaled so that touched facets give one."""
    return min(lz.inner(c, f) for f in orth.facets)


def inball_truncated(orth: RealizedOrthoscheme) -> InballResult:
    """Inscribed ball of the truncated body.

    When the criterion says the truncation does not reach the inball of the
    complete orthoscheme, that ball is returned.  Otherwise every tangency
    pattern made of the truncating facet and all but one original facet is
    solved, and the largest candidate that fits inside the body wins.
    """
    n = orth.dim
    G = orth.gram
    if not inball_exists(G):
        raise InballError("the complete orthoscheme has no inscribed ball")
    c_full = np.linalg.solve(orth.normals @ lz.form_matrix(n), np.ones(n + 1))

    if orth.polar_form is None:
        return _result(orth, c_full, TYPE1, None)

    crit = truncation_criterion(G, n)
    # geometric side of the same question: is the truncating facet at least as far as the others?
    clears = lz.inner(c_full, -orth.polar_form) >= 1.0 - 1e-9
    if (crit >= 1.0) != clears:
        raise InballError(
            f"criterion {crit:.12g} and geometric clearance disagree for {orth.spec.symbol}"
        )
    if crit >= 1.0:
        r = _result(orth, c_full, TYPE1, crit)
        if abs(r.radius - inradius_complete(G)) > lz.TOL.alg:
            raise InballError("equal-distance solve disagrees with the closed-form inradius")
        return r

    trunc = -orth.polar_form
    best = None
    for drop in range(n + 1):
        forms = np.array([orth.normals[k] for k in range(n + 1) if k != drop] + [trunc])
        c = _equidistant_point(forms)
        if c is None or _clearance(orth, c) < 1.0 - 1e-9:
            continue
        cand = _result(orth, c, TYPE2, crit)
        if best is None or cand.radius > best.radius:
            best = cand
    if best is None:
        raise InballError(f"no feasible tangency pattern for {orth.spec.symbol}")
    return best


def facet_distances(orth: RealizedOrthoscheme, center) -> list[float]:
    """Signed distances from ``center`` to every facet of the truncated body."""
    return [lz.signed_offset(center, f) for f in orth.facets]


# ------------------------------------------------------------------ volume


def sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / float(gamma(n / 2.0))


def sinh_power_integral(m: int, r: float) -> float:
    """Integral of sinh(t)**m over [0, r], evaluated without cancellation."""
    if m % 2:
        # sinh^(2k+1) dt = (u(u+2))^k du with u = cosh t - 1 = 2 sinh^2(t/2)
        k = m // 2
        U = 2.0 * math.sinh(r / 2.0) ** 2
        return float(sum(comb(k, j, exact=True) * 2 ** (k - j) * U ** (k + j + 1) / (k + j + 1) for j in range(k + 1)))
    if r >= 1.0:
        total = 0.0
        for j in range(m + 1):
            rate = m - 2 * j
            piece = r if rate == 0 else math.expm1(rate * r) / rate
            total += (-1) ** j * comb(m, j, exact=True) * piece
        return total / 2.0**m
    # Taylor series: every coefficient of sinh^m is non-negative
    total, k = 0.0, m
    while True:
        c = sum((-1) ** j * comb(m, j, exact=True) * (m - 2 * j) ** k for j in range(m + 1))
        term = c / 2.0**m * r ** (k + 1) / math.factorial(k + 1)
        total += term
        if term < 1e-18 * total:
            return total
        k += 2


def ball_volume(r: float, n: int) -> float:
    """Volume of a hyperbolic n-ball of radius r."""
    if r <= 0:
        raise ValueError("radius must be positive")
    return sphere_area(n) * sinh_power_integral(n - 1, r)


def ball_density(orth: RealizedOrthoscheme, inball: InballResult | None = None, volume: float | None = None) -> float:
    """Inball volume over the body volume."""
    if inball is None:
        inball = inball_truncated(orth)
    if volume is None:
        volume = vol_truncated_orthoscheme(orth.spec).value
    return ball_volume(inball.radius, orth.dim) / volume
