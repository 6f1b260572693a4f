"""Horoballs at ideal vertices: sizes, pieces, densities and packings.

A horoball is described by its ideal center and a parameter s in (-1, 1):
with the center normalized to time coordinate one, the horosphere is

    (s - 1) <x, x> - (1 + s) <x, a_c>^2 = 0,

and it passes through the model center exactly when s = 0.  Larger s means
a smaller horoball.  Equivalently the horoball is {x : -<x, nu> <= 1} on
the hyperboloid, with the null vector nu = a_c * sqrt((1 + s) / (1 - s)).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, Delaunay

from . import lorentz as lz
from .coxeter import IDEAL, RealizedOrthoscheme
from .volume import vol_truncated_orthoscheme


class PackingError(ValueError):
    """Raised for inadmissible or overlapping horoballs."""


@dataclass(frozen=True)
class Horoball:
    center_index: int
    s: float
    tangent_facet: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not -1.0 < self.s < 1.0:
            raise ValueError(f"s = {self.s} is outside (-1, 1)")


def _center(orth: RealizedOrthoscheme, index: int) -> np.ndarray:
    if orth.vertex_class[index] != IDEAL:
        raise PackingError(f"vertex A_{index} is {orth.vertex_class[index]}, not ideal")
    return orth.vertices[index]


def s_from_point(a_c, p) -> float:
    """Parameter of the horosphere centered at ``a_c`` through ``p``."""
    a_c = lz.normalize(a_c)
    p = lz.normalize(p)
    Q = lz.inner(p, p)
    P = lz.inner(p, a_c) ** 2
    if abs(Q - P) <= lz.TOL.alg:
        raise ValueError("point coincides with the horoball center")
    return (Q + P) / (Q - P)


def contains(a_c, s: float, p, tol: float = 0.0) -> bool:
    """Whether ``p`` lies in the closed horoball of parameter ``s`` at ``a_c``."""
    a_c = lz.normalize(a_c)
    p = lz.normalize(p)
    return (s - 1.0) * lz.inner(p, p) - (1.0 + s) * lz.inner(p, a_c) ** 2 >= -tol


def horoball_vector(a_c, s: float) -> np.ndarray:
    """Null vector nu with horoball {x on the hyperboloid : -<x, nu> <= 1}."""
    return lz.normalize(a_c) * math.sqrt((1.0 + s) / (1.0 - s))


def horoball_gap(nu1, nu2) -> float:
    """Signed distance between two horoballs given by their null vectors."""
    return math.log(-lz.inner(nu1, nu2) / 2.0)


def shrink(h: Horoball, delta: float) -> Horoball:
    """Move the horosphere ``delta`` further into its cusp (negative grows it)."""
    return Horoball(h.center_index, math.tanh(math.atanh(h.s) + delta))


def facet_constraints(orth: RealizedOrthoscheme, center_index: int) -> list[tuple[int, float]]:
    """(facet, s) of the horoball tangent to each facet not through the center.

    Facet index n+1 is the truncating facet.
    """
    a_c = _center(orth, center_index)
    out = []
    for k, f in enumerate(orth.facets):
        if orth.incident(center_index, k):
            continue
        foot = lz.project_to_hyperplane(a_c, f)
        out.append((k, s_from_point(a_c, foot)))
    if not out:
        raise PackingError("every facet passes through the center")
    return out


def max_admissible_horoball(orth: RealizedOrthoscheme, center_index: int) -> Horoball:
    """Largest horoball at an ideal vertex that crosses no facet.

    Each non-incident facet bounds s from below; the binding one is the
    facet with the largest tangency parameter.
    """
    constraints = facet_constraints(orth, center_index)
    s = max(v for _, v in constraints)
    # ties go to the lowest facet index, so an original facet wins over the truncating one
    facet = min(k for k, v in constraints if v >= s - lz.TOL.alg)
    return Horoball(center_index, s, tangent_facet=facet)


def check_admissible(orth: RealizedOrthoscheme, h: Horoball, tol: float | None = None) -> None:
    tol = lz.TOL.alg if tol is None else tol
    for facet, s in facet_constraints(orth, h.center_index):
        if h.s < s - tol:
            raise PackingError(f"horoball at A_{h.center_index} with s={h.s:.12g} crosses facet {facet}")


@dataclass(frozen=True)
class EdgePoint:
    point: np.ndarray
    lam: float
    t: float


def edge_intersection(orth: RealizedOrthoscheme, h: Horoball, target, clip: bool = True) -> EdgePoint:
    """Where the horosphere of ``h`` meets the segment from its center to ``target``.

    ``target`` is a vertex index or a point.  Along x = lam * a_c + a_i the
    horosphere equation is affine in lam, since a_c is null.  ``t`` is the
    parameter of the same point on p(t) = (1 - t) a_c + t a_i.  With
    ``clip=False`` the ray is followed past ``target`` (t > 1).
    """
    a_c = _center(orth, h.center_index)
    a_i = orth.vertices[target] if isinstance(target, (int, np.integer)) else lz.normalize(target)
    c = lz.inner(a_i, a_c)
    q = lz.inner(a_i, a_i)
    if abs(c) <= lz.TOL.alg:
        raise PackingError("target is the center itself")
    s = h.s
    lam = ((1.0 + s) * c * c - (s - 1.0) * q) / (2.0 * (s - 1.0) * c)
    if clip and lam < -lz.TOL.alg:
        raise PackingError("the horosphere does not meet the segment")
    x = lam * a_c + a_i
    if lz.classify(x) != lz.INNER:
        raise PackingError("the horosphere does not meet the ray")
    return EdgePoint(lz.normalize(x), lam, 1.0 / (1.0 + lam))


# ----------------------------------------------------------- Euclidean chart


def horosphere_chart(a_c, s: float) -> np.ndarray:
    """Linear map developing the horosphere isometrically onto R^(n-1).

    Returns an (n-1) x (n+1) matrix E; the chart coordinates of a
    hyperboloid point x on the horosphere are ``E @ J @ x``.
    """
    nu = horoball_vector(a_c, s)
    # span{nu, eta} = span{(1,0), (0, nu_space)}; its orthogonal complement
    # is the space directions orthogonal to nu_space.
    direction = nu[1:] / np.linalg.norm(nu[1:])
    basis = np.linalg.svd(np.eye(len(direction)) - np.outer(direction, direction))[0][:, :-1]
    E = np.zeros((basis.shape[1], len(nu)))
    E[:, 1:] = basis.T
    return E


def develop(a_c, s: float, points) -> np.ndarray:
    """Chart coordinates of points on the horosphere (rows)."""
    E = horosphere_chart(a_c, s)
    P = np.array([lz.hyperboloid(p) for p in points])
    J = lz.form_matrix(P.shape[1] - 1)
    return P @ J @ E.T


def cayley_menger_volume(L, m: int | None = None) -> float:
    """Volume of a Euclidean m-simplex from its edge-length matrix."""
    L = np.asarray(L, dtype=float)
    if L.shape[0] != L.shape[1]:
        raise ValueError("edge-length matrix must be square")
    if m is None:
        m = L.shape[0] - 1
    if L.shape[0] != m + 1:
        raise ValueError(f"an {m}-simplex needs {m + 1} points")
    if np.abs(L - L.T).max() > lz.TOL.alg or np.abs(np.diag(L)).max() > lz.TOL.alg:
        raise ValueError("edge lengths must be symmetric with zero diagonal")
    C = np.ones((m + 2, m + 2))
    C[0, 0] = 0.0
    C[1:, 1:] = L * L
    vol2 = (-1) ** (m + 1) * np.linalg.det(C) / (2**m * math.factorial(m) ** 2)
    scale = max(L.max() ** m, 1e-300)
    if vol2 < -lz.TOL.alg * scale**2:
        raise ValueError(f"edge lengths are not realizable (squared volume {vol2:.3e})")
    return math.sqrt(max(vol2, 0.0))


@dataclass(frozen=True)
class HorosphericalCell:
    """Footprint of a horoball piece on its horosphere.

    ``labels`` names the body vertex behind each point, e.g. ``"A0"`` or
    ``"A04"`` for a truncation point.
    """

    center_index: int
    s: float
    vertex_points: np.ndarray
    labels: tuple[str, ...]
    simplices: tuple[tuple[int, ...], ...]
    edge_lengths: np.ndarray

    def simplex_volumes(self) -> list[float]:
        return [cayley_menger_volume(self.edge_lengths[np.ix_(S, S)]) for S in self.simplices]

    @property
    def area(self) -> float:
        return float(sum(self.simplex_volumes()))


def _cell_targets(orth: RealizedOrthoscheme, c: int) -> tuple[list[np.ndarray], list[str]]:
    """Body vertices other than the center: proper/ideal vertices and truncation points."""
    n = orth.dim
    pts, labels = [], []
    for i in range(n):
        if i != c:
            pts.append(orth.vertices[i])
            labels.append(f"A{i}")
    if orth.truncation_points is not None:
        for i, p in enumerate(orth.truncation_points):
            pts.append(p)
            labels.append(f"A{i}{n}")
    return pts, labels


def horospherical_cell(orth: RealizedOrthoscheme, h: Horoball, clip: bool = True) -> HorosphericalCell:
    """Horospherical polytope cut from the horosphere by the cone over the body.

    For the center A_{n-1} the footprint has the 2(n-1) points over
    A_0..A_{n-2} and A_{0n}..A_{(n-2)n}, split into the n-1 simplices
    conv(h_{0n}..h_{kn}, h_k..h_{n-2}).  For the center A_0 the footprint is
    the single simplex over A_1..A_{n-1}, A_{0n}.  Any other center falls
    back to a Delaunay split of the developed footprint.

    ``clip=False`` allows horoballs that reach past the body's vertices, in
    which case the footprint is taken on the infinite cone.
    """
    n = orth.dim
    c = h.center_index
    trunc = orth.truncation_points
    if c == n - 1 and trunc is not None:
        targets = [orth.vertices[i] for i in range(n - 1)] + list(trunc)
        labels = [f"A{i}" for i in range(n - 1)] + [f"A{i}{n}" for i in range(n - 1)]
        m = n - 1
        simplices = tuple(tuple(range(m, m + k + 1)) + tuple(range(k, m)) for k in range(m))
    elif c == 0 and trunc is not None:
        targets = [orth.vertices[i] for i in range(1, n)] + [trunc[0]]
        labels = [f"A{i}" for i in range(1, n)] + [f"A0{n}"]
        simplices = (tuple(range(n)),)
    else:
        targets, labels = _cell_targets(orth, c)
        simplices = None

    pts = np.array([edge_intersection(orth, h, t, clip).point for t in targets])
    if simplices is None:
        chart = develop(orth.vertices[c], h.s, pts)
        hull = ConvexHull(chart)
        keep = sorted(hull.vertices)
        pts = pts[keep]
        labels = [labels[k] for k in keep]
        simplices = tuple(tuple(int(v) for v in S) for S in Delaunay(chart[keep]).simplices)

    H = np.array([lz.hyperboloid(p) for p in pts])
    diff = H[:, None, :] - H[None, :, :]
    chord2 = -diff[..., 0] ** 2 + np.einsum("ijk,ijk->ij", diff[..., 1:], diff[..., 1:])
    # sqrt(<X - Y, X - Y>) = 2 sinh(d/2) for hyperboloid points X, Y
    L = np.sqrt(np.clip(chord2, 0.0, None))
    np.fill_diagonal(L, 0.0)
    return HorosphericalCell(c, h.s, pts, tuple(labels), simplices, L)


def dissection_check(orth: RealizedOrthoscheme, h: Horoball) -> tuple[float, float]:
    """Total simplex area of the cell and the convex-hull area of the footprint.

    The hull is taken over the developed images of all body vertices other
    than the center, so agreement confirms both that the dissection tiles
    the footprint and that no other vertex sticks out of it.
    """
    cell = horospherical_cell(orth, h)
    targets, _ = _cell_targets(orth, h.center_index)
    pts = [edge_intersection(orth, h, t).point for t in targets]
    hull = ConvexHull(develop(orth.vertices[h.center_index], h.s, pts))
    return cell.area, float(hull.volume)


def horoball_piece_volume(orth: RealizedOrthoscheme, h: Horoball, clip: bool = True) -> float:
    """Volume of the horoball inside the body: footprint area / (n - 1).

    With ``clip=False`` this is the volume inside the cone from the center
    over the body, which is what the tangent-pair sliding law refers to.
    """
    return horospherical_cell(orth, h, clip).area / (orth.dim - 1)


# ---------------------------------------------------------------- packings


@dataclass(frozen=True)
class TwoHoroballResult:
    """Optimal pair of horoballs at the ends of a shared edge.

    ``t_first`` and ``t_second`` locate the two horospheres on the edge
    p(t) = (1 - t) a_first + t a_second; ``relation`` is ``"tangent"`` or
    ``"disjoint"``.
    """

    first: Horoball
    second: Horoball
    relation: str
    t_first: float
    t_second: float
    pieces: tuple[float, float]
    volume: float
    density: float
    swept: bool = False

    @property
    def total_piece_volume(self) -> float:
        return self.pieces[0] + self.pieces[1]


def _edge_t(orth, h: Horoball, other: int, from_first: bool) -> float:
    t = edge_intersection(orth, h, other).t
    return t if from_first else 1.0 - t


def check_packing(orth: RealizedOrthoscheme, horoballs, check_images: bool = False) -> None:
    """Raise :class:`PackingError` unless the horoballs form a packing.

    Each horoball must be admissible and distinct pairs must not overlap.
    With ``check_images`` the horoballs are also tested against their
    mirror images in every facet of the body.
    """
    horoballs = list(horoballs)
    tol = lz.TOL.alg
    for h in horoballs:
        check_admissible(orth, h)
    nus = [horoball_vector(orth.vertices[h.center_index], h.s) for h in horoballs]
    for (a, nu_a), (b, nu_b) in itertools.combinations(list(zip(horoballs, nus)), 2):
        if a.center_index == b.center_index:
            raise PackingError(f"two horoballs at A_{a.center_index}")
        if horoball_gap(nu_a, nu_b) < -tol:
            raise PackingError(f"horoballs at A_{a.center_index} and A_{b.center_index} overlap")
    if check_images:
        for (a, nu_a), (b, nu_b) in itertools.product(list(zip(horoballs, nus)), repeat=2):
            for k, f in enumerate(orth.facets):
                if a is b and orth.incident(a.center_index, k):
                    continue
                image = lz.reflect(nu_b, f)
                if horoball_gap(nu_a, image) < -tol:
                    raise PackingError(
                        f"horoball at A_{a.center_index} overlaps the image of A_{b.center_index} in facet {k}"
                    )


def packing_density(orth: RealizedOrthoscheme, horoballs, volume: float | None = None) -> float:
    """Sum of horoball piece volumes over the body volume."""
    horoballs = list(horoballs)
    check_packing(orth, horoballs)
    if volume is None:
        volume = vol_truncated_orthoscheme(orth.spec).value
    return sum(horoball_piece_volume(orth, h) for h in horoballs) / volume


def optimize_two_horoballs(
    orth: RealizedOrthoscheme,
    i: int,
    j: int,
    volume: float | None = None,
    check_images: bool = False,
) -> TwoHoroballResult:
    """Densest pair of horoballs at ideal vertices A_i and A_j.

    Both horoballs start maximal.  If they overlap on the edge A_iA_j, the
    tangency point is confined to the stretch of the edge where both remain
    admissible; the total piece volume is strictly convex along it, so the
    better of its two endpoints is optimal.
    """
    if i == j:
        raise PackingError("need two distinct vertices")
    _center(orth, i)
    _center(orth, j)
    if orth.truncation_points is not None and orth.dim in (i, j):
        raise PackingError("no edge of the truncated body joins these vertices")
    if volume is None:
        volume = vol_truncated_orthoscheme(orth.spec).value

    bi = max_admissible_horoball(orth, i)
    bj = max_admissible_horoball(orth, j)
    ti = _edge_t(orth, bi, j, True)
    tj = _edge_t(orth, bj, i, False)
    swept = False
    tol = 1e-9
    if ti > tj + tol:
        # Overlap: try each maximal ball with the partner shrunk to touch it.
        swept = True
        p_i = edge_intersection(orth, bi, j).point
        p_j = edge_intersection(orth, bj, i).point
        options = [
            (bi, Horoball(j, s_from_point(orth.vertices[j], p_i))),
            (Horoball(i, s_from_point(orth.vertices[i], p_j)), bj),
        ]
        scored = [
            (horoball_piece_volume(orth, a) + horoball_piece_volume(orth, b), a, b) for a, b in options
        ]
        _, bi, bj = max(scored, key=lambda x: x[0])
        ti = _edge_t(orth, bi, j, True)
        tj = _edge_t(orth, bj, i, False)

    check_packing(orth, [bi, bj], check_images=check_images)
    relation = "tangent" if abs(ti - tj) <= tol else "disjoint"
    pieces = (horoball_piece_volume(orth, bi), horoball_piece_volume(orth, bj))
    return TwoHoroballResult(bi, bj, relation, ti, tj, pieces, volume, sum(pieces) / volume, swept)


def tangent_pair_along_edge(orth: RealizedOrthoscheme, i: int, j: int, x: float, base: tuple[Horoball, Horoball]):
    """Tangent pair obtained by sliding the tangency point of ``base`` by ``x``.

    Positive ``x`` moves the point toward A_j: the horoball at A_i grows by
    ``x`` and the one at A_j shrinks by ``x``.
    """
    bi, bj = base
    return shrink(bi, -x), shrink(bj, x)


# -------------------------------------------------------------------- mesh


def horosphere_mesh(orth: RealizedOrthoscheme, center_index: int, s: float, resolution: int) -> np.ndarray:
    """Points of a horosphere from its spherical parameterization.

    With the center at e_n the horosphere is the ellipsoid

        h_1       = r sin t1 sin t2 ... sin t_{n-1}
        h_2       = r sin t1 sin t2 ... cos t_{n-1}
        ...
        h_{n-1}   = r sin t1 cos t2
        h_n       = (1 + s)/2 + (1 - s)/2 cos t1,     r = sqrt((1 - s)/2),

    with t1..t_{n-2} in [0, pi] and t_{n-1} in [0, 2 pi).  The points are
    rotated about the model center onto the actual ideal vertex.  Returns
    ``resolution**(n-1)`` rows of model coordinates with time coordinate one.
    """
    if int(resolution) != resolution or resolution < 2:
        raise ValueError("resolution must be an integer >= 2")
    if not -1.0 < s < 1.0:
        raise ValueError("s must lie strictly between -1 and 1")
    a_c = _center(orth, center_index)
    n = orth.dim
    polar_angles = np.linspace(0.0, math.pi, resolution)
    azimuth = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    grids = np.meshgrid(*([polar_angles] * (n - 2) + [azimuth]), indexing="ij")
    t = [g.ravel() for g in grids]
    r = math.sqrt((1.0 - s) / 2.0)

    h = np.zeros((t[0].size, n))
    h[:, n - 1] = (1.0 + s) / 2.0 + (1.0 - s) / 2.0 * np.cos(t[0])
    sines = r * np.sin(t[0])
    # h_{n-1} .. h_2 pick up a cosine of the next angle, h_1 the last sine
    for k in range(1, n - 1):
        h[:, n - 1 - k] = sines * np.cos(t[k])
        sines = sines * np.sin(t[k])
    h[:, 0] = sines

    target = a_c[1:] / np.linalg.norm(a_c[1:])
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    v = e_n - target
    if np.linalg.norm(v) > 1e-12:
        v /= np.linalg.norm(v)
        h = h - 2.0 * np.outer(h @ v, v)
    return np.hstack([np.ones((h.shape[0], 1)), h])
