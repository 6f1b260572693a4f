"""Schläfli symbols, Gram matrices and realized truncated orthoschemes."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import lorentz as lz

PROPER = "proper"
IDEAL = "ideal"
ULTRA_IDEAL = "ultra_ideal"

_INF_TOKENS = {"inf", "∞", "infinity", "oo"}


class SymbolError(ValueError):
    """Raised for unparsable, invalid or non-catalog symbols."""


@dataclass(frozen=True)
class OrthoschemeSpec:
    """A Coxeter orthoscheme given by its finite Schläfli weights.

    ``parallel`` records the trailing infinity mark: the polar hyperplane
    of the last vertex truncates the simplex and is parallel to the last
    facet.
    """

    weights: tuple[int, ...]
    parallel: bool = True

    def __post_init__(self):
        if not self.weights:
            raise SymbolError("empty symbol")
        for w in self.weights:
            if int(w) != w or w < 2:
                raise SymbolError(f"weight {w!r} must be an integer >= 2")
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def symbol(self) -> str:
        parts = [str(w) for w in self.weights] + (["inf"] if self.parallel else [])
        return "{" + ",".join(parts) + "}"

    def __str__(self) -> str:
        return self.symbol


CATALOG: tuple[OrthoschemeSpec, ...] = tuple(
    OrthoschemeSpec(w)
    for w in [
        (4, 4, 3, 3),
        (4, 4, 3, 4),
        (6, 3, 3, 3),
        (6, 3, 3, 4),
        (6, 3, 3, 5),
        (6, 3, 4, 3),
        (4, 3, 4, 3, 3),
        (3, 4, 3, 3, 3, 3),
        (3, 4, 3, 3, 3, 4),
    ]
)


def catalog(dim: int | None = None) -> list[OrthoschemeSpec]:
    return [s for s in CATALOG if dim is None or s.dim == dim]


def parse_symbol(text: str | OrthoschemeSpec, strict: bool = True) -> OrthoschemeSpec:
    """Parse ``"{4,4,3,4,inf}"`` or ``"4 4 3 4 inf"`` into a spec.

    In strict mode only the nine catalog symbols are accepted.
    """
    if isinstance(text, OrthoschemeSpec):
        spec = text
    else:
        tokens = [t for t in re.split(r"[\s,{}()\[\]]+", str(text).strip()) if t]
        if not tokens:
            raise SymbolError(f"cannot parse symbol {text!r}")
        parallel = tokens[-1].lower() in _INF_TOKENS
        if parallel:
            tokens = tokens[:-1]
        weights = []
        for t in tokens:
            if t.lower() in _INF_TOKENS:
                raise SymbolError("the infinity mark may only close the symbol")
            try:
                weights.append(int(t))
            except ValueError:
                raise SymbolError(f"bad weight {t!r} in {text!r}") from None
        spec = OrthoschemeSpec(tuple(weights), parallel)
    if strict and spec not in CATALOG:
        raise SymbolError(
            f"{spec.symbol} is not in the catalog; use permissive mode for other symbols"
        )
    return spec


def gram_from_symbol(spec: OrthoschemeSpec | tuple) -> np.ndarray:
    """Gram matrix of the complete orthoscheme: unit diagonal, -cos(pi/v) beside it."""
    weights = spec.weights if isinstance(spec, OrthoschemeSpec) else tuple(spec)
    for w in weights:
        if w < 2:
            raise SymbolError(f"weight {w} < 2")
    n = len(weights)
    G = np.eye(n + 1)
    for i, w in enumerate(weights):
        G[i, i + 1] = G[i + 1, i] = -math.cos(math.pi / w)
    return G


def signature(gram: np.ndarray, tol: float | None = None) -> tuple[int, int, int]:
    """Counts of (positive, negative, zero) eigenvalues."""
    tol = lz.TOL.cls if tol is None else tol
    ev = np.linalg.eigvalsh(gram)
    return int((ev > tol).sum()), int((ev < -tol).sum()), int((np.abs(ev) <= tol).sum())


def check_signature(gram: np.ndarray) -> None:
    pos, neg, zero = signature(gram)
    if zero:
        raise SymbolError("singular Gram matrix: parabolic (Euclidean) or degenerate symbol")
    if neg != 1:
        raise SymbolError(f"Gram matrix has signature ({pos},{neg}), expected ({gram.shape[0] - 1},1)")


def invert_and_classify(gram: np.ndarray) -> tuple[np.ndarray, tuple[str, ...]]:
    """Inverse Gram matrix and the class of each vertex from its diagonal."""
    if abs(np.linalg.det(gram)) < lz.TOL.cls:
        raise SymbolError("singular Gram matrix: parabolic (Euclidean) or degenerate symbol")
    inv = np.linalg.inv(gram)
    classes = []
    for a in np.diag(inv):
        if abs(a) < lz.TOL.cls:
            classes.append(IDEAL)
        elif a > 0:
            classes.append(ULTRA_IDEAL)
        else:
            classes.append(PROPER)
    return inv, tuple(classes)


def parabolicity_values(weights) -> tuple[float, float]:
    """The two sums that equal one when the first or last vertex is ideal.

    For a 5-dimensional chain v1..v5 these are
    cos²(π/v3)/sin²(π/v2) + cos²(π/v4)/sin²(π/v5) (first vertex) and
    cos²(π/v2)/sin²(π/v1) + cos²(π/v3)/sin²(π/v4) (last vertex).
    """
    v = list(weights)
    if len(v) != 5:
        raise ValueError("parabolicity identities are stated for 5-dimensional chains")
    c = [math.cos(math.pi / w) ** 2 for w in v]
    s = [math.sin(math.pi / w) ** 2 for w in v]
    first = c[2] / s[1] + c[3] / s[4]
    last = c[1] / s[0] + c[2] / s[3]
    return first, last


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RealizedOrthoscheme:
    """Normals, vertices and truncation data of a realized orthoscheme.

    Rows of ``normals`` are the unit facet forms b^i, oriented so that the
    body is ``{x : <x, b^i> >= 0}``.  Rows of ``vertices`` are the a_i with
    time coordinate one.  ``polar_form`` is the unit form of the polar
    hyperplane of a_n with the truncated body on its non-positive side.
    """

    spec: OrthoschemeSpec
    gram: np.ndarray
    inverse: np.ndarray
    normals: np.ndarray
    vertices: np.ndarray
    vertex_class: tuple[str, ...]
    polar_form: np.ndarray | None
    truncation_points: np.ndarray | None
    origin: int | None = None
    frame: str = "canonical"

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def ideal_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.vertex_class) if c == IDEAL]

    @property
    def ultra_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.vertex_class) if c == ULTRA_IDEAL]

    @property
    def facets(self) -> list[np.ndarray]:
        """Forms of the facets of the truncated body, each with the body on the
        non-negative side; index n+1 is the truncating facet."""
        out = [b for b in self.normals]
        if self.polar_form is not None:
            out.append(-self.polar_form)
        return out

    def incident(self, vertex: int, facet: int) -> bool:
        return abs(lz.inner(self.vertices[vertex], self.facets[facet])) <= lz.TOL.alg


def _canonical_normals(G: np.ndarray, origin: int) -> np.ndarray:
    # Facets through the origin vertex span a positive definite block; its
    # Cholesky factor gives their space parts, and the remaining facet gets
    # the time-like component.
    n = G.shape[0] - 1
    others = [j for j in range(n + 1) if j != origin]
    L = np.linalg.cholesky(G[np.ix_(others, others)])
    B = np.zeros((n + 1, n + 1))
    for k, j in enumerate(others):
        B[j, 1:] = L[k]
    x = np.linalg.solve(L, G[others, origin])
    B[origin, 1:] = x
    B[origin, 0] = -math.sqrt(x @ x - 1.0)
    return B


def _dual_vertices(B: np.ndarray) -> np.ndarray:
    """Rows a_i with <a_i, b^j> = delta_ij."""
    n = B.shape[0] - 1
    return np.linalg.inv(B @ lz.form_matrix(n)).T


def _assemble(spec, G, inv, classes, B, frame, origin) -> RealizedOrthoscheme:
    n = spec.dim
    A = _dual_vertices(B)
    if np.all(A[:, 0] < 0):
        A, B = -A, -B
    if np.any(A[:, 0] <= lz.TOL.alg):
        raise SymbolError("vertex solve produced points at infinity of the affine chart")
    V = A / A[:, :1]

    err = np.abs(lz.gram_of(B) - G).max()
    if err > lz.TOL.alg:
        raise SymbolError(f"realization does not reproduce the Gram matrix (error {err:.2e})")

    polar_form = trunc = None
    if classes[n] == ULTRA_IDEAL:
        polar_form = lz.polar(V[n])
        trunc = np.array([_truncation_point(V[i], V[n]) for i in range(n - 1)])
        if spec.parallel and abs(abs(lz.inner(B[n], polar_form)) - 1.0) > lz.TOL.alg:
            raise SymbolError(f"{spec.symbol}: the polar hyperplane of A_{n} is not parallel to H^{n}")
    elif spec.parallel:
        raise SymbolError(f"{spec.symbol}: vertex A_{n} is not ultra-ideal, nothing to truncate")

    return RealizedOrthoscheme(
        spec=spec,
        gram=_freeze(G),
        inverse=_freeze(inv),
        normals=_freeze(B),
        vertices=_freeze(V),
        vertex_class=classes,
        polar_form=None if polar_form is None else _freeze(polar_form),
        truncation_points=None if trunc is None else _freeze(trunc),
        origin=origin,
        frame=frame,
    )


def realize(spec: OrthoschemeSpec | str, frame: str = "canonical") -> RealizedOrthoscheme:
    """Realize a symbol in the projective model.

    ``frame="canonical"`` puts vertex A_1 (or the first proper vertex when
    A_1 is not proper) at the model center.  ``frame="reference"`` uses the
    explicit coordinates in :data:`REFERENCE_FRAMES`.
    """
    if not isinstance(spec, OrthoschemeSpec):
        spec = parse_symbol(spec, strict=False)
    if spec.dim < 2:
        raise SymbolError("realization needs dimension >= 2")
    if frame == "reference":
        if spec not in REFERENCE_FRAMES:
            raise SymbolError(f"no reference frame stored for {spec.symbol}")
        return realize_from_vertices(spec, REFERENCE_FRAMES[spec](), frame="reference")
    if frame != "canonical":
        raise ValueError(f"unknown frame {frame!r}")
    G = gram_from_symbol(spec)
    check_signature(G)
    inv, classes = invert_and_classify(G)
    proper = [i for i, c in enumerate(classes) if c == PROPER]
    if not proper:
        raise SymbolError(f"{spec.symbol} has no proper vertex to anchor the frame")
    origin = 1 if classes[1] == PROPER else proper[0]
    B = _canonical_normals(G, origin)
    return _assemble(spec, G, inv, classes, B, frame, origin)


def realize_from_vertices(spec: OrthoschemeSpec, vertices, frame: str = "custom") -> RealizedOrthoscheme:
    """Realize ``spec`` from given vertex coordinates, checking them against its Gram matrix."""
    G = gram_from_symbol(spec)
    check_signature(G)
    inv, classes = invert_and_classify(G)
    V = np.asarray(vertices, dtype=float)
    # Facet forms are the dual basis of the vertices, rescaled to unit length.
    B = np.linalg.inv(V @ lz.form_matrix(spec.dim)).T
    B = B / np.sqrt(np.diag(lz.gram_of(B)))[:, None]
    for i in range(spec.dim + 1):
        if lz.inner(V[i], B[i]) < 0:
            B[i] = -B[i]
    center = np.zeros(spec.dim + 1)
    center[0] = 1.0
    hits = [i for i in range(spec.dim + 1) if np.allclose(V[i], center, atol=lz.TOL.alg)]
    return _assemble(spec, G, inv, classes, B, frame, hits[0] if hits else None)


def _truncation_point(a_i: np.ndarray, a_n: np.ndarray) -> np.ndarray:
    p = a_i - lz.inner(a_i, a_n) / lz.inner(a_n, a_n) * a_n
    return lz.normalize(p)


def truncation_points(orth: RealizedOrthoscheme) -> np.ndarray:
    """Points A_in where the polar hyperplane of A_n cuts the edges A_iA_n, i <= n-2."""
    if orth.truncation_points is None:
        raise SymbolError("the last vertex is not ultra-ideal")
    return orth.truncation_points


def lorentz_map(source: RealizedOrthoscheme, target: RealizedOrthoscheme) -> np.ndarray:
    """Lorentz matrix taking the facet forms of ``source`` to those of ``target``."""
    if source.spec != target.spec:
        raise ValueError("realizations of different symbols")
    # Columns are facet forms; L maps each source form onto its target.
    return target.normals.T @ np.linalg.inv(source.normals.T)


def _frame_44434() -> np.ndarray:
    r2 = math.sqrt(2)
    return np.array(
        [
            [1, 0, 1, 0, 0],
            [1, 0, 0, 0, 0],
            [1, 0.5, 0, 0.5, 0],
            [1, 1, 0, 0, 0],
            [1, 1, 0, 0, r2 / 2],
        ],
        dtype=float,
    )


def _frame_43433() -> np.ndarray:
    r2, r3, r6, r10, r15, r30 = (math.sqrt(k) for k in (2, 3, 6, 10, 15, 30))
    x3 = (r6 + r30) / 8
    y4 = (3 * r2 - r10) / 8
    return np.array(
        [
            [1, r30 / 6, r6 / 6, 0, 0, 0],
            [1, r30 / 6, 0, 0, 0, 0],
            [1, (2 * r6 + 5 * r30) / 33, 0, (4 * r3 - r15) / 33, 0, 0],
            [1, x3, 0, 0, 0, 0],
            [1, x3, 0, 0, y4, 0],
            [1, x3, 0, 0, y4, (3 * r6 - r30) / 8],
        ],
        dtype=float,
    )


# Explicit vertex coordinates used as golden references.
REFERENCE_FRAMES = {
    OrthoschemeSpec((4, 4, 3, 4)): _frame_44434,
    OrthoschemeSpec((4, 3, 4, 3, 3)): _frame_43433,
}
