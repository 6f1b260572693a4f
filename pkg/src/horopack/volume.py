"""Volumes of truncated orthoschemes.

Even dimensions use the Gauss-Bonnet formula, which for a Coxeter polytope
reduces to a finite sum over the elliptic faces.  The single 5-dimensional
case is dissected into four congruent doubly asymptotic orthoschemes whose
volume has a closed trilogarithmic form.  A Monte Carlo integrator in the
Klein model serves as an independent check.
"""

from __future__ import annotations

import cmath
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import zeta

from . import lorentz as lz
from .coxeter import OrthoschemeSpec, RealizedOrthoscheme, gram_from_symbol, parse_symbol

ZETA3 = float(zeta(3))

CLOSED_FORM = "closed_form"
DISSECTION = "dissection_polylog"
MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class VolumeResult:
    value: float
    method: str
    stderr: float = 0.0
    exact: str | None = None
    samples: int = 0

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"volume must be positive, got {self.value}")
        if self.stderr < 0:
            raise ValueError("negative standard error")


# ---------------------------------------------------------------- polylog


def polylog(s: int, z: complex) -> complex:
    """Principal branch of Li_s(z) for integer s >= 2 and |z| <= 1.

    Small arguments use the defining power series.  Otherwise the expansion
    in mu = log z is used,

        Li_s(e^mu) = sum_{k != s-1} zeta(s-k) mu^k / k!
                     + mu^(s-1) / (s-1)! * (H_{s-1} - log(-mu)),

    which converges for |mu| < 2*pi and hence on the whole unit circle.
    """
    if s < 2 or int(s) != s:
        raise ValueError("order must be an integer >= 2")
    z = complex(z)
    if abs(z) > 1 + 1e-14:
        raise ValueError("|z| > 1 is outside the supported domain")
    if z == 1:
        return complex(zeta(s))
    if abs(z) < 0.5:
        total, term, k = 0j, z, 1
        while abs(term) > 1e-17 * max(abs(total), 1e-300):
            total += term / k**s
            k += 1
            term *= z
        return total

    mu = cmath.log(z)
    harmonic = sum(1.0 / j for j in range(1, s))
    total = mu ** (s - 1) / math.factorial(s - 1) * (harmonic - cmath.log(-mu))
    # |zeta(s-k)| k!-scaled terms decay like (|mu| / 2pi)^k; zeta vanishes at
    # negative even integers, so the individual terms cannot drive the stop.
    ratio = abs(mu) / (2 * math.pi)
    power = 1 + 0j
    for k in range(0, 400):
        if k != s - 1:
            total += zeta(s - k) * power
        if k > s + 2 and 4 * (2 * math.pi) ** s * ratio**k < 1e-18:
            break
        power *= mu / (k + 1)
    return total


def dilog(z: complex) -> complex:
    return polylog(2, z)


def trilog(z: complex) -> complex:
    return polylog(3, z)


def lobachevsky3(alpha: float) -> float:
    """J3(alpha) = Re Li3(exp(2i alpha)) / 4."""
    return 0.25 * trilog(cmath.exp(2j * alpha)).real


# ------------------------------------------------ doubly asymptotic pieces


@dataclass(frozen=True)
class DoublyAsymptoticOrthoscheme5:
    """Essential angles of a 5-orthoscheme with both principal vertices ideal."""

    angles: tuple[float, float, float, float, float]

    def __post_init__(self):
        a1, a2, a3 = self.angles[:3]
        lam = math.cos(a1) ** 2 + math.cos(a2) ** 2 + math.cos(a3) ** 2
        if abs(lam - 1.0) > 1e-12:
            raise ValueError(f"cos² sum {lam} != 1: only the unit-parameter case is supported")

    @classmethod
    def from_symbol(cls, weights) -> "DoublyAsymptoticOrthoscheme5":
        if len(weights) != 5:
            raise ValueError("need five weights")
        return cls(tuple(math.pi / w for w in weights))

    def reversed(self) -> "DoublyAsymptoticOrthoscheme5":
        return DoublyAsymptoticOrthoscheme5(tuple(reversed(self.angles)))


def vol5_doubly_asymptotic(R: DoublyAsymptoticOrthoscheme5) -> float:
    a1, a2, a3 = R.angles[:3]
    J = lobachevsky3
    return (
        0.25 * (J(a1) + J(a2) - 0.5 * J(math.pi / 2 - a3))
        - (J(math.pi / 2 + a1 + a2) + J(math.pi / 2 - a1 + a2)) / 16.0
        + 3.0 * ZETA3 / 64.0
    )


# Dissections of odd-dimensional cases into doubly asymptotic pieces.
DISSECTIONS: dict[OrthoschemeSpec, tuple[tuple[int, ...], ...]] = {
    OrthoschemeSpec((4, 3, 4, 3, 3)): ((4, 3, 3, 4, 3),) * 4,
}


# ------------------------------------------------------------ Gauss-Bonnet


def _chain_order(labels: list[int]) -> int | None:
    """Order of a finite Coxeter group with a linear diagram, or None."""
    k = len(labels) + 1
    if k == 1:
        return 2
    if k == 2:
        return 2 * labels[0]
    if all(m == 3 for m in labels):
        return math.factorial(k + 1)
    if labels in ([4] + [3] * (k - 2), [3] * (k - 2) + [4]):
        return 2**k * math.factorial(k)
    if labels == [3, 4, 3]:
        return 1152
    if labels in ([5, 3], [3, 5]):
        return 120
    if labels in ([5, 3, 3], [3, 3, 5]):
        return 14400
    return None


def _facet_labels(spec: OrthoschemeSpec) -> list[float]:
    """Labels along the facet chain H^0 - ... - H^n - truncating facet."""
    labels = [float(w) for w in spec.weights]
    if spec.parallel:
        labels.append(math.inf)
    return labels


def euler_characteristic(spec: OrthoschemeSpec) -> Fraction:
    """Orbifold Euler characteristic of the reflection group of the body.

    The facets form a linear diagram, so every subset splits into runs of
    consecutive facets.  A subset contributes (-1)^(n-|S|)/|W_S| when all of
    its runs generate finite groups.
    """
    n = spec.dim
    labels = _facet_labels(spec)
    nodes = len(labels) + 1
    chi = Fraction(0)
    for size in range(0, n + 1):
        for subset in itertools.combinations(range(nodes), size):
            order = 1
            run: list[int] = []
            for a, b in itertools.pairwise(subset + (None,)):
                if b is not None and b == a + 1 and labels[a] != 2:
                    run.append(labels[a])
                    continue
                if any(math.isinf(m) for m in run):
                    order = None
                    break
                o = _chain_order([int(m) for m in run])
                if o is None:
                    order = None
                    break
                order *= o
                run = []
            if order is not None:
                chi += Fraction((-1) ** (n - size), order)
    return chi


def gauss_bonnet_volume(spec: OrthoschemeSpec) -> tuple[Fraction, int, float]:
    """Volume of an even-dimensional body as ``coefficient * pi**power``."""
    n = spec.dim
    if n % 2:
        raise ValueError("the Gauss-Bonnet route only applies in even dimensions")
    m = n // 2
    # half the volume of the unit n-sphere is pi^m * 4^m m! / (2m)!
    coeff = (-1) ** m * Fraction(4**m * math.factorial(m), math.factorial(2 * m)) * euler_characteristic(spec)
    return coeff, m, float(coeff) * math.pi**m


def _fraction_text(q: Fraction, power: int) -> str:
    num = "" if q.numerator == 1 else f"{q.numerator}*"
    text = f"{num}pi^{power}"
    return text if q.denominator == 1 else f"{text}/{q.denominator}"


def vol_truncated_orthoscheme(spec: OrthoschemeSpec | str) -> VolumeResult:
    """Analytic volume of a catalog body."""
    if not isinstance(spec, OrthoschemeSpec):
        spec = parse_symbol(spec)
    if spec in DISSECTIONS:
        pieces = DISSECTIONS[spec]
        value = sum(vol5_doubly_asymptotic(DoublyAsymptoticOrthoscheme5.from_symbol(p)) for p in pieces)
        return VolumeResult(value, DISSECTION, exact="7*zeta(3)/1152" if len(pieces) == 4 else None)
    if spec.dim % 2 == 0:
        gram_from_symbol(spec)
        coeff, power, value = gauss_bonnet_volume(spec)
        return VolumeResult(value, CLOSED_FORM, exact=_fraction_text(coeff, power))
    raise ValueError(f"no analytic volume available for {spec.symbol}")


# ------------------------------------------------------------- Monte Carlo


def _thread_cap() -> int:
    env = os.environ.get("HOROPACK_THREADS")
    cap = os.cpu_count() or 1
    if env:
        cap = max(1, min(cap, int(env)))
    return cap


def default_cusp_cut(orth: RealizedOrthoscheme, shift: float = 0.25) -> list:
    """Maximal horoballs at every ideal vertex, each shrunk by ``shift``."""
    from . import horoball as hb

    return [hb.shrink(hb.max_admissible_horoball(orth, c), shift) for c in orth.ideal_indices]


def _mc_chunk(Y, polar, cusps, count, seed_seq):
    rng = np.random.default_rng(seed_seq)
    n = Y.shape[1]
    W = rng.exponential(size=(count, n + 1))
    W /= W.sum(axis=1, keepdims=True)
    y = W @ Y
    q = 1.0 - np.einsum("ij,ij->i", y, y)
    ok = q > 0
    if polar is not None:
        ok &= -polar[0] + y @ polar[1:] <= 0
    for a_c, s in cusps:
        # Lorentz products with x = (1, y)
        pp = -q
        pa = -a_c[0] + y @ a_c[1:]
        ok &= (s - 1.0) * pp - (1.0 + s) * pa * pa < 0
    f = np.zeros(count)
    f[ok] = q[ok] ** (-(n + 1) / 2.0)
    return float(f.sum()), float((f * f).sum()), int(ok.sum())


def mc_volume(
    orth: RealizedOrthoscheme,
    cusp_cut: list | None = None,
    samples: int = 1_000_000,
    seed: int = 0,
    chunk_size: int = 1 << 18,
    workers: int | None = None,
) -> VolumeResult:
    """Monte Carlo estimate of the truncated body's volume.

    Points are drawn uniformly from the Euclidean simplex spanned by the
    Klein images of the vertices, kept when they lie inside the model, on
    the body side of the truncating hyperplane and outside every cusp
    horoball, and weighted by the Klein volume density
    (1 - |y|^2)^(-(n+1)/2).  Horoball pieces are added analytically.

    Parameters
    ----------
    orth : RealizedOrthoscheme
    cusp_cut : list of Horoball, optional
        One admissible horoball per ideal vertex.  Defaults to
        :func:`default_cusp_cut`.
    samples : int
        Total number of sample points; must be positive.
    seed : int
        Seed of the root ``SeedSequence``; chunk ``k`` uses its k-th child.
    chunk_size : int
        Results are reproducible for fixed ``(seed, samples, chunk_size)``.
    workers : int, optional
        Thread count, capped by ``HOROPACK_THREADS``.
    """
    from . import horoball as hb

    if samples <= 0:
        raise ValueError("samples must be positive")
    if cusp_cut is None:
        cusp_cut = default_cusp_cut(orth)
    centers = {h.center_index for h in cusp_cut}
    missing = set(orth.ideal_indices) - centers
    if missing:
        raise ValueError(f"no cusp horoball at ideal vertices {sorted(missing)}")
    for h in cusp_cut:
        hb.check_admissible(orth, h)

    Y = np.array([lz.klein(v) for v in orth.vertices])
    n = orth.dim
    simplex_volume = abs(np.linalg.det(Y[1:] - Y[0])) / math.factorial(n)
    cusps = [(orth.vertices[h.center_index], h.s) for h in cusp_cut]

    counts = [chunk_size] * (samples // chunk_size)
    if samples % chunk_size:
        counts.append(samples % chunk_size)
    seeds = np.random.SeedSequence(seed).spawn(len(counts))
    jobs = list(zip(counts, seeds))
    workers = min(workers or _thread_cap(), _thread_cap(), len(jobs))

    def run(job):
        return _mc_chunk(Y, orth.polar_form, cusps, *job)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]

    s1 = s2 = 0.0
    accepted = 0
    for a, b, c in parts:
        s1 += a
        s2 += b
        accepted += c
    if accepted == 0:
        raise RuntimeError("no sample was accepted")
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    pieces = sum(hb.horoball_piece_volume(orth, h) for h in cusp_cut)
    value = simplex_volume * mean + pieces
    stderr = simplex_volume * math.sqrt(var / samples)
    return VolumeResult(value, MONTE_CARLO, stderr=stderr, samples=samples)
