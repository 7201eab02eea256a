"""Classification of biphoton spectra by CHSH locality and KCBS contextuality.

Locality uses the Horodecki value ``2 sqrt(lambda1^2 + lambda2^2)``. Contextuality
uses the minimum over the KCBS spectrum family of
``lambda1 k_min + lambda2 k_mid + lambda3 k_max``, which is the smallest
``Tr[T K]`` over all relative orientations of the two matrices.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .kcbs import _ascending, _spectral_min
from .symstate import EIG_TOL, SpectrumTriple, check_spectrum

__all__ = [
    "TOL_CLS",
    "Label",
    "RegionClassification",
    "ContradictionError",
    "BoundaryCurve",
    "RegionScan",
    "ClosedFormComparison",
    "chsh_max",
    "noncontextual_min",
    "noncontextual_min_batch",
    "is_noncontextual_sufficient",
    "cauchy_schwarz_prefactor",
    "classify",
    "classify_batch",
    "frontier_rays",
    "boundary_local",
    "boundary_contextual_numeric",
    "boundary_contextual_closed_form",
    "closed_form_points",
    "compare_closed_form",
    "diagonal_transition",
    "scan_region",
]

TOL_CLS = 1e-9
ORDER_TOL = 1e-12
ISOTROPIC = np.array([1.0 / 3.0, 1.0 / 3.0])


class Label(enum.Enum):
    INVALID = "invalid"
    LOCAL_NONCONTEXTUAL = "local-noncontextual"
    NONLOCAL_NONCONTEXTUAL = "nonlocal-noncontextual"
    NONLOCAL_CONTEXTUAL = "nonlocal-contextual"


_LABELS = list(Label)


class ContradictionError(RuntimeError):
    """A local yet contextual state was computed; this falsifies the implementation."""


@dataclass(frozen=True)
class RegionClassification:
    label: Label
    chsh_max: float
    kcbs_min: float
    argmin_s: float


@dataclass(frozen=True)
class BoundaryCurve:
    samples: np.ndarray  # (n, 2) rows of (lambda1, lambda2)
    kind: str  # "local" or "contextual"


def chsh_max(lam) -> float:
    """Largest CHSH value over all settings, ``2 sqrt(lambda1^2 + lambda2^2)``."""
    l1, l2, _ = check_spectrum(lam)
    return 2.0 * math.hypot(l1, l2)


def noncontextual_min_batch(lams, n_grid: int = 10_000, xtol: float = 1e-10):
    """Vectorized :func:`noncontextual_min` over rows of descending spectra (no validation)."""
    return _spectral_min(np.atleast_2d(lams), _ascending, n_grid=n_grid, xtol=xtol)


def noncontextual_min(lam) -> tuple[float, float]:
    """Smallest KCBS value ``Tr[T K]`` reachable for this spectrum, and the minimizing ``s``."""
    lam = check_spectrum(lam)
    values, argmins = noncontextual_min_batch(np.array(lam))
    return float(values[0]), float(argmins[0])


def is_noncontextual_sufficient(lam) -> tuple[bool, bool]:
    """The two cheap sufficient conditions: ``lambda3 >= 0`` and ``lambda1^2 + lambda2^2 <= 1``."""
    l1, l2, l3 = check_spectrum(lam)
    return l3 >= 0.0, l1 * l1 + l2 * l2 <= 1.0


def cauchy_schwarz_prefactor(s):
    """``((k_max - k_mid)^2 + (k_max - k_min)^2) / (k_max - 1)^2``; never exceeds 1."""
    k_min, k_mid, k_max = np.moveaxis(_ascending(s), -1, 0)
    return ((k_max - k_mid) ** 2 + (k_max - k_min) ** 2) / (k_max - 1) ** 2


def _valid_mask(l1, l2, l3):
    total = l1 + l2 + l3
    crit = np.stack([1 + l1 + l2 - l3, 1 - l1 + l2 + l3, 1 + l1 - l2 + l3, 1 - total])
    return (
        (l1 >= l2 - ORDER_TOL)
        & (l2 >= l3 - ORDER_TOL)
        & (np.abs(total - 1.0) <= ORDER_TOL)
        & np.all(crit >= -4 * EIG_TOL, axis=0)
    )


def classify_batch(lambda1, lambda2, lambda3=None):
    """Classify arrays of ``(lambda1, lambda2[, lambda3])``.

    Returns ``(labels, chsh, kcbs, argmin_s)``; ``labels`` is an object array of
    :class:`Label`, numeric outputs are NaN for invalid points.

    Raises
    ------
    ContradictionError
        If any point is classified as local and contextual.
    """
    l1 = np.asarray(lambda1, dtype=float)
    l2 = np.asarray(lambda2, dtype=float)
    l3 = 1.0 - l1 - l2 if lambda3 is None else np.asarray(lambda3, dtype=float)
    l1, l2, l3 = np.broadcast_arrays(l1, l2, l3)
    shape = l1.shape
    l1, l2, l3 = l1.ravel(), l2.ravel(), l3.ravel()

    valid = _valid_mask(l1, l2, l3)
    chsh = np.full(l1.shape, np.nan)
    kcbs = np.full(l1.shape, np.nan)
    argmin = np.full(l1.shape, np.nan)
    chsh[valid] = 2.0 * np.hypot(l1[valid], l2[valid])
    if valid.any():
        v, a = noncontextual_min_batch(np.column_stack([l1[valid], l2[valid], l3[valid]]))
        kcbs[valid], argmin[valid] = v, a

    nonlocal_ = chsh > 2.0 + TOL_CLS
    contextual = kcbs < 1.0 - TOL_CLS
    bad = valid & contextual & ~nonlocal_
    if bad.any():
        i = np.flatnonzero(bad)[0]
        raise ContradictionError(
            f"local but contextual at lambda={(l1[i], l2[i], l3[i])}: "
            f"chsh_max={chsh[i]!r}, kcbs_min={kcbs[i]!r}"
        )
    codes = np.where(
        ~valid, 0, np.where(~nonlocal_, 1, np.where(contextual, 3, 2))
    )
    labels = np.array([_LABELS[c] for c in codes], dtype=object)
    return labels.reshape(shape), chsh.reshape(shape), kcbs.reshape(shape), argmin.reshape(shape)


def classify(lambda1: float, lambda2: float, lambda3: float | None = None) -> RegionClassification:
    """Classify one spectrum; ``lambda3`` defaults to ``1 - lambda1 - lambda2``."""
    labels, chsh, kcbs, argmin = classify_batch(lambda1, lambda2, lambda3)
    return RegionClassification(labels.item(), float(chsh), float(kcbs), float(argmin))


def frontier_rays(n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Unit directions from the isotropic point fanning across the valid triangle.

    The first ray points at the vertex (1, 0), the last along the diagonal.
    Returns ``(directions, t_end)`` where ``t_end`` is where each ray leaves the
    domain through the edge ``lambda1 = 1``.
    """
    if n_samples < 2:
        raise ValueError("need at least two samples")
    theta = np.linspace(math.atan2(-1.0, 2.0), math.pi / 4, n_samples)
    directions = np.column_stack([np.cos(theta), np.sin(theta)])
    t_end = (2.0 / 3.0) / directions[:, 0]
    return directions, t_end


def _spectra_on_rays(directions, t):
    pts = ISOTROPIC + t[:, None] * directions
    return np.column_stack([pts, 1.0 - pts[:, 0] - pts[:, 1]])


def _bisect_frontier(directions, t_end, tol: float = 1e-10):
    lo = np.zeros(len(directions))
    hi = np.array(t_end, dtype=float)
    end_vals, _ = noncontextual_min_batch(_spectra_on_rays(directions, hi))
    inside = end_vals >= 1.0 - 1e-12
    while np.max(np.where(inside, 0.0, hi - lo)) > tol:
        mid = 0.5 * (lo + hi)
        vals, _ = noncontextual_min_batch(_spectra_on_rays(directions, mid))
        ok = vals >= 1.0
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    t = np.where(inside, t_end, 0.5 * (lo + hi))
    return ISOTROPIC + t[:, None] * directions


def boundary_contextual_numeric(n_samples: int) -> BoundaryCurve:
    """Contextual/non-contextual frontier by bisection along rays from (1/3, 1/3).

    The non-contextual set is an intersection of half-planes (one per ``s``), so
    it is convex and each ray crosses the frontier once.
    """
    directions, t_end = frontier_rays(n_samples)
    return BoundaryCurve(_bisect_frontier(directions, t_end), "contextual")


def boundary_local(n_samples: int) -> BoundaryCurve:
    """Horodecki frontier ``lambda1^2 + lambda2^2 = 1`` sampled on the same rays."""
    directions, t_end = frontier_rays(n_samples)
    od = directions @ ISOTROPIC
    t = -od + np.sqrt(od**2 - ISOTROPIC @ ISOTROPIC + 1.0)
    t = np.minimum(t, t_end)
    return BoundaryCurve(ISOTROPIC + t[:, None] * directions, "local")


class ClosedFormDomainError(ValueError):
    pass


def boundary_contextual_closed_form(s: float) -> tuple[float, float]:
    """Evaluate the published closed-form parametrization of the contextual frontier.

    The expressions are used exactly as printed. They do not reproduce the
    numerically computed frontier; see :func:`compare_closed_form`.

    Raises
    ------
    ClosedFormDomainError
        If the expression is complex or not finite at ``s``.
    """
    s = float(s)
    denom = -2 + 2 * s * (-1 + 2 * (-1 + s) * s)
    if 1 + s == 0 or denom == 0:
        raise ClosedFormDomainError(f"closed form undefined at s={s!r}")
    radicand = 9 + (s - 6) * s - 8 / (1 + s)
    if radicand < 0:
        raise ClosedFormDomainError(f"closed form is complex at s={s!r} (radicand {radicand!r})")
    l1 = (-1 + s**2 + s**4 - (1 + s**2) ** 2 * math.sqrt(radicand)) / denom
    l2 = (-2 + s) * s * (1 + s) / denom
    if not (math.isfinite(l1) and math.isfinite(l2)):
        raise ClosedFormDomainError(f"closed form not finite at s={s!r}")
    return l1, l2


def closed_form_points(n: int = 2001, s_range=(-0.99, 3.0)) -> tuple[np.ndarray, np.ndarray]:
    """Sample the closed form where it is real and yields a valid spectrum.

    Returns ``(s_values, points)`` with ``points`` of shape ``(k, 2)``.
    """
    kept_s, kept = [], []
    for s in np.linspace(*s_range, n):
        try:
            l1, l2 = boundary_contextual_closed_form(s)
        except ClosedFormDomainError:
            continue
        lam = SpectrumTriple.from_pair(l1, l2)
        if _valid_mask(*(np.array([x]) for x in lam))[0]:
            kept_s.append(s)
            kept.append((l1, l2))
    return np.array(kept_s), np.array(kept).reshape(-1, 2)


@dataclass(frozen=True)
class ClosedFormComparison:
    n_points: int
    max_deviation: float  # distance to the numeric frontier along the same ray
    max_kcbs_residual: float  # max |noncontextual_min - 1| at closed-form points
    worst_s: float
    agrees: bool

    def summary(self) -> str:
        verdict = "agrees with" if self.agrees else "DISAGREES with"
        return (
            f"closed-form frontier {verdict} numeric frontier: {self.n_points} points, "
            f"max deviation {self.max_deviation:.6g} (worst s={self.worst_s:.6g}), "
            f"max |kcbs_min - 1| {self.max_kcbs_residual:.6g}; numeric frontier is authoritative"
        )


def compare_closed_form(n: int = 2001, tol: float = 1e-4) -> ClosedFormComparison:
    """Pointwise comparison of the printed closed form with the bisection frontier."""
    s_values, points = closed_form_points(n)
    if len(points) == 0:
        return ClosedFormComparison(0, math.inf, math.inf, math.nan, False)
    offsets = points - ISOTROPIC
    radius = np.linalg.norm(offsets, axis=1)
    directions = offsets / radius[:, None]
    t_end = (2.0 / 3.0) / directions[:, 0]
    frontier = _bisect_frontier(directions, t_end)
    deviation = np.linalg.norm(frontier - points, axis=1)
    spectra = np.column_stack([points, 1.0 - points.sum(axis=1)])
    residual = np.abs(noncontextual_min_batch(spectra)[0] - 1.0)
    worst = int(np.argmax(deviation))
    max_dev = float(deviation[worst])
    return ClosedFormComparison(
        len(points), max_dev, float(residual.max()), float(s_values[worst]), max_dev <= tol
    )


def diagonal_transition(kind: str, tol: float = 1e-12) -> float:
    """Bisect along ``lambda1 = lambda2`` for the label change of the given kind.

    ``kind`` is ``"local"`` (CHSH violation onset) or ``"contextual"`` (KCBS
    violation onset).
    """
    if kind == "local":
        def violated(x):
            return classify(x, x).label is not Label.LOCAL_NONCONTEXTUAL
    elif kind == "contextual":
        def violated(x):
            return classify(x, x).label is Label.NONLOCAL_CONTEXTUAL
    else:
        raise ValueError(f"kind must be 'local' or 'contextual', got {kind!r}")
    lo, hi = 1.0 / 3.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if violated(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RegionScan:
    """Row-major classification grid; row ``i`` has fixed ``lambda1``."""

    lambda1: np.ndarray
    lambda2: np.ndarray
    labels: np.ndarray
    chsh_max: np.ndarray
    kcbs_min: np.ndarray
    argmin_s: np.ndarray

    def __getitem__(self, ij) -> RegionClassification:
        return RegionClassification(
            self.labels[ij], float(self.chsh_max[ij]), float(self.kcbs_min[ij]), float(self.argmin_s[ij])
        )

    def counts(self) -> dict[Label, int]:
        return {label: int(np.sum(self.labels == label)) for label in Label}


def scan_grid(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid covering ``lambda1 in [1/3, 1]``, ``lambda2 in [(1 - lambda1)/2, lambda1]``."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    l1 = np.linspace(1.0 / 3.0, 1.0, resolution)
    frac = np.linspace(0.0, 1.0, resolution)
    lower = (1.0 - l1) / 2.0
    l2 = lower[:, None] + (l1 - lower)[:, None] * frac[None, :]
    l2 = np.minimum(l2, l1[:, None])
    return np.broadcast_to(l1[:, None], l2.shape).copy(), l2


def scan_region(resolution: int, workers: int = 1, chunk_rows: int = 4) -> RegionScan:
    """Classify every point of the valid-domain grid.

    Rows are classified in independent chunks, optionally on a thread pool;
    results do not depend on ``workers``.
    """
    l1, l2 = scan_grid(resolution)
    chunks = [slice(i, min(i + chunk_rows, resolution)) for i in range(0, resolution, chunk_rows)]

    def run(sl):
        return classify_batch(l1[sl], l2[sl])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(sl) for sl in chunks]
    labels, chsh, kcbs, argmin = (np.concatenate([p[k] for p in parts]) for k in range(4))
    return RegionScan(l1, l2, labels, chsh, kcbs, argmin)
