"""KCBS configurations on the 5-cycle.

Five unit directions ``u_1..u_5`` with ``u_j . u_{j+1} = 0`` (cyclically) define
the 3x3 KCBS matrix ``K = sum_j u_j u_j^T``. Its spectrum lies on a
one-parameter family indexed by ``s in [-1, 1]``:

    K_max = (3 + s^2)/2 + r/2,   K_2 = (3 + s^2)/2 - r/2,   K_3 = 2 - s^2
    r = sqrt((1 + 3 s^2 - 5 s^4 + s^6) / (1 + s^2))
"""
from __future__ import annotations

import contextlib
import json
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import spinops

__all__ = [
    "DegenerateConfigurationError",
    "KcbsSpectrum",
    "GOLDEN_S2",
    "spectrum_from_s",
    "raw_spectrum",
    "sorted_spectrum",
    "kmax_argmax_s2",
    "curve_distance",
    "check_directions",
    "generate_directions",
    "pentagram_directions",
    "kcbs_matrix",
    "kcbs_value",
    "kcbs_spin_sum",
    "projector_sum",
    "chsh_sum",
    "qutrit_kcbs_max",
    "directions_to_json",
    "directions_from_json",
    "inject_fault",
]

GOLDEN_S2 = (np.sqrt(5.0) - 1.0) / 2.0
ORTHO_TOL = 1e-10
UNIT_TOL = 1e-12
DEGENERATE_TOL = 1e-8

_fault: str | None = None


class DegenerateConfigurationError(ValueError):
    """The closing direction ``u5`` is undefined because ``u4`` is parallel to ``u1``."""


class KcbsSpectrum(NamedTuple):
    k_max: float
    k_mid: float
    k_min: float
    s: float


@contextlib.contextmanager
def inject_fault(name: str):
    """Temporarily corrupt the spectrum family (negative control for verification).

    Only ``"k2_sign"`` is recognized: it flips the sign of the radical in ``K_2``.
    """
    global _fault
    if name != "k2_sign":
        raise ValueError(f"unknown fault {name!r}")
    previous, _fault = _fault, name
    try:
        yield
    finally:
        _fault = previous


def raw_spectrum(s):
    """Unsorted ``(K_max, K_2, K_3)`` for scalar or array ``s``; last axis has size 3."""
    s = np.asarray(s, dtype=float)
    x = s * s
    radicand = (1 + 3 * x - 5 * x**2 + x**3) / (1 + x)
    # vanishes analytically at |s| = 1
    radicand = np.where((radicand < 0) & (radicand >= -1e-14), 0.0, radicand)
    r = np.sqrt(radicand)
    base = (3 + x) / 2
    k2 = base + r / 2 if _fault == "k2_sign" else base - r / 2
    return np.stack([base + r / 2, k2, 2 - x], axis=-1)


def sorted_spectrum(s):
    """Descending ``(k_max, k_mid, k_min)`` along the last axis."""
    raw = raw_spectrum(s)
    k2, k3 = raw[..., 1], raw[..., 2]
    return np.stack([raw[..., 0], np.maximum(k2, k3), np.minimum(k2, k3)], axis=-1)


def spectrum_from_s(s: float) -> KcbsSpectrum:
    """KCBS spectrum at parameter ``s``, with ``k_mid``/``k_min`` assigned by comparison."""
    s = float(s)
    if not -1.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [-1, 1], got {s!r}")
    k_max, k_mid, k_min = sorted_spectrum(s)
    return KcbsSpectrum(float(k_max), float(k_mid), float(k_min), s)


def _kmax_slope(x: float) -> float:
    # d K_max / d(s^2)
    num = 1 + 3 * x - 5 * x**2 + x**3
    g = num / (1 + x)
    dg = ((3 - 10 * x + 3 * x**2) * (1 + x) - num) / (1 + x) ** 2
    return 0.5 + dg / (4 * np.sqrt(g))


def kmax_argmax_s2() -> float:
    """Value of ``s^2`` maximizing ``K_max``, from the root of its derivative."""
    return brentq(_kmax_slope, 0.3, 0.9, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def curve_distance(k_spectrum) -> float:
    """Residual of a spectrum against the ``s``-family.

    Each of the two smaller eigenvalues is tried as ``K_3 = 2 - s^2`` and the
    distance to the family member at that ``s`` is kept for the better choice.
    Zero exactly on the curve; off the curve it bounds the Euclidean distance
    from above. Exact inversion, no search.
    """
    ev = np.sort(np.asarray(k_spectrum, dtype=float)[:3])[::-1]
    best = np.inf
    for candidate in ev[1:]:
        s2 = 2.0 - candidate
        if -1e-12 <= s2 <= 1.0 + 1e-12:
            member = sorted_spectrum(np.sqrt(min(max(s2, 0.0), 1.0)))
            best = min(best, float(np.linalg.norm(member - ev)))
    return best


def check_directions(dirs) -> np.ndarray:
    """Validate and return a (5, 3) array of cyclically orthogonal unit vectors."""
    dirs = np.asarray(dirs, dtype=float)
    if dirs.shape != (5, 3):
        raise ValueError(f"expected five 3-vectors, got shape {dirs.shape}")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise ValueError(f"directions must be unit vectors, norms {norms.tolist()}")
    adjacent = np.einsum("ij,ij->i", dirs, np.roll(dirs, -1, axis=0))
    if np.any(np.abs(adjacent) > ORTHO_TOL):
        raise ValueError(f"adjacent directions not orthogonal: {adjacent.tolist()}")
    return dirs


def generate_directions(phi3: float, phi4: float) -> np.ndarray:
    """Chain construction of a KCBS configuration from two angles.

    ``u1 = z``, ``u2 = x``; ``u3 = cos(phi3) z + sin(phi3) y``;
    ``u4 = cos(phi4) (u3 x u2) + sin(phi4) u2``; ``u5``
    closes the cycle as the normalized ``u4 x u1``. Every configuration is
    reached up to a global rotation.

    Raises
    ------
    DegenerateConfigurationError
        If ``|u4 x u1| < 1e-8``.
    """
    u1 = np.array([0.0, 0.0, 1.0])
    u2 = np.array([1.0, 0.0, 0.0])
    u3 = np.cos(phi3) * u1 + np.sin(phi3) * np.array([0.0, 1.0, 0.0])
    u4 = np.cos(phi4) * np.cross(u3, u2) + np.sin(phi4) * u2
    closing = np.cross(u4, u1)
    norm = np.linalg.norm(closing)
    if norm < DEGENERATE_TOL:
        raise DegenerateConfigurationError(
            f"u4 parallel to u1 at phi3={phi3!r}, phi4={phi4!r} (|u4 x u1| = {norm:.3g})"
        )
    return np.array([u1, u2, u3, u4, closing / norm])


def pentagram_directions() -> np.ndarray:
    """Symmetric configuration about z giving the largest eigenvalue sqrt(5)."""
    c = np.cos(np.pi / 5)
    cos_t = np.sqrt(c / (1 + c))
    sin_t = np.sqrt(1 - cos_t**2)
    ang = 4 * np.pi * np.arange(5) / 5
    return np.column_stack([sin_t * np.cos(ang), sin_t * np.sin(ang), np.full(5, cos_t)])


def kcbs_matrix(dirs) -> np.ndarray:
    dirs = check_directions(dirs)
    return dirs.T @ dirs


def kcbs_value(t, dirs) -> float:
    """``Tr[T K]``; values below 1 witness contextuality."""
    return float(np.trace(np.asarray(t, dtype=float) @ kcbs_matrix(dirs)))


def kcbs_spin_sum(rho, dirs) -> float:
    """``sum_j <S_{u_j}^2>``; non-contextual models give at least 3."""
    dirs = check_directions(dirs)
    return sum(spinops.expectation(rho, spinops.spin1_sq(u)) for u in dirs)


def projector_sum(rho, dirs) -> float:
    """``sum_j <P_j>`` with ``P_j = I - S_{u_j}^2``; non-contextual bound 2."""
    dirs = check_directions(dirs)
    return sum(spinops.expectation(rho, spinops.spin_projectors(u)[2]) for u in dirs)


def chsh_sum(rho, dirs) -> float:
    """Sum of the five CHSH expressions on adjacent direction pairs."""
    dirs = check_directions(dirs)
    return sum(
        spinops.expectation(rho, spinops.chsh_op(dirs[j], dirs[(j + 1) % 5]))
        for j in range(5)
    )


def _spectral_min(weights, spec_fn, n_grid: int = 10_000, xtol: float = 1e-10):
    """Minimize ``weights . spec_fn(s)`` over ``s in [0, 1]`` for a batch of weights.

    Dense grid, then golden-section refinement on the bracketing cell. Returns
    ``(values, argmins)``, each of shape ``(batch,)``.
    """
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    grid = np.linspace(0.0, 1.0, n_grid)
    on_grid = weights @ spec_fn(grid).T
    idx = np.argmin(on_grid, axis=1)
    rows = np.arange(len(weights))
    best_val = on_grid[rows, idx]
    best_s = grid[idx]

    def f(s):
        return np.einsum("ij,ij->i", weights, spec_fn(s))

    a = grid[np.maximum(idx - 1, 0)]
    b = grid[np.minimum(idx + 1, n_grid - 1)]
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    width = 2.0 / (n_grid - 1)
    n_iter = max(int(np.ceil(np.log(xtol / width) / np.log(inv_phi))), 0)
    for _ in range(n_iter):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - inv_phi * (b - a), d)
        new_d = np.where(left, c, a + inv_phi * (b - a))
        f_new = f(np.where(left, new_c, new_d))
        fc, fd = np.where(left, f_new, fd), np.where(left, fc, f_new)
        c, d = new_c, new_d
    mid = 0.5 * (a + b)
    f_mid = f(mid)
    better = f_mid < best_val
    return np.where(better, f_mid, best_val), np.where(better, mid, best_s)


def _ascending(s):
    return sorted_spectrum(s)[..., ::-1]


def qutrit_kcbs_max(rho_spectrum) -> float:
    """Largest ``sum_m <P_m>`` over KCBS configurations for a qutrit with these eigenvalues.

    The best configuration pairs ``k_max, k_mid, k_min`` with the descending
    populations, so the result is that weighted sum maximized over ``s``.
    """
    p = np.asarray(rho_spectrum, dtype=float)
    if (
        p.shape != (3,)
        or np.any(p < -1e-12)
        or abs(p.sum() - 1.0) > 1e-12
        or not (p[0] >= p[1] - 1e-12 and p[1] >= p[2] - 1e-12)
    ):
        raise ValueError(f"expected descending probabilities summing to 1, got {p.tolist()}")
    values, _ = _spectral_min(-p, sorted_spectrum)
    return float(-values[0])


def directions_to_json(dirs) -> str:
    return json.dumps(np.asarray(dirs, dtype=float).tolist())


def directions_from_json(text: str) -> np.ndarray:
    return check_directions(json.loads(text))
