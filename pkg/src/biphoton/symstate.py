"""Symmetric two-qubit (biphoton) states.

A biphoton polarization state is a two-qubit density matrix supported on the
symmetric subspace. It is fixed by a Bloch vector ``a`` shared by both photons
and a real symmetric correlation tensor ``t`` with unit trace:

    rho = 1/4 (I⊗I + sum_k a_k (s_k⊗I + I⊗s_k) + sum_kl t_kl s_k⊗s_l)

Computational basis convention: |0> = |H>, |1> = |V>.
"""
from __future__ import annotations

import json
from typing import NamedTuple

import numpy as np

__all__ = [
    "PAULI",
    "IDENTITY2",
    "SINGLET",
    "SpectrumTriple",
    "UnphysicalStateError",
    "InvalidSpectrumError",
    "assemble_state",
    "positivity_criteria",
    "validate_positivity",
    "is_valid_spectrum",
    "check_spectrum",
    "spectrum",
    "tensor_from_spectrum",
    "singlet_overlap",
    "random_spectrum",
    "spectrum_to_json",
    "spectrum_from_json",
    "tensor_to_json",
    "tensor_from_json",
]

IDENTITY2 = np.eye(2, dtype=complex)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)

# density-matrix eigenvalue floor; algebraic identities use 1e-12
EIG_TOL = 1e-10
ALG_TOL = 1e-12


class UnphysicalStateError(ValueError):
    """Raised when a parameter combination gives a non-positive density matrix."""


class InvalidSpectrumError(ValueError):
    """Raised when a correlation-tensor spectrum is unordered or unphysical."""


class SpectrumTriple(NamedTuple):
    """Eigenvalues of a biphoton correlation tensor, in descending order."""

    lambda1: float
    lambda2: float
    lambda3: float

    @classmethod
    def from_pair(cls, lambda1: float, lambda2: float) -> "SpectrumTriple":
        """Complete ``(lambda1, lambda2)`` with the trace constraint."""
        return cls(float(lambda1), float(lambda2), 1.0 - lambda1 - lambda2)


def _check_tensor(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3):
        raise ValueError(f"correlation tensor must be 3x3, got shape {t.shape}")
    if not np.allclose(t, t.T, atol=ALG_TOL, rtol=0):
        raise ValueError("correlation tensor must be symmetric")
    if abs(np.trace(t) - 1.0) > ALG_TOL:
        raise ValueError(f"correlation tensor must have unit trace, got {np.trace(t)!r}")
    return t


def _check_bloch(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"Bloch vector must have 3 components, got shape {a.shape}")
    if np.linalg.norm(a) > 1.0 + ALG_TOL:
        raise ValueError(f"Bloch vector norm exceeds 1: {np.linalg.norm(a)!r}")
    return a


def assemble_state(a, t, check: bool = True) -> np.ndarray:
    """Build the 4x4 density matrix of a biphoton.

    Parameters
    ----------
    a : array_like, shape (3,)
        Bloch vector shared by both photons.
    t : array_like, shape (3, 3)
        Symmetric, unit-trace correlation tensor.
    check : bool
        If True, reject states with an eigenvalue below ``-1e-10``.

    Returns
    -------
    numpy.ndarray
        Complex Hermitian matrix of shape (4, 4) with unit trace.

    Raises
    ------
    UnphysicalStateError
        If ``check`` is set and the matrix is not positive semidefinite.
    """
    a = _check_bloch(a)
    t = _check_tensor(t)
    rho = np.kron(IDENTITY2, IDENTITY2)
    for k in range(3):
        rho = rho + a[k] * (np.kron(PAULI[k], IDENTITY2) + np.kron(IDENTITY2, PAULI[k]))
        for l in range(3):
            rho = rho + t[k, l] * np.kron(PAULI[k], PAULI[l])
    rho = rho / 4.0
    if check:
        evals = np.linalg.eigvalsh(rho)
        bad = np.flatnonzero(evals < -EIG_TOL)
        if bad.size:
            raise UnphysicalStateError(
                f"density matrix has negative eigenvalue {evals[bad[0]]!r} "
                f"(index {bad[0]} of ascending spectrum {evals.tolist()})"
            )
    return rho


def positivity_criteria(lam) -> np.ndarray:
    """Return the four quantities that must be non-negative for a physical state.

    Each equals four times an eigenvalue of ``assemble_state(0, diag(lam))``.
    """
    l1, l2, l3 = (float(x) for x in lam)
    return np.array([
        1 + l1 + l2 - l3,
        1 - l1 + l2 + l3,
        1 + l1 - l2 + l3,
        1 - l1 - l2 - l3,
    ])


def validate_positivity(lam) -> bool:
    """True iff all four positivity criteria hold (at the density-matrix tolerance)."""
    return bool(np.all(positivity_criteria(lam) >= -4 * EIG_TOL))


def is_valid_spectrum(lam, tol: float = ALG_TOL) -> bool:
    """Descending order, unit trace and positivity."""
    l1, l2, l3 = (float(x) for x in lam)
    return (
        l1 >= l2 - tol
        and l2 >= l3 - tol
        and abs(l1 + l2 + l3 - 1.0) <= tol
        and validate_positivity((l1, l2, l3))
    )


def check_spectrum(lam) -> SpectrumTriple:
    """Return ``lam`` as a :class:`SpectrumTriple` or raise :class:`InvalidSpectrumError`."""
    lam = SpectrumTriple(*(float(x) for x in lam))
    if not is_valid_spectrum(lam):
        raise InvalidSpectrumError(f"not a valid biphoton spectrum: {tuple(lam)}")
    return lam


def spectrum(t) -> tuple[SpectrumTriple, np.ndarray]:
    """Diagonalize a correlation tensor.

    Returns the descending eigenvalues and a proper rotation whose columns are
    the matching eigenvectors, so that ``t == basis @ diag(lam) @ basis.T``.
    Degenerate eigenvalues get an arbitrary orthonormal basis of their eigenspace.
    """
    t = _check_tensor(t)
    evals, evecs = np.linalg.eigh(t)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    if np.linalg.det(evecs) < 0:
        evecs[:, 2] = -evecs[:, 2]
    return SpectrumTriple(*(float(x) for x in evals)), evecs


def tensor_from_spectrum(lam, basis=None) -> np.ndarray:
    """Inverse of :func:`spectrum`: ``basis @ diag(lam) @ basis.T``."""
    d = np.diag(np.asarray(lam, dtype=float))
    if basis is None:
        return d
    basis = np.asarray(basis, dtype=float)
    return basis @ d @ basis.T


def singlet_overlap(rho) -> float:
    """Population of the antisymmetric singlet, ``<psi-|rho|psi->``."""
    rho = np.asarray(rho)
    return float(np.real(SINGLET.conj() @ rho @ SINGLET))


def random_spectrum(seed) -> SpectrumTriple:
    """Draw a spectrum uniformly from the physical, ordered polytope.

    Rejection sampling from the box ``lambda1 in [1/3, 1]``, ``lambda2 in [-1, 1]``
    with ``lambda3 = 1 - lambda1 - lambda2``. ``seed`` may be an int or a
    :class:`numpy.random.Generator` (which is advanced).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        l1 = rng.uniform(1.0 / 3.0, 1.0)
        l2 = rng.uniform(-1.0, 1.0)
        lam = SpectrumTriple.from_pair(l1, l2)
        if lam.lambda1 >= lam.lambda2 >= lam.lambda3 and validate_positivity(lam):
            return lam


def spectrum_to_json(lam) -> str:
    return json.dumps({"lambda": [float(x) for x in lam]})


def spectrum_from_json(text: str) -> SpectrumTriple:
    return check_spectrum(json.loads(text)["lambda"])


def tensor_to_json(t) -> str:
    return json.dumps({"t": np.asarray(t, dtype=float).tolist()})


def tensor_from_json(text: str) -> np.ndarray:
    return _check_tensor(json.loads(text)["t"])
