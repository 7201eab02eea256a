"""Spin-1 operators realized on two qubits.

All operators act on the full four-dimensional two-qubit space. Biphoton states
never populate the singlet, so expectations agree with the qutrit picture; use
:data:`SYM_EMBED` to restrict an operator to the symmetric subspace.
"""
from __future__ import annotations

import numpy as np

from .symstate import IDENTITY2, PAULI

__all__ = [
    "SYM_EMBED",
    "pauli_dot",
    "spin1_op",
    "spin1_sq",
    "spin_projectors",
    "chsh_op",
    "expectation",
    "measurement_probs",
    "restrict_symmetric",
]

UNIT_TOL = 1e-12
ORTHO_TOL = 1e-10

I4 = np.eye(4, dtype=complex)

# columns: |HH>, (|HV>+|VH>)/sqrt2, |VV>
SYM_EMBED = np.array(
    [
        [1, 0, 0],
        [0, 1 / np.sqrt(2), 0],
        [0, 1 / np.sqrt(2), 0],
        [0, 0, 1],
    ],
    dtype=complex,
)


def _unit(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (3,):
        raise ValueError(f"direction must have 3 components, got shape {m.shape}")
    if abs(np.linalg.norm(m) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit vector, |m| = {np.linalg.norm(m)!r}")
    return m


def pauli_dot(m) -> np.ndarray:
    """``m . sigma`` as a 2x2 matrix (no normalization check)."""
    m = np.asarray(m, dtype=float)
    return m[0] * PAULI[0] + m[1] * PAULI[1] + m[2] * PAULI[2]


def spin1_op(m) -> np.ndarray:
    """Spin-1 component along ``m``: ``(m.s ⊗ I + I ⊗ m.s) / 2``."""
    ms = pauli_dot(_unit(m))
    return 0.5 * (np.kron(ms, IDENTITY2) + np.kron(IDENTITY2, ms))


def spin1_sq(m) -> np.ndarray:
    """Square of the spin-1 component: ``(I⊗I + m.s ⊗ m.s) / 2``."""
    ms = pauli_dot(_unit(m))
    return 0.5 * (I4 + np.kron(ms, ms))


def spin_projectors(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Projectors onto ``S_m = +1, -1, 0``.

    ``P+ = (S^2 + S)/2`` and ``P- = (S^2 - S)/2``; ``P0 = I - S^2`` also covers
    the singlet on the full two-qubit space.
    """
    s = spin1_op(m)
    s2 = spin1_sq(m)
    return 0.5 * (s2 + s), 0.5 * (s2 - s), I4 - s2


def chsh_op(m, m_perp) -> np.ndarray:
    """CHSH operator ``sqrt2 (m.s ⊗ m.s + n.s ⊗ n.s)`` for orthogonal ``m``, ``n``.

    ``m_perp`` is re-orthogonalized against ``m`` once the overlap is within
    1e-10.
    """
    m = _unit(m)
    n = _unit(m_perp)
    overlap = float(m @ n)
    if abs(overlap) > ORTHO_TOL:
        raise ValueError(f"CHSH directions are not orthogonal: m . m_perp = {overlap!r}")
    n = n - overlap * m
    n = n / np.linalg.norm(n)
    a, b = pauli_dot(m), pauli_dot(n)
    return np.sqrt(2) * (np.kron(a, a) + np.kron(b, b))


def expectation(rho, op) -> float:
    """``Tr[rho op]`` as a real number."""
    val = np.trace(np.asarray(rho) @ np.asarray(op))
    if abs(val.imag) >= 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag!r}; operator not Hermitian?")
    return float(val.real)


def measurement_probs(rho, m) -> tuple[float, float, float]:
    """Outcome probabilities ``(p_plus, p_zero, p_minus)`` of measuring ``S_m``.

    Measuring ``S_m^2`` instead merges the first and last: outcome 1 with
    ``p_plus + p_minus`` and outcome 0 with ``p_zero``.
    """
    p_plus, p_minus, p_zero = spin_projectors(m)
    return expectation(rho, p_plus), expectation(rho, p_zero), expectation(rho, p_minus)


def restrict_symmetric(op) -> np.ndarray:
    """Matrix of ``op`` on the symmetric (qutrit) subspace."""
    return SYM_EMBED.conj().T @ np.asarray(op) @ SYM_EMBED
