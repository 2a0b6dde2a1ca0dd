"""Dense statevector / matrix realisation of the Phase-theta search.

States are complex numpy vectors, operators complex numpy matrices. The
selective phase operators ``I - (1 - e^{i theta})|x><x|`` are diagonal in
the computational basis and are applied by scaling a single entry (or a
single row / column) rather than by building matrices.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .analytics import DomainError

MAX_HADAMARD_QUBITS = 12
MAX_RECURSION_DEPTH = 20
MAX_RECURSION_DIM = 256

UNITARY_TOL = 1e-10
NORM_TOL = 1e-10
# U^+U is O(N^3); larger matrices come only from trusted constructors
UNITARITY_CHECK_MAX_DIM = 512


class SimulatorLimitError(DomainError):
    """Requested size or depth exceeds the dense-simulation caps."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def unitarity_error(u: np.ndarray) -> float:
    """Largest entry of ``|U^dagger U - I|``."""
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def basis_state(dim: int, index: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise IndexError(f"basis index {index} out of range for dim {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


@dataclass(frozen=True, eq=False)
class SearchInstance:
    """A unitary ``U`` plus the source and target basis indices."""

    unitary: np.ndarray
    s_index: int
    t_index: int

    def __post_init__(self):
        u = np.array(self.unitary, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"unitary must be square, got shape {u.shape}")
        n = u.shape[0]
        for name, idx in (("s_index", self.s_index), ("t_index", self.t_index)):
            if not 0 <= idx < n:
                raise IndexError(f"{name}={idx} out of range for dim {n}")
        err = unitarity_error(u) if n <= UNITARITY_CHECK_MAX_DIM else 0.0
        if err > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max |U^+U - I| = {err:.3g})")
        object.__setattr__(self, "unitary", _readonly(u))

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    @property
    def uts(self) -> complex:
        """Amplitude ``<t|U|s>``."""
        return complex(self.unitary[self.t_index, self.s_index])

    @cached_property
    def eps(self) -> float:
        return min(1.0, max(0.0, 1.0 - abs(self.uts) ** 2))


def hadamard_instance(n_qubits: int, t_index: int) -> SearchInstance:
    """Database search on ``N = 2**n_qubits`` items with ``U = H^{(x)n}`` and ``s = 0``."""
    if not 1 <= n_qubits <= MAX_HADAMARD_QUBITS:
        raise SimulatorLimitError(
            f"n_qubits={n_qubits} outside 1..{MAX_HADAMARD_QUBITS}",
            f"1 <= n_qubits <= {MAX_HADAMARD_QUBITS}")
    n = 1 << n_qubits
    idx = np.arange(n)
    # Sylvester form: H[i, j] = (-1)^popcount(i & j) / sqrt(N)
    bits = np.bitwise_and.outer(idx, idx)
    parity = np.zeros_like(bits)
    while bits.any():
        parity ^= bits & 1
        bits >>= 1
    u = (1.0 - 2.0 * parity) * 2.0 ** (-0.5 * n_qubits)
    return SearchInstance(u.astype(complex), 0, t_index)


def crafted_instance(dim: int, eps: float, s_index: int, t_index: int) -> SearchInstance:
    """Real reflection mapping ``|s>`` onto ``sqrt(1-eps)|t> + sqrt(eps)|w>``.

    ``w`` is the uniform real unit vector over every coordinate except ``t``.
    The resulting instance has ``|<t|U|s>|**2 == 1 - eps`` up to rounding.
    """
    if dim < 2:
        raise DomainError(f"dim={dim} must be >= 2", "dim >= 2")
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"eps={eps!r} outside [0, 1]", "eps in [0, 1]")
    for name, idx in (("s_index", s_index), ("t_index", t_index)):
        if not 0 <= idx < dim:
            raise IndexError(f"{name}={idx} out of range for dim {dim}")
    if s_index == t_index and eps != 0.0:
        raise DomainError("s_index == t_index forces eps = 0", "s != t or eps == 0")

    w = np.full(dim, 1.0 / math.sqrt(dim - 1))
    w[t_index] = 0.0
    v = math.sqrt(eps) * w
    v[t_index] = math.sqrt(1.0 - eps)
    u = -v
    u[s_index] += 1.0
    norm = np.linalg.norm(u)
    if norm < 1e-14:
        return SearchInstance(np.eye(dim, dtype=complex), s_index, t_index)
    u /= norm
    reflection = np.eye(dim) - 2.0 * np.outer(u, u)
    return SearchInstance(reflection.astype(complex), s_index, t_index)


def selective_phase(state: np.ndarray, index: int, theta: float) -> np.ndarray:
    """Apply ``I - (1 - e^{i theta})|index><index|``; returns a new vector."""
    state = np.asarray(state, dtype=complex)
    if not 0 <= index < state.shape[0]:
        raise IndexError(f"index {index} out of range for dim {state.shape[0]}")
    out = state.copy()
    out[index] *= cmath.exp(1j * theta)
    return out


def check_normalized(state: np.ndarray, tol: float = NORM_TOL) -> None:
    norm = float(np.linalg.norm(state))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state norm {norm!r} differs from 1 by more than {tol}")


def one_iteration(instance: SearchInstance, theta: float) -> np.ndarray:
    """``U R_s U^dagger R_t U |s>`` evaluated right to left."""
    u = instance.unitary
    state = u[:, instance.s_index].copy()            # U|s>
    state = selective_phase(state, instance.t_index, theta)
    state = u.conj().T @ state
    state = selective_phase(state, instance.s_index, theta)
    return u @ state


def predicted_final_state(instance: SearchInstance, theta: float) -> np.ndarray:
    """Closed-form final state from ``U|s>`` and ``U_ts`` alone.

    ``U|s> [e^{i theta} + |U_ts|^2 (e^{i theta}-1)^2] + |t> U_ts (e^{i theta}-1)``
    """
    phase = cmath.exp(1j * theta)
    uts = instance.uts
    coeff = phase + abs(uts) ** 2 * (phase - 1.0) ** 2
    out = coeff * instance.unitary[:, instance.s_index]
    out[instance.t_index] += uts * (phase - 1.0)
    return out


def measured_failure(state: np.ndarray, t_index: int) -> float:
    """``1 - |<t|state>|**2`` clipped to [0, 1]."""
    p = abs(complex(state[t_index])) ** 2
    return min(1.0, max(0.0, 1.0 - p))


def _phase_diag(dim: int, index: int, theta: float) -> np.ndarray:
    diag = np.ones(dim, dtype=complex)
    diag[index] = cmath.exp(1j * theta)
    return diag


def iteration_operator(u: np.ndarray, s_index: int, t_index: int, theta: float) -> np.ndarray:
    """Matrix ``U R_s U^dagger R_t U``."""
    n = u.shape[0]
    rt_u = _phase_diag(n, t_index, theta)[:, None] * u     # R_t U
    rs_udag = _phase_diag(n, s_index, theta)[:, None] * u.conj().T
    return u @ (rs_udag @ rt_u)


def amplification_operator(instance: SearchInstance) -> np.ndarray:
    """Textbook amplitude amplification ``U (I - 2|s><s|) U^dagger (I - 2|t><t|) U``.

    Built from explicit reflection matrices, independently of the phase path.
    """
    n = instance.dim
    u = instance.unitary
    refl_s = np.eye(n, dtype=complex)
    refl_s[instance.s_index, instance.s_index] = -1.0
    refl_t = np.eye(n, dtype=complex)
    refl_t[instance.t_index, instance.t_index] = -1.0
    return u @ refl_s @ u.conj().T @ refl_t @ u


def _check_recursion_caps(instance: SearchInstance, m: int) -> None:
    if not 0 <= m <= MAX_RECURSION_DEPTH:
        raise SimulatorLimitError(f"recursion depth {m} outside 0..{MAX_RECURSION_DEPTH}",
                                  f"0 <= m <= {MAX_RECURSION_DEPTH}")
    if instance.dim > MAX_RECURSION_DIM:
        raise SimulatorLimitError(f"dim {instance.dim} exceeds {MAX_RECURSION_DIM} for recursion",
                                  f"dim <= {MAX_RECURSION_DIM}")


def recursion_levels(instance: SearchInstance, theta: float, m: int) -> list[np.ndarray]:
    """``[U_0, ..., U_m]`` with ``U_{k+1} = U_k R_s U_k^dagger R_t U_k`` and ``U_0 = U``."""
    _check_recursion_caps(instance, m)
    levels = [np.array(instance.unitary)]
    for _ in range(m):
        levels.append(iteration_operator(levels[-1], instance.s_index, instance.t_index, theta))
    return levels


def recursion_unitary(instance: SearchInstance, theta: float, m: int) -> np.ndarray:
    return recursion_levels(instance, theta, m)[-1]


def recursion_failures(instance: SearchInstance, theta: float, m: int) -> list[float]:
    """Measured failure of ``U_k|s>`` for k = 0..m."""
    return [measured_failure(level[:, instance.s_index], instance.t_index)
            for level in recursion_levels(instance, theta, m)]
