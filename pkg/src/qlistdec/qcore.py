"""Exact complex state-vector machinery.

States are unit-norm complex vectors over a labelled tensor-factored index
space; composite systems are indexed row-major with the first factor most
significant.  All transforms are dense double-precision matrices with a global
numerical tolerance; nothing here is sampled except `measure`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod

import numpy as np

from .codes import CodeInstance

NORM_TOL = 1e-9
UNITARY_TOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class StateVector:
    """Unit-norm complex amplitude vector with an explicit register factorisation."""

    amplitudes: np.ndarray
    factor_shape: tuple[int, ...]

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        shape = tuple(int(d) for d in self.factor_shape)
        if prod(shape) != amps.size:
            raise ValueError(f"factor shape {shape} does not match dim {amps.size}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "factor_shape", shape)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def factors(self) -> np.ndarray:
        """Amplitudes reshaped to the register factorisation (read-only view)."""
        return self.amplitudes.reshape(self.factor_shape)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def basis_state(index: int, factor_shape: tuple[int, ...]) -> StateVector:
    dim = prod(factor_shape)
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, factor_shape)


def unitarity_defect(matrix: np.ndarray) -> float:
    """Frobenius norm of U†U - I (an upper bound on the operator-norm defect)."""
    m = np.asarray(matrix)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


@dataclass(frozen=True)
class UnitaryMap:
    """Dense unitary matrix; unitarity is checked at construction."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("unitary must be a square matrix")
        if unitarity_defect(m) > UNITARY_TOL:
            raise ValueError("matrix is not unitary within tolerance")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def permutation(cls, perm: np.ndarray) -> UnitaryMap:
        """Unitary sending basis state j to basis state perm[j]."""
        perm = np.asarray(perm, dtype=np.int64)
        n = perm.size
        if sorted(perm.tolist()) != list(range(n)):
            raise ValueError("not a permutation")
        m = np.zeros((n, n), dtype=np.complex128)
        m[perm, np.arange(n)] = 1.0
        obj = cls.__new__(cls)
        object.__setattr__(obj, "matrix", _frozen(m))
        return obj

    @classmethod
    def diagonal(cls, phases: np.ndarray) -> UnitaryMap:
        """Diagonal unitary from unit-modulus entries."""
        d = np.asarray(phases, dtype=np.complex128).reshape(-1)
        if np.max(np.abs(np.abs(d) - 1.0)) > UNITARY_TOL:
            raise ValueError("diagonal entries must have unit modulus")
        obj = cls.__new__(cls)
        object.__setattr__(obj, "matrix", _frozen(np.diag(d)))
        return obj

    def inverse(self) -> UnitaryMap:
        obj = UnitaryMap.__new__(UnitaryMap)
        object.__setattr__(obj, "matrix", _frozen(self.matrix.conj().T))
        return obj


@lru_cache(maxsize=16)
def _qft_matrix(m: int) -> np.ndarray:
    r = np.arange(m, dtype=np.int64)
    phases = np.exp(2j * np.pi * (np.outer(r, r) % m) / m)
    return _frozen(phases / np.sqrt(m))


def qft(m: int) -> UnitaryMap:
    """Fourier transform over the additive group Z_m: entry (r, s) = w_m^(rs)/sqrt(m)."""
    if m < 1:
        raise ValueError(f"transform dimension must be >= 1, got {m}")
    obj = UnitaryMap.__new__(UnitaryMap)
    object.__setattr__(obj, "matrix", _qft_matrix(int(m)))
    return obj


def apply(u: UnitaryMap, state: StateVector) -> StateVector:
    """Matrix-vector product, preserving the register factorisation."""
    if u.dim != state.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {state.dim}")
    return StateVector(u.matrix @ state.amplitudes, state.factor_shape)


def measure(state: StateVector, rng: np.random.Generator) -> int:
    """Sample an outcome index with Born probabilities; deterministic given the rng state."""
    probs = state.probabilities()
    total = probs.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError("cannot measure an unnormalised state")
    cum = np.cumsum(probs)
    u = rng.random() * total
    return min(int(np.searchsorted(cum, u, side="right")), state.dim - 1)


def overlap(s1: StateVector, s2: StateVector) -> complex:
    """Inner product <s1|s2>."""
    if s1.dim != s2.dim:
        raise ValueError("dimension mismatch")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: StateVector, s2: StateVector) -> float:
    return abs(overlap(s1, s2))


def trace_distance(s1: StateVector, s2: StateVector) -> float:
    """Trace distance of two pure states: 2*sqrt(1 - F^2)."""
    f = fidelity(s1, s2)
    return 2.0 * np.sqrt(max(0.0, 1.0 - f * f))


def phase_table(q: int) -> np.ndarray:
    """The q complex roots of unity, index t holding exp(2*pi*i*t/q)."""
    return np.exp(2j * np.pi * np.arange(q) / q)


def codeword_state(code: CodeInstance, x: int, k: int) -> StateVector:
    """k-shuffled codeword state: amplitude w_q^(k*C_x(r))/sqrt(M) at index r.

    The shuffle k must be a nonzero field element, 1 <= k <= q-1.
    """
    if not 1 <= int(k) <= code.q - 1:
        raise ValueError(f"shuffle must lie in [1, {code.q - 1}], got {k}")
    cw = code.codeword(x)
    amps = phase_table(code.q)[(int(k) * cw) % code.q] / np.sqrt(code.M)
    return StateVector(amps, (code.M,))


def pairwise_overlap(code: CodeInstance, x: int, y: int, k: int) -> float:
    """|<C_x^(k)|C_y^(k)>| for two (not necessarily distinct) messages."""
    return fidelity(codeword_state(code, x, k), codeword_state(code, y, k))
