"""Two-query codeword-state extraction from a corrupted oracle.

The procedure: put the index register into a uniform superposition, query the
oracle once, multiply each symbol value z by the phase w_q^(k*z) (phase
encoding), and query the inverse oracle once.  The result decomposes as

    |psi_k>  =  kappa * |C_x^(k)> |0>|0..0>  +  |rest>,

where the clean component's amplitude has the closed form

    kappa  =  (1/M) * sum_r sum_z  w_q^(k*(z - C_x(r))) * |alpha_{r,z}|^2,

computable white-box from the oracle's amplitude table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeInstance
from .oracle import CorruptedCodewordOracle
from .qcore import StateVector, codeword_state, phase_table


@dataclass(frozen=True)
class ExtractedState:
    """Output of the two-query extraction; the shuffle index is a classical tag."""

    shuffle: int
    state: StateVector
    queries_used: int


def _check_shuffle(q: int, k: int) -> int:
    k = int(k)
    if not 1 <= k <= q - 1:
        raise ValueError(f"shuffle must lie in [1, {q - 1}], got {k}")
    return k


def extract_codeword_state(oracle: CorruptedCodewordOracle, k: int) -> ExtractedState:
    """Run the two-query extraction for shuffle k.  Consumes exactly 2 queries."""
    k = _check_shuffle(oracle.q, k)
    m, q, g = oracle.factor_shape
    before = oracle.queries

    amps = np.zeros((m, q, g), dtype=np.complex128)
    amps[:, 0, 0] = 1.0 / np.sqrt(m)
    state = oracle.apply(StateVector(amps, oracle.factor_shape))

    phases = phase_table(q)[(k * np.arange(q)) % q]
    encoded = state.factors() * phases[None, :, None]
    state = oracle.apply_inverse(StateVector(encoded, oracle.factor_shape))

    used = oracle.queries - before
    return ExtractedState(shuffle=k, state=state, queries_used=used)


def clean_amplitude(oracle: CorruptedCodewordOracle, code: CodeInstance, x: int, k: int) -> complex:
    """Closed-form amplitude of the clean shuffled codeword state of x inside the
    extracted state, computed from the white-box amplitude table."""
    k = _check_shuffle(oracle.q, k)
    prob = oracle.probability_table  # (M, q)
    q = oracle.q
    roots = phase_table(q)
    symbol_phase = prob @ roots[(k * np.arange(q)) % q]  # sum_z w^{kz} |a_{r,z}|^2
    cw = code.codeword(x)
    return complex(np.mean(symbol_phase * roots[(-k * cw) % q]))


def extracted_overlap(extracted: ExtractedState, code: CodeInstance, x: int) -> complex:
    """Black-box counterpart of `clean_amplitude`: the inner product of the
    generated state with |C_x^(k)> on the index register and zeros elsewhere."""
    target = codeword_state(code, x, extracted.shuffle)
    clean_slice = extracted.state.factors()[:, 0, 0]
    return complex(np.vdot(target.amplitudes, clean_slice))


def best_shuffle(
    oracle: CorruptedCodewordOracle, code: CodeInstance, x: int
) -> tuple[int, float]:
    """The shuffle with the largest clean-component magnitude, and that magnitude."""
    best_k, best_val = 1, -1.0
    for k in range(1, oracle.q):
        val = abs(clean_amplitude(oracle, code, x, k))
        if val > best_val:
            best_k, best_val = k, val
    return best_k, best_val
