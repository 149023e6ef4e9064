"""Corrupted-codeword oracles.

An oracle acts on an (index, symbol, garbage) register triple of dimension
M * q * 2**l.  For each index value r it applies a unitary block V_r to the
symbol-and-garbage registers; the designated input (symbol 0, garbage 0)
responds with the stored amplitude table,

    V_r |0>|0..0>  =  sum_s alpha_{r,s} |s> |phi_{r,s}>,

and symbols combine by addition mod q (plain XOR when q = 2).  The per-(r, s)
amplitudes alpha and garbage states phi are retained for white-box analysis:
presence, flip counts, and closed-form overlap formulas never touch the
completed unitaries.

Amplitude-table text format (see `read_amplitude_table`): a header line
``q M l`` followed by one line per nonzero entry,

    r s re im [g0_re g0_im g1_re g1_im ...]

where the optional 2**l garbage amplitudes default to the all-zero basis
state.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .codes import CodeInstance
from .qcore import StateVector, UnitaryMap

MAX_GARBAGE_BITS = 8
# refuse to materialise block stacks beyond this many complex entries
MAX_BLOCK_ENTRIES = 1 << 22
TABLE_TOL = 1e-9
_GS_TOL = 1e-7


class _QueryCounter:
    """Monotone query counter, safe to bump from concurrent trials."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._value = 0

    def add(self, amount: int = 1) -> None:
        with self._lock:
            self._value += amount

    @property
    def value(self) -> int:
        return self._value


@dataclass(frozen=True)
class AmplitudeTable:
    """Per-(index, symbol) amplitudes with attached unit-norm garbage states."""

    q: int
    block_length: int
    garbage_bits: int
    alphas: np.ndarray  # (M, q) complex
    garbage: np.ndarray  # (M, q, 2**garbage_bits) complex

    def __post_init__(self) -> None:
        if self.garbage_bits < 0 or self.garbage_bits > MAX_GARBAGE_BITS:
            raise ValueError(f"garbage register limited to {MAX_GARBAGE_BITS} bits")
        g = 1 << self.garbage_bits
        alphas = np.asarray(self.alphas, dtype=np.complex128)
        garbage = np.asarray(self.garbage, dtype=np.complex128)
        if alphas.shape != (self.block_length, self.q):
            raise ValueError("amplitude array has wrong shape")
        if garbage.shape != (self.block_length, self.q, g):
            raise ValueError("garbage array has wrong shape")
        row_norms = np.sum(np.abs(alphas) ** 2, axis=1)
        if np.max(np.abs(row_norms - 1.0)) > TABLE_TOL:
            raise ValueError("invalid table: per-index amplitudes are not normalised")
        active = np.abs(alphas) > 1e-12
        g_norms = np.linalg.norm(garbage, axis=2)
        if np.any(np.abs(g_norms[active] - 1.0) > TABLE_TOL):
            raise ValueError("invalid table: garbage states must have unit norm")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "garbage", garbage)

    def designated_columns(self) -> np.ndarray:
        """(M, q * 2**l) response vectors of the designated input, one per index."""
        cols = self.alphas[:, :, None] * self.garbage
        return cols.reshape(self.block_length, -1)


def _shift_blocks(symbols: np.ndarray, q: int, garbage_bits: int) -> np.ndarray:
    """Permutation blocks adding symbols[r] to the symbol register, identity on garbage."""
    g = 1 << garbage_bits
    b = q * g
    shifts = np.zeros((q, b, b), dtype=np.complex128)
    eye_g = np.eye(g)
    for s in range(q):
        for u in range(q):
            shifts[s, ((u + s) % q) * g : ((u + s) % q + 1) * g, u * g : (u + 1) * g] = eye_g
    return shifts[symbols]


def _complete_block(column: np.ndarray) -> np.ndarray:
    """Extend one unit column to a full unitary by Gram-Schmidt.

    Candidate columns are the standard basis vectors in ascending index, with a
    re-orthogonalisation pass; near-dependent candidates are skipped.
    """
    b = column.size
    basis = np.eye(b, dtype=np.complex128)
    q_mat = column.reshape(b, 1).astype(np.complex128)
    for i in range(b):
        if q_mat.shape[1] == b:
            break
        v = basis[:, i].copy()
        for _ in range(2):
            v -= q_mat @ (q_mat.conj().T @ v)
        nrm = np.linalg.norm(v)
        if nrm > _GS_TOL:
            q_mat = np.concatenate([q_mat, (v / nrm).reshape(b, 1)], axis=1)
    if q_mat.shape[1] != b:
        raise ValueError("unitary completion failed (degenerate column)")
    return q_mat


def _complete_blocks(columns: np.ndarray) -> np.ndarray:
    """Batch unitary completion of all designated columns.

    Uses a batched QR factorisation of [column | e_0 .. e_{B-2}] with the
    phases fixed so the designated column is reproduced exactly; blocks where
    that candidate set is rank-deficient fall back to the scalar loop.
    """
    m, b = columns.shape
    if b == 1:
        return (columns / np.abs(columns)).reshape(m, 1, 1)
    a = np.zeros((m, b, b), dtype=np.complex128)
    a[:, :, 0] = columns
    a[:, :, 1:] = np.eye(b, dtype=np.complex128)[:, : b - 1][None, :, :]
    q_all, r_all = np.linalg.qr(a)
    diag = np.einsum("mii->mi", r_all)
    ok = np.min(np.abs(diag), axis=1) > _GS_TOL
    safe = np.where(np.abs(diag) > 0, diag, 1.0)
    q_all = q_all * (safe / np.abs(safe))[:, None, :]
    for r in np.nonzero(~ok)[0]:
        q_all[r] = _complete_block(columns[r])
    return q_all


class CorruptedCodewordOracle:
    """Unitary oracle representing a (possibly corrupted) codeword.

    White-box accessors (`probability_table`, `presence`, designated columns)
    are free; `apply`/`apply_inverse` consume one query each and bump a
    monotone counter.  Unitary blocks are completed lazily on first
    application.
    """

    def __init__(
        self,
        q: int,
        block_length: int,
        garbage_bits: int,
        columns: np.ndarray,
        blocks: np.ndarray | None = None,
        block_builder=None,
        symbol_table: np.ndarray | None = None,
    ):
        if garbage_bits < 0 or garbage_bits > MAX_GARBAGE_BITS:
            raise ValueError(f"garbage register limited to {MAX_GARBAGE_BITS} bits")
        self.q = int(q)
        self.block_length = int(block_length)
        self.garbage_bits = int(garbage_bits)
        self.block_dim = self.q * (1 << self.garbage_bits)
        cols = np.asarray(columns, dtype=np.complex128)
        if cols.shape != (self.block_length, self.block_dim):
            raise ValueError("designated columns have wrong shape")
        norms = np.linalg.norm(cols, axis=1)
        if np.max(np.abs(norms - 1.0)) > TABLE_TOL:
            raise ValueError("designated columns must have unit norm")
        self._columns = cols
        self._columns.flags.writeable = False
        if blocks is not None:
            blocks = np.asarray(blocks, dtype=np.complex128)
            blocks.flags.writeable = False
        self._blocks = blocks
        self._block_builder = block_builder
        self.symbol_table = symbol_table
        self._counter = _QueryCounter()

    # -- white-box accessors -------------------------------------------------

    @property
    def queries(self) -> int:
        return self._counter.value

    @property
    def factor_shape(self) -> tuple[int, int, int]:
        return (self.block_length, self.q, 1 << self.garbage_bits)

    @property
    def dim(self) -> int:
        return self.block_length * self.block_dim

    @property
    def designated_columns(self) -> np.ndarray:
        return self._columns

    @property
    def probability_table(self) -> np.ndarray:
        """(M, q) table of |alpha_{r,s}|^2, marginalised over the garbage register."""
        g = 1 << self.garbage_bits
        cols = self._columns.reshape(self.block_length, self.q, g)
        return np.sum(np.abs(cols) ** 2, axis=2)

    def presence(self, code: CodeInstance, x: int) -> float:
        """Average designated-symbol weight along the codeword of x."""
        self._check_code(code)
        cw = code.codeword(x)
        p = self.probability_table
        return float(p[np.arange(self.block_length), cw].mean())

    def presences(self, code: CodeInstance) -> np.ndarray:
        """Presence of every message of the code, as a length-N vector."""
        self._check_code(code)
        table = code.codeword_table()
        p = self.probability_table
        return p[np.arange(self.block_length)[None, :], table].mean(axis=1)

    def _check_code(self, code: CodeInstance) -> None:
        if code.M != self.block_length or code.q != self.q:
            raise ValueError("code parameters do not match the oracle")

    # -- unitary application -------------------------------------------------

    def blocks(self) -> np.ndarray:
        if self._blocks is None:
            if self.block_length * self.block_dim**2 > MAX_BLOCK_ENTRIES:
                raise ValueError("oracle too large to materialise unitary blocks")
            builder = self._block_builder or (lambda: _complete_blocks(self._columns))
            blocks = builder()
            blocks.flags.writeable = False
            self._blocks = blocks
        return self._blocks

    def _apply_blocks(self, state: StateVector, inverse: bool) -> StateVector:
        if state.factor_shape != self.factor_shape:
            raise ValueError(
                f"state factors {state.factor_shape} do not match oracle {self.factor_shape}"
            )
        blocks = self.blocks()
        if inverse:
            blocks = blocks.conj().transpose(0, 2, 1)
        mat = state.amplitudes.reshape(self.block_length, self.block_dim)
        out = np.matmul(blocks, mat[:, :, None])[:, :, 0]
        self._counter.add(1)
        return StateVector(out.reshape(-1), state.factor_shape)

    def apply(self, state: StateVector) -> StateVector:
        """One oracle query: apply V_r blockwise over the index register."""
        return self._apply_blocks(state, inverse=False)

    def apply_inverse(self, state: StateVector) -> StateVector:
        """One query to the inverse oracle (counted the same as a forward query)."""
        return self._apply_blocks(state, inverse=True)

    def clone(self) -> CorruptedCodewordOracle:
        """Same oracle tables, fresh query counter."""
        twin = CorruptedCodewordOracle(
            self.q,
            self.block_length,
            self.garbage_bits,
            self._columns,
            blocks=self._blocks,
            block_builder=self._block_builder,
            symbol_table=self.symbol_table,
        )
        return twin


# -- constructors -------------------------------------------------------------


def _classical_oracle(code: CodeInstance, symbols: np.ndarray) -> CorruptedCodewordOracle:
    cols = np.zeros((code.M, code.q), dtype=np.complex128)
    cols[np.arange(code.M), symbols] = 1.0
    return CorruptedCodewordOracle(
        code.q,
        code.M,
        0,
        cols,
        block_builder=lambda: _shift_blocks(symbols, code.q, 0),
        symbol_table=symbols,
    )


def from_perfect(code: CodeInstance, x: int) -> CorruptedCodewordOracle:
    """Oracle of the uncorrupted codeword of x; presence of x is exactly 1."""
    return _classical_oracle(code, code.codeword(x))


def from_symmetric_noise(
    code: CodeInstance, x: int, rate: float, rng: np.random.Generator
) -> CorruptedCodewordOracle:
    """Classical symmetric corruption: each position is independently replaced,
    with probability `rate`, by a uniformly random wrong symbol."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"noise rate must lie in [0, 1], got {rate}")
    symbols = code.codeword(x).copy()
    flip = rng.random(code.M) < rate
    offsets = rng.integers(1, code.q, size=code.M)
    symbols[flip] = (symbols[flip] + offsets[flip]) % code.q
    return _classical_oracle(code, symbols)


def from_amplitude_table(table: AmplitudeTable) -> CorruptedCodewordOracle:
    """Oracle whose designated columns reproduce the table exactly; the remaining
    block columns are filled in by deterministic Gram-Schmidt completion."""
    return CorruptedCodewordOracle(
        table.q,
        table.block_length,
        table.garbage_bits,
        table.designated_columns(),
    )


def from_predictor(
    predictor: UnitaryMap, q: int, garbage_bits: int
) -> CorruptedCodewordOracle:
    """Wrap a predictor unitary over (index, symbol, garbage) as an oracle.

    The predictor must be block-diagonal over the index register; anything
    that moves amplitude between index values is rejected.
    """
    b = q * (1 << garbage_bits)
    if predictor.dim % b != 0:
        raise ValueError("predictor dimension is not divisible by the block dimension")
    m = predictor.dim // b
    u4 = predictor.matrix.reshape(m, b, m, b)
    diag_blocks = np.ascontiguousarray(np.einsum("rbsc,rs->rbc", u4, np.eye(m)))
    leak = u4.copy()
    leak[np.arange(m), :, np.arange(m), :] = 0.0
    if np.max(np.abs(leak)) > TABLE_TOL:
        raise ValueError("invalid predictor: amplitude moves across index values")
    return CorruptedCodewordOracle(
        q,
        m,
        garbage_bits,
        diag_blocks[:, :, 0].copy(),
        blocks=diag_blocks,
    )


def random_amplitude_table(
    q: int, block_length: int, garbage_bits: int, rng: np.random.Generator
) -> AmplitudeTable:
    """Haar-like random designated columns, decomposed into amplitudes and garbage."""
    g = 1 << garbage_bits
    w = rng.normal(size=(block_length, q * g)) + 1j * rng.normal(size=(block_length, q * g))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    w = w.reshape(block_length, q, g)
    alphas = np.linalg.norm(w, axis=2)
    garbage = np.zeros_like(w)
    garbage[:, :, 0] = 1.0
    active = alphas > 1e-12
    garbage[active] = w[active] / alphas[active][:, None]
    return AmplitudeTable(q, block_length, garbage_bits, alphas.astype(np.complex128), garbage)


def coherent_predictor(code: CodeInstance, x: int, presence: float) -> UnitaryMap:
    """Block-diagonal predictor unitary whose presence for x is exactly `presence`:
    every index answers with amplitude sqrt(presence) on the correct symbol and
    the residual weight spread uniformly over the wrong ones."""
    if not 0.0 <= presence <= 1.0:
        raise ValueError("presence must lie in [0, 1]")
    cw = code.codeword(x)
    cols = np.full((code.M, code.q), np.sqrt((1.0 - presence) / (code.q - 1)), dtype=np.complex128)
    cols[np.arange(code.M), cw] = np.sqrt(presence)
    blocks = _complete_blocks(cols)
    dense = np.zeros((code.M * code.q, code.M * code.q), dtype=np.complex128)
    for r in range(code.M):
        dense[r * code.q : (r + 1) * code.q, r * code.q : (r + 1) * code.q] = blocks[r]
    return UnitaryMap(dense)


# -- noise specifications and table files --------------------------------------

NOISE_MODELS = ("perfect", "symmetric", "table", "predictor")


@dataclass(frozen=True)
class NoiseSpec:
    """How to corrupt a codeword: model name, corruption rate, optional table file."""

    model: str = "perfect"
    rate: float = 0.0
    table_path: str | None = None

    def __post_init__(self) -> None:
        if self.model not in NOISE_MODELS:
            raise ValueError(f"unknown noise model {self.model!r}; pick one of {NOISE_MODELS}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"noise rate must lie in [0, 1], got {self.rate}")
        if self.model == "table" and not self.table_path:
            raise ValueError("table noise needs a table file path")


def build_oracle(
    code: CodeInstance, x: int, spec: NoiseSpec, rng: np.random.Generator | None = None
) -> CorruptedCodewordOracle:
    """Construct the oracle described by a noise specification."""
    if spec.model == "perfect":
        return from_perfect(code, x)
    if spec.model == "symmetric":
        if rng is None:
            raise ValueError("symmetric noise needs a random generator")
        return from_symmetric_noise(code, x, spec.rate, rng)
    if spec.model == "table":
        table = read_amplitude_table(spec.table_path)
        if table.q != code.q or table.block_length != code.M:
            raise ValueError("amplitude table does not match the code parameters")
        return from_amplitude_table(table)
    return from_predictor(coherent_predictor(code, x, 1.0 - spec.rate), code.q, 0)


def write_amplitude_table(table: AmplitudeTable, path: str) -> None:
    g = 1 << table.garbage_bits
    lines = [f"{table.q} {table.block_length} {table.garbage_bits}"]
    for r in range(table.block_length):
        for s in range(table.q):
            a = table.alphas[r, s]
            if abs(a) <= 1e-15:
                continue
            parts = [str(r), str(s), repr(a.real), repr(a.imag)]
            if table.garbage_bits > 0:
                for t in range(g):
                    gv = table.garbage[r, s, t]
                    parts.extend([repr(gv.real), repr(gv.imag)])
            lines.append(" ".join(parts))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_amplitude_table(path: str) -> AmplitudeTable:
    with open(path) as fh:
        raw = [ln.strip() for ln in fh]
    rows = [ln for ln in raw if ln and not ln.startswith("#")]
    if not rows:
        raise ValueError(f"empty amplitude table {path}")
    header = rows[0].split()
    if len(header) != 3:
        raise ValueError("header must be 'q M l'")
    q, m, l = (int(tok) for tok in header)
    g = 1 << l
    alphas = np.zeros((m, q), dtype=np.complex128)
    garbage = np.zeros((m, q, g), dtype=np.complex128)
    garbage[:, :, 0] = 1.0
    for ln in rows[1:]:
        toks = ln.split()
        if len(toks) not in (4, 4 + 2 * g):
            raise ValueError(f"malformed table line: {ln!r}")
        r, s = int(toks[0]), int(toks[1])
        if not (0 <= r < m and 0 <= s < q):
            raise ValueError(f"table entry out of range: {ln!r}")
        alphas[r, s] = float(toks[2]) + 1j * float(toks[3])
        if len(toks) > 4:
            vals = np.array([float(t) for t in toks[4:]])
            garbage[r, s] = vals[0::2] + 1j * vals[1::2]
    return AmplitudeTable(q, m, l, alphas, garbage)
