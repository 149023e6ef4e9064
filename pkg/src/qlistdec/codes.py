"""Block-code families used by the simulator.

A code instance is an (M, n)_q block code given by a total evaluation map
(message, index) -> symbol, with messages and indices carried as canonical
integer labels.  Concrete families: q-ary Hadamard codes, pairwise-equality
codes, shifted Legendre symbol codes, circulant codes built from a first row,
and arbitrary table codes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .field import PrimeModulus, legendre

#: brute-force guard for min_distance and codeword tables
MAX_BRUTE_MESSAGES = 1 << 16


def digit_matrix(q: int, n: int) -> np.ndarray:
    """(q**n, n) array whose row x holds the base-q digits of x, most significant first."""
    labels = np.arange(q**n, dtype=np.int64)
    digits = np.empty((q**n, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        digits[:, i] = labels % q
        labels //= q
    return digits


def digits_to_label(digits: Sequence[int], q: int) -> int:
    label = 0
    for d in digits:
        label = label * q + int(d)
    return label


class CodeInstance:
    """Base class: immutable code with alphabet size q, block length M, N messages."""

    q: int
    n: int
    M: int
    N: int

    def __init__(self) -> None:
        self._distance: int | None = None
        self._table: np.ndarray | None = None

    def eval(self, x: int, r: int) -> int:
        raise NotImplementedError

    def codeword(self, x: int) -> np.ndarray:
        """Length-M symbol vector of message x."""
        self._check_message(x)
        return np.array([self.eval(x, r) for r in range(self.M)], dtype=np.int64)

    def codeword_table(self) -> np.ndarray:
        """(N, M) array of all codewords.  Cached; guarded by MAX_BRUTE_MESSAGES."""
        if self._table is None:
            if self.N > MAX_BRUTE_MESSAGES:
                raise ValueError(f"code too large to tabulate (N={self.N})")
            self._table = np.stack([self.codeword(x) for x in range(self.N)])
            self._table.flags.writeable = False
        return self._table

    def distance(self) -> int:
        """Minimum distance; brute force unless a subclass knows it in closed form."""
        if self._distance is None:
            self._distance = min_distance(self)
        return self._distance

    def _check_message(self, x: int) -> None:
        if not 0 <= int(x) < self.N:
            raise ValueError(f"message {x} out of range [0, {self.N})")

    def _check_index(self, r: int) -> None:
        if not 0 <= int(r) < self.M:
            raise ValueError(f"index {r} out of range [0, {self.M})")

    def __repr__(self) -> str:  # pragma: no cover
        return f"{type(self).__name__}(q={self.q}, M={self.M}, N={self.N})"


def had_eval(x_digits: Sequence[int], r_digits: Sequence[int], q: int) -> int:
    """Mod-q inner product of two digit vectors of equal length."""
    if len(x_digits) != len(r_digits):
        raise ValueError("digit vectors must have equal length")
    return int(sum(int(a) * int(b) for a, b in zip(x_digits, r_digits)) % q)


def peq_eval(x_bits: Sequence[int], r_bits: Sequence[int]) -> int:
    """XOR over the n/2 disjoint bit pairs of the pairwise equality predicate."""
    n = len(x_bits)
    if n != len(r_bits):
        raise ValueError("bit strings must have equal length")
    if n % 2 != 0 or n == 0:
        raise ValueError("message length must be even and positive")
    acc = 0
    for i in range(n // 2):
        eq = x_bits[2 * i] == r_bits[2 * i] and x_bits[2 * i + 1] == r_bits[2 * i + 1]
        acc ^= int(eq)
    return acc


def sls_eval(x: int, r: int, p: int) -> int:
    """1 iff x + r is a quadratic non-residue modulo the odd prime p, else 0."""
    return 1 if legendre(int(x) + int(r), p) == -1 else 0


class HadamardCode(CodeInstance):
    """q-ary Hadamard code: n-digit messages, symbol at r is the mod-q inner product <x, r>."""

    def __init__(self, q: int, n: int):
        super().__init__()
        self.q = PrimeModulus(q).p
        if n < 1:
            raise ValueError("message length must be >= 1")
        self.n = int(n)
        self.M = self.N = self.q**self.n
        self._digits = digit_matrix(self.q, self.n)

    def message_digits(self, x: int) -> tuple[int, ...]:
        self._check_message(x)
        return tuple(int(d) for d in self._digits[x])

    def eval(self, x: int, r: int) -> int:
        self._check_message(x)
        self._check_index(r)
        return int(self._digits[x] @ self._digits[r] % self.q)

    def codeword(self, x: int) -> np.ndarray:
        self._check_message(x)
        return (self._digits @ self._digits[x]) % self.q

    def distance(self) -> int:
        # every nonzero codeword has exactly q^(n-1) zero positions
        return (self.q - 1) * self.q ** (self.n - 1)


class PairwiseEqualityCode(CodeInstance):
    """Binary code on even-length messages: XOR of equality checks over disjoint bit pairs."""

    def __init__(self, n: int):
        super().__init__()
        if n < 2 or n % 2 != 0:
            raise ValueError("message length must be even and >= 2")
        self.q = 2
        self.n = int(n)
        self.M = self.N = 2**self.n
        # row x holds the n/2 two-bit pair values of x, most significant pair first
        self._pairs = digit_matrix(4, self.n // 2)

    def message_bits(self, x: int) -> tuple[int, ...]:
        self._check_message(x)
        return tuple((x >> (self.n - 1 - i)) & 1 for i in range(self.n))

    def eval(self, x: int, r: int) -> int:
        self._check_message(x)
        self._check_index(r)
        return int(np.count_nonzero(self._pairs[x] == self._pairs[r]) % 2)

    def codeword(self, x: int) -> np.ndarray:
        self._check_message(x)
        return (self._pairs == self._pairs[x]).sum(axis=1) % 2

    def distance(self) -> int:
        # any two distinct codewords differ in exactly half the positions
        return self.M // 2


class ShiftedLegendreCode(CodeInstance):
    """Binary code over Z_p: bit r records whether x + r is a non-residue mod p."""

    def __init__(self, p: int):
        super().__init__()
        mod = PrimeModulus(p)
        if not mod.is_odd:
            raise ValueError("shifted Legendre codes need an odd prime")
        self.p = mod.p
        self.q = 2
        self.n = max(1, (self.p - 1).bit_length())
        self.M = self.N = self.p
        self._nonresidue = np.array(
            [1 if legendre(t, mod) == -1 else 0 for t in range(self.p)], dtype=np.int64
        )

    def eval(self, x: int, r: int) -> int:
        self._check_message(x)
        self._check_index(r)
        return int(self._nonresidue[(x + r) % self.p])

    def codeword(self, x: int) -> np.ndarray:
        self._check_message(x)
        return np.roll(self._nonresidue, -int(x))


class CirculantCode(CodeInstance):
    """Code whose evaluation matrix is circulant: C_i(j) = row[(j - i) mod M]."""

    def __init__(self, first_row: Sequence[int], q: int):
        super().__init__()
        row = np.asarray(first_row, dtype=np.int64)
        if row.ndim != 1 or row.size == 0:
            raise ValueError("first row must be a nonempty 1-D symbol vector")
        if row.min() < 0 or row.max() >= q:
            raise ValueError("symbols out of range")
        self.q = int(q)
        self.M = self.N = int(row.size)
        self.n = max(1, (self.N - 1).bit_length())
        self._row = row

    def eval(self, i: int, j: int) -> int:
        self._check_message(i)
        self._check_index(j)
        return int(self._row[(j - i) % self.M])

    def codeword(self, i: int) -> np.ndarray:
        self._check_message(i)
        return np.roll(self._row, int(i))


def sls_circulant(p: int) -> CirculantCode:
    """Negated-index companion of the shifted Legendre code: C_i(j) = SLS_{-i}(j)."""
    return CirculantCode(ShiftedLegendreCode(p).codeword(0), 2)


class TableCode(CodeInstance):
    """Arbitrary code given by an explicit (N, M) symbol table."""

    def __init__(self, table: np.ndarray, q: int):
        super().__init__()
        tab = np.asarray(table, dtype=np.int64)
        if tab.ndim != 2 or tab.size == 0:
            raise ValueError("table must be a nonempty 2-D array")
        if tab.min() < 0 or tab.max() >= q:
            raise ValueError("symbols out of range")
        self.q = int(q)
        self.N, self.M = tab.shape
        self.n = max(1, (self.N - 1).bit_length())
        self._table = tab.copy()
        self._table.flags.writeable = False

    def eval(self, x: int, r: int) -> int:
        self._check_message(x)
        self._check_index(r)
        return int(self._table[x, r])

    def codeword(self, x: int) -> np.ndarray:
        self._check_message(x)
        return self._table[x]

    def codeword_table(self) -> np.ndarray:
        return self._table


def load_table_code(path: str, q: int) -> TableCode:
    """Read a table code from a text file, one codeword per line, space-separated symbols."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([int(tok) for tok in line.split()])
    if not rows:
        raise ValueError(f"no codewords in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError("codeword lines have inconsistent lengths")
    return TableCode(np.array(rows), q)


def hamming_distance(c1: np.ndarray, c2: np.ndarray) -> int:
    """Number of positions where the two symbol vectors differ."""
    a = np.asarray(c1)
    b = np.asarray(c2)
    if a.shape != b.shape:
        raise ValueError("length mismatch")
    return int(np.count_nonzero(a != b))


def relative_distance(c1: np.ndarray, c2: np.ndarray) -> float:
    return hamming_distance(c1, c2) / len(np.asarray(c1))


def min_distance(code: CodeInstance) -> int:
    """Brute-force minimum distance over all message pairs.

    A single-message code has no pairs; by convention its distance is M.
    """
    if code.N > MAX_BRUTE_MESSAGES:
        raise ValueError(f"code too large for brute force (N={code.N})")
    if code.N == 1:
        return code.M
    table = code.codeword_table()
    best = code.M
    for x in range(code.N - 1):
        diffs = np.count_nonzero(table[x + 1 :] != table[x], axis=1)
        best = min(best, int(diffs.min()))
        if best == 0:
            break
    return best


def is_circulant(code: CodeInstance) -> bool:
    """True iff the (message x index) evaluation matrix is circulant.  Needs M == N."""
    if code.M != code.N:
        raise ValueError("circulant check requires M == N")
    table = code.codeword_table()
    shifted = np.stack([np.roll(table[0], i) for i in range(code.N)])
    return bool(np.array_equal(table, shifted))


def legendre_generator_bits(p: int, x: int, length: int) -> str:
    """Bit stream of the Legendre generator: SLS bits of message x at indices 0..length-1."""
    code = ShiftedLegendreCode(p)
    if not 0 <= length <= code.M:
        raise ValueError(f"length must be in [0, {code.M}]")
    cw = code.codeword(int(x) % code.M)
    return "".join(str(int(b)) for b in cw[:length])
