"""Exact scalar field Q(i) and dense exact/float matrix linear algebra.

The scalar field is the Gaussian rationals: numbers a + b*i with
arbitrary-precision rational a, b.  Every symbolic computation in the
package runs over this field so that zero tests are exact decisions.
Float matrices (numpy complex arrays) are used only by the numeric
samplers and falsifiers.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, SingularMatrixError

_F0 = Fraction(0)
_F1 = Fraction(1)

#: tolerance for all float residual checks (configurable by callers)
FLOAT_TOL = 1e-10


def _mk(re: Fraction, im: Fraction) -> "Scalar":
    # internal fast constructor; arguments must already be Fractions
    s = Scalar.__new__(Scalar)
    s.re = re
    s.im = im
    return s


class Scalar:
    """An exact Gaussian rational ``re + im*i``.

    Immutable; equality is structural (Fractions are kept in lowest terms
    with positive denominator by construction).
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_json(pair) -> "Scalar":
        """Build from a ``["re", "im"]`` pair of rational strings."""
        return Scalar(Fraction(str(pair[0])), Fraction(str(pair[1])))

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return _mk(self.re + other.re, self.im + other.im)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        other = _coerce(other)
        return _mk(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __neg__(self):
        return _mk(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return _mk(a * c, _F0)
        return _mk(a * c - b * d, a * d + b * c)

    def __rmul__(self, other):
        return self.__mul__(other)

    def inverse(self) -> "Scalar":
        a, b = self.re, self.im
        if not a and not b:
            raise ZeroDivisionError("inverse of zero scalar")
        if not b:
            return _mk(1 / a, _F0)
        n = a * a + b * b
        return _mk(a / n, -b / n)

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def conjugate(self) -> "Scalar":
        return _mk(self.re, -self.im)

    # -- structure --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def to_json(self):
        return [str(self.re), str(self.im)]

    def __repr__(self):
        return f"Scalar({self.re!s}, {self.im!s})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}i)"


def _coerce(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction, str)):
        return _mk(Fraction(x), _F0)
    raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


class ExactMatrix:
    """Dense matrix over the Gaussian rationals, row-major storage.

    Values are immutable after construction; all operations return fresh
    matrices, so instances are safe to share.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise DimensionMismatch(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = entries

    # -- constructors -----------------------------------------------------

    @staticmethod
    def from_rows(rows_of_entries) -> "ExactMatrix":
        rows = [[_coerce(x) for x in row] for row in rows_of_entries]
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise DimensionMismatch("ragged rows")
        return ExactMatrix(r, c, [x for row in rows for x in row])

    @staticmethod
    def zeros(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix(rows, cols, [ZERO] * (rows * cols))

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        e = [ZERO] * (n * n)
        for i in range(n):
            e[i * n + i] = ONE
        return ExactMatrix(n, n, e)

    @staticmethod
    def scalar(n: int, value) -> "ExactMatrix":
        """value * I_n."""
        v = _coerce(value)
        e = [ZERO] * (n * n)
        for i in range(n):
            e[i * n + i] = v
        return ExactMatrix(n, n, e)

    @staticmethod
    def unit(n: int, i: int, j: int) -> "ExactMatrix":
        """Matrix unit E_ij (0-based) of size n."""
        e = [ZERO] * (n * n)
        e[i * n + j] = ONE
        return ExactMatrix(n, n, e)

    # -- access -----------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def col(self, j):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(not x for x in self.entries)

    # -- arithmetic -------------------------------------------------------

    def _binop_check(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __add__(self, other):
        self._binop_check(other)
        return ExactMatrix(
            self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)]
        )

    def __sub__(self, other):
        self._binop_check(other)
        return ExactMatrix(
            self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)]
        )

    def __neg__(self):
        return ExactMatrix(self.rows, self.cols, [-a for a in self.entries])

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            return matrix_product(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        # scalar * matrix
        return self.scale(other)

    def scale(self, value) -> "ExactMatrix":
        v = _coerce(value)
        return ExactMatrix(self.rows, self.cols, [v * a for a in self.entries])

    def conjugate_transpose(self) -> "ExactMatrix":
        e = []
        for j in range(self.cols):
            for i in range(self.rows):
                e.append(self.entries[i * self.cols + j].conjugate())
        return ExactMatrix(self.cols, self.rows, e)

    def transpose(self) -> "ExactMatrix":
        e = []
        for j in range(self.cols):
            for i in range(self.rows):
                e.append(self.entries[i * self.cols + j])
        return ExactMatrix(self.cols, self.rows, e)

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        """Kronecker product self (x) other."""
        R, C = self.rows * other.rows, self.cols * other.cols
        e = [ZERO] * (R * C)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.entries[i * self.cols + j]
                if not a:
                    continue
                for k in range(other.rows):
                    base = (i * other.rows + k) * C + j * other.cols
                    orow = k * other.cols
                    for l in range(other.cols):
                        e[base + l] = a * other.entries[orow + l]
        return ExactMatrix(R, C, e)

    # -- structure --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        rows = [
            "[" + ", ".join(str(x) for x in self.row(i)) + "]"
            for i in range(self.rows)
        ]
        return f"ExactMatrix([{', '.join(rows)}])"

    # -- conversion -------------------------------------------------------

    def to_float(self) -> np.ndarray:
        a = np.empty((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                a[i, j] = self.entries[i * self.cols + j].to_complex()
        return a

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [x.to_json() for x in self.entries],
        }

    @staticmethod
    def from_json(obj) -> "ExactMatrix":
        return ExactMatrix(
            int(obj["rows"]),
            int(obj["cols"]),
            [Scalar.from_json(p) for p in obj["entries"]],
        )


def matrix_product(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Exact matrix product; raises DimensionMismatch if a.cols != b.rows."""
    if a.cols != b.rows:
        raise DimensionMismatch(f"{a.rows}x{a.cols} times {b.rows}x{b.cols}")
    n, k, m = a.rows, a.cols, b.cols
    ae, be = a.entries, b.entries
    out = [ZERO] * (n * m)
    for i in range(n):
        arow = i * k
        orow = i * m
        for t in range(k):
            x = ae[arow + t]
            if not x:
                continue
            brow = t * m
            for j in range(m):
                y = be[brow + j]
                if y:
                    out[orow + j] = out[orow + j] + x * y
    return ExactMatrix(n, m, out)


def matrix_inverse(a: ExactMatrix) -> ExactMatrix:
    """Exact inverse by Gauss-Jordan elimination with first-nonzero pivoting.

    Raises SingularMatrixError when no inverse exists (e.g. the evaluation
    point lies outside a domain of regularity).
    """
    if not a.is_square:
        raise DimensionMismatch("inverse of a non-square matrix")
    n = a.rows
    work = [list(a.row(i)) + list(ExactMatrix.identity(n).row(i)) for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if work[r][col]:
                piv = r
                break
        if piv is None:
            raise SingularMatrixError(f"matrix of size {n} is singular")
        work[col], work[piv] = work[piv], work[col]
        inv_p = work[col][col].inverse()
        work[col] = [x * inv_p for x in work[col]]
        prow = work[col]
        for r in range(n):
            if r == col:
                continue
            f = work[r][col]
            if f:
                work[r] = [x - f * y for x, y in zip(work[r], prow)]
    return ExactMatrix(n, n, [work[i][n + j] for i in range(n) for j in range(n)])


def conjugate_transpose(a):
    """Conjugate transpose of an exact or float matrix."""
    if isinstance(a, ExactMatrix):
        return a.conjugate_transpose()
    return np.conj(np.asarray(a)).T


# ---------------------------------------------------------------------------
# Exact elimination utilities
# ---------------------------------------------------------------------------


def rref(rows):
    """Reduced row echelon form of a list of Scalar rows.

    Returns (new_rows, pivot_columns).  Input rows are not modified.
    """
    work = [list(r) for r in rows]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for k in range(r, nrows):
            if work[k][col]:
                piv = k
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv_p = work[r][col].inverse()
        work[r] = [x * inv_p for x in work[r]]
        prow = work[r]
        for k in range(nrows):
            if k != r and work[k][col]:
                f = work[k][col]
                work[k] = [x - f * y for x, y in zip(work[k], prow)]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return work, pivots


def solve_exact(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Solve a @ X = b for a with full column rank; b must be consistent.

    Raises SingularMatrixError when the system has no solution or the
    solution is not unique (rank deficient a).
    """
    if a.rows != b.rows:
        raise DimensionMismatch("solve: row counts differ")
    aug = [list(a.row(i)) + list(b.row(i)) for i in range(a.rows)]
    red, pivots = rref(aug)
    main_piv = [p for p in pivots if p < a.cols]
    if len(main_piv) != a.cols:
        raise SingularMatrixError("solve: coefficient matrix is rank deficient")
    if any(p >= a.cols for p in pivots):
        raise SingularMatrixError("solve: inconsistent system")
    out = [ZERO] * (a.cols * b.cols)
    for r, col in enumerate(main_piv):
        for j in range(b.cols):
            out[col * b.cols + j] = red[r][a.cols + j]
    return ExactMatrix(a.cols, b.cols, out)


def rank_factor(a: ExactMatrix):
    """Exact rank factorization a = C * R with inner dimension rank(a)."""
    red, pivots = rref([a.row(i) for i in range(a.rows)])
    rk = len(pivots)
    C = ExactMatrix(
        a.rows, rk, [a[i, p] for i in range(a.rows) for p in pivots]
    )
    R = ExactMatrix(rk, a.cols, [red[r][j] for r in range(rk) for j in range(a.cols)])
    return C, R


class EchelonBasis:
    """Incrementally maintained echelon basis of a subspace of Scalar^n.

    Used for Krylov-style reachability/observability closures.  Inserted
    vectors are reduced against the current rows; an independent residual
    is normalized (leading entry 1) and kept.
    """

    def __init__(self, n: int):
        self.n = n
        self.rows = []  # list of (pivot_index, row list)

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec):
        """Return vec reduced modulo the span (a fresh list)."""
        v = list(vec)
        for piv, row in self.rows:
            f = v[piv]
            if f:
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def add(self, vec):
        """Insert vec; returns the reduced new basis row, or None if dependent."""
        v = self.reduce(vec)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return None
        inv_p = v[piv].inverse()
        v = [x * inv_p for x in v]
        self.rows.append((piv, v))
        self.rows.sort(key=lambda t: t[0])
        return v

    def basis_vectors(self):
        return [row for _, row in self.rows]


# ---------------------------------------------------------------------------
# Block helpers
# ---------------------------------------------------------------------------


def block_matrix(blocks) -> ExactMatrix:
    """Assemble a matrix from a 2-d grid of ExactMatrix blocks."""
    row_heights = [grid_row[0].rows for grid_row in blocks]
    col_widths = [blk.cols for blk in blocks[0]]
    R, C = sum(row_heights), sum(col_widths)
    out = [ZERO] * (R * C)
    r0 = 0
    for gi, grid_row in enumerate(blocks):
        c0 = 0
        for gj, blk in enumerate(grid_row):
            if blk.rows != row_heights[gi] or blk.cols != col_widths[gj]:
                raise DimensionMismatch("inconsistent block sizes")
            for i in range(blk.rows):
                base = (r0 + i) * C + c0
                brow = i * blk.cols
                for j in range(blk.cols):
                    out[base + j] = blk.entries[brow + j]
            c0 += blk.cols
        r0 += grid_row[0].rows
    return ExactMatrix(R, C, out)


def split_blocks(a, m: int):
    """Split a (m*s)x(m*s) matrix into an m x m grid of s x s blocks.

    Works for ExactMatrix and numpy arrays.
    """
    if isinstance(a, ExactMatrix):
        if a.rows != a.cols or a.rows % m:
            raise DimensionMismatch(f"cannot split {a.rows}x{a.cols} into {m}x{m} blocks")
        s = a.rows // m
        return [
            [
                ExactMatrix(
                    s,
                    s,
                    [a[bi * s + i, bj * s + j] for i in range(s) for j in range(s)],
                )
                for bj in range(m)
            ]
            for bi in range(m)
        ]
    a = np.asarray(a)
    if a.shape[0] != a.shape[1] or a.shape[0] % m:
        raise DimensionMismatch(f"cannot split {a.shape} into {m}x{m} blocks")
    s = a.shape[0] // m
    return [[a[bi * s : (bi + 1) * s, bj * s : (bj + 1) * s] for bj in range(m)] for bi in range(m)]


def embed(a: ExactMatrix, s: int) -> ExactMatrix:
    """The amplification a -> a (x) I_s used to evaluate at larger sizes."""
    return a.kron(ExactMatrix.identity(s))


# ---------------------------------------------------------------------------
# Float matrix helpers
# ---------------------------------------------------------------------------


def float_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "entries": [[float(x.real), float(x.imag)] for x in a.flatten()],
    }


def float_from_json(obj) -> np.ndarray:
    r, c = int(obj["rows"]), int(obj["cols"])
    flat = [complex(p[0], p[1]) for p in obj["entries"]]
    return np.array(flat, dtype=complex).reshape(r, c)


def check_finite(a) -> np.ndarray:
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise ArithmeticError("non-finite entries in float matrix")
    return a


def matrices_to_json(mats) -> str:
    out = []
    for m in mats:
        out.append(m.to_json() if isinstance(m, ExactMatrix) else float_to_json(m))
    return json.dumps(out)
