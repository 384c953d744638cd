"""Exact scalars and dense matrices over prime fields and the rationals.

Prime-field elements are plain Python ints kept in ``[0, p)``; rationals
are :class:`fractions.Fraction`.  Each field object knows how to do
arithmetic on single scalars and on numpy arrays of them (``int64`` for
prime fields, ``object`` for the rationals), so the elimination routines
below are written once for both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._kernels import panel_pivots

_INT64_MAX = 2**63 - 1
_FLOAT_EXACT = 2**53  # float64 represents every integer below this


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """The field F_p for a prime p < 2**31."""

    dtype = np.int64

    def __init__(self, p: int):
        p = int(p)
        if not _is_prime(p) or p >= 2**31:
            raise ValueError(f"modulus must be a prime below 2**31, got {p}")
        self.p = p
        self.characteristic = p
        self.zero = 0
        self.one = 1
        # longest inner product that cannot overflow int64
        self._chunk = max(1, _INT64_MAX // max(1, (p - 1) ** 2) - 1)

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    @property
    def name(self) -> str:
        return str(self.p)

    @property
    def descriptor(self) -> str:
        return f"F_{self.p}"

    def __call__(self, x) -> int:
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fraction):
            return self.div(x.numerator % self.p, x.denominator % self.p)
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError(f"0 is not invertible mod {self.p}")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def pow(self, a, k: int):
        if k < 0:
            return pow(self.inv(a), -k, self.p)
        return pow(int(a), k, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def is_unit(self, a) -> bool:
        return a % self.p != 0

    def render(self, a) -> str:
        return f"{int(a) % self.p} mod {self.p}"

    def parse(self, s: str) -> int:
        s = s.strip()
        if s.endswith(f"mod {self.p}"):
            s = s[: -len(f"mod {self.p}")].strip()
        if "/" in s:
            num, den = s.split("/")
            return self.div(int(num) % self.p, int(den) % self.p)
        return int(s) % self.p

    # array helpers
    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return np.mod(arr, self.p)

    def array(self, values) -> np.ndarray:
        arr = np.array(values, dtype=object)
        if arr.size:
            arr = np.vectorize(self.__call__, otypes=[object])(arr)
        return arr.astype(np.int64)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        inner = a.shape[-1]
        if inner * (self.p - 1) ** 2 < _FLOAT_EXACT:
            return np.mod(a.astype(np.float64) @ b.astype(np.float64), self.p).astype(np.int64)
        if inner <= self._chunk:
            return np.mod(a @ b, self.p)
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for s in range(0, inner, self._chunk):
            out = np.mod(out + np.mod(a[:, s : s + self._chunk] @ b[s : s + self._chunk], self.p), self.p)
        return out


class Rationals:
    """The field Q with arbitrary-precision Fraction entries."""

    dtype = object
    characteristic = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __repr__(self):
        return "Rationals()"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    name = "Q"
    descriptor = "Q"

    def __call__(self, x) -> Fraction:
        if isinstance(x, str):
            return self.parse(x)
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 is not invertible in Q")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / Fraction(b)

    def pow(self, a, k: int):
        return Fraction(a) ** k

    def is_zero(self, a) -> bool:
        return a == 0

    def is_unit(self, a) -> bool:
        return a != 0

    def render(self, a) -> str:
        a = Fraction(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def parse(self, s: str) -> Fraction:
        return Fraction(s.strip())

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr

    def array(self, values) -> np.ndarray:
        arr = np.array(values, dtype=object)
        if arr.size:
            arr = np.vectorize(Fraction, otypes=[object])(arr)
        return arr

    def zeros(self, shape) -> np.ndarray:
        arr = np.empty(shape, dtype=object)
        arr.fill(Fraction(0))
        return arr

    def eye(self, n: int) -> np.ndarray:
        arr = self.zeros((n, n))
        for i in range(n):
            arr[i, i] = Fraction(1)
        return arr

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[-1] == 0:
            return self.zeros((a.shape[0], b.shape[1]))
        return np.dot(a, b)


Field = PrimeField | Rationals

QQ = Rationals()


def field_from_name(name: str | int) -> Field:
    """``"Q"`` gives the rationals, anything else is read as a prime modulus."""
    if isinstance(name, str) and name.strip().upper() in ("Q", "QQ"):
        return QQ
    return PrimeField(int(name))


# ---------------------------------------------------------------------------
# array-level elimination

_PANEL = 128
_BLOCKED_MIN_CELLS = 40_000


def rref_array(field: Field, arr: np.ndarray, ncols: int | None = None):
    """Reduced row echelon form of a 2-d array.

    Pivots are searched for in the first ``ncols`` columns only; row
    operations act on whole rows.  Returns ``(R, pivots)`` where ``R`` is a
    fresh array with the same shape.
    """
    a = np.array(arr, dtype=field.dtype, copy=True)
    rows, cols = a.shape
    if ncols is None:
        ncols = cols
    if (
        isinstance(field, PrimeField)
        and rows * cols >= _BLOCKED_MIN_CELLS
        and _PANEL * (field.p - 1) ** 2 < _FLOAT_EXACT
    ):
        return _rref_blocked(field, a, ncols)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        lead = a[r, c]
        if lead != 1:
            a[r, c:] = field.reduce(a[r, c:] * field.inv(lead))
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col != 0)
        if hit.size:
            a[np.ix_(hit, np.arange(c, cols))] = field.reduce(
                a[hit, c:] - np.outer(col[hit], a[r, c:])
            )
        pivots.append(c)
        r += 1
    return a, pivots


def _reduce_float(x: np.ndarray, p: int) -> None:
    """In-place residue mod ``p`` of an integer-valued float array."""
    q = np.floor(x * (1.0 / p))
    x -= p * q
    # the reciprocal may round floor() off by one either way
    x[x >= p] -= p
    x[x < 0] += p


def _rref_blocked(field: PrimeField, a: np.ndarray, ncols: int):
    """Gauss-Jordan over F_p by column panels with BLAS trailing updates.

    Entries live in float64; each update is a product with inner dimension
    at most ``_PANEL``, so every intermediate is an integer below 2**53 and
    the arithmetic stays exact.
    """
    p = field.p
    M = a.astype(np.float64)
    rows, cols = M.shape
    active = np.ones(rows, dtype=bool)
    piv_rows: list[int] = []
    pivots: list[int] = []
    for c0 in range(0, ncols, _PANEL):
        act = np.flatnonzero(active)
        if act.size == 0:
            break
        c1 = min(c0 + _PANEL, ncols)
        prow, pcol = panel_pivots(M[act, c0:c1].astype(np.int64), p)
        if prow.size == 0:
            continue
        pr = act[prow]
        pc = pcol + c0
        B = M[np.ix_(pr, pc)].astype(np.int64)
        k = prow.size
        Binv = rref_array(field, np.concatenate([B, np.eye(k, dtype=np.int64)], axis=1), k)[0][:, k:]
        P = Binv.astype(np.float64) @ M[pr, c0:]
        _reduce_float(P, p)
        X = M[:, pc].copy()
        X[pr] = 0
        touched = np.flatnonzero(X.any(axis=1))
        if touched.size * 2 > rows:
            tail = M[:, c0:]
            tail -= X @ P
            _reduce_float(tail, p)
        elif touched.size:
            block = M[touched, c0:] - X[touched] @ P
            _reduce_float(block, p)
            M[touched, c0:] = block
        M[pr, c0:] = P
        active[pr] = False
        piv_rows.extend(int(r) for r in pr)
        pivots.extend(int(c) for c in pc)
    order = np.argsort(pivots, kind="stable")
    head = [piv_rows[i] for i in order]
    rest = np.flatnonzero(active)
    R = M[np.concatenate([np.asarray(head, dtype=np.int64), rest])].astype(np.int64)
    return R, [pivots[i] for i in order]


def kernel_array(field: Field, arr: np.ndarray) -> np.ndarray:
    """Basis of the right null space, returned as the rows of an array."""
    rows, cols = arr.shape
    if rows == 0:
        return field.eye(cols)
    R, pivots = rref_array(field, arr)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = field.zeros((len(free), cols))
    if not free:
        return K
    piv = np.array(pivots, dtype=np.int64)
    for i, f in enumerate(free):
        K[i, f] = field.one
        if pivots:
            K[i, piv] = field.reduce(-R[: len(pivots), f])
    return K


def rank_array(field: Field, arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    return len(rref_array(field, arr)[1])


class EchelonBasis:
    """Row space maintained in fully reduced echelon form.

    ``add`` folds new rows in; ``reduce`` returns residues modulo the
    current span.  Used to grow submodules one generator at a time.
    """

    def __init__(self, field: Field, ncols: int):
        self.field = field
        self.ncols = ncols
        self.rows = field.zeros((0, ncols))
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, V: np.ndarray) -> np.ndarray:
        V = np.asarray(V, dtype=self.field.dtype)
        if not self.pivots or V.shape[0] == 0:
            return V.copy()
        return self.field.reduce(V - self.field.matmul(V[:, self.pivots], self.rows))

    def add(self, V: np.ndarray) -> int:
        res = self.reduce(V)
        keep = np.flatnonzero((res != 0).any(axis=1))
        if keep.size == 0:
            return 0
        Rn, pn = rref_array(self.field, res[keep])
        Rn = Rn[: len(pn)]
        if self.pivots:
            self.rows = self.field.reduce(self.rows - self.field.matmul(self.rows[:, pn], Rn))
        self.rows = np.concatenate([self.rows, Rn], axis=0)
        self.pivots = self.pivots + list(pn)
        return len(pn)

    def contains(self, v: np.ndarray) -> bool:
        return not (self.reduce(np.atleast_2d(v)) != 0).any()


# ---------------------------------------------------------------------------
# Matrix


@dataclass(frozen=True, eq=False)
class Matrix:
    """Dense matrix over an exact field; treat as immutable."""

    field: Field
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        self.data.setflags(write=False)

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(field, field.zeros((0, cols or 0)))
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        return cls(field, field.array(rows).reshape(len(rows), width))

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros((rows, cols)))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, field.eye(n))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, ij):
        return self.data[ij]

    def tolist(self) -> list[list]:
        return [[self.data[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool((self.data == other.data).all())
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix(self.field, self.field.matmul(self.data, other.data))

    def __add__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.field.reduce(self.data + other.data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.field.reduce(self.data - other.data))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.data.T.copy())

    def is_zero(self) -> bool:
        return not (self.data != 0).any()

    def __repr__(self):
        body = "; ".join(" ".join(self.field.render(x) for x in row) for row in self.tolist())
        return f"Matrix[{self.field.descriptor}]({self.rows}x{self.cols}: {body})"


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    if m.data.size == 0:
        return m, []
    R, piv = rref_array(m.field, m.data)
    return Matrix(m.field, R), piv


def rank(m: Matrix) -> int:
    return rank_array(m.field, m.data)


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning the right null space of ``m``."""
    K = kernel_array(m.field, m.data)
    return Matrix(m.field, np.ascontiguousarray(K.T))


def solve(m: Matrix, rhs: Matrix) -> Matrix | None:
    """Some ``x`` with ``m @ x == rhs``, or ``None`` when inconsistent."""
    if rhs.rows != m.rows:
        raise ValueError(f"rhs has {rhs.rows} rows, matrix has {m.rows}")
    field = m.field
    if m.rows == 0:
        return Matrix.zeros(field, m.cols, rhs.cols)
    aug = np.concatenate([m.data, rhs.data], axis=1)
    R, piv = rref_array(field, aug)
    if any(c >= m.cols for c in piv):
        return None
    x = field.zeros((m.cols, rhs.cols))
    for i, c in enumerate(piv):
        x[c] = R[i, m.cols :]
    return Matrix(field, x)

