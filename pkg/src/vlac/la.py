"""Exact linear algebra over GF(p): dense and sparse matrices, blackbox
operators with explicit apply costs, and butterfly preconditioners.

Matrix data lives in numpy arrays.  For moduli whose products fit in int64
the dtype is int64 and heavy kernels run at C speed (with explicit chunking
so no intermediate ever wraps); for larger word-sized moduli the dtype is
``object`` and numpy carries exact Python ints through identical code.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, DivisionByZero, NotSquare
from .ff import PrimeField

try:
    from scipy import sparse as _scipy_sparse
except ImportError:  # pragma: no cover - scipy is a hard dependency
    _scipy_sparse = None


class CostCounter:
    """Tallies verifier-side field operations (multiplies + adds)."""

    __slots__ = ("ops",)

    def __init__(self):
        self.ops = 0

    def add(self, n: int) -> None:
        self.ops += n


class DenseMatrix:
    """Row-major dense matrix over GF(p)."""

    __slots__ = ("field", "a")

    def __init__(self, field: PrimeField, data):
        self.field = field
        a = np.array(data, dtype=field.dtype)
        if a.ndim != 2:
            raise DimensionMismatch("dense matrix needs a 2-d array")
        self.a = a % field.p

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def nnz(self) -> int:
        # stored entries; dense storage does not exploit zeros
        return self.rows * self.cols

    @property
    def mu(self) -> int:
        return 2 * self.rows * self.cols

    def entry(self, i: int, j: int) -> int:
        return int(self.a[i, j])

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix(self.field, self.a.T)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DenseMatrix)
            and other.field == self.field
            and other.shape == self.shape
            and bool(np.equal(other.a, self.a).all())
        )

    def __repr__(self) -> str:
        return f"DenseMatrix({self.rows}x{self.cols} over GF({self.field.p}))"


class SparseMatrix:
    """Coordinate-list sparse matrix; triples sorted row-major, no duplicates."""

    __slots__ = ("field", "rows", "cols", "ri", "ci", "vals", "_csr", "_csc")

    def __init__(self, field: PrimeField, rows: int, cols: int, triples):
        self.field = field
        self.rows = rows
        self.cols = cols
        seen = set()
        clean = []
        for i, j, v in triples:
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionMismatch(f"entry ({i},{j}) outside {rows}x{cols}")
            if (i, j) in seen:
                raise DimensionMismatch(f"duplicate entry at ({i},{j})")
            seen.add((i, j))
            v = int(v) % field.p
            if v:
                clean.append((i, j, v))
        clean.sort()
        self.ri = np.array([t[0] for t in clean], dtype=np.int64)
        self.ci = np.array([t[1] for t in clean], dtype=np.int64)
        self.vals = np.array([t[2] for t in clean], dtype=field.dtype)
        self._csr = None
        self._csc = None

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.vals)

    @property
    def mu(self) -> int:
        return 2 * self.nnz

    def triples(self):
        for i in range(self.nnz):
            yield int(self.ri[i]), int(self.ci[i]), int(self.vals[i])

    def _scipy_ok(self) -> bool:
        if self.field.dtype is not np.int64 or _scipy_sparse is None:
            return False
        if self.nnz == 0:
            return True
        # a CSR matvec accumulates one row at a time; make sure the widest
        # row cannot overflow int64
        widest = int(np.bincount(self.ri, minlength=self.rows).max())
        return widest <= self.field.dot_chunk()

    def _as_csr(self):
        if self._csr is None:
            self._csr = _scipy_sparse.csr_matrix(
                (self.vals, (self.ri, self.ci)), shape=self.shape, dtype=np.int64
            )
        return self._csr

    def _as_csc(self):
        if self._csc is None:
            self._csc = self._as_csr().T.tocsr()
        return self._csc

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.field,
            self.cols,
            self.rows,
            [(j, i, v) for i, j, v in self.triples()],
        )

    def to_dense(self) -> DenseMatrix:
        a = self.field.zeros(self.shape)
        for i, j, v in self.triples():
            a[i, j] = v
        return DenseMatrix(self.field, a)

    def __repr__(self) -> str:
        return (
            f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz},"
            f" GF({self.field.p}))"
        )


# ---------------------------------------------------------------------------
# matrix-vector and matrix-matrix products
# ---------------------------------------------------------------------------


def _dense_apply(field: PrimeField, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    rows, cols = a.shape
    if len(x) != cols:
        raise DimensionMismatch(f"matvec: {a.shape} by {len(x)}")
    if rows == 0 or cols == 0:
        return field.zeros(rows)
    p = field.p
    if field.dtype is object:
        return a.dot(x) % p
    chunk = field.dot_chunk()
    if cols <= chunk:
        return (a @ x) % p
    acc = np.zeros(rows, dtype=np.int64)
    for lo in range(0, cols, chunk):
        hi = min(cols, lo + chunk)
        acc = (acc + (a[:, lo:hi] @ x[lo:hi]) % p) % p
    return acc


def matvec(m, x, counter: CostCounter | None = None) -> np.ndarray:
    """Product m @ x for a dense, sparse, or blackbox operator."""
    if isinstance(m, Blackbox):
        if counter is not None:
            counter.add(m.mu)
        return m.apply(x)
    field = m.field
    x = np.asarray(x, dtype=field.dtype) % field.p
    if counter is not None:
        counter.add(m.mu)
    if isinstance(m, DenseMatrix):
        return _dense_apply(field, m.a, x)
    if isinstance(m, SparseMatrix):
        if len(x) != m.cols:
            raise DimensionMismatch(f"matvec: {m.shape} by {len(x)}")
        if m._scipy_ok():
            return (m._as_csr() @ x) % field.p
        out = [0] * m.rows
        for i, j, v in m.triples():
            out[i] += v * int(x[j])
        return field.arr(out)
    raise TypeError(f"cannot matvec a {type(m).__name__}")


def _sparse_apply_t(m: SparseMatrix, x: np.ndarray) -> np.ndarray:
    field = m.field
    if m._scipy_ok():
        # transpose reuses the overflow argument column-wise
        widest = (
            int(np.bincount(m.ci, minlength=m.cols).max()) if m.nnz else 0
        )
        if widest <= field.dot_chunk():
            return (m._as_csc() @ x) % field.p
    out = [0] * m.cols
    for i, j, v in m.triples():
        out[j] += v * int(x[i])
    return field.arr(out)


def dense_matmul(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    """Exact product of dense matrices (schoolbook cost, vectorized)."""
    if a.field != b.field:
        raise DimensionMismatch("fields differ")
    if a.cols != b.rows:
        raise DimensionMismatch(f"matmul: {a.shape} by {b.shape}")
    field = a.field
    p = field.p
    if field.dtype is object:
        return DenseMatrix(field, a.a.dot(b.a) % p)
    k = a.cols
    chunk = field.dot_chunk()
    if k <= chunk:
        return DenseMatrix(field, (a.a @ b.a) % p)
    acc = np.zeros((a.rows, b.cols), dtype=np.int64)
    for lo in range(0, k, chunk):
        hi = min(k, lo + chunk)
        acc = (acc + (a.a[:, lo:hi] @ b.a[lo:hi, :]) % p) % p
    return DenseMatrix(field, acc)


# ---------------------------------------------------------------------------
# blackbox operators
# ---------------------------------------------------------------------------


class Blackbox:
    """Linear operator exposed only through apply / apply_t.

    ``mu`` is the declared cost (multiplies + adds) of one apply; verifier
    cost assertions use it verbatim.
    """

    __slots__ = ("field", "rows", "cols", "mu", "_apply", "_apply_t")

    def __init__(
        self,
        field: PrimeField,
        rows: int,
        cols: int,
        mu: int,
        apply: Callable[[np.ndarray], np.ndarray],
        apply_t: Callable[[np.ndarray], np.ndarray],
    ):
        self.field = field
        self.rows = rows
        self.cols = cols
        self.mu = mu
        self._apply = apply
        self._apply_t = apply_t

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=self.field.dtype)
        if len(x) != self.cols:
            raise DimensionMismatch(f"apply: {self.shape} by {len(x)}")
        return self._apply(x % self.field.p)

    def apply_t(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=self.field.dtype)
        if len(x) != self.rows:
            raise DimensionMismatch(f"apply_t: {self.shape} by {len(x)}")
        return self._apply_t(x % self.field.p)

    def __repr__(self) -> str:
        return f"Blackbox({self.rows}x{self.cols}, mu={self.mu})"


def as_blackbox(m) -> Blackbox:
    """Wrap a dense or sparse matrix (or pass a blackbox through)."""
    if isinstance(m, Blackbox):
        return m
    if isinstance(m, DenseMatrix):
        return Blackbox(
            m.field,
            m.rows,
            m.cols,
            m.mu,
            lambda x: _dense_apply(m.field, m.a, x),
            lambda x: _dense_apply(m.field, m.a.T, x),
        )
    if isinstance(m, SparseMatrix):
        return Blackbox(
            m.field,
            m.rows,
            m.cols,
            m.mu,
            lambda x: matvec(m, x),
            lambda x: _sparse_apply_t(m, x),
        )
    raise TypeError(f"cannot wrap a {type(m).__name__}")


def diagonal_scaling(field: PrimeField, d: Sequence[int]) -> Blackbox:
    """Invertible diagonal operator diag(d); every entry must be nonzero."""
    dv = field.arr(d)
    if dv.ndim != 1:
        raise DimensionMismatch("diagonal needs a vector")
    if any(int(v) == 0 for v in dv):
        raise DivisionByZero("diagonal scaling requires nonzero entries")
    n = len(dv)
    p = field.p
    fn = lambda x: dv * x % p
    return Blackbox(field, n, n, n, fn, fn)


def identity_blackbox(field: PrimeField, n: int) -> Blackbox:
    fn = lambda x: x.copy()
    return Blackbox(field, n, n, 0, fn, fn)


def compose(*ops) -> Blackbox:
    """Chain of operators applied right-to-left: compose(U, A, V) is U∘A∘V."""
    bbs = [as_blackbox(m) for m in ops]
    if not bbs:
        raise DimensionMismatch("compose of nothing")
    field = bbs[0].field
    for left, right in zip(bbs, bbs[1:]):
        if left.cols != right.rows:
            raise DimensionMismatch(
                f"compose: {left.shape} cannot follow {right.shape}"
            )
        if left.field != field:
            raise DimensionMismatch("compose: fields differ")

    def apply(x):
        for bb in reversed(bbs):
            x = bb.apply(x)
        return x

    def apply_t(x):
        for bb in bbs:
            x = bb.apply_t(x)
        return x

    return Blackbox(
        field,
        bbs[0].rows,
        bbs[-1].cols,
        sum(bb.mu for bb in bbs),
        apply,
        apply_t,
    )


def padded(m, rows: int, cols: int) -> Blackbox:
    """Zero-embed an operator into the top-left of a larger shape.

    Rank is preserved: the embedding adds zero rows/columns only.
    """
    bb = as_blackbox(m)
    if rows < bb.rows or cols < bb.cols:
        raise DimensionMismatch("padding cannot shrink")
    field = bb.field

    def apply(x):
        y = bb.apply(x[: bb.cols])
        out = field.zeros(rows)
        out[: bb.rows] = y
        return out

    def apply_t(x):
        y = bb.apply_t(x[: bb.rows])
        out = field.zeros(cols)
        out[: bb.cols] = y
        return out

    return Blackbox(field, rows, cols, bb.mu, apply, apply_t)


def leading_projection(m, k: int) -> Blackbox:
    """The leading k x k corner of an operator, as an operator.

    Input is zero-padded to full width, the operator applied, and the
    output truncated to its first k coordinates.
    """
    bb = as_blackbox(m)
    if k < 0 or k > bb.rows or k > bb.cols:
        raise DimensionMismatch(f"projection {k} of {bb.shape}")
    field = bb.field

    def apply(x):
        xx = field.zeros(bb.cols)
        xx[:k] = x
        return bb.apply(xx)[:k]

    def apply_t(x):
        xx = field.zeros(bb.rows)
        xx[:k] = x
        return bb.apply_t(xx)[:k]

    return Blackbox(field, k, k, bb.mu, apply, apply_t)


def materialize(m) -> DenseMatrix:
    """Probe an operator with identity columns (prover-side helper)."""
    bb = as_blackbox(m)
    field = bb.field
    out = field.zeros((bb.rows, bb.cols))
    for j in range(bb.cols):
        e = field.zeros(bb.cols)
        e[j] = 1
        out[:, j] = bb.apply(e)
    return DenseMatrix(field, out)


# ---------------------------------------------------------------------------
# butterfly preconditioners
# ---------------------------------------------------------------------------


def butterfly_padding(n: int) -> int:
    """Smallest power of two >= n."""
    if n < 1:
        raise DimensionMismatch("butterfly needs n >= 1")
    return 1 << max(0, (n - 1).bit_length())


class Butterfly:
    """Product of log2(n) switch layers acting on F^n_padded.

    Each switch mixes a pair (a, b) into (alpha*a + beta*b, alpha*a - beta*b)
    with its own two nonzero parameters, so every layer (and hence the whole
    network) is invertible away from characteristic 2.  Both outputs must
    depend on the parameters: with a parameter-free output, whole directions
    (such as the all-ones vector) would be fixed by every network in the
    family, and matrices orthogonal to them could never be mixed into
    general position.
    """

    __slots__ = ("field", "n", "n_padded", "layers", "alphas", "betas", "_lo", "_hi")

    def __init__(self, field: PrimeField, n: int, thetas: Sequence[int]):
        self.field = field
        self.n = n
        self.n_padded = butterfly_padding(n)
        self.layers = self.n_padded.bit_length() - 1
        half = self.n_padded // 2
        need = 2 * self.layers * half
        th = field.arr(list(thetas))
        if th.ndim != 1 or len(th) != need:
            raise DimensionMismatch(f"butterfly wants {need} parameters")
        if any(int(v) == 0 for v in th):
            raise DivisionByZero("butterfly parameters must be nonzero")
        pairs = th.reshape(self.layers, 2, half) if need else th.reshape(0, 2, 0)
        self.alphas = pairs[:, 0, :]
        self.betas = pairs[:, 1, :]
        lo, hi = [], []
        for t in range(self.layers):
            stride = 1 << t
            idx = np.arange(self.n_padded)
            mask = (idx & stride) == 0
            lo.append(idx[mask])
            hi.append(idx[mask] + stride)
        self._lo = lo
        self._hi = hi

    @property
    def param_count(self) -> int:
        return 2 * self.layers * (self.n_padded // 2)

    @property
    def mu(self) -> int:
        # two multiplies and two adds per switch
        return 4 * (self.n_padded // 2) * self.layers

    def apply(self, x) -> np.ndarray:
        field = self.field
        p = field.p
        x = np.asarray(x, dtype=field.dtype) % p
        if len(x) != self.n_padded:
            raise DimensionMismatch(f"butterfly apply wants length {self.n_padded}")
        x = x.copy()
        for t in range(self.layers):
            a = self.alphas[t] * x[self._lo[t]] % p
            b = self.betas[t] * x[self._hi[t]] % p
            x[self._lo[t]] = (a + b) % p
            x[self._hi[t]] = (a - b) % p
        return x

    def apply_t(self, x) -> np.ndarray:
        field = self.field
        p = field.p
        x = np.asarray(x, dtype=field.dtype) % p
        if len(x) != self.n_padded:
            raise DimensionMismatch(f"butterfly apply wants length {self.n_padded}")
        x = x.copy()
        for t in reversed(range(self.layers)):
            a = x[self._lo[t]]
            b = x[self._hi[t]]
            x[self._lo[t]] = self.alphas[t] * (a + b) % p
            x[self._hi[t]] = self.betas[t] * (a - b) % p
        return x

    def as_blackbox(self) -> Blackbox:
        return Blackbox(
            self.field,
            self.n_padded,
            self.n_padded,
            self.mu,
            self.apply,
            self.apply_t,
        )

    def __repr__(self) -> str:
        return f"Butterfly(n={self.n}, padded={self.n_padded}, GF({self.field.p}))"


def butterfly_new(field: PrimeField, n: int, thetas: Sequence[int]) -> Butterfly:
    return Butterfly(field, n, thetas)


def butterfly_param_count(n: int) -> int:
    np_ = butterfly_padding(n)
    return 2 * (np_.bit_length() - 1) * (np_ // 2)


# ---------------------------------------------------------------------------
# prover-side elimination (the test oracles keep their own, separate copy)
# ---------------------------------------------------------------------------


def _rref(field: PrimeField, m: np.ndarray):
    """In-place reduced row echelon; returns (pivot_cols, swap_sign, pivprod)."""
    p = field.p
    rows, cols = m.shape
    r = 0
    sign = 1
    pivprod = 1
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        pr = None
        for i in range(r, rows):
            if m[i, c] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
            sign = -sign
        piv = int(m[r, c])
        pivprod = pivprod * piv % p
        m[r] = m[r] * field.inv(piv) % p
        col = m[:, c].copy()
        col[r] = 0
        nz = np.nonzero(col)[0]
        if len(nz):
            m[nz] = (m[nz] - np.outer(col[nz], m[r])) % p
        pivots.append(c)
        r += 1
    return pivots, sign, pivprod


def solve_dense(a: DenseMatrix, b) -> np.ndarray | None:
    """One solution of A x = b, or None when the system is inconsistent."""
    field = a.field
    bv = field.arr(b)
    if len(bv) != a.rows:
        raise DimensionMismatch("solve: rhs length mismatch")
    aug = field.zeros((a.rows, a.cols + 1))
    aug[:, : a.cols] = a.a
    aug[:, a.cols] = bv
    pivots, _, _ = _rref(field, aug)
    if pivots and pivots[-1] == a.cols:
        return None
    x = field.zeros(a.cols)
    for row, c in enumerate(pivots):
        x[c] = aug[row, a.cols]
    return x


def invert_dense(a: DenseMatrix) -> DenseMatrix | None:
    """Inverse of a square dense matrix, or None when singular."""
    if a.rows != a.cols:
        raise NotSquare("inverse needs a square matrix")
    field = a.field
    n = a.rows
    aug = field.zeros((n, 2 * n))
    aug[:, :n] = a.a
    aug[:, n:] = np.eye(n, dtype=np.int64) % field.p
    pivots, _, _ = _rref(field, aug)
    if len(pivots) < n or any(c >= n for c in pivots):
        return None
    return DenseMatrix(field, aug[:, n:])


def kernel_vector(a: DenseMatrix) -> np.ndarray | None:
    """A nonzero kernel vector, or None when the matrix has full column rank."""
    field = a.field
    m = a.a.copy()
    pivots, _, _ = _rref(field, m)
    if len(pivots) == a.cols:
        return None
    free = next(c for c in range(a.cols) if c not in set(pivots))
    x = field.zeros(a.cols)
    x[free] = 1
    for row, c in enumerate(pivots):
        x[c] = -m[row, free] % field.p
    return x

def rank_dense(a: DenseMatrix) -> int:
    m = a.a.copy()
    pivots, _, _ = _rref(a.field, m)
    return len(pivots)


def det_dense(a: DenseMatrix) -> int:
    if a.rows != a.cols:
        raise NotSquare("determinant needs a square matrix")
    field = a.field
    m = a.a.copy()
    pivots, sign, pivprod = _rref(field, m)
    if len(pivots) < a.rows:
        return 0
    return pivprod % field.p if sign == 1 else -pivprod % field.p
