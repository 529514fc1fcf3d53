"""Word-sized prime fields GF(p), dense polynomials over them, and the
sequence machinery (Berlekamp-Massey, numerator reconstruction) that the
certificate protocols are built on.

Scalars are canonical Python ints in [0, p).  Keeping them as plain ints
lets the matrix layer batch arithmetic through numpy without boxing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BothZero,
    DivisionByZero,
    EvenModulus,
    FieldMismatch,
    GeneratorMismatch,
    NotPrime,
)

MAX_MODULUS_BITS = 63  # scalars must serialize as one little-endian u64

# Deterministic Miller-Rabin witness set, exact for n < 3.317e24 (covers the
# full u64 range, so the advertised error bound 2**-100 is met with room).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test, deterministic below 2**64."""
    if n < 2:
        return False
    if n == 2:
        return True
    if n % 2 == 0:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """GF(p) for an odd word-sized prime p."""

    __slots__ = ("p", "dtype", "_chunk")

    def __init__(self, p: int):
        if not isinstance(p, int) or p < 0:
            raise NotPrime(f"modulus must be a positive integer, got {p!r}")
        if p.bit_length() > MAX_MODULUS_BITS:
            raise ValueError(f"modulus must fit in {MAX_MODULUS_BITS} bits")
        if p == 2 or (p > 2 and p % 2 == 0):
            raise EvenModulus("even moduli are not supported")
        if not is_probable_prime(p):
            raise NotPrime(f"{p} is not prime")
        self.p = p
        # int64 arithmetic is exact as long as single products cannot wrap.
        if (p - 1) * (p - 1) < 2**63:
            self.dtype = np.int64
            self._chunk = (2**63 - 1) // ((p - 1) * (p - 1))
        else:
            self.dtype = object
            self._chunk = 0  # object arrays never overflow

    # -- scalar arithmetic ------------------------------------------------

    def canon(self, x: int) -> int:
        return x % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise DivisionByZero("inverse of 0")
        return pow(a, -1, self.p)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    # -- array helpers -----------------------------------------------------

    def arr(self, values) -> np.ndarray:
        """Canonical numpy vector/matrix over this field."""
        a = np.array(values, dtype=self.dtype)
        return a % self.p

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            z = np.zeros(shape, dtype=object)
            z += 0  # force Python ints, not numpy zeros of float
            return z
        return np.zeros(shape, dtype=np.int64)

    def dot_chunk(self) -> int:
        """How many unreduced int64 products may be summed safely."""
        return self._chunk

    # -- misc ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


def field_new(p: int) -> PrimeField:
    """Validate p and build GF(p).  Raises NotPrime / EvenModulus."""
    return PrimeField(p)


def _check_same_field(a: PrimeField, b: PrimeField) -> None:
    if a.p != b.p:
        raise FieldMismatch(f"GF({a.p}) vs GF({b.p})")


@dataclass(frozen=True)
class SampleSet:
    """Contiguous challenge range {offset, ..., offset+size-1} inside GF(p).

    Soundness bounds divide by |S|, so the size is kept explicit instead of
    implicitly meaning "the whole field".
    """

    field: PrimeField
    size: int
    offset: int = 0

    def __post_init__(self):
        if self.size < 2:
            raise ValueError("sample set needs at least two elements")
        if self.offset < 0 or self.offset + self.size > self.field.p:
            raise ValueError("sample set must lie inside [0, p)")

    def __contains__(self, x: int) -> bool:
        return self.offset <= x < self.offset + self.size

    def __len__(self) -> int:
        return self.size


def full_sample_set(field: PrimeField) -> SampleSet:
    return SampleSet(field, field.p, 0)


def sample(s: SampleSet, src, label: str = "sample") -> int:
    """Draw one uniform scalar from s through a challenge source."""
    return src.draw_scalar(label, s)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class Poly:
    """Dense univariate polynomial over GF(p), coefficients low-first.

    The coefficient list is always trimmed: its last entry is nonzero, and
    the zero polynomial is the empty list.  ``degree`` returns -1 for the
    zero polynomial (a stand-in for "minus infinity"; callers that feed
    degrees into soundness formulas must clamp).
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: PrimeField, coeffs: Sequence[int]):
        self.field = field
        p = field.p
        c = [int(v) % p for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = c

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: PrimeField) -> "Poly":
        return cls(field, [])

    @classmethod
    def one(cls, field: PrimeField) -> "Poly":
        return cls(field, [1])

    @classmethod
    def x(cls, field: PrimeField) -> "Poly":
        return cls(field, [0, 1])

    @classmethod
    def constant(cls, field: PrimeField, c: int) -> "Poly":
        return cls(field, [c])

    # -- structure ----------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and other.field.p == self.field.p
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.field.p, tuple(self.coeffs)))

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        _check_same_field(self.field, other.field)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = (out[i] + v) % self.field.p
        return Poly(self.field, out)

    def __neg__(self) -> "Poly":
        p = self.field.p
        return Poly(self.field, [-v % p for v in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        _check_same_field(self.field, other.field)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly.zero(self.field)
        p = self.field.p
        out = [0] * (len(a) + len(b) - 1)
        for i, av in enumerate(a):
            if av == 0:
                continue
            for j, bv in enumerate(b):
                out[i + j] = (out[i + j] + av * bv) % p
        return Poly(self.field, out)

    def scale(self, c: int) -> "Poly":
        p = self.field.p
        c %= p
        return Poly(self.field, [v * c % p for v in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by x**k."""
        if self.is_zero:
            return self
        return Poly(self.field, [0] * k + self.coeffs)

    def monic(self) -> "Poly":
        if self.is_zero:
            raise DivisionByZero("zero polynomial has no monic normalization")
        return self.scale(self.field.inv(self.coeffs[-1]))

    def divmod_by(self, den: "Poly") -> tuple["Poly", "Poly"]:
        _check_same_field(self.field, den.field)
        if den.is_zero:
            raise DivisionByZero("polynomial division by zero")
        p = self.field.p
        dd = den.degree
        inv_lead = self.field.inv(den.coeffs[-1])
        rem = list(self.coeffs)
        if len(rem) <= dd:
            return Poly.zero(self.field), self
        q = [0] * (len(rem) - dd)
        for k in range(len(rem) - dd - 1, -1, -1):
            c = rem[dd + k] * inv_lead % p
            if c:
                q[k] = c
                for i, dv in enumerate(den.coeffs):
                    rem[k + i] = (rem[k + i] - c * dv) % p
        return Poly(self.field, q), Poly(self.field, rem)

    def __call__(self, x: int) -> int:
        """Horner evaluation at a scalar."""
        p = self.field.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    # -- presentation -----------------------------------------------------------

    def __repr__(self) -> str:
        if self.is_zero:
            return f"Poly(0 mod {self.field.p})"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append("x" if c == 1 else f"{c}*x")
            else:
                terms.append(f"x^{i}" if c == 1 else f"{c}*x^{i}")
        return f"Poly({' + '.join(terms)} mod {self.field.p})"


def poly_eval(poly: Poly, x: int) -> int:
    return poly(x)


def poly_xgcd(f: Poly, g: Poly) -> tuple[Poly, Poly, Poly]:
    """Extended gcd: returns monic d and cofactors (s, t) with s*f + t*g = d.

    Degree bounds in the nontrivial case: deg s < deg g - deg d + 1 and
    deg t < deg f - deg d + 1, which is what the coprimality rounds of the
    minimal-polynomial certificate rely on.
    """
    _check_same_field(f.field, g.field)
    if f.is_zero and g.is_zero:
        raise BothZero("gcd(0, 0) is undefined")
    field = f.field
    if _use_arrays(field, max(f.degree, g.degree)):
        d, s, t = _xgcd_arrays(field, f.coeffs, g.coeffs)
        return Poly(field, d), Poly(field, s), Poly(field, t)
    r0, r1 = f, g
    s0, s1 = Poly.one(field), Poly.zero(field)
    t0, t1 = Poly.zero(field), Poly.one(field)
    while not r1.is_zero:
        q, r = r0.divmod_by(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    lead_inv = field.inv(r0.coeffs[-1])
    return r0.scale(lead_inv), s0.scale(lead_inv), t0.scale(lead_inv)


# ---------------------------------------------------------------------------
# Linearly recurrent sequences
# ---------------------------------------------------------------------------


def generates(gen: Poly, seq: Sequence[int]) -> bool:
    """Does the monic polynomial drive the full window as a recurrence?

    Checks sum_j gen[j] * seq[k+j] = 0 for every window position k.  With
    gen = 1 this degenerates to "every term is zero", which is exactly the
    convention used for the zero sequence.
    """
    field = gen.field
    p = field.p
    m = gen.degree
    if m < 0:
        raise GeneratorMismatch("zero polynomial cannot generate anything")
    n = len(seq)
    if m > n:
        raise GeneratorMismatch("window shorter than the claimed generator degree")
    cs = gen.coeffs
    if _use_arrays(field, n):
        s = np.asarray(seq, dtype=np.int64)
        c = np.asarray(cs, dtype=np.int64)
        for k in range(n - m):
            if int((c * s[k : k + m + 1] % p).sum() % p):
                return False
        return True
    for k in range(n - m):
        acc = 0
        for j, cj in enumerate(cs):
            acc += cj * seq[k + j]
        if acc % p:
            return False
    return True


def berlekamp_massey(field: PrimeField, seq: Sequence[int]) -> Poly:
    """Monic minimal generator of the given sequence window.

    The zero sequence yields the constant 1 (degree 0), which keeps the
    downstream certificate protocols total.
    """
    seq = [int(v) % field.p for v in seq]
    if _use_arrays(field, len(seq)):
        return _bm_arrays(field, seq)
    return _bm_lists(field, seq)


def _bm_lists(field: PrimeField, seq: list[int]) -> Poly:
    p = field.p
    conn = [1]  # current connection polynomial, high-order-first recurrence
    prev = [1]  # copy from before the last length change
    length = 0
    gap = 1  # steps since the last length change
    prev_disc = 1
    for n, s in enumerate(seq):
        d = s
        for i in range(1, length + 1):
            if i < len(conn) and conn[i]:
                d += conn[i] * seq[n - i]
        d %= p
        if d == 0:
            gap += 1
            continue
        coef = d * pow(prev_disc, -1, p) % p
        if 2 * length <= n:
            saved = list(conn)
            if len(conn) < gap + len(prev):
                conn.extend([0] * (gap + len(prev) - len(conn)))
            for i, v in enumerate(prev):
                conn[gap + i] = (conn[gap + i] - coef * v) % p
            length = n + 1 - length
            prev = saved
            prev_disc = d
            gap = 1
        else:
            if len(conn) < gap + len(prev):
                conn.extend([0] * (gap + len(prev) - len(conn)))
            for i, v in enumerate(prev):
                conn[gap + i] = (conn[gap + i] - coef * v) % p
            gap += 1
    return _connection_to_generator(field, conn, length)


def _bm_arrays(field: PrimeField, seq: list[int]) -> Poly:
    p = field.p
    n_total = len(seq)
    s = np.asarray(seq, dtype=np.int64)
    cap = n_total + 2
    conn = np.zeros(cap, dtype=np.int64)
    prev = np.zeros(cap, dtype=np.int64)
    conn[0] = 1
    prev[0] = 1
    conn_len, prev_len = 1, 1
    length = 0
    gap = 1
    prev_disc = 1
    for n in range(n_total):
        d = int(s[n])
        w = min(length, conn_len - 1)
        if w > 0:
            # products stay below (p-1)^2 < 2**63; reduce before summing
            d += int((conn[1 : w + 1] * s[n - w : n][::-1] % p).sum() % p)
        d %= p
        if d == 0:
            gap += 1
            continue
        coef = d * pow(prev_disc, -1, p) % p
        if 2 * length <= n:
            saved = conn[:conn_len].copy()
            saved_len = conn_len
            new_len = max(conn_len, gap + prev_len)
            conn[conn_len:new_len] = 0
            conn[gap : gap + prev_len] = (
                conn[gap : gap + prev_len] - coef * prev[:prev_len]
            ) % p
            conn_len = new_len
            length = n + 1 - length
            prev[:saved_len] = saved
            prev_len = saved_len
            prev_disc = d
            gap = 1
        else:
            new_len = max(conn_len, gap + prev_len)
            conn[conn_len:new_len] = 0
            conn[gap : gap + prev_len] = (
                conn[gap : gap + prev_len] - coef * prev[:prev_len]
            ) % p
            conn_len = new_len
            gap += 1
    return _connection_to_generator(field, [int(v) for v in conn[:conn_len]], length)


def _connection_to_generator(field: PrimeField, conn: list[int], length: int) -> Poly:
    # conn encodes s[k+L] + conn[1]*s[k+L-1] + ... + conn[L]*s[k] = 0;
    # reversing (with zero padding up to L) gives the monic generator.
    padded = list(conn) + [0] * (length + 1 - len(conn))
    return Poly(field, list(reversed(padded[: length + 1])))


def numerator_from_sequence(gen: Poly, seq: Sequence[int]) -> Poly:
    """Numerator polynomial matching a generator and its sequence window.

    With H the monic generator of degree m, the generating function of the
    sequence equals num/H for num[j] = sum_k H[j+1+k] * seq[k]; the result
    has degree < m.  Raises GeneratorMismatch when H does not actually
    drive the window.
    """
    field = gen.field
    p = field.p
    seq = [int(v) % p for v in seq]
    m = gen.degree
    if m < 0:
        raise GeneratorMismatch("generator must be nonzero")
    if len(seq) < m:
        raise GeneratorMismatch("window shorter than generator degree")
    if not generates(gen, seq):
        raise GeneratorMismatch("polynomial does not generate the sequence")
    if _use_arrays(field, m):
        h = np.asarray(gen.coeffs, dtype=np.int64)
        s = np.asarray(seq, dtype=np.int64)
        out = []
        for j in range(m):
            hi = h[j + 1 : m + 1]
            out.append(int((hi * s[: m - j] % p).sum() % p))
        return Poly(field, out)
    out = [0] * m
    for j in range(m):
        acc = 0
        for k in range(m - j):
            acc += gen.coeff(j + 1 + k) * seq[k]
        out[j] = acc % p
    return Poly(field, out)


# ---------------------------------------------------------------------------
# numpy fast paths (exact; only taken when int64 products cannot wrap)
# ---------------------------------------------------------------------------

_ARRAY_MIN_DEGREE = 32


def _use_arrays(field: PrimeField, size: int) -> bool:
    return field.dtype is np.int64 and size >= _ARRAY_MIN_DEGREE


def _trim_arr(a: np.ndarray) -> np.ndarray:
    n = len(a)
    while n > 0 and a[n - 1] == 0:
        n -= 1
    return a[:n]


def _mul_arrays(p: int, chunk: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if len(a) > len(b):
        a, b = b, a
    if len(a) <= max(chunk, 1):
        return np.convolve(a, b) % p
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    step = max(chunk, 1)
    for lo in range(0, len(a), step):
        seg = a[lo : lo + step]
        out[lo : lo + len(seg) + len(b) - 1] += np.convolve(seg, b) % p
        out %= p
    return out


def _divmod_arrays(
    p: int, num: np.ndarray, den: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    dn, dd = len(num) - 1, len(den) - 1
    if dn < dd:
        return np.zeros(0, dtype=np.int64), num.copy()
    inv_lead = pow(int(den[-1]), -1, p)
    rem = num.copy()
    q = np.zeros(dn - dd + 1, dtype=np.int64)
    for k in range(dn - dd, -1, -1):
        c = int(rem[dd + k]) * inv_lead % p
        if c:
            q[k] = c
            rem[k : k + dd + 1] = (rem[k : k + dd + 1] - c * den) % p
    return q, _trim_arr(rem)


def _xgcd_arrays(field: PrimeField, fc: list[int], gc: list[int]):
    p = field.p
    chunk = field.dot_chunk()
    r0 = _trim_arr(np.asarray(fc, dtype=np.int64))
    r1 = _trim_arr(np.asarray(gc, dtype=np.int64))
    one = np.ones(1, dtype=np.int64)
    nil = np.zeros(0, dtype=np.int64)
    s0, s1 = one.copy(), nil.copy()
    t0, t1 = nil.copy(), one.copy()

    def axpy(x, q, y):  # x - q*y, all arrays
        qy = _mul_arrays(p, chunk, q, y)
        n = max(len(x), len(qy))
        out = np.zeros(n, dtype=np.int64)
        out[: len(x)] = x
        out[: len(qy)] = (out[: len(qy)] - qy) % p
        return _trim_arr(out)

    while len(r1):
        q, r = _divmod_arrays(p, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, axpy(s0, q, s1)
        t0, t1 = t1, axpy(t0, q, t1)
    inv_lead = pow(int(r0[-1]), -1, p)
    return (
        [int(v) * inv_lead % p for v in r0],
        [int(v) * inv_lead % p for v in s0],
        [int(v) * inv_lead % p for v in t0],
    )
