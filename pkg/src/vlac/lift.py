"""Determinants over the integers and over polynomial rings.

Both lifts follow the same commit-then-reduce shape: the prover commits
to the full answer, the verifier draws a random evaluation point (a
word-sized prime for integer matrices, a field element for polynomial
matrices), and a field determinant certificate settles the reduced
instance.  A wrong committed answer survives only if the draw lands on
one of the few points where the wrong and true answers collide, and a
size bound on the commitment caps how many such points exist.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from math import isqrt
from random import Random
from typing import Optional, Sequence

import numpy as np

from .certs_sparse import det_prover_flow, det_verifier_flow
from .errors import DimensionMismatch, FieldMismatch, NotSquare
from .ff import MAX_MODULUS_BITS, Poly, PrimeField, full_sample_set, is_probable_prime
from .la import CostCounter, DenseMatrix
from .proto import (
    HEURISTIC_FS,
    KIND_BIGINT,
    KIND_POLY,
    TAG_COMMIT,
    Verdict,
    certify,
    draw_prime,
    encode_payload,
    instance_digest,
    verify_recorded,
    _u32,
    _u64,
)

PROTOCOL_INTDET = "vlac.intdet.v1"
PROTOCOL_POLYDET = "vlac.polydet.v1"

DEFAULT_PRIME_BITS = 62


class IntMatrix:
    """Square-friendly integer matrix with arbitrary-size entries."""

    __slots__ = ("a",)

    def __init__(self, data):
        arr = np.empty((len(data), len(data[0]) if len(data) else 0), dtype=object)
        for i, row in enumerate(data):
            if len(row) != arr.shape[1]:
                raise DimensionMismatch("ragged rows")
            for j, v in enumerate(row):
                arr[i, j] = int(v)
        self.a = arr

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def entry(self, i: int, j: int) -> int:
        return int(self.a[i, j])

    def reduce(self, field: PrimeField) -> DenseMatrix:
        return DenseMatrix(field, self.a % field.p)

    def encode(self) -> bytes:
        out = [b"I", _u32(self.rows), _u32(self.cols)]
        for i in range(self.rows):
            for j in range(self.cols):
                out.append(encode_payload(KIND_BIGINT, self.a[i, j]))
        return b"".join(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and np.array_equal(self.a, other.a)

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols})"


def hadamard_bound(m: IntMatrix) -> int:
    """Integer bound on |det|: the product of row norms, rounded up.

    The square of the determinant is at most the product of the row
    norm squares, so the bound is computed exactly in integers and only
    the final square root is rounded.
    """
    prod = 1
    for i in range(m.rows):
        row_sq = sum(int(v) * int(v) for v in m.a[i])
        if row_sq == 0:
            return 0
        prod *= row_sq
    root = isqrt(prod)
    if root * root < prod:
        root += 1
    return root


def random_prime(bits: int, source, label: str = "prime") -> int:
    """Random prime in [2**(bits-1), 2**bits) from a challenge source."""
    return draw_prime(source, label, bits)


def lower_bound_primes(bits: int) -> int:
    """Primes in [2**(bits-1), 2**bits): at least x / (3 ln 2x) of them.

    Rationalized with ln 2 < 2.0796/3 per bit so the bound stays an exact
    integer computation.
    """
    return (1 << (bits - 1)) * 10000 // (20796 * bits)


def intdet_epsilon(bound: int, bits: int, eps_field: Fraction) -> Fraction:
    """Chance a wrong committed determinant survives the prime draw."""
    if bound == 0:
        return eps_field
    gap_bits = (2 * bound).bit_length()
    bad = -(-gap_bits // (bits - 1))
    return Fraction(bad, lower_bound_primes(bits)) + eps_field


def int_det_crt(m: IntMatrix, bits: int = MAX_MODULUS_BITS - 1) -> int:
    """Exact integer determinant by Chinese remaindering word-prime images.

    Prover-side: runs dense elimination modulo enough fixed primes to
    cover twice the Hadamard bound, then recombines.
    """
    if m.rows != m.cols:
        raise NotSquare("determinant needs a square matrix")
    if m.rows == 0:
        return 1
    bound = hadamard_bound(m)
    if bound == 0:
        return 0
    from .la import det_dense

    need = 2 * bound + 1
    residue, modulus = 0, 1
    candidate = (1 << bits) + 1
    while modulus < need:
        while not is_probable_prime(candidate):
            candidate += 2
        p = candidate
        candidate += 2
        field = PrimeField(p)
        r = det_dense(m.reduce(field))
        # combine: find x = residue (mod modulus), x = r (mod p)
        inv = pow(modulus % p, -1, p)
        t = (r - residue) % p * inv % p
        residue += modulus * t
        modulus *= p
    if residue > modulus // 2:
        residue -= modulus
    return residue


def _intdet_parts(m: IntMatrix, bits: int, prover_seed: Optional[int]):
    if m.rows != m.cols:
        raise NotSquare("determinant needs a square matrix")
    n = m.rows
    if n < 1:
        raise DimensionMismatch("matrix must be at least 1x1")
    if not 16 <= bits <= MAX_MODULUS_BITS - 1:
        raise ValueError("prime size out of range")
    params = _u32(n) + _u32(bits)
    digest = instance_digest(PROTOCOL_INTDET, (m.encode(),))
    bound = hadamard_bound(m)

    def prover(ch):
        rng = _lift_rng(digest, prover_seed)
        value = int_det_crt(m)
        ch.send(TAG_COMMIT, KIND_BIGINT, value)
        q = ch.challenge_prime("intdet.q", bits)
        field = PrimeField(q)
        det_prover_flow(ch, field, m.reduce(field), full_sample_set(field), rng, n)

    def verifier(ch):
        counter = CostCounter()
        labels = (HEURISTIC_FS,) if ch.is_fiat_shamir else ()
        _, claimed = ch.recv(TAG_COMMIT, (KIND_BIGINT,))
        if abs(claimed) > bound:
            return Verdict.reject("CommitmentOutOfBounds", counter.ops), None
        q = ch.challenge_prime("intdet.q", bits)
        field = PrimeField(q)
        s = full_sample_set(field)
        reason, value, eps_field = det_verifier_flow(
            ch, field, m.reduce(field), s, n, counter
        )
        if reason is not None:
            return Verdict.reject(reason, counter.ops), None
        if claimed % q != value:
            return Verdict.reject("CheckFailed:lift", counter.ops), None
        eps = intdet_epsilon(bound, bits, eps_field)
        return Verdict.accept(eps, labels, counter.ops), claimed

    return params, digest, prover, verifier


def intdet_certify(
    m: IntMatrix,
    source,
    bits: int = DEFAULT_PRIME_BITS,
    prover_seed: Optional[int] = None,
    timeout: float = 60.0,
):
    """Certify the determinant of an integer matrix.

    Returns (verdict, determinant); the value is None on rejection.  The
    prover commits the integer answer first; the verifier checks it
    against the Hadamard bound, draws a random prime of the agreed size,
    and settles the reduced claim with the field certificate.
    """
    params, digest, prover, verifier = _intdet_parts(m, bits, prover_seed)
    return certify(PROTOCOL_INTDET, params, digest, prover, verifier, source, timeout)


def intdet_verify(m: IntMatrix, transcript, bits: int = DEFAULT_PRIME_BITS):
    params, digest, _, verifier = _intdet_parts(m, bits, None)
    return verify_recorded(transcript, PROTOCOL_INTDET, digest, params, verifier)


def _lift_rng(digest: bytes, prover_seed: Optional[int]) -> Random:
    if prover_seed is None:
        prover_seed = int.from_bytes(
            hashlib.sha256(digest + b"prover-seed").digest()[:8], "little"
        )
    return Random(prover_seed)


class PolyMatrix:
    """Square matrix of polynomials over one prime field."""

    __slots__ = ("field", "entries")

    def __init__(self, field: PrimeField, entries: Sequence[Sequence[Poly]]):
        self.field = field
        rows = [list(row) for row in entries]
        width = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != width:
                raise DimensionMismatch("ragged rows")
            for e in row:
                if not isinstance(e, Poly):
                    raise TypeError("entries must be polynomials")
                if e.field != field:
                    raise FieldMismatch("entry over a different field")
        self.entries = rows

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def max_degree(self) -> int:
        return max(
            (e.degree for row in self.entries for e in row if not e.is_zero),
            default=0,
        )

    def evaluate(self, x: int) -> DenseMatrix:
        vals = [[e(x) for e in row] for row in self.entries]
        return DenseMatrix(self.field, vals)

    def encode(self) -> bytes:
        out = [b"P", _u64(self.field.p), _u32(self.rows), _u32(self.cols)]
        for row in self.entries:
            for e in row:
                out.append(encode_payload(KIND_POLY, e))
        return b"".join(out)

    def __repr__(self) -> str:
        return f"PolyMatrix({self.rows}x{self.cols}, GF({self.field.p}))"


def poly_det_interp(m: PolyMatrix) -> Poly:
    """Exact determinant polynomial by evaluation and interpolation.

    Prover-side: the determinant has degree at most n * max entry degree,
    so that many point evaluations (each a dense field elimination)
    followed by Lagrange interpolation recover it.
    """
    from .la import det_dense

    field = m.field
    if m.rows != m.cols:
        raise NotSquare("determinant needs a square matrix")
    n = m.rows
    bound = n * m.max_degree
    if bound + 1 > field.p:
        raise ValueError("field too small to interpolate the determinant")
    xs = list(range(bound + 1))
    ys = [det_dense(m.evaluate(x)) for x in xs]
    return _lagrange(field, xs, ys)


def _lagrange(field: PrimeField, xs: list[int], ys: list[int]) -> Poly:
    p = field.p
    total = Poly.zero(field)
    # running product prod_(x - x_j) maintained by synthetic division
    master = Poly.one(field)
    for x in xs:
        master = master * Poly(field, [(-x) % p, 1])
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        quot, _ = master.divmod_by(Poly(field, [(-xi) % p, 1]))
        denom = quot(xi)
        total = total + quot.scale(yi * field.inv(denom) % p)
    return total


def polydet_epsilon(n: int, deg_bound: int, s_size: int, eps_field: Fraction) -> Fraction:
    return Fraction(n * deg_bound, s_size) + eps_field


def _polydet_parts(m: PolyMatrix, deg_bound: Optional[int], prover_seed: Optional[int]):
    if m.rows != m.cols:
        raise NotSquare("determinant needs a square matrix")
    n = m.rows
    if n < 1:
        raise DimensionMismatch("matrix must be at least 1x1")
    field = m.field
    if deg_bound is None:
        deg_bound = m.max_degree
    if deg_bound < m.max_degree:
        raise ValueError("degree bound below an actual entry degree")
    s = full_sample_set(field)
    params = _u64(field.p) + _u32(n) + _u32(deg_bound)
    digest = instance_digest(PROTOCOL_POLYDET, (m.encode(),))

    def prover(ch):
        rng = _lift_rng(digest, prover_seed)
        f = poly_det_interp(m)
        ch.send(TAG_COMMIT, KIND_POLY, f)
        alpha = ch.challenge_scalar("polydet.alpha", s)
        det_prover_flow(ch, field, m.evaluate(alpha), s, rng, n)

    def verifier(ch):
        counter = CostCounter()
        labels = (HEURISTIC_FS,) if ch.is_fiat_shamir else ()
        _, f_coeffs = ch.recv(TAG_COMMIT, (KIND_POLY,), field)
        f = Poly(field, f_coeffs)
        if f.degree > n * deg_bound:
            return Verdict.reject("DegreeOutOfBounds", counter.ops), None
        alpha = ch.challenge_scalar("polydet.alpha", s)
        evaluated = m.evaluate(alpha)
        reason, value, eps_field = det_verifier_flow(
            ch, field, evaluated, s, n, counter
        )
        if reason is not None:
            return Verdict.reject(reason, counter.ops), None
        counter.add(2 * max(f.degree, 0))
        if f(alpha) != value:
            return Verdict.reject("CheckFailed:lift", counter.ops), None
        eps = polydet_epsilon(n, deg_bound, len(s), eps_field)
        return Verdict.accept(eps, labels, counter.ops), f

    return params, digest, prover, verifier


def polydet_certify(
    m: PolyMatrix,
    source,
    deg_bound: Optional[int] = None,
    prover_seed: Optional[int] = None,
    timeout: float = 60.0,
):
    """Certify the determinant of a polynomial matrix.

    Returns (verdict, determinant polynomial); None on rejection.  The
    committed polynomial is checked at a random point against a field
    determinant certificate for the evaluated matrix; two distinct
    polynomials of degree at most n*d agree on at most n*d points.
    """
    params, digest, prover, verifier = _polydet_parts(m, deg_bound, prover_seed)
    return certify(PROTOCOL_POLYDET, params, digest, prover, verifier, source, timeout)


def polydet_verify(m: PolyMatrix, transcript, deg_bound: Optional[int] = None):
    params, digest, _, verifier = _polydet_parts(m, deg_bound, None)
    return verify_recorded(transcript, PROTOCOL_POLYDET, digest, params, verifier)
