"""Certificates for black-box operators: nonsingularity, rank, minimal
polynomials of projected sequences, and determinants.

The verifier touches the matrix only through matrix-vector products, so
everything here works for sparse and structured operators whose apply
cost mu is far below n^2.  The prover is allowed cubic work (dense
elimination, Krylov sequences); the point is that the checks stay cheap.

Two soundness regimes coexist.  The solve-based checks (nonsingularity,
the rank lower bound, the shifted-system spot checks) carry exact error
bounds.  The rank upper bound leans on butterfly preconditioners being
generic, which is well-supported but not proven for the structured
parameter sets used here, so the bound is flagged as heuristic on the
verdict.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from random import Random
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, FieldMismatch, NotSquare
from .ff import (
    Poly,
    PrimeField,
    SampleSet,
    berlekamp_massey,
    full_sample_set,
    numerator_from_sequence,
    poly_xgcd,
)
from .la import (
    Blackbox,
    CostCounter,
    DenseMatrix,
    SparseMatrix,
    as_blackbox,
    butterfly_new,
    butterfly_padding,
    butterfly_param_count,
    compose,
    diagonal_scaling,
    kernel_vector,
    leading_projection,
    materialize,
    matvec,
    padded,
    solve_dense,
)
from .proto import (
    HEURISTIC_FS,
    KIND_EMPTY,
    KIND_POLY,
    KIND_VEC,
    TAG_COMMIT,
    TAG_RESPONSE,
    Verdict,
    certify,
    encode_payload,
    instance_digest,
    verify_recorded,
    _u32,
    _u64,
)

HEURISTIC_BUTTERFLY = "butterfly-preconditioner"

PROTOCOL_NONSINGULAR = "vlac.nonsingular.v1"
PROTOCOL_RANK_UPPER = "vlac.rank-upper.v1"
PROTOCOL_RANK = "vlac.rank.v1"
PROTOCOL_MINPOLY = "vlac.minpoly.v1"
PROTOCOL_DET = "vlac.det.v1"

# the prover redraws its scaling and projections until the projected
# sequence has full-degree generator, then gives up visibly
DET_MAX_ATTEMPTS = 20

# total shifted-system challenges before the verifier declares a stall
SHIFT_DRAWS = 4


# -- instance encodings -------------------------------------------------------


def sparse_bytes(m: SparseMatrix) -> bytes:
    out = [b"S", _u32(m.rows), _u32(m.cols), _u32(m.nnz)]
    for i, j, v in m.triples():
        out.append(_u32(i) + _u32(j) + _u64(v))
    return b"".join(out)


def operator_bytes(m, instance_tag: Optional[bytes] = None) -> bytes:
    """Canonical bytes binding a run to its operator.

    Dense and sparse matrices have a natural encoding; a raw black box
    does not, so callers must tag it themselves.
    """
    if instance_tag is not None:
        return b"T" + instance_tag
    if isinstance(m, DenseMatrix):
        return b"D" + encode_payload(5, m)
    if isinstance(m, SparseMatrix):
        return sparse_bytes(m)
    raise ValueError("a black-box operator needs an explicit instance tag")


def vec_bytes(values) -> bytes:
    return encode_payload(3, [int(v) for v in values])


def _densify(m) -> DenseMatrix:
    if isinstance(m, DenseMatrix):
        return m
    if isinstance(m, SparseMatrix):
        return m.to_dense()
    return materialize(m)


def _square_dims(m) -> tuple:
    bb = as_blackbox(m)
    if bb.rows != bb.cols:
        raise NotSquare(f"operator is {bb.rows}x{bb.cols}")
    if bb.rows < 1:
        raise DimensionMismatch("operator must be at least 1x1")
    return bb, bb.rows


def _check_sample_set(field: PrimeField, s: Optional[SampleSet]) -> SampleSet:
    if s is None:
        return full_sample_set(field)
    if s.field != field:
        raise FieldMismatch("sample set drawn from a different field")
    return s


def _prover_rng(digest: bytes, prover_seed: Optional[int]) -> Random:
    if prover_seed is None:
        prover_seed = int.from_bytes(
            hashlib.sha256(digest + b"prover-seed").digest()[:8], "little"
        )
    return Random(prover_seed)


def _dot(field: PrimeField, a: np.ndarray, b: np.ndarray, counter=None) -> int:
    """Exact inner product with overflow-safe chunking."""
    if counter is not None:
        counter.add(2 * len(a))
    if field.dtype is object or len(a) == 0:
        return int(np.dot(a, b)) % field.p if len(a) else 0
    chunk = field.dot_chunk()
    total = 0
    for i in range(0, len(a), chunk):
        total = (total + int(np.dot(a[i : i + chunk], b[i : i + chunk]))) % field.p
    return total


def projected_sequence(field: PrimeField, operator, u: np.ndarray, v: np.ndarray, count: int):
    """The first ``count`` terms of i -> u . (A^i v) (prover-side)."""
    x = v.copy()
    out = [_dot(field, u, x)]
    for _ in range(count - 1):
        x = matvec(operator, x)
        out.append(_dot(field, u, x))
    return out


# -- nonsingularity -----------------------------------------------------------


def nonsingular_epsilon(s: SampleSet) -> Fraction:
    return Fraction(1, len(s))


def _nonsingular_parts(a, s: Optional[SampleSet], instance_tag: Optional[bytes]):
    bb, n = _square_dims(a)
    field = bb.field
    s = _check_sample_set(field, s)
    params = _u64(field.p) + _u64(s.offset) + _u64(s.size) + _u32(n)
    digest = instance_digest(PROTOCOL_NONSINGULAR, (operator_bytes(a, instance_tag),))

    def prover(ch):
        dense = _densify(a)
        target = ch.challenge_vector("nonsingular.b", s, n)
        w = solve_dense(dense, field.arr(target))
        if w is None:
            ch.send(TAG_RESPONSE, KIND_EMPTY)
        else:
            ch.send(TAG_RESPONSE, KIND_VEC, [int(x) for x in w])

    def verifier(ch):
        counter = CostCounter()
        labels = (HEURISTIC_FS,) if ch.is_fiat_shamir else ()
        target = field.arr(ch.challenge_vector("nonsingular.b", s, n))
        kind, wv = ch.recv(TAG_RESPONSE, (KIND_VEC, KIND_EMPTY), field)
        if kind == KIND_EMPTY:
            return Verdict.reject("ProverFailed", counter.ops), None
        if len(wv) != n:
            return Verdict.reject("Malformed:vector-length", counter.ops), None
        w = field.arr(wv)
        ok = bool(np.array_equal(matvec(a, w, counter), target))
        if not ok:
            return Verdict.reject("CheckFailed:solve", counter.ops), None
        return Verdict.accept(nonsingular_epsilon(s), labels, counter.ops), None

    return params, digest, prover, verifier


def nonsingular_certify(
    a,
    source,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
    timeout: float = 60.0,
) -> Verdict:
    """Certify that a square operator is invertible.

    The verifier picks a random right-hand side; the prover must solve
    for it.  A singular operator misses all but at most a 1/|S| fraction
    of right-hand sides, since its column span is a proper subspace.
    """
    params, digest, prover, verifier = _nonsingular_parts(a, s, instance_tag)
    verdict, _ = certify(
        PROTOCOL_NONSINGULAR, params, digest, prover, verifier, source, timeout
    )
    return verdict


def nonsingular_verify(
    a,
    transcript,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
) -> Verdict:
    params, digest, _, verifier = _nonsingular_parts(a, s, instance_tag)
    verdict, _ = verify_recorded(
        transcript, PROTOCOL_NONSINGULAR, digest, params, verifier
    )
    return verdict


# -- rank ---------------------------------------------------------------------


def rank_upper_epsilon(m: int, n: int, r: int, s: SampleSet) -> Fraction:
    """Heuristic failure bound for the preconditioned kernel check.

    Charges (r + 2) levels of butterfly mixing plus the final projection,
    each a degree-(padded size) polynomial identity in the parameters.
    """
    n_padded = max(butterfly_padding(m), butterfly_padding(n))
    log2 = n_padded.bit_length() - 1
    return Fraction((r + 2) * log2 + 1, len(s))


def _preconditioned(field, a, m, n, u_thetas, v_thetas) -> Blackbox:
    mp = butterfly_padding(m)
    np_ = butterfly_padding(n)
    left = butterfly_new(field, m, u_thetas).as_blackbox()
    right = butterfly_new(field, n, v_thetas).as_blackbox()
    return compose(left, padded(a, mp, np_), right)


def _leading_block(field, op: Blackbox, k: int) -> DenseMatrix:
    # prover-side: probe the leading k x k corner column by column
    proj = leading_projection(op, k)
    cols = field.zeros((k, k))
    for j in range(k):
        e = field.zeros(k)
        e[j] = 1
        cols[:, j] = proj.apply(e)
    return DenseMatrix(field, cols)


def _rank_upper_prover(ch, field, a, m, n, r, s, label: str):
    u_th = ch.challenge_nonzero_vector(f"{label}.u", s, butterfly_param_count(m))
    v_th = ch.challenge_nonzero_vector(f"{label}.v", s, butterfly_param_count(n))
    op = _preconditioned(field, a, m, n, u_th, v_th)
    block = _leading_block(field, op, r + 1)
    w = kernel_vector(block)
    if w is None:
        ch.send(TAG_RESPONSE, KIND_EMPTY)
    else:
        ch.send(TAG_RESPONSE, KIND_VEC, [int(x) for x in w])


def _rank_upper_verifier(ch, field, a, m, n, r, s, counter, label: str):
    """Returns a reject reason or None."""
    u_th = ch.challenge_nonzero_vector(f"{label}.u", s, butterfly_param_count(m))
    v_th = ch.challenge_nonzero_vector(f"{label}.v", s, butterfly_param_count(n))
    kind, wv = ch.recv(TAG_RESPONSE, (KIND_VEC, KIND_EMPTY), field)
    if kind == KIND_EMPTY:
        return "ProverFailed"
    if len(wv) != r + 1:
        return "Malformed:vector-length"
    w = field.arr(wv)
    if not np.any(w != 0):
        return "ZeroWitness"
    op = _preconditioned(field, a, m, n, u_th, v_th)
    y = matvec(leading_projection(op, r + 1), w, counter)
    if np.any(y != 0):
        return "CheckFailed:kernel"
    return None


def _rank_upper_parts(a, r: int, s: Optional[SampleSet], instance_tag: Optional[bytes]):
    bb = as_blackbox(a)
    m, n = bb.shape
    if m < 1 or n < 1:
        raise DimensionMismatch("operator must be at least 1x1")
    if not 0 <= r < min(m, n):
        raise ValueError("upper-bound claims need 0 <= r < min(m, n)")
    field = bb.field
    s = _check_sample_set(field, s)
    params = _u64(field.p) + _u64(s.offset) + _u64(s.size) + _u32(m) + _u32(n) + _u32(r)
    digest = instance_digest(PROTOCOL_RANK_UPPER, (operator_bytes(a, instance_tag),))

    def prover(ch):
        _rank_upper_prover(ch, field, a, m, n, r, s, "rankub")

    def verifier(ch):
        counter = CostCounter()
        labels = (HEURISTIC_FS,) if ch.is_fiat_shamir else ()
        reason = _rank_upper_verifier(ch, field, a, m, n, r, s, counter, "rankub")
        if reason is not None:
            return Verdict.reject(reason, counter.ops), None
        eps = rank_upper_epsilon(m, n, r, s)
        return Verdict.accept(eps, labels + (HEURISTIC_BUTTERFLY,), counter.ops), None

    return params, digest, prover, verifier


def rank_upper_certify(
    a,
    r: int,
    source,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
    timeout: float = 60.0,
) -> Verdict:
    """Certify rank(a) <= r for r strictly below min(m, n).

    Random butterflies mix the row and column spaces so that, when the
    rank really exceeds r, the leading (r+1) x (r+1) corner of the mixed
    operator is almost surely invertible and no kernel witness exists.
    When the rank is at most r the corner is singular outright, so the
    honest prover always finds a witness.
    """
    params, digest, prover, verifier = _rank_upper_parts(a, r, s, instance_tag)
    verdict, _ = certify(
        PROTOCOL_RANK_UPPER, params, digest, prover, verifier, source, timeout
    )
    return verdict


def rank_upper_verify(
    a,
    r: int,
    transcript,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
) -> Verdict:
    params, digest, _, verifier = _rank_upper_parts(a, r, s, instance_tag)
    verdict, _ = verify_recorded(
        transcript, PROTOCOL_RANK_UPPER, digest, params, verifier
    )
    return verdict


def rank_epsilon(m: int, n: int, r: int, s: SampleSet) -> Fraction:
    eps = Fraction(0)
    if r > 0:
        eps += Fraction(1, len(s))
    if r < min(m, n):
        eps += rank_upper_epsilon(m, n, r, s)
    return eps


def _mixing_thetas(rng, s: SampleSet, count: int) -> list:
    # prover-side draw of invertible switch parameters from S \ {0}
    out = []
    while len(out) < count:
        v = s.offset + rng.randrange(s.size)
        if v != 0:
            out.append(v)
    return out


def _rank_parts(
    a,
    r: int,
    s: Optional[SampleSet],
    instance_tag: Optional[bytes],
    prover_seed: Optional[int] = None,
):
    bb = as_blackbox(a)
    m, n = bb.shape
    if m < 1 or n < 1:
        raise DimensionMismatch("operator must be at least 1x1")
    if not 0 <= r <= min(m, n):
        raise ValueError("rank claims need 0 <= r <= min(m, n)")
    field = bb.field
    s = _check_sample_set(field, s)
    params = _u64(field.p) + _u64(s.offset) + _u64(s.size) + _u32(m) + _u32(n) + _u32(r)
    digest = instance_digest(PROTOCOL_RANK, (operator_bytes(a, instance_tag),))

    def prover(ch):
        if r > 0:
            rng = _prover_rng(digest, prover_seed)
            block = None
            for _ in range(DET_MAX_ATTEMPTS):
                u_th = _mixing_thetas(rng, s, butterfly_param_count(m))
                v_th = _mixing_thetas(rng, s, butterfly_param_count(n))
                block = _leading_block(
                    field, _preconditioned(field, a, m, n, u_th, v_th), r
                )
                if kernel_vector(block) is None:
                    break
            ch.send(TAG_COMMIT, KIND_VEC, u_th)
            ch.send(TAG_COMMIT, KIND_VEC, v_th)
            target = ch.challenge_vector("rank.low.b", s, r)
            w = solve_dense(block, field.arr(target))
            if w is None:
                ch.send(TAG_RESPONSE, KIND_EMPTY)
            else:
                ch.send(TAG_RESPONSE, KIND_VEC, [int(x) for x in w])
        if r < min(m, n):
            _rank_upper_prover(ch, field, a, m, n, r, s, "rank.up")

    def verifier(ch):
        counter = CostCounter()
        labels = (HEURISTIC_FS,) if ch.is_fiat_shamir else ()
        if r > 0:
            _, u_th = ch.recv(TAG_COMMIT, (KIND_VEC,), field)
            _, v_th = ch.recv(TAG_COMMIT, (KIND_VEC,), field)
            if len(u_th) != butterfly_param_count(m) or len(v_th) != butterfly_param_count(n):
                return Verdict.reject("Malformed:vector-length", counter.ops), None
            if any(t == 0 for t in u_th) or any(t == 0 for t in v_th):
                return Verdict.reject("Malformed:zero-theta", counter.ops), None
            target = field.arr(ch.challenge_vector("rank.low.b", s, r))
            kind, wv = ch.recv(TAG_RESPONSE, (KIND_VEC, KIND_EMPTY), field)
            if kind == KIND_EMPTY:
                return Verdict.reject("ProverFailed", counter.ops), None
            if len(wv) != r:
                return Verdict.reject("Malformed:vector-length", counter.ops), None
            w = field.arr(wv)
            op = _preconditioned(field, a, m, n, u_th, v_th)
            y = matvec(leading_projection(op, r), w, counter)
            if not np.array_equal(y, target):
                return Verdict.reject("CheckFailed:solve", counter.ops), None
        if r < min(m, n):
            reason = _rank_upper_verifier(ch, field, a, m, n, r, s, counter, "rank.up")
            if reason is not None:
                return Verdict.reject(reason, counter.ops), None
            labels = labels + (HEURISTIC_BUTTERFLY,)
        return Verdict.accept(rank_epsilon(m, n, r, s), labels, counter.ops), None

    return params, digest, prover, verifier


def rank_certify(
    a,
    r: int,
    source,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
    timeout: float = 60.0,
    prover_seed: Optional[int] = None,
) -> Verdict:
    """Certify rank(a) == r by sandwiching it.

    Lower bound: the prover picks and commits its own butterflies, retrying
    until the leading r x r corner of the mixed operator is invertible,
    then solves it at a random target.  No choice of mixing can lift that
    corner past the true rank, so this side stays exact at 1/|S| no matter
    how the parameters were picked.  Upper bound: the verifier-drawn
    kernel-witness check above, with its heuristic bound.
    """
    params, digest, prover, verifier = _rank_parts(a, r, s, instance_tag, prover_seed)
    verdict, _ = certify(PROTOCOL_RANK, params, digest, prover, verifier, source, timeout)
    return verdict


def rank_verify(
    a,
    r: int,
    transcript,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
) -> Verdict:
    params, digest, _, verifier = _rank_parts(a, r, s, instance_tag)
    verdict, _ = verify_recorded(transcript, PROTOCOL_RANK, digest, params, verifier)
    return verdict


# -- minimal polynomial of a projected sequence -------------------------------


def minpoly_epsilon(deg_gen: int, deg_num: int, s: SampleSet) -> Fraction:
    """Coprimality spot check plus rational-identity spot check."""
    coprime = Fraction(deg_gen + max(deg_num, 0), len(s))
    identity = Fraction(max(2 * deg_gen - 1, 0), len(s))
    return coprime + identity


def _minpoly_package(field: PrimeField, seq) -> tuple:
    """Prover-side: generator, numerator, and a Bezout pair for them."""
    gen = berlekamp_massey(field, seq)
    num = numerator_from_sequence(gen, seq)
    g, phi, psi = poly_xgcd(gen, num)
    if g.degree != 0:
        raise AssertionError("generator and numerator must be coprime")
    return gen, num, phi, psi


def _send_minpoly_package(ch, gen, num, phi, psi) -> None:
    ch.send(TAG_COMMIT, KIND_POLY, gen)
    ch.send(TAG_COMMIT, KIND_POLY, num)
    ch.send(TAG_COMMIT, KIND_POLY, phi)
    ch.send(TAG_COMMIT, KIND_POLY, psi)


def _prove_shifted_solves(ch, field, s, solve_fn) -> None:
    """Answer shifted-system challenges, passing on singular shifts."""
    for attempt in range(SHIFT_DRAWS):
        r1 = ch.challenge_scalar(f"minpoly.r1.{attempt}", s)
        w = solve_fn(r1)
        if w is None:
            ch.send(TAG_RESPONSE, KIND_EMPTY)
            continue
        ch.send(TAG_RESPONSE, KIND_VEC, [int(x) for x in w])
        return


def _eval(field: PrimeField, poly: Poly, x: int, counter: CostCounter) -> int:
    counter.add(2 * max(poly.degree, 0))
    return poly(x)


def _verify_minpoly_exchange(
    ch,
    field: PrimeField,
    s: SampleSet,
    operator,
    u: np.ndarray,
    v: np.ndarray,
    n: int,
    counter: CostCounter,
    full_degree: bool,
):
    """Shared verifier flow.  Returns (reason, gen, num); reason None on pass.

    Degree checks force the numerator strictly below the generator and
    bound the Bezout cofactors; the first challenge spot-checks the
    Bezout identity (hence coprimality); the second binds the pair to the
    operator through one linear solve the verifier can check with a
    single matrix-vector product.
    """
    _, gen_coeffs = ch.recv(TAG_COMMIT, (KIND_POLY,), field)
    gen = Poly(field, gen_coeffs)
    if gen.is_zero or not gen.is_monic:
        return "DegreeViolation", None, None
    if gen.degree > n:
        return "DegreeViolation", None, None
    if full_degree and gen.degree != n:
        return "DegreeDeficient", None, None
    _, num_coeffs = ch.recv(TAG_COMMIT, (KIND_POLY,), field)
    num = Poly(field, num_coeffs)
    if num.degree >= gen.degree:
        return "DegreeViolation", None, None
    _, phi_coeffs = ch.recv(TAG_COMMIT, (KIND_POLY,), field)
    phi = Poly(field, phi_coeffs)
    if phi.degree > max(num.degree - 1, 0):
        return "DegreeViolation", None, None
    _, psi_coeffs = ch.recv(TAG_COMMIT, (KIND_POLY,), field)
    psi = Poly(field, psi_coeffs)
    if psi.degree > max(gen.degree - 1, 0):
        return "DegreeViolation", None, None

    r0 = ch.challenge_scalar("minpoly.r0", s)
    lhs = (
        _eval(field, phi, r0, counter) * _eval(field, gen, r0, counter)
        + _eval(field, psi, r0, counter) * _eval(field, num, r0, counter)
    ) % field.p
    counter.add(3)
    if lhs != 1:
        return "BezoutFail", None, None

    for attempt in range(SHIFT_DRAWS):
        r1 = ch.challenge_scalar(f"minpoly.r1.{attempt}", s)
        kind, wv = ch.recv(TAG_RESPONSE, (KIND_VEC, KIND_EMPTY), field)
        if kind == KIND_EMPTY:
            continue
        if len(wv) != n:
            return "Malformed:vector-length", None, None
        w = field.arr(wv)
        shifted = (r1 * w - matvec(operator, w, counter)) % field.p
        counter.add(2 * n)
        if not np.array_equal(shifted, v):
            return "CheckFailed:resolvent", None, None
        uw = _dot(field, u, w, counter)
        left = uw * _eval(field, gen, r1, counter) % field.p
        right = _eval(field, num, r1, counter)
        counter.add(1)
        if left != right:
            return "CheckFailed:spotcheck", None, None
        return None, gen, num
    return "SingularShift", None, None


def _minpoly_parts(a, u, v, s: Optional[SampleSet], instance_tag: Optional[bytes]):
    bb, n = _square_dims(a)
    field = bb.field
    s = _check_sample_set(field, s)
    u_arr = field.arr(list(u))
    v_arr = field.arr(list(v))
    if len(u_arr) != n or len(v_arr) != n:
        raise DimensionMismatch("projection vectors must match the operator")
    params = _u64(field.p) + _u64(s.offset) + _u64(s.size) + _u32(n)
    digest = instance_digest(
        PROTOCOL_MINPOLY,
        (operator_bytes(a, instance_tag), vec_bytes(u_arr), vec_bytes(v_arr)),
    )

    def prover(ch):
        dense = _densify(a)
        seq = projected_sequence(field, a, u_arr, v_arr, 2 * n)
        gen, num, phi, psi = _minpoly_package(field, seq)
        _send_minpoly_package(ch, gen, num, phi, psi)
        ch.challenge_scalar("minpoly.r0", s)

        def solve_shift(r1):
            shifted = (-dense.a) % field.p
            idx = np.arange(n)
            shifted[idx, idx] = (shifted[idx, idx] + r1) % field.p
            return solve_dense(DenseMatrix(field, shifted), v_arr)

        _prove_shifted_solves(ch, field, s, solve_shift)

    def verifier(ch):
        counter = CostCounter()
        labels = (HEURISTIC_FS,) if ch.is_fiat_shamir else ()
        reason, gen, num = _verify_minpoly_exchange(
            ch, field, s, a, u_arr, v_arr, n, counter, full_degree=False
        )
        if reason is not None:
            return Verdict.reject(reason, counter.ops), None
        eps = minpoly_epsilon(gen.degree, num.degree, s)
        return Verdict.accept(eps, labels, counter.ops), gen

    return params, digest, prover, verifier


def minpoly_certify(
    a,
    u,
    v,
    source,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
    timeout: float = 60.0,
):
    """Certify the minimal generator of the sequence i -> u . (A^i v).

    Returns (verdict, generator); the generator is None on rejection.
    """
    params, digest, prover, verifier = _minpoly_parts(a, u, v, s, instance_tag)
    return certify(PROTOCOL_MINPOLY, params, digest, prover, verifier, source, timeout)


def minpoly_verify(
    a,
    u,
    v,
    transcript,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
):
    params, digest, _, verifier = _minpoly_parts(a, u, v, s, instance_tag)
    return verify_recorded(transcript, PROTOCOL_MINPOLY, digest, params, verifier)


# -- determinant --------------------------------------------------------------


def det_epsilon(n: int, deg_num: int, s: SampleSet) -> Fraction:
    return minpoly_epsilon(n, deg_num, s)


def _shift_solver(field: PrimeField, operator, gen: Poly, v_arr: np.ndarray):
    """Honest responder for shifted systems when gen annihilates v.

    (r I - B)^{-1} v equals q(B) v / gen(r) with q the synthetic quotient
    of gen by (x - r), so one Horner sweep of matrix-vector products
    solves the system without any elimination.
    """
    coeffs = gen.coeffs
    deg = gen.degree

    def solve(r1: int):
        at_r1 = gen(r1)
        if at_r1 == 0:
            return None
        # synthetic division: q[deg-1] .. q[0], remainder = gen(r1)
        q = [0] * deg
        acc = coeffs[deg]
        for i in range(deg - 1, -1, -1):
            q[i] = acc
            acc = (coeffs[i] + r1 * acc) % field.p
        w = v_arr * q[deg - 1] % field.p
        for i in range(deg - 2, -1, -1):
            w = (matvec(operator, w) + q[i] * v_arr) % field.p
        return w * field.inv(at_r1) % field.p

    return solve


def det_prover_flow(ch, field: PrimeField, operator, s: SampleSet, rng: Random, n: int):
    """Prover half of the determinant exchange on an open channel.

    Reused by the integer and polynomial lifts, which run it over a field
    chosen mid-session.
    """
    p = field.p
    found = None
    for _ in range(DET_MAX_ATTEMPTS):
        scale = [rng.randrange(1, p) for _ in range(n)]
        u = [rng.randrange(p) for _ in range(n)]
        v = [rng.randrange(p) for _ in range(n)]
        scaled = compose(diagonal_scaling(field, scale), operator)
        u_arr, v_arr = field.arr(u), field.arr(v)
        seq = projected_sequence(field, scaled, u_arr, v_arr, 2 * n)
        gen = berlekamp_massey(field, seq)
        if gen.degree == n:
            found = (scale, u_arr, v_arr, scaled, seq, gen)
            break
    if found is None:
        ch.send(TAG_COMMIT, KIND_EMPTY)
        return
    scale, u_arr, v_arr, scaled, seq, gen = found
    num = numerator_from_sequence(gen, seq)
    g, phi, psi = poly_xgcd(gen, num)
    if g.degree != 0:
        raise AssertionError("generator and numerator must be coprime")
    ch.send(TAG_COMMIT, KIND_VEC, scale)
    ch.send(TAG_COMMIT, KIND_VEC, [int(x) for x in u_arr])
    ch.send(TAG_COMMIT, KIND_VEC, [int(x) for x in v_arr])
    _send_minpoly_package(ch, gen, num, phi, psi)
    ch.challenge_scalar("minpoly.r0", s)
    _prove_shifted_solves(ch, field, s, _shift_solver(field, scaled, gen, v_arr))


def det_verifier_flow(ch, field: PrimeField, operator, s: SampleSet, n: int, counter: CostCounter):
    """Verifier half of the determinant exchange.

    Returns (reason, value, eps); reason is None exactly when the run
    accepted, in which case value is the certified determinant.
    """
    p = field.p
    kind, scale = ch.recv(TAG_COMMIT, (KIND_VEC, KIND_EMPTY), field)
    if kind == KIND_EMPTY:
        return "DegreeDeficient", None, None
    if len(scale) != n:
        return "Malformed:vector-length", None, None
    if any(x == 0 for x in scale):
        return "CheckFailed:scaling", None, None
    _, uv = ch.recv(TAG_COMMIT, (KIND_VEC,), field)
    _, vv = ch.recv(TAG_COMMIT, (KIND_VEC,), field)
    if len(uv) != n or len(vv) != n:
        return "Malformed:vector-length", None, None
    u_arr, v_arr = field.arr(uv), field.arr(vv)
    scaled = compose(diagonal_scaling(field, scale), operator)
    reason, gen, num = _verify_minpoly_exchange(
        ch, field, s, scaled, u_arr, v_arr, n, counter, full_degree=True
    )
    if reason is not None:
        return reason, None, None
    # gen is the characteristic polynomial of the scaled operator, so
    # det(scaled) = (-1)^n gen(0); unwind the scaling afterwards
    det_scaled = gen.coeff(0)
    if n % 2 == 1:
        det_scaled = (-det_scaled) % p
    scale_det = 1
    for x in scale:
        scale_det = scale_det * int(x) % p
    counter.add(n + 2)
    value = det_scaled * field.inv(scale_det) % p
    return None, value, det_epsilon(n, num.degree, s)


def _det_parts(
    a,
    s: Optional[SampleSet],
    instance_tag: Optional[bytes],
    prover_seed: Optional[int],
):
    bb, n = _square_dims(a)
    field = bb.field
    s = _check_sample_set(field, s)
    params = _u64(field.p) + _u64(s.offset) + _u64(s.size) + _u32(n)
    digest = instance_digest(PROTOCOL_DET, (operator_bytes(a, instance_tag),))

    def prover(ch):
        det_prover_flow(ch, field, a, s, _prover_rng(digest, prover_seed), n)

    def verifier(ch):
        counter = CostCounter()
        labels = (HEURISTIC_FS,) if ch.is_fiat_shamir else ()
        reason, value, eps = det_verifier_flow(ch, field, a, s, n, counter)
        if reason is not None:
            return Verdict.reject(reason, counter.ops), None
        return Verdict.accept(eps, labels, counter.ops), value

    return params, digest, prover, verifier


def det_certify(
    a,
    source,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
    prover_seed: Optional[int] = None,
    timeout: float = 60.0,
):
    """Certify the determinant of a square operator.

    Returns (verdict, determinant); the value is None on rejection.

    The prover scales rows by random nonzero values until the projected
    sequence of the scaled operator has a full-degree minimal generator,
    which is then the characteristic polynomial of the scaled operator;
    its constant term yields the determinant up to sign and the known
    scaling.  The verifier never sees the matrix entries, only the
    committed polynomials and one checked linear solve.
    """
    params, digest, prover, verifier = _det_parts(a, s, instance_tag, prover_seed)
    return certify(PROTOCOL_DET, params, digest, prover, verifier, source, timeout)


def det_verify(
    a,
    transcript,
    s: Optional[SampleSet] = None,
    instance_tag: Optional[bytes] = None,
):
    params, digest, _, verifier = _det_parts(a, s, instance_tag, None)
    return verify_recorded(transcript, PROTOCOL_DET, digest, params, verifier)
