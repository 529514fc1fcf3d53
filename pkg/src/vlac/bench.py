"""Benchmark instances and timing runs.

Two standard workloads: a dense product check where the honest prover
pays the full cubic multiplication and the verifier three matrix-vector
products, and a sparse determinant where the prover runs Krylov
sequences while the verifier does one checked solve.  Both report the
verifier/prover time ratio, which is the whole point of certifying.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from random import Random
from typing import Optional

from .certs_dense import dense_bytes, matmul_certify
from .certs_sparse import det_certify
from .ff import PrimeField, field_new
from .la import DenseMatrix, SparseMatrix, dense_matmul, det_dense
from .proto import FiatShamirSource, Verdict, transcript_serialize

BENCH_MATMUL_SIZE = 1024
BENCH_MATMUL_MODULUS = 10007
BENCH_DET_SIZE = 4096
BENCH_DET_MODULUS = 536870909  # largest prime below 2**29, int64-safe
BENCH_DET_PER_ROW = 10


def random_dense(field: PrimeField, rows: int, cols: int, rng: Random) -> DenseMatrix:
    return DenseMatrix(
        field, [[rng.randrange(field.p) for _ in range(cols)] for _ in range(rows)]
    )


def random_nonsingular(field: PrimeField, n: int, rng: Random) -> DenseMatrix:
    while True:
        m = random_dense(field, n, n, rng)
        if det_dense(m) != 0:
            return m


def random_sparse(
    field: PrimeField, n: int, per_row: int, rng: Random, diagonal: bool = True
) -> SparseMatrix:
    """Roughly per_row entries per row; a nonzero diagonal keeps random
    instances comfortably nonsingular for determinant workloads."""
    triples = []
    for i in range(n):
        cols = set()
        if diagonal:
            cols.add(i)
        while len(cols) < min(per_row, n):
            cols.add(rng.randrange(n))
        for j in sorted(cols):
            triples.append((i, j, rng.randrange(1, field.p)))
    return SparseMatrix(field, n, n, triples)


def random_rank_deficient(
    field: PrimeField, m: int, n: int, r: int, rng: Random
) -> DenseMatrix:
    """Product of random m x r and r x n factors; rank r with high
    probability (exactly r once both factors have full rank)."""
    if r == 0:
        return DenseMatrix(field, [[0] * n for _ in range(m)])
    left = random_dense(field, m, r, rng)
    right = random_dense(field, r, n, rng)
    return dense_matmul(left, right)


CSV_HEADER = "name,n,prover_seconds,verifier_seconds,certificate_bytes,epsilon"


@dataclass
class BenchResult:
    name: str
    size: int
    prover_seconds: float
    verifier_seconds: float
    accepted: bool
    cert_bytes: int = 0
    epsilon: str = ""
    detail: str = ""

    @property
    def ratio(self) -> float:
        if self.prover_seconds == 0:
            return float("inf")
        return self.verifier_seconds / self.prover_seconds

    def csv(self) -> str:
        return (
            f"{self.name},{self.size},{self.prover_seconds:.4f},"
            f"{self.verifier_seconds:.4f},{self.cert_bytes},{self.epsilon}"
        )

    def render(self) -> str:
        return (
            f"{self.name} n={self.size}: prover {self.prover_seconds:.3f}s, "
            f"verifier {self.verifier_seconds:.3f}s, ratio {self.ratio:.5f}"
            + (f" ({self.detail})" if self.detail else "")
        )


def bench_matmul(
    n: int = BENCH_MATMUL_SIZE,
    modulus: int = BENCH_MATMUL_MODULUS,
    seed: int = 1,
) -> BenchResult:
    field = field_new(modulus)
    rng = Random(seed)
    a = random_dense(field, n, n, rng)
    b = random_dense(field, n, n, rng)

    t0 = time.perf_counter()
    c = dense_matmul(a, b)  # the honest prover's cubic workload
    prover_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    verdict = matmul_certify(a, b, c, FiatShamirSource())
    verifier_s = time.perf_counter() - t0
    # the claimed product is the certificate: the verifier cannot check a
    # product it was never shown, so its bytes count toward the bill
    cert = len(transcript_serialize(verdict.transcript)) + len(dense_bytes(c))
    return BenchResult(
        "matmul", n, prover_s, verifier_s, verdict.accepted,
        cert_bytes=cert,
        epsilon=str(verdict.error_bound),
        detail=f"eps={verdict.error_bound}",
    )


def bench_sparse_det(
    n: int = BENCH_DET_SIZE,
    modulus: int = BENCH_DET_MODULUS,
    per_row: int = BENCH_DET_PER_ROW,
    seed: int = 1,
) -> BenchResult:
    from .certs_sparse import det_verify

    field = field_new(modulus)
    rng = Random(seed)
    a = random_sparse(field, n, per_row, rng)

    t0 = time.perf_counter()
    verdict, value = det_certify(a, FiatShamirSource(), prover_seed=seed)
    prove_total = time.perf_counter() - t0

    transcript = verdict.transcript
    t0 = time.perf_counter()
    verdict2, value2 = det_verify(a, transcript)
    verifier_s = time.perf_counter() - t0
    accepted = verdict2.accepted and value2 == value
    # the certify call above already replayed once; subtract that to
    # approximate pure proving time
    prover_s = max(prove_total - verifier_s, 1e-9)
    return BenchResult(
        "sparse-det",
        n,
        prover_s,
        verifier_s,
        accepted,
        cert_bytes=len(transcript_serialize(transcript)),
        epsilon=str(verdict2.error_bound),
        detail=f"det={value} ops={verdict2.verifier_ops}",
    )
