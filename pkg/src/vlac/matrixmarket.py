"""Matrix Market reading and writing.

Supported headers are ``matrix coordinate integer general`` and
``matrix array integer general``.  Real and complex files are refused:
every protocol here is exact, so floating-point entries have no meaning.

Two structured comment lines extend the format:

* ``%%modulus=P`` marks the entries as elements of GF(P); coordinate
  files become sparse matrices, array files dense ones.
* ``%%polydegree=D`` (together with a modulus) turns each entry into a
  polynomial given by D+1 coefficients, constant term first.  A
  coordinate line then reads ``i j c0 c1 ... cD``, and each array entry
  occupies one line of D+1 numbers.

Files without a modulus parse as arbitrary-precision integer matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import Malformed
from .ff import Poly, PrimeField, field_new
from .la import DenseMatrix, SparseMatrix
from .lift import IntMatrix, PolyMatrix

Parsed = Union[DenseMatrix, SparseMatrix, IntMatrix, PolyMatrix]


@dataclass
class MatrixFile:
    matrix: Parsed
    modulus: Optional[int]
    polydegree: Optional[int]
    layout: str  # "coordinate" or "array"


def _tokens(line: str) -> list[str]:
    return line.split()


def parse_matrix_market(text: str) -> MatrixFile:
    lines = text.splitlines()
    if not lines:
        raise Malformed("empty file")
    head = _tokens(lines[0])
    if len(head) != 5 or head[0] != "%%MatrixMarket":
        raise Malformed("missing MatrixMarket banner")
    obj, layout, entry_type, symmetry = (w.lower() for w in head[1:])
    if obj != "matrix":
        raise Malformed(f"unsupported object {obj!r}")
    if layout not in ("coordinate", "array"):
        raise Malformed(f"unsupported layout {layout!r}")
    if entry_type != "integer":
        raise Malformed(
            f"entry type {entry_type!r} not supported; exact protocols need integer data"
        )
    if symmetry != "general":
        raise Malformed(f"unsupported symmetry {symmetry!r}")

    modulus: Optional[int] = None
    polydegree: Optional[int] = None
    body_at = None
    for idx, raw in enumerate(lines[1:], start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("%"):
            if line.startswith("%%") and "=" in line:
                key, _, val = line[2:].partition("=")
                key = key.strip().lower()
                try:
                    num = int(val.strip())
                except ValueError:
                    raise Malformed(f"bad structured comment {line!r}")
                if key == "modulus":
                    modulus = num
                elif key == "polydegree":
                    polydegree = num
                # unknown structured comments are plain comments
            continue
        body_at = idx
        break
    if body_at is None:
        raise Malformed("missing size line")
    if polydegree is not None and modulus is None:
        raise Malformed("polynomial entries need a modulus")
    if polydegree is not None and polydegree < 0:
        raise Malformed("polynomial degree bound must be nonnegative")

    body = []
    for raw in lines[body_at:]:
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        body.append(line)
    size = _tokens(body[0])
    rows_body = body[1:]

    field = field_new(modulus) if modulus is not None else None
    if layout == "coordinate":
        if len(size) != 3:
            raise Malformed("coordinate size line wants rows cols nnz")
        rows, cols, nnz = (_int(t) for t in size)
        if rows < 0 or cols < 0 or nnz < 0:
            raise Malformed("negative size")
        if len(rows_body) != nnz:
            raise Malformed(f"expected {nnz} entries, found {len(rows_body)}")
        return _parse_coordinate(rows, cols, rows_body, field, polydegree, modulus)
    if len(size) != 2:
        raise Malformed("array size line wants rows cols")
    rows, cols = (_int(t) for t in size)
    if rows < 0 or cols < 0:
        raise Malformed("negative size")
    return _parse_array(rows, cols, rows_body, field, polydegree, modulus)


def _int(tok: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise Malformed(f"bad integer {tok!r}")


def _entry_tokens(parts: list[str], polydegree: Optional[int], where: str) -> list[int]:
    want = 1 if polydegree is None else polydegree + 1
    if len(parts) != want:
        raise Malformed(f"{where}: expected {want} value(s), found {len(parts)}")
    return [_int(t) for t in parts]


def _parse_coordinate(rows, cols, body, field, polydegree, modulus) -> MatrixFile:
    triples = []
    seen = set()
    for line in body:
        parts = _tokens(line)
        if len(parts) < 2:
            raise Malformed(f"short coordinate line {line!r}")
        i, j = _int(parts[0]), _int(parts[1])
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise Malformed(f"entry ({i},{j}) outside {rows}x{cols}")
        if (i, j) in seen:
            raise Malformed(f"duplicate entry ({i},{j})")
        seen.add((i, j))
        vals = _entry_tokens(parts[2:], polydegree, f"entry ({i},{j})")
        triples.append((i - 1, j - 1, vals))

    if field is None:
        dense = [[0] * cols for _ in range(rows)]
        for i, j, vals in triples:
            dense[i][j] = vals[0]
        return MatrixFile(IntMatrix(dense), None, None, "coordinate")
    if polydegree is not None:
        entries = [[Poly.zero(field)] * cols for _ in range(rows)]
        for i, j, vals in triples:
            entries[i][j] = Poly(field, [v % field.p for v in vals])
        return MatrixFile(
            PolyMatrix(field, entries), modulus, polydegree, "coordinate"
        )
    reduced = [(i, j, vals[0] % field.p) for i, j, vals in triples]
    return MatrixFile(
        SparseMatrix(field, rows, cols, reduced), modulus, None, "coordinate"
    )


def _parse_array(rows, cols, body, field, polydegree, modulus) -> MatrixFile:
    # array entries run down columns, per the format
    count = rows * cols
    if polydegree is None:
        vals = []
        for line in body:
            vals.extend(_int(t) for t in _tokens(line))
        if len(vals) != count:
            raise Malformed(f"expected {count} values, found {len(vals)}")
        cells = [[vals[j * rows + i] for j in range(cols)] for i in range(rows)]
        if field is None:
            return MatrixFile(IntMatrix(cells), None, None, "array")
        return MatrixFile(DenseMatrix(field, [[v % field.p for v in row] for row in cells]),
                          modulus, None, "array")
    if len(body) != count:
        raise Malformed(f"expected {count} entry lines, found {len(body)}")
    flat = []
    for k, line in enumerate(body):
        coeffs = _entry_tokens(_tokens(line), polydegree, f"entry {k + 1}")
        flat.append(Poly(field, [v % field.p for v in coeffs]))
    entries = [[flat[j * rows + i] for j in range(cols)] for i in range(rows)]
    return MatrixFile(PolyMatrix(field, entries), modulus, polydegree, "array")


# -- writers -------------------------------------------------------------------


def write_dense(m: DenseMatrix) -> str:
    out = [
        "%%MatrixMarket matrix array integer general",
        f"%%modulus={m.field.p}",
        f"{m.rows} {m.cols}",
    ]
    for j in range(m.cols):
        for i in range(m.rows):
            out.append(str(m.entry(i, j)))
    return "\n".join(out) + "\n"


def write_sparse(m: SparseMatrix) -> str:
    out = [
        "%%MatrixMarket matrix coordinate integer general",
        f"%%modulus={m.field.p}",
        f"{m.rows} {m.cols} {m.nnz}",
    ]
    for i, j, v in m.triples():
        out.append(f"{i + 1} {j + 1} {v}")
    return "\n".join(out) + "\n"


def write_int(m: IntMatrix) -> str:
    out = [
        "%%MatrixMarket matrix array integer general",
        f"{m.rows} {m.cols}",
    ]
    for j in range(m.cols):
        for i in range(m.rows):
            out.append(str(m.entry(i, j)))
    return "\n".join(out) + "\n"


def write_poly(m: PolyMatrix, deg_bound: Optional[int] = None) -> str:
    d = m.max_degree if deg_bound is None else deg_bound
    out = [
        "%%MatrixMarket matrix array integer general",
        f"%%modulus={m.field.p}",
        f"%%polydegree={d}",
        f"{m.rows} {m.cols}",
    ]
    for j in range(m.cols):
        for i in range(m.rows):
            e = m.entries[i][j]
            coeffs = [e.coeff(k) for k in range(d + 1)]
            out.append(" ".join(str(c) for c in coeffs))
    return "\n".join(out) + "\n"
