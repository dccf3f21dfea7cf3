"""File formats: MatrixMarket matrices, CSV vectors, atomic writes.

Parse failures raise ParseError whose message names the file and the 1-based
line number.  All writers go through atomic_write (temp file in the target
directory, then rename), and every CSV starts with a version comment line.

Matrix files use the MatrixMarket array or coordinate format, real or
complex, symmetry qualifier `general` only.  Vector CSVs have one header row:
`value` for real data or `re,im` for complex data.
"""

import os
import tempfile

import numpy as np

from .errors import ParseError
from .linalg import as_matrix, as_vector

VECTOR_CSV_VERSION = "# gerk-vector-csv v1"
BAND_CSV_VERSION = "# gerk-band-csv v1"
SPARSITY_CSV_VERSION = "# gerk-sparsity-csv v1"
METRICS_CSV_VERSION = "# gerk-metrics-csv v1"
CERTIFICATE_VERSION = "# gerk-certificate v1"


def atomic_write(path, text):
    """Write text to path via a temp file in the same directory plus rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    # repr of a float round-trips and is platform-stable for IEEE doubles
    return repr(float(x))


# ---------------------------------------------------------------- MatrixMarket


def write_matrix_market(path, M, comment="written by gerk"):
    """Write a dense matrix in MatrixMarket array format (column-major body)."""
    M = as_matrix(M)
    complex_field = np.iscomplexobj(M)
    field = "complex" if complex_field else "real"
    lines = [f"%%MatrixMarket matrix array {field} general", f"% {comment}"]
    m, n = M.shape
    lines.append(f"{m} {n}")
    for j in range(n):
        for i in range(m):
            v = M[i, j]
            if complex_field:
                lines.append(f"{_fmt(v.real)} {_fmt(v.imag)}")
            else:
                lines.append(_fmt(v))
    atomic_write(path, "\n".join(lines) + "\n")


def read_matrix_market(path):
    """Read a MatrixMarket file (array or coordinate, real/integer/complex)."""
    path = os.fspath(path)
    try:
        with open(path, "r") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file: {exc.strerror}") from exc
    if not raw:
        raise ParseError(path, 1, "empty file, expected a MatrixMarket header")

    header = raw[0].strip().split()
    if len(header) != 5 or header[0] != "%%MatrixMarket":
        raise ParseError(path, 1, "malformed MatrixMarket header")
    _, obj, layout, field, symmetry = (t.lower() for t in header)
    if obj != "matrix":
        raise ParseError(path, 1, f"unsupported object {obj!r}")
    if layout not in ("array", "coordinate"):
        raise ParseError(path, 1, f"unsupported format {layout!r}")
    if field not in ("real", "integer", "complex"):
        raise ParseError(path, 1, f"unsupported field {field!r}")
    if symmetry != "general":
        raise ParseError(path, 1, f"unsupported symmetry {symmetry!r} (only 'general')")
    complex_field = field == "complex"

    # skip comments and blank lines before the size line
    pos = 1
    while pos < len(raw) and (raw[pos].lstrip().startswith("%") or not raw[pos].strip()):
        pos += 1
    if pos >= len(raw):
        raise ParseError(path, len(raw), "missing size line")

    size_line = pos
    parts = raw[size_line].split()
    want = 3 if layout == "coordinate" else 2
    if len(parts) != want or not all(p.isdigit() for p in parts):
        raise ParseError(path, size_line + 1, f"size line must hold {want} integers")
    if layout == "coordinate":
        m, n, nnz = (int(p) for p in parts)
    else:
        m, n = (int(p) for p in parts)
        nnz = m * n
    if m <= 0 or n <= 0:
        raise ParseError(path, size_line + 1, "dimensions must be positive")

    M = np.zeros((m, n), dtype=np.complex128 if complex_field else np.float64)
    count = 0
    per_entry = 2 if complex_field else 1
    for lineno in range(size_line + 1, len(raw)):
        stripped = raw[lineno].strip()
        if not stripped or stripped.startswith("%"):
            continue
        if count >= nnz:
            raise ParseError(path, lineno + 1, f"more than {nnz} entries")
        parts = stripped.split()
        try:
            if layout == "coordinate":
                if len(parts) != 2 + per_entry:
                    raise ValueError
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
                vals = [float(p) for p in parts[2:]]
            else:
                if len(parts) != per_entry:
                    raise ValueError
                i, j = count % m, count // m  # array format is column-major
                vals = [float(p) for p in parts]
        except ValueError:
            raise ParseError(path, lineno + 1, f"malformed {layout} entry") from None
        if not (0 <= i < m and 0 <= j < n):
            raise ParseError(path, lineno + 1, f"index ({i + 1}, {j + 1}) out of range")
        M[i, j] = vals[0] + 1j * vals[1] if complex_field else vals[0]
        count += 1
    if count != nnz:
        raise ParseError(path, len(raw), f"expected {nnz} entries, found {count}")
    return M


# ------------------------------------------------------------------ vector CSV


def write_vector_csv(path, v):
    """Write a vector as CSV: header `value` (real) or `re,im` (complex)."""
    v = as_vector(v)
    lines = [VECTOR_CSV_VERSION]
    if np.iscomplexobj(v):
        lines.append("re,im")
        lines.extend(f"{_fmt(z.real)},{_fmt(z.imag)}" for z in v)
    else:
        lines.append("value")
        lines.extend(_fmt(x) for x in v)
    atomic_write(path, "\n".join(lines) + "\n")


def read_vector_csv(path):
    path = os.fspath(path)
    try:
        with open(path, "r") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise ParseError(path, 0, f"cannot read file: {exc.strerror}") from exc
    rows = [
        (i + 1, line.strip())
        for i, line in enumerate(raw)
        if line.strip() and not line.strip().startswith("#")
    ]
    if not rows:
        raise ParseError(path, 1, "no header row, expected 'value' or 're,im'")
    header_no, header = rows[0]
    header = header.replace(" ", "").lower()
    if header == "value":
        complex_field = False
    elif header == "re,im":
        complex_field = True
    else:
        raise ParseError(path, header_no, f"unknown vector header {header!r}")
    out = []
    for lineno, line in rows[1:]:
        parts = [p.strip() for p in line.split(",")]
        try:
            if complex_field:
                if len(parts) != 2:
                    raise ValueError
                out.append(float(parts[0]) + 1j * float(parts[1]))
            else:
                if len(parts) != 1:
                    raise ValueError
                out.append(float(parts[0]))
        except ValueError:
            raise ParseError(path, lineno, "malformed vector entry") from None
    if not out:
        raise ParseError(path, header_no, "vector has no entries")
    dtype = np.complex128 if complex_field else np.float64
    return np.asarray(out, dtype=dtype)
