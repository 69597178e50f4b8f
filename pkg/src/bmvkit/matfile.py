"""Matrix file format and canonical JSON serialization.

A matrix document holds {"n", "re", "im", "classification"} with numbers
written to 17 significant digits (lossless for float64); exact-mode matrices
additionally carry {"num", "den"}, each a pair [real, imaginary] of n x n
integer arrays. The canonical writer emits deterministic bytes so reports can
be compared byte-for-byte across replays.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .exact import ExactMatrix
from .matcore import CLASSIFICATIONS, HermitianMatrix, hermitian


def format_float(x: float) -> str:
    if not np.isfinite(x):
        raise DomainError(f"cannot serialize non-finite value {x}")
    return "%.17g" % float(x)


def canonical_json(obj) -> str:
    """Deterministic JSON: insertion-ordered dicts, floats at 17 significant digits."""
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{canonical_json(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return canonical_json(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise DomainError(f"cannot serialize value of type {type(obj).__name__}")


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def matrix_document(m: HermitianMatrix) -> dict:
    doc = {
        "n": m.n,
        "re": [[float(x) for x in row] for row in m.data.real],
        "im": [[float(x) for x in row] for row in m.data.imag],
        "classification": m.classification,
    }
    if m.exact is not None:
        doc["num"] = [
            [[x.numerator for x in row] for row in m.exact.re],
            [[x.numerator for x in row] for row in m.exact.im],
        ]
        doc["den"] = [
            [[x.denominator for x in row] for row in m.exact.re],
            [[x.denominator for x in row] for row in m.exact.im],
        ]
    return doc


def dumps_matrix(m: HermitianMatrix) -> str:
    return canonical_json(matrix_document(m)) + "\n"


def save_matrix(m: HermitianMatrix, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_matrix(m))


def _as_square(doc, key: str, n: int) -> np.ndarray:
    arr = np.asarray(doc[key], dtype=float)
    if arr.shape != (n, n):
        raise DomainError(f"field {key!r} must be {n}x{n}, got shape {arr.shape}")
    return arr


def matrix_from_document(doc: dict) -> HermitianMatrix:
    if not isinstance(doc, dict):
        raise DomainError("matrix document must be a JSON object")
    for key in ("n", "re", "im", "classification"):
        if key not in doc:
            raise DomainError(f"matrix document missing field {key!r}")
    n = int(doc["n"])
    if n < 1:
        raise DomainError(f"dimension must be at least 1, got {n}")
    re = _as_square(doc, "re", n)
    im = _as_square(doc, "im", n)
    cls = doc["classification"]
    if cls not in CLASSIFICATIONS:
        raise DomainError(f"unknown classification {cls!r}")
    exact = None
    if "num" in doc or "den" in doc:
        if "num" not in doc or "den" not in doc:
            raise DomainError("exact matrix needs both num and den fields")
        num = doc["num"]
        den = doc["den"]
        exact = ExactMatrix(
            [[Fraction(int(num[0][i][j]), int(den[0][i][j])) for j in range(n)] for i in range(n)],
            [[Fraction(int(num[1][i][j]), int(den[1][i][j])) for j in range(n)] for i in range(n)],
        )
        if not exact.is_hermitian():
            raise DomainError("exact entries are not Hermitian")
        data = exact.to_complex()
    else:
        data = re + 1j * im
        nrm = max(float(np.max(np.abs(data))), 1e-300)
        if float(np.max(np.abs(data - data.conj().T))) > 1e-9 * nrm:
            raise DomainError("matrix entries are not Hermitian")
    return hermitian(data, cls, exact=exact)


def loads_matrix(text: str) -> HermitianMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid matrix document: {exc}") from exc
    return matrix_from_document(doc)


def load_matrix(path: str) -> HermitianMatrix:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read matrix file {path}: {exc}") from exc
    try:
        return loads_matrix(text)
    except DomainError as exc:
        raise DomainError(f"{path}: {exc}") from exc
