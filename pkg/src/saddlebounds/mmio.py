"""Matrix Market block files for saddle-point systems."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.io
import scipy.sparse

from .errors import MatrixMarketError
from .saddle_core import BlockSaddleSystem

__all__ = ["load_matrix", "load_system", "save_matrix", "save_system"]

_FIELDS = {"real", "integer", "double"}
_SYMMETRY = {"general", "symmetric"}


def _check_header(path: Path) -> None:
    with open(path) as fh:
        first = fh.readline()
    tokens = first.strip().lower().split()
    if len(tokens) != 5 or tokens[0] != "%%matrixmarket" or tokens[1] != "matrix":
        raise MatrixMarketError(f"{path}:1: not a Matrix Market banner: {first.strip()!r}")
    fmt, fld, sym = tokens[2:]
    if fmt not in ("coordinate", "array"):
        raise MatrixMarketError(f"{path}:1: unsupported format {fmt!r}")
    if fld not in _FIELDS:
        raise MatrixMarketError(f"{path}:1: unsupported field {fld!r} (need real or integer)")
    if sym not in _SYMMETRY:
        raise MatrixMarketError(f"{path}:1: unsupported symmetry {sym!r}")


def load_matrix(path) -> np.ndarray:
    """Dense float matrix from a Matrix Market file.

    Symmetric files are expanded to both triangles by the reader.
    """
    path = Path(path)
    _check_header(path)
    try:
        M = scipy.io.mmread(str(path))
    except Exception as exc:  # the reader raises a mix of ValueError/IndexError
        raise MatrixMarketError(f"{path}: {exc}") from exc
    if scipy.sparse.issparse(M):
        M = M.toarray()
    return np.asarray(M, dtype=float)


def load_system(diag_paths: Sequence, offdiag_paths: Sequence) -> BlockSaddleSystem:
    A = [load_matrix(p) for p in diag_paths]
    B = [load_matrix(p) for p in offdiag_paths]
    return BlockSaddleSystem(A, B)


def save_matrix(path, M: np.ndarray, symmetric: bool = False) -> None:
    M = np.asarray(M, dtype=float)
    coo = scipy.sparse.coo_matrix(M)
    scipy.io.mmwrite(str(path), coo, symmetry="symmetric" if symmetric else "general",
                     precision=17)


def save_system(sys: BlockSaddleSystem, directory, prefix: str = "") -> tuple[list[Path], list[Path]]:
    """Write ``A0.mtx .. AN.mtx`` and ``B1.mtx .. BN.mtx`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    diag, off = [], []
    for k, a in enumerate(sys.diag_blocks):
        p = directory / f"{prefix}A{k}.mtx"
        save_matrix(p, a, symmetric=True)
        diag.append(p)
    for k, b in enumerate(sys.offdiag_blocks, start=1):
        p = directory / f"{prefix}B{k}.mtx"
        save_matrix(p, b)
        off.append(p)
    return diag, off
