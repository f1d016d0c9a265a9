"""Kernel selection: the compiled extension when importable, else pure Python."""

from __future__ import annotations

import os

BACKEND = "python"

if os.environ.get("TAUTRING_PURE_PYTHON") != "1":
    try:
        from ._ckernel import axpy, combine, insert_row, poly_mul, reduce_row  # type: ignore

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._kernel_py import axpy, combine, insert_row, poly_mul, reduce_row

__all__ = ["BACKEND", "axpy", "combine", "insert_row", "poly_mul", "reduce_row"]
