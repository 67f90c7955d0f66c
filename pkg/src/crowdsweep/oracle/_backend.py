"""Kernel selection: the compiled module when it imports, otherwise pure Python."""
from __future__ import annotations

from . import _pykernel as py

try:
    from . import _kernel as compiled
except ImportError:  # extension not built
    compiled = None

kernel = compiled if compiled is not None else py
NAME = "cython" if compiled is not None else "python"
