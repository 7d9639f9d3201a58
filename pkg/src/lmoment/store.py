"""Content-addressed on-disk store for numpy arrays."""

from __future__ import annotations

import hashlib
import os
import tempfile
import threading
from pathlib import Path
from typing import Callable

import numpy as np


class ArrayStore:
    """Arrays saved as ``<sha256 of key>.npy`` under ``root``.

    A hit returns exactly the bytes that were written, so the numbers
    produced downstream do not depend on whether the store was warm.
    """

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    @staticmethod
    def key(*parts) -> str:
        return hashlib.sha256(repr(parts).encode()).hexdigest()

    def path(self, key: str) -> Path:
        return self.root / f"{key}.npy"

    def get_or_compute(self, parts: tuple, fn: Callable[[], np.ndarray]) -> np.ndarray:
        p = self.path(self.key(*parts))
        if p.exists():
            with self._lock:
                self.hits += 1
            return np.load(p)
        arr = np.asarray(fn())
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "wb") as fh:
            np.save(fh, arr)
        os.replace(tmp, p)
        with self._lock:
            self.misses += 1
        return arr


_STORE: ArrayStore | None = None


def set_store(store: ArrayStore | None):
    global _STORE
    _STORE = store


def get_store() -> ArrayStore | None:
    return _STORE
