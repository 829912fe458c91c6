"""Hot numeric kernels, JIT-compiled with numba when available.

Every kernel has a pure-numpy twin.  The active backend is chosen once at
import from the PSEUDOSENSE_NUMBA environment variable:

    PSEUDOSENSE_NUMBA=1   force numba (ImportError if numba is missing)
    PSEUDOSENSE_NUMBA=0   force the numpy fallback
    unset                 numba if importable, else numpy

`set_backend` switches at runtime (used by tests and the benchmark).
The two backends agree to floating-point roundoff; elementwise kernels
are bitwise identical, reductions may differ in the last ulps because of
summation order.
"""

from __future__ import annotations

import os

import numpy as np

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


# -- numpy implementations --------------------------------------------------


def _np_soft_threshold(x: np.ndarray, a: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - a, 0.0)


def _np_threshold_split(e: np.ndarray, thr: float) -> tuple[np.ndarray, int]:
    mask = np.abs(e) > thr
    s = np.where(mask, e, 0.0)
    return s, int(mask.sum())


def _np_rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def _np_column_cosines(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    dots = v @ m
    norms = np.sqrt(np.einsum("ij,ij->j", m, m)) * np.linalg.norm(v)
    out = np.full(m.shape[1], np.nan)
    nz = norms > 0.0
    out[nz] = dots[nz] / norms[nz]
    return out


_NUMPY_IMPLS = {
    "soft_threshold": _np_soft_threshold,
    "threshold_split": _np_threshold_split,
    "rms": _np_rms,
    "column_cosines": _np_column_cosines,
}


# -- numba implementations ---------------------------------------------------


def _build_numba_impls():
    from numba import njit

    @njit(cache=True)
    def nb_soft_threshold(x, a):
        out = np.empty_like(x)
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                v = x[i, j]
                if v > a:
                    out[i, j] = v - a
                elif v < -a:
                    out[i, j] = v + a
                else:
                    out[i, j] = 0.0
        return out

    @njit(cache=True)
    def nb_threshold_split(e, thr):
        s = np.zeros_like(e)
        nnz = 0
        for i in range(e.shape[0]):
            for j in range(e.shape[1]):
                v = e[i, j]
                if v > thr or v < -thr:
                    s[i, j] = v
                    nnz += 1
        return s, nnz

    @njit(cache=True)
    def nb_rms(x):
        acc = 0.0
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                acc += x[i, j] * x[i, j]
        return np.sqrt(acc / (x.shape[0] * x.shape[1]))

    @njit(cache=True)
    def nb_column_cosines(m, v):
        n = m.shape[1]
        dots = np.zeros(n)
        sq = np.zeros(n)
        for i in range(m.shape[0]):
            vi = v[i]
            for j in range(n):
                dots[j] += m[i, j] * vi
                sq[j] += m[i, j] * m[i, j]
        vnorm = np.sqrt(np.dot(v, v))
        out = np.empty(n)
        for j in range(n):
            d = np.sqrt(sq[j]) * vnorm
            out[j] = dots[j] / d if d > 0.0 else np.nan
        return out

    return {
        "soft_threshold": nb_soft_threshold,
        "threshold_split": lambda e, thr: (lambda s, n: (s, int(n)))(
            *nb_threshold_split(e, thr)
        ),
        "rms": lambda x: float(nb_rms(x)),
        "column_cosines": nb_column_cosines,
    }


# -- dispatch -----------------------------------------------------------------

_active_name = "numpy"
_active = _NUMPY_IMPLS
_numba_impls = None


def set_backend(name: str) -> None:
    """Select the kernel backend, 'numba' or 'numpy'."""
    global _active_name, _active, _numba_impls
    if name == "numpy":
        _active_name, _active = "numpy", _NUMPY_IMPLS
    elif name == "numba":
        if _numba_impls is None:
            _numba_impls = _build_numba_impls()
        _active_name, _active = "numba", _numba_impls
    else:
        raise ValueError(f"unknown kernel backend {name!r}")


def active_backend() -> str:
    return _active_name


def _init_from_env() -> None:
    flag = os.environ.get("PSEUDOSENSE_NUMBA", "").strip().lower()
    if flag in _FALSE:
        set_backend("numpy")
        return
    if flag in _TRUE:
        set_backend("numba")
        return
    try:
        set_backend("numba")
    except ImportError:
        set_backend("numpy")


_init_from_env()


# -- public kernels -----------------------------------------------------------


def soft_threshold_values(x: np.ndarray, a: float) -> np.ndarray:
    """Elementwise shrinkage of a 2-D float64 array toward zero by a."""
    return _active["soft_threshold"](x, a)


def threshold_split(e: np.ndarray, thr: float) -> tuple[np.ndarray, int]:
    """Entries of e strictly outside [-thr, thr], and how many there are."""
    return _active["threshold_split"](e, thr)


def rms(x: np.ndarray) -> float:
    """Root mean square over all entries of a 2-D array."""
    return _active["rms"](x)


def column_cosines(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cosine of every column of m (D x N) with v (D,); NaN for zero columns."""
    return _active["column_cosines"](m, v)
