"""Array-level transforms on paired half-shifted grids.

Every radial channel of odd dimension ``d`` and degree ``l`` reduces to a
Riccati-Bessel transform of order ``n = l + (d - 3) / 2``.  With the radial
nodes ``r_j = (j + 1/2) ds`` and the frequency nodes ``nu_k = (k + 1/2) dnu``,
``ds * dnu = pi / M``, the sampled kernel ``sqrt(2/M) * S_n(nu_k r_j)`` is a
symmetric matrix.  For ``n = 0`` it is the orthonormal DST-IV and for
``n = -1`` the orthonormal DCT-IV; for ``n >= 1`` it is orthogonal up to a few
directions, and we use its symmetric polar factor instead so that all
transforms are exact unitary involutions.
"""

from __future__ import annotations

import functools
import os
from pathlib import Path

import numpy as np
from scipy import fft, special

__all__ = [
    "riccati_bessel",
    "hankel_matrix",
    "unit_hankel",
    "cone_kernel",
    "unit_cone",
]


def riccati_bessel(order: int, x):
    """``x * j_order(x)``; order ``-1`` gives ``cos(x)``."""
    x = np.asarray(x, dtype=float)
    if order == -1:
        return np.cos(x)
    if order < -1:
        raise ValueError("order must be >= -1")
    return x * special.spherical_jn(order, x)


def _cache_dir() -> Path | None:
    root = os.environ.get("LIGHTCONE_CACHE")
    if root == "":
        return None
    if root is None:
        root = Path.home() / ".cache" / "lightcone"
    path = Path(root)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError:
        return None
    return path


@functools.lru_cache(maxsize=8)
def hankel_matrix(order: int, M: int) -> np.ndarray:
    """Orthogonal symmetric matrix realizing the order-``order`` transform.

    Only used for ``order >= 1``; orders 0 and -1 go through the FFT.
    """
    if order < 1:
        raise ValueError("dense matrix only needed for order >= 1")
    cache = _cache_dir()
    fname = None
    if cache is not None:
        fname = cache / f"hankel_o{order}_M{M}.npy"
        if fname.exists():
            try:
                mat = np.load(fname)
                if mat.shape == (M, M):
                    mat.setflags(write=False)
                    return mat
            except (OSError, ValueError):
                pass
    k = np.arange(M) + 0.5
    x = np.pi * np.outer(k, k) / M
    B = np.sqrt(2.0 / M) * riccati_bessel(order, x)
    B = 0.5 * (B + B.T)
    w, V = np.linalg.eigh(B)
    # polar factor of a symmetric matrix; the null directions go to +1
    sign = np.where(w < 0.0, -1.0, 1.0)
    mat = (V * sign) @ V.T
    mat = 0.5 * (mat + mat.T)
    if fname is not None:
        try:
            tmp = fname.with_suffix(f".{os.getpid()}.tmp.npy")
            np.save(tmp, mat)
            os.replace(tmp, fname)
        except OSError:
            pass
    mat.setflags(write=False)
    return mat


def unit_hankel(order: int, x: np.ndarray) -> np.ndarray:
    """Apply the orthonormal order-``order`` transform along the last axis.

    The transform is its own inverse.
    """
    x = np.asarray(x, dtype=float)
    if order == -1:
        return fft.dct(x, type=4, norm="ortho", axis=-1)
    if order == 0:
        return fft.dst(x, type=4, norm="ortho", axis=-1)
    mat = hankel_matrix(order, x.shape[-1])
    return x @ mat


def cone_kernel(order: int) -> tuple[str, float]:
    """Kernel ``cos(nu s - (order + 1) pi / 2)`` as (``'sin'|'cos'``, sign)."""
    return [("cos", 1.0), ("sin", 1.0), ("cos", -1.0), ("sin", -1.0)][(order + 1) % 4]


def unit_cone(order: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal half-line cosine/sine-IV transform with the order's phase.

    Involutive up to the sign, which squares away.
    """
    kind, sign = cone_kernel(order)
    if kind == "sin":
        return sign * fft.dst(x, type=4, norm="ortho", axis=-1)
    return sign * fft.dct(x, type=4, norm="ortho", axis=-1)
