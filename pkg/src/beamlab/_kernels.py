"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The backend is chosen once at import time from the ``BEAMLAB_NUMBA``
environment variable:

* ``auto`` (default) -- use numba when it is importable, numpy otherwise
* ``1`` / ``true``   -- require numba, raise if it cannot be imported
* ``0`` / ``false``  -- force the pure-numpy path

Both implementations of every kernel are importable (``*_numpy`` /
``*_numba``) so the benchmark in ``benchmarks/`` can time them against
each other regardless of the selected default.

All kernels avoid fastmath and reorder-sensitive reductions, so a given
backend is bit-reproducible run to run.
"""

import os

import numpy as np

try:
    import numba

    _NUMBA_IMPORTABLE = True
except ImportError:  # pragma: no cover - exercised via BEAMLAB_NUMBA=0
    numba = None
    _NUMBA_IMPORTABLE = False


def _resolve_backend() -> str:
    flag = os.environ.get("BEAMLAB_NUMBA", "auto").strip().lower()
    if flag in ("1", "true", "yes", "on"):
        if not _NUMBA_IMPORTABLE:
            raise ImportError("BEAMLAB_NUMBA requested numba but it is not installed")
        return "numba"
    if flag in ("0", "false", "no", "off"):
        return "numpy"
    return "numba" if _NUMBA_IMPORTABLE else "numpy"


BACKEND = _resolve_backend()


def scan_magnitudes_numpy(snapshots: np.ndarray, sin_grid: np.ndarray,
                          positions: np.ndarray) -> np.ndarray:
    """|x(t)^H a(theta_g)| for every snapshot t and grid point g.

    ``snapshots`` is (K, L) complex, ``sin_grid`` holds sin(theta) per grid
    point, ``positions`` element positions in wavelengths. Returns (K, G).
    """
    L = positions.size
    A = np.exp(-2j * np.pi * np.outer(sin_grid, positions)) / np.sqrt(L)
    return np.abs(snapshots.conj() @ A.T)


def zeta_sum_numpy(snapshots: np.ndarray, scm: np.ndarray) -> float:
    """sum_t || x(t) x(t)^H - scm ||_F^2 over the snapshot set."""
    outer = snapshots[:, :, None] * snapshots[:, None, :].conj()
    outer -= scm[None, :, :]
    return float(np.sum(np.abs(outer) ** 2))


def periodogram_sum_numpy(snapshots: np.ndarray, nfft: int) -> np.ndarray:
    """Sum of per-snapshot zero-padded power spectra over the element axis."""
    spec = np.fft.fft(snapshots, nfft, axis=-1)
    return np.sum(np.abs(spec) ** 2, axis=0)


if _NUMBA_IMPORTABLE:

    @numba.njit(cache=True)
    def _scan_magnitudes_jit(snapshots, sin_grid, positions):  # pragma: no cover
        K, L = snapshots.shape
        G = sin_grid.size
        out = np.empty((K, G))
        norm = 1.0 / np.sqrt(L)
        for g in range(G):
            for t in range(K):
                acc = 0.0 + 0.0j
                for ell in range(L):
                    ph = -2.0 * np.pi * sin_grid[g] * positions[ell]
                    acc += np.conj(snapshots[t, ell]) * complex(np.cos(ph), np.sin(ph))
                out[t, g] = abs(acc) * norm
        return out

    @numba.njit(cache=True)
    def _zeta_sum_jit(snapshots, scm):  # pragma: no cover
        K, L = snapshots.shape
        total = 0.0
        for t in range(K):
            for i in range(L):
                for j in range(L):
                    d = snapshots[t, i] * np.conj(snapshots[t, j]) - scm[i, j]
                    total += d.real * d.real + d.imag * d.imag
        return total

    def scan_magnitudes_numba(snapshots, sin_grid, positions):
        return _scan_magnitudes_jit(
            np.ascontiguousarray(snapshots, dtype=np.complex128),
            np.ascontiguousarray(sin_grid, dtype=np.float64),
            np.ascontiguousarray(positions, dtype=np.float64),
        )

    def zeta_sum_numba(snapshots, scm):
        return float(_zeta_sum_jit(
            np.ascontiguousarray(snapshots, dtype=np.complex128),
            np.ascontiguousarray(scm, dtype=np.complex128),
        ))

else:  # pragma: no cover
    scan_magnitudes_numba = None
    zeta_sum_numba = None


if BACKEND == "numba":
    scan_magnitudes = scan_magnitudes_numba
    zeta_sum = zeta_sum_numba
else:
    scan_magnitudes = scan_magnitudes_numpy
    zeta_sum = zeta_sum_numpy

# FFT stays in numpy on both backends; numba gains nothing over pocketfft here.
periodogram_sum = periodogram_sum_numpy
