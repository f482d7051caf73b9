"""Sample and theoretical covariance matrices plus matrix diagnostics.

Hermitian matrices are plain complex ndarrays. Constructors symmetrize
their output as ``(M + M^H) / 2`` so downstream eigendecompositions see
exactly Hermitian input.
"""

import numpy as np

from .errors import DimensionError, UndefinedCorrelationError
from .signal_model import ScenarioTruth


def hermitianize(m: np.ndarray) -> np.ndarray:
    """Project onto the Hermitian part, removing accumulation asymmetry."""
    return 0.5 * (m + m.conj().T)


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_psd(m: np.ndarray, tol_factor: float = 1e-10) -> bool:
    """Numerical positive semidefiniteness: eigenvalues >= -tol_factor*trace."""
    eigs = np.linalg.eigvalsh(hermitianize(m))
    return bool(eigs.min() >= -tol_factor * max(np.trace(m).real, 1.0))


def sample_covariance(snapshots: np.ndarray) -> np.ndarray:
    """Sample covariance matrix (1/K) sum_t x(t) x(t)^H of a (K, L) set."""
    x = np.asarray(snapshots)
    if x.ndim != 2:
        raise DimensionError("snapshots must be a (K, L) array")
    scm = x.T @ x.conj() / x.shape[0]
    return hermitianize(scm)


def theoretical_covariance(truth: ScenarioTruth) -> np.ndarray:
    """Exact covariance of x(t) built from the actual (mismatched) SVs."""
    return hermitianize(_ipnc(truth) + truth.soi_power * np.outer(truth.soi_sv, truth.soi_sv.conj()))


def theoretical_ipnc(truth: ScenarioTruth) -> np.ndarray:
    """Interference-plus-noise part of the covariance (SOI term omitted)."""
    return hermitianize(_ipnc(truth))


def _ipnc(truth: ScenarioTruth) -> np.ndarray:
    L = truth.geometry.element_count
    r = truth.noise_power * np.eye(L, dtype=np.complex128)
    for p in range(truth.interferer_count):
        sv = truth.actual_svs[p + 1]
        r += truth.interferer_powers[p] * np.outer(sv, sv.conj())
    return r


def pearson_correlation(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Column-wise Pearson cross-correlation of two equally sized matrices.

    Complex columns are handled by stacking real and imaginary parts into
    one real vector per column before correlating. Entry (i, j) is the
    correlation of column i of ``a`` with column j of ``b``.
    """
    if a.shape != b.shape:
        raise DimensionError("matrices must have equal shape")
    ar = _stack_real(a)
    br = _stack_real(b)
    ac = ar - ar.mean(axis=0)
    bc = br - br.mean(axis=0)
    # variances through the same matmul kernel as the covariances, so a
    # column correlated with itself comes out exactly 1 in floating point
    va = np.diag(ac.T @ ac).copy()
    vb = np.diag(bc.T @ bc).copy()
    if np.any(va == 0) or np.any(vb == 0):
        raise UndefinedCorrelationError("zero-variance column")
    cov = ac.T @ bc
    corr = cov / np.sqrt(np.outer(va, vb))
    return np.clip(corr, -1.0, 1.0)


def _stack_real(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if np.iscomplexobj(m):
        return np.vstack([m.real, m.imag]).astype(float)
    return m.astype(float)


def save_matrix_csv(path, m: np.ndarray) -> None:
    """Write a complex matrix as CSV rows of interleaved (re, im) pairs."""
    m = np.asarray(m, dtype=np.complex128)
    inter = np.empty((m.shape[0], 2 * m.shape[1]))
    inter[:, 0::2] = m.real
    inter[:, 1::2] = m.imag
    with open(path, "w") as fh:
        for row in inter:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def load_matrix_csv(path) -> np.ndarray:
    """Inverse of :func:`save_matrix_csv`."""
    rows = []
    with open(path) as fh:
        for line in fh:
            vals = np.array([float(v) for v in line.strip().split(",")])
            rows.append(vals[0::2] + 1j * vals[1::2])
    return np.array(rows)
