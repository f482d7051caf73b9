"""Desired-signal covariance over the SOI sector and its dominant eigenpair.

The SOI covariance integrates the maximum-entropy power spectrum over a
small angular sector around the presumed direction. Its principal
eigenvector estimates the actual SOI steering vector; the power method
extracts it without a full eigendecomposition.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .covariance import hermitianize
from .errors import NullStartError, SingularMatrixError
from .signal_model import ArrayGeometry, steering_vector


@dataclass(frozen=True)
class SoiSector:
    """Uniformly sampled angular sector of the desired signal."""

    center_deg: float
    half_width_deg: float = 4.0
    sample_count: int = 12

    def __post_init__(self):
        if self.sample_count < 1 or self.half_width_deg < 0:
            raise ValueError("need sample_count >= 1 and half_width >= 0")

    def angles(self) -> np.ndarray:
        if self.sample_count == 1:
            return np.array([self.center_deg])
        return np.linspace(self.center_deg - self.half_width_deg,
                           self.center_deg + self.half_width_deg,
                           self.sample_count)

    def spacing_deg(self) -> float:
        if self.sample_count == 1:
            return 2 * self.half_width_deg if self.half_width_deg > 0 else 1.0
        return 2 * self.half_width_deg / (self.sample_count - 1)


@dataclass(frozen=True)
class PowerMethodResult:
    """Dominant eigenpair estimate from power iteration."""

    eigenvalue: float
    eigenvector: np.ndarray
    iterations_used: int
    final_err: float
    converged: bool


def spectrum_inverse(scm: np.ndarray, snapshot_count: int = None) -> np.ndarray:
    """Inverse of the SCM for spectrum evaluation, loading when rank-deficient.

    With fewer snapshots than elements the SCM is singular; a tiny load
    ``1e-6 * Tr(R)/L * I`` preserves the spectrum shape while making the
    inverse well defined.
    """
    ell = scm.shape[0]
    mat = np.asarray(scm, dtype=np.complex128)
    trace = np.trace(mat).real
    if not np.isfinite(trace) or trace <= 0:
        raise SingularMatrixError("sample covariance has nonpositive trace")
    if snapshot_count is not None and snapshot_count < ell:
        mat = mat + 1e-6 * (trace / ell) * np.eye(ell)
    for attempt in range(2):
        try:
            cf = scipy.linalg.cho_factor(mat, lower=False, check_finite=False)
            return scipy.linalg.cho_solve(cf, np.eye(ell, dtype=np.complex128),
                                          check_finite=False)
        except np.linalg.LinAlgError:
            if attempt == 1:
                break
            mat = mat + 1e-6 * (trace / ell) * np.eye(ell)
    raise SingularMatrixError("sample covariance is singular even after loading")


def max_entropy_spectrum(scm_inverse: np.ndarray, theta_deg: float,
                         geometry: ArrayGeometry) -> float:
    """Maximum-entropy power estimate at one angle.

    ``sigma^2(theta) = 1 / (alpha |a^H R^-1 d1|^2)`` with ``d1`` the first
    standard basis vector and ``alpha = 1 / (d1^T R^-1 d1)``.
    """
    first_col = scm_inverse[:, 0]
    alpha = 1.0 / scm_inverse[0, 0].real
    a = steering_vector(theta_deg, geometry)
    val = alpha * np.abs(np.vdot(a, first_col)) ** 2
    if val <= 0 or not np.isfinite(val):
        raise SingularMatrixError("max-entropy spectrum undefined for this matrix")
    return float(1.0 / val)


def soi_covariance(scm: np.ndarray, sector: SoiSector, geometry: ArrayGeometry,
                   snapshot_count: int = None) -> np.ndarray:
    """Desired-signal covariance: spectrum-weighted steering outer products."""
    inv = spectrum_inverse(scm, snapshot_count)
    dth = sector.spacing_deg()
    ell = geometry.element_count
    out = np.zeros((ell, ell), dtype=np.complex128)
    for theta in sector.angles():
        a = steering_vector(theta, geometry)
        out += max_entropy_spectrum(inv, theta, geometry) * np.outer(a, a.conj()) * dth
    return hermitianize(out)


def power_method(matrix: np.ndarray, b0: np.ndarray, delta: float = 1e-3,
                 iter_max: int = 50) -> PowerMethodResult:
    """Power iteration for the dominant eigenpair of a Hermitian PSD matrix.

    Each step multiplies and renormalizes; the stop test is
    ``err = sqrt(1 - |b_j^H b_{j-1}|^2) < delta``. The inner-product
    magnitude keeps ``err`` real, and the radicand is clamped at zero
    against rounding. A start vector in the null space triggers one
    deterministic restart before failing.
    """
    if delta <= 0 or iter_max < 1:
        raise ValueError("need delta > 0 and iter_max >= 1")
    b = np.asarray(b0, dtype=np.complex128)
    norm = np.linalg.norm(b)
    if norm == 0:
        raise NullStartError("b0 is the zero vector")
    b = b / norm

    if np.linalg.norm(matrix @ b) == 0:
        b = b + (1.0 + np.arange(b.size)) / (1.0 + b.size)
        b = b / np.linalg.norm(b)
        if np.linalg.norm(matrix @ b) == 0:
            raise NullStartError("restart vector is also in the null space")

    err = np.inf
    converged = False
    iterations = 0
    for j in range(1, iter_max + 1):
        v = matrix @ b
        vnorm = np.linalg.norm(v)
        if vnorm == 0:
            break
        b_next = v / vnorm
        err = float(np.sqrt(max(0.0, 1.0 - np.abs(np.vdot(b_next, b)) ** 2)))
        b = b_next
        iterations = j
        if err < delta:
            converged = True
            break

    kappa = float(np.real(np.vdot(b, matrix @ b)))
    return PowerMethodResult(eigenvalue=kappa, eigenvector=b,
                             iterations_used=iterations, final_err=err,
                             converged=converged)
