"""Sector-sampled preprocessing matrix and shrinkage reconstruction of the
interference-plus-noise covariance.

The reconstruction is the general linear combination ``eta*I + rho*C``
with data-driven coefficients. The coefficient chain substitutes the
sample covariance for the unknown target everywhere: ``mu = Tr(R)/L``,
the sampling-variance term ``zeta`` from the fourth moments of the
snapshots, and the denominator ``||R - mu*I||^2`` that estimates
``beta + zeta``. The clamp ``eta = min(eta, mu)`` keeps ``rho`` in
[0, 1].
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .covariance import hermitianize
from .errors import DegenerateShrinkageError, DimensionError, InvalidSectorsError
from .signal_model import ArrayGeometry, steering_vector
from .doa_tracking import SectorSpec


@dataclass(frozen=True)
class ShrinkageStats:
    """Shrinkage coefficient estimates for one snapshot set."""

    mu_hat: float       # Tr(R)/L
    zeta_hat: float     # sampling-variance estimate, >= 0 up to rounding
    eta_hat: float      # unclamped identity weight
    rho_hat: float      # unclamped combination weight
    eta_tilde: float    # clamped identity weight, in [0, mu_hat]
    rho_tilde: float    # clamped combination weight, in [0, 1]


def preprocessing_matrix(sectors: SectorSpec, geometry: ArrayGeometry) -> np.ndarray:
    """Sum of unit-norm steering outer products over all sector bins.

    Bin ``ell`` of the Q-point grid maps to the angle ``(360/Q)*(ell-1)``
    degrees; indices are reduced mod Q into [1, Q]. The trace equals the
    total number of bins.
    """
    if not sectors.entries:
        raise InvalidSectorsError("at least one sector is required")
    q = sectors.grid_size
    dq = 360.0 / q
    angles = []
    for entry in sectors.entries:
        for ell in range(entry.start_index, entry.start_index + entry.width_bins):
            idx = ((ell - 1) % q) + 1
            angles.append(dq * (idx - 1))
    sv = steering_vector(np.array(angles), geometry)
    return hermitianize(sv.T @ sv.conj())


def shrinkage_stats(snapshots: np.ndarray, scm: np.ndarray,
                    preprocessing: np.ndarray = None) -> ShrinkageStats:
    """Estimate the shrinkage coefficients from data.

    ``zeta`` is evaluated in the centered one-pass form
    ``(1/K^2) sum_t ||x x^H - R||^2``, algebraically identical to
    ``(1/K^2) sum ||x||^4 - (1/K)||R||^2`` but exactly zero at K = 1.
    ``preprocessing`` is only shape-checked here; it enters at
    :func:`reconstruct_ipnc`.
    """
    x = np.asarray(snapshots, dtype=np.complex128)
    if x.ndim != 2 or scm.shape != (x.shape[1], x.shape[1]):
        raise DimensionError("snapshots (K, L) and scm (L, L) required")
    if preprocessing is not None and preprocessing.shape != scm.shape:
        raise DimensionError("preprocessing matrix dimension mismatch")
    k, ell = x.shape
    mu = float(np.trace(scm).real) / ell
    zeta = _kernels.zeta_sum(x, scm) / k**2

    denom = float(np.sum(np.abs(scm - mu * np.eye(ell)) ** 2))
    if denom < 1e-14 * ell * mu**2:
        raise DegenerateShrinkageError(
            "sample covariance indistinguishable from a scaled identity")
    eta_hat = zeta / denom * mu
    rho_hat = 1.0 - zeta / denom
    eta_tilde = min(eta_hat, mu)
    rho_tilde = 1.0 - eta_tilde / mu if mu > 0 else 0.0
    return ShrinkageStats(mu_hat=mu, zeta_hat=zeta, eta_hat=eta_hat,
                          rho_hat=rho_hat, eta_tilde=eta_tilde, rho_tilde=rho_tilde)


def reconstruct_ipnc(preprocessing: np.ndarray, stats: ShrinkageStats) -> np.ndarray:
    """Reconstructed interference-plus-noise covariance ``eta*I + rho*C``.

    Eigenvectors equal those of the input matrix; each eigenvalue maps to
    ``eta + rho * gamma``. Positive definite whenever ``eta > 0``.
    """
    ell = preprocessing.shape[0]
    return hermitianize(stats.eta_tilde * np.eye(ell) + stats.rho_tilde * preprocessing)


def closed_form_weights(target: np.ndarray, zeta: float) -> tuple:
    """Unconstrained MSE minimizers (eta0, rho0) for a known target matrix.

    Implements the closed forms ``rho0 = beta / (beta + zeta)`` and
    ``eta0 = (1 - rho0) * Tr(target) / L`` with
    ``beta = ||target||^2 - Tr(target)^2 / L``. Used by the brute-force
    oracle tests; the data path estimates these quantities instead.
    """
    ell = target.shape[0]
    tr = float(np.trace(target).real)
    beta = float(np.sum(np.abs(target) ** 2)) - tr**2 / ell
    rho0 = beta / (beta + zeta)
    eta0 = (1.0 - rho0) * tr / ell
    return eta0, rho0
