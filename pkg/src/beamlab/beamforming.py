"""MVDR weights, output SINR, beampatterns, and reference beamformers."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .covariance import theoretical_ipnc
from .errors import SingularMatrixError
from .signal_model import ArrayGeometry, ScenarioTruth, steering_vector

METHOD_TAGS = ("ppbss", "optimal", "smi", "diagonal_loading")


@dataclass
class BeamformerResult:
    """Weights and diagnostics of one beamformer applied to one scenario."""

    method_tag: str
    weights: np.ndarray
    soi_sv_used: np.ndarray
    output_sinr_db: float
    diagnostics: dict = field(default_factory=dict)


def mvdr_weight(covariance: np.ndarray, sv: np.ndarray) -> np.ndarray:
    """Distortionless minimum-variance weight ``R^-1 a / (a^H R^-1 a)``.

    Solved with a Hermitian (Cholesky) factorization, never an explicit
    inverse. Raises :class:`SingularMatrixError` when the matrix is not
    positive definite; callers regularize if they expect that.
    """
    a = np.asarray(sv, dtype=np.complex128)
    if np.linalg.norm(a) == 0:
        raise ValueError("steering vector must be nonzero")
    try:
        cf = scipy.linalg.cho_factor(np.asarray(covariance, dtype=np.complex128),
                                     lower=False, check_finite=False)
        z = scipy.linalg.cho_solve(cf, a, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("covariance is not positive definite") from exc
    return z / np.vdot(a, z)


def output_sinr_db(weights: np.ndarray, truth: ScenarioTruth) -> float:
    """Output SINR of a weight vector against the scenario's exact truth.

    Uses the actual (mismatched) SOI steering vector and the theoretical
    interference-plus-noise covariance. Invariant to rescaling of the
    weights.
    """
    w = np.asarray(weights, dtype=np.complex128)
    ipnc = theoretical_ipnc(truth)
    num = truth.soi_power * np.abs(np.vdot(w, truth.soi_sv)) ** 2
    den = float(np.real(np.vdot(w, ipnc @ w)))
    return 10.0 * np.log10(num / den)


def optimal_sinr_db(truth: ScenarioTruth) -> float:
    """Closed-form maximum SINR ``sigma_s^2 a^H R_in^-1 a`` in dB."""
    ipnc = theoretical_ipnc(truth)
    a = truth.soi_sv
    val = truth.soi_power * float(np.real(np.vdot(a, np.linalg.solve(ipnc, a))))
    return 10.0 * np.log10(val)


def optimal_weight(truth: ScenarioTruth) -> np.ndarray:
    """MVDR weight from the true IPNC and true SOI steering vector."""
    return mvdr_weight(theoretical_ipnc(truth), truth.soi_sv)


def smi_weight(scm: np.ndarray, nominal_sv: np.ndarray) -> np.ndarray:
    """Sample-matrix-inversion beamformer (SCM plus nominal steering)."""
    ell = scm.shape[0]
    try:
        return mvdr_weight(scm, nominal_sv)
    except SingularMatrixError:
        load = 1e-6 * np.trace(scm).real / ell
        return mvdr_weight(scm + load * np.eye(ell), nominal_sv)


def diagonal_loading_weight(scm: np.ndarray, nominal_sv: np.ndarray,
                            noise_power: float) -> np.ndarray:
    """SCM beamformer with the conventional 10*sigma_n^2 diagonal load."""
    ell = scm.shape[0]
    return mvdr_weight(scm + 10.0 * noise_power * np.eye(ell), nominal_sv)


def beampattern(weights: np.ndarray, grid_deg, geometry: ArrayGeometry) -> np.ndarray:
    """Directional magnitude response |w^H a(theta)| over a grid of degrees."""
    grid = np.atleast_1d(np.asarray(grid_deg, dtype=float))
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    sv = steering_vector(grid, geometry)
    return np.abs(sv.conj() @ np.asarray(weights, dtype=np.complex128))


def approx_beampattern(preprocessing: np.ndarray, eta: float, rho: float,
                       soi_sv: np.ndarray, grid_deg, geometry: ArrayGeometry,
                       *, eig_floor: float = 1e-10, residual_flag: float = 0.5):
    """Eigen-approximated beampattern of the weight built from ``eta*I + rho*C``.

    With ``(gamma_r, e_r)`` the significant eigenpairs of the
    preprocessing matrix, ``u = E^H a_s`` and ``h(theta)`` the least-squares
    coordinates of ``a(theta)`` in the eigenbasis, the response is

        D(theta) = eta / ||a_s||^2 * | sum_r h_r*(theta) u_r / (eta + gamma_r rho) |

    valid inside the interference sectors where ``a(theta)`` lies in the
    eigenbasis span. Returns ``(values, extrapolated)`` where the flag
    marks grid points whose basis residual exceeds ``residual_flag`` of
    the steering norm.
    """
    if eta <= 0 or rho < 0:
        raise ValueError("need eta > 0 and rho >= 0")
    gam, vec = np.linalg.eigh(np.asarray(preprocessing, dtype=np.complex128))
    keep = gam > eig_floor * max(gam.max(), 0.0)
    gam, vec = gam[keep], vec[:, keep]
    a_s = np.asarray(soi_sv, dtype=np.complex128)
    u = vec.conj().T @ a_s
    grid = np.atleast_1d(np.asarray(grid_deg, dtype=float))
    sv = steering_vector(grid, geometry)              # (G, L)
    h = sv @ vec.conj()                               # h(theta) = E^H a, rows
    resid = np.linalg.norm(sv - h @ vec.T, axis=1)
    scale = eta / float(np.real(np.vdot(a_s, a_s)))
    vals = scale * np.abs(h.conj() @ (u / (eta + gam * rho)))
    return vals, resid > residual_flag * np.linalg.norm(a_s)
