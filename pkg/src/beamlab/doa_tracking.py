"""Interference DoA estimation: DFT coarse stage, per-snapshot fine scan,
trajectory fit, and discrete angular-sector indexing.

The coarse stage finds peaks of a zero-padded spatial spectrum and maps
each peak frequency ``f`` (cycles/element) to an angle via
``theta = asin(f / spacing)``. The fine stage maximizes the correlation
``|x(t)^H a(theta)|`` on a grid around the coarse estimate, once per
snapshot. The per-interferer track is smoothed with a quadratic
least-squares fit whose value range sets the sector width.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InsufficientDataError, InsufficientPeaksError, InvalidSectorsError
from .signal_model import ArrayGeometry

_DEG = np.pi / 180.0


@dataclass(frozen=True)
class DoaTrack:
    """Per-snapshot fine estimates of one interferer and their quadratic fit."""

    estimates: np.ndarray       # (K,) degrees, snapshot order
    weights: np.ndarray         # (K,) matched-filter output powers
    coefficients: np.ndarray    # quadratic coefficients on the scaled domain
    fitted: np.ndarray          # (K,) fitted values, degrees
    range_deg: float            # max(fitted) - min(fitted)
    center_deg: float           # (max(fitted) + min(fitted)) / 2

    def point_estimate(self) -> float:
        """Power-weighted mean of the per-snapshot estimates.

        Equal weighting is badly inefficient under Rayleigh fading: faded
        snapshots carry near-uniform scan noise. Weighting by the scan's
        peak power restores near-CRB combining.
        """
        return float(np.sum(self.weights * self.estimates) / np.sum(self.weights))


@dataclass(frozen=True)
class SectorEntry:
    """Discrete angular sector of one interferer on the Q-point grid."""

    center_deg: float
    width_bins: int             # B, number of grid bins
    start_index: int            # g, 1-based index of the first bin (may be <= 0)


@dataclass(frozen=True)
class SectorSpec:
    """All interference sectors plus the grid size Q."""

    grid_size: int
    entries: tuple

    def bin_width_deg(self) -> float:
        return 360.0 / self.grid_size

    def angle_spans(self):
        """Closed angular interval [lo, hi] in degrees covered by each sector.

        Bin ``ell`` covers ``((ell-1)*dq, ell*dq]``; the ceil-based index
        convention places any angle inside the bin that ceils to it.
        """
        dq = self.bin_width_deg()
        return [((e.start_index - 1) * dq, (e.start_index - 1 + e.width_bins) * dq)
                for e in self.entries]

    def validate_disjoint(self, soi_lo_deg: float, soi_hi_deg: float) -> None:
        """Raise if any sector arc overlaps the SOI arc [soi_lo, soi_hi]."""
        q = soi_lo_deg % 360.0
        v = (soi_hi_deg - soi_lo_deg) % 360.0
        for lo, hi in self.angle_spans():
            s = lo % 360.0
            w = hi - lo
            if (q - s) % 360.0 < w or (s - q) % 360.0 < v:
                raise InvalidSectorsError(
                    f"sector [{lo:.1f}, {hi:.1f}] overlaps the SOI region")


def coarse_doas_dft(snapshots: np.ndarray, expected_count=None, *, nfft: int = 4096,
                    min_separation_sin=None, threshold_db: float = 10.0,
                    exclude_deg=(), geometry: ArrayGeometry = None) -> np.ndarray:
    """Coarse DoA estimates from the zero-padded spatial DFT.

    Parameters
    ----------
    snapshots : ndarray
        One received vector (L,) or a set (K, L). With a set, per-snapshot
        power spectra are averaged incoherently, which removes the
        single-snapshot Rayleigh-fading failure mode.
    expected_count : int or None
        Fixed number of interferers to return. ``None`` switches to
        automatic counting: peaks at least ``threshold_db`` above the
        median spectrum magnitude.
    min_separation_sin : float
        Minimum peak separation in sin(theta); defaults to one null-to-null
        beamwidth 2/L.
    exclude_deg : sequence of (lo, hi)
        Angular ranges (degrees) to skip, e.g. the SOI region.

    Returns
    -------
    ndarray of peak angles in degrees, strongest first.
    """
    x = np.atleast_2d(np.asarray(snapshots, dtype=np.complex128))
    L = x.shape[1]
    if L < 2:
        raise InsufficientPeaksError(expected_count or 1, 0)
    spacing = geometry.nominal_spacing() if geometry is not None else 0.5
    if min_separation_sin is None:
        min_separation_sin = 2.0 / L

    spectrum = _kernels.periodogram_sum(x, nfft)
    freqs = -np.fft.fftfreq(nfft)

    prev = np.roll(spectrum, 1)
    nxt = np.roll(spectrum, -1)
    peaks = np.where((spectrum > prev) & (spectrum >= nxt))[0]
    peaks = peaks[np.argsort(spectrum[peaks])[::-1]]

    if expected_count is None:
        floor = np.median(np.sqrt(spectrum))
        keep = np.sqrt(spectrum[peaks]) >= floor * 10 ** (threshold_db / 20.0)
        peaks = peaks[keep]

    sines, angles = [], []
    for k in peaks:
        s = freqs[k] / spacing
        if abs(s) > 1.0:
            continue
        theta = float(np.degrees(np.arcsin(s)))
        if any(lo <= theta <= hi for lo, hi in exclude_deg):
            continue
        if any(abs(s - s0) < min_separation_sin for s0 in sines):
            continue
        sines.append(s)
        angles.append(theta)
        if expected_count is not None and len(angles) == expected_count:
            break

    if expected_count is not None and len(angles) < expected_count:
        raise InsufficientPeaksError(expected_count, len(angles))
    return np.array(angles)


def fine_doa(snapshot: np.ndarray, coarse_deg: float, half_width_deg: float = 5.0,
             step_deg: float = 0.1, geometry: ArrayGeometry = None) -> float:
    """Grid argmax of |x^H a(theta)| in [coarse - c, coarse + c].

    Ties are broken toward the grid point nearest the coarse estimate.
    """
    est, _ = fine_doa_series(np.atleast_2d(snapshot), coarse_deg,
                             half_width_deg, step_deg, geometry)
    return float(est[0])


def fine_doa_series(snapshots: np.ndarray, coarse_deg: float,
                    half_width_deg: float = 5.0, step_deg: float = 0.1,
                    geometry: ArrayGeometry = None):
    """Fine scan of every snapshot; returns (estimates, peak powers)."""
    if half_width_deg <= 0 or step_deg <= 0 or step_deg > 2 * half_width_deg:
        raise ValueError("need 0 < step <= 2 * half_width")
    x = np.atleast_2d(np.asarray(snapshots, dtype=np.complex128))
    if geometry is None:
        geometry = ArrayGeometry.ula(x.shape[1])
    n = int(round(half_width_deg / step_deg))
    grid = coarse_deg + step_deg * np.arange(-n, n + 1)
    mags = _kernels.scan_magnitudes(x, np.sin(grid * _DEG), geometry.positions)
    best = _argmax_near(mags, n)
    return grid[best], mags[np.arange(x.shape[0]), best] ** 2


def _argmax_near(mags: np.ndarray, center_idx: int) -> np.ndarray:
    """Row-wise argmax; exact ties resolved by distance to ``center_idx``."""
    best = np.argmax(mags, axis=1)
    maxval = mags[np.arange(mags.shape[0]), best]
    out = best.copy()
    for t in np.where((mags == maxval[:, None]).sum(axis=1) > 1)[0]:
        ties = np.where(mags[t] == maxval[t])[0]
        out[t] = ties[np.argmin(np.abs(ties - center_idx))]
    return out


def fit_trajectory(estimates: np.ndarray, weights: np.ndarray = None) -> DoaTrack:
    """Quadratic least-squares fit of a DoA track over t = 1..K.

    The fit runs on numpy's scaled domain for conditioning. The angular
    range and center are taken from the fitted values, not the raw
    estimates.
    """
    est = np.asarray(estimates, dtype=float)
    if est.size < 3:
        raise InsufficientDataError(f"quadratic fit needs K >= 3, got {est.size}")
    t = np.arange(1, est.size + 1, dtype=float)
    poly = np.polynomial.Polynomial.fit(t, est, 2)
    fitted = poly(t)
    hi, lo = float(fitted.max()), float(fitted.min())
    if weights is None:
        weights = np.ones_like(est)
    return DoaTrack(
        estimates=est,
        weights=np.asarray(weights, dtype=float),
        coefficients=poly.coef.copy(),
        fitted=fitted,
        range_deg=hi - lo,
        center_deg=0.5 * (hi + lo),
    )


def sector_indices(track: DoaTrack, grid_size: int = 360,
                   pad_deg: float = 0.0) -> SectorEntry:
    """Discrete sector covering the track's fitted angular range.

    ``B = ceil(range / bin)`` floored at one bin, ``N = ceil(center / bin)``
    on the [0, 360) grid, ``g = ceil(N - B/2)``. ``pad_deg`` widens the
    range symmetrically before discretization (0 keeps the printed rule).
    """
    if grid_size < 4:
        raise InvalidSectorsError("grid size must be >= 4")
    dq = 360.0 / grid_size
    width = track.range_deg + 2.0 * pad_deg
    b = max(1, int(np.ceil(width / dq)))
    center = track.center_deg % 360.0
    n_pc = int(np.ceil(center / dq))
    if n_pc == 0:
        n_pc = grid_size
    g = int(np.ceil(n_pc - b / 2.0))
    return SectorEntry(center_deg=track.center_deg, width_bins=b, start_index=g)


def track_interferers(snapshots: np.ndarray, geometry: ArrayGeometry,
                      expected_count=None, *, grid_size: int = 360,
                      half_width_deg: float = 5.0, step_deg: float = 0.1,
                      pad_deg: float = 0.0, nfft: int = 4096,
                      exclude_deg=()) -> tuple:
    """Full tracking pipeline: coarse DFT, fine scan, fit, sectors.

    Returns ``(tracks, SectorSpec)`` with one entry per detected interferer.
    Deterministic given the snapshots; no internal randomness.
    """
    coarse = coarse_doas_dft(snapshots, expected_count, nfft=nfft,
                             exclude_deg=exclude_deg, geometry=geometry)
    tracks = []
    entries = []
    for c in coarse:
        est, wts = fine_doa_series(snapshots, c, half_width_deg, step_deg, geometry)
        track = fit_trajectory(est, wts)
        tracks.append(track)
        entries.append(sector_indices(track, grid_size, pad_deg))
    return tracks, SectorSpec(grid_size=grid_size, entries=tuple(entries))
