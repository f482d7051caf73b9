"""Array geometry, steering vectors, mismatch models, and snapshot synthesis.

The nominal array is a half-wavelength uniform linear array. Element
positions are measured in wavelengths, so the steering phase of element
``ell`` toward direction ``theta`` is ``-2*pi*positions[ell]*sin(theta)``
and the vector is normalized to unit Euclidean norm. Angles are degrees
at every public interface and converted to radians internally.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGeometryError, InvalidScenarioError

_DEG = np.pi / 180.0

MISMATCH_KINDS = ("none", "look_direction", "random_sv", "gain_phase", "geometry")


@dataclass(frozen=True)
class ArrayGeometry:
    """Sensor positions of a linear array, in units of wavelength.

    Parameters
    ----------
    positions : ndarray
        Strictly increasing element positions. The nominal array places
        element ``ell`` at ``0.5 * ell``.
    """

    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 1 or pos.size == 0:
            raise InvalidGeometryError("geometry needs a non-empty 1-D position vector")
        if pos.size > 1 and not np.all(np.diff(pos) > 0):
            raise InvalidGeometryError("element positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)

    @classmethod
    def ula(cls, element_count: int, spacing: float = 0.5) -> "ArrayGeometry":
        """Uniform linear array with the given spacing in wavelengths."""
        if element_count < 1:
            raise InvalidGeometryError("element_count must be >= 1")
        return cls(spacing * np.arange(element_count))

    @property
    def element_count(self) -> int:
        return self.positions.size

    def nominal_spacing(self) -> float:
        """Mean inter-element spacing; 0.5 for the nominal array."""
        if self.element_count < 2:
            return 0.5
        return float(np.mean(np.diff(self.positions)))


@dataclass(frozen=True)
class MismatchSpec:
    """Steering-vector mismatch model applied once per scenario realization.

    ``look_direction`` offsets each source DoA by a uniform draw in
    ``+/- look_bound`` degrees. ``random_sv`` adds an error vector of
    norm uniform in ``[0, epsilon_bound]`` with i.i.d. uniform phases.
    ``gain_phase`` combines the look offset with per-sensor calibration
    factors ``(1 + Ga) * exp(j * Pha)``. ``geometry`` perturbs element
    positions uniformly within ``+/- position_bound`` wavelengths.
    """

    kind: str = "none"
    look_bound: float = 4.0
    epsilon_bound: float = np.sqrt(0.3)
    gain_std: float = 0.05
    phase_std: float = 0.025 * np.pi
    position_bound: float = 0.05

    def __post_init__(self):
        if self.kind not in MISMATCH_KINDS:
            raise InvalidScenarioError(f"unknown mismatch kind {self.kind!r}")
        for name in ("look_bound", "epsilon_bound", "gain_std", "phase_std", "position_bound"):
            if getattr(self, name) < 0:
                raise InvalidScenarioError(f"{name} must be nonnegative")


def steering_vector(theta_deg, geometry: ArrayGeometry) -> np.ndarray:
    """Unit-norm steering vector(s) of the array toward ``theta_deg``.

    Element ``ell`` is ``exp(-2j*pi*positions[ell]*sin(theta)) / sqrt(L)``.
    Accepts a scalar angle (returns shape ``(L,)``) or a vector of angles
    (returns shape ``(n, L)``). Angles outside [-90, 90] are accepted; a
    linear array aliases them onto the visible region.
    """
    pos = geometry.positions
    theta = np.asarray(theta_deg, dtype=float)
    scalar = theta.ndim == 0
    phases = -2j * np.pi * np.outer(np.sin(np.atleast_1d(theta) * _DEG), pos)
    sv = np.exp(phases) / np.sqrt(pos.size)
    return sv[0] if scalar else sv


def steering_derivative(theta_deg: float, geometry: ArrayGeometry) -> np.ndarray:
    """d a(theta) / d theta in radians, evaluated elementwise."""
    a = steering_vector(theta_deg, geometry)
    th = float(theta_deg) * _DEG
    return a * (-2j * np.pi * geometry.positions * np.cos(th))


def perturbed_steering(theta_deg: float, geometry: ArrayGeometry,
                       mismatch: MismatchSpec, rng: np.random.Generator) -> np.ndarray:
    """Actual steering vector after one draw of the mismatch model."""
    kind = mismatch.kind
    if kind == "none":
        return steering_vector(theta_deg, geometry)
    if kind == "look_direction":
        dtheta = rng.uniform(-mismatch.look_bound, mismatch.look_bound)
        return steering_vector(theta_deg + dtheta, geometry)
    if kind == "random_sv":
        a = steering_vector(theta_deg, geometry)
        eps = rng.uniform(0.0, mismatch.epsilon_bound)
        phases = rng.uniform(0.0, 2 * np.pi, geometry.element_count)
        return a + eps / np.sqrt(geometry.element_count) * np.exp(1j * phases)
    if kind == "gain_phase":
        dtheta = rng.uniform(-mismatch.look_bound, mismatch.look_bound)
        gain = rng.normal(0.0, mismatch.gain_std, geometry.element_count)
        phase = rng.normal(0.0, mismatch.phase_std, geometry.element_count)
        return (1.0 + gain) * np.exp(1j * phase) * steering_vector(theta_deg + dtheta, geometry)
    # geometry
    shift = rng.uniform(-mismatch.position_bound, mismatch.position_bound,
                        geometry.element_count)
    return steering_vector(theta_deg, _shifted_geometry(geometry, shift))


def _shifted_geometry(geometry: ArrayGeometry, shift: np.ndarray) -> ArrayGeometry:
    pos = geometry.positions + shift
    if not np.all(np.diff(pos) > 0):
        # bounded perturbations may not preserve ordering for tight arrays;
        # sorting keeps the geometry valid without changing the phase set
        pos = np.sort(pos)
    return ArrayGeometry(pos)


@dataclass(frozen=True)
class ScenarioTruth:
    """Ground truth of one scenario realization.

    ``actual_doas`` and ``actual_svs`` list the SOI first, then the
    interferers, after the mismatch draw. Powers are linear.
    """

    geometry: ArrayGeometry
    soi_doa: float
    soi_power: float
    interferer_doas: np.ndarray
    interferer_powers: np.ndarray
    noise_power: float
    snapshots: int
    mismatch: MismatchSpec
    actual_doas: np.ndarray
    actual_svs: np.ndarray
    actual_geometry: ArrayGeometry = field(repr=False, default=None)

    def __post_init__(self):
        if len(self.interferer_doas) != len(self.interferer_powers):
            raise InvalidScenarioError("interferer doas/powers length mismatch")
        if self.noise_power < 0:
            raise InvalidScenarioError("noise power must be nonnegative")
        if self.soi_power < 0 or np.any(np.asarray(self.interferer_powers) < 0):
            raise InvalidScenarioError("source powers must be nonnegative")
        if self.snapshots < 1:
            raise InvalidScenarioError("snapshot count must be >= 1")
        if self.actual_svs.shape != (len(self.interferer_doas) + 1, self.geometry.element_count):
            raise InvalidScenarioError("actual_svs must be (P+1, L)")

    @property
    def interferer_count(self) -> int:
        return len(self.interferer_doas)

    @property
    def soi_sv(self) -> np.ndarray:
        return self.actual_svs[0]


def realize_scenario(geometry: ArrayGeometry, soi_doa: float, soi_power: float,
                     interferer_doas, interferer_powers, noise_power: float,
                     snapshots: int, mismatch: MismatchSpec,
                     rng: np.random.Generator) -> ScenarioTruth:
    """Draw the mismatch once and freeze the actual steering vectors.

    Array-wide mismatches (sensor gain/phase calibration, element position
    errors) are drawn once and shared by every source; per-source
    mismatches (look offsets, random SV errors) are drawn independently
    per source. The draw is held fixed for all snapshots of the scenario.
    """
    doas = np.concatenate(([soi_doa], np.asarray(interferer_doas, dtype=float)))
    kind = mismatch.kind
    actual_geometry = geometry
    actual_doas = doas.copy()

    if kind in ("look_direction", "gain_phase"):
        actual_doas = doas + rng.uniform(-mismatch.look_bound, mismatch.look_bound, doas.size)
    if kind == "geometry":
        shift = rng.uniform(-mismatch.position_bound, mismatch.position_bound,
                            geometry.element_count)
        actual_geometry = _shifted_geometry(geometry, shift)

    svs = steering_vector(actual_doas, actual_geometry)
    if kind == "random_sv":
        L = geometry.element_count
        for i in range(doas.size):
            eps = rng.uniform(0.0, mismatch.epsilon_bound)
            phases = rng.uniform(0.0, 2 * np.pi, L)
            svs[i] = svs[i] + eps / np.sqrt(L) * np.exp(1j * phases)
    elif kind == "gain_phase":
        gain = rng.normal(0.0, mismatch.gain_std, geometry.element_count)
        phase = rng.normal(0.0, mismatch.phase_std, geometry.element_count)
        svs = (1.0 + gain) * np.exp(1j * phase) * svs

    return ScenarioTruth(
        geometry=geometry,
        soi_doa=float(soi_doa),
        soi_power=float(soi_power),
        interferer_doas=np.asarray(interferer_doas, dtype=float),
        interferer_powers=np.asarray(interferer_powers, dtype=float),
        noise_power=float(noise_power),
        snapshots=int(snapshots),
        mismatch=mismatch,
        actual_doas=actual_doas,
        actual_svs=svs,
        actual_geometry=actual_geometry,
    )


def generate_snapshots(truth: ScenarioTruth, rng: np.random.Generator) -> np.ndarray:
    """Synthesize the K x L snapshot matrix of the scenario.

    Source waveforms and noise are i.i.d. zero-mean circular complex
    Gaussian with the scenario's linear powers. Independent sub-streams
    are spawned for each source and for the noise so that draws do not
    shift if sources are evaluated in a different order.
    """
    K = truth.snapshots
    if K < 1:
        raise InvalidScenarioError("snapshot count must be >= 1")
    L = truth.geometry.element_count
    powers = np.concatenate(([truth.soi_power], truth.interferer_powers))
    streams = rng.spawn(powers.size + 1)
    data = np.zeros((K, L), dtype=np.complex128)
    for i, power in enumerate(powers):
        wf = _circular_gaussian(streams[i], K, power)
        data += np.outer(wf, truth.actual_svs[i])
    data += _circular_gaussian(streams[-1], (K, L), truth.noise_power)
    return data


def _circular_gaussian(rng: np.random.Generator, shape, power: float) -> np.ndarray:
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
