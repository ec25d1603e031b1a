"""Scenario container: contour + pose + channel + waveform + array + quadrature."""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .contour import ContourParams, QuadratureSpec, TargetPose
from .errors import ScenarioError

DEFAULT_CARRIER_HZ = 77e9  # used only for the wavelength heuristic in segmentation


@dataclass(frozen=True)
class WaveformSpec:
    """Chirp sweep bandwidth B, duration T and complex sampling rate fs (Hz, s)."""

    bandwidth: float
    duration: float
    sample_rate: float = 0.0  # 0 means critically sampled: fs = 2B
    carrier: float = DEFAULT_CARRIER_HZ

    def __post_init__(self):
        if self.bandwidth <= 0.0 or self.duration <= 0.0:
            raise ScenarioError("waveform needs positive bandwidth and duration")
        if self.sample_rate == 0.0:
            object.__setattr__(self, "sample_rate", 2.0 * self.bandwidth)
        if self.sample_rate < 2.0 * self.bandwidth:
            raise ScenarioError(
                f"sample rate {self.sample_rate:g} Hz under-samples the complex baseband "
                f"(need >= 2B = {2 * self.bandwidth:g} Hz)"
            )
        if self.bandwidth * self.duration < 100.0:
            warnings.warn("time-bandwidth product is small; chirp approximations degrade",
                          stacklevel=2)

    @property
    def samples(self) -> int:
        return int(np.ceil(self.duration * self.sample_rate))


@dataclass(frozen=True)
class EnergySpec:
    """Channel energy description; exactly one mode is active.

    fixed mode pins the bound-side knob E/N0 = 10^(dB/10) directly (N0 = 1);
    physical mode carries an aggregate two-way gain G so that g = sqrt(G)/d^2,
    E = g^2 N ||w||^2, plus an explicit noise PSD N0.
    """

    e_over_n0_db: float = None
    gain: float = None
    n0: float = 1.0

    def __post_init__(self):
        if (self.e_over_n0_db is None) == (self.gain is None):
            raise ScenarioError("set exactly one of e_over_n0_db or gain")
        if self.n0 <= 0.0:
            raise ScenarioError("noise PSD must be positive")
        if self.gain is not None and self.gain < 0.0:
            raise ScenarioError("gain must be non-negative")

    @property
    def mode(self) -> str:
        return "fixed_E_over_N0" if self.e_over_n0_db is not None else "physical_gain"


@dataclass(frozen=True)
class SegmentationConfig:
    """Contour segmentation for signal synthesis: target segment length (m)."""

    segment_length: float = 0.2

    def __post_init__(self):
        if self.segment_length <= 0.0:
            raise ScenarioError("segment length must be positive")

    def count(self, perimeter_m: float) -> int:
        return max(1, int(np.ceil(perimeter_m / self.segment_length)))


@dataclass(frozen=True)
class Scenario:
    """A single radar (at the origin, broadside on +x) observing one target."""

    contour: ContourParams
    pose: TargetPose
    alpha: float
    array_n: int
    waveform: WaveformSpec
    energy: EnergySpec
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self):
        if self.array_n < 2:
            raise ScenarioError(f"need at least 2 antennas, got {self.array_n}")
        if self.alpha < 0.0:
            raise ScenarioError(f"surface roughness must be >= 0, got {self.alpha}")

    def gain_g(self, w_norm_sq: float) -> float:
        """Channel amplitude g consistent with the configured energy mode."""
        if self.energy.mode == "physical_gain":
            return np.sqrt(self.energy.gain) / self.pose.d**2
        e = 10.0 ** (self.energy.e_over_n0_db / 10.0) * self.energy.n0
        if w_norm_sq <= 0.0:
            raise ScenarioError("cannot place energy on a fully shadowed target")
        return float(np.sqrt(e / (self.array_n * w_norm_sq)))

    def e_over_n0(self, w_norm_sq: float) -> float:
        """Linear E/N0 given the squared star norm of the illumination profile."""
        if self.energy.mode == "fixed_E_over_N0":
            return 10.0 ** (self.energy.e_over_n0_db / 10.0)
        g = np.sqrt(self.energy.gain) / self.pose.d**2
        return g**2 * self.array_n * w_norm_sq / self.energy.n0

    def with_pose(self, pose: TargetPose) -> "Scenario":
        return replace(self, pose=pose)

    def with_e_over_n0_db(self, db: float) -> "Scenario":
        return replace(self, energy=replace(self.energy, e_over_n0_db=db))
