"""Estimation bounds and signal simulation for extended automotive radar
targets with Fourier-series contours."""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticReport,
    TBlocks,
    hcrb_known_shape,
    hcrb_unknown_shape,
    t_blocks,
    unknown_shape_projection,
)
from .contour import (
    ContourParams,
    QuadratureSpec,
    TargetPose,
    eval_global,
    eval_local,
    geometry_table,
    perimeter,
    reflection_weights,
)
from .errors import (
    HcrbError,
    IdentifiabilityError,
    NoIlluminationError,
    QuadratureError,
    RegularityError,
    ScenarioError,
)
from .estimators import EstimateResult, estimate, estimate_direction, estimate_range
from .experiments import ResultTable, run_diversity, run_mc, run_range_sweep
from .fisher import (
    CrbReport,
    EfimResult,
    efim_exact,
    gamma_derivatives,
    gamma_labels,
    gamma_vector,
    hcrb_exact,
    hcrb_from_efim,
    point_target_crb,
    radar_constants,
    scenario_with_gamma,
)
from .multiradar import FusedFim, RadarPose, fuse, peb, uniform_constellation
from .scenario import EnergySpec, Scenario, SegmentationConfig, WaveformSpec
from .scenario_io import ScenarioBundle, build, dumps_normalized, load_file, normalize
from .starcalc import FieldPair, SampledField, project_perp, star_inner, star_norm
from .waveform import (
    SignalFrame,
    chirp,
    dump_frame,
    effective_bandwidth,
    steering,
    synthesize,
    synthesize_point,
)
