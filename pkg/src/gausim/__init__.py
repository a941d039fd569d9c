"""Phase-space simulator for Gaussian optical circuits.

Gaussian states are tracked by their means and covariance matrices;
channels are Gaussian completely positive maps validated against the
uncertainty relations; measurements are Gaussian projections with
conditioning, sampling, and classical feedforward.  A truncated
number-basis oracle (``gausim.fock``) independently recomputes every moment
at desk scale and exposes the photodetection outcome the Gaussian engine
cannot represent.
"""

from . import bench, channels, circuit, compare, dsl, engine, fock, jsonio, measure, phasespace
from .channels import (
    GaussianChannel,
    amplifier,
    apply,
    beamsplitter,
    classical_noise,
    cloner_1to2,
    compose,
    displacement,
    identity,
    is_symplectic,
    loss,
    phase_rotation,
    squeezer,
    two_mode_squeezer,
    validate_cp,
)
from .circuit import Circuit
from .dsl import parse, serialize
from .engine import RunResult, run, run_shots
from .errors import (
    CircuitSemanticError,
    CircuitSyntaxError,
    CutoffTooSmallError,
    DegenerateMeasurementError,
    GausimError,
    ImpossibleOutcomeError,
    NonGaussianOutcomeError,
    RejectedChannelError,
)
from .measure import (
    MeasurementRecord,
    MeasurementSpec,
    condition,
    condition_absorption,
    condition_no_absorption,
    heterodyne_spec,
    homodyne,
    neumark_extend,
    sample,
    vacuum_probability,
)
from .phasespace import (
    GaussianState,
    check_physical,
    coherent,
    marginal,
    mean_photon_number,
    overlap,
    squeezed_vacuum,
    symplectic_form,
    tensor,
    thermal,
    two_mode_squeezed_vacuum,
    vacuum,
)

__version__ = "0.1.0"
