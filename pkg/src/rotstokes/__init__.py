"""Spectral solver for the stationary rotating Stokes system.

Half-space solves with exact vertical mode superposition, the associated
Dirichlet-to-Neumann (transparent boundary) operator and its low/high
frequency decomposition, real-space singular-integral representations of the
order-one multiplier parts, kernel decay measurements, and a bottom-bounded
channel solver closed by the transparent condition at the top interface.
"""

from ._accel import backend, set_backend
from .channel import (
    BumpyChannelSolution,
    ChannelDiscretization,
    ChannelGeometry,
    FlatChannelSolution,
    extend_to_halfspace,
    solve_channel_bumpy,
    solve_channel_flat,
    solve_channel_flat_discrete,
)
from .dtn import (
    DtNSymbol,
    dtn_apply,
    dtn_decompose,
    dtn_symbol,
    dtn_symbol_stokes,
    quadratic_form,
)
from .errors import (
    CompatibilityError,
    ConfigError,
    ConvergenceError,
    FieldFormatError,
    RotstokesError,
    SingularFrequencyError,
)
from .fieldfile import FieldData, read_field, write_field
from .fields import BoundaryTrace, FieldGrid
from .halfspace import HalfspaceSolution, mode_matrix, solve_coefficients, solve_field
from .roots import (
    Frequency,
    SpectralRoots,
    characteristic_roots,
    characteristic_roots_oracle,
    roots_asymptotic,
    validate_root_relations,
)
from .singular import SmoothedField, apply_multiplier, apply_singular

__version__ = "0.1.0"

__all__ = [
    "BoundaryTrace",
    "BumpyChannelSolution",
    "ChannelDiscretization",
    "ChannelGeometry",
    "CompatibilityError",
    "ConfigError",
    "ConvergenceError",
    "DtNSymbol",
    "FieldData",
    "FieldFormatError",
    "FieldGrid",
    "FlatChannelSolution",
    "Frequency",
    "HalfspaceSolution",
    "RotstokesError",
    "SingularFrequencyError",
    "SmoothedField",
    "SpectralRoots",
    "apply_multiplier",
    "apply_singular",
    "backend",
    "characteristic_roots",
    "characteristic_roots_oracle",
    "dtn_apply",
    "dtn_decompose",
    "dtn_symbol",
    "dtn_symbol_stokes",
    "extend_to_halfspace",
    "mode_matrix",
    "quadratic_form",
    "read_field",
    "roots_asymptotic",
    "set_backend",
    "solve_channel_bumpy",
    "solve_channel_flat",
    "solve_channel_flat_discrete",
    "solve_coefficients",
    "solve_field",
    "validate_root_relations",
    "write_field",
    "__version__",
]
