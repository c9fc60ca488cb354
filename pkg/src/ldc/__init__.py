"""Lagrangian descriptor stability maps and the second-difference chaos indicator."""

__version__ = "0.1.0"

from .models import (  # noqa: E402
    ContractError,
    FlowKind,
    FlowModel,
    MapKind,
    MapModel,
    fgl_resonance_lines,
    flow_rhs,
    hh_lift,
    map_step,
    pendulum_level_curve,
)
from .integrate import IntegratorConfig, PropagationError, propagate, rk4_step  # noqa: E402
from .ld import (  # noqa: E402
    Direction,
    LDConfig,
    LDValue,
    Observable,
    Status,
    geometric_ld_pendulum,
    ld_flow,
    ld_flow_batch,
    ld_map,
    ld_map_batch,
)
from .fields import (  # noqa: E402
    Axis,
    ScalarField,
    SectionSpec,
    gradient_norm_field,
    landscape_1d,
    log10_transform,
    second_diff_field,
    sweep,
)
