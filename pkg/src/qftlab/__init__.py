"""qftlab: QFT robust-controller design toolkit.

Uncertain plant generation, frequency-domain templates, robust tracking and
disturbance-rejection bounds, loop shaping, and closed-loop time simulation,
bundled with a vehicle air-suspension case study.
"""

from .lti import (
    NicholsPoint,
    Polynomial,
    RationalTF,
    StateSpaceModel,
    closed_loop_disturbance,
    closed_loop_tracking,
    freq_eval,
    is_hurwitz,
    poly_multiply,
    poly_roots,
    simulate_rk4,
    ss_to_tf,
    tf,
    tf_to_ss,
    to_nichols,
)
from .plant import (
    NOMINAL_PARAMS,
    REFERENCE_INTERVALS,
    PlantInstance,
    PlantParams,
    UncertaintySet,
    build_state_space,
    check_reference_intervals,
    derive_plant_tfs,
    make_instance,
    sample_plants,
)
from .specs import (
    DEFAULT_FREQUENCY_GRID,
    DisturbanceSpec,
    TrackingSpec,
    step_metrics,
    synthesize_envelopes,
)
from .bounds import (
    BoundCurve,
    Template,
    compute_template,
    disturbance_bound,
    feasible_oracle,
    intersect_bounds,
    nominal_loop_bound,
    tracking_bound,
)
from .shaping import (
    ControllerDesign,
    compose_controller,
    reference_controller,
    validate_design,
)
from .roadsim import (
    Impulse,
    TwoBumps,
    WhiteNoise,
    generate_road,
    response_metrics,
    simulate_closed_loop,
    simulate_open_loop,
)

__version__ = "0.1.0"
