from diracflow.flow.integrators import reunitarize, rk4, step_rk4  # noqa
from diracflow.flow.lax import commutator_rhs, higher_flow_rhs, rhs  # noqa
from diracflow.flow.observers import (  # noqa
    Reference,
    get_observer_from_name,
    observer_registry,
)
from diracflow.flow.runner import (  # noqa
    FlowRunner,
    convergence_time,
    evolve,
    unitary_conjugation_residual,
)
from diracflow.flow.state import (  # noqa
    FlowState,
    Trajectory,
    dump_trajectory,
    initial_state,
    load_trajectory,
)
from diracflow.flow.sweep import sweep  # noqa
from diracflow.flow.transport import (  # noqa
    transport,
    transport_cocycle,
    transport_harmonic,
)
