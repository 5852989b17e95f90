from diracflow.common import Logger, RunConfig, set_seeds  # noqa
from diracflow.common.errors import DiracFlowError  # noqa
from diracflow.diagnostics import (  # noqa
    DiagnosticContext,
    DiagnosticsReport,
    check_registry,
    run_checks,
)
from diracflow.flow import (  # noqa
    FlowRunner,
    FlowState,
    Trajectory,
    evolve,
    initial_state,
    transport_cocycle,
    transport_harmonic,
)
from diracflow.geometry import (  # noqa
    GradedOperator,
    Grading,
    OrientedComplex,
    build_complex,
    dirac,
    exterior_derivative,
    graph_from_spec,
    parse_graph,
    read_graph,
    supertrace,
)
from diracflow.oracles import (  # noqa
    circle_model_evolve,
    circle_model_init,
    k2_closed_form,
    k2_inflection,
    k3_reduced_rhs,
)
from diracflow.spectral import (  # noqa
    circle_graph_zeta,
    connes_distance,
    dirac_zeta,
    inflation_report,
    wave_solve,
)
