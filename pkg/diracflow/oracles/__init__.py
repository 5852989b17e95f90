from diracflow.oracles.circle import (  # noqa
    CircleModelState,
    circle_model_convergence,
    circle_exact_deviation,
    circle_model_evolve,
    circle_model_exact,
    circle_model_init,
    circle_model_limit,
    circle_model_rhs,
)
from diracflow.oracles.k2 import (  # noqa
    K2State,
    closed_form_residual,
    k2_closed_form,
    k2_compare,
    k2_complex,
    k2_inflection,
    k2_limit_pair,
    k2_reduce,
    k2_reduced_rhs,
)
from diracflow.oracles.k3 import (  # noqa
    K3Comparison,
    k3_compare,
    k3_complex,
    k3_embed,
    k3_equations,
    k3_initial_vars,
    k3_project,
    k3_reduced_evolve,
    k3_reduced_rhs,
)
