from diracflow.diagnostics.checks import (  # noqa
    DiagnosticContext,
    beta_timechange,
    beta_timechange_check,
    check_registry,
    cohomology_check,
    dolbeault_check,
    fermion_angle,
    fermion_angle_report,
    get_check_from_name,
    inflation_checks,
    isospectral_report,
    kernel_agreement,
    mckean_singer_check,
    monotonicity_report,
    plane_invariance,
    positivity_check,
    positivity_report,
    rank_resolvable,
    reflection_check,
    run_checks,
    structural_report,
    supertrace_series,
)
from diracflow.diagnostics.report import (  # noqa
    Check,
    DiagnosticsReport,
    make_check,
    skipped_check,
)
