from diracflow.spectral.connes import commutator_norm, connes_distance, mean_extension  # noqa
from diracflow.spectral.inflation import (  # noqa
    InflationReport,
    inflation_report,
    log_linear_fit,
)
from diracflow.spectral.wave import dirac_wave, wave_energy, wave_solve, wave_velocity  # noqa
from diracflow.spectral.zeta import (  # noqa
    ZetaGrid,
    ZetaSpec,
    circle_graph_zeta,
    dirac_zeta,
    write_zeta_grid,
    zeta_grid,
    zeta_spec,
)
