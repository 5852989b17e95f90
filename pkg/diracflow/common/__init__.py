from diracflow.common.config import RunConfig  # noqa
from diracflow.common.errors import (  # noqa
    AmbiguityError,
    ConfigError,
    DiagnosticError,
    DiracFlowError,
    DivergenceError,
    ParseError,
    StructureError,
    UsageError,
    ValidationError,
)
from diracflow.common.logger import Logger  # noqa
from diracflow.common.utils import config_hash, get_n_threads, max_abs, set_seeds  # noqa
