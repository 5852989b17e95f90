import json
import os
from typing import Any, Dict, List, Optional, Union

from diracflow.common.errors import ConfigError
from diracflow.common.utils import config_hash

DEFAULT_OBSERVERS = [
    "tr_M",
    "tr_b2",
    "spec_drift",
    "str_U_re",
    "str_U_im",
    "norm_d",
]


class RunConfig:
    """
    Settings of a single run: graph, flow parameters, checks and outputs

    Values are resolved defaults < json document < explicit overrides.

    :param graph_path: Edge-list file or builtin spec such as "complete:3"
    :param beta: Complex deformation parameter
    :param gamma: Per-degree couplings, None for all ones
    :param t_end: Final time, negative to integrate backward
    :param h: Step size magnitude
    :param snapshot_every: Keep every n-th step as a snapshot
    :param with_unitary: Co-evolve the unitary U
    :param flow_poly: Coefficients of f in D' = f(L)[B,D], lowest degree first
    :param observers: Observer names
    :param checks: Check names or "all"
    :param output_dir: Directory receiving all files
    :param seed: Seed for random graphs, reorientation and multi-start searches
    :param formats: Logger formats for time series
    """

    FIELDS = (
        "graph_path",
        "beta",
        "gamma",
        "t_end",
        "h",
        "snapshot_every",
        "with_unitary",
        "flow_poly",
        "observers",
        "checks",
        "output_dir",
        "seed",
        "formats",
    )

    def __init__(
        self,
        graph_path: Optional[str] = None,
        beta: float = 0.0,
        gamma: Optional[List[float]] = None,
        t_end: float = 10.0,
        h: float = 1e-3,
        snapshot_every: int = 10,
        with_unitary: bool = True,
        flow_poly: List[float] = None,
        observers: List[str] = None,
        checks: Union[str, List[str]] = "all",
        output_dir: str = "runs",
        seed: int = 0,
        formats: List[str] = None,
    ):
        self.graph_path = graph_path
        self.beta = beta
        self.gamma = gamma
        self.t_end = t_end
        self.h = h
        self.snapshot_every = snapshot_every
        self.with_unitary = with_unitary
        self.flow_poly = [1.0] if flow_poly is None else flow_poly
        self.observers = list(DEFAULT_OBSERVERS) if observers is None else observers
        self.checks = checks
        self.output_dir = output_dir
        self.seed = seed
        self.formats = ["csv"] if formats is None else formats

    @classmethod
    def from_json(cls, path: str, **overrides) -> "RunConfig":
        """
        Load a json document and apply overrides that are not None

        :param path: Path to the json document
        :type path: str
        :returns: Validated config
        :rtype: RunConfig
        """
        try:
            with open(path, "r") as file:
                doc = json.load(file)
        except (OSError, ValueError) as err:
            raise ConfigError("cannot read config {}: {}".format(path, err))
        if not isinstance(doc, dict):
            raise ConfigError("config {} must be a json object".format(path))
        config = cls()
        config.update(doc)
        config.update({k: v for k, v in overrides.items() if v is not None})
        return config

    def update(self, values: Dict[str, Any]) -> "RunConfig":
        for key, value in values.items():
            if key not in self.FIELDS:
                raise ConfigError("unknown config key '{}'".format(key))
            setattr(self, key, value)
        return self

    def validate(self, need_graph: bool = True) -> "RunConfig":
        """
        Check ranges and names, raising ConfigError on the first problem
        """
        from diracflow.diagnostics.checks import check_registry
        from diracflow.flow.observers import observer_registry

        if need_graph and not self.graph_path:
            raise ConfigError("no graph given")
        try:
            self.beta = float(self.beta)
            self.t_end = float(self.t_end)
            self.h = float(self.h)
            self.snapshot_every = int(self.snapshot_every)
            self.seed = int(self.seed)
            self.flow_poly = [float(c) for c in self.flow_poly]
            if self.gamma is not None:
                self.gamma = [float(g) for g in self.gamma]
        except (TypeError, ValueError) as err:
            raise ConfigError("malformed config value: {}".format(err))
        if not self.h > 0:
            raise ConfigError("h must be positive, got {}".format(self.h))
        if self.t_end == 0:
            raise ConfigError("t_end must be nonzero")
        if self.snapshot_every < 1:
            raise ConfigError("snapshot_every must be at least 1")
        if not any(c != 0 for c in self.flow_poly):
            raise ConfigError("flow_poly must have a nonzero coefficient")
        for name in self.observers:
            if name not in observer_registry:
                raise ConfigError("unknown observer '{}'".format(name))
        if self.checks != "all":
            if isinstance(self.checks, str):
                self.checks = [c for c in self.checks.split(",") if c]
            for name in self.checks:
                if name not in check_registry:
                    raise ConfigError("unknown check '{}'".format(name))
        if os.path.exists(self.output_dir) and not os.access(self.output_dir, os.W_OK):
            raise ConfigError("output_dir {} is not writable".format(self.output_dir))
        return self

    @property
    def check_names(self) -> List[str]:
        from diracflow.diagnostics.checks import check_registry

        if self.checks == "all":
            return list(check_registry.keys())
        return list(self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in self.FIELDS}

    def hash(self) -> str:
        # where and how files are written does not change their content
        values = self.to_dict()
        values.pop("output_dir")
        values.pop("formats")
        return config_hash(values)

    def header(self) -> str:
        return "config-hash: {}".format(self.hash())
