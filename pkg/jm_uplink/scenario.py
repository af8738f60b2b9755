"""
Scenario files

A scenario is a JSON document with the network parameters and the run
controls of one command invocation.
"""
import json
import math
from dataclasses import dataclass, field, fields, replace

from . import app_settings
from .analysis import DEFAULT_LAMBDA_U_FACTOR, NetworkConfig
from .area import C2
from .exceptions import DomainError, ScenarioError
from .geometry import MIN_WINDOW_FACTOR, SimulationWindow


DEFAULT_KAPPAS = (0.2, 0.4, 1.0, 2.0)
DEFAULT_THRESHOLDS_DB = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)


def db_to_linear(value_db):
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class Scenario:
    lambda0: float
    kappa: float
    c2: float = C2
    lambda_u: float = None
    alpha_pl: float = 3.7
    bandwidth: float = 1.0
    n_realizations: int = 10000
    seed: int = 0
    window_halfwidth_factor: float = None
    n_probe: int = None
    output_path: str = None
    thresholds_db: tuple = DEFAULT_THRESHOLDS_DB
    kappas: tuple = DEFAULT_KAPPAS
    validation_scale: float = 1.0
    source: str = field(default=None, compare=False)

    def __post_init__(self):
        if self.lambda_u is None:
            object.__setattr__(self, "lambda_u", DEFAULT_LAMBDA_U_FACTOR * self.lambda0)
        if self.window_halfwidth_factor is None:
            object.__setattr__(
                self, "window_halfwidth_factor", app_settings.JM_UPLINK_WINDOW_FACTOR
            )
        if self.n_probe is None:
            object.__setattr__(self, "n_probe", app_settings.JM_UPLINK_N_PROBE)
        if self.output_path is None:
            object.__setattr__(self, "output_path", app_settings.JM_UPLINK_OUTPUT_DIR)
        object.__setattr__(
            self, "thresholds_db", tuple(float(t) for t in self.thresholds_db)
        )
        object.__setattr__(self, "kappas", tuple(float(k) for k in self.kappas))

        if self.n_realizations < 1:
            raise ScenarioError("n_realizations must be at least 1")
        if self.n_probe < 1:
            raise ScenarioError("n_probe must be at least 1")
        if self.window_halfwidth_factor < MIN_WINDOW_FACTOR:
            raise ScenarioError(
                "window_halfwidth_factor must be at least {}".format(MIN_WINDOW_FACTOR)
            )
        if not self.validation_scale > 0:
            raise ScenarioError("validation_scale must be positive")
        if any(not (k > 0 and math.isfinite(k)) for k in self.kappas):
            raise ScenarioError("kappas must be positive")
        # Fails early on bad network parameters
        self.network

    @classmethod
    def from_dict(cls, data, source=None):
        data = dict(data)
        known = {f.name for f in fields(cls)} - {"source"} | {"r_c", "lambda_u_factor"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ScenarioError("Unknown scenario fields: {}".format(", ".join(unknown)))
        if "lambda0" not in data:
            raise ScenarioError("Scenario needs lambda0")

        has_kappa, has_r_c = "kappa" in data, "r_c" in data
        if has_kappa == has_r_c:
            raise ScenarioError("Scenario needs exactly one of kappa and r_c")
        try:
            lambda0 = float(data["lambda0"])
            c2 = float(data.get("c2", C2))
            if has_r_c:
                data["kappa"] = float(data.pop("r_c")) * math.sqrt(math.pi * c2 * lambda0)

            if "lambda_u_factor" in data:
                if "lambda_u" in data:
                    raise ScenarioError("Give lambda_u or lambda_u_factor, not both")
                data["lambda_u"] = float(data.pop("lambda_u_factor")) * lambda0
            return cls(source=source, **data)
        except DomainError as e:
            raise ScenarioError(str(e))
        except (TypeError, ValueError) as e:
            if isinstance(e, ScenarioError):
                raise
            raise ScenarioError("Invalid scenario: {}".format(e))

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as handle:
                data = json.load(handle)
        except OSError as e:
            raise ScenarioError("Cannot read scenario {}: {}".format(path, e))
        except ValueError as e:
            raise ScenarioError("Scenario {} is not valid JSON: {}".format(path, e))
        if not isinstance(data, dict):
            raise ScenarioError("Scenario {} must hold a JSON object".format(path))
        return cls.from_dict(data, source=str(path))

    def override(self, seed=None, output_path=None):
        changes = {}
        if seed is not None:
            changes["seed"] = seed
        if output_path is not None:
            changes["output_path"] = output_path
        return replace(self, **changes) if changes else self

    @property
    def network(self):
        try:
            return NetworkConfig(
                lambda0=self.lambda0,
                kappa=self.kappa,
                c2=self.c2,
                lambda_u=self.lambda_u,
                alpha_pl=self.alpha_pl,
                bandwidth=self.bandwidth,
            )
        except DomainError as e:
            raise ScenarioError(str(e))

    @property
    def r_c(self):
        return self.network.r_c

    def window(self, network=None):
        network = network or self.network
        return SimulationWindow.for_density(network.lambda0, self.window_halfwidth_factor)

    def require_thresholds(self):
        if not self.thresholds_db:
            raise ScenarioError("thresholds_db must not be empty")
        return self.thresholds_db

    @property
    def thresholds_linear(self):
        return [db_to_linear(t) for t in self.require_thresholds()]

    def scaled(self, n):
        """
        Validation sample size ``n`` times ``validation_scale``, at least 2
        """
        return max(2, int(round(n * self.validation_scale)))

    def as_dict(self):
        return {
            f.name: getattr(self, f.name) for f in fields(self) if f.name != "source"
        }
