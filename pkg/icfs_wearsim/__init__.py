from .api import build_config, build_report, build_sweep_spec, load_config_from_yaml, run_simulation, run_sweep
from .engine import Simulation, run
from .exceptions import (
    ConfigurationError,
    DomainError,
    ExhaustedError,
    InvariantError,
    ResultsError,
    TraceError,
    WearSimError,
)
from .models import RunStatus, SimConfig, SimResult, SweepSpec
from .policies import PolicyKind

__version__ = "0.1.0"
