"""molrc: molecular reservoir computing with a deoxyribozyme oscillator network.

Simulates a three-oscillator deoxyribozyme network in an open microreactor,
drives it with piecewise-constant substrate-influx input signals, trains a
linear readout on the observed concentrations, and benchmarks two temporal
reconstruction tasks.
"""

__version__ = "0.1.0"

from .analysis import (
    EigenResult,
    classify_regime,
    eigen_closed_form,
    find_peaks,
    jacobian,
    sustained_substrate_level,
)
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config, save_config
from .esn import EsnParams, esn_step, make_esn, scale_spectral_radius
from .reactor import (
    KAPPA,
    ChemState,
    ChemTrace,
    InfluxProfile,
    IntegrationDivergedError,
    ReactorParams,
    derivatives,
    integrate,
    write_trace_csv,
)
from .readout import (
    DesignMatrix,
    ReadoutWeights,
    generate_input,
    harvest,
    predict,
    readout_from_json,
    readout_to_json,
    train_readout,
)
from .tasks import (
    BenchmarkStats,
    CellStats,
    TaskSpec,
    TrialResult,
    nrmse,
    run_benchmark,
    run_trial,
    simulate_trial,
    task_a_target,
    task_b_target,
    trial_seed,
)

__all__ = [
    "KAPPA",
    "BenchmarkStats",
    "CellStats",
    "ChemState",
    "ChemTrace",
    "ConfigError",
    "DesignMatrix",
    "EigenResult",
    "EsnParams",
    "ExperimentConfig",
    "InfluxProfile",
    "IntegrationDivergedError",
    "ReactorParams",
    "ReadoutWeights",
    "TaskSpec",
    "TrialResult",
    "classify_regime",
    "config_from_dict",
    "derivatives",
    "eigen_closed_form",
    "esn_step",
    "find_peaks",
    "generate_input",
    "harvest",
    "integrate",
    "jacobian",
    "load_config",
    "make_esn",
    "nrmse",
    "predict",
    "readout_from_json",
    "readout_to_json",
    "run_benchmark",
    "run_trial",
    "save_config",
    "scale_spectral_radius",
    "simulate_trial",
    "sustained_substrate_level",
    "task_a_target",
    "task_b_target",
    "train_readout",
    "trial_seed",
    "write_trace_csv",
]
