"""Kernel relative-error regression for right-censored dependent data."""

__version__ = "0.1.0"

from .bandwidth import BandwidthGrid, cv_select, loo_estimate
from .errors import (CalibrationFailedError, ConfigError,
                     EstimationUndefinedError, GenerationRejectedError,
                     OracleUnreliableError, SelectionFailedError,
                     SlopeUndefinedError)
from .experiments import (ExperimentResult, GridSpec, RateStudyResult, iae,
                          mc_replicate, port_oracle, rate_study,
                          run_experiment, sup_error)
from .kernels import KernelFamily, KernelSpec, eval_scaled, eval_univariate
from .regression import (EstimatorKind, EvalGrid, cr_estimate,
                         density_estimate, evaluate_on_grid, rer_estimate,
                         rer_pseudo_estimate)
from .simgen import (ContaminationSpec, GeneratedData, Model, OutlierSpec,
                     ScenarioConfig, calibrate_censoring, derive_seed,
                     gen_process, inject_outliers, mc_censoring_rate,
                     true_censoring_survival, true_regression)
from .survival import (CensoredSample, StepSurvival, km_censoring_survival,
                       survival_at, survival_at_left)
