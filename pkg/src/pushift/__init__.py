"""pushift: positive-unlabeled classification via density ratio estimation.

Train a nonnegative ratio model from positive and unlabeled samples without
knowing any class-prior, estimate the training and test-time priors by
threshold sweeps over the fitted scores, and place a cost-sensitive decision
threshold that adapts to test-time class-prior shift using only a compact
summary of the training scores.
"""

from .baselines import SurrogateLoss, logistic_loss, nnpu_risk, sigmoid_loss, train_baseline, upu_risk
from .classifier import (
    Decision,
    ShiftSpec,
    classify,
    classify_batch,
    cost_sensitive_risk,
    cost_threshold,
    excess_risk_bound_check,
    squared_loss_decomposition,
)
from .data import (
    GaussianMixtureSpec,
    PUDataset,
    SplitDataset,
    case1_mixture,
    case2_mixture,
    load_csv,
    pu_sample,
    save_csv,
    split_dataset,
    synth_case1,
    synth_case2,
    synth_gaussian_pair,
)
from .divergence import (
    Branch,
    DiscreteDistributionPair,
    ObjectiveValue,
    corrected_objective,
    empirical_objective,
    objective_gradient,
    population_divergence,
)
from .errors import ConfigError, DataError, DegeneratePriorError, TrainingDiverged
from .experiments import (
    adapt_threshold,
    decision_boundary_1d,
    fit_drpu,
    gaussian_case_experiment,
    shift_robustness_experiment,
)
from .generators import (
    BregmanGenerator,
    exp_generator,
    generator_by_name,
    kl_generator,
    lsif_generator,
    scaled_quadratic_generator,
)
from .metrics import accuracy, auc, auc_excess_bound_check, error_rate, prior_abs_error, ties_present
from .models import MLP, GaussianBasisLinear, gaussian_basis_linear, load_model, mlp, save_model
from .prior import (
    PriorEstimate,
    ThresholdIntervals,
    build_intervals,
    epsilon,
    estimate_prior,
    estimate_test_prior,
    gamma_bar,
)
from .trainer import AdamState, TrainConfig, TrainReport, adam_step, train
from . import theory

__version__ = "0.1.0"
