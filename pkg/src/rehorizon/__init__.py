from .errors import RehorizonError
from .errors import ConfigurationError
from .errors import IncompleteSolutionError
from .errors import UndefinedMetricError
from .errors import InfeasibleOrderError
from .errors import OracleCapError
from .errors import InsufficientDataError
from .errors import ShapeError
from .errors import VerificationError

from .fjspInstance import FjspInstance as Instance
from .fjspInstance import FjspInstance
from .fjspInstance import Operation
from .fjspInstance import Solution
from .fjspInstance import ObjectiveKind
from .fjspInstance import OpKey

from .fjspCheck import Boundary
from .fjspCheck import Violation
from .fjspCheck import ViolationKind
from .fjspCheck import check_feasibility
from .fjspCheck import evaluate_objective

from .rhoOrder import rho_order

from .runReport import RunReport
from .runReport import improvement_metrics

from .instanceGen import gen_makespan_instance
from .instanceGen import gen_delay_instance

from .breakdowns import BreakdownIntensity
from .breakdowns import BreakdownLevel
from .breakdowns import BreakdownSchedule
from .breakdowns import gen_breakdowns

from .noiseModel import NoiseModel
from .noiseModel import observe_durations

from .subproblem import MoveCount
from .subproblem import WallClock
from .subproblem import Subproblem
from .subproblem import parse_budget
from .subproblem import schedule_from_order

from .localSearch import solve
from .exactSolver import exact_solve

from .rhoWindow import get_plan_operations
from .rhoWindow import get_step_operations
from .rhoWindow import execute_with_noise

from .fixStrategy import Default
from .fixStrategy import WarmStart
from .fixStrategy import First
from .fixStrategy import Random
from .fixStrategy import Oracle
from .fixStrategy import Learned
from .fixStrategy import look_ahead_labels
from .fixStrategy import parse_strategy
from .fixStrategy import select_fix_set

from .rhoRunner import RhoParams as Params
from .rhoRunner import RhoParams
from .rhoRunner import run_rho

from .features import FeatureVariant
from .features import StateRecord
from .features import extract_features

from .mlpModel import MlpModel as Model
from .mlpModel import MlpModel
from .normalizer import Normalizer

from .trainer import TrainConfig
from .trainer import train

from .labelCollector import collect_labels

from .closedForm import LinearDecay
from .closedForm import ErrorPair
from .closedForm import RandomMethod
from .closedForm import FirstMethod
from .closedForm import LRhoMethod
from .closedForm import closed_form_errors
from .closedForm import first_random_rates

from .monteCarlo import monte_carlo_errors
from .empiricalDecay import empirical_pfix
from .empiricalDecay import fit_linear_decay
from .confusion import confusion
from .confusion import classifier_metrics

from .namedLock import NamedLock as RHLock
from .namedLock import NamedLock as Lock
from .namedLock import NamedLock

from .sharedCounter import SharedCounter as RHCounter
from .sharedCounter import SharedCounter
from .sharedCounter import SharedProgress
from .sharedCounter import CounterTypes

from .workerPool import run_pool

from .experimentConfig import ExperimentConfig
