from .common import *
from .anchor import *
from .prox import *
from .metrics import LengthMismatch, optimal_assignment, acc, nmi, purity, evaluate
from .loader import *
from .solver import SolverConfig, TPSolver, ClusteringResult, DimensionError, run_tensor_projection
from .pipeline import PipelineError, SweepSpec, run_pipeline, run_sweep
