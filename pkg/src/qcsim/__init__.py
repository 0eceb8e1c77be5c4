"""Multi-backend quantum circuit simulator with a text instruction set.

Three independent backends compute full state vectors, partial amplitudes
via controlled-gate decomposition, and single amplitudes via graph
contraction; stochastic Kraus noise is available in the full-amplitude
backend, and a classical function-value binary-expansion engine handles
transcendental functions.
"""

from .program import Instruction, Program, eval_angle, parse_program, to_script
from .statevector import RunResult, StateVector, init_state, run_full
from .partition import PartitionPlan, plan_partition, run_partial
from .graph import ContractionGraph, EdgeTensor, Var, run_single
from .noise import NoiseChannel, NoiseModel, kraus_ops
from .qfbe import FbeSpec, FbeTrace, arctan_digits, fbe_digits, reference_value
from .rqc import RqcConfig, generate_rqc

__version__ = "0.1.0"

__all__ = [
    "Instruction",
    "Program",
    "eval_angle",
    "parse_program",
    "to_script",
    "RunResult",
    "StateVector",
    "init_state",
    "run_full",
    "PartitionPlan",
    "plan_partition",
    "run_partial",
    "ContractionGraph",
    "EdgeTensor",
    "Var",
    "run_single",
    "NoiseChannel",
    "NoiseModel",
    "kraus_ops",
    "FbeSpec",
    "FbeTrace",
    "arctan_digits",
    "fbe_digits",
    "reference_value",
    "RqcConfig",
    "generate_rqc",
    "__version__",
]
