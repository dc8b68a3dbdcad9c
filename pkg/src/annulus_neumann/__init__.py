"""Non-negative radial solutions of gradient-dependent Neumann systems on annuli."""
from .config import ConfigError, ProblemConfig, load_config, parse_config
from .expr import EvalError, Expr, ExprError, ExprSyntaxError, evaluate, parse, to_source
from .geometry import AnnulusGeometry, GeometryError
from .hypotheses import (Box5, ConditionReport, LadderError, RadiiLadder, SamplingBudget, TheoremReport,
                         box_extremum, check_nonexistence, check_theorem_ellyptic, check_theorem_ellyptic2,
                         check_theorem_multi2, make_box)
from .kernel import KernelConstants, KernelError, ShiftedKernel
from .solver import (GridFunction, MultiSolveResult, NoConvergence, SolutionPair, SolveOptions, SolverError,
                     apply_T, multi_solve, newton_solve, reconstruct_radial)
from .system import NonlinearSystem, check_H

__version__ = "0.1.0"

__all__ = [
    "AnnulusGeometry", "Box5", "ConditionReport", "ConfigError", "EvalError", "Expr", "ExprError",
    "ExprSyntaxError", "GeometryError", "GridFunction", "KernelConstants", "KernelError", "LadderError",
    "MultiSolveResult", "NoConvergence", "NonlinearSystem", "ProblemConfig", "RadiiLadder", "SamplingBudget",
    "ShiftedKernel", "SolutionPair", "SolveOptions", "SolverError", "TheoremReport", "apply_T",
    "box_extremum", "check_H", "check_nonexistence", "check_theorem_ellyptic", "check_theorem_ellyptic2",
    "check_theorem_multi2", "evaluate", "load_config", "make_box", "multi_solve", "newton_solve", "parse",
    "parse_config", "reconstruct_radial", "to_source",
]
