"""Strategy extraction and C emission."""

from .cemit import emit_c
from .harness import CompileError, SimulationResult, Simulator, compile_c, random_inputs
from .program import (AbstractProgram, Action, Assignment, Branch, LocationCode, RankedLoop, extract_strategy,
                      guard_cases, transition_cases)

__all__ = ["AbstractProgram", "Action", "Assignment", "Branch", "CompileError", "LocationCode", "RankedLoop",
           "SimulationResult", "Simulator", "compile_c", "emit_c", "extract_strategy", "guard_cases",
           "random_inputs", "transition_cases"]
