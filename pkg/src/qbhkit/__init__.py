"""Symbolic verification of Poisson, quasi-bi-Hamiltonian and Jacobi structures."""

__version__ = "0.1.0"

from .definition import DefinitionError, StructureDefinition, build, load, loads  # noqa: E402
from .fixtures import DEFINITIONS, get_fixture, run_all_fixtures  # noqa: E402
from .multivec import Multivector, OneForm, VectorField, lie_bracket, schouten, wedge  # noqa: E402
from .runner import RunReport, run_definition  # noqa: E402
from .symexpr import Chart, Policy, decide_zero, parse_expr  # noqa: E402

__all__ = [
    "Chart",
    "DEFINITIONS",
    "DefinitionError",
    "Multivector",
    "OneForm",
    "Policy",
    "RunReport",
    "StructureDefinition",
    "VectorField",
    "__version__",
    "build",
    "decide_zero",
    "get_fixture",
    "lie_bracket",
    "load",
    "loads",
    "parse_expr",
    "run_all_fixtures",
    "run_definition",
    "schouten",
    "wedge",
]
