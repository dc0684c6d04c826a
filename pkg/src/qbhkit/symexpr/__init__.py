"""Exact symbolic scalar expressions over named coordinates."""

from .chart import Chart, SamplingError, sample_points
from .evaluate import (
    BUILTIN_BINDINGS,
    DomainError,
    MissingBinding,
    OpaqueFn,
    binding_from_selector,
    evaluate,
    evaluate_many,
)
from .expr import (
    ELEMENTARY,
    ONE,
    ZERO,
    Add,
    Const,
    Expr,
    Func,
    Mul,
    Opaque,
    Param,
    Pow,
    Var,
    add,
    as_expr,
    atan,
    const,
    cos,
    differentiate,
    div,
    exp,
    func,
    is_zero,
    ln,
    mul,
    neg,
    opaque,
    power,
    simplify_basic,
    sin,
    sqrt,
    sub,
    substitute,
    to_text,
)
from .parser import ParseError, parse_expr
from .polynomial import Polynomial, polynomial_normal_form, rational_normal_form
from .zero import (
    DEFAULT_POLICY,
    EXACT,
    NONZERO,
    NUMERIC,
    Policy,
    ZeroVerdict,
    combine,
    decide_zero,
    normalized_residuals,
)

__all__ = [name for name in dir() if not name.startswith("_")]
