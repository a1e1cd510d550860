"""Prolog-subset engine with native disjunctive delimited control.

reset/3 evaluates a goal against an explicit disjunctive continuation and
reports one of three outcomes (failure, success with the renamed-apart
alternatives, or a shift with both continuations); shift/1 suspends to the
nearest enclosing reset.  The library corpus builds findall, cut,
branch-and-bound, probabilistic inference and coroutining engines on top.
"""

from .database import BUILTIN_HEADS, ConsultError, Database, disjoin_clauses
from .engine import (
    Alt,
    EngineError,
    EvalState,
    Failure,
    FreshnessError,
    Shift,
    StepLimitError,
    Success,
    backtrack,
    disjoin,
    empty_alt,
    eval_goals,
    reify_result,
)
from .oracle import OracleConfig, answers_equiv, gen_program, oracle_pattern_answers, sld_solve
from .reader import ParseError, SourceClause, parse_program, parse_query, parse_term_text, tokenize
from .stdlib import available_libraries, library_source, load_libraries
from .terms import (
    ArithmeticEvalError,
    Atom,
    BindingStore,
    Compound,
    Float,
    Int,
    Ordering,
    PrologError,
    Term,
    Var,
    compare_standard,
    copy_term,
    eval_arith,
    format_term,
    is_variant,
    mk_list,
    unify,
)
from .toplevel import Answer, TraceCollector, UncaughtShiftError, enumerate_pattern, solve, solve_first, trace_solve

__version__ = "0.1.0"
