"""Filter predicates, diagram combinators and the two-path commutativity check.

A filter is a two-variable predicate deciding whether a candidate belongs to
the extension derived at an index.  Diagrams express the same derivation as an
explicit pair of combinator paths that must agree pointwise; the checker
evaluates both paths over a finite input set and reports every comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import Atom, Domain, Environment, PotentialObject
from .errors import (
    ArityMismatch,
    DefinitionError,
    DodlError,
    EvalTypeError,
    IndexNotInDomain,
    UnknownDomain,
    UnknownFilter,
    UnknownPotentialObject,
    UnknownRelation,
)

# ---------------------------------------------------------------------------
# Terms (shared between predicates and diagram expressions)


@dataclass(frozen=True)
class Const:
    atom: Atom


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Wildcard:
    pass


Term = Union[Const, Var, Wildcard]


# ---------------------------------------------------------------------------
# Predicates


@dataclass(frozen=True)
class Member:
    """True iff some tuple of the named relation matches the pattern."""

    relation: str
    pattern: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Or:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class Not:
    operand: "Predicate"


@dataclass(frozen=True)
class TruePred:
    pass


@dataclass(frozen=True)
class FalsePred:
    pass


Predicate = Union[Member, Eq, And, Or, Not, TruePred, FalsePred]


def predicate_vars(pred: Predicate) -> frozenset[str]:
    """Free variables of a predicate."""
    if isinstance(pred, Member):
        return frozenset(t.name for t in pred.pattern if isinstance(t, Var))
    if isinstance(pred, Eq):
        return frozenset(
            t.name for t in (pred.left, pred.right) if isinstance(t, Var)
        )
    if isinstance(pred, (And, Or)):
        return predicate_vars(pred.left) | predicate_vars(pred.right)
    if isinstance(pred, Not):
        return predicate_vars(pred.operand)
    return frozenset()


@dataclass(frozen=True)
class Filter:
    """A named two-variable predicate: (index, candidate) -> bool."""

    name: str
    index_var: str
    candidate_var: str
    body: Predicate

    def __post_init__(self):
        if self.index_var == self.candidate_var:
            raise DefinitionError(
                f"filter {self.name!r} needs two distinct variables"
            )
        extra = predicate_vars(self.body) - {self.index_var, self.candidate_var}
        if extra:
            raise DefinitionError(
                f"filter {self.name!r} uses undeclared variables: "
                + ", ".join(sorted(extra))
            )


# ---------------------------------------------------------------------------
# Diagram expressions


@dataclass(frozen=True)
class Input:
    """The value flowing into the current path step."""


@dataclass(frozen=True)
class Pair:
    first: "DiagramExpr"
    second: "DiagramExpr"


@dataclass(frozen=True)
class Fst:
    operand: "DiagramExpr"


@dataclass(frozen=True)
class Snd:
    operand: "DiagramExpr"


@dataclass(frozen=True)
class Subst:
    """Evaluate ``target`` with ``var`` bound to the value of ``value``.

    The binding happens in a child environment one stage later; the caller's
    environment is untouched.
    """

    var: str
    target: "DiagramExpr"
    value: "DiagramExpr"


@dataclass(frozen=True)
class Apply:
    """Apply a function object to an argument object."""

    fn: "DiagramExpr"
    arg: "DiagramExpr"


@dataclass(frozen=True)
class FilterRef:
    """A filter as a function value over (index, candidate) pairs."""

    name: str


@dataclass(frozen=True)
class IndexShift:
    """Curry a potential object by an index, leaving a candidate test."""

    po_name: str
    index: "DiagramExpr"


@dataclass(frozen=True)
class IdArrow:
    """Identity arrow; marks a component that passes through unchanged."""

    operand: "DiagramExpr"


DiagramExpr = Union[
    Const, Var, Input, Pair, Fst, Snd, Subst, Apply, FilterRef, IndexShift, IdArrow
]


def expr_free_vars(expr: DiagramExpr, bound: frozenset[str] = frozenset()) -> frozenset[str]:
    """Variables an expression reads that no enclosing Subst binds."""
    if isinstance(expr, Var):
        return frozenset() if expr.name in bound else frozenset({expr.name})
    if isinstance(expr, Pair):
        return expr_free_vars(expr.first, bound) | expr_free_vars(expr.second, bound)
    if isinstance(expr, (Fst, Snd, IdArrow)):
        return expr_free_vars(expr.operand, bound)
    if isinstance(expr, Subst):
        return expr_free_vars(expr.value, bound) | expr_free_vars(
            expr.target, bound | {expr.var}
        )
    if isinstance(expr, Apply):
        return expr_free_vars(expr.fn, bound) | expr_free_vars(expr.arg, bound)
    if isinstance(expr, IndexShift):
        return expr_free_vars(expr.index, bound)
    return frozenset()


# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class FilterFn:
    """A filter used as a function value; applies to an (index, candidate) pair."""

    filter: Filter


@dataclass(frozen=True)
class ShiftFn:
    """A potential object curried by an index; applies to a candidate atom."""

    po: PotentialObject
    index: Atom


Value = Union[Atom, bool, tuple, FilterFn, ShiftFn]


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Atom):
        return value.text
    if isinstance(value, tuple):
        return "(" + ", ".join(format_value(v) for v in value) + ")"
    if isinstance(value, FilterFn):
        return f"filter {value.filter.name}"
    if isinstance(value, ShiftFn):
        return f"shift {value.po.name}[{value.index.text}]"
    raise EvalTypeError(f"cannot format value {value!r}")


def value_order_key(value: Value):
    if isinstance(value, bool):
        return ("b", (0, int(value), ""))
    if isinstance(value, Atom):
        return ("a", value.order_key())
    if isinstance(value, tuple):
        return ("p",) + tuple(value_order_key(v) for v in value)
    return ("f", (1, 0, format_value(value)))


# ---------------------------------------------------------------------------
# Evaluation


def eval_predicate(pred: Predicate, env: Environment, workspace) -> bool:
    """Boolean semantics over a workspace; strict in both operands."""
    if isinstance(pred, TruePred):
        return True
    if isinstance(pred, FalsePred):
        return False
    if isinstance(pred, Not):
        return not eval_predicate(pred.operand, env, workspace)
    if isinstance(pred, And):
        left = eval_predicate(pred.left, env, workspace)
        right = eval_predicate(pred.right, env, workspace)
        return left and right
    if isinstance(pred, Or):
        left = eval_predicate(pred.left, env, workspace)
        right = eval_predicate(pred.right, env, workspace)
        return left or right
    if isinstance(pred, Eq):
        return _term_value(pred.left, env) == _term_value(pred.right, env)
    if isinstance(pred, Member):
        relation = workspace.relations.get(pred.relation)
        if relation is None:
            raise UnknownRelation(f"relation {pred.relation!r} is not defined")
        if len(pred.pattern) != relation.arity:
            raise ArityMismatch(
                f"pattern of arity {len(pred.pattern)} against relation "
                f"{relation.name!r} of arity {relation.arity}"
            )
        wanted = [_term_value(t, env) if not isinstance(t, Wildcard) else None
                  for t in pred.pattern]
        for row in relation.tuples:
            if all(w is None or w == cell for w, cell in zip(wanted, row)):
                return True
        return False
    raise EvalTypeError(f"unknown predicate node {pred!r}")


def _term_value(term: Term, env: Environment) -> Atom:
    if isinstance(term, Const):
        return term.atom
    if isinstance(term, Var):
        return env.lookup(term.name)
    raise EvalTypeError("a wildcard has no value outside a membership pattern")


def run_filter(f: Filter, index: Atom, candidate: Atom, workspace) -> bool:
    """Test one candidate at one index.

    Binds the index variable first (stage 1) and the candidate second
    (stage 2), then evaluates the body.
    """
    env = Environment.empty().bind(f.index_var, index).bind(f.candidate_var, candidate)
    return eval_predicate(f.body, env, workspace)


def eval_expr(
    expr: DiagramExpr,
    env: Environment,
    workspace,
    step_input: Value | None = None,
) -> Value:
    """Evaluate a diagram expression to a value.

    Strict, leftmost-innermost.  The caller's environment is never mutated;
    a Subst node evaluates its target in a child environment one stage later.
    ``step_input`` is the value the Input node denotes inside a diagram path.
    """
    if isinstance(expr, Const):
        return expr.atom
    if isinstance(expr, Var):
        return env.lookup(expr.name)
    if isinstance(expr, Input):
        if step_input is None:
            raise EvalTypeError("input is only available inside a diagram path")
        return step_input
    if isinstance(expr, Pair):
        first = eval_expr(expr.first, env, workspace, step_input)
        second = eval_expr(expr.second, env, workspace, step_input)
        return (first, second)
    if isinstance(expr, (Fst, Snd)):
        value = eval_expr(expr.operand, env, workspace, step_input)
        if not (isinstance(value, tuple) and len(value) == 2):
            word = "fst" if isinstance(expr, Fst) else "snd"
            raise EvalTypeError(f"{word} of a non-pair value {format_value(value)}")
        return value[0] if isinstance(expr, Fst) else value[1]
    if isinstance(expr, IdArrow):
        return eval_expr(expr.operand, env, workspace, step_input)
    if isinstance(expr, Subst):
        value = eval_expr(expr.value, env, workspace, step_input)
        if not isinstance(value, Atom):
            raise EvalTypeError(
                f"substitution for {expr.var!r} needs an element, "
                f"got {format_value(value)}"
            )
        child = env.bind(expr.var, value)
        return eval_expr(expr.target, child, workspace, step_input)
    if isinstance(expr, FilterRef):
        f = workspace.filters.get(expr.name)
        if f is None:
            raise UnknownFilter(f"filter {expr.name!r} is not defined")
        return FilterFn(f)
    if isinstance(expr, IndexShift):
        po = workspace.potentials.get(expr.po_name)
        if po is None:
            raise UnknownPotentialObject(
                f"potential object {expr.po_name!r} is not defined"
            )
        index = eval_expr(expr.index, env, workspace, step_input)
        if not isinstance(index, Atom):
            raise EvalTypeError(
                f"index shift needs an index element, got {format_value(index)}"
            )
        if index not in po.index_domain:
            raise IndexNotInDomain(
                f"{index.text!r} is not in domain {po.index_domain.name!r}"
            )
        return ShiftFn(po, index)
    if isinstance(expr, Apply):
        fn = eval_expr(expr.fn, env, workspace, step_input)
        arg = eval_expr(expr.arg, env, workspace, step_input)
        if isinstance(fn, FilterFn):
            if not (isinstance(arg, tuple) and len(arg) == 2
                    and all(isinstance(a, Atom) for a in arg)):
                raise EvalTypeError(
                    f"filter {fn.filter.name!r} applies to an (index, candidate) "
                    f"pair, got {format_value(arg)}"
                )
            return run_filter(fn.filter, arg[0], arg[1], workspace)
        if isinstance(fn, ShiftFn):
            if not isinstance(arg, Atom):
                raise EvalTypeError(
                    f"shifted object {fn.po.name!r} applies to a candidate "
                    f"element, got {format_value(arg)}"
                )
            return run_filter(fn.po.filter, fn.index, arg, workspace)
        raise EvalTypeError(f"cannot apply non-function value {format_value(fn)}")
    raise EvalTypeError(f"unknown expression node {expr!r}")


# ---------------------------------------------------------------------------
# Diagram specifications and the commutativity check


@dataclass(frozen=True)
class Shape:
    """Entry or exit shape: one part or a pair of parts.

    A part is a domain name, or the word ``bool`` for truth values.
    """

    parts: tuple[str, ...]

    def __post_init__(self):
        if len(self.parts) not in (1, 2):
            raise DefinitionError("a shape has one part or two")

    @property
    def is_pair(self) -> bool:
        return len(self.parts) == 2


@dataclass(frozen=True)
class DiagramSpec:
    name: str
    entry: Shape
    path_a: tuple[DiagramExpr, ...]
    path_b: tuple[DiagramExpr, ...]
    exit: Shape


def enumerate_entry(spec: DiagramSpec, workspace) -> list[Value]:
    """All entry values of a diagram, in lexicographic order."""
    pools = []
    for part in spec.entry.parts:
        if part == "bool":
            pools.append([False, True])
        else:
            domain: Domain | None = workspace.domains.get(part)
            if domain is None:
                raise UnknownDomain(f"entry domain {part!r} is not defined")
            pools.append(domain.sorted_elements())
    if not spec.entry.is_pair:
        return list(pools[0])
    return [(a, b) for a in pools[0] for b in pools[1]]


def eval_path(steps: tuple[DiagramExpr, ...], entry: Value, workspace) -> Value:
    """Fold the steps of one path over an entry value."""
    value = entry
    for step in steps:
        value = eval_expr(step, Environment.empty(), workspace, step_input=value)
    return value


@dataclass(frozen=True)
class CommutativityRow:
    input: Value
    value_a: Value | None
    value_b: Value | None
    error_a: str | None
    error_b: str | None

    @property
    def agrees(self) -> bool:
        return self.error_a is None and self.error_b is None \
            and self.value_a == self.value_b


@dataclass(frozen=True)
class CommutativityReport:
    diagram: str
    rows: tuple[CommutativityRow, ...]

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def agreeing(self) -> int:
        return sum(1 for row in self.rows if row.agrees)

    @property
    def commutes(self) -> bool:
        return all(row.agrees for row in self.rows)

    def summary(self) -> str:
        return f"{self.agreeing}/{self.total} inputs commute"


def check_commutes(spec: DiagramSpec, inputs, workspace) -> CommutativityReport:
    """Evaluate both paths on every input and compare the results.

    Per-input evaluation errors are recorded in the report instead of being
    raised, so the report is total over its input set.  Rows are ordered
    lexicographically by input.
    """
    rows = []
    for entry in sorted(inputs, key=value_order_key):
        value_a = value_b = None
        error_a = error_b = None
        try:
            value_a = eval_path(spec.path_a, entry, workspace)
        except DodlError as exc:
            error_a = f"{type(exc).__name__}: {exc}"
        try:
            value_b = eval_path(spec.path_b, entry, workspace)
        except DodlError as exc:
            error_b = f"{type(exc).__name__}: {exc}"
        rows.append(CommutativityRow(entry, value_a, value_b, error_a, error_b))
    return CommutativityReport(spec.name, tuple(rows))
