"""Canonical printer: the bit-exact dump format.

One statement per line.  Blocks come in dependency order (sorts, domains,
relations, filters, potentials, concepts, diagrams, scripts, evolvents);
names sort lexicographically within a block, except concepts, which come in
topological order (parents first) with lexicographic ties so inheritance
reads top-down.  Atoms and tuples sort numerically or byte-wise per kind.
Loading a dump and dumping again reproduces the same bytes.
"""

from __future__ import annotations

import heapq

from ..core import Atom, Domain, PotentialObject, Sort
from ..diagrams import (
    And,
    Apply,
    Const,
    DiagramExpr,
    DiagramSpec,
    Eq,
    FalsePred,
    Filter,
    FilterRef,
    Fst,
    IdArrow,
    IndexShift,
    Input,
    Member,
    Not,
    Or,
    Pair,
    Predicate,
    Snd,
    Subst,
    TruePred,
    Var,
    Wildcard,
)
from ..evolver import EventScript, Evolvent, Workspace
from ..meta import Concept, ConceptRegistry
from ..relational import (
    DifferenceExpr,
    JoinExpr,
    OracleExpr,
    Project,
    RelExpr,
    Relation,
    RelName,
    Select,
    TermIdent,
    UnionExpr,
)


def format_atom_set(atoms) -> str:
    ordered = sorted(atoms, key=Atom.order_key)
    if not ordered:
        return "{ }"
    return "{ " + ", ".join(a.text for a in ordered) + " }"


def format_row(row) -> str:
    return "(" + ", ".join(a.text for a in row) + ")"


def format_term(term) -> str:
    if isinstance(term, Wildcard):
        return "_"
    if isinstance(term, Var):
        return term.name
    if isinstance(term, TermIdent):
        return term.name
    return term.atom.text


def format_predicate(pred: Predicate) -> str:
    if isinstance(pred, TruePred):
        return "true"
    if isinstance(pred, FalsePred):
        return "false"
    if isinstance(pred, Not):
        return "not " + format_predicate(pred.operand)
    if isinstance(pred, And):
        return f"({format_predicate(pred.left)} and {format_predicate(pred.right)})"
    if isinstance(pred, Or):
        return f"({format_predicate(pred.left)} or {format_predicate(pred.right)})"
    if isinstance(pred, Eq):
        return f"{format_term(pred.left)} = {format_term(pred.right)}"
    if isinstance(pred, Member):
        pattern = ", ".join(format_term(t) for t in pred.pattern)
        return f"member {pred.relation} ({pattern})"
    raise ValueError(f"unknown predicate node {pred!r}")


def format_diagram_expr(expr: DiagramExpr) -> str:
    if isinstance(expr, Input):
        return "input"
    if isinstance(expr, Var):
        return f"var {expr.name}"
    if isinstance(expr, Const):
        return f"const {expr.atom.text}"
    if isinstance(expr, FilterRef):
        return f"filter {expr.name}"
    if isinstance(expr, Fst):
        return f"fst({format_diagram_expr(expr.operand)})"
    if isinstance(expr, Snd):
        return f"snd({format_diagram_expr(expr.operand)})"
    if isinstance(expr, IdArrow):
        return f"id({format_diagram_expr(expr.operand)})"
    if isinstance(expr, Pair):
        return (f"pair({format_diagram_expr(expr.first)}, "
                f"{format_diagram_expr(expr.second)})")
    if isinstance(expr, Apply):
        return (f"apply({format_diagram_expr(expr.fn)}, "
                f"{format_diagram_expr(expr.arg)})")
    if isinstance(expr, Subst):
        return (f"subst({expr.var}, {format_diagram_expr(expr.target)}, "
                f"{format_diagram_expr(expr.value)})")
    if isinstance(expr, IndexShift):
        return f"shift({expr.po_name}, {format_diagram_expr(expr.index)})"
    raise ValueError(f"unknown expression node {expr!r}")


def format_relexpr(expr: RelExpr) -> str:
    if isinstance(expr, RelName):
        return expr.name
    if isinstance(expr, Select):
        return (f"select {format_relexpr(expr.source)} "
                f"where {format_predicate(expr.pred)}")
    if isinstance(expr, Project):
        return (f"project {format_relexpr(expr.source)} "
                f"[{', '.join(expr.attrs)}]")
    if isinstance(expr, JoinExpr):
        return f"join({format_relexpr(expr.left)}, {format_relexpr(expr.right)})"
    if isinstance(expr, UnionExpr):
        return f"union({format_relexpr(expr.left)}, {format_relexpr(expr.right)})"
    if isinstance(expr, DifferenceExpr):
        return (f"difference({format_relexpr(expr.left)}, "
                f"{format_relexpr(expr.right)})")
    if isinstance(expr, OracleExpr):
        return (f"oracle({format_relexpr(expr.source)}, {expr.index_attr} = "
                f"{expr.index_value.text}, {expr.target_attr})")
    raise ValueError(f"unknown query node {expr!r}")


def format_relation(relation: Relation, style: str = "text") -> str:
    """A relation as a header line plus one line per tuple."""
    if style == "tsv":
        lines = ["\t".join(relation.attribute_names)]
        lines += ["\t".join(a.text for a in row) for row in relation.sorted_tuples()]
    else:
        lines = [", ".join(relation.attribute_names)]
        lines += [format_row(row) for row in relation.sorted_tuples()]
    return "\n".join(lines)


def format_query_result(result, style: str = "text") -> str:
    """Render a query outcome: a relation, or an atom set from the oracle."""
    if isinstance(result, Relation):
        return format_relation(result, style)
    if style == "tsv":
        return "\n".join(a.text for a in sorted(result, key=Atom.order_key))
    return format_atom_set(result)


def _sort_stmt(sort: Sort) -> str:
    return f"sort {sort.name} : {sort.kind};"


def _domain_stmt(domain: Domain) -> str:
    return f"domain {domain.name} : {domain.sort.name} = {format_atom_set(domain.elements)};"


def _relation_stmt(relation: Relation) -> str:
    attrs = ", ".join(f"{name} : {sort.name}" for name, sort in relation.attributes)
    rows = relation.sorted_tuples()
    body = "{ " + ", ".join(format_row(r) for r in rows) + " }" if rows else "{ }"
    return f"relation {relation.name} ({attrs}) = {body};"


def _filter_stmt(f: Filter) -> str:
    return (f"filter {f.name} ({f.index_var}, {f.candidate_var}) = "
            f"{format_predicate(f.body)};")


def _potential_stmt(po: PotentialObject) -> str:
    return (f"potential {po.name} carrier {po.carrier.name} "
            f"index {po.index_domain.name} filter {po.filter.name};")


def _concept_stmt(concept: Concept) -> str:
    head = f"concept {concept.name}"
    if concept.parents:
        head += " : " + ", ".join(concept.parents)
    items = []
    for attr in sorted(concept.own_attributes):
        items.append(f"attr {attr} = {concept.own_attributes[attr].text};")
    for event in concept.events:
        items.append(f"event {event};")
    for label, event in concept.menus:
        items.append(f"menu {label} -> {event};")
    if concept.encapsulated:
        items.append("encapsulated " + ", ".join(sorted(concept.encapsulated)) + ";")
    body = "{ " + " ".join(items) + " }" if items else "{ }"
    return f"{head} {body};"


def _shape_text(parts: tuple[str, ...]) -> str:
    if len(parts) == 2:
        return f"pair({parts[0]}, {parts[1]})"
    return parts[0]


def _path_text(steps) -> str:
    if not steps:
        return "[ ]"
    return "[ " + ", ".join(format_diagram_expr(s) for s in steps) + " ]"


def _diagram_stmt(spec: DiagramSpec) -> str:
    return (f"diagram {spec.name} entry {_shape_text(spec.entry.parts)} "
            f"path_a {_path_text(spec.path_a)} "
            f"path_b {_path_text(spec.path_b)} "
            f"exit {_shape_text(spec.exit.parts)};")


def _script_stmt(script: EventScript) -> str:
    if script.steps:
        steps = "[ " + ", ".join(
            f"({po}, {index.text})" for po, index in script.steps
        ) + " ]"
    else:
        steps = "[ ]"
    return f"script {script.name} = {steps};"


def _evolvent_stmt(evolvent: Evolvent) -> str:
    if evolvent.kind == "identity":
        body = "identity"
    elif evolvent.kind == "script":
        body = f"script {evolvent.script}"
    else:
        body = "compose(" + ", ".join(evolvent.parts) + ")"
    return f"evolvent {evolvent.name} = {body};"


def _concept_order(registry: ConceptRegistry) -> list[str]:
    """Topological order, parents before children, ties lexicographic."""
    names = registry.names()
    pending: dict[str, set[str]] = {}
    children: dict[str, list[str]] = {name: [] for name in names}
    for name in names:
        parents = {p for p in registry.get(name).parents if p in children}
        pending[name] = parents
        for parent in parents:
            children[parent].append(name)
    ready = [name for name in names if not pending[name]]
    heapq.heapify(ready)
    out = []
    while ready:
        name = heapq.heappop(ready)
        out.append(name)
        for child in children[name]:
            pending[child].discard(name)
            if not pending[child]:
                heapq.heappush(ready, child)
    return out


def dump(workspace: Workspace) -> str:
    """Canonical text of all declarations in the workspace."""
    lines = []
    for name in sorted(workspace.sorts):
        lines.append(_sort_stmt(workspace.sorts[name]))
    for name in sorted(workspace.domains):
        lines.append(_domain_stmt(workspace.domains[name]))
    for name in sorted(workspace.relations):
        lines.append(_relation_stmt(workspace.relations[name]))
    for name in sorted(workspace.filters):
        lines.append(_filter_stmt(workspace.filters[name]))
    for name in sorted(workspace.potentials):
        lines.append(_potential_stmt(workspace.potentials[name]))
    for name in _concept_order(workspace.concepts):
        lines.append(_concept_stmt(workspace.concepts.get(name)))
    for name in sorted(workspace.diagrams):
        lines.append(_diagram_stmt(workspace.diagrams[name]))
    for name in sorted(workspace.scripts):
        lines.append(_script_stmt(workspace.scripts[name]))
    for name in sorted(workspace.evolvents):
        lines.append(_evolvent_stmt(workspace.evolvents[name]))
    return "".join(line + "\n" for line in lines)
