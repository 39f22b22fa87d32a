"""Two-pass loader: name collection, resolution/build, then commands.

Declarations may reference names declared later (or in another file of the
same batch); the loader collects every name first and resolves afterwards,
which is also what makes the canonical dump reloadable in block order.
Command statements run last, in textual order, through a System Exchange,
so their effects land in the audit log.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from ..core import Domain, PotentialObject, Sort
from ..diagrams import (
    DiagramSpec,
    Filter,
    Member,
    Predicate,
    And,
    Or,
    Not,
    Shape,
    check_commutes,
    enumerate_entry,
    expr_free_vars,
)
from ..errors import CycleDetected, DodlError
from ..evolver import (
    EventScript,
    Evolvent,
    Exchange,
    Query,
    Trigger,
    Workspace,
)
from ..meta import Concept, ConceptRegistry
from ..relational import Relation
from .parser import parse
from .printer import dump, format_query_result
from .syntax import (
    CheckCmd,
    ConceptDecl,
    Diagnostic,
    DiagramDecl,
    DomainDecl,
    DumpCmd,
    EvolventDecl,
    FilterDecl,
    PotentialDecl,
    QueryCmd,
    Ref,
    RelationDecl,
    ScriptDecl,
    ShapePart,
    SortDecl,
    SourceUnit,
    TriggerCmd,
)

_NAMESPACES = (
    (SortDecl, "sort"),
    (DomainDecl, "domain"),
    (RelationDecl, "relation"),
    (FilterDecl, "filter"),
    (PotentialDecl, "potential object"),
    (ConceptDecl, "concept"),
    (DiagramDecl, "diagram"),
    (ScriptDecl, "script"),
    (EvolventDecl, "evolvent"),
)


@dataclass
class LoadResult:
    """Outcome of a load: the exchange over the built workspace (if any),
    error diagnostics, informational notes, and command output blocks."""

    exchange: Exchange | None
    diagnostics: list[Diagnostic]
    notes: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.exchange is not None and not self.diagnostics

    @property
    def workspace(self) -> Workspace | None:
        return self.exchange.state if self.exchange else None


class _Builder:
    def __init__(self, units: list[SourceUnit], base: Workspace | None):
        self.units = units
        self.base = base or Workspace.empty()
        self.diagnostics: list[Diagnostic] = []
        self.notes: list[str] = []
        self.decls: dict[type, dict[str, object]] = {
            cls: {} for cls, _ in _NAMESPACES
        }
        self.unit_of: dict[int, SourceUnit] = {}

    # -- helpers -------------------------------------------------------------

    def complain(self, anchor, message: str):
        """Record an error diagnostic at an anchor (a Ref, ShapePart or
        statement; anything carrying a span)."""
        span = anchor.span
        unit = self.unit_of.get(id(anchor))
        self.diagnostics.append(Diagnostic(
            message, span.line, span.col, span.start, span.end, (),
            unit.path if unit else None,
        ))

    # -- pass 1: collect names -------------------------------------------------

    def collect(self):
        base_names = {
            SortDecl: set(self.base.sorts),
            DomainDecl: set(self.base.domains),
            RelationDecl: set(self.base.relations),
            FilterDecl: set(self.base.filters),
            PotentialDecl: set(self.base.potentials),
            ConceptDecl: set(name for name in self.base.concepts.names()),
            DiagramDecl: set(self.base.diagrams),
            ScriptDecl: set(self.base.scripts),
            EvolventDecl: set(self.base.evolvents),
        }
        kind_word = dict(_NAMESPACES)
        for unit in self.units:
            for stmt in unit.statements:
                for anchor in _iter_anchors(stmt):
                    self.unit_of[id(anchor)] = unit
                cls = type(stmt)
                if cls not in self.decls:
                    continue
                name = stmt.name.name
                if name in self.decls[cls] or name in base_names[cls]:
                    self.complain(
                        stmt, f"{kind_word[cls]} {name!r} is already defined"
                    )
                else:
                    self.decls[cls][name] = stmt

    # -- pass 2: resolve and build ----------------------------------------------

    def build_workspace(self) -> Workspace | None:
        sorts = dict(self.base.sorts)
        for name, decl in self.decls[SortDecl].items():
            sorts[name] = Sort(name, decl.kind)

        domains = dict(self.base.domains)
        for name, decl in self.decls[DomainDecl].items():
            sort = sorts.get(decl.sort.name)
            if sort is None:
                self.complain(decl.sort, f"sort {decl.sort.name!r} is not defined")
                continue
            try:
                domain = Domain(name, sort, frozenset(decl.atoms))
            except DodlError as exc:
                self.complain(decl, str(exc))
                continue
            dropped = len(decl.atoms) - len(domain.elements)
            if dropped:
                self.notes.append(
                    f"domain {name}: dropped {dropped} duplicate atom(s)"
                )
            domains[name] = domain

        relations = dict(self.base.relations)
        for name, decl in self.decls[RelationDecl].items():
            schema = []
            bad = False
            for attr, sort_ref in decl.attributes:
                sort = sorts.get(sort_ref.name)
                if sort is None:
                    self.complain(
                        sort_ref, f"sort {sort_ref.name!r} is not defined"
                    )
                    bad = True
                    continue
                schema.append((attr, sort))
            if bad:
                continue
            try:
                relation = Relation(name, tuple(schema), frozenset(decl.rows))
            except DodlError as exc:
                self.complain(decl, str(exc))
                continue
            dropped = len(decl.rows) - len(relation.tuples)
            if dropped:
                self.notes.append(
                    f"relation {name}: dropped {dropped} duplicate tuple(s)"
                )
            relations[name] = relation

        filters = dict(self.base.filters)
        for name, decl in self.decls[FilterDecl].items():
            ok = True
            members = _collect_members(decl.body)
            for ref, member in zip(decl.member_refs, members):
                relation = relations.get(member.relation)
                if relation is None:
                    self.complain(
                        ref, f"relation {member.relation!r} is not defined"
                    )
                    ok = False
                elif len(member.pattern) != relation.arity:
                    self.complain(
                        ref,
                        f"pattern of arity {len(member.pattern)} against "
                        f"relation {member.relation!r} of arity {relation.arity}",
                    )
                    ok = False
            if not ok:
                continue
            try:
                filters[name] = Filter(
                    name, decl.index_var, decl.candidate_var, decl.body
                )
            except DodlError as exc:
                self.complain(decl, str(exc))

        potentials = dict(self.base.potentials)
        for name, decl in self.decls[PotentialDecl].items():
            carrier = domains.get(decl.carrier.name)
            index_domain = domains.get(decl.index_domain.name)
            filter_ = filters.get(decl.filter.name)
            ok = True
            if carrier is None:
                self.complain(
                    decl.carrier, f"domain {decl.carrier.name!r} is not defined"
                )
                ok = False
            if index_domain is None:
                self.complain(
                    decl.index_domain,
                    f"domain {decl.index_domain.name!r} is not defined",
                )
                ok = False
            if filter_ is None:
                self.complain(
                    decl.filter, f"filter {decl.filter.name!r} is not defined"
                )
                ok = False
            if not ok:
                continue
            try:
                potentials[name] = PotentialObject(
                    name, carrier, index_domain, filter_
                )
            except DodlError as exc:
                self.complain(decl.index_domain, str(exc))

        concepts = self._build_concepts()
        diagrams = self._build_diagrams(domains, filters, potentials)
        scripts = self._build_scripts(potentials)
        evolvents = self._build_evolvents(scripts)

        if self.diagnostics:
            return None
        return Workspace(
            sorts=sorts,
            domains=domains,
            relations=relations,
            filters=filters,
            potentials=potentials,
            concepts=concepts,
            diagrams=diagrams,
            scripts=scripts,
            evolvents=evolvents,
            ao_library=dict(self.base.ao_library),
            stage=self.base.stage,
        )

    def _build_concepts(self) -> ConceptRegistry:
        registry = ConceptRegistry()
        for name in self.base.concepts.names():
            registry.add(self.base.concepts.get(name))
        declared = set(self.decls[ConceptDecl]) | set(self.base.concepts.names())
        for name, decl in self.decls[ConceptDecl].items():
            for parent in decl.parents:
                if parent.name not in declared:
                    self.complain(
                        parent, f"concept {parent.name!r} is not defined"
                    )
            if any(p.name == name for p in decl.parents):
                self.complain(decl, f"concept {name!r} inherits from itself")
        # Register in declaration order; the registry rejects whichever
        # declaration closes a cycle.
        for name, decl in self.decls[ConceptDecl].items():
            parents = tuple(
                p.name for p in decl.parents
                if p.name in declared and p.name != name
            )
            concept = Concept(
                name,
                parents,
                dict(decl.attributes),
                decl.events,
                decl.menus,
                frozenset(decl.encapsulated),
            )
            try:
                registry.add(concept)
            except CycleDetected as exc:
                self.complain(decl, str(exc))
        self._check_encapsulation(registry)
        return registry

    def _check_encapsulation(self, registry: ConceptRegistry):
        for name, decl in self.decls[ConceptDecl].items():
            if name not in registry:
                continue
            known = set()
            stack = [name]
            seen = set()
            while stack:
                current = stack.pop()
                if current in seen or current not in registry:
                    continue
                seen.add(current)
                concept = registry.get(current)
                known |= set(concept.own_attributes)
                stack.extend(concept.parents)
            for attr in sorted(frozenset(decl.encapsulated) - known):
                self.complain(
                    decl,
                    f"concept {name!r} encapsulates undefined attribute {attr!r}",
                )

    def _build_diagrams(self, domains, filters, potentials) -> dict[str, DiagramSpec]:
        diagrams = dict(self.base.diagrams)
        for name, decl in self.decls[DiagramDecl].items():
            ok = True
            for part in decl.entry + decl.exit:
                if not part.is_bool and part.name not in domains:
                    self.complain(
                        part, f"domain {part.name!r} is not defined"
                    )
                    ok = False
            for ref in decl.filter_refs:
                if ref.name not in filters:
                    self.complain(ref, f"filter {ref.name!r} is not defined")
                    ok = False
            for ref in decl.shift_refs:
                if ref.name not in potentials:
                    self.complain(
                        ref, f"potential object {ref.name!r} is not defined"
                    )
                    ok = False
            for steps, which in ((decl.path_a, "path_a"), (decl.path_b, "path_b")):
                for step in steps:
                    unbound = expr_free_vars(step)
                    if unbound:
                        self.complain(
                            decl,
                            f"diagram {name!r} {which}: unbound variable(s) "
                            + ", ".join(sorted(unbound)),
                        )
                        ok = False
            if not ok:
                continue
            diagrams[name] = DiagramSpec(
                name,
                Shape(tuple(p.name for p in decl.entry)),
                decl.path_a,
                decl.path_b,
                Shape(tuple(p.name for p in decl.exit)),
            )
        return diagrams

    def _build_scripts(self, potentials) -> dict[str, EventScript]:
        scripts = dict(self.base.scripts)
        for name, decl in self.decls[ScriptDecl].items():
            ok = True
            steps = []
            for po_ref, index in decl.steps:
                po = potentials.get(po_ref.name)
                if po is None:
                    self.complain(
                        po_ref,
                        f"potential object {po_ref.name!r} is not defined",
                    )
                    ok = False
                    continue
                if index not in po.index_domain:
                    self.complain(
                        po_ref,
                        f"{index.text!r} is not in domain "
                        f"{po.index_domain.name!r}",
                    )
                    ok = False
                    continue
                steps.append((po_ref.name, index))
            if ok:
                scripts[name] = EventScript(name, tuple(steps))
        return scripts

    def _build_evolvents(self, scripts) -> dict[str, Evolvent]:
        evolvents = dict(self.base.evolvents)
        declared = set(self.decls[EvolventDecl]) | set(evolvents)
        for name, decl in self.decls[EvolventDecl].items():
            if decl.kind == "identity":
                evolvents[name] = Evolvent(name, "identity")
            elif decl.kind == "script":
                if decl.script.name not in scripts:
                    self.complain(
                        decl.script,
                        f"script {decl.script.name!r} is not defined",
                    )
                    continue
                evolvents[name] = Evolvent(name, "script", script=decl.script.name)
            else:
                ok = True
                for part in decl.parts:
                    if part.name not in declared:
                        self.complain(
                            part, f"evolvent {part.name!r} is not defined"
                        )
                        ok = False
                if ok:
                    evolvents[name] = Evolvent(
                        name, "composed",
                        parts=tuple(p.name for p in decl.parts),
                    )
        self._check_evolvent_cycles(evolvents)
        return evolvents

    def _check_evolvent_cycles(self, evolvents: dict[str, Evolvent]):
        colors: dict[str, int] = {}

        def visit(name: str, trail: list[str]) -> list[str] | None:
            state = colors.get(name)
            if state == 1:
                return trail[trail.index(name):] + [name]
            if state == 2 or name not in evolvents:
                return None
            colors[name] = 1
            trail.append(name)
            for part in evolvents[name].parts:
                cycle = visit(part, trail)
                if cycle is not None:
                    return cycle
            trail.pop()
            colors[name] = 2
            return None

        for name in sorted(evolvents):
            cycle = visit(name, [])
            if cycle is not None:
                decl = self.decls[EvolventDecl].get(cycle[0])
                anchor = decl if decl is not None else next(
                    d for d in self.decls[EvolventDecl].values()
                    if d.name.name in cycle
                )
                self.complain(
                    anchor,
                    "evolvent composition cycle: " + " -> ".join(cycle),
                )
                return

    # -- commands ----------------------------------------------------------------

    def run_commands(self, exchange: Exchange) -> list[str]:
        outputs = []
        for unit in self.units:
            for stmt in unit.statements:
                if isinstance(stmt, TriggerCmd):
                    response = exchange.dispatch(
                        Trigger(stmt.po.name, stmt.index)
                    )
                    if not response.ok:
                        self.complain(stmt, response.message or "trigger failed")
                    else:
                        ao = response.value
                        outputs.append(
                            f"{ao.name} = "
                            + _atom_set_text(ao.sorted_elements())
                        )
                elif isinstance(stmt, QueryCmd):
                    response = exchange.dispatch(Query(stmt.expr))
                    if not response.ok:
                        self.complain(stmt, response.message or "query failed")
                    else:
                        outputs.append(format_query_result(response.value))
                elif isinstance(stmt, CheckCmd):
                    spec = exchange.state.diagrams[stmt.diagram.name]
                    report = check_commutes(
                        spec, enumerate_entry(spec, exchange.state),
                        exchange.state,
                    )
                    outputs.append(f"{spec.name}: {report.summary()}")
                    if not report.commutes:
                        self.complain(
                            stmt,
                            f"diagram {spec.name!r} does not commute "
                            f"({report.summary()})",
                        )
                elif isinstance(stmt, DumpCmd):
                    outputs.append(dump(exchange.state).rstrip("\n"))
        return outputs

    def validate_commands(self, workspace_preview: dict):
        """Static checks for command statements against collected names."""
        potentials = workspace_preview["potentials"]
        diagrams = workspace_preview["diagrams"]
        relations = workspace_preview["relations"]
        for unit in self.units:
            for stmt in unit.statements:
                if isinstance(stmt, TriggerCmd):
                    po = potentials.get(stmt.po.name)
                    if po is None:
                        self.complain(
                            stmt.po,
                            f"potential object {stmt.po.name!r} is not defined",
                        )
                    elif stmt.index not in po.index_domain:
                        self.complain(
                            stmt.po,
                            f"{stmt.index.text!r} is not in domain "
                            f"{po.index_domain.name!r}",
                        )
                elif isinstance(stmt, CheckCmd):
                    if stmt.diagram.name not in diagrams:
                        self.complain(
                            stmt.diagram,
                            f"diagram {stmt.diagram.name!r} is not defined",
                        )
                elif isinstance(stmt, QueryCmd):
                    for ref in stmt.relation_refs:
                        if ref.name not in relations:
                            self.complain(
                                ref,
                                f"relation {ref.name!r} is not defined",
                            )


def _iter_anchors(stmt):
    """The statement itself plus every span-carrying node inside it."""
    yield stmt
    seen = {id(stmt)}

    def walk(obj):
        if isinstance(obj, (Ref, ShapePart)):
            if id(obj) not in seen:
                seen.add(id(obj))
                yield obj
            return
        if isinstance(obj, tuple):
            for item in obj:
                yield from walk(item)

    for f in dataclasses.fields(stmt):
        yield from walk(getattr(stmt, f.name))


def _collect_members(pred: Predicate) -> list[Member]:
    """Membership tests in source (pre-)order; mirrors the parser's refs."""
    if isinstance(pred, Member):
        return [pred]
    if isinstance(pred, (And, Or)):
        return _collect_members(pred.left) + _collect_members(pred.right)
    if isinstance(pred, Not):
        return _collect_members(pred.operand)
    return []


def _atom_set_text(atoms) -> str:
    if not atoms:
        return "{ }"
    return "{ " + ", ".join(a.text for a in atoms) + " }"


def build(units: list[SourceUnit], base: Workspace | None = None) -> LoadResult:
    """Validate a batch of units and build the workspace they describe.

    Syntax errors suppress the semantic passes.  Command statements run
    only when every declaration checks out; a failing ``check`` command
    surfaces as a diagnostic on an otherwise loadable workspace.
    """
    syntax_errors = [d for unit in units for d in unit.with_path_on_errors()]
    if syntax_errors:
        return LoadResult(None, syntax_errors)

    builder = _Builder(units, base)
    builder.collect()
    workspace = builder.build_workspace()
    if workspace is None:
        return LoadResult(None, builder.diagnostics, builder.notes)

    builder.validate_commands({
        "domains": workspace.domains,
        "potentials": workspace.potentials,
        "diagrams": workspace.diagrams,
        "relations": workspace.relations,
    })
    if builder.diagnostics:
        return LoadResult(None, builder.diagnostics, builder.notes)

    exchange = Exchange(workspace)
    outputs = builder.run_commands(exchange)
    return LoadResult(exchange, builder.diagnostics, builder.notes, outputs)


def validate(unit: SourceUnit, workspace: Workspace | None = None) -> list[Diagnostic]:
    """Name resolution, arity, sort and acyclicity checks for one unit.

    An empty list means the unit would load against ``workspace``.
    Command statements are dry-run checked but not executed.
    """
    errors = list(unit.with_path_on_errors())
    if errors:
        return errors
    builder = _Builder([unit], workspace)
    builder.collect()
    built = builder.build_workspace()
    if built is not None:
        builder.validate_commands({
            "domains": built.domains,
            "potentials": built.potentials,
            "diagrams": built.diagrams,
            "relations": built.relations,
        })
    return builder.diagnostics


def load_texts(named_texts: list[tuple[str | None, str]],
               base: Workspace | None = None) -> LoadResult:
    units = [parse(text, path) for path, text in named_texts]
    return build(units, base)


def load_files(paths: list[str | Path], base: Workspace | None = None) -> LoadResult:
    named = []
    for path in paths:
        p = Path(path)
        named.append((str(p), p.read_text(encoding="utf-8")))
    return load_texts(named, base)
