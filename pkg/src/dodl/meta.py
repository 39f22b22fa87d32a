"""Concepts: metadata objects in a partial order with attribute inheritance.

Ancestor concepts hold attributes, events and menus; descendants inherit
them and may override attributes.  Lookup is depth-first in parent
declaration order, nearest definition first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Atom
from .errors import (
    CycleDetected,
    DuplicateName,
    EncapsulationViolation,
    UnknownAttribute,
    UnknownConcept,
)


@dataclass(frozen=True)
class Concept:
    """A metadata object node.

    ``parents`` keeps declaration order (it drives lookup); the other
    collections are normalized to canonical order so equal declarations
    compare equal regardless of how they were written.
    """

    name: str
    parents: tuple[str, ...] = ()
    own_attributes: dict[str, Atom] = field(default_factory=dict)
    events: tuple[str, ...] = ()
    menus: tuple[tuple[str, str], ...] = ()
    encapsulated: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(self, "own_attributes", dict(self.own_attributes))
        object.__setattr__(self, "events", tuple(sorted(set(self.events))))
        object.__setattr__(self, "menus", tuple(sorted(set(self.menus))))
        object.__setattr__(self, "encapsulated", frozenset(self.encapsulated))
        if len(set(self.parents)) != len(self.parents):
            raise DuplicateName(f"concept {self.name!r} repeats a parent")


class ConceptRegistry:
    """Single-writer registry of concepts; reads are pure."""

    def __init__(self):
        self._concepts: dict[str, Concept] = {}

    def __eq__(self, other):
        return isinstance(other, ConceptRegistry) and \
            self._concepts == other._concepts

    def __contains__(self, name: str) -> bool:
        return name in self._concepts

    def __len__(self) -> int:
        return len(self._concepts)

    def names(self) -> list[str]:
        return sorted(self._concepts)

    def get(self, name: str) -> Concept:
        try:
            return self._concepts[name]
        except KeyError:
            raise UnknownConcept(f"concept {name!r} is not defined") from None

    def add(self, concept: Concept) -> Concept:
        """Register a concept; rejects duplicate names and parent cycles.

        Parents may be declared later (forward references); a cycle is
        rejected at whichever registration closes it.
        """
        if concept.name in self._concepts:
            raise DuplicateName(f"concept {concept.name!r} is already defined")
        self._concepts[concept.name] = concept
        cycle = self._find_cycle(concept.name)
        if cycle is not None:
            del self._concepts[concept.name]
            raise CycleDetected(
                "concept inheritance cycle: " + " -> ".join(cycle)
            )
        return concept

    def _find_cycle(self, start: str) -> list[str] | None:
        # Walk parent edges from the newly added node only: any cycle the
        # addition closes must pass through it.
        path: list[str] = []
        seen_on_path: set[str] = set()

        def walk(name: str) -> list[str] | None:
            if name in seen_on_path:
                return path[path.index(name):] + [name]
            concept = self._concepts.get(name)
            if concept is None:
                return None
            path.append(name)
            seen_on_path.add(name)
            for parent in concept.parents:
                found = walk(parent)
                if found is not None:
                    return found
            path.pop()
            seen_on_path.discard(name)
            return None

        return walk(start)

    def derive(self, apo: str, dpo_name: str, overrides: dict[str, Atom]) -> Concept:
        """Create and register a descendant of ``apo`` with its own overrides.

        Events and menus are not copied; they stay reachable through the
        ancestor chain.
        """
        if apo not in self._concepts:
            raise UnknownConcept(f"concept {apo!r} is not defined")
        return self.add(Concept(dpo_name, (apo,), dict(overrides)))

    def ancestors(self, name: str) -> list[str]:
        """Depth-first, declaration-order ancestor names, first visit kept."""
        self.get(name)
        out: list[str] = []
        seen = {name}

        def visit(current: str):
            for parent in self.get(current).parents:
                if parent not in seen:
                    seen.add(parent)
                    out.append(parent)
                    visit(parent)

        visit(name)
        return out

    def _lineage(self, name: str) -> list[str]:
        return [name] + self.ancestors(name)

    def effective_encapsulated(self, name: str) -> frozenset[str]:
        hidden: set[str] = set()
        for node in self._lineage(name):
            hidden |= self.get(node).encapsulated
        return frozenset(hidden)

    def resolve_attribute(self, name: str, attr: str, caller: str | None = None) -> Atom:
        """Nearest-definition attribute lookup with encapsulation checks.

        ``caller`` names the concept on whose behalf resolution runs; when
        absent the caller is external and sees no encapsulated attribute.
        """
        if attr in self.effective_encapsulated(name):
            allowed = caller == name or (
                caller in self._concepts and name in self.ancestors(caller)
            )
            if not allowed:
                raise EncapsulationViolation(
                    f"attribute {attr!r} of {name!r} is encapsulated"
                )
        for node in self._lineage(name):
            own = self.get(node).own_attributes
            if attr in own:
                return own[attr]
        raise UnknownAttribute(
            f"no ancestor of {name!r} defines attribute {attr!r}"
        )

    def effective_events(self, name: str) -> list[str]:
        out: list[str] = []
        for node in self._lineage(name):
            for event in self.get(node).events:
                if event not in out:
                    out.append(event)
        return out

    def effective_menus(self, name: str) -> list[tuple[str, str]]:
        out: list[tuple[str, str]] = []
        labels: set[str] = set()
        for node in self._lineage(name):
            for label, event in self.get(node).menus:
                if label not in labels:
                    labels.add(label)
                    out.append((label, event))
        return out

    def validate(self) -> list[str]:
        """Registry-wide consistency problems as human-readable strings."""
        problems = []
        for name in sorted(self._concepts):
            concept = self._concepts[name]
            for parent in concept.parents:
                if parent not in self._concepts:
                    problems.append(
                        f"concept {name!r} inherits from unknown concept "
                        f"{parent!r}"
                    )
            known = set(concept.own_attributes)
            for parent in concept.parents:
                if parent in self._concepts:
                    known |= self._inherited_attribute_names(parent)
            for attr in sorted(concept.encapsulated - known):
                problems.append(
                    f"concept {name!r} encapsulates undefined attribute "
                    f"{attr!r}"
                )
        return problems

    def _inherited_attribute_names(self, name: str) -> set[str]:
        out = set(self.get(name).own_attributes)
        for parent in self.get(name).parents:
            if parent in self._concepts:
                out |= self._inherited_attribute_names(parent)
        return out
