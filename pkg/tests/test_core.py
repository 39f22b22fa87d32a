import pytest
from hypothesis import given
from hypothesis import strategies as st

from dodl.core import (
    NUMERIC,
    SYMBOLIC,
    Atom,
    Environment,
    Event,
    PotentialObject,
    Sort,
    actual_name,
    bind,
    make_domain,
    number,
    symbol,
)
from dodl.diagrams import Filter, TruePred
from dodl.errors import (
    DefinitionError,
    IndexNotInDomain,
    ReservedCharacter,
    SortMismatch,
    UnboundVariable,
)

NAME = Sort("Name", SYMBOLIC)
H = Sort("H", NUMERIC)


symbolic_atoms = st.text(
    alphabet=st.sampled_from("abcdefghijABCDEFGHIJ"), min_size=1, max_size=8
).map(symbol)
numeric_atoms = st.integers(min_value=0, max_value=9999).map(number)
atoms = st.one_of(symbolic_atoms, numeric_atoms)


class TestAtom:
    def test_parse_classifies_by_leading_digit(self):
        assert Atom.parse("Johnes").kind == SYMBOLIC
        assert Atom.parse("20").kind == NUMERIC

    def test_numeric_text_is_canonical(self):
        assert Atom("007", NUMERIC).text == "7"
        assert Atom("007", NUMERIC) == number(7)

    @pytest.mark.parametrize("bad", ["", "a b", "x,y", "{x", "x}", "a(", ")b", "x;"])
    def test_reserved_characters_rejected(self, bad):
        with pytest.raises(ReservedCharacter):
            Atom(bad, SYMBOLIC)

    def test_symbolic_may_not_start_with_digit(self):
        with pytest.raises(ReservedCharacter):
            Atom("2nd", SYMBOLIC)

    def test_non_integer_numeric_rejected(self):
        with pytest.raises(ReservedCharacter):
            Atom("twenty", NUMERIC)

    def test_order_numeric_by_value_symbolic_bytewise(self):
        assert number(2).order_key() < number(10).order_key()
        assert symbol("Doe").order_key() < symbol("Smith").order_key()


class TestMakeDomain:
    def test_four_teachers(self):
        domain, dropped = make_domain(
            "Teach", NAME,
            [symbol("Johnes"), symbol("Smith"), symbol("Doe"), symbol("Jackson")],
        )
        assert len(domain.elements) == 4
        assert dropped == 0

    def test_deduplication_is_counted(self):
        domain, dropped = make_domain("Course", Sort("Course", SYMBOLIC),
                                      [symbol("Logic"), symbol("Logic")])
        assert domain.elements == frozenset({symbol("Logic")})
        assert dropped == 1

    def test_numeric_domain(self):
        domain, dropped = make_domain("Hours", H, [number(20), number(30)])
        assert len(domain.elements) == 2
        assert all(a.kind == NUMERIC for a in domain.elements)
        assert dropped == 0

    def test_kind_mismatch_raises(self):
        with pytest.raises(SortMismatch):
            make_domain("Hours", H, [symbol("twenty")])

    def test_idempotent_over_existing_elements(self):
        domain, _ = make_domain("Teach", NAME, [symbol("Doe"), symbol("Smith")])
        again, dropped = make_domain("Teach", NAME, list(domain.elements))
        assert again == domain
        assert dropped == 0

    def test_sorted_elements_are_deterministic(self):
        domain, _ = make_domain("Hours", H, [number(30), number(20), number(7)])
        assert [a.text for a in domain.sorted_elements()] == ["7", "20", "30"]


class TestEnvironment:
    def test_bind_from_empty(self):
        env = bind(Environment.empty(), "x", symbol("Jones"))
        assert env.lookup("x") == symbol("Jones")
        assert env.stage == 1

    def test_rebinding_makes_new_stage_and_keeps_original(self):
        first = bind(Environment.empty(), "x", symbol("Jones"))
        second = bind(first, "x", symbol("Smith"))
        assert second.lookup("x") == symbol("Smith")
        assert second.stage == 2
        assert first.lookup("x") == symbol("Jones")
        assert first.stage == 1

    def test_two_binds_compose(self):
        env = bind(bind(Environment.empty(), "idx", symbol("Logic")),
                   "x", symbol("Doe"))
        assert env.stage == 2
        assert env.lookup("idx") == symbol("Logic")
        assert env.lookup("x") == symbol("Doe")

    def test_lookup_missing_raises(self):
        with pytest.raises(UnboundVariable):
            Environment.empty().lookup("x")

    @given(atoms, atoms, st.sampled_from(["x", "y", "idx"]))
    def test_bind_is_persistent(self, a, b, var):
        env = bind(Environment.empty(), "seed", a)
        before = dict(env.bindings)
        out = bind(env, var, b)
        assert env.bindings == before
        assert out.stage == env.stage + 1
        assert out.lookup(var) == b


class TestObjects:
    def _domains(self):
        teach, _ = make_domain("Teach", NAME, [symbol("Doe"), symbol("Smith")])
        course, _ = make_domain("Course", Sort("Course", SYMBOLIC),
                                [symbol("Logic")])
        return teach, course

    def test_event_requires_membership(self):
        _, course = self._domains()
        Event(symbol("Logic"), course)
        with pytest.raises(IndexNotInDomain):
            Event(symbol("Algebra"), course)

    def test_actual_name_is_deterministic(self):
        assert actual_name("Tch", symbol("Logic")) == "Tch_Logic"
        assert actual_name("Tch", number(20)) == "Tch_20"

    def test_potential_object_needs_distinct_domains(self):
        teach, course = self._domains()
        f = Filter("F", "i", "x", TruePred())
        PotentialObject("Tch", teach, course, f)
        with pytest.raises(DefinitionError):
            PotentialObject("Bad", teach, teach, f)
