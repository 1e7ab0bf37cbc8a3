import random

import pytest

from ilgl.formula import (And, Atom, Bot, Imp, ImpLeft, ImpRight, LayerConj,
                          Or, ParseError, Top, atoms, parse, render,
                          subformulas)
from ilgl.gen import random_formula

p, q, r = Atom("p"), Atom("q"), Atom("r")


class TestParse:
    def test_precedence_implication_over_or(self):
        assert parse("p -> q | r") == Imp(p, Or(q, r))

    def test_figure_formula(self):
        want = ImpLeft(q, LayerConj(q, Imp(p, Or(p, q))))
        assert parse("q <|- (q |> (p -> (p | q)))") == want

    def test_layer_chain_rejected(self):
        with pytest.raises(ParseError) as err:
            parse("p |> q |> r")
        assert "non-associative" in str(err.value)

    def test_layer_binds_tightest(self):
        assert parse("p |> q & r") == And(LayerConj(p, q), r)
        assert parse("p & q |> r") == And(p, LayerConj(q, r))

    def test_or_and_precedence(self):
        assert parse("p & q | r") == Or(And(p, q), r)

    def test_implications_right_associative(self):
        assert parse("p -> q -> r") == Imp(p, Imp(q, r))
        assert parse("p -|> q -|> r") == ImpRight(p, ImpRight(q, r))

    def test_mixed_implications_rejected(self):
        with pytest.raises(ParseError):
            parse("p -> q -|> r")
        with pytest.raises(ParseError):
            parse("p <|- q -> r")

    def test_mixed_implications_with_parens(self):
        assert parse("p -> (q -|> r)") == Imp(p, ImpRight(q, r))

    def test_negation_sugar(self):
        assert parse("~p") == Imp(p, Bot())
        assert parse("~~p") == Imp(Imp(p, Bot()), Bot())

    def test_constants(self):
        assert parse("top") == Top()
        assert parse("bot") == Bot()

    def test_error_offset_and_expected(self):
        with pytest.raises(ParseError) as err:
            parse("p -> ")
        assert err.value.offset == 5
        assert err.value.expected

    def test_error_on_trailing_input(self):
        with pytest.raises(ParseError) as err:
            parse("p q")
        assert err.value.offset == 2

    def test_uppercase_rejected(self):
        with pytest.raises(ParseError):
            parse("P")

    def test_totality_on_junk(self):
        for text in ["", "(", ")", "p ->", "-> p", "p |>", "p &", "~",
                     "p @ q", "p (q)", "top top", "(p))"]:
            with pytest.raises(ParseError):
                parse(text)


class TestRender:
    def test_spec_examples(self):
        assert render(Imp(p, Or(q, r))) == "p -> q | r"
        assert render(LayerConj(p, q)) == "p |> q"
        assert render(Bot()) == "bot"

    def test_round_trip_random(self):
        rng = random.Random(2024)
        for _ in range(300):
            f = random_formula(rng, 5)
            assert parse(render(f)) == f

    def test_nested_layer_parenthesized(self):
        f = LayerConj(LayerConj(p, q), r)
        assert render(f) == "(p |> q) |> r"
        assert parse(render(f)) == f

    def test_mixed_implication_parenthesized(self):
        f = Imp(p, ImpRight(q, r))
        assert render(f) == "p -> (q -|> r)"
        assert parse(render(f)) == f


class TestSubformulas:
    def test_atom(self):
        assert subformulas(p) == [p]

    def test_duplicates_collapse(self):
        assert subformulas(And(p, p)) == [p, And(p, p)]

    def test_postorder(self):
        f = Imp(p, Or(p, q))
        assert subformulas(f) == [p, q, Or(p, q), f]

    def test_count_bounded_by_nodes(self):
        rng = random.Random(5)
        for _ in range(100):
            f = random_formula(rng, 4)

            def nodes(g):
                if hasattr(g, "left"):
                    return 1 + nodes(g.left) + nodes(g.right)
                return 1

            assert len(subformulas(f)) <= nodes(f)

    def test_atoms(self):
        assert atoms(parse("p -> q | p")) == ["p", "q"]
