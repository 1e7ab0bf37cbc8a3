import json
import random

import pytest

from ilgl.formula import parse
from ilgl.gen import random_formula, random_graph_model
from ilgl.graph import (DirectedGraph, LayeredGraphModel, OrderedScaffold,
                        Subgraph, check_admissible, check_persistent,
                        compose, model_from_dict, model_to_dict, reaches,
                        satisfies, valid_in_model, validate_model)


def g(vertices, edges):
    return DirectedGraph(frozenset(vertices),
                         frozenset(tuple(e) for e in edges))


PARENT = g(["1", "2", "3", "4"], [("1", "2"), ("3", "4"), ("2", "3"),
                                  ("3", "2")])


def sub(vertices, edges=()):
    return Subgraph(frozenset(vertices),
                    frozenset(tuple(e) for e in edges), PARENT)


class TestReaches:
    def test_direct_edge(self):
        h, k = sub(["1", "2"]), sub(["3", "4"])
        assert reaches(h, k, frozenset([("2", "3")]))

    def test_wrong_direction(self):
        h, k = sub(["1", "2"]), sub(["3", "4"])
        assert not reaches(h, k, frozenset([("3", "2")]))

    def test_empty_eset(self):
        h, k = sub(["1", "2"]), sub(["3", "4"])
        assert not reaches(h, k, frozenset())

    def test_parent_mismatch(self):
        other = g(["1"], [])
        with pytest.raises(ValueError):
            reaches(sub(["1"]), Subgraph(frozenset(["1"]), frozenset(),
                                         other), frozenset())


class TestCompose:
    def test_defined(self):
        h = sub(["1", "2"], [("1", "2")])
        k = sub(["3", "4"], [("3", "4")])
        out = compose(h, k, frozenset([("2", "3")]))
        assert out is not None
        assert out.vertices == frozenset(["1", "2", "3", "4"])
        assert out.edges == frozenset([("1", "2"), ("3", "4"), ("2", "3")])

    def test_reverse_undefined(self):
        h = sub(["1", "2"], [("1", "2")])
        k = sub(["3", "4"], [("3", "4")])
        assert compose(k, h, frozenset([("2", "3")])) is None

    def test_overlap_undefined(self):
        assert compose(sub(["1"]), sub(["1", "2"]), frozenset()) is None

    def test_noncommutative_everywhere(self):
        rng = random.Random(1)
        for _ in range(50):
            model = random_graph_model(rng)
            sc = model.scaffold
            for h in sc.subgraphs:
                for k in sc.subgraphs:
                    if compose(h, k, sc.eset) is not None:
                        assert compose(k, h, sc.eset) is None

    def test_output_well_formed(self):
        rng = random.Random(2)
        for _ in range(30):
            model = random_graph_model(rng)
            sc = model.scaffold
            for h in sc.subgraphs:
                for k in sc.subgraphs:
                    out = compose(h, k, sc.eset)
                    if out is not None:
                        assert out.parent is h.parent
                        assert out.vertices <= sc.graph.vertices


def scaffold_hk():
    """H, K, H@K over the shared parent."""
    eset = frozenset([("2", "3")])
    h = sub(["1", "2"], [("1", "2")])
    k = sub(["3", "4"], [("3", "4")])
    hk = compose(h, k, eset)
    return h, k, hk, eset


class TestAdmissibility:
    def test_closed_triple_valid(self):
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [h, k, hk], frozenset())
        assert check_admissible(sc) == []

    def test_missing_composition(self):
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [h, k], frozenset())
        report = check_admissible(sc)
        assert any(v["direction"] == "composition missing from X"
                   for v in report)

    def test_missing_components(self):
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [hk], frozenset())
        report = check_admissible(sc)
        assert any(v["direction"] == "component missing from X"
                   for v in report)

    def test_exhaustive_matches_default_on_small(self):
        h, k, hk, eset = scaffold_hk()
        good = OrderedScaffold(PARENT, eset, [h, k, hk], frozenset())
        assert check_admissible(good, exhaustive=True) == []
        bad = OrderedScaffold(PARENT, eset, [hk], frozenset())
        assert check_admissible(bad, exhaustive=True) != []


class TestPersistence:
    def test_valid_chain(self):
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [h, k, hk],
                             frozenset([(0, 1)]))
        model = LayeredGraphModel(sc, {"p": frozenset([0, 1])})
        assert check_persistent(model) == []

    def test_violation_reported(self):
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [h, k, hk],
                             frozenset([(0, 1)]))
        model = LayeredGraphModel(sc, {"p": frozenset([0])})
        assert ("p", 0, 1) in check_persistent(model)

    def test_empty_valuation(self):
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [h, k, hk], frozenset([(0, 1)]))
        assert check_persistent(LayeredGraphModel(sc, {})) == []


class TestSatisfaction:
    def model(self):
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [h, k, hk], frozenset())
        return LayeredGraphModel(sc, {"p": frozenset([0]),
                                      "q": frozenset([1])})

    def test_top_bot(self):
        m = self.model()
        for w in range(3):
            assert satisfies(m, w, parse("top"))
            assert not satisfies(m, w, parse("bot"))

    def test_layer_conj_at_composition(self):
        # world 2 is H@K, p holds at H and q at K
        assert satisfies(self.model(), 2, parse("p |> q"))
        assert not satisfies(self.model(), 2, parse("q |> p"))

    def test_layer_conj_needs_decomposition(self):
        single = Subgraph(frozenset(["1"]), frozenset(), PARENT)
        sc = OrderedScaffold(PARENT, frozenset(), [single], frozenset())
        m = LayeredGraphModel(sc, {"p": frozenset([0]),
                                   "q": frozenset([0])})
        assert not satisfies(m, 0, parse("p |> q"))

    def test_unknown_atom_is_empty(self):
        assert not satisfies(self.model(), 0, parse("zzz"))

    def test_valid_in_model(self):
        m = self.model()
        assert valid_in_model(m, parse("top"))
        assert valid_in_model(m, parse("p -> p"))
        assert not valid_in_model(m, parse("p"))

    def test_residuation_bridge(self):
        # p -|> q at H says: composing H (raised) with p-stuff yields q.
        h, k, hk, eset = scaffold_hk()
        sc = OrderedScaffold(PARENT, eset, [h, k, hk], frozenset())
        m = LayeredGraphModel(sc, {"p": frozenset([1]),
                                   "q": frozenset([2])})
        assert satisfies(m, 0, parse("p -|> q"))
        m2 = LayeredGraphModel(sc, {"p": frozenset([1])})
        assert not satisfies(m2, 0, parse("p -|> q"))
        # p <|- q at K says: p-stuff composed with K (raised) yields q.
        m3 = LayeredGraphModel(sc, {"p": frozenset([0]),
                                    "q": frozenset([2])})
        assert satisfies(m3, 1, parse("p <|- q"))
        m4 = LayeredGraphModel(sc, {"p": frozenset([0])})
        assert not satisfies(m4, 1, parse("p <|- q"))


class TestPersistenceLemma:
    def test_random_sweep(self):
        rng = random.Random(99)
        for _ in range(150):
            model = random_graph_model(rng)
            f = random_formula(rng, 3)
            n = model.world_count()
            for a in range(n):
                if not satisfies(model, a, f):
                    continue
                for b in range(n):
                    if model.scaffold.leq(a, b):
                        assert satisfies(model, b, f)


class TestModelJson:
    def test_round_trip(self):
        rng = random.Random(4)
        for _ in range(20):
            model = random_graph_model(rng)
            data = json.loads(json.dumps(model_to_dict(model)))
            back = model_from_dict(data)
            assert model_to_dict(back) == model_to_dict(model)
            assert validate_model(back) == []

    def test_order_generators_closed(self):
        h, k, hk, eset = scaffold_hk()
        data = {
            "vertices": sorted(PARENT.vertices),
            "edges": sorted(map(list, PARENT.edges)),
            "eset": sorted(map(list, eset)),
            "X": [{"vertices": sorted(s.vertices),
                   "edges": sorted(map(list, s.edges))}
                  for s in (h, k, hk)],
            "order": [[0, 1], [1, 2]],
            "valuation": {},
        }
        model = model_from_dict(data)
        assert model.scaffold.leq(0, 2)  # transitive
        assert model.scaffold.leq(0, 0)  # reflexive

    def test_bad_valuation_rejected(self):
        h, k, hk, eset = scaffold_hk()
        data = model_to_dict(LayeredGraphModel(
            OrderedScaffold(PARENT, eset, [h, k, hk], frozenset()), {}))
        data["valuation"] = {"p": [7]}
        with pytest.raises(ValueError):
            model_from_dict(data)
