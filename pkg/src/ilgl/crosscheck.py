"""Batch cross-validation suites tying the prover and the three
satisfaction relations together.

Each suite runs a seeded sweep and returns (ok, summary, repro): on
failure ``repro`` is a JSON-ready reproduction of the first (shrunk where
possible) failing instance.
"""

from __future__ import annotations

import random
from typing import Callable, Optional, Tuple

from . import algebra as algmod
from . import gen
from . import graph as graphmod
from . import relational as relmod
from . import tableaux
from .formula import Formula, render, subformulas
from .predicate import (Contains, Exists, Forall, LinkGraphSpec, PointsTo,
                        build_bigraph_scaffold, enumerate_upsets,
                        pred_satisfies)

SUITES = ("soundness", "persistence", "residuation", "representation",
          "fep", "oracle-agreement")


def _shrink_formula(f: Formula, failing: Callable[[Formula], bool]) -> Formula:
    """Greedily descend to a smallest failing subformula."""
    current = f
    progress = True
    while progress:
        progress = False
        for sub in subformulas(current)[:-1]:
            if failing(sub):
                current = sub
                progress = True
                break
    return current


def suite_soundness(seed: int, budget: int) -> Tuple[bool, dict, Optional[dict]]:
    """Proved formulas must survive the relational oracle and hold in
    random layered graph models."""
    rng = random.Random(seed)
    proved = refuted = unknown = 0
    models = [gen.random_graph_model(random.Random(seed + i))
              for i in range(50)]
    for i in range(budget):
        f = gen.random_formula(rng, 4)
        result = tableaux.prove(f)
        if result.status == "countermodel":
            refuted += 1
            continue
        if result.status == "unknown":
            unknown += 1
            continue
        proved += 1
        cex = relmod.rel_valid_upto(f, 3, 3)
        if cex is not None:
            bad = _shrink_formula(
                f, lambda g: (tableaux.prove(g).status == "proved"
                              and relmod.rel_valid_upto(g, 3, 3) is not None))
            return False, {"checked": i + 1}, {
                "suite": "soundness", "formula": render(bad),
                "counterexample": relmod.frame_to_dict(cex.model()),
                "world": cex.world}
        for j, model in enumerate(models):
            if not graphmod.valid_in_model(model, f):
                return False, {"checked": i + 1}, {
                    "suite": "soundness", "formula": render(f),
                    "model": graphmod.model_to_dict(model), "index": j}
    return True, {"formulas": budget, "proved": proved, "refuted": refuted,
                  "unknown": unknown}, None


def _bigraph_fixture():
    """Two composed bigraphs, small enough for quantifier sweeps."""
    forests = [{"a1": None, "a2": "a1"}, {"b1": None}]
    links = [LinkGraphSpec(nodes=["a1", "a2"], inner=[], outer=["x"],
                           hyperedges=[["a1", "a2", "x"]]),
             LinkGraphSpec(nodes=["b1"], inner=["x_in"], outer=[],
                           hyperedges=[["x_in", "b1"]], targets=["b1"])]
    return build_bigraph_scaffold(forests, links, [("x", "x_in")],
                                  resources=["r1", "r2"])


def suite_persistence(seed: int, budget: int
                      ) -> Tuple[bool, dict, Optional[dict]]:
    """Satisfaction is upward closed along the order, in all three
    semantics."""
    rng = random.Random(seed)
    checked = 0
    for i in range(budget):
        model = gen.random_graph_model(rng)
        f = gen.random_formula(rng, 3)
        n = model.world_count()
        for a in range(n):
            for b in range(n):
                if (model.scaffold.leq(a, b)
                        and graphmod.satisfies(model, a, f)
                        and not graphmod.satisfies(model, b, f)):
                    return False, {"checked": checked}, {
                        "suite": "persistence", "semantics": "graph",
                        "formula": render(f), "below": a, "above": b,
                        "model": graphmod.model_to_dict(model)}
                checked += 1
        rmodel = gen.random_relational_model(rng, rng.randrange(1, 5))
        g = gen.random_formula(rng, 3)
        for a in range(rmodel.frame.worlds):
            for b in range(rmodel.frame.worlds):
                if (rmodel.frame.leq(a, b)
                        and relmod.rel_satisfies(rmodel, a, g)
                        and not relmod.rel_satisfies(rmodel, b, g)):
                    return False, {"checked": checked}, {
                        "suite": "persistence", "semantics": "relational",
                        "formula": render(g),
                        "model": relmod.frame_to_dict(rmodel),
                        "below": a, "above": b}
                checked += 1
    rm = _bigraph_fixture()
    upsets = list(enumerate_upsets(rm.placement))
    pformulas = [Contains("r1"), PointsTo("r1", "r2"),
                 Exists("s", Contains("s")),
                 Forall("s", Contains("s"))]
    rng2 = random.Random(seed + 1)
    n = rm.model.world_count()
    for _ in range(min(budget, 60)):
        s = {"r1": rng2.choice(upsets), "r2": rng2.choice(upsets)}
        pf = rng2.choice(pformulas)
        for a in range(n):
            for b in range(n):
                if (rm.model.scaffold.leq(a, b)
                        and pred_satisfies(rm, s, a, pf)
                        and not pred_satisfies(rm, s, b, pf)):
                    return False, {"checked": checked}, {
                        "suite": "persistence", "semantics": "predicate",
                        "world_below": a, "world_above": b}
                checked += 1
    return True, {"pairs": checked}, None


def suite_residuation(seed: int, budget: int
                      ) -> Tuple[bool, dict, Optional[dict]]:
    """Derived residuated-structure laws on complex algebras of random
    frames: monotonicity, bottom absorption, unit laws, join distribution."""
    rng = random.Random(seed)
    for i in range(budget):
        frame = gen.random_frame(rng, rng.randrange(1, 5))
        alg = algmod.complex_algebra(frame)
        issues = algmod.validate_algebra(alg)
        if issues:
            return False, {"checked": i}, {
                "suite": "residuation", "frame": {
                    "worlds": frame.worlds,
                    "order": sorted(map(list, frame.order)),
                    "rel": sorted(map(list, frame.rel))},
                "issues": issues[:5]}
        n = alg.size
        for a in range(n):
            for b in range(n):
                if alg.lconj[alg.bot][a] != alg.bot \
                        or alg.lconj[a][alg.bot] != alg.bot:
                    return False, {}, {"suite": "residuation",
                                       "law": "bottom absorption"}
                if alg.rres[a][alg.top] != alg.top \
                        or alg.lres[a][alg.top] != alg.top \
                        or alg.rres[alg.bot][a] != alg.top \
                        or alg.lres[alg.bot][a] != alg.top:
                    return False, {}, {"suite": "residuation",
                                       "law": "unit laws"}
                for a2 in range(n):
                    for b2 in range(n):
                        if alg.le(a, a2) and alg.le(b, b2) and not alg.le(
                                alg.lconj[a][b], alg.lconj[a2][b2]):
                            return False, {}, {"suite": "residuation",
                                               "law": "monotonicity"}
                        join_ab = alg.join[a][a2]
                        lhs = alg.lconj[join_ab][alg.join[b][b2]]
                        rhs = alg.join[
                            alg.join[alg.lconj[a][b]][alg.lconj[a][b2]]][
                            alg.join[alg.lconj[a2][b]][alg.lconj[a2][b2]]]
                        if lhs != rhs:
                            return False, {}, {"suite": "residuation",
                                               "law": "join distribution"}
    return True, {"algebras": budget}, None


def suite_representation(seed: int, budget: int
                         ) -> Tuple[bool, dict, Optional[dict]]:
    """The prime-filter embedding verifies on random complex algebras."""
    rng = random.Random(seed)
    for i in range(budget):
        frame = gen.random_frame(rng, rng.randrange(1, 4))
        alg = algmod.complex_algebra(frame)
        _, report = algmod.representation_embed(alg)
        if report:
            return False, {"checked": i}, {
                "suite": "representation", "size": alg.size,
                "report": report[:5],
                "algebra": algmod.algebra_to_dict(alg)}
    return True, {"algebras": budget}, None


def suite_fep(seed: int, budget: int) -> Tuple[bool, dict, Optional[dict]]:
    """Finite embeddability completions validate and embed."""
    rng = random.Random(seed)
    for i in range(budget):
        frame = gen.random_frame(rng, rng.randrange(1, 4))
        alg = algmod.complex_algebra(frame)
        if alg.size > 8:
            continue
        size = rng.randrange(1, 5)
        subset = sorted(rng.sample(range(alg.size),
                                   min(size, alg.size)))
        _, _, report = algmod.fep_complete(alg, subset)
        if report:
            return False, {"checked": i}, {
                "suite": "fep", "subset": subset, "report": report[:5],
                "algebra": algmod.algebra_to_dict(alg)}
    return True, {"completions": budget}, None


def suite_oracle_agreement(seed: int, budget: int
                           ) -> Tuple[bool, dict, Optional[dict]]:
    """Graph satisfaction == relational satisfaction on converted
    scaffolds; relational == complex-algebra interpretation."""
    rng = random.Random(seed)
    for i in range(budget):
        model = gen.random_graph_model(rng)
        frame = relmod.scaffold_to_frame(model.scaffold)
        rmodel = relmod.RelationalModel(frame, model.valuation)
        f = gen.random_formula(rng, 3)
        for w in range(model.world_count()):
            if (graphmod.satisfies(model, w, f)
                    != relmod.rel_satisfies(rmodel, w, f)):
                return False, {"checked": i}, {
                    "suite": "oracle-agreement", "kind": "graph/relational",
                    "formula": render(f), "world": w,
                    "model": graphmod.model_to_dict(model)}
        small = gen.random_relational_model(rng, rng.randrange(1, 5))
        g = gen.random_formula(rng, 3)
        if not algmod.algebra_satisfaction_agrees(small, g):
            return False, {"checked": i}, {
                "suite": "oracle-agreement", "kind": "algebra/relational",
                "formula": render(g), "model": relmod.frame_to_dict(small)}
    return True, {"instances": budget}, None


_DEFAULT_BUDGETS = {
    "soundness": 200, "persistence": 150, "residuation": 60,
    "representation": 60, "fep": 60, "oracle-agreement": 150,
}

_RUNNERS = {
    "soundness": suite_soundness,
    "persistence": suite_persistence,
    "residuation": suite_residuation,
    "representation": suite_representation,
    "fep": suite_fep,
    "oracle-agreement": suite_oracle_agreement,
}


def run_suite(name: str, seed: int = 0, budget: Optional[int] = None
              ) -> Tuple[bool, dict, Optional[dict]]:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from "
                         f"{', '.join(SUITES)}")
    return _RUNNERS[name](seed, budget or _DEFAULT_BUDGETS[name])
