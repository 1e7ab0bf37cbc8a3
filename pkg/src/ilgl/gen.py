"""Seeded random generators for formulas, frames, scaffolds, and models.

Used by the crosscheck suites and the test sweeps; everything is driven by
an explicit random.Random so runs are reproducible from a seed.
"""

from __future__ import annotations

import random
from typing import Optional, Tuple

from .formula import (And, Atom, Bot, Formula, Imp, ImpLeft, ImpRight,
                      LayerConj, Or, Top)
from .graph import (DirectedGraph, LayeredGraphModel, OrderedScaffold,
                    Subgraph, check_admissible, closure_pairs, compose)
from .relational import IntLayeredFrame, RelationalModel

_BINARY = [And, Or, Imp, LayerConj, ImpRight, ImpLeft]


def random_formula(rng: random.Random, max_depth: int = 4,
                   atom_names: Tuple[str, ...] = ("p", "q", "r")) -> Formula:
    if max_depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.1:
            return Top()
        if roll < 0.2:
            return Bot()
        return Atom(rng.choice(atom_names))
    cls = rng.choice(_BINARY)
    return cls(random_formula(rng, max_depth - 1, atom_names),
               random_formula(rng, max_depth - 1, atom_names))


def random_preorder(rng: random.Random, n: int, density: float = 0.3
                    ) -> frozenset:
    pairs = [(i, j) for i in range(n) for j in range(n)
             if i != j and rng.random() < density]
    return frozenset(closure_pairs(pairs, range(n)))


def random_frame(rng: random.Random, worlds: int,
                 rel_size: Optional[int] = None) -> IntLayeredFrame:
    order = random_preorder(rng, worlds)
    k = rel_size if rel_size is not None else rng.randrange(worlds + 2)
    triples = [(rng.randrange(worlds), rng.randrange(worlds),
                rng.randrange(worlds)) for _ in range(k)]
    return IntLayeredFrame(worlds, order, frozenset(triples))


def _up_close(seed_worlds, order_pairs, n: int) -> frozenset:
    out = set(seed_worlds)
    changed = True
    while changed:
        changed = False
        for (i, j) in order_pairs:
            if i in out and j not in out:
                out.add(j)
                changed = True
    return frozenset(out)


def random_relational_model(rng: random.Random, worlds: int,
                            atom_names: Tuple[str, ...] = ("p", "q", "r")
                            ) -> RelationalModel:
    frame = random_frame(rng, worlds)
    valuation = {}
    for p in atom_names:
        seed = {w for w in range(worlds) if rng.random() < 0.4}
        valuation[p] = _up_close(seed, frame.order, worlds)
    return RelationalModel(frame, valuation)


def random_scaffold(rng: random.Random, max_attempts: int = 40
                    ) -> OrderedScaffold:
    """A random admissible ordered scaffold (retries until the
    admissibility repair loop converges small enough)."""
    for _ in range(max_attempts):
        scaffold = _try_scaffold(rng)
        if scaffold is not None and not check_admissible(scaffold):
            return scaffold
    raise RuntimeError("could not generate an admissible scaffold")


def _try_scaffold(rng: random.Random) -> Optional[OrderedScaffold]:
    n = rng.randrange(3, 7)
    names = [f"v{i}" for i in range(n)]
    edges = {(a, b) for a in names for b in names
             if a != b and rng.random() < 0.25}
    graph = DirectedGraph(frozenset(names), frozenset(edges))
    eset = frozenset(e for e in edges if rng.random() < 0.6)

    def sub(verts) -> Subgraph:
        vs = frozenset(verts)
        return Subgraph(vs, frozenset((a, b) for a, b in edges - eset
                                      if a in vs and b in vs), graph)

    pool = {}
    free = list(names)
    rng.shuffle(free)
    while free:
        take = min(len(free), rng.choice([1, 1, 2]))
        part, free = free[:take], free[take:]
        if rng.random() < 0.8:
            sg = sub(part)
            pool[sg.key()] = sg
    if not pool:
        return None
    # Close under composition and decomposition so the admissibility
    # biconditional has no witnesses against X.
    for _ in range(12):
        grown = False
        members = list(pool.values())
        if len(members) > 25:
            return None
        for h in members:
            for k in members:
                out = compose(h, k, eset)
                if out is not None and out.key() not in pool:
                    pool[out.key()] = out
                    grown = True
        from .graph import _all_decompositions
        for m in members:
            for h, k in _all_decompositions(m, eset):
                for part_sg in (h, k):
                    if part_sg.key() not in pool:
                        pool[part_sg.key()] = part_sg
                        grown = True
        if not grown:
            break
    else:
        return None
    subgraphs = sorted(pool.values(),
                       key=lambda s: (sorted(s.vertices), sorted(s.edges)))
    m = len(subgraphs)
    order_pairs = [(i, j) for i in range(m) for j in range(m)
                   if i != j and rng.random() < 0.15]
    return OrderedScaffold(graph, eset, subgraphs, frozenset(order_pairs))


def random_graph_model(rng: random.Random,
                       atom_names: Tuple[str, ...] = ("p", "q", "r")
                       ) -> LayeredGraphModel:
    scaffold = random_scaffold(rng)
    n = len(scaffold.subgraphs)
    valuation = {}
    for p in atom_names:
        seed = {w for w in range(n) if rng.random() < 0.4}
        valuation[p] = _up_close(seed, scaffold.order, n)
    return LayeredGraphModel(scaffold, valuation)
