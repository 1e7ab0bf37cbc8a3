"""Intuitionistic layered frames, relational satisfaction, and the
exhaustive small-frame validity oracle used to cross-check the prover.

Enumeration policy for the oracle: frames with at most 2 worlds are swept
over the full ternary-relation space; at 3 and 4 worlds the relation is
enumerated in (size, lex)-ascending order up to a size cap (default 2),
because the full space (2^27 and 2^64 relations per preorder) is out of
reach.  Counterexamples are therefore world-minimal, and "no
counterexample" always means none within the declared family.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

import numpy as np

from .formula import (And, Atom, Bot, Formula, Imp, ImpLeft, ImpRight,
                      LayerConj, Or, Top, atoms)
from .graph import OrderedScaffold, closure_pairs

Triple = Tuple[int, int, int]


@dataclass
class IntLayeredFrame:
    worlds: int
    order: FrozenSet[Tuple[int, int]]
    rel: FrozenSet[Triple]

    def __post_init__(self):
        self.order = frozenset(self.order)
        self.rel = frozenset(self.rel)

    def leq(self, i: int, j: int) -> bool:
        return (i, j) in self.order

    def validate(self) -> List[str]:
        problems = []
        rng = range(self.worlds)
        for i, j in self.order:
            if i not in rng or j not in rng:
                problems.append(f"order pair ({i},{j}) out of range")
        for t in self.rel:
            if any(w not in rng for w in t):
                problems.append(f"relation triple {t} out of range")
        for i in rng:
            if (i, i) not in self.order:
                problems.append(f"order not reflexive at {i}")
        for i, j in self.order:
            for k, l in self.order:
                if j == k and (i, l) not in self.order:
                    problems.append(f"order not transitive: "
                                    f"({i},{j}),({j},{l})")
        return problems

    def upsets(self) -> List[int]:
        """All up-closed world sets as bitmasks, ascending."""
        return _order_tables(self.worlds, self.order)[0]


@dataclass
class RelationalModel:
    frame: IntLayeredFrame
    valuation: Dict[str, FrozenSet[int]]

    def validate(self) -> List[str]:
        problems = self.frame.validate()
        for p, ws in sorted(self.valuation.items()):
            for i in ws:
                for j in range(self.frame.worlds):
                    if self.frame.leq(i, j) and j not in ws:
                        problems.append(
                            f"valuation of {p!r} not persistent: "
                            f"{i} <= {j}")
        return problems


def scaffold_to_frame(scaffold: OrderedScaffold) -> IntLayeredFrame:
    """Frame on X with R(i,j,k) iff X[i] @ X[j] is defined and equals X[k]."""
    n = len(scaffold.subgraphs)
    rel = {(i, j, m) for (i, j), m in scaffold._comp.items()
           if m is not None}
    return IntLayeredFrame(n, scaffold.order, frozenset(rel))


class _RelEvaluator:
    def __init__(self, model: RelationalModel):
        self.model = model
        self.frame = model.frame
        self.memo: Dict[Tuple[int, Formula], bool] = {}

    def sat(self, w: int, f: Formula) -> bool:
        key = (w, f)
        if key not in self.memo:
            self.memo[key] = self._sat(w, f)
        return self.memo[key]

    def _sat(self, w: int, f: Formula) -> bool:
        fr = self.frame
        if isinstance(f, Atom):
            return w in self.model.valuation.get(f.name, frozenset())
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, And):
            return self.sat(w, f.left) and self.sat(w, f.right)
        if isinstance(f, Or):
            return self.sat(w, f.left) or self.sat(w, f.right)
        if isinstance(f, Imp):
            return all(self.sat(v, f.right)
                       for v in range(fr.worlds)
                       if fr.leq(w, v) and self.sat(v, f.left))
        if isinstance(f, LayerConj):
            return any(fr.leq(x, w)
                       and self.sat(y, f.left) and self.sat(z, f.right)
                       for y, z, x in fr.rel)
        if isinstance(f, ImpRight):
            return all(self.sat(z, f.right)
                       for y, k, z in fr.rel
                       if fr.leq(w, y) and self.sat(k, f.left))
        if isinstance(f, ImpLeft):
            return all(self.sat(z, f.right)
                       for k, y, z in fr.rel
                       if fr.leq(w, y) and self.sat(k, f.left))
        raise TypeError(f"not a formula: {f!r}")


def rel_satisfies(model: RelationalModel, world: int, f: Formula) -> bool:
    return _RelEvaluator(model).sat(world, f)


def rel_valid_in_model(model: RelationalModel, f: Formula) -> bool:
    ev = _RelEvaluator(model)
    return all(ev.sat(w, f) for w in range(model.frame.worlds))


# -- frame enumeration ---------------------------------------------------

def enumerate_preorders(n: int) -> List[FrozenSet[Tuple[int, int]]]:
    """All preorders on n elements, as closures of all binary relations,
    deduplicated; ordered by (size, sorted pairs)."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    seen = set()
    for bits in range(2 ** len(pairs)):
        base = [p for b, p in enumerate(pairs) if bits >> b & 1]
        seen.add(frozenset(closure_pairs(base, range(n))))
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def _triples(n: int) -> List[Triple]:
    return [(y, z, x) for y in range(n) for z in range(n) for x in range(n)]


def _rel_subsets(n: int, max_size: Optional[int]) -> Iterator[FrozenSet]:
    """Subsets of the triple space in (size, lex) order."""
    triples = _triples(n)
    top = len(triples) if max_size is None else min(max_size, len(triples))
    for size in range(top + 1):
        for combo in itertools.combinations(triples, size):
            yield frozenset(combo)


def enumerate_frames(max_worlds: int,
                     max_rel_size: Optional[int] = None
                     ) -> Iterator[IntLayeredFrame]:
    """Every frame with up to ``max_worlds`` worlds, smallest first.

    ``max_rel_size`` caps the ternary relation's size; None means the full
    space (only viable below 3 worlds).
    """
    if max_worlds < 1:
        raise ValueError("need at least one world")
    for n in range(1, max_worlds + 1):
        for order in enumerate_preorders(n):
            for rel in _rel_subsets(n, max_rel_size):
                yield IntLayeredFrame(n, order, rel)


DEFAULT_REL_CAPS = {1: None, 2: None, 3: 2, 4: 2}


def oracle_frames(max_worlds: int,
                  rel_caps: Optional[Dict[int, Optional[int]]] = None
                  ) -> Iterator[IntLayeredFrame]:
    """The frame family the validity oracle sweeps (see module docstring)."""
    caps = dict(DEFAULT_REL_CAPS)
    if rel_caps:
        caps.update(rel_caps)
    for n in range(1, max_worlds + 1):
        cap = caps.get(n, 2)
        for order in enumerate_preorders(n):
            for rel in _rel_subsets(n, cap):
                yield IntLayeredFrame(n, order, rel)


# Complex-algebra operation tables, used both by the algebra module and by
# the oracle below (frames sharing tables are interchangeable for validity).

def _order_tables(n: int, order) -> tuple:
    """Order-only part of the complex algebra: up-sets, principal up-set
    masks, and the meet/join/himp tables."""
    leq = lambda i, j: (i, j) in order
    up_of = [sum(1 << y for y in range(n) if leq(x, y)) for x in range(n)]
    closed = {0}
    frontier = set(up_of) - closed
    while frontier:  # close the principal up-sets under union
        closed |= frontier
        frontier = {a | b for a in closed for b in closed} - closed
    ups = sorted(closed)
    index = {m: i for i, m in enumerate(ups)}
    u = len(ups)
    meet = [[index[ups[a] & ups[b]] for b in range(u)] for a in range(u)]
    join = [[index[ups[a] | ups[b]] for b in range(u)] for a in range(u)]
    himp = []
    for a in range(u):
        ma = ups[a]
        row = []
        for b in range(u):
            mb = ups[b]
            h = 0
            for x in range(n):
                if up_of[x] & ma & ~mb == 0:
                    h |= 1 << x
            row.append(index[h])
        himp.append(row)
    return ups, index, up_of, meet, join, himp


def _layer_tables(n: int, rel, ups, index, up_of) -> tuple:
    """Relation-dependent part: the lconj/rres/lres tables."""
    u = len(ups)
    rel = sorted(rel)
    lconj = [[0] * u for _ in range(u)]
    rres = [[0] * u for _ in range(u)]
    lres = [[0] * u for _ in range(u)]
    for a in range(u):
        ma = ups[a]
        for b in range(u):
            mb = ups[b]
            lc = 0
            for (y, z, x) in rel:
                if ma >> y & 1 and mb >> z & 1:
                    lc |= up_of[x]
            lconj[a][b] = index[lc]
            rr = 0
            lr = 0
            for x in range(n):
                ux = up_of[x]
                if all(not (ux >> w & 1 and ma >> y & 1) or mb >> z & 1
                       for (w, y, z) in rel):
                    rr |= 1 << x
                if all(not (ux >> w & 1 and ma >> y & 1) or mb >> z & 1
                       for (y, w, z) in rel):
                    lr |= 1 << x
            rres[a][b] = index[rr]
            lres[a][b] = index[lr]
    return lconj, rres, lres


def frame_tables(frame: IntLayeredFrame) -> tuple:
    """(upsets, ops) where upsets are bitmasks and ops maps each binary
    operation name to a square table over up-set indices."""
    ups, index, up_of, meet, join, himp = _order_tables(
        frame.worlds, frame.order)
    lconj, rres, lres = _layer_tables(frame.worlds, frame.rel, ups, index,
                                      up_of)
    ops = {"meet": meet, "join": join, "himp": himp,
           "lconj": lconj, "rres": rres, "lres": lres}
    return ups, ops


def _eval_in_tables(f: Formula, ups, ops, assignment: Dict[str, int],
                    bot_i: int, top_i: int) -> int:
    if isinstance(f, Atom):
        return assignment.get(f.name, bot_i)
    if isinstance(f, Top):
        return top_i
    if isinstance(f, Bot):
        return bot_i
    a = _eval_in_tables(f.left, ups, ops, assignment, bot_i, top_i)
    b = _eval_in_tables(f.right, ups, ops, assignment, bot_i, top_i)
    table = {And: "meet", Or: "join", Imp: "himp", LayerConj: "lconj",
             ImpRight: "rres", ImpLeft: "lres"}[type(f)]
    return ops[table][a][b]


@dataclass
class Counterexample:
    frame: IntLayeredFrame
    valuation: Dict[str, FrozenSet[int]]
    world: int

    def model(self) -> RelationalModel:
        return RelationalModel(self.frame, self.valuation)


def _mask_worlds(mask: int, n: int) -> FrozenSet[int]:
    return frozenset(w for w in range(n) if mask >> w & 1)


def _step_entries(n: int, cap: Optional[int]) -> Iterator[tuple]:
    """(frame, upsets, ops, fingerprint) for one world-count step.

    The order-only tables are computed once per preorder; each relation
    only pays for the three layering tables.
    """
    for order in enumerate_preorders(n):
        ups, index, up_of, meet, join, himp = _order_tables(n, order)
        base_fp = tuple(ups)
        for rel in _rel_subsets(n, cap):
            lconj, rres, lres = _layer_tables(n, rel, ups, index, up_of)
            ops = {"meet": meet, "join": join, "himp": himp,
                   "lconj": lconj, "rres": rres, "lres": lres}
            fp = (base_fp,
                  tuple(map(tuple, lconj)), tuple(map(tuple, rres)),
                  tuple(map(tuple, lres)))
            yield IntLayeredFrame(n, order, rel), ups, ops, fp


class _StackedStep:
    """Distinct algebras of one step, stacked for vectorized evaluation.

    Frames sharing operation tables are interchangeable for validity, so
    only the first frame per distinct table set is kept; ``position``
    remembers its place in the enumeration order so the counterexample
    reported is still the overall first.
    """

    def __init__(self, n: int, cap: Optional[int]):
        self.entries = []  # (position, frame, ups)
        seen: Dict[tuple, int] = {}
        raw = []
        for pos, (frame, ups, ops, fp) in enumerate(_step_entries(n, cap)):
            if fp in seen:
                continue
            seen[fp] = pos
            self.entries.append((pos, frame, ups))
            raw.append(ops)
        self.groups: Dict[int, dict] = {}
        for idx, (pos, frame, ups) in enumerate(self.entries):
            self.groups.setdefault(len(ups), {"indices": []})
            self.groups[len(ups)]["indices"].append(idx)
        for u, group in self.groups.items():
            idxs = group["indices"]
            group["tables"] = {
                name: np.array([raw[i][name] for i in idxs], dtype=np.int16)
                for name in ("meet", "join", "himp", "lconj", "rres",
                             "lres")}


class _OracleCache:
    """Lazily built steps of the oracle frame family.

    Small steps (up to 3 worlds, or 4 worlds with a thin relation cap)
    are deduplicated, stacked, and cached for the life of the process
    because validity sweeps exhaust them repeatedly; anything larger is
    streamed fresh each time to keep memory flat.
    """

    def __init__(self):
        self.stacked: Dict[tuple, _StackedStep] = {}

    @staticmethod
    def stackable(n: int, cap: Optional[int]) -> bool:
        return n <= 3 or (cap is not None and cap <= 1)

    def stacked_step(self, n: int, cap: Optional[int]) -> _StackedStep:
        key = (n, cap)
        if key not in self.stacked:
            self.stacked[key] = _StackedStep(n, cap)
        return self.stacked[key]


_CACHE = _OracleCache()


_OP_NAME = {And: "meet", Or: "join", Imp: "himp", LayerConj: "lconj",
            ImpRight: "rres", ImpLeft: "lres"}


def _postfix(f: Formula) -> list:
    out = []

    def walk(g: Formula) -> None:
        if isinstance(g, (And, Or, Imp, LayerConj, ImpRight, ImpLeft)):
            walk(g.left)
            walk(g.right)
        out.append(g)

    walk(f)
    return out


def _scan_stacked(f: Formula, names: list, step: _StackedStep, n: int
                  ) -> Optional[Counterexample]:
    """Evaluate ``f`` over every (algebra, assignment) of a stacked step at
    once; returns the counterexample earliest in enumeration order."""
    k = len(names)
    postfix = _postfix(f)
    best = None  # (position, frame, ups, assignment index, value index)
    for u in sorted(step.groups):
        group = step.groups[u]
        tables = group["tables"]
        a_count = len(group["indices"])
        count = u ** k
        rows = np.arange(a_count)[:, None]
        atom_vec = {
            name: np.broadcast_to(
                (np.arange(count) // u ** (k - 1 - m)) % u,
                (a_count, count))
            for m, name in enumerate(names)}
        stack = []
        for g in postfix:
            if isinstance(g, Atom):
                stack.append(atom_vec.get(
                    g.name, np.zeros((a_count, count), dtype=np.int64)))
            elif isinstance(g, Top):
                stack.append(np.full((a_count, count), u - 1,
                                     dtype=np.int64))
            elif isinstance(g, Bot):
                stack.append(np.zeros((a_count, count), dtype=np.int64))
            else:
                vb = stack.pop()
                va = stack.pop()
                stack.append(tables[_OP_NAME[type(g)]][rows, va, vb]
                             .astype(np.int64))
        result = stack.pop()
        failing = result != (u - 1)
        if failing.any():
            for row in np.flatnonzero(failing.any(axis=1)):
                idx = group["indices"][int(row)]
                position, frame, ups = step.entries[idx]
                if best is None or position < best[0]:
                    t = int(np.flatnonzero(failing[row])[0])
                    value = int(result[row, t])
                    best = (position, frame, ups, t, value)
    if best is None:
        return None
    position, frame, ups, t, value = best
    u = len(ups)
    digits = []
    for m in range(k):
        digits.append((t // u ** (k - 1 - m)) % u)
    valuation = {p: _mask_worlds(ups[d], n) for p, d in zip(names, digits)}
    mask = ups[value]
    world = next(w for w in range(n) if not mask >> w & 1)
    return Counterexample(frame, valuation, world)


def rel_valid_upto(f: Formula, max_worlds: int, max_atoms: int,
                   rel_caps: Optional[Dict[int, Optional[int]]] = None
                   ) -> Optional[Counterexample]:
    """First countermodel of ``f`` in the oracle family, None if it survives.

    Search order is world count, then preorder, then relation (size, lex),
    then valuation; the result is schedule-independent.
    """
    names = atoms(f)
    if len(names) > max_atoms:
        raise ValueError(f"{len(names)} atoms exceed the limit {max_atoms}")
    caps = dict(DEFAULT_REL_CAPS)
    if rel_caps:
        caps.update(rel_caps)
    for n in range(1, max_worlds + 1):
        cap = caps.get(n, 2)
        if _CACHE.stackable(n, cap):
            hit = _scan_stacked(f, names, _CACHE.stacked_step(n, cap), n)
            if hit is not None:
                return hit
            continue
        verified: set = set()
        for frame, ups, ops, fp in _step_entries(n, cap):
            if fp in verified:
                continue
            u = len(ups)
            bot_i, top_i = 0, u - 1
            hit = None
            for combo in itertools.product(range(u), repeat=len(names)):
                assignment = dict(zip(names, combo))
                val = _eval_in_tables(f, ups, ops, assignment, bot_i, top_i)
                if val != top_i:
                    mask = ups[val]
                    world = next(w for w in range(n) if not mask >> w & 1)
                    hit = Counterexample(
                        frame,
                        {p: _mask_worlds(ups[assignment[p]], n)
                         for p in names},
                        world)
                    break
            if hit is not None:
                return hit
            verified.add(fp)
    return None


# -- JSON frame format ---------------------------------------------------

def frame_to_dict(model: RelationalModel) -> dict:
    return {
        "worlds": model.frame.worlds,
        "order": sorted(map(list, model.frame.order)),
        "rel": sorted(map(list, model.frame.rel)),
        "valuation": {p: sorted(ws)
                      for p, ws in sorted(model.valuation.items())},
    }


def frame_from_dict(data: dict) -> RelationalModel:
    n = int(data["worlds"])
    order = closure_pairs([(int(i), int(j)) for i, j in data.get("order", [])],
                          range(n))
    frame = IntLayeredFrame(
        n, frozenset(order),
        frozenset((int(y), int(z), int(x))
                  for y, z, x in data.get("rel", [])))
    valuation = {p: frozenset(int(i) for i in ws)
                 for p, ws in data.get("valuation", {}).items()}
    return RelationalModel(frame, valuation)


def load_frame(path: str) -> RelationalModel:
    with open(path) as fh:
        return frame_from_dict(json.load(fh))
