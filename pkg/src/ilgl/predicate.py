"""Finite-instance model checking for predicate ILGL over bigraph resource
models: Contains / points-to atoms and intuitionistic quantifiers ranging
over up-closed vertex sets of the placement order.

The quantifier domain is fully enumerated, so models are capped at 14
placement vertices (16384 up-sets worst case).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple, Union

from .graph import (DirectedGraph, LayeredGraphModel, OrderedScaffold,
                    Subgraph, closure_pairs, compose)

MAX_PLACEMENT_VERTICES = 14


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Contains:
    resource: str


@dataclass(frozen=True)
class PointsTo:
    source: str
    target: str


@dataclass(frozen=True)
class And:
    left: "PredFormula"
    right: "PredFormula"


@dataclass(frozen=True)
class Or:
    left: "PredFormula"
    right: "PredFormula"


@dataclass(frozen=True)
class Imp:
    left: "PredFormula"
    right: "PredFormula"


@dataclass(frozen=True)
class LayerConj:
    left: "PredFormula"
    right: "PredFormula"


@dataclass(frozen=True)
class ImpRight:
    left: "PredFormula"
    right: "PredFormula"


@dataclass(frozen=True)
class ImpLeft:
    left: "PredFormula"
    right: "PredFormula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "PredFormula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "PredFormula"


PredFormula = Union[Top, Bot, Contains, PointsTo, And, Or, Imp, LayerConj,
                    ImpRight, ImpLeft, Exists, Forall]

_BINARY = (And, Or, Imp, LayerConj, ImpRight, ImpLeft)
_QUANT = (Exists, Forall)


def free_resources(f: PredFormula) -> Set[str]:
    if isinstance(f, Contains):
        return {f.resource}
    if isinstance(f, PointsTo):
        return {f.source, f.target}
    if isinstance(f, _BINARY):
        return free_resources(f.left) | free_resources(f.right)
    if isinstance(f, _QUANT):
        return free_resources(f.body) - {f.var}
    return set()


# -- concrete syntax -------------------------------------------------------

class PredParseError(Exception):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


_TOKEN_RE = re.compile(
    r"\s*(Contains\b|exists\b|forall\b|top\b|bot\b|~>|-\|>|<\|-|\|>|->"
    r"|[&|().]|[a-z][a-zA-Z0-9_]*)")

_IMP_OPS = {"->": Imp, "-|>": ImpRight, "<|-": ImpLeft}


def _pred_tokens(text: str) -> List[Tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise PredParseError(f"unexpected character {rest[0]!r}",
                                 len(text) - len(rest))
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append(("", len(text)))
    return tokens


class _PredParser:
    """Recursive descent mirroring the propositional grammar, with
    quantifiers scoping as far right as possible.  Shadowed binders are
    renamed apart during parsing."""

    def __init__(self, tokens: List[Tuple[str, int]]):
        self.tokens = tokens
        self.pos = 0
        self.scope: List[Tuple[str, str]] = []  # (surface name, real name)
        self.counter = 0

    def peek(self) -> Tuple[str, int]:
        return self.tokens[self.pos]

    def take(self) -> Tuple[str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def resolve(self, name: str) -> str:
        for surface, real in reversed(self.scope):
            if surface == name:
                return real
        return name

    def form(self) -> PredFormula:
        tok, off = self.peek()
        if tok in ("exists", "forall"):
            self.take()
            var, voff = self.take()
            if not re.match(r"[a-z][a-zA-Z0-9_]*\Z", var):
                raise PredParseError("expected a resource variable", voff)
            dot, doff = self.take()
            if dot != ".":
                raise PredParseError("expected '.' after the binder", doff)
            real = var
            if any(surface == var for surface, _ in self.scope):
                self.counter += 1
                real = f"{var}_{self.counter}"
            self.scope.append((var, real))
            body = self.form()
            self.scope.pop()
            return (Exists if tok == "exists" else Forall)(real, body)
        parts = [self.disj()]
        ops = []
        while self.peek()[0] in _IMP_OPS:
            ops.append(self.take())
            parts.append(self.disj())
        if not ops:
            return parts[0]
        if len({name for name, _ in ops}) > 1:
            raise PredParseError("mixing different implication operators "
                                 "requires parentheses", ops[1][1])
        cls = _IMP_OPS[ops[0][0]]
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = cls(g, f)
        return f

    def disj(self) -> PredFormula:
        f = self.conj()
        while self.peek()[0] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> PredFormula:
        f = self.layer()
        while self.peek()[0] == "&":
            self.take()
            f = And(f, self.layer())
        return f

    def layer(self) -> PredFormula:
        f = self.unit()
        if self.peek()[0] == "|>":
            self.take()
            f = LayerConj(f, self.unit())
            if self.peek()[0] == "|>":
                raise PredParseError(
                    "chained non-associative operator '|>'", self.peek()[1])
        return f

    def unit(self) -> PredFormula:
        tok, off = self.take()
        if tok == "top":
            return Top()
        if tok == "bot":
            return Bot()
        if tok == "Contains":
            if self.take()[0] != "(":
                raise PredParseError("expected '(' after Contains", off)
            name, noff = self.take()
            if not re.match(r"[a-z][a-zA-Z0-9_]*\Z", name):
                raise PredParseError("expected a resource name", noff)
            if self.take()[0] != ")":
                raise PredParseError("expected ')'", noff)
            return Contains(self.resolve(name))
        if tok == "(":
            f = self.form()
            close, coff = self.take()
            if close != ")":
                raise PredParseError("expected ')'", coff)
            return f
        if re.match(r"[a-z][a-zA-Z0-9_]*\Z", tok):
            nxt, _ = self.peek()
            if nxt == "~>":
                self.take()
                dst, doff = self.take()
                if not re.match(r"[a-z][a-zA-Z0-9_]*\Z", dst):
                    raise PredParseError("expected a resource name", doff)
                return PointsTo(self.resolve(tok), self.resolve(dst))
            raise PredParseError(
                f"bare name {tok!r}: predicate formulas have no "
                "propositional atoms", off)
        raise PredParseError(f"unexpected {tok or 'end of input'!r}", off)


def parse_pred(text: str) -> PredFormula:
    parser = _PredParser(_pred_tokens(text))
    f = parser.form()
    tok, off = parser.peek()
    if tok:
        raise PredParseError(f"trailing input {tok!r}", off)
    return f


def render_pred(f: PredFormula) -> str:
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Contains):
        return f"Contains({f.resource})"
    if isinstance(f, PointsTo):
        return f"{f.source} ~> {f.target}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {render_pred(f.body)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {render_pred(f.body)}"
    op = {And: "&", Or: "|", Imp: "->", LayerConj: "|>", ImpRight: "-|>",
          ImpLeft: "<|-"}[type(f)]
    return f"({render_pred(f.left)} {op} {render_pred(f.right)})"


# -- resource models -------------------------------------------------------

@dataclass
class ResourceModel:
    model: LayeredGraphModel
    placement: FrozenSet[Tuple[str, str]]  # preorder on place vertices
    resources: FrozenSet[str]

    def __post_init__(self):
        domain = {v for pair in self.placement for v in pair}
        self.place_vertices = frozenset(domain)
        self.placement = frozenset(closure_pairs(self.placement, domain))

    def place_leq(self, u: str, v: str) -> bool:
        return (u, v) in self.placement


ResourceAssignment = Dict[str, FrozenSet[str]]


def check_assignment(rm: ResourceModel, s: ResourceAssignment) -> List[str]:
    problems = []
    for r, block in sorted(s.items()):
        for v in block:
            if v not in rm.place_vertices:
                problems.append(f"{r}: {v} is not a placement vertex")
            for w in rm.place_vertices:
                if rm.place_leq(v, w) and w not in block:
                    problems.append(f"{r}: not up-closed at {v} <= {w}")
    return problems


def enumerate_upsets(placement: FrozenSet[Tuple[str, str]]
                     ) -> Iterator[FrozenSet[str]]:
    """Every up-closed vertex set of the placement preorder, exactly once."""
    domain = sorted({v for pair in placement for v in pair})
    if len(domain) > MAX_PLACEMENT_VERTICES:
        raise ValueError(
            f"{len(domain)} placement vertices exceed the quantifier cap "
            f"of {MAX_PLACEMENT_VERTICES}; shrink the model")
    closed = closure_pairs(placement, domain)
    ups = [sum(1 << j for j, w in enumerate(domain) if (v, w) in closed)
           for v in domain]
    masks = {0}
    frontier = set(ups) - masks
    while frontier:
        masks |= frontier
        frontier = {a | b for a in masks for b in masks} - masks
    for mask in sorted(masks):
        yield frozenset(v for j, v in enumerate(domain) if mask >> j & 1)


def _has_path(sg: Subgraph, sources: Set[str], targets: Set[str]) -> bool:
    """Non-empty directed path inside the subgraph from a source vertex to
    a target vertex (at least one edge)."""
    starts = sources & sg.vertices
    if not starts:
        return False
    succ: Dict[str, Set[str]] = {}
    for u, v in sg.edges:
        succ.setdefault(u, set()).add(v)
    seen: Set[str] = set()
    frontier = {v for u in starts for v in succ.get(u, ())}
    while frontier:
        if frontier & targets:
            return True
        seen |= frontier
        frontier = {v for u in frontier for v in succ.get(u, ())} - seen
    return False


class _PredEvaluator:
    def __init__(self, rm: ResourceModel):
        self.rm = rm
        self.sc = rm.model.scaffold
        self.n = len(self.sc.subgraphs)
        self.comp_pairs = [(i, j, m) for (i, j), m in self.sc._comp.items()
                           if m is not None]
        self.upsets = list(enumerate_upsets(rm.placement))
        self.memo: Dict[tuple, bool] = {}

    def sat(self, s: ResourceAssignment, w: int, f: PredFormula) -> bool:
        key = (frozenset(s.items()), w, f)
        if key not in self.memo:
            self.memo[key] = self._sat(s, w, f)
        return self.memo[key]

    def _sat(self, s: ResourceAssignment, w: int, f: PredFormula) -> bool:
        sc = self.sc
        if isinstance(f, Top):
            return True
        if isinstance(f, Bot):
            return False
        if isinstance(f, Contains):
            if f.resource not in s:
                raise KeyError(f"unbound resource {f.resource!r}")
            return bool(s[f.resource] & sc.subgraphs[w].vertices)
        if isinstance(f, PointsTo):
            for r in (f.source, f.target):
                if r not in s:
                    raise KeyError(f"unbound resource {r!r}")
            return _has_path(sc.subgraphs[w], set(s[f.source]),
                             set(s[f.target]))
        if isinstance(f, And):
            return self.sat(s, w, f.left) and self.sat(s, w, f.right)
        if isinstance(f, Or):
            return self.sat(s, w, f.left) or self.sat(s, w, f.right)
        if isinstance(f, Imp):
            return all(self.sat(s, v, f.right) for v in range(self.n)
                       if sc.leq(w, v) and self.sat(s, v, f.left))
        if isinstance(f, LayerConj):
            return any(sc.leq(m, w) and self.sat(s, i, f.left)
                       and self.sat(s, j, f.right)
                       for i, j, m in self.comp_pairs)
        if isinstance(f, ImpRight):
            return all(self.sat(s, m, f.right)
                       for i, j, m in self.comp_pairs
                       if sc.leq(w, i) and self.sat(s, j, f.left))
        if isinstance(f, ImpLeft):
            return all(self.sat(s, m, f.right)
                       for i, j, m in self.comp_pairs
                       if sc.leq(w, j) and self.sat(s, i, f.left))
        if isinstance(f, Exists):
            return any(self.sat({**s, f.var: block}, w, f.body)
                       for block in self.upsets)
        if isinstance(f, Forall):
            # World and domain quantification combined, as the semantics
            # states it: every extension at every order-successor.
            return all(self.sat({**s, f.var: block}, v, f.body)
                       for block in self.upsets
                       for v in range(self.n) if sc.leq(w, v))
        raise TypeError(f"not a predicate formula: {f!r}")


def pred_satisfies(rm: ResourceModel, s: ResourceAssignment, world: int,
                   f: PredFormula) -> bool:
    """Satisfaction of a predicate formula at a world under an assignment."""
    missing = free_resources(f) - set(s)
    if missing:
        raise KeyError(f"unbound resources: {sorted(missing)}")
    return _PredEvaluator(rm).sat(dict(s), world, f)


# -- bigraph scaffold construction -----------------------------------------

@dataclass
class LinkGraphSpec:
    """One bigraph's link structure: hyperedges over its nodes and
    interface names.

    Members listed in ``targets`` receive their hub edge (hub feeds them);
    outer names always do.  Everything else feeds its hub.
    """
    nodes: List[str]
    inner: List[str]
    outer: List[str]
    hyperedges: List[List[str]]
    targets: List[str] = field(default_factory=list)


def build_bigraph_scaffold(place_forests: List[Dict[str, Optional[str]]],
                           link_graphs: List[LinkGraphSpec],
                           interface_edges: List[Tuple[str, str]],
                           resources: Iterator[str] = ()) -> ResourceModel:
    """Encode a system of composed bigraphs as a resource model.

    Each hyperedge becomes a hub vertex with one edge per connection:
    nodes and inner names feed the hub, the hub feeds outer names (flow
    runs toward the outer interface).  Interface edges wire outer names of
    one bigraph to inner names of another and constitute the distinguished
    edge set.  The admissible set is the singleton place vertices plus the
    link graphs closed under composition; the order is the place
    containment (descendant below ancestor) with link-graph worlds only
    reflexively related.
    """
    if len(place_forests) != len(link_graphs):
        raise ValueError("one place forest per link graph is required")
    all_vertices: Set[str] = set()
    edges: Set[Tuple[str, str]] = set()
    link_worlds: List[Tuple[Set[str], Set[Tuple[str, str]]]] = []
    for bi, (forest, link) in enumerate(zip(place_forests, link_graphs)):
        verts = set(forest) | set(link.nodes)
        for child, parent in forest.items():
            if parent is not None and parent not in forest:
                raise ValueError(f"parent {parent!r} missing from forest")
        names = set(link.inner) | set(link.outer)
        if names & verts:
            raise ValueError(f"name collision in bigraph {bi}: "
                             f"{sorted(names & verts)}")
        member_vertices = verts | names
        if member_vertices & all_vertices:
            raise ValueError(f"vertex collision across bigraphs: "
                             f"{sorted(member_vertices & all_vertices)}")
        all_vertices |= member_vertices
        link_edges: Set[Tuple[str, str]] = set()
        inner, outer = set(link.inner), set(link.outer)
        for k, members in enumerate(link.hyperedges):
            hub = f"b{bi}_e{k}"
            if hub in all_vertices:
                raise ValueError(f"vertex collision on hub {hub!r}")
            all_vertices.add(hub)
            member_vertices.add(hub)
            for m in members:
                if m not in verts and m not in names:
                    raise ValueError(f"hyperedge member {m!r} not in "
                                     f"bigraph {bi}")
                if m in outer or m in link.targets:
                    link_edges.add((hub, m))
                else:
                    link_edges.add((m, hub))
        edges |= link_edges
        link_worlds.append((member_vertices, link_edges))
    outer_names = {x for link in link_graphs for x in link.outer}
    inner_names = {x for link in link_graphs for x in link.inner}
    for u, v in interface_edges:
        if u not in outer_names or v not in inner_names:
            raise ValueError(f"interface edge ({u},{v}) must run from an "
                             "outer name to an inner name")
    eset = frozenset(interface_edges)
    edges |= eset
    graph = DirectedGraph(frozenset(all_vertices), frozenset(edges))

    place_vertices = [v for forest in place_forests for v in forest]
    singles = [Subgraph(frozenset([v]), frozenset(), graph)
               for v in sorted(place_vertices)]
    pool = [Subgraph(frozenset(vs), frozenset(es), graph)
            for vs, es in link_worlds]
    grown = True
    while grown:
        grown = False
        for h in list(pool):
            for k in list(pool):
                out = compose(h, k, eset)
                if out is not None and all(out.key() != m.key()
                                           for m in pool):
                    pool.append(out)
                    grown = True
    subgraphs = singles + pool
    placement_pairs = set()
    for forest in place_forests:
        for child, parent in forest.items():
            placement_pairs.add((child, child))
            if parent is not None:
                placement_pairs.add((child, parent))
    placement = frozenset(closure_pairs(
        placement_pairs, {v for p in placement_pairs for v in p}))
    order = {(i, i) for i in range(len(subgraphs))}
    for i, a in enumerate(singles):
        for j, b in enumerate(singles):
            (u,), (v,) = a.vertices, b.vertices
            if (u, v) in placement:
                order.add((i, j))
    scaffold = OrderedScaffold(graph, eset, subgraphs, frozenset(order))
    model = LayeredGraphModel(scaffold, {})
    return ResourceModel(model, placement, frozenset(resources))


# -- JSON format extension -------------------------------------------------

def resource_model_from_dict(data: dict) -> ResourceModel:
    from .graph import model_from_dict
    model = model_from_dict(data)
    placement = frozenset((u, v) for u, v in data.get("placement", []))
    return ResourceModel(model, placement,
                         frozenset(data.get("resources", [])))


def resource_model_to_dict(rm: ResourceModel) -> dict:
    from .graph import model_to_dict
    out = model_to_dict(rm.model)
    out["placement"] = sorted(map(list, rm.placement))
    out["resources"] = sorted(rm.resources)
    return out
