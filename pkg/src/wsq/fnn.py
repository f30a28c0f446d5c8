"""Feedforward ReLU networks encoded as weighted structures.

A network is a weighted structure over the vocabulary
``{wt(2), bias(1), le_in(2), le_out(2)}``: ``wt`` holds edge weights
(an edge exists iff its weight is defined), ``bias`` is defined exactly
on non-input nodes, and ``le_in``/``le_out`` are reflexive linear orders
on the input and output node sets.

Value semantics: a node's raw value is its bias plus the weighted sum of
the ReLU of its in-neighbours' raw values; consumers apply the ReLU, so
output nodes (which have no consumers) report their raw value with no
activation, and even a raw input is rectified by the nodes reading it.

This module provides validation, the direct forward oracle, the
edge-padding transformation, and an exact piecewise-linear representation
(:class:`Pwl`) for single-input single-output networks, which serves as
the oracle for integration and the zero test.
"""

from __future__ import annotations

import json
import sys
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import LoadError, ResourceError, UsageError
from .numerics import BOT, ExtRational, rational
from .structures import Vocabulary, WeightedStructure, validate_structure

__all__ = [
    "WT",
    "BIAS",
    "LE_IN",
    "LE_OUT",
    "INP",
    "FNN_VOCABULARY",
    "FnnStructure",
    "validate_fnn",
    "with_input",
    "forward",
    "node_values",
    "pad",
    "without_edge",
    "Pwl",
    "to_pwl",
    "pwl_integral",
    "zero_query",
    "DEFAULT_MAX_PWL_PIECES",
    "fnn_from_json",
    "fnn_to_json",
    "load_fnn",
    "save_fnn",
]

WT = "wt"
BIAS = "bias"
LE_IN = "le_in"
LE_OUT = "le_out"
INP = "inp"

FNN_VOCABULARY = Vocabulary(relations={LE_IN: 2, LE_OUT: 2}, weights={WT: 2, BIAS: 1})

DEFAULT_MAX_PWL_PIECES = 10**6


def _relu(x: ExtRational) -> ExtRational:
    # undefined stays undefined so an ungrounded in-neighbour poisons its
    # consumers, mirroring the evaluation templates
    if x.frac is None:
        return BOT
    return x if x.frac > 0 else rational(0)


# ---------------------------------------------------------------------------
# Validation and the structure view
# ---------------------------------------------------------------------------


def _order_violations(pairs: Iterable[tuple], expected: set, label: str) -> list[str]:
    """Check that pairs form a reflexive linear order exactly on ``expected``."""
    out: list[str] = []
    pairs = set(pairs)
    domain = {a for a, _ in pairs} | {b for _, b in pairs}
    stray = domain - expected
    if stray:
        out.append(f"{label}: defined on non-{label.split('_')[1]} nodes {sorted(stray)}")
    missing = expected - domain
    if missing and expected:
        out.append(f"{label}: not defined on {sorted(missing)}")
    if out:
        return out
    for a in expected:
        if (a, a) not in pairs:
            out.append(f"{label}: missing reflexive pair ({a},{a})")
    for a in expected:
        for b in expected:
            has_ab, has_ba = (a, b) in pairs, (b, a) in pairs
            if not (has_ab or has_ba):
                out.append(f"{label}: {a} and {b} are incomparable")
            if a != b and has_ab and has_ba:
                out.append(f"{label}: {a} and {b} violate antisymmetry")
    for a, b in pairs:
        for c in expected:
            if (b, c) in pairs and (a, c) not in pairs:
                out.append(f"{label}: transitivity fails on ({a},{b},{c})")
    return out


def validate_fnn(s: WeightedStructure) -> list[str]:
    """Check the network conditions on a weighted structure.

    Returns violation messages (empty list = valid network): the required
    vocabulary, acyclicity of the weight graph, bias defined exactly on
    non-input nodes, and the two linear-order conditions.
    """
    out = validate_structure(s)
    voc = s.vocabulary
    for name, arity in ((WT, 2), (BIAS, 1)):
        if voc.weights.get(name) != arity:
            out.append(f"vocabulary: weight symbol {name}({arity}) required")
    for name in (LE_IN, LE_OUT):
        if voc.relations.get(name) != 2:
            out.append(f"vocabulary: relation symbol {name}(2) required")
    if out:
        return out

    edges = list(s.weights[WT].keys())
    indeg = {v: 0 for v in s.universe}
    outdeg = {v: 0 for v in s.universe}
    for u, v in edges:
        indeg[v] += 1
        outdeg[u] += 1

    # Kahn's algorithm; leftover nodes witness a cycle
    remaining = dict(indeg)
    queue = [v for v in s.universe if remaining[v] == 0]
    succ: dict[str, list[str]] = {v: [] for v in s.universe}
    for u, v in edges:
        succ[u].append(v)
    seen = 0
    while queue:
        u = queue.pop()
        seen += 1
        for v in succ[u]:
            remaining[v] -= 1
            if remaining[v] == 0:
                queue.append(v)
    if seen != len(s.universe):
        cyclic = sorted(v for v in s.universe if remaining[v] > 0)
        out.append(f"acyclic: weight graph has a cycle through {cyclic}")
        return out

    inputs = {v for v in s.universe if indeg[v] == 0}
    outputs = {v for v in s.universe if outdeg[v] == 0}
    for v in s.universe:
        has_bias = (v,) in s.weights[BIAS]
        if v in inputs and has_bias:
            out.append(f"bias iff input: input node {v} must not have a bias")
        if v not in inputs and not has_bias:
            out.append(f"bias iff input: non-input node {v} must have a bias")
    out.extend(_order_violations(s.relations[LE_IN], inputs, LE_IN))
    out.extend(_order_violations(s.relations[LE_OUT], outputs, LE_OUT))
    return out


def _order_list(pairs: frozenset, members: set) -> tuple[str, ...]:
    # rank = number of predecessors under the (validated) linear order
    return tuple(sorted(members, key=lambda v: sum(1 for u in members if (u, v) in pairs)))


class FnnStructure:
    """Validated view of a network structure with derived graph data.

    Construction validates the FNN conditions and precomputes edges,
    neighbour lists, input/output orders and node depths (length of the
    longest path from an input).
    """

    def __init__(self, structure: WeightedStructure):
        problems = validate_fnn(structure)
        if problems:
            raise UsageError("not a valid FNN: " + "; ".join(problems))
        self.structure = structure
        self.edges: dict[tuple[str, str], ExtRational] = dict(structure.weights[WT])
        index = {v: i for i, v in enumerate(structure.universe)}
        self.in_neighbors: dict[str, tuple[str, ...]] = {v: () for v in structure.universe}
        self.out_neighbors: dict[str, tuple[str, ...]] = {v: () for v in structure.universe}
        grouped_in: dict[str, list[str]] = {v: [] for v in structure.universe}
        grouped_out: dict[str, list[str]] = {v: [] for v in structure.universe}
        for u, v in self.edges:
            grouped_in[v].append(u)
            grouped_out[u].append(v)
        for v in structure.universe:
            self.in_neighbors[v] = tuple(sorted(grouped_in[v], key=index.__getitem__))
            self.out_neighbors[v] = tuple(sorted(grouped_out[v], key=index.__getitem__))
        inputs = {v for v in structure.universe if not self.in_neighbors[v]}
        outputs = {v for v in structure.universe if not self.out_neighbors[v]}
        self.input_nodes = _order_list(structure.relations[LE_IN], inputs)
        self.output_nodes = _order_list(structure.relations[LE_OUT], outputs)

        self.depths: dict[str, int] = {}
        for v in self._topological():
            preds = self.in_neighbors[v]
            self.depths[v] = 1 + max(self.depths[u] for u in preds) if preds else 0

    def _topological(self) -> list[str]:
        order: list[str] = []
        pending = {v: len(self.in_neighbors[v]) for v in self.structure.universe}
        stack = [v for v in reversed(self.structure.universe) if pending[v] == 0]
        while stack:
            u = stack.pop()
            order.append(u)
            for v in self.out_neighbors[u]:
                pending[v] -= 1
                if pending[v] == 0:
                    stack.append(v)
        return order

    @property
    def input_dim(self) -> int:
        return len(self.input_nodes)

    @property
    def output_dim(self) -> int:
        return len(self.output_nodes)

    @property
    def depth(self) -> int:
        return max(self.depths.values())

    def bias(self, v: str) -> ExtRational:
        return self.structure.weights[BIAS].get((v,), BOT)

    def weight(self, u: str, v: str) -> ExtRational:
        return self.edges.get((u, v), BOT)


def _coerce_inputs(values: Sequence) -> list[ExtRational]:
    out = []
    for v in values:
        if isinstance(v, (int, Fraction)):
            v = rational(v)
        if not isinstance(v, ExtRational) or v.is_bot:
            raise UsageError("network inputs must be defined rationals")
        out.append(v)
    return out


def with_input(net: FnnStructure, values: Sequence) -> WeightedStructure:
    """Expand a network by the unary ``inp`` function carrying an input vector.

    ``values[i]`` is attached to the i-th input node under ``le_in``; all
    other nodes are left undefined.
    """
    values = _coerce_inputs(values)
    if len(values) != net.input_dim:
        raise UsageError(f"expected {net.input_dim} input values, got {len(values)}")
    table = {(u,): r for u, r in zip(net.input_nodes, values)}
    return net.structure.expand(weights={INP: (1, table)})


def node_values(s: WeightedStructure) -> dict[str, ExtRational]:
    """Raw value of every node of a network-with-input structure.

    Follows the evaluation recursion directly on the weight graph: a
    node with a defined ``inp`` entry reports it, every other node
    reports bias plus the weighted sum of rectified in-neighbour values.
    Works on any acyclic structure interpreting ``wt``, ``bias`` and
    ``inp`` (for example a network with an edge deleted), with ``bot``
    propagating where the recursion is not grounded.
    """
    for name in (WT, BIAS, INP):
        if name not in s.vocabulary.weights:
            raise UsageError(f"structure does not interpret weight symbol {name!r}")
    inp = s.weights[INP]
    bias = s.weights[BIAS]
    preds: dict[str, list[tuple[str, ExtRational]]] = {v: [] for v in s.universe}
    for (u, v), w in s.weights[WT].items():
        preds[v].append((u, w))

    values: dict[str, ExtRational] = {}
    in_progress: set[str] = set()

    def value_of(v: str) -> ExtRational:
        if v in values:
            return values[v]
        if v in in_progress:
            raise UsageError(f"weight graph has a cycle through {v!r}")
        in_progress.add(v)
        if (v,) in inp:
            result = inp[(v,)]
        else:
            result = bias.get((v,), BOT)
            for u, w in preds[v]:
                result = result + w * _relu(value_of(u))
        in_progress.discard(v)
        values[v] = result
        return result

    # the recursion is at most one frame per node
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * len(s.universe) + 100))
    try:
        for v in s.universe:
            value_of(v)
    finally:
        sys.setrecursionlimit(old_limit)
    return values


def forward(net: FnnStructure, values: Sequence) -> list[ExtRational]:
    """Evaluate the network function exactly; outputs follow ``le_out``."""
    expanded = with_input(net, values)
    table = node_values(expanded)
    return [table[v] for v in net.output_nodes]


def without_edge(s: WeightedStructure, edge: tuple[str, str]) -> WeightedStructure:
    """Remove one edge (set its weight to ``bot``) from any ``wt`` structure.

    The result may violate the strict network conditions (a node can lose
    all in-edges while keeping its bias); :func:`node_values` still
    evaluates it under the same recursion.
    """
    edge = tuple(edge)
    if WT not in s.weights or edge not in s.weights[WT]:
        raise UsageError(f"no edge {edge!r} to remove")
    wt = {k: v for k, v in s.weights[WT].items() if k != edge}
    return WeightedStructure(s.universe, s.vocabulary, s.relations, {**s.weights, WT: wt})


def pad(net: FnnStructure, edge: tuple[str, str], k: int) -> FnnStructure:
    """Replace an edge by a chain of ``k`` weight-1, bias-0 relay nodes.

    The relayed value is already rectified, so rectifying it again at each
    relay is the identity and the computed function is unchanged, while
    every path through the edge gets longer by ``k``.  Input/output nodes
    and their orders are untouched.
    """
    u, v = edge = tuple(edge)
    if edge not in net.edges:
        raise UsageError(f"{edge!r} is not an edge of the network")
    if k < 1:
        raise UsageError("relay count must be at least 1")
    taken = set(net.structure.universe)
    relays = []
    for i in range(1, k + 1):
        name = f"{u}_{v}_pad{i}"
        while name in taken:
            name += "x"
        taken.add(name)
        relays.append(name)

    wt = dict(net.structure.weights[WT])
    del wt[edge]
    chain = [u] + relays + [v]
    for a, b in zip(chain, chain[1:]):
        wt[(a, b)] = rational(1)
    wt[(relays[-1], v)] = net.edges[edge]
    bias = dict(net.structure.weights[BIAS])
    for r in relays:
        bias[(r,)] = rational(0)

    s = net.structure
    padded = WeightedStructure(
        s.universe + tuple(relays),
        s.vocabulary,
        s.relations,
        {**s.weights, WT: wt, BIAS: bias},
    )
    return FnnStructure(padded)


# ---------------------------------------------------------------------------
# Exact piecewise-linear functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pwl:
    """Continuous piecewise-linear function R -> R in canonical form.

    ``breakpoints`` are strictly increasing; ``pieces[i]`` is the
    ``(slope, intercept)`` of the affine piece left of ``breakpoints[i]``
    (the last piece extends to +inf).  Adjacent pieces agree at the shared
    breakpoint and have distinct slopes, so equal functions have equal
    representations.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        assert len(self.pieces) == len(self.breakpoints) + 1
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            assert a < b, "breakpoints must be strictly increasing"
        for i, x in enumerate(self.breakpoints):
            (s1, t1), (s2, t2) = self.pieces[i], self.pieces[i + 1]
            assert s1 * x + t1 == s2 * x + t2, "pieces must agree at breakpoints"
            assert s1 != s2, "canonical form requires distinct adjacent slopes"

    @classmethod
    def make(cls, breakpoints: Sequence[Fraction], pieces: Sequence[tuple[Fraction, Fraction]]) -> "Pwl":
        """Build in canonical form, merging collinear adjacent pieces."""
        bps: list[Fraction] = []
        ps: list[tuple[Fraction, Fraction]] = [tuple(pieces[0])]
        for x, piece in zip(breakpoints, pieces[1:]):
            piece = tuple(piece)
            if piece == ps[-1]:
                continue
            bps.append(x)
            ps.append(piece)
        return cls(tuple(bps), tuple(ps))

    @classmethod
    def constant(cls, c: Fraction) -> "Pwl":
        return cls((), ((Fraction(0), Fraction(c)),))

    @classmethod
    def identity(cls) -> "Pwl":
        return cls((), ((Fraction(1), Fraction(0)),))

    def _piece_at(self, x: Fraction) -> tuple[Fraction, Fraction]:
        return self.pieces[bisect_left(self.breakpoints, x)]

    def at(self, x: Fraction) -> Fraction:
        s, t = self._piece_at(Fraction(x))
        return s * Fraction(x) + t

    @property
    def is_zero(self) -> bool:
        return self.pieces == ((Fraction(0), Fraction(0)),)

    @classmethod
    def affine(cls, terms: Sequence[tuple[Fraction, "Pwl"]], offset: Fraction = Fraction(0)) -> "Pwl":
        """Exact affine combination ``offset + sum(c * p)``."""
        merged = sorted({x for _, p in terms for x in p.breakpoints})
        pieces = []
        for x in _interval_reps(merged):
            slope = Fraction(0)
            inter = Fraction(offset)
            for c, p in terms:
                s, t = p._piece_at(x)
                slope += c * s
                inter += c * t
            pieces.append((slope, inter))
        return cls.make(merged, pieces)

    def relu(self) -> "Pwl":
        """Pointwise ``max(0, .)``, splitting pieces at their zero crossings."""
        cuts = set(self.breakpoints)
        bounds = [None, *self.breakpoints, None]
        for i, (s, t) in enumerate(self.pieces):
            if s == 0:
                continue
            root = -t / s
            lo, hi = bounds[i], bounds[i + 1]
            if (lo is None or lo < root) and (hi is None or root < hi):
                cuts.add(root)
        new_bps = sorted(cuts)
        pieces = []
        for x in _interval_reps(new_bps):
            if self.at(x) > 0:
                pieces.append(self._piece_at(x))
            else:
                pieces.append((Fraction(0), Fraction(0)))
        return Pwl.make(new_bps, pieces)

    def integral(self, a: Fraction, b: Fraction) -> Fraction:
        """Exact integral over [a, b] via trapezoids on the pieces."""
        a, b = Fraction(a), Fraction(b)
        if a > b:
            raise UsageError("integration bounds must satisfy a <= b")
        points = [a] + [x for x in self.breakpoints if a < x < b] + [b]
        total = Fraction(0)
        for l, r in zip(points, points[1:]):
            total += (self.at(l) + self.at(r)) * (r - l) / 2
        return total


def _interval_reps(breakpoints: Sequence[Fraction]) -> list[Fraction]:
    """One interior sample point per interval of the partition given by breakpoints."""
    if not breakpoints:
        return [Fraction(0)]
    reps = [breakpoints[0] - 1]
    for a, b in zip(breakpoints, breakpoints[1:]):
        reps.append((a + b) / 2)
    reps.append(breakpoints[-1] + 1)
    return reps


def to_pwl(net: FnnStructure, max_pieces: int = DEFAULT_MAX_PWL_PIECES) -> Pwl:
    """Exact piecewise-linear form of a 1-input 1-output network.

    Built by composing per-node representations bottom-up: rectification
    splits pieces at zero crossings, affine combination merges breakpoint
    sets.  Piece counts can grow exponentially with depth, so the build
    aborts with :class:`ResourceError` beyond ``max_pieces``.
    """
    if net.input_dim != 1 or net.output_dim != 1:
        raise UsageError("piecewise-linear analysis needs input and output dimension 1")
    node_pwl: dict[str, Pwl] = {}
    relu_pwl: dict[str, Pwl] = {}

    def check(p: Pwl) -> Pwl:
        if len(p.pieces) > max_pieces:
            raise ResourceError(f"piecewise-linear representation exceeds {max_pieces} pieces")
        return p

    for v in net._topological():
        preds = net.in_neighbors[v]
        if not preds:
            node_pwl[v] = Pwl.identity()
        else:
            terms = []
            for u in preds:
                if u not in relu_pwl:
                    relu_pwl[u] = check(node_pwl[u].relu())
                terms.append((net.edges[(u, v)].frac, relu_pwl[u]))
            node_pwl[v] = check(Pwl.affine(terms, net.bias(v).frac))
    return node_pwl[net.output_nodes[0]]


def pwl_integral(p: Pwl, a: ExtRational, b: ExtRational) -> ExtRational:
    """Exact integral of a piecewise-linear function over defined bounds."""
    if a.is_bot or b.is_bot:
        raise UsageError("integration bounds must be defined")
    return ExtRational(p.integral(a.frac, b.frac))


def zero_query(net: FnnStructure, max_pieces: int = DEFAULT_MAX_PWL_PIECES) -> bool:
    """Whether a 1-input 1-output network computes the constant zero function."""
    return to_pwl(net, max_pieces).is_zero


# ---------------------------------------------------------------------------
# Convenience file format
# ---------------------------------------------------------------------------


def fnn_from_json(doc: dict) -> FnnStructure:
    """Compile the network-file dict form into a validated network.

    Expected shape::

        {"nodes": [{"name": "u"}, {"name": "v", "bias": "1"}],
         "edges": [{"from": "u", "to": "v", "weight": "3"}],
         "input_order": ["u"], "output_order": ["v"]}

    ``le_in``/``le_out`` are materialized as reflexive linear orders on
    the listed nodes.  The compiled structure must satisfy the network
    conditions (bias present exactly off the input nodes, orders covering
    exactly the input/output sets).
    """
    if not isinstance(doc, dict) or "nodes" not in doc:
        raise LoadError("network file must be an object with a 'nodes' key")

    def parse_value(raw, where: str) -> ExtRational:
        if isinstance(raw, bool) or not isinstance(raw, (str, int)):
            raise LoadError(f"{where}: value must be a string or integer")
        try:
            value = ExtRational.parse(str(raw))
        except ValueError as exc:
            raise LoadError(f"{where}: {exc}") from exc
        if value.is_bot:
            raise LoadError(f"{where}: 'bot' not allowed here")
        return value

    names: list[str] = []
    bias: dict = {}
    for entry in doc["nodes"]:
        if not isinstance(entry, dict) or "name" not in entry:
            raise LoadError("each node entry needs a 'name'")
        name = entry["name"]
        if name in names:
            raise LoadError(f"duplicate node {name!r}")
        names.append(name)
        if "bias" in entry:
            bias[(name,)] = parse_value(entry["bias"], f"bias of {name}")

    known = set(names)
    wt: dict = {}
    for entry in doc.get("edges", []):
        try:
            u, v, raw = entry["from"], entry["to"], entry["weight"]
        except (TypeError, KeyError) as exc:
            raise LoadError("each edge entry needs 'from', 'to' and 'weight'") from exc
        if u not in known or v not in known:
            raise LoadError(f"edge ({u},{v}) references unknown nodes")
        if (u, v) in wt:
            raise LoadError(f"duplicate edge ({u},{v})")
        wt[(u, v)] = parse_value(raw, f"weight of ({u},{v})")

    def order_pairs(listed, label):
        if not isinstance(listed, list) or len(set(listed)) != len(listed):
            raise LoadError(f"'{label}' must be a list of distinct node names")
        for name in listed:
            if name not in known:
                raise LoadError(f"'{label}' references unknown node {name!r}")
        return [(a, b) for i, a in enumerate(listed) for b in listed[i:]]

    structure = WeightedStructure.build(
        names,
        relations={
            LE_IN: (2, order_pairs(doc.get("input_order", []), "input_order")),
            LE_OUT: (2, order_pairs(doc.get("output_order", []), "output_order")),
        },
        weights={WT: (2, wt), BIAS: (1, bias)},
    )
    try:
        return FnnStructure(structure)
    except UsageError as exc:
        raise LoadError(str(exc)) from exc


def fnn_to_json(net: FnnStructure) -> dict:
    """Serialize back to the network-file dict form."""
    nodes = []
    for v in net.structure.universe:
        entry: dict = {"name": v}
        b = net.bias(v)
        if not b.is_bot:
            entry["bias"] = str(b)
        nodes.append(entry)
    edges = [
        {"from": u, "to": v, "weight": str(w)}
        for (u, v), w in sorted(net.edges.items())
    ]
    return {
        "nodes": nodes,
        "edges": edges,
        "input_order": list(net.input_nodes),
        "output_order": list(net.output_nodes),
    }


def load_fnn(path: str) -> FnnStructure:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LoadError(f"{path}: not valid JSON: {exc}") from exc
    return fnn_from_json(doc)


def save_fnn(net: FnnStructure, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fnn_to_json(net), fh, indent=2)
        fh.write("\n")
