"""Vocabularies and weighted finite structures.

A weighted structure interprets relation symbols as tuple sets over a
finite universe and weight-function symbols as partial maps from tuples
to exact rationals; tuples absent from a weight table denote ``bot``.
Structures are immutable after construction and safe to share.

The JSON file format is documented on :func:`structure_from_json`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import LoadError, UsageError
from .numerics import BOT, ExtRational, rational

__all__ = [
    "Vocabulary",
    "WeightedStructure",
    "validate_structure",
    "expand",
    "lookup_relation",
    "lookup_weight",
    "structure_from_json",
    "structure_to_json",
    "load_structure",
    "save_structure",
]

_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")

Tuple_ = tuple  # element tuples are plain tuples of universe names


@dataclass(frozen=True)
class Vocabulary:
    """Named symbols, each a relation or a weight function with an arity.

    Names are unique across both kinds; arity 0 is allowed (0-ary weight
    functions act as named constants).
    """

    relations: dict[str, int] = field(default_factory=dict)
    weights: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.relations) & set(self.weights)
        if clash:
            raise UsageError(f"symbol names used as both relation and weight: {sorted(clash)}")
        for name, arity in list(self.relations.items()) + list(self.weights.items()):
            if not isinstance(arity, int) or arity < 0:
                raise UsageError(f"bad arity for symbol {name!r}: {arity!r}")

    def symbols(self) -> dict[str, tuple[str, int]]:
        out = {name: ("relation", ar) for name, ar in self.relations.items()}
        out.update({name: ("weight", ar) for name, ar in self.weights.items()})
        return out

    def merged(self, other: "Vocabulary") -> "Vocabulary":
        clash = (set(self.relations) | set(self.weights)) & (set(other.relations) | set(other.weights))
        if clash:
            raise UsageError(f"expansion clashes with existing symbols: {sorted(clash)}")
        return Vocabulary(
            relations={**self.relations, **other.relations},
            weights={**self.weights, **other.weights},
        )


def _coerce_value(v) -> ExtRational:
    if isinstance(v, ExtRational):
        return v
    if isinstance(v, (int, Fraction)):
        return rational(v)
    raise UsageError(f"weight values must be rationals, got {type(v).__name__}")


@dataclass(frozen=True)
class WeightedStructure:
    """A finite universe with relation tables and sparse weight tables.

    ``relations`` maps each relation symbol to a frozenset of tuples;
    ``weights`` maps each weight symbol to a dict from tuples to defined
    values (``bot`` is represented by absence).  The universe is an
    ordered tuple of distinct names; the order is used only for
    deterministic iteration and has no semantic weight.
    """

    universe: tuple[str, ...]
    vocabulary: Vocabulary
    relations: dict[str, frozenset]
    weights: dict[str, dict]

    @classmethod
    def build(
        cls,
        universe: Sequence[str],
        relations: Optional[Mapping[str, tuple[int, Iterable[Sequence[str]]]]] = None,
        weights: Optional[Mapping[str, tuple[int, Mapping[Sequence[str], object]]]] = None,
    ) -> "WeightedStructure":
        """Construct from ``{name: (arity, tuples)}`` and ``{name: (arity, {tuple: value})}``.

        Weight values may be ints, Fractions, or ExtRationals; ``bot``
        entries are dropped (absence means ``bot``).
        """
        rel_arities: dict[str, int] = {}
        rel_tables: dict[str, frozenset] = {}
        for name, (arity, tuples) in (relations or {}).items():
            rel_arities[name] = arity
            rel_tables[name] = frozenset(tuple(t) for t in tuples)
        wt_arities: dict[str, int] = {}
        wt_tables: dict[str, dict] = {}
        for name, (arity, table) in (weights or {}).items():
            wt_arities[name] = arity
            coerced = {}
            for t, v in table.items():
                v = _coerce_value(v)
                if not v.is_bot:
                    coerced[tuple(t)] = v
            wt_tables[name] = coerced
        vocab = Vocabulary(relations=rel_arities, weights=wt_arities)
        return cls(tuple(universe), vocab, rel_tables, wt_tables)

    # -- lookups ---------------------------------------------------------

    def _check_symbol(self, name: str, kind: str, t: Sequence[str]) -> None:
        table = self.vocabulary.relations if kind == "relation" else self.vocabulary.weights
        if name not in table:
            raise UsageError(f"unknown {kind} symbol {name!r}")
        if len(t) != table[name]:
            raise UsageError(f"{kind} {name!r} has arity {table[name]}, got tuple of length {len(t)}")
        for comp in t:
            if comp not in self._universe_set():
                raise UsageError(f"tuple component {comp!r} is not a universe element")

    def _universe_set(self) -> frozenset:
        cached = getattr(self, "_uset", None)
        if cached is None:
            cached = frozenset(self.universe)
            object.__setattr__(self, "_uset", cached)
        return cached

    def rel(self, name: str, t: Sequence[str]) -> bool:
        """Membership test for a relation symbol; errors on misuse."""
        self._check_symbol(name, "relation", t)
        return tuple(t) in self.relations[name]

    def weight(self, name: str, t: Sequence[str]) -> ExtRational:
        """Stored weight for a tuple; ``bot`` when the tuple is absent."""
        self._check_symbol(name, "weight", t)
        return self.weights[name].get(tuple(t), BOT)

    # -- expansion ---------------------------------------------------------

    def expand(
        self,
        relations: Optional[Mapping[str, tuple[int, Iterable[Sequence[str]]]]] = None,
        weights: Optional[Mapping[str, tuple[int, Mapping[Sequence[str], object]]]] = None,
    ) -> "WeightedStructure":
        """Interpret additional symbols over the same universe.

        New names must be disjoint from the current vocabulary; all
        existing interpretations are preserved unchanged.
        """
        extra = WeightedStructure.build(self.universe, relations, weights)
        vocab = self.vocabulary.merged(extra.vocabulary)
        return WeightedStructure(
            self.universe,
            vocab,
            {**self.relations, **extra.relations},
            {**self.weights, **extra.weights},
        )

    def _with_weight_override(self, name: str, arity: int, table: dict) -> "WeightedStructure":
        """Shadow or add one weight symbol, sharing the given live table.

        Internal hook for the fixed-point evaluator; the table reference
        is stored as-is so the caller can grow it between iteration
        rounds.  Not part of the public API.
        """
        relations = self.relations
        rel_voc = self.vocabulary.relations
        if name in rel_voc:
            rel_voc = {k: v for k, v in rel_voc.items() if k != name}
            relations = {k: v for k, v in relations.items() if k != name}
        vocab = Vocabulary(relations=rel_voc, weights={**self.vocabulary.weights, name: arity})
        return WeightedStructure(self.universe, vocab, relations, {**self.weights, name: table})

    def reversed_universe(self) -> "WeightedStructure":
        """Same structure with the stored iteration order reversed."""
        return WeightedStructure(
            tuple(reversed(self.universe)), self.vocabulary, self.relations, self.weights
        )

    def validate(self) -> list[str]:
        return validate_structure(self)


def validate_structure(s: WeightedStructure) -> list[str]:
    """Check all structure invariants; returns a list of violation messages.

    An empty list means the structure is well-formed.
    """
    violations: list[str] = []
    if not s.universe:
        violations.append("universe: must be nonempty")
    seen = set()
    for name in s.universe:
        if not isinstance(name, str) or not _NAME_RE.match(name):
            violations.append(f"universe: element name {name!r} must match [A-Za-z0-9_]+")
        if name in seen:
            violations.append(f"universe: duplicate element {name!r}")
        seen.add(name)

    if set(s.relations) != set(s.vocabulary.relations):
        violations.append("vocabulary: interpreted relations do not match declared relation symbols")
    if set(s.weights) != set(s.vocabulary.weights):
        violations.append("vocabulary: interpreted weights do not match declared weight symbols")

    for name, tuples in s.relations.items():
        arity = s.vocabulary.relations.get(name)
        for t in tuples:
            if arity is not None and len(t) != arity:
                violations.append(f"relation {name}: arity mismatch in tuple {t!r}")
            elif any(comp not in seen for comp in t):
                violations.append(f"relation {name}: tuple {t!r} has non-universe components")
    for name, table in s.weights.items():
        arity = s.vocabulary.weights.get(name)
        for t, v in table.items():
            if arity is not None and len(t) != arity:
                violations.append(f"weight {name}: arity mismatch in tuple {t!r}")
            elif any(comp not in seen for comp in t):
                violations.append(f"weight {name}: tuple {t!r} has non-universe components")
            if not isinstance(v, ExtRational) or v.is_bot:
                violations.append(f"weight {name}: stored value for {t!r} must be a defined rational")
    return violations


def expand(s: WeightedStructure, relations=None, weights=None) -> WeightedStructure:
    """Functional alias for :meth:`WeightedStructure.expand`."""
    return s.expand(relations, weights)


def lookup_relation(s: WeightedStructure, name: str, t: Sequence[str]) -> bool:
    """Functional alias for :meth:`WeightedStructure.rel`."""
    return s.rel(name, t)


def lookup_weight(s: WeightedStructure, name: str, t: Sequence[str]) -> ExtRational:
    """Functional alias for :meth:`WeightedStructure.weight`."""
    return s.weight(name, t)


# -- JSON file format ------------------------------------------------------


def structure_to_json(s: WeightedStructure) -> dict:
    """Serialize to the structure-file dict; inverse of :func:`structure_from_json`."""
    return {
        "universe": list(s.universe),
        "relations": {
            name: {
                "arity": s.vocabulary.relations[name],
                "tuples": sorted(list(t) for t in tuples),
            }
            for name, tuples in sorted(s.relations.items())
        },
        "weights": {
            name: {
                "arity": s.vocabulary.weights[name],
                "values": [
                    {"tuple": list(t), "value": str(v)}
                    for t, v in sorted(table.items())
                ],
            }
            for name, table in sorted(s.weights.items())
        },
    }


def structure_from_json(doc: dict) -> WeightedStructure:
    """Load a structure from its JSON dict form.

    Expected shape::

        {"universe": ["v1", ...],
         "relations": {"edge": {"arity": 2, "tuples": [["v1","v2"], ...]}},
         "weights":   {"wt":   {"arity": 2, "values": [{"tuple": ["v1","v2"],
                                                        "value": "3/2"}, ...]}}}

    Weight values are strings ``"p/q"``, ``"d.ddd"`` or ``"int"`` (raw JSON
    integers are accepted too); ``bot`` is expressed by omitting the tuple.
    A tuple listed twice with different values is a load error.
    """
    if not isinstance(doc, dict) or "universe" not in doc:
        raise LoadError("structure file must be an object with a 'universe' key")
    universe = doc["universe"]
    if not isinstance(universe, list) or not all(isinstance(x, str) for x in universe):
        raise LoadError("'universe' must be a list of element names")

    relations = {}
    for name, spec in (doc.get("relations") or {}).items():
        try:
            arity = int(spec["arity"])
            tuples = [tuple(t) for t in spec.get("tuples", [])]
        except (TypeError, KeyError) as exc:
            raise LoadError(f"relation {name!r}: malformed entry") from exc
        for t in tuples:
            if len(t) != arity:
                raise LoadError(f"relation {name!r}: tuple {list(t)} does not match arity {arity}")
        relations[name] = (arity, tuples)

    weights = {}
    for name, spec in (doc.get("weights") or {}).items():
        try:
            arity = int(spec["arity"])
            entries = spec.get("values", [])
        except (TypeError, KeyError) as exc:
            raise LoadError(f"weight {name!r}: malformed entry") from exc
        table: dict = {}
        for entry in entries:
            try:
                t = tuple(entry["tuple"])
                raw = entry["value"]
            except (TypeError, KeyError) as exc:
                raise LoadError(f"weight {name!r}: malformed value entry") from exc
            if len(t) != arity:
                raise LoadError(f"weight {name!r}: tuple {list(t)} does not match arity {arity}")
            if isinstance(raw, bool) or not isinstance(raw, (str, int)):
                raise LoadError(f"weight {name!r}: value for {list(t)} must be a string or integer")
            try:
                value = ExtRational.parse(str(raw))
            except ValueError as exc:
                raise LoadError(f"weight {name!r}: {exc}") from exc
            if value.is_bot:
                raise LoadError(f"weight {name!r}: explicit 'bot' not allowed; omit the tuple instead")
            if t in table and table[t] != value:
                raise LoadError(f"weight {name!r}: tuple {list(t)} listed twice with different values")
            table[t] = value
        weights[name] = (arity, table)

    try:
        s = WeightedStructure.build(universe, relations, weights)
    except UsageError as exc:
        raise LoadError(str(exc)) from exc
    problems = validate_structure(s)
    if problems:
        raise LoadError("invalid structure: " + "; ".join(problems))
    return s


def load_structure(path: str) -> WeightedStructure:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LoadError(f"{path}: not valid JSON: {exc}") from exc
    return structure_from_json(doc)


def save_structure(s: WeightedStructure, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(structure_to_json(s), fh, indent=2, sort_keys=True)
        fh.write("\n")
