"""Domain model for two-layer interdependent networks with Boolean dependency rules.

Entities live on one of two layers (``a`` and ``b``, e.g. power and
communication).  An entity may carry an implicative dependency rule (IDR): a
disjunction of *minterms*, each a conjunction of entities from the opposite
layer.  The entity stays operational while at least one of its minterms has
all members operational; once every minterm contains a failed entity, the
entity itself fails on the next cascade step.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property, total_ordering
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping


class ValidationError(ValueError):
    """A domain object or user input violates a structural invariant."""


class ParseError(ValidationError):
    """Malformed textual input; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownEntityError(ValidationError):
    """An operation referenced an entity outside the network universe."""


class BudgetExceededError(RuntimeError):
    """An exhaustive enumeration would exceed its configured cap."""


class IntegrityError(RuntimeError):
    """Two redundant computations of the same quantity disagree."""


class Layer(enum.Enum):
    """Which side of the two-layer network an entity belongs to."""

    A = "a"
    B = "b"

    @property
    def opposite(self) -> "Layer":
        return Layer.B if self is Layer.A else Layer.A

    def __str__(self) -> str:
        return self.value


_ENTITY_TOKEN = re.compile(r"\A([ab])([1-9][0-9]*)\Z")


@total_ordering
@dataclass(frozen=True)
class EntityId:
    """Identifier of a single entity, rendered as e.g. ``a3`` or ``b12``."""

    layer: Layer
    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or self.index < 1:
            raise ValidationError(f"entity index must be a positive integer, got {self.index!r}")

    @classmethod
    def parse(cls, token: str) -> "EntityId":
        m = _ENTITY_TOKEN.match(token)
        if m is None:
            raise ValidationError(f"invalid entity token {token!r}")
        return cls(Layer(m.group(1)), int(m.group(2)))

    def __lt__(self, other: "EntityId") -> bool:
        if not isinstance(other, EntityId):
            return NotImplemented
        return (self.layer.value, self.index) < (other.layer.value, other.index)

    def __str__(self) -> str:
        return f"{self.layer.value}{self.index}"

    def __repr__(self) -> str:
        return f"EntityId({self})"


@dataclass(frozen=True)
class Minterm:
    """A conjunction of same-layer entities; broken once any member fails."""

    entities: frozenset[EntityId]

    def __post_init__(self) -> None:
        if not isinstance(self.entities, frozenset):
            object.__setattr__(self, "entities", frozenset(self.entities))
        if not self.entities:
            raise ValidationError("minterm must contain at least one entity")
        if len({e.layer for e in self.entities}) != 1:
            raise ValidationError(f"minterm {{{self}}} mixes entities from both layers")

    @classmethod
    def of(cls, *tokens: str) -> "Minterm":
        return cls(frozenset(EntityId.parse(t) for t in tokens))

    @property
    def layer(self) -> Layer:
        return next(iter(self.entities)).layer

    @property
    def members(self) -> tuple[EntityId, ...]:
        return tuple(sorted(self.entities))

    def __len__(self) -> int:
        return len(self.entities)

    def __iter__(self) -> Iterator[EntityId]:
        return iter(self.members)

    def __contains__(self, item: object) -> bool:
        return item in self.entities

    def __str__(self) -> str:
        return " ".join(str(e) for e in self.members)


@dataclass(frozen=True)
class IDR:
    """One dependency rule: ``target`` survives while any minterm is intact."""

    target: EntityId
    minterms: tuple[Minterm, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.minterms, tuple):
            object.__setattr__(self, "minterms", tuple(self.minterms))
        if not self.minterms:
            raise ValidationError(f"rule for {self.target} has no minterms")
        for mt in self.minterms:
            if self.target in mt:
                raise ValidationError(f"entity {self.target} depends on itself")
            if mt.layer is not self.target.layer.opposite:
                raise ValidationError(
                    f"rule for {self.target}: minterm members must come from layer "
                    f"{self.target.layer.opposite}"
                )
        if len({mt.entities for mt in self.minterms}) != len(self.minterms):
            raise ValidationError(f"rule for {self.target} repeats a minterm")

    def __str__(self) -> str:
        return f"{self.target} <- " + " + ".join(str(mt) for mt in self.minterms)


class CaseClass(enum.Enum):
    """Shape classes of a network's rule set, from most to least restricted.

    CASE_I: every rule is a single minterm of size one.
    CASE_II: every rule is a single minterm of any size.
    CASE_III: every minterm has size one (rules may have several).
    CASE_IV: anything else (the general shape).
    """

    CASE_I = "I"
    CASE_II = "II"
    CASE_III = "III"
    CASE_IV = "IV"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class InterdependentNetwork:
    """Immutable two-layer network: an entity universe plus dependency rules.

    Entity indices are contiguous from 1 on each layer, so the textual form
    can declare the universe with two counts.  ``idrs`` preserves insertion
    order; serialization and every tie-break in the solvers rely on the
    network iterating deterministically.
    """

    entities_a: frozenset[EntityId]
    entities_b: frozenset[EntityId]
    idrs: Mapping[EntityId, IDR]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entities_a", frozenset(self.entities_a))
        object.__setattr__(self, "entities_b", frozenset(self.entities_b))
        object.__setattr__(self, "idrs", MappingProxyType(dict(self.idrs)))
        for layer, ents in ((Layer.A, self.entities_a), (Layer.B, self.entities_b)):
            bad = [e for e in ents if e.layer is not layer]
            if bad:
                raise ValidationError(f"entity {min(bad)} listed on layer {layer}")
            if sorted(e.index for e in ents) != list(range(1, len(ents) + 1)):
                raise ValidationError(f"layer {layer} indices must be contiguous from 1")
        universe = self.entities_a | self.entities_b
        for target, idr in self.idrs.items():
            if idr.target != target:
                raise ValidationError(f"rule stored under {target} targets {idr.target}")
            if target not in universe:
                raise UnknownEntityError(f"unknown entity {target}")
            for mt in idr.minterms:
                missing = mt.entities - universe
                if missing:
                    raise UnknownEntityError(f"unknown entity {min(missing)}")

    @classmethod
    def build(cls, n_a: int, n_b: int, idrs: Iterable[IDR] = ()) -> "InterdependentNetwork":
        """Construct a network with layers ``a1..a<n_a>`` and ``b1..b<n_b>``."""
        ents_a = frozenset(EntityId(Layer.A, i) for i in range(1, n_a + 1))
        ents_b = frozenset(EntityId(Layer.B, j) for j in range(1, n_b + 1))
        mapping: dict[EntityId, IDR] = {}
        for idr in idrs:
            if idr.target in mapping:
                raise ValidationError(f"duplicate rule for {idr.target}")
            mapping[idr.target] = idr
        return cls(ents_a, ents_b, mapping)

    def with_idrs(self, idrs: Iterable[IDR]) -> "InterdependentNetwork":
        """Copy of this network with the same universe but a new rule set."""
        mapping: dict[EntityId, IDR] = {}
        for idr in idrs:
            if idr.target in mapping:
                raise ValidationError(f"duplicate rule for {idr.target}")
            mapping[idr.target] = idr
        return InterdependentNetwork(self.entities_a, self.entities_b, mapping)

    @cached_property
    def universe(self) -> frozenset[EntityId]:
        return self.entities_a | self.entities_b

    @cached_property
    def sorted_entities(self) -> tuple[EntityId, ...]:
        return tuple(sorted(self.universe))

    @property
    def n(self) -> int:
        """Total number of entities across both layers."""
        return len(self.entities_a) + len(self.entities_b)

    @property
    def m(self) -> int:
        """Total number of minterms across all rules."""
        return sum(len(idr.minterms) for idr in self.idrs.values())

    def require_known(self, entities: Iterable[EntityId], what: str) -> frozenset[EntityId]:
        ents = frozenset(entities)
        missing = ents - self.universe
        if missing:
            raise UnknownEntityError(f"unknown entity {min(missing)} in {what}")
        return ents

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InterdependentNetwork):
            return NotImplemented
        return (
            self.entities_a == other.entities_a
            and self.entities_b == other.entities_b
            and list(self.idrs.items()) == list(other.idrs.items())
        )

    def __hash__(self) -> int:
        return hash((self.entities_a, self.entities_b, tuple(self.idrs.items())))

    def __repr__(self) -> str:
        return (
            f"InterdependentNetwork(a={len(self.entities_a)}, b={len(self.entities_b)}, "
            f"rules={len(self.idrs)})"
        )


def classify_case(net: InterdependentNetwork) -> CaseClass:
    """Return the tightest case class the network's rule set satisfies."""
    rules = net.idrs.values()
    single = all(len(idr.minterms) == 1 for idr in rules)
    unit = all(len(mt) == 1 for idr in rules for mt in idr.minterms)
    if single and unit:
        return CaseClass.CASE_I
    if single:
        return CaseClass.CASE_II
    if unit:
        return CaseClass.CASE_III
    return CaseClass.CASE_IV
