"""Read and write the ``.idr`` text format.

One rule per line::

    # comment
    entities a:4 b:3
    b1 <- a1 a3 + a2

The optional ``entities`` header must be the first content line and declares
the layer sizes, which is the only way to include entities that carry no rule
and appear in no minterm.  Without a header the universe is inferred as
``1..max`` of the indices actually mentioned on each layer.  Entity tokens
match ``[ab][1-9][0-9]*``; ``#`` starts a comment; blank lines are ignored;
both LF and CRLF endings are accepted.
"""

from __future__ import annotations

import re

from .model import (
    IDR,
    EntityId,
    InterdependentNetwork,
    Layer,
    Minterm,
    ParseError,
    ValidationError,
)

_HEADER = re.compile(r"\Aentities\s+a:(\d+)\s+b:(\d+)\Z")


def parse_network(text: str) -> InterdependentNetwork:
    """Parse ``.idr`` text into a network.

    Raises ParseError (with the offending line number) for malformed tokens,
    duplicate rules, empty or mixed-layer minterms, self-dependent targets
    and, when a header is present, references outside the declared universe.
    """
    header: tuple[int, int] | None = None
    rules: list[tuple[int, IDR]] = []
    seen_targets: dict[EntityId, int] = {}
    max_index = {Layer.A: 0, Layer.B: 0}
    first_content = True

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("entities"):
            m = _HEADER.match(line)
            if m is None:
                raise ParseError("malformed entities header", lineno)
            if not first_content:
                raise ParseError("entities header must be the first content line", lineno)
            header = (int(m.group(1)), int(m.group(2)))
            first_content = False
            continue
        first_content = False

        if "<-" not in line:
            raise ParseError("expected '<-' between target and minterms", lineno)
        lhs, rhs = line.split("<-", 1)
        if "<-" in rhs:
            raise ParseError("more than one '<-' on a line", lineno)
        target = _parse_entity(lhs.strip(), lineno, header)
        max_index[target.layer] = max(max_index[target.layer], target.index)
        if target in seen_targets:
            raise ParseError(
                f"duplicate rule for {target} (first on line {seen_targets[target]})", lineno
            )
        seen_targets[target] = lineno

        minterms: list[Minterm] = []
        for chunk in rhs.split("+"):
            tokens = chunk.split()
            if not tokens:
                raise ParseError(f"empty minterm in rule for {target}", lineno)
            members: list[EntityId] = []
            for tok in tokens:
                ent = _parse_entity(tok, lineno, header)
                if ent == target:
                    raise ParseError(f"entity {target} depends on itself", lineno)
                if ent.layer is target.layer:
                    raise ParseError(
                        f"minterm members of {target} must come from layer "
                        f"{target.layer.opposite}",
                        lineno,
                    )
                if ent in members:
                    raise ParseError(f"entity {ent} repeated within a minterm", lineno)
                members.append(ent)
                max_index[ent.layer] = max(max_index[ent.layer], ent.index)
            minterms.append(Minterm(frozenset(members)))
        try:
            rules.append((lineno, IDR(target, tuple(minterms))))
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from exc

    n_a, n_b = header if header is not None else (max_index[Layer.A], max_index[Layer.B])
    try:
        return InterdependentNetwork.build(n_a, n_b, [idr for _, idr in rules])
    except ValidationError as exc:
        raise ParseError(str(exc)) from exc


def serialize_network(net: InterdependentNetwork) -> str:
    """Render a network in canonical ``.idr`` text (header plus one rule per line).

    Minterm members are emitted in sorted order and rules in stored order, so
    ``parse_network(serialize_network(net)) == net`` and serialization is stable.
    """
    lines = [f"entities a:{len(net.entities_a)} b:{len(net.entities_b)}"]
    lines.extend(str(idr) for idr in net.idrs.values())
    return "\n".join(lines) + "\n"


def _parse_entity(token: str, lineno: int, header: tuple[int, int] | None) -> EntityId:
    try:
        ent = EntityId.parse(token)
    except ValidationError as exc:
        raise ParseError(str(exc), lineno) from exc
    if header is not None:
        limit = header[0] if ent.layer is Layer.A else header[1]
        if ent.index > limit:
            raise ParseError(f"unknown entity {ent} (layer {ent.layer} has {limit})", lineno)
    return ent
