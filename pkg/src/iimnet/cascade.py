"""Deterministic time-stepped failure propagation with hardening.

States evolve synchronously: an alive entity with a rule fails at step t+1
iff every one of its minterms contains an entity failed at step t.  Hardened
entities never fail and never count as failed inside a minterm, even when
attacked.  Failures are permanent, so the process is monotone and reaches a
fixed point after at most n-1 steps.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import EntityId, IDR, InterdependentNetwork, Minterm


class EntityState(enum.Enum):
    ALIVE = "0"
    FAILED = "1"
    HARDENED = "*"


@dataclass(frozen=True)
class CascadeTrace:
    """Per-step entity states from the initial failures to the fixed point.

    ``steps[t]`` maps every entity to its state after cascade step ``t``.
    Consecutive steps differ only by alive-to-failed transitions and the last
    recorded step is the first one no further step can change.
    """

    entities: tuple[EntityId, ...]
    steps: tuple[Mapping[EntityId, EntityState], ...]

    @property
    def fixed_point_step(self) -> int:
        return len(self.steps) - 1

    def state_at(self, t: int) -> Mapping[EntityId, EntityState]:
        """State vector after step ``t``; past the fixed point it stays constant."""
        if t < 0:
            raise IndexError("step must be >= 0")
        return self.steps[min(t, self.fixed_point_step)]

    def failed_at(self, t: int) -> frozenset[EntityId]:
        return frozenset(e for e, s in self.state_at(t).items() if s is EntityState.FAILED)

    @property
    def final_failed(self) -> frozenset[EntityId]:
        return self.failed_at(self.fixed_point_step)

    def failure_time(self, entity: EntityId) -> int | None:
        """First step at which ``entity`` is failed, or None if it never fails."""
        for t, state in enumerate(self.steps):
            if state[entity] is EntityState.FAILED:
                return t
        return None

    def to_csv(self, horizon: int | None = None) -> str:
        """Render as CSV, rows = entities, columns = steps, cells 0/1/*.

        ``horizon`` pads (or clips) the column range to ``t0..t<horizon>``;
        padding repeats the fixed-point state.
        """
        last = self.fixed_point_step if horizon is None else horizon
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["entity"] + [f"t{t}" for t in range(last + 1)])
        for e in self.entities:
            writer.writerow([str(e)] + [self.state_at(t)[e].value for t in range(last + 1)])
        return buf.getvalue()


# Internal bit-level engine.  Entities map to bit positions in sorted order;
# a minterm is a mask and is broken iff it intersects the failed mask.

@dataclass(frozen=True)
class _Compiled:
    order: tuple[EntityId, ...]
    bit: Mapping[EntityId, int]
    rules: tuple[tuple[int, tuple[int, ...]], ...]


def _compiled(net: InterdependentNetwork) -> _Compiled:
    comp = net.__dict__.get("_cascade_compiled")
    if comp is None:
        order = net.sorted_entities
        bit = {e: 1 << i for i, e in enumerate(order)}
        rules = tuple(
            (bit[target], tuple(sum(bit[e] for e in mt.entities) for mt in idr.minterms))
            for target, idr in net.idrs.items()
        )
        comp = _Compiled(order, bit, rules)
        net.__dict__["_cascade_compiled"] = comp
    return comp


def _mask(comp: _Compiled, entities: Iterable[EntityId]) -> int:
    total = 0
    for e in entities:
        total |= comp.bit[e]
    return total


def _entities(comp: _Compiled, mask: int) -> frozenset[EntityId]:
    return frozenset(e for e in comp.order if comp.bit[e] & mask)


def _step(comp: _Compiled, failed: int, hardened: int) -> int:
    nxt = failed
    for ebit, masks in comp.rules:
        if ebit & (nxt | hardened):
            continue
        for m in masks:
            if not m & failed:
                break
        else:
            nxt |= ebit
    return nxt


def _settle(comp: _Compiled, failed: int, hardened: int) -> tuple[int, int]:
    """Run to the fixed point; returns (final failed mask, steps taken)."""
    steps = 0
    while True:
        nxt = _step(comp, failed, hardened)
        if nxt == failed:
            return failed, steps
        failed = nxt
        steps += 1


def simulate(
    net: InterdependentNetwork,
    attacked: Iterable[EntityId],
    hardened: Iterable[EntityId] = (),
) -> CascadeTrace:
    """Cascade the initial failures ``attacked`` with ``hardened`` protected.

    The two sets may intersect; hardening wins.  Iteration stops at the first
    repeated state vector.
    """
    atk = net.require_known(attacked, "attacked")
    hrd = net.require_known(hardened, "hardened")
    comp = _compiled(net)
    h_mask = _mask(comp, hrd)
    failed = _mask(comp, atk) & ~h_mask
    masks = [failed]
    while True:
        nxt = _step(comp, failed, h_mask)
        if nxt == failed:
            break
        failed = nxt
        masks.append(failed)
    steps = tuple(
        {
            e: (
                EntityState.HARDENED
                if comp.bit[e] & h_mask
                else EntityState.FAILED if comp.bit[e] & m else EntityState.ALIVE
            )
            for e in comp.order
        }
        for m in masks
    )
    return CascadeTrace(comp.order, steps)


def kill_set(net: InterdependentNetwork, entities: Iterable[EntityId]) -> frozenset[EntityId]:
    """All entities that eventually fail when ``entities`` fail initially."""
    s = net.require_known(entities, "attacked")
    comp = _compiled(net)
    final, _ = _settle(comp, _mask(comp, s), 0)
    return _entities(comp, final)


def protection_set(
    net: InterdependentNetwork, attacked: Iterable[EntityId], x: EntityId
) -> frozenset[EntityId]:
    """Entities saved from the attack's kill set by hardening ``x`` alone.

    ``x`` itself is in the result exactly when it belongs to the kill set.
    """
    atk = net.require_known(attacked, "attacked")
    net.require_known((x,), "hardened")
    comp = _compiled(net)
    a_mask = _mask(comp, atk)
    kill, _ = _settle(comp, a_mask, 0)
    x_bit = comp.bit[x]
    failed, _ = _settle(comp, a_mask & ~x_bit, x_bit)
    return _entities(comp, kill & ~failed)


def minterm_coverage_number(
    net: InterdependentNetwork, attacked: Iterable[EntityId], x: EntityId
) -> int:
    """Count minterms whose deletion leaves the cascade under ``x`` hardened unchanged.

    A minterm is counted when (a) deleting it (dropping the whole rule if it
    was the last minterm) reproduces the same fixed-point failed set under
    (attacked, hardened={x}), and (b) it is relevant to ``x``: it contains
    ``x`` or targets an entity in ``protection_set(net, attacked, x)``.
    """
    atk = net.require_known(attacked, "attacked")
    net.require_known((x,), "hardened")
    comp = _compiled(net)
    a_mask = _mask(comp, atk)
    x_bit = comp.bit[x]
    kill, _ = _settle(comp, a_mask, 0)
    base, _ = _settle(comp, a_mask & ~x_bit, x_bit)
    protected = _entities(comp, kill & ~base)
    base_failed = _entities(comp, base)

    count = 0
    for target, idr in net.idrs.items():
        for i, mt in enumerate(idr.minterms):
            if x not in mt and target not in protected:
                continue
            trimmed = _drop_minterm(net, target, i)
            tcomp = _compiled(trimmed)
            failed, _ = _settle(tcomp, _mask(tcomp, atk - {x}), _mask(tcomp, (x,)))
            if _entities(tcomp, failed) == base_failed:
                count += 1
    return count


def _drop_minterm(net: InterdependentNetwork, target: EntityId, pos: int) -> InterdependentNetwork:
    new_rules = []
    for t, idr in net.idrs.items():
        if t != target:
            new_rules.append(idr)
            continue
        rest = idr.minterms[:pos] + idr.minterms[pos + 1 :]
        if rest:
            new_rules.append(IDR(t, rest))
    return net.with_idrs(new_rules)
