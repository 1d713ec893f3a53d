"""Search for the K initial failures that maximize eventual damage."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .cascade import _compiled, _entities, _settle
from .model import BudgetExceededError, InterdependentNetwork, EntityId, ValidationError

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class AttackAssessment:
    """An attack set together with everything it eventually brings down."""

    attacked: frozenset[EntityId]
    killed: frozenset[EntityId]
    objective: int
    unique: bool


def most_vulnerable_exact(
    net: InterdependentNetwork, K: int, budget: int = DEFAULT_BUDGET
) -> AttackAssessment:
    """Exhaustively find a size-K attack maximizing the kill set.

    The result is deterministic: among all subsets of maximum kill-set size,
    prefer the one whose members have the smallest combined individual kill
    sets (the attack owing most of its damage to interaction rather than to
    any single member), and break remaining ties lexicographically over
    sorted entity ids.  ``unique`` tells whether any other subset tied the
    primary objective.  Raises BudgetExceededError when C(n, K) exceeds
    ``budget``.
    """
    _check_k(net, K)
    total = math.comb(net.n, K)
    if total > budget:
        raise BudgetExceededError(
            f"{total} candidate attack sets exceed the budget of {budget}; "
            "use most_vulnerable_greedy or the LP export path"
        )
    comp = _compiled(net)
    singles = {e: _settle(comp, comp.bit[e], 0)[0] for e in comp.order}
    # With single-parent rules (one unit minterm each) a subset's kill set is
    # exactly the union of the singleton kill sets; otherwise the union is a
    # sound seed for the fixed-point iteration.
    union_exact = all(
        len(idr.minterms) == 1 and len(idr.minterms[0]) == 1 for idr in net.idrs.values()
    )

    single_size = {e: singles[e].bit_count() for e in comp.order}
    best_set: tuple[EntityId, ...] | None = None
    best_mask = 0
    best_obj = -1
    best_syn = 0
    ties = 0
    for combo in itertools.combinations(comp.order, K):
        seed = 0
        for e in combo:
            seed |= singles[e]
        if union_exact:
            final = seed
        else:
            final, _ = _settle(comp, seed, 0)
        obj = final.bit_count()
        if obj > best_obj:
            best_obj, best_set, best_mask, ties = obj, combo, final, 1
            best_syn = sum(single_size[e] for e in combo)
        elif obj == best_obj:
            ties += 1
            syn = sum(single_size[e] for e in combo)
            if syn < best_syn:
                best_syn, best_set, best_mask = syn, combo, final
    assert best_set is not None
    return AttackAssessment(
        attacked=frozenset(best_set),
        killed=_entities(comp, best_mask),
        objective=best_obj,
        unique=ties == 1,
    )


def most_vulnerable_greedy(net: InterdependentNetwork, K: int) -> AttackAssessment:
    """Build an attack set by repeatedly adding the entity of largest marginal damage.

    Ties go to the lexicographically smallest entity.  ``unique`` reports
    whether every round's pick was untied; the objective never exceeds the
    exact optimum.
    """
    _check_k(net, K)
    comp = _compiled(net)
    chosen_mask = 0
    chosen: list[EntityId] = []
    untied = True
    for _ in range(K):
        best_e = None
        best_mask = 0
        best_obj = -1
        round_tied = False
        for e in comp.order:
            if comp.bit[e] & chosen_mask:
                continue
            final, _ = _settle(comp, chosen_mask | comp.bit[e], 0)
            obj = final.bit_count()
            if obj > best_obj:
                best_e, best_mask, best_obj, round_tied = e, final, obj, False
            elif obj == best_obj:
                round_tied = True
        assert best_e is not None
        chosen.append(best_e)
        chosen_mask |= comp.bit[best_e]
        untied = untied and not round_tied
    final, _ = _settle(comp, chosen_mask, 0)
    return AttackAssessment(
        attacked=frozenset(chosen),
        killed=_entities(comp, final),
        objective=final.bit_count(),
        unique=untied,
    )


def _check_k(net: InterdependentNetwork, K: int) -> None:
    if K < 0:
        raise ValidationError(f"K must be >= 0, got {K}")
    if K > net.n:
        raise ValidationError(f"K={K} exceeds the {net.n} entities in the network")
