"""Choose up to k entities to harden so an attack causes the fewest failures.

Four solvers share one result type: an exhaustive optimum, a polynomial
optimum for single-parent (Case I) rule sets, a maximum-coverage
approximation for unit-minterm (Case III) rule sets, and a general greedy
heuristic driven by protection sets.
"""

from __future__ import annotations

import enum
import itertools
import math
import warnings
from dataclasses import dataclass

from .cascade import (
    CascadeTrace,
    _compiled,
    _entities,
    _mask,
    _settle,
    minterm_coverage_number,
    simulate,
)
from .model import (
    BudgetExceededError,
    CaseClass,
    EntityId,
    IDR,
    InterdependentNetwork,
    Minterm,
    ValidationError,
    classify_case,
)
from .vulnerability import DEFAULT_BUDGET


class HardeningMethod(enum.Enum):
    EXACT = "exact"
    CASE1 = "case1"
    CASE3_MAXCOV = "case3"
    GREEDY = "greedy"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class HardeningResult:
    """Outcome of one hardening run, re-simulated on the original network."""

    method: HardeningMethod
    hardened: frozenset[EntityId]
    final_failed: frozenset[EntityId]
    objective: int
    trace: CascadeTrace

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "hardened": [str(e) for e in sorted(self.hardened)],
            "objective": self.objective,
            "final_failed": [str(e) for e in sorted(self.final_failed)],
            "fixed_point_step": self.trace.fixed_point_step,
        }


def harden_exact(
    net: InterdependentNetwork,
    attacked: frozenset[EntityId] | set[EntityId],
    k: int,
    budget: int = DEFAULT_BUDGET,
) -> HardeningResult:
    """Enumerate every size-<=k subset of the kill set and keep the best.

    Ties break toward fewer hardened entities, then lexicographic order.
    Raises BudgetExceededError when the subset count exceeds ``budget``.
    """
    atk = _checked_attack(net, attacked, k)
    comp = _compiled(net)
    a_mask = _mask(comp, atk)
    kill, _ = _settle(comp, a_mask, 0)
    candidates = [e for e in comp.order if comp.bit[e] & kill]
    total = sum(math.comb(len(candidates), size) for size in range(0, k + 1))
    if total > budget:
        raise BudgetExceededError(
            f"{total} candidate hardening sets exceed the budget of {budget}; "
            "use harden_greedy or the LP export path"
        )
    best_obj = kill.bit_count()
    best_combo: tuple[EntityId, ...] = ()
    done = best_obj == 0
    for size in range(1, k + 1):
        if done:
            break
        for combo in itertools.combinations(candidates, size):
            h_mask = 0
            for e in combo:
                h_mask |= comp.bit[e]
            final, _ = _settle(comp, a_mask & ~h_mask, h_mask)
            obj = final.bit_count()
            if obj < best_obj:
                best_obj, best_combo = obj, combo
                if obj == 0:
                    done = True
                    break
    return _result(net, atk, frozenset(best_combo), HardeningMethod.EXACT)


def harden_case1(
    net: InterdependentNetwork, attacked: frozenset[EntityId] | set[EntityId], k: int
) -> HardeningResult:
    """Optimal hardening for single-parent rule sets, without enumeration.

    With one unit minterm per rule every entity has a unique dependency
    chain, so each attacked entity owns a disjoint slice of the kill set:
    the entities whose chain reaches it before any other attacked entity.
    Hardening a set saves exactly the union of its slices, making the k
    largest slices optimal; ties break lexicographically.  On acyclic rule
    sets each slice equals the entity's kill set minus every strictly
    contained kill set of another attacked entity; computing slices as
    protection sets keeps that identity and stays correct when mutually
    dependent entities share one kill set.
    """
    if classify_case(net) is not CaseClass.CASE_I:
        raise ValidationError("harden_case1 requires every rule to be a single unit minterm")
    atk = _checked_attack(net, attacked, k)
    comp = _compiled(net)
    a_mask = _mask(comp, atk)
    kill, _ = _settle(comp, a_mask, 0)
    order = sorted(atk)
    slice_of = {}
    for x in order:
        failed, _ = _settle(comp, a_mask & ~comp.bit[x], comp.bit[x])
        slice_of[x] = kill & ~failed
    ranked = sorted(order, key=lambda x: (-slice_of[x].bit_count(), x))
    return _result(net, atk, frozenset(ranked[:k]), HardeningMethod.CASE1)


def harden_case3_maxcov(
    net: InterdependentNetwork, attacked: frozenset[EntityId] | set[EntityId], k: int
) -> HardeningResult:
    """Greedy maximum coverage over protection sets for unit-minterm rule sets.

    For such networks protection sets are unions under joint hardening, so the
    rounds inherit the (1 - 1/e) coverage guarantee relative to the optimum.
    """
    if classify_case(net) not in (CaseClass.CASE_I, CaseClass.CASE_III):
        raise ValidationError("harden_case3_maxcov requires every minterm to have size one")
    atk = _checked_attack(net, attacked, k)
    comp = _compiled(net)
    a_mask = _mask(comp, atk)
    kill, _ = _settle(comp, a_mask, 0)
    candidates = [e for e in comp.order if comp.bit[e] & kill]
    pmask = {}
    for x in candidates:
        failed, _ = _settle(comp, a_mask & ~comp.bit[x], comp.bit[x])
        pmask[x] = kill & ~failed
    covered = 0
    chosen: list[EntityId] = []
    for _ in range(k):
        best_x = None
        best_gain = 0
        for x in candidates:
            if x in chosen:
                continue
            gain = (pmask[x] & ~covered).bit_count()
            if gain > best_gain:
                best_x, best_gain = x, gain
        if best_x is None:
            break
        chosen.append(best_x)
        covered |= pmask[best_x]
    return _result(net, atk, frozenset(chosen), HardeningMethod.CASE3_MAXCOV)


def harden_greedy(
    net: InterdependentNetwork, attacked: frozenset[EntityId] | set[EntityId], k: int
) -> HardeningResult:
    """General greedy heuristic: per round, harden the entity protecting the most.

    Rounds work on a shrinking copy of the network: entities unaffected by the
    attack, and later every protected entity, are erased from the rule set;
    hardened attacked entities stop seeding failures.  Ties break first toward
    the larger number of deletable minterms, then lexicographically.
    """
    atk = _checked_attack(net, attacked, k)
    base = _compiled(net)
    kill0 = _entities(base, _settle(base, _mask(base, atk), 0)[0])
    work = _prune_rules(net, net.universe - kill0)
    pool = sorted(kill0)
    remaining = set(atk)
    chosen: list[EntityId] = []
    while len(chosen) < k and pool and remaining:
        comp = _compiled(work)
        r_mask = _mask(comp, remaining)
        kill_now, _ = _settle(comp, r_mask, 0)
        scored: list[tuple[EntityId, int]] = []
        best_size = 0
        for x in pool:
            failed, _ = _settle(comp, r_mask & ~comp.bit[x], comp.bit[x])
            p = kill_now & ~failed
            scored.append((x, p))
            best_size = max(best_size, p.bit_count())
        if best_size == 0:
            break
        tied = [(x, p) for x, p in scored if p.bit_count() == best_size]
        x_d, p_d = tied[0]
        if len(tied) > 1:
            # pool is sorted, so keeping only strict improvements resolves
            # residual ties toward the lexicographically smallest entity
            best_mcn = -1
            for x, p in tied:
                mcn = minterm_coverage_number(work, remaining, x)
                if mcn > best_mcn:
                    x_d, p_d, best_mcn = x, p, mcn
        protected = _entities(comp, p_d)
        pool = [e for e in pool if e not in protected]
        work = _prune_rules(work, frozenset(protected))
        remaining.discard(x_d)
        chosen.append(x_d)
    return _result(net, atk, frozenset(chosen), HardeningMethod.GREEDY)


def _prune_rules(net: InterdependentNetwork, gone: frozenset[EntityId]) -> InterdependentNetwork:
    """Erase ``gone`` entities from the rule set of a working copy.

    Their own rules are dropped; their occurrences disappear from other
    minterms.  A rule whose minterm empties out can never fire again (the
    minterm's members all outlive the process) and is dropped entirely.
    """
    new_rules = []
    for target, idr in net.idrs.items():
        if target in gone:
            continue
        kept: list[Minterm] = []
        seen: set[frozenset[EntityId]] = set()
        dead = False
        for mt in idr.minterms:
            members = mt.entities - gone
            if not members:
                dead = True
                break
            if members not in seen:
                seen.add(members)
                kept.append(Minterm(members))
        if dead:
            continue
        new_rules.append(IDR(target, tuple(kept)))
    return net.with_idrs(new_rules)


def _checked_attack(
    net: InterdependentNetwork, attacked: frozenset[EntityId] | set[EntityId], k: int
) -> frozenset[EntityId]:
    atk = net.require_known(attacked, "attacked")
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")
    if atk and k >= len(atk):
        warnings.warn(
            f"hardening budget k={k} is not smaller than the attack size {len(atk)}; "
            "hardening the attacked entities themselves is then always optimal",
            UserWarning,
            stacklevel=3,
        )
    return atk


def _result(
    net: InterdependentNetwork,
    attacked: frozenset[EntityId],
    hardened: frozenset[EntityId],
    method: HardeningMethod,
) -> HardeningResult:
    trace = simulate(net, attacked, hardened)
    failed = trace.final_failed
    return HardeningResult(
        method=method,
        hardened=hardened,
        final_failed=failed,
        objective=len(failed),
        trace=trace,
    )
