"""Binary integer program for the hardening problem, plus LP text serialization.

The model tracks one binary state variable per entity per cascade step
(``x_<i>_<d>`` on layer a, ``y_<j>_<d>`` on layer b, value 1 = failed), one
defence indicator per entity (``q_a_<i>``, ``q_b_<j>``) and one auxiliary
binary per multi-member minterm of a multi-minterm rule (``c_<t>_<d>``).
Lower-bound constraints force failures to propagate exactly one step behind
their causes; upper bounds pin non-failures so feasible points track the
cascade.  The objective minimizes failures at the final step of the horizon
(n - 1 steps suffice for any fixed point).

No solver is bundled: the contract ends at the LP file and the solution
reader, which re-simulates the hardened cascade as an integrity check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .cascade import simulate
from .model import (
    EntityId,
    IntegrityError,
    InterdependentNetwork,
    Layer,
    ParseError,
    ValidationError,
)

Terms = tuple[tuple[float, str], ...]


@dataclass(frozen=True)
class IlpVariable:
    name: str
    kind: str = "binary"


@dataclass(frozen=True)
class IlpConstraint:
    name: str
    terms: Terms
    relation: str  # one of "<=", ">=", "="
    rhs: float
    # scheduling metadata for lower-bound propagation; not serialized
    step: int | None = None
    phase: int = 1  # 0 settles auxiliary minterm variables, 1 entity states


@dataclass(frozen=True, eq=False)
class IlpModel:
    net: InterdependentNetwork
    attacked: frozenset[EntityId]
    k: int
    horizon: int
    variables: tuple[IlpVariable, ...]
    objective: Terms  # minimized
    constraints: tuple[IlpConstraint, ...]
    state_var: Mapping[tuple[EntityId, int], str]
    defend_var: Mapping[EntityId, str]
    aux_minterms: tuple[tuple[int, EntityId, frozenset[EntityId]], ...]


@dataclass(frozen=True)
class IlpSolution:
    hardened: frozenset[EntityId]
    objective: int


def build_model(
    net: InterdependentNetwork,
    attack_vector: Mapping[EntityId, int] | Iterable[EntityId],
    k: int,
) -> IlpModel:
    """Assemble the hardening program for ``net`` under the given attack.

    ``attack_vector`` may be a 0/1 mapping over entities or simply the set of
    attacked entities.  ``k`` is the exact number of defence slots.
    """
    if isinstance(attack_vector, Mapping):
        attacked = frozenset(e for e, v in attack_vector.items() if int(v) == 1)
        net.require_known(attack_vector.keys(), "attack vector")
    else:
        attacked = frozenset(attack_vector)
    attacked = net.require_known(attacked, "attack vector")
    if k < 0:
        raise ValidationError(f"k must be >= 0, got {k}")

    horizon = max(net.n - 1, 0)
    entities = sorted(net.universe)

    def state(e: EntityId, d: int) -> str:
        sym = "x" if e.layer is Layer.A else "y"
        return f"{sym}_{e.index}_{d}"

    def defend(e: EntityId) -> str:
        return f"q_{e.layer.value}_{e.index}"

    state_var = {(e, d): state(e, d) for e in entities for d in range(horizon + 1)}
    defend_var = {e: defend(e) for e in entities}

    variables = [IlpVariable(defend(e)) for e in entities]
    variables += [IlpVariable(state(e, d)) for e in entities for d in range(horizon + 1)]

    constraints: list[IlpConstraint] = []
    constraints.append(
        IlpConstraint(
            name="defence_budget",
            terms=tuple((1.0, defend(e)) for e in entities),
            relation="=",
            rhs=float(k),
        )
    )
    for e in entities:
        g = 1.0 if e in attacked else 0.0
        constraints.append(
            IlpConstraint(
                name=f"init_{e}",
                terms=((1.0, state(e, 0)), (1.0, defend(e))),
                relation=">=",
                rhs=g,
                step=0,
            )
        )
    for e in entities:
        for d in range(1, horizon + 1):
            constraints.append(
                IlpConstraint(
                    name=f"keep_{e}_{d}",
                    terms=((1.0, state(e, d)), (-1.0, state(e, d - 1))),
                    relation=">=",
                    rhs=0.0,
                    step=d,
                )
            )

    aux_minterms: list[tuple[int, EntityId, frozenset[EntityId]]] = []
    next_aux = 1
    for target, idr in net.idrs.items():
        g = 1.0 if target in attacked else 0.0
        if len(idr.minterms) == 1 and len(idr.minterms[0]) > 1:
            # native single-conjunction rule: constrain the target directly
            members = idr.minterms[0].members
            inv = 1.0 / len(members)
            for d in range(1, horizon + 1):
                prev = [(-inv, state(y, d - 1)) for y in members]
                constraints.append(
                    IlpConstraint(
                        name=f"conj_{target}_{d}_lo",
                        terms=((1.0, state(target, d)), (1.0, defend(target)), *prev),
                        relation=">=",
                        rhs=0.0,
                        step=d,
                    )
                )
                full = [(-1.0, state(y, d - 1)) for y in members]
                constraints.append(
                    IlpConstraint(
                        name=f"conj_{target}_{d}_hi",
                        terms=((1.0, state(target, d)), *full),
                        relation="<=",
                        rhs=g,
                        step=d,
                    )
                )
            continue
        # disjunction of minterms: multi-member minterms get an auxiliary
        # variable that turns on one step after the minterm breaks
        parts: list[tuple[str, object]] = []
        for mt in idr.minterms:
            if len(mt) == 1:
                parts.append(("ent", mt.members[0]))
            else:
                parts.append(("aux", next_aux))
                aux_minterms.append((next_aux, target, mt.entities))
                next_aux += 1
        for t, tgt, members in aux_minterms:
            if tgt != target:
                continue
            ordered = sorted(members)
            inv = 1.0 / len(ordered)
            for d in range(1, horizon + 1):
                aux_name = f"c_{t}_{d}"
                constraints.append(
                    IlpConstraint(
                        name=f"mix_c{t}_{d}_lo",
                        terms=((1.0, aux_name), *[(-inv, state(y, d - 1)) for y in ordered]),
                        relation=">=",
                        rhs=0.0,
                        step=d,
                        phase=0,
                    )
                )
                constraints.append(
                    IlpConstraint(
                        name=f"mix_c{t}_{d}_hi",
                        terms=((1.0, aux_name), *[(-1.0, state(y, d - 1)) for y in ordered]),
                        relation="<=",
                        rhs=0.0,
                        step=d,
                        phase=0,
                    )
                )
        m_count = len(parts)
        inv_m = 1.0 / m_count
        for d in range(1, horizon + 1):
            lo: list[tuple[float, str]] = [(1.0, state(target, d)), (1.0, defend(target))]
            hi: list[tuple[float, str]] = [(1.0, state(target, d))]
            for kind, payload in parts:
                if kind == "aux":
                    lo.append((-1.0, f"c_{payload}_{d}"))
                    hi.append((-inv_m, f"c_{payload}_{d}"))
                else:
                    lo.append((-1.0, state(payload, d - 1)))
                    hi.append((-inv_m, state(payload, d - 1)))
            constraints.append(
                IlpConstraint(
                    name=f"casc_{target}_{d}_lo",
                    terms=tuple(lo),
                    relation=">=",
                    rhs=-(m_count - 1.0),
                    step=d,
                )
            )
            constraints.append(
                IlpConstraint(
                    name=f"casc_{target}_{d}_hi",
                    terms=tuple(hi),
                    relation="<=",
                    rhs=g,
                    step=d,
                )
            )

    variables += [
        IlpVariable(f"c_{t}_{d}")
        for t, _, _ in aux_minterms
        for d in range(1, horizon + 1)
    ]
    objective = tuple((1.0, state(e, horizon)) for e in entities)
    return IlpModel(
        net=net,
        attacked=attacked,
        k=k,
        horizon=horizon,
        variables=tuple(variables),
        objective=objective,
        constraints=tuple(constraints),
        state_var=state_var,
        defend_var=defend_var,
        aux_minterms=tuple(aux_minterms),
    )


def write_lp(model: IlpModel, out: str | None = None) -> str:
    """Serialize the model as deterministic CPLEX-style LP text.

    Fractional coefficients keep 12 significant digits.  When ``out`` is given
    the text is also written to that path.
    """
    lines = ["Minimize", " obj: " + _render_terms(model.objective), "Subject To"]
    for c in model.constraints:
        lines.append(f" {c.name}: {_render_terms(c.terms)} {c.relation} {_num(c.rhs)}")
    lines.append("Binaries")
    names = [v.name for v in model.variables]
    for start in range(0, len(names), 10):
        lines.append(" " + " ".join(names[start : start + 10]))
    lines.append("End")
    text = "\n".join(lines) + "\n"
    if out is not None:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


def read_solution(model: IlpModel, solver_output: str) -> IlpSolution:
    """Extract the hardening choice from solver output and cross-check it.

    Accepts one ``name value`` (or ``name=value``) pair per line; an optional
    ``objective`` line reports the solver optimum.  Defence variables above
    0.5 form the hardened set; the objective is recomputed by simulation and
    must match the reported optimum when one is present.
    """
    values: dict[str, float] = {}
    reported: float | None = None
    known = {v.name for v in model.variables}
    for lineno, raw in enumerate(solver_output.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.replace("=", " ").split()
        if len(fields) != 2:
            raise ParseError(f"expected 'name value', got {line!r}", lineno)
        name, text = fields
        try:
            value = float(text)
        except ValueError as exc:
            raise ParseError(f"non-numeric value {text!r} for {name}", lineno) from exc
        if name == "objective":
            reported = value
        elif name in known:
            values[name] = value
        else:
            raise ParseError(f"unknown variable {name!r}", lineno)

    hardened = frozenset(
        e for e, q in model.defend_var.items() if values.get(q, 0.0) > 0.5
    )
    simulated = len(simulate(model.net, model.attacked, hardened).final_failed)
    if reported is None:
        finals = [model.state_var[(e, model.horizon)] for e in sorted(model.net.universe)]
        if finals and all(name in values for name in finals):
            reported = sum(values[name] for name in finals)
    if reported is not None and round(reported) != simulated:
        raise IntegrityError(
            f"solver reported objective {reported} but re-simulation under "
            f"hardened={sorted(map(str, hardened))} fails {simulated} entities"
        )
    return IlpSolution(hardened=hardened, objective=simulated)


def minimal_failure_trace(
    model: IlpModel, hardened: Iterable[EntityId]
) -> tuple[frozenset[EntityId], ...]:
    """Propagate the model's lower-bound constraints with defences pinned.

    Returns the per-step failed sets of the smallest binary assignment that
    satisfies every >= constraint, which must coincide with the simulator's
    trace; used as a model-fidelity check.
    """
    pinned = model.net.require_known(hardened, "hardened")
    values = {v.name: 0.0 for v in model.variables}
    defends = set(model.defend_var.values())
    for e in pinned:
        values[model.defend_var[e]] = 1.0

    ordered = sorted(
        (c for c in model.constraints if c.relation == ">="),
        key=lambda c: (c.step if c.step is not None else -1, c.phase),
    )
    changed = True
    while changed:
        changed = False
        for c in ordered:
            target = None
            rest = 0.0
            for coeff, name in c.terms:
                if coeff > 0 and name not in defends:
                    if target is not None:
                        raise IntegrityError(f"constraint {c.name} has no single target")
                    target = name
                else:
                    rest += coeff * values[name]
            if target is None:
                raise IntegrityError(f"constraint {c.name} has no raisable variable")
            need = c.rhs - rest
            if need > 1e-9 and values[target] < 0.5:
                if need > 1.0 + 1e-9:
                    raise IntegrityError(f"constraint {c.name} needs {need} from a binary")
                values[target] = 1.0
                changed = True
    return tuple(
        frozenset(
            e for e in model.net.universe if values[model.state_var[(e, d)]] > 0.5
        )
        for d in range(model.horizon + 1)
    )


def _num(value: float) -> str:
    if value == int(value):
        return str(int(value))
    return f"{value:.12g}"


def _render_terms(terms: Terms) -> str:
    if not terms:
        return "0"
    pieces: list[str] = []
    for i, (coeff, name) in enumerate(terms):
        mag = abs(coeff)
        body = name if mag == 1.0 else f"{_num(mag)} {name}"
        if i == 0:
            pieces.append(body if coeff >= 0 else f"- {body}")
        else:
            pieces.append(f"{'+' if coeff >= 0 else '-'} {body}")
    return " ".join(pieces)
