"""Integer-program export, solution reading and model-fidelity checks."""

from __future__ import annotations

from pathlib import Path

import pytest

from iimnet import (
    CaseClass,
    GenConfig,
    IntegrityError,
    ParseError,
    UnknownEntityError,
    ValidationError,
    build_model,
    generate,
    minimal_failure_trace,
    parse_network,
    read_solution,
    simulate,
    write_lp,
)

import oracle
from conftest import eid, ids

GOLDEN = Path(__file__).parent / "data" / "demo_k1.lp"


@pytest.fixture(scope="module")
def demo_model(demo, demo_attack):
    return build_model(demo, demo_attack, 1)


class TestBuildModel:
    def test_demo_dimensions(self, demo_model):
        assert demo_model.horizon == 6
        assert len(demo_model.variables) == 62
        assert len(demo_model.constraints) == 146
        assert len(demo_model.aux_minterms) == 1

    def test_demo_aux_only_for_wide_disjunction_minterms(self, demo_model):
        (aux,) = demo_model.aux_minterms
        assert aux == (1, eid("b1"), ids("a1", "a3"))

    def test_mixed_rule_gets_one_aux_per_wide_minterm(self):
        net = parse_network("a1 <- b1 b2 b3 + b4 b5 + b6\n")
        model = build_model(net, ids("b6"), 0)
        assert model.horizon == 6
        assert model.aux_minterms == (
            (1, eid("a1"), ids("b1", "b2", "b3")),
            (2, eid("a1"), ids("b4", "b5")),
        )
        assert len(model.variables) == 7 + 7 * 7 + 2 * 6
        assert len(model.constraints) == 1 + 7 + 42 + 24 + 12
        text = write_lp(model)
        # same-step aux variables, previous-step entity states, m - 1 slack
        assert " casc_a1_1_lo: x_1_1 + q_a_1 - c_1_1 - c_2_1 - y_6_0 >= -2" in text
        assert " mix_c1_1_lo: c_1_1 - 0.333333333333 y_1_0" in text

    def test_attack_vector_mapping_form(self, demo, demo_attack):
        vec = {e: (1 if e in demo_attack else 0) for e in demo.universe}
        model = build_model(demo, vec, 1)
        assert model.attacked == demo_attack

    def test_unknown_attack_entity(self, demo):
        with pytest.raises(UnknownEntityError):
            build_model(demo, ids("b9"), 1)

    def test_negative_k(self, demo, demo_attack):
        with pytest.raises(ValidationError):
            build_model(demo, demo_attack, -1)

    def test_ruleless_network(self):
        net = parse_network("entities a:2 b:1\n")
        model = build_model(net, ids("a1"), 0)
        assert model.horizon == 2
        assert len(model.constraints) == 1 + 3 + 6
        assert minimal_failure_trace(model, ()) == (ids("a1"),) * 3

    def test_empty_network(self):
        net = parse_network("entities a:0 b:0\n")
        model = build_model(net, (), 0)
        assert write_lp(model).startswith("Minimize\n obj: 0\n")


class TestWriteLp:
    def test_golden_text(self, demo_model):
        assert write_lp(demo_model) == GOLDEN.read_text(encoding="utf-8")

    def test_file_output_round_trip(self, demo_model, tmp_path):
        out = tmp_path / "model.lp"
        text = write_lp(demo_model, out=str(out))
        assert out.read_text(encoding="utf-8") == text

    def test_deterministic(self, demo, demo_attack):
        a = write_lp(build_model(demo, demo_attack, 1))
        b = write_lp(build_model(demo, demo_attack, 1))
        assert a == b


class TestReadSolution:
    def test_defence_above_half_is_hardened(self, demo_model):
        sol = read_solution(demo_model, "q_a_2 1\n")
        assert sol.hardened == ids("a2")
        assert sol.objective == 1

    def test_equals_sign_and_comments(self, demo_model):
        text = "# solver log\n\nq_a_2=1\nobjective 1\n"
        sol = read_solution(demo_model, text)
        assert sol.hardened == ids("a2")
        assert sol.objective == 1

    def test_no_defences_resimulates_full_cascade(self, demo, demo_attack):
        model = build_model(demo, demo_attack, 0)
        sol = read_solution(model, "")
        assert sol.hardened == frozenset()
        assert sol.objective == 7

    def test_objective_derived_from_complete_final_states(self, demo_model):
        lines = ["q_a_2 1"]
        lines += [f"x_{i}_6 0" for i in range(1, 5)]
        lines += ["y_1_6 0", "y_2_6 0", "y_3_6 1"]
        sol = read_solution(demo_model, "\n".join(lines))
        assert sol.objective == 1

    def test_inconsistent_final_states_rejected(self, demo_model):
        # claims nothing fails although no defence is set
        lines = [f"x_{i}_6 0" for i in range(1, 5)]
        lines += ["y_1_6 0", "y_2_6 0", "y_3_6 0"]
        with pytest.raises(IntegrityError):
            read_solution(demo_model, "\n".join(lines))

    def test_reported_objective_mismatch(self, demo_model):
        with pytest.raises(IntegrityError):
            read_solution(demo_model, "q_a_2 1\nobjective 3\n")

    def test_malformed_line(self, demo_model):
        with pytest.raises(ParseError):
            read_solution(demo_model, "too many fields here\n")

    def test_non_numeric_value(self, demo_model):
        with pytest.raises(ParseError):
            read_solution(demo_model, "q_a_2 yes\n")

    def test_unknown_variable(self, demo_model):
        with pytest.raises(ParseError):
            read_solution(demo_model, "z_9_9 1\n")


class TestModelFidelity:
    def compare(self, net, attacked, k, hardened):
        model = build_model(net, attacked, k)
        got = minimal_failure_trace(model, hardened)
        trace = simulate(net, attacked, hardened)
        want = tuple(trace.failed_at(d) for d in range(model.horizon + 1))
        assert got == want

    def test_demo_without_defence(self, demo, demo_attack):
        self.compare(demo, demo_attack, 0, ())

    @pytest.mark.parametrize("entity", ["a1", "a2", "b1", "b3"])
    def test_demo_single_defences(self, demo, demo_attack, entity):
        self.compare(demo, demo_attack, 1, ids(entity))

    def test_demo_pair_defence(self, demo, demo_attack):
        self.compare(demo, demo_attack, 2, ids("a2", "b3"))

    @pytest.mark.parametrize("seed", range(20))
    def test_generated_networks(self, seed):
        case = list(CaseClass)[seed % 4]
        net = generate(GenConfig(case=case, n_a=4, n_b=4, idr_density=0.9, seed=seed))
        order = net.sorted_entities
        attacked = frozenset(order[seed % 3::3])
        hardened = frozenset(order[(seed + 1) % 4::5])
        self.compare(net, attacked, len(hardened), hardened)


class TestExternalSolver:
    def test_demo_k1_optimum(self, demo_model):
        pytest.importorskip("scipy")
        objective, defended = oracle.solve_milp(demo_model)
        assert objective == 1
        assert defended == ["q_a_2"]
        sol = read_solution(demo_model, f"objective {objective}\n" + "\n".join(f"{n} 1" for n in defended))
        assert sol.hardened == ids("a2")

    def test_demo_k2_optimum(self, demo, demo_attack):
        pytest.importorskip("scipy")
        model = build_model(demo, demo_attack, 2)
        objective, defended = oracle.solve_milp(model)
        assert objective == 0
        assert sorted(defended) == ["q_a_2", "q_b_3"]
