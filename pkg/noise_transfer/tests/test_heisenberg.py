import json
import math

import numpy as np
import pytest

from noise_transfer.core.domains import lattice, sign_split
from noise_transfer.core.exceptions import (
    ConsumedModeError,
    DomainError,
    UnbalancedCircuitError,
    UnboundSymbolError,
)
from noise_transfer.core.heisenberg import Engine, NoiseBindings, OperatorExpr, Symbol, variance_of
from noise_transfer.core.states import SQRT_2PI

LATTICE = lattice(SQRT_2PI)


def test_symbol_names():
    assert Symbol("SignalQ", 3, 3).name == "q_c3"
    assert Symbol("FlucP", 2, 2).name == "dp2"
    assert Symbol("VacQ", 7, 1, "gate").name == "q_v7"
    assert Symbol("MeasNoiseP", 1, 2, "det").name == "dp_m1"
    assert Symbol("ErrShift", 2, 0, "ff").name == "e2"
    assert not Symbol("ErrShift", 2, 0).is_noise
    assert Symbol("VacP", 1, 1).is_noise


def test_expression_arithmetic_and_pruning():
    a, b = Symbol("SignalQ", 1, 1), Symbol("FlucQ", 1, 1)
    x = OperatorExpr.of(a) + 2 * OperatorExpr.of(b) + 1.5
    y = x - OperatorExpr.of(b, 2.0) - 1.5
    assert y.terms == {a: 1.0}
    assert y.constant == 0.0
    tiny = OperatorExpr({a: 1e-15, b: 1.0})
    assert tiny.symbols() == [b]
    assert (-x).coeff(b) == -2.0
    assert (3 - x).constant == pytest.approx(1.5)


def test_non_finite_coefficient_rejected():
    with pytest.raises(DomainError):
        OperatorExpr({Symbol("VacQ", 1, 1): math.nan})


def test_pretty_order():
    expr = OperatorExpr(
        {
            Symbol("ErrShift", 2, 0): -1.0,
            Symbol("SignalQ", 1, 1): -1.0,
            Symbol("FlucQ", 3, 3): 1.0,
            Symbol("SignalP", 2, 2): -1.0,
        }
    )
    assert expr.pretty() == "-q_c1 - p_c2 + dq3 - e2"
    assert OperatorExpr().pretty() == "0"
    assert OperatorExpr.of(Symbol("VacP", 1, 1), 0.5).pretty() == "0.5*p_v1"


def test_record_roundtrip_keeps_origins():
    expr = OperatorExpr({Symbol("VacQ", 4, 2, "gate"): 0.25, Symbol("SignalP", 1, 1): -1.0}, 0.5)
    back = OperatorExpr.from_record(expr.to_record())
    assert back == expr
    assert {s.origin for s in back.terms} == {"gate", "prep"}


def test_evaluate_on_arrays():
    a, b = Symbol("SignalQ", 1, 1), Symbol("VacQ", 1, 1)
    expr = 2 * OperatorExpr.of(a) - OperatorExpr.of(b) + 1
    out = expr.evaluate({a: np.array([0.0, 1.0]), b: np.array([1.0, 1.0])})
    assert out.tolist() == [0.0, 2.0]


def test_bindings():
    bindings = NoiseBindings()
    fluc = Symbol("FlucQ", 1, 1)
    with pytest.raises(UnboundSymbolError):
        bindings.variance(fluc)
    bindings.bind(fluc, 0.1)
    assert bindings.variance(fluc) == 0.1
    assert bindings.variance(Symbol("VacP", 9, 1)) == 1.0
    assert bindings.variance(Symbol("SignalQ", 1, 1)) == 0.0
    with pytest.raises(DomainError):
        bindings.bind(fluc, -1.0)
    expr = OperatorExpr({fluc: 2.0, Symbol("VacQ", 1, 1): 3.0, Symbol("SignalQ", 1, 1): 5.0})
    assert variance_of(expr, bindings) == pytest.approx(4 * 0.1 + 9)


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.9, 1.0])
def test_loss_transfers_variance(eta):
    engine = Engine()
    m = engine.new_mode(0.1, 0.2)
    engine.apply_loss(m, eta)
    q = engine.quadrature(m, "q")
    assert engine.variance_of(q) == pytest.approx(eta * 0.1 + 1 - eta)
    assert engine.variance_of(engine.quadrature(m, "p")) == pytest.approx(eta * 0.2 + 1 - eta)
    assert q.coeff(Symbol("SignalQ", m, m)) == pytest.approx(math.sqrt(eta))


def test_amplifier_transfers_variance():
    engine = Engine()
    m = engine.new_mode(0.1, 0.1)
    engine.apply_amplifier(m, 2.0)
    assert engine.variance_of(engine.quadrature(m, "q")) == pytest.approx(4 * 0.1 + 3)
    with pytest.raises(DomainError):
        engine.apply_amplifier(m, 0.5)


def test_cz_and_rotation():
    engine = Engine()
    a = engine.new_mode(0.1, 0.1)
    b = engine.new_mode(0.2, 0.2)
    engine.apply_cz(a, b)
    assert engine.quadrature(a, "p").coeff(Symbol("SignalQ", b, b)) == 1.0
    assert engine.quadrature(b, "p").coeff(Symbol("SignalQ", a, a)) == 1.0
    engine.apply_rotation90(a)
    assert engine.quadrature(a, "p").coeff(Symbol("SignalQ", a, a)) == -1.0
    with pytest.raises(DomainError):
        engine.apply_cz(a, a)


def test_symplectic_form_is_preserved():
    engine = Engine()
    a = engine.new_mode(0.1, 0.1)
    b = engine.new_mode(0.1, 0.1)
    assert engine.symplectic_form(a) == pytest.approx(1.0)
    engine.apply_loss(a, 0.7)
    engine.apply_amplifier(a, 1.3)
    engine.apply_cz(a, b)
    engine.apply_rotation90(a)
    engine.apply_loss(a, 0.4, origin="gate")
    assert engine.symplectic_form(a) == pytest.approx(1.0, abs=1e-12)
    assert engine.symplectic_form(b) == pytest.approx(1.0, abs=1e-12)


def test_measurement_consumes_the_mode():
    engine = Engine()
    m = engine.new_mode(0.1, 0.1)
    expr = engine.measure(m, "p", efficiency=0.81)
    noise = [s for s in expr.terms if s.kind == "MeasNoiseP"]
    assert len(noise) == 1 and expr.coeff(noise[0]) == pytest.approx(math.sqrt(0.19))
    assert expr.coeff(Symbol("SignalP", m, m)) == pytest.approx(0.9)
    with pytest.raises(ConsumedModeError):
        engine.apply_loss(m, 0.5)
    with pytest.raises(ConsumedModeError):
        engine.quadrature(99, "q")


def test_bin_correct_on_balanced_measurement():
    engine = Engine()
    a = engine.new_mode(0.1, 0.1)
    b = engine.new_mode(0.1, 0.1)
    engine.apply_cz(a, b)
    engine.apply_loss(a, 0.64)
    measured = engine.measure(a, "p")
    result = engine.bin_correct(measured, 1 / 0.8, LATTICE)
    assert result.signal.by_name() == pytest.approx({"p_c1": 1.0, "q_c2": 1.0})
    assert result.noise_variance == pytest.approx(0.2 + 0.36 / 0.64)
    assert result.err.name == "e1"
    assert engine.ladders[result.err].variance == pytest.approx(result.noise_variance)
    assert result.feedforward.coeff(result.err) == 1.0


def test_bin_correct_rejects_unbalanced_signals():
    engine = Engine()
    a = engine.new_mode(0.1, 0.1)
    engine.apply_loss(a, 0.5)
    measured = engine.measure(a, "p")
    with pytest.raises(UnbalancedCircuitError):
        engine.bin_correct(measured, 1.0, LATTICE)
    with pytest.raises(DomainError):
        engine.bin_correct(measured, 1.0, sign_split())


def test_displacement_by_feedforward():
    engine = Engine()
    a = engine.new_mode(0.1, 0.1)
    b = engine.new_mode(0.1, 0.1)
    measured = engine.measure(a, "q")
    result = engine.bin_correct(measured, 1.0, LATTICE)
    engine.apply_displacement(b, "q", -result.feedforward)
    q = engine.quadrature(b, "q")
    assert q.by_name() == {"q_c2": 1.0, "dq2": 1.0, "q_c1": -1.0, "e1": -1.0}


def test_snapshot_is_json_ready():
    engine = Engine()
    m = engine.new_mode(0.1, 0.2)
    engine.apply_loss(m, 0.9, origin="prep")
    snap = engine.snapshot()
    json.dumps(snap)
    assert snap["bindings"] == {"dq1": 0.1, "dp1": 0.2}
    assert snap["log"][0].startswith("new_mode(1")
