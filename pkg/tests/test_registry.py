"""Shipped reference models and their recorded values."""

import pytest

from quarterwalk import registry
from quarterwalk.errors import UnknownModel
from quarterwalk.model import dump_model_config, parse_model_config, validate


def test_names_complete():
    assert registry.names() == ("fibonacci-identical", "fibonacci-mixed",
                                "finite-group-simple", "generic-singular-demo")


def test_unknown_model():
    with pytest.raises(UnknownModel):
        registry.get("brownian")


def test_every_model_validates():
    for name in registry.names():
        ref = registry.get(name)
        report = validate(ref.model)
        assert report.usable, name


def test_fibonacci_weights():
    ref = registry.get("fibonacci-identical")
    p = ref.model.interior
    assert p.weight(-1, 1) == pytest.approx(1 / 3)
    assert p.weight(1, -1) == pytest.approx(1 / 3)
    assert p.weight(1, 1) == pytest.approx(1 / 3)
    assert ref.model.origin.weight(1, 1) == 1.0


def test_mixed_weights():
    ref = registry.get("fibonacci-mixed")
    assert ref.model.vertical.weight(1, 0) == 1.0
    assert ref.model.horizontal.weight(1, 1) == 1.0


def test_finite_group_known_fn():
    ref = registry.get("finite-group-simple")
    assert ref.known_f0(1, 1) == pytest.approx(4 / 9, abs=1e-15)
    assert ref.known_fn(2, 3, 4) == pytest.approx(
        2 / (3 ** 4 * 3 ** 2) - 8 / (9 ** 4 * 3 ** 5) + 2 / (3 ** 4 * 3 ** 3),
        abs=1e-16)


def test_known_f0_vanishes_on_axes():
    for name in ("fibonacci-identical", "finite-group-simple"):
        ref = registry.get(name)
        for c in range(0, 5):
            assert ref.known_f0(0, c) == pytest.approx(0.0, abs=1e-13)
            assert ref.known_f0(c, 0) == pytest.approx(0.0, abs=1e-13)


def test_known_fn_normalizes():
    for name in ("fibonacci-identical", "finite-group-simple"):
        ref = registry.get(name)
        total = sum(ref.known_fn(2, 1, n) for n in range(80))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_known_sequence_matches_build(fib_ref, fib_solver):
    seq = fib_solver.sequence(order=8)
    for m in range(-8, 9):
        a, b = seq.pair(m)
        ea, eb = fib_ref.known_sequence(m)
        assert a == pytest.approx(ea, abs=1e-10)
        assert b == pytest.approx(eb, abs=1e-10)


def test_finite_group_sequence_matches(fgs_ref, fgs_solver):
    seq = fgs_solver.sequence()
    assert seq.period == fgs_ref.sequence_period == 2
    for m in range(0, 3):
        assert seq.pair(m) == pytest.approx(fgs_ref.known_sequence(m), abs=1e-10)


def test_config_round_trip_all_models(tmp_path):
    for name in registry.names():
        ref = registry.get(name)
        text = dump_model_config(ref.model)
        again = parse_model_config(text)
        assert again.content_hash() == ref.model.content_hash(), name
        assert again.model_class is ref.model.model_class
