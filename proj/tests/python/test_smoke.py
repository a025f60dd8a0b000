"""Smoke tests for the Python bindings: one pass over every module surface."""

import math

import pytest

import poscop


def test_frame_and_formula():
    f = poscop.Frame(["X", "Y"])
    assert f.size() == 2
    assert f.world_count() == 4
    assert f.world_label(0) == "T T"
    assert f.require("Y") == 1
    assert f.index_of("Z") is None

    g = poscop.parse_formula("X & !Y -> Y", f)
    assert str(g) == "X & !Y -> Y"
    assert poscop.evaluate(g, poscop.World(f, 0))
    assert sorted(poscop.models(g).worlds()) == [0, 2, 3]

    with pytest.raises(poscop.UnknownPrimitiveError):
        poscop.parse_formula("X & Q", f)


def test_density_measure_and_mvalues():
    f = poscop.Frame(["X", "Y"])
    d = poscop.Density(f, [1.0, 0.4, 0.2, 0.1])
    y = poscop.models(poscop.parse_formula("Y", f))
    assert poscop.measure(d, y) == 1.0
    assert poscop.necessity(d, y) == pytest.approx(0.6, abs=1e-12)

    m = poscop.to_mvalue(d)
    assert m.masses() == pytest.approx([0.6, 0.2, 0.1, 0.1], abs=1e-12)
    assert poscop.from_mvalue(m) == d
    assert m.belief(y) == pytest.approx(0.6, abs=1e-12)

    with pytest.raises(poscop.InvalidDensityError):
        poscop.Density(f, [0.9, 0.4, 0.2, 0.1])

    text = poscop.format_density(d)
    assert poscop.parse_density(text) == d


def test_conditioning_rules():
    f = poscop.Frame(["X", "Y"])
    d = poscop.Density(f, [1.0, 0.4, 0.2, 0.1])
    not_x = poscop.models(poscop.parse_formula("!X", f))

    cond = poscop.confidence_transfer(d, not_x, poscop.Rule.dempster())
    assert cond.values() == pytest.approx([0.0, 0.0, 1.0, 0.5], abs=1e-12)

    cond = poscop.confidence_transfer(d, not_x, poscop.Rule.minimum())
    assert cond.values() == pytest.approx([0.0, 0.0, 1.0, 0.1], abs=1e-12)

    # A custom rule written in Python: all mass to the top stratum.
    rule = poscop.Rule.custom("top", lambda levels, constant: [0.0] * (len(levels) - 1) + [constant])
    cond = poscop.confidence_transfer(d, not_x, rule)
    assert cond.values() == pytest.approx([0.0, 0.0, 1.0, 0.1], abs=1e-12)

    with pytest.raises(poscop.ZeroPossibilityError):
        poscop.confidence_transfer(d, poscop.Event.none(f), poscop.Rule.dempster())


def test_axioms_and_recovery():
    f = poscop.Frame(["X", "Y"])
    d = poscop.Density(f, [1.0, 0.4, 0.2, 0.1])
    not_x = poscop.models(poscop.parse_formula("!X", f))
    cond = poscop.confidence_transfer(d, not_x, poscop.Rule.dempster())

    report = poscop.check_d_axioms(d, not_x, cond)
    assert report.all_pass()
    assert "D1: pass" in poscop.format_certificates(report)

    coefficients = poscop.recover_coefficients(d, not_x, cond)
    assert coefficients == pytest.approx([0.4, 0.4], abs=1e-12)

    x = poscop.parse_formula("X", f)
    y = poscop.parse_formula("Y", f)
    assert poscop.rott_entails(d, x, y)


def test_independence_search():
    a = poscop.MarginalSpec([1.0, 0.4])
    b = poscop.MarginalSpec([1.0, 0.2])
    product = poscop.independence_product(a, b)
    assert poscop.verify_independence(product, a, b, poscop.Rule.dempster()).all_pass()

    found = poscop.search_independent_joint(a, b, poscop.Rule.dempster(), 0.01)
    assert found is not None and found.cells() == pytest.approx([1.0, 0.2, 0.4, 0.08], abs=1e-9)
    assert poscop.search_independent_joint(a, b, poscop.Rule.minimum(), 0.01) is None


def test_network_and_propagation():
    net = poscop.load_net(poscop.alarm_model_text())
    f = net.frame()
    tree = poscop.tree_for_net(net)
    assert poscop.check_markov_property(tree)

    evidence = [poscop.Literal(f.require("W"), True), poscop.Literal(f.require("R"), True)]
    joint = poscop.joint_density(net)
    for name in ["B", "E", "A", "R", "W", "G"]:
        target = f.require(name)
        got = poscop.query_target(tree, target, evidence)
        event = poscop.models(poscop.parse_formula(name, f))
        given = poscop.models(poscop.parse_formula("W & R", f))
        want_true = poscop.conditional_from_joint(joint, event, given)
        want_false = poscop.conditional_from_joint(joint, event.complement(), given)
        assert got.pi_true == pytest.approx(want_true, abs=1e-12)
        assert got.pi_false == pytest.approx(want_false, abs=1e-12)

    spot = poscop.query_target(tree, f.require("A"), [poscop.Literal(f.require("W"), False)])
    assert (spot.pi_true, spot.pi_false) == pytest.approx((0.8, 1.0), abs=1e-12)

    with pytest.raises(poscop.ImpossibleEvidenceError):
        poscop.query_target(
            tree,
            f.require("B"),
            [poscop.Literal(f.require("R"), True), poscop.Literal(f.require("E"), False)],
        )


def test_cli_entry_point():
    code, out, err = poscop.run_cli(["validate", "alarm"])
    assert code == 0 and "status: valid" in out and err == ""

    code, out, err = poscop.run_cli(["query", "alarm", "--target", "E", "--evidence", "R"])
    assert code == 0 and "Pi(E | e) = 1" in out

    code, out, err = poscop.run_cli(["query", "alarm", "--target", "E", "--evidence", "R & !R"])
    assert code == 1 and out == "" and "error:" in err
