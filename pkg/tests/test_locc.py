import numpy as np
import pytest

from uobkit.coloring import EdgeColoring, color_count
from uobkit.constructors import construct_max, fixture, fixture_with_names, generalized_bdf, random_max_family
from uobkit.locc import (
    ClassifierDisagreement,
    Leaf,
    Measure,
    ProtocolError,
    depth,
    extract_protocol,
    fixed_order_protocol,
    is_locc_distinguishable,
    leaves,
    simulate,
    simulate_all,
    tree_from_dict,
    validate_tree,
    wh_first_choices,
)
from uobkit.uob import QubitRay, hat, sample_assignment, standard_basis, synthesize


def _setup(c, seed=0):
    a = sample_assignment(c, 0.1, seed)
    return a, synthesize(c, a)


def test_classifier_fixtures():
    assert is_locc_distinguishable(fixture("fig1"))
    assert not is_locc_distinguishable(fixture("fig2"))
    assert not is_locc_distinguishable(fixture("bdf4"))


def test_classifier_rejects_inadmissible():
    with pytest.raises(Exception, match="admissible"):
        is_locc_distinguishable(EdgeColoring(2, (0, 1, 2, 3)))


def test_classifier_disagreement_is_fatal(monkeypatch):
    import uobkit.locc as locc

    monkeypatch.setattr(locc, "is_max_family", lambda c: False)
    with pytest.raises(ClassifierDisagreement):
        locc.is_locc_distinguishable(fixture("fig1"))


def test_wh_first_choices():
    c, names = fixture_with_names("fig1")
    a, u = _setup(c, 7)
    red = names.index("red")
    assert wh_first_choices(u) == [(0, a[red])]
    f2 = fixture("fig2")
    for seed in range(10):
        assert wh_first_choices(_setup(f2, seed)[1]) == []
    assert [p for p, _ in wh_first_choices(standard_basis(3))] == [0, 1, 2]


def test_wh_degenerate_assignment():
    # all colors on one ray: every direction becomes a valid first step
    c = fixture("fig2")
    u = synthesize(c, {k: QubitRay(0.6, 0.8) for k in range(6)})
    assert len(wh_first_choices(u)) == 3


def test_fig1_protocol_shape():
    c, names = fixture_with_names("fig1")
    a, u = _setup(c, 7)
    t = extract_protocol(c, a)
    assert t.position == 0 and t.ray == a[names.index("red")]
    assert t.on_ray.position == 1 and t.on_ray.ray == a[names.index("blue")]
    assert t.on_hat.position == 1 and t.on_hat.ray == a[names.index("violet")]
    assert sorted(leaves(t)) == list(range(8))


def test_fig1_secret_two():
    c = fixture("fig1")
    a, u = _setup(c, 7)
    r = simulate(u, extract_protocol(c, a), 2)
    assert r.identified == 2 and r.certain
    assert [s.outcome for s in r.steps] == [0, 1, 0]
    assert all(abs(s.probability - 1) < 1e-12 for s in r.steps)


def test_all_secrets_certain():
    c = fixture("fig1")
    a, u = _setup(c, 1)
    t = extract_protocol(c, a)
    assert all(r.certain for r in simulate_all(u, t, seed=3))


def test_max_family_protocols():
    rng = np.random.default_rng(9)
    for trial in range(20):
        n = 1 + trial % 5
        c = random_max_family(n, rng)
        a, u = _setup(c, trial)
        t = extract_protocol(c, a)
        assert depth(t) == n and sorted(leaves(t)) == list(range(2**n))
        assert all(r.certain for r in simulate_all(u, t, seed=trial))


def test_construct_max_5_tree():
    c = construct_max(5)
    t = extract_protocol(c, sample_assignment(c, 0.1, 0))
    assert depth(t) == 5 and len(leaves(t)) == 32


def test_extraction_refused():
    for c in (fixture("fig2"), generalized_bdf(4)):
        with pytest.raises(ProtocolError):
            extract_protocol(c, sample_assignment(c, 0.1, 0))


def test_misordered_protocol():
    c = fixture("fig1")
    a, u = _setup(c, 7)
    t = fixed_order_protocol(c, a, [1, 0, 2])
    rows = simulate_all(u, t, seed=7)
    probs = [s.probability for r in rows for s in r.steps]
    assert any(1e-9 < p < 1 - 1e-9 for p in probs)
    assert not all(r.certain for r in rows)


def test_uniform_first_fixed_order_is_fine():
    c = fixture("fig1")
    a, u = _setup(c, 7)
    t = fixed_order_protocol(c, a, [0, 1, 2])
    assert all(r.certain for r in simulate_all(u, t, seed=0))


def test_step_probabilities_sum_to_one():
    c = fixture("fig1")
    a, u = _setup(c, 2)
    t = fixed_order_protocol(c, a, [2, 1, 0])
    for secret in range(8):
        node = t
        for step in simulate(u, t, secret, seed=5).steps:
            p0 = abs(node.ray.inner(u.states[secret].factors[node.position])) ** 2
            p1 = abs(hat(node.ray).inner(u.states[secret].factors[node.position])) ** 2
            assert abs(p0 + p1 - 1) < 1e-12
            node = node.child(step.outcome)


def test_malformed_tree():
    r = QubitRay.zero()
    bad = Measure(0, r, Measure(0, r, Leaf(0), Leaf(1)), Leaf(1))
    with pytest.raises(ProtocolError, match="twice"):
        validate_tree(bad)
    with pytest.raises(ProtocolError, match="twice"):
        simulate(standard_basis(1), bad, 0)


def test_tree_json_roundtrip():
    c = fixture("fig1")
    a, _ = _setup(c, 0)
    t = extract_protocol(c, a)
    assert tree_from_dict(t.to_dict()) == t


def test_simulation_worker_independence():
    c = construct_max(4)
    a, u = _setup(c, 0)
    t = fixed_order_protocol(c, a, [3, 2, 1, 0])
    one = [r.to_dict() for r in simulate_all(u, t, seed=4, workers=1)]
    three = [r.to_dict() for r in simulate_all(u, t, seed=4, workers=3)]
    assert one == three
