import random

import pytest

from bmgkit.editing import apply_edit
from bmgkit.gadgets import (canonical_x3c_instance, hub_satellites_gadget,
                            hub_union_gadget, x3c_gadget, x3c_yes_deletion_set)
from bmgkit.graphs import bmg_from_tree, is_sf_colored
from bmgkit.inference import binary_explaining_tree, lrt
from bmgkit.recognition import find_hourglass, is_bmg


def test_minimal_hub_is_its_own_lrt():
    g, t = hub_satellites_gadget((1, 1), [(1, 1)])
    assert g.arcs == frozenset({
        ("X_b0", "X_w0"), ("X_b0", "Y1_w0"), ("X_w0", "Y1_b0"),
        ("Y1_b0", "Y1_w0"), ("Y1_w0", "Y1_b0"),
    })
    assert t.to_newick() == "(X_b0,(X_w0,(Y1_b0,Y1_w0)));"
    assert bmg_from_tree(t) == g
    assert lrt(g) == t


def test_hub_requires_nonempty_parts():
    with pytest.raises(ValueError):
        hub_satellites_gadget((0, 1), [(1, 1)])
    with pytest.raises(ValueError):
        hub_satellites_gadget((1, 1), [])
    with pytest.raises(ValueError):
        hub_satellites_gadget((1, 1), [(1, 0)])


def test_random_hub_configurations_are_binary_explainable():
    rng = random.Random(5)
    for _ in range(20):
        hub = (rng.randint(1, 3), rng.randint(1, 3))
        sats = [(rng.randint(1, 3), rng.randint(1, 3))
                for _ in range(rng.randint(1, 3))]
        g, t = hub_satellites_gadget(hub, sats)
        assert bmg_from_tree(t) == g
        assert is_bmg(g)
        assert find_hourglass(g) is None
        assert binary_explaining_tree(g).ok


def test_hub_union_stays_binary_explainable():
    g, t = hub_union_gadget([((1, 1), [(1, 1)]), ((2, 1), [(2, 2), (1, 1)])])
    assert bmg_from_tree(t) == g
    assert binary_explaining_tree(g).ok
    # components keep their identity via prefixed vertex names
    assert any(v.startswith("c1_") for v in g.vertices)
    assert any(v.startswith("c2_") for v in g.vertices)


# -------------------------------------------------------------- exact cover

def test_canonical_instance_shape():
    elements, sets = canonical_x3c_instance(1, 2)
    assert elements == ["e1", "e2", "e3"]
    assert sets == [("e1", "e2", "e3"), ("e1", "e2", "e3")]
    with pytest.raises(ValueError):
        canonical_x3c_instance(2, 1)  # m < t


def test_x3c_gadget_validation():
    with pytest.raises(ValueError):
        x3c_gadget(["e1", "e2"], [("e1", "e2", "e1")])  # not 3t elements
    with pytest.raises(ValueError):
        x3c_gadget(["e1", "e2", "e3"], [("e1", "e2", "e2")])  # repeated member
    with pytest.raises(ValueError):
        x3c_gadget(["e1", "e2", "e3"], [("e1", "e2", "zz")])  # unknown element
    with pytest.raises(ValueError):
        x3c_gadget(["X1", "e2", "e3"], [("X1", "e2", "e3")])  # reserved prefix
    with pytest.raises(ValueError):
        # t = m = 1 makes the budget degenerate (q = 0)
        x3c_gadget(*canonical_x3c_instance(1, 1))


def test_x3c_gadget_dimensions_and_budget():
    elements, sets = canonical_x3c_instance(1, 2)
    g, k = x3c_gadget(elements, sets)
    # r = 18, k = 6r(m - t) + r - 18t = 108, q = 3k = 324
    assert k == 108
    assert g.n_vertices == 2 * 3 + 2 * (18 + 324) * 2
    assert g.n_vertices == 1374
    assert len(set(g.colors.values())) == 2
    assert g.properly_colored
    assert is_sf_colored(g)


def test_x3c_yes_instance_certificate():
    elements, sets = canonical_x3c_instance(1, 2)
    g, k = x3c_gadget(elements, sets)
    assert not binary_explaining_tree(g).ok

    f = x3c_yes_deletion_set(elements, sets, cover=[1])
    assert len(f) == k
    assert not f.insert
    edited = apply_edit(g, f)  # also verifies every deleted arc exists
    assert binary_explaining_tree(edited).ok


def test_x3c_deletion_set_requires_exact_cover():
    elements, sets = canonical_x3c_instance(1, 2)
    with pytest.raises(ValueError):
        x3c_yes_deletion_set(elements, sets, cover=[])
    with pytest.raises(ValueError):
        x3c_yes_deletion_set(elements, sets, cover=[1, 2])  # overlap
    with pytest.raises(ValueError):
        x3c_yes_deletion_set(elements, sets, cover=[3])  # out of range
