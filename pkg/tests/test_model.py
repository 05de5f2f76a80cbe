import random
from collections import Counter
from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import overlap_free
from orthopack.model import (
    CLASS_PROBABILITIES, SIZE_CLASSES, BoxType, Instance, InstanceError, generate_instance, generate_types,
    load_instance, parse_instance, serialize_instance, size_class_of, validate_packing,
)

FIXTURES = ["okp1", "okp2", "okp3", "okp4", "okp5"]


def fixture_text(name):
    return (resources.files("orthopack") / "data" / f"{name}.txt").read_text()


def two_boxes():
    return Instance((20, 10), (BoxType((10, 10), 1, 2),), "decision")


def test_single_box_at_origin_ok():
    inst = Instance((20, 10), (BoxType((10, 10), 1, 1),))
    assert validate_packing(inst, [0], {0: (0, 0)}) is None


def test_overlap_reported_with_pair():
    v = validate_packing(two_boxes(), [0, 1], {0: (0, 0), 1: (5, 0)})
    assert v is not None and v.kind == "overlap" and v.boxes == (0, 1)


def test_touching_boxes_ok():
    assert validate_packing(two_boxes(), [0, 1], {0: (0, 0), 1: (10, 0)}) is None


def test_outside_and_mismatch():
    inst = two_boxes()
    v = validate_packing(inst, [0], {0: (11, 0)})
    assert v.kind == "outside" and v.direction == 0
    assert validate_packing(inst, [0, 1], {0: (0, 0)}).kind == "subset-mismatch"
    with pytest.raises(KeyError):
        validate_packing(inst, [5], {5: (0, 0)})


def test_strip_ignores_last_extent():
    inst = Instance((4, 1), (BoxType((2, 3), 0, 2),), "strip")
    assert validate_packing(inst, [0, 1], {0: (0, 0), 1: (0, 3)}) is None


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_validate_matches_direct_checker(data):
    W = (data.draw(st.integers(2, 8)), data.draw(st.integers(2, 8)))
    n = data.draw(st.integers(1, 4))
    types = tuple(BoxType((data.draw(st.integers(1, W[0])), data.draw(st.integers(1, W[1]))), 1, 1)
                  for _ in range(n))
    inst = Instance(W, types)
    packing = {b: (data.draw(st.integers(0, W[0])), data.draw(st.integers(0, W[1]))) for b in range(n)}
    assert (validate_packing(inst, range(n), packing) is None) == overlap_free(inst, packing)


def test_okp_fixtures_parse_and_round_trip():
    sizes = {"okp1": (15, 50), "okp2": (30, 30), "okp3": (30, 30), "okp4": (33, 61), "okp5": (29, 97)}
    for name in FIXTURES:
        text = fixture_text(name)
        inst = parse_instance(text)
        assert inst.W == (100, 100)
        assert (inst.m, inst.n) == sizes[name]
        assert inst.name == name
        assert serialize_instance(inst) == text
        assert parse_instance(serialize_instance(inst)) == inst


def test_okp1_first_type():
    inst = parse_instance(fixture_text("okp1"))
    assert inst.types[0] == BoxType((4, 90), 838, 5)
    assert inst.types[-1] == BoxType((51, 24), 3551, 4)


def test_one_type_count_one():
    inst = parse_instance("2\n5 5\n1\n2 3 7 1\n")
    assert inst.n == 1 and inst.boxes[0].sizes == (2, 3) and inst.boxes[0].value == 7


def test_zero_size_rejected():
    with pytest.raises(InstanceError):
        parse_instance("2\n5 5\n1\n0 3 7 1\n")


def test_oversized_box_rejected():
    with pytest.raises(InstanceError):
        parse_instance("2\n5 5\n1\n6 3 7 1\n")


def test_syntax_error_has_position():
    with pytest.raises(InstanceError) as exc:
        parse_instance("2\n5 x\n1\n1 1 1 1\n")
    assert exc.value.line == 2 and exc.value.column == 3


def test_truncated_input():
    with pytest.raises(InstanceError):
        parse_instance("2\n5 5\n2\n1 1 1 1\n")


def test_box_ids_contiguous_per_type():
    inst = Instance((10, 10), (BoxType((1, 2), 3, 2), BoxType((2, 2), 1, 3)))
    assert [b.type_index for b in inst.boxes] == [0, 0, 1, 1, 1]
    assert inst.type_start == (0, 2)
    assert inst.subset_for_counts((1, 2)) == [0, 2, 3]
    assert inst.counts_for_subset([1, 4]) == (1, 1)


def test_load_instance(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text(fixture_text("okp4"))
    assert load_instance(p).n == 61


def test_serialize_stable():
    inst = generate_instance(3, "II", 7, 2, 11)
    assert serialize_instance(inst) == serialize_instance(inst)
    back = parse_instance(serialize_instance(inst))
    assert back == inst


def test_generator_class_ranges():
    for d in (2, 3):
        for kind in ("I", "II", "III"):
            inst = generate_instance(d, kind, 20, 1, 5)
            assert inst.W == (100,) * d and inst.m == 20
            for bt in inst.types:
                assert size_class_of(bt.sizes, d)
                assert bt.count == 1
                assert bt.value // bt.volume in (1, 2, 3) and bt.value % bt.volume == 0


def test_generator_deterministic():
    assert generate_instance(3, "III", 10, 1, 42) == generate_instance(3, "III", 10, 1, 42)
    assert generate_instance(3, "III", 10, 1, 42) != generate_instance(3, "III", 10, 1, 43)


def test_generator_class_frequencies():
    draws = generate_types(2, "II", 10000, 1, 3)
    freq = Counter(cls for cls, _ in draws)
    target = CLASS_PROBABILITIES[2]["II"]
    for k, p in enumerate(target):
        assert abs(freq[k] / 10000 - p / 100) <= 0.02
    for cls, bt in draws[:500]:
        assert all(lo <= s <= hi for s, (lo, hi) in zip(bt.sizes, SIZE_CLASSES[2][cls]))
