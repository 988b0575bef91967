import pytest
from hypothesis import given
from hypothesis import strategies as st

from evtrack.errors import FrameMismatchError, ValidationError
from evtrack.propositions import Frame, make_frame

FC = make_frame(["Fighter", "Cargo"])


@pytest.mark.parametrize("labels", [["Fighter", "Cargo"], ["Friend", "Foe", "Neutral"]])
def test_make_frame_keeps_order(labels):
    frame = make_frame(labels)
    assert frame.size == len(labels)
    assert [frame.index(x) for x in labels] == list(range(len(labels)))


@pytest.mark.parametrize("labels, offender", [(["A", "A"], "A"), (["A", ""], "''"), (["A", "  "], "'  '")])
def test_make_frame_rejects(labels, offender):
    with pytest.raises(ValidationError, match=offender):
        make_frame(labels)


def test_make_frame_rejects_empty_and_reserved():
    with pytest.raises(ValidationError):
        make_frame([])
    with pytest.raises(ValidationError):
        make_frame(["A|B", "C"])


def test_basic_algebra():
    f, c = FC.singleton("Fighter"), FC.singleton("Cargo")
    assert (f & c).is_empty
    assert f | c == FC.total
    assert (FC.total & f) == f
    assert f.is_singleton and not FC.total.is_singleton
    assert FC.total.cardinality == 2 and FC.empty.cardinality == 0
    assert ~f == c


def test_frame_mismatch():
    other = make_frame(["Fighter", "Cargo", "Drone"])
    with pytest.raises(FrameMismatchError):
        FC.singleton(0) | other.singleton(0)


@pytest.mark.parametrize("text", ["Fighter", "Cargo", "Fighter|Cargo", "∅"])
def test_text_round_trip(text):
    assert str(FC.parse(text)) == text


def test_parse_normalizes_order():
    assert str(FC.parse("Cargo | Fighter")) == "Fighter|Cargo"
    with pytest.raises(ValidationError):
        FC.parse("Bomber")


def test_power_set_size():
    frame = make_frame("ABCD")
    assert len(frame.power_set()) == 15
    assert len(frame.power_set(include_empty=True)) == 16


masks3 = st.integers(min_value=0, max_value=7)
F3 = Frame(("A", "B", "C"))


@given(masks3, masks3)
def test_meet_join_respect_order(a, b):
    x, y = F3.proposition(i for i in range(3) if a >> i & 1), F3.proposition(i for i in range(3) if b >> i & 1)
    assert (x & y) <= x and (x & y) <= y
    assert x <= (x | y) and y <= (x | y)
    assert set((x | y).members()) == set(x.members()) | set(y.members())
    assert set((x & y).members()) == set(x.members()) & set(y.members())
