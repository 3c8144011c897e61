from graph_attn.core.errors import (
    CapacityError,
    FootprintError,
    GraphAttnError,
    MaskError,
    MaskOverlapError,
    PatternError,
)


def test_to_dict_carries_details() -> None:
    err = PatternError("block size 3 must divide L=8", length=8, block=3)
    assert err.to_dict() == {
        "error": "PatternError",
        "message": "block size 3 must divide L=8",
        "length": 8,
        "block": 3,
    }


def test_mask_errors_name_the_coordinate() -> None:
    err = MaskError("column out of range", coordinate=(2, 9))
    assert err.coordinate == (2, 9)
    assert "(2, 9)" in str(err)
    assert err.to_dict()["coordinate"] == [2, 9]


def test_overlap_is_a_mask_error() -> None:
    err = MaskOverlapError((0, 0))
    assert isinstance(err, MaskError) and isinstance(err, ValueError)
    assert err.coordinate == (0, 0)


def test_footprint_error_is_a_memory_error() -> None:
    err = FootprintError("out of memory", requested_bytes=1024)
    assert isinstance(err, MemoryError)
    assert err.to_dict()["requested_bytes"] == 1024


def test_capacity_error_is_not_a_value_error() -> None:
    err = CapacityError("no fit")
    assert isinstance(err, GraphAttnError)
    assert not isinstance(err, ValueError)
