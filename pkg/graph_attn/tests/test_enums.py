import pytest
import torch

from graph_attn.core.enums import Algorithm, DType, OutputFormat, PresetName, Suite, SweepKind


def test_algorithm_values_are_cli_tokens() -> None:
    assert Algorithm.global_.value == "global"
    assert Algorithm("dilated1d") is Algorithm.dilated1d
    assert str(Algorithm.csr) == "csr"


@pytest.mark.parametrize(
    "algo,explicit,implicit",
    [
        (Algorithm.csr, True, False),
        (Algorithm.coo, True, False),
        (Algorithm.local, False, True),
        (Algorithm.dilated1d, False, True),
        (Algorithm.dilated2d, False, True),
        (Algorithm.global_, False, True),
        (Algorithm.sdp, False, False),
        (Algorithm.flash_dense, False, False),
    ],
)
def test_algorithm_families(algo: Algorithm, explicit: bool, implicit: bool) -> None:
    assert algo.is_explicit is explicit
    assert algo.is_implicit is implicit
    assert algo.is_graph_kernel is (explicit or implicit)


def test_only_flash_dense_is_not_runnable() -> None:
    assert [a for a in Algorithm if not a.is_runnable] == [Algorithm.flash_dense]


@pytest.mark.parametrize(
    "dtype,torch_dtype,width",
    [
        (DType.float16, torch.float16, 2),
        (DType.float32, torch.float32, 4),
        (DType.float64, torch.float64, 8),
    ],
)
def test_dtype_mapping(dtype: DType, torch_dtype: torch.dtype, width: int) -> None:
    assert dtype.torch is torch_dtype
    assert dtype.bytes == width
    assert DType.of(torch_dtype) is dtype


def test_dtype_of_rejects_integers() -> None:
    with pytest.raises(ValueError):
        DType.of(torch.int64)


def test_suite_all_includes_everything() -> None:
    assert all(Suite.all.includes(s) for s in Suite)
    assert Suite.work.includes(Suite.work)
    assert not Suite.work.includes(Suite.oracle)


def test_enum_string_behavior() -> None:
    assert isinstance(PresetName.bigbird, str)
    assert str(SweepKind.constant_sparsity) == "constant_sparsity"
    assert OutputFormat("csv") is OutputFormat.csv


def test_invalid_enum_access_raises() -> None:
    with pytest.raises(ValueError):
        Algorithm("flash")


def test_package_import_resolves_dtype() -> None:
    import graph_attn
    import graph_attn.core

    assert graph_attn.core.DType.of(torch.float32) is DType.float32
    assert DType.of.__annotations__["dtype"] == "torch.dtype"
