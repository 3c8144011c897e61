import math

import numpy as np
import pytest
import torch
from pydantic import ValidationError

from graph_attn.core.enums import DType
from graph_attn.core.errors import ShapeError
from graph_attn.core.tensor import (
    DenseMatrix,
    Tolerances,
    allclose,
    max_deviation,
    random_qkv,
    random_uniform_matrix,
)

pytestmark = pytest.mark.core


def test_dense_matrix_of_accepts_lists_and_arrays() -> None:
    a = DenseMatrix.of([[1.0, 2.0], [3.0, 4.0]])
    b = DenseMatrix.of(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert a.shape == (2, 2)
    assert a.dtype == torch.float64
    assert torch.equal(a.data, b.data)


@pytest.mark.parametrize(
    "data",
    [
        torch.zeros(3),
        torch.zeros(0, 4),
        torch.zeros(2, 2, dtype=torch.int64),
    ],
)
def test_dense_matrix_rejects_bad_tensors(data: torch.Tensor) -> None:
    with pytest.raises(ValidationError):
        DenseMatrix(data=data)


def test_dense_matrix_is_frozen() -> None:
    m = DenseMatrix.zeros(2, 2, dtype=torch.float64)
    with pytest.raises(ValidationError):
        m.data = torch.ones(2, 2)  # type: ignore[misc]


def test_to_casts_and_short_circuits() -> None:
    m = DenseMatrix.zeros(2, 3, dtype=torch.float64)
    assert m.to(torch.float64) is m
    assert m.to(DType.float32).dtype == torch.float32


def test_random_uniform_is_deterministic_per_seed() -> None:
    a = random_uniform_matrix(16, 8, seed=7, dtype=torch.float64)
    b = random_uniform_matrix(16, 8, seed=7, dtype=torch.float64)
    c = random_uniform_matrix(16, 8, seed=8, dtype=torch.float64)
    assert torch.equal(a.data, b.data)
    assert not torch.equal(a.data, c.data)
    assert float(a.data.min()) >= 0.0 and float(a.data.max()) < 1.0


def test_random_uniform_float32_is_cast_of_float64() -> None:
    hi = random_uniform_matrix(4, 4, seed=3, dtype=torch.float64)
    lo = random_uniform_matrix(4, 4, seed=3, dtype=torch.float32)
    assert torch.equal(hi.data.to(torch.float32), lo.data)


def test_random_uniform_rejects_empty_shape() -> None:
    with pytest.raises(ShapeError):
        random_uniform_matrix(0, 4, seed=0)


def test_random_qkv_operands_differ() -> None:
    Q, K, V = random_qkv(8, 4, seed=0, dtype=torch.float64)
    assert not torch.equal(Q.data, K.data)
    assert not torch.equal(K.data, V.data)
    assert torch.equal(K.data, random_uniform_matrix(8, 4, seed=1, dtype=torch.float64).data)


def test_allclose_within_and_outside_tolerance() -> None:
    a = DenseMatrix.of([[1.0, 2.0]])
    assert allclose(a, DenseMatrix.of([[1.0 + 1e-7, 2.0]]))
    assert not allclose(a, DenseMatrix.of([[1.001, 2.0]]))
    assert allclose(a, DenseMatrix.of([[1.001, 2.0]]), Tolerances(rtol=1e-2))


def test_allclose_shape_mismatch_raises() -> None:
    with pytest.raises(ShapeError):
        allclose(DenseMatrix.zeros(2, 2), DenseMatrix.zeros(2, 3))


def test_allclose_treats_nan_pairs_as_equal() -> None:
    a = DenseMatrix.of([[math.nan, 1.0]])
    assert allclose(a, DenseMatrix.of([[math.nan, 1.0]]))
    assert not allclose(a, DenseMatrix.of([[math.nan, 1.0]]), Tolerances(nan_equal=False))


def test_max_deviation_reports_first_failure() -> None:
    a = DenseMatrix.of([[1.0, 2.0], [3.0, 4.0]])
    b = DenseMatrix.of([[1.0, 2.0], [3.5, 4.0]])
    dev = max_deviation(b, a)
    assert dev.first_failure == (1, 0)
    assert not dev.passed
    assert dev.max_abs == pytest.approx(0.5)
    assert dev.max_rel == pytest.approx(0.5 / 3.0)


def test_max_deviation_identical_passes() -> None:
    a = random_uniform_matrix(5, 3, seed=1, dtype=torch.float64)
    dev = max_deviation(a, a)
    assert dev.passed
    assert dev.max_abs == 0.0


def test_tolerances_scale() -> None:
    tol = Tolerances().scaled(10)
    assert tol.rtol == pytest.approx(1e-4)
    assert tol.atol == pytest.approx(1e-7)
