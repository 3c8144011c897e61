import numpy as np
import pytest
import torch
from pydantic import ValidationError

from graph_attn.core.attention import SoftmaxState, online_update, two_pass_softmax

pytestmark = pytest.mark.core


def _scores_and_values(rows: int, k: int, d: int, seed: int) -> tuple[torch.Tensor, torch.Tensor]:
    gen = np.random.Generator(np.random.Philox(seed))
    scores = torch.from_numpy(gen.uniform(-10.0, 10.0, size=(rows, k)))
    values = torch.from_numpy(gen.random((rows, k, d)))
    return scores, values


def _fold(scores: torch.Tensor, values: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    rows, k, d = values.shape
    state = SoftmaxState.initial(rows, torch.float64)
    m, l, O = state.m, state.l, torch.zeros(rows, d, dtype=torch.float64)  # noqa: E741
    for t in range(k):
        m, l, O = online_update(m, l, O, scores[:, t], values[:, t])  # noqa: E741
    return m, l, O


@pytest.mark.parametrize("k", range(1, 65))
def test_online_update_matches_two_pass_across_row_lengths(k: int) -> None:
    # 157 rows per length, just over 10^4 rows across lengths 1..64
    scores, values = _scores_and_values(rows=157, k=k, d=4, seed=k)
    _, _, O = _fold(scores, values)
    reference = torch.einsum("rk,rkd->rd", torch.softmax(scores, dim=-1), values)
    assert torch.allclose(O, reference, rtol=0.0, atol=1e-12)


def test_two_pass_softmax_single_row() -> None:
    scores, values = _scores_and_values(rows=3, k=7, d=5, seed=1)
    _, _, O = _fold(scores, values)
    for r in range(3):
        expected = two_pass_softmax(scores[r], values[r])
        assert torch.allclose(O[r], expected, rtol=0.0, atol=1e-12)


def test_final_state_is_max_and_denominator() -> None:
    scores, values = _scores_and_values(rows=5, k=9, d=2, seed=2)
    m, l, _ = _fold(scores, values)  # noqa: E741
    assert torch.equal(m, scores.max(dim=-1).values)
    assert torch.allclose(l, torch.exp(scores - m.unsqueeze(-1)).sum(dim=-1), rtol=1e-14, atol=0.0)


def test_first_update_from_initial_state_returns_value_row() -> None:
    m, l, O = online_update(
        torch.tensor([float("-inf")], dtype=torch.float64),
        torch.zeros(1, dtype=torch.float64),
        torch.zeros(1, 3, dtype=torch.float64),
        torch.tensor([0.7], dtype=torch.float64),
        torch.tensor([[0.1, 0.2, 0.3]], dtype=torch.float64),
    )
    assert m.item() == 0.7
    assert l.item() == 1.0
    assert torch.equal(O, torch.tensor([[0.1, 0.2, 0.3]], dtype=torch.float64))


def test_large_scores_do_not_overflow() -> None:
    scores = torch.tensor([[1000.0, 1001.0, 999.0]], dtype=torch.float64)
    values = torch.eye(3, dtype=torch.float64).unsqueeze(0)
    _, l, O = _fold(scores, values)  # noqa: E741
    assert torch.isfinite(l).all() and torch.isfinite(O).all()
    assert torch.allclose(O[0], torch.softmax(scores[0], dim=-1), atol=1e-14)


def test_state_initial_and_seen() -> None:
    state = SoftmaxState.initial(4, torch.float32)
    assert state.length == 4
    assert not bool(state.seen().any())


@pytest.mark.parametrize(
    "m,l",
    [
        ([float("-inf")], [1.0]),
        ([0.0], [0.0]),
        ([0.0], [-1.0]),
        ([0.0, 0.0], [1.0]),
    ],
)
def test_state_invariants(m: list[float], l: list[float]) -> None:  # noqa: E741
    with pytest.raises(ValidationError):
        SoftmaxState(m=torch.tensor(m, dtype=torch.float64), l=torch.tensor(l, dtype=torch.float64))


def test_state_dtype_must_match() -> None:
    with pytest.raises(ValidationError, match="share a floating dtype"):
        SoftmaxState(m=torch.zeros(2, dtype=torch.float32), l=torch.ones(2, dtype=torch.float64))
