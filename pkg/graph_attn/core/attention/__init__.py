# graph_attn/core/attention/__init__.py
"""Masked attention: online softmax, the dense oracle and the graph-processing kernels."""

from graph_attn.core.attention.kernels import (
    AttentionResult,
    Probe,
    TouchRecorder,
    attend,
    attend_coo,
    attend_csr,
    attend_dilated1d,
    attend_dilated2d,
    attend_global,
    attend_local,
)
from graph_attn.core.attention.oracle import check_operands, sdp_masked_oracle
from graph_attn.core.attention.softmax import SoftmaxState, online_update, two_pass_softmax

__all__: list[str] = [
    "SoftmaxState",
    "online_update",
    "two_pass_softmax",
    "sdp_masked_oracle",
    "check_operands",
    "AttentionResult",
    "Probe",
    "TouchRecorder",
    "attend",
    "attend_csr",
    "attend_coo",
    "attend_local",
    "attend_dilated1d",
    "attend_dilated2d",
    "attend_global",
]
