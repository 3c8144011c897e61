# graph_attn/pipelines/verify.py
"""
Correctness harness.

Kernels are checked three ways: their output against the dense masked oracle, their
dot-product count (and the exact set of touched coordinates) against the mask, and
sequential calls over disjoint legs against one CSR call over the union.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import reduce
from typing import Annotated, Any, Literal, Self

import numpy as np
import torch
import torch.nn.functional as F
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tqdm import tqdm

from graph_attn.core.attention import (
    AttentionResult,
    TouchRecorder,
    attend,
    attend_coo,
    attend_csr,
    sdp_masked_oracle,
)
from graph_attn.core.config import get_logger, settings
from graph_attn.core.enums import Algorithm, DType, Suite
from graph_attn.core.errors import ConfigurationError, MaskOverlapError
from graph_attn.core.mask import (
    CsrMask,
    Dilated1D,
    Dilated2D,
    Global,
    Local,
    MaskPattern,
    Random,
    csr_to_coo,
    csr_to_dense,
    gen_pattern_mask,
    mask_union_disjoint,
)
from graph_attn.core.tensor import (
    DenseMatrix,
    Deviation,
    Tolerances,
    max_deviation,
    random_qkv,
)
from graph_attn.pipelines.presets import LOCAL_REACH, default_global_indices, preset

logger = get_logger(__name__)

__all__: list[str] = [
    "VerifyCase",
    "KernelCheck",
    "WorkCheck",
    "CompositionCheck",
    "SuiteSummary",
    "KERNEL_FAMILIES",
    "compare_to_oracle",
    "verify_kernel",
    "verify_work",
    "verify_composition",
    "verify_reference_sdpa",
    "random_case_patterns",
    "run_suite",
]

KERNEL_FAMILIES: tuple[Algorithm, ...] = (
    Algorithm.coo,
    Algorithm.csr,
    Algorithm.local,
    Algorithm.dilated1d,
    Algorithm.dilated2d,
    Algorithm.global_,
)

LegSource = CsrMask | MaskPattern


class VerifyCase(BaseModel):
    """One verification input: a mask or pattern plus problem size, seed and tolerances."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pattern: MaskPattern | None = None
    mask: CsrMask | None = None
    length: int = Field(default=256, ge=1)
    d: int = Field(default=32, ge=1)
    seed: int = 0
    tolerances: Tolerances = Field(default_factory=lambda: Tolerances(rtol=settings.rtol, atol=settings.atol))
    dtype: Literal["float32", "float64"] = "float64"

    @model_validator(mode="after")
    def _one_source(self) -> Self:
        if (self.pattern is None) == (self.mask is None):
            raise ValueError("a verify case carries exactly one of pattern or mask")
        if self.mask is not None and self.mask.length != self.length:
            raise ValueError(f"mask has L={self.mask.length}, case has L={self.length}")
        return self

    @property
    def label(self) -> str:
        if self.pattern is not None:
            return self.pattern.model_dump_json()
        assert self.mask is not None
        return repr(self.mask)

    def materialize(self) -> CsrMask:
        if self.mask is not None:
            return self.mask
        assert self.pattern is not None
        return gen_pattern_mask(self.pattern, self.length)

    def inputs(self) -> tuple[DenseMatrix, DenseMatrix, DenseMatrix]:
        return random_qkv(self.length, self.d, self.seed, DType(self.dtype))

    def default_algorithm(self) -> Algorithm:
        if self.pattern is not None:
            return self.pattern.algorithm
        return Algorithm.csr


class KernelCheck(BaseModel):
    check: Literal["kernel"] = "kernel"
    algorithm: Algorithm
    case: str
    deviation: Deviation

    @property
    def passed(self) -> bool:
        return self.deviation.passed


class WorkCheck(BaseModel):
    check: Literal["work"] = "work"
    algorithm: Algorithm
    case: str
    work: int
    nnz: int
    touched_exact: bool

    @property
    def passed(self) -> bool:
        return self.work == self.nnz and self.touched_exact


class CompositionCheck(BaseModel):
    check: Literal["composition"] = "composition"
    legs: list[str]
    length: int
    work: int
    union_nnz: int
    deviation: Deviation

    @property
    def passed(self) -> bool:
        return self.deviation.passed and self.work == self.union_nnz


Check = Annotated[KernelCheck | WorkCheck | CompositionCheck, Field(discriminator="check")]


class SuiteSummary(BaseModel):
    suite: Suite
    seed: int
    checks: list[Check] = Field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": str(self.suite),
            "seed": self.seed,
            "passed": self.passed,
            "failed": self.failed,
            "failures": [c.model_dump(mode="json") for c in self.failures()],
        }


def compare_to_oracle(
    kernel_O: DenseMatrix, oracle_O: DenseMatrix, tol: Tolerances | None = None
) -> Deviation:
    """
    Deviation of a kernel output from the oracle's.

    A row with no mask nonzero is NaN in the oracle and zero in the kernels; such a pair
    counts as equal.
    """
    tol = tol or Tolerances(rtol=settings.rtol, atol=settings.atol)
    oracle_empty = torch.isnan(oracle_O.data).all(dim=1)
    kernel_zero = (kernel_O.data == 0).all(dim=1)
    matched = oracle_empty & kernel_zero
    if bool(matched.any()):
        data = kernel_O.data.to(oracle_O.dtype).clone()
        data[matched] = float("nan")
        kernel_O = DenseMatrix(data=data)
        tol = Tolerances(rtol=tol.rtol, atol=tol.atol, nan_equal=True)
    return max_deviation(kernel_O, oracle_O, tol)


def _run_kernel(
    algorithm: Algorithm,
    case: VerifyCase,
    Q: DenseMatrix,
    K: DenseMatrix,
    V: DenseMatrix,
    probe: TouchRecorder | None = None,
) -> tuple[AttentionResult, CsrMask]:
    """Run ``algorithm`` on the case; returns the result and the mask it stands for."""
    mask = case.materialize()
    match algorithm:
        case Algorithm.csr:
            return attend_csr(Q, K, V, mask, probe=probe), mask
        case Algorithm.coo:
            return attend_coo(Q, K, V, csr_to_coo(mask), probe=probe), mask
        case _ if algorithm.is_implicit:
            if case.pattern is None or case.pattern.algorithm is not algorithm:
                raise ConfigurationError(
                    f"the {algorithm} kernel needs a {algorithm} pattern, got {case.label}"
                )
            return attend(Q, K, V, case.pattern, probe=probe), mask
    raise ConfigurationError(f"{algorithm} is not a graph kernel")


def verify_kernel(case: VerifyCase, algorithm: Algorithm | str | None = None) -> KernelCheck:
    """Kernel output against the dense masked oracle under the case tolerances."""
    algo = Algorithm(algorithm) if algorithm is not None else case.default_algorithm()
    Q, K, V = case.inputs()
    result, mask = _run_kernel(algo, case, Q, K, V)
    oracle = sdp_masked_oracle(Q, K, V, mask)
    deviation = compare_to_oracle(result.O, oracle, case.tolerances)
    if not deviation.passed:
        logger.warning("%s failed on %s at %s", algo, case.label, deviation.first_failure)
    return KernelCheck(algorithm=algo, case=case.label, deviation=deviation)


def verify_work(case: VerifyCase, algorithm: Algorithm | str | None = None) -> WorkCheck:
    """Dot-product count equals nnz, and the touched coordinates are exactly the mask's."""
    algo = Algorithm(algorithm) if algorithm is not None else case.default_algorithm()
    Q, K, V = case.inputs()
    recorder = TouchRecorder(case.length)
    result, mask = _run_kernel(algo, case, Q, K, V, probe=recorder)
    touched_exact = torch.equal(recorder.coordinates(), mask.coordinates())
    check = WorkCheck(
        algorithm=algo,
        case=case.label,
        work=result.work,
        nnz=mask.nnz,
        touched_exact=touched_exact,
    )
    if not check.passed:
        logger.warning(
            "%s work audit failed on %s: work=%d nnz=%d exact=%s",
            algo,
            case.label,
            check.work,
            check.nnz,
            touched_exact,
            extra={
                "algorithm": str(algo),
                "length": case.length,
                "work": check.work,
                "nnz": check.nnz,
            },
        )
    return check


def _leg_label(leg: LegSource) -> str:
    return repr(leg) if isinstance(leg, CsrMask) else leg.model_dump_json()


def verify_composition(
    legs: Sequence[LegSource],
    L: int,
    d: int = 32,
    seed: int = 0,
    *,
    tol: Tolerances | None = None,
    dtype: Literal["float32", "float64"] = "float64",
) -> CompositionCheck:
    """
    Sequential kernel calls with carried state against one CSR call on the union.

    Overlapping legs are a configuration error. Tolerances are widened by
    ``settings.composition_factor``.
    """
    if not legs:
        raise ConfigurationError("composition needs at least one leg")
    masks = [leg if isinstance(leg, CsrMask) else gen_pattern_mask(leg, L) for leg in legs]
    try:
        union = reduce(mask_union_disjoint, masks)
    except MaskOverlapError as e:
        raise ConfigurationError(
            f"composition legs overlap at {e.coordinate}", coordinate=list(e.coordinate or ())
        ) from e

    Q, K, V = random_qkv(L, d, seed, DType(dtype))
    result: AttentionResult | None = None
    work = 0
    for leg in legs:
        result = attend(Q, K, V, leg, result)
        work += result.work
    assert result is not None

    single = attend_csr(Q, K, V, union)
    base = tol or Tolerances(rtol=settings.rtol, atol=settings.atol)
    deviation = max_deviation(result.O, single.O, base.scaled(settings.composition_factor))
    check = CompositionCheck(
        legs=[_leg_label(leg) for leg in legs],
        length=L,
        work=work,
        union_nnz=union.nnz,
        deviation=deviation,
    )
    logger.info(
        "Composition of %d legs at L=%d: passed=%s",
        len(legs),
        L,
        check.passed,
        extra={"length": L, "work": work, "nnz": union.nnz},
    )
    return check


def verify_reference_sdpa(case: VerifyCase) -> KernelCheck:
    """
    Cross-check the dense oracle against torch's scaled_dot_product_attention.

    torch gives NaN or arbitrary output on fully masked rows, so masks with an empty row
    are rejected.
    """
    mask = case.materialize()
    empty = torch.nonzero(mask.row_counts() == 0)
    if empty.numel():
        raise ConfigurationError(
            f"reference check needs every row to have a neighbor; row {int(empty[0])} is empty"
        )
    Q, K, V = case.inputs()
    q, k, v = (x.data.to(torch.float64).unsqueeze(0) for x in (Q, K, V))
    reference = F.scaled_dot_product_attention(q, k, v, attn_mask=csr_to_dense(mask))
    oracle = sdp_masked_oracle(Q, K, V, mask, dtype=DType.float64)
    deviation = max_deviation(oracle, DenseMatrix(data=reference[0]), case.tolerances)
    return KernelCheck(algorithm=Algorithm.sdp, case=case.label, deviation=deviation)


def _divisors(n: int) -> list[int]:
    return [b for b in range(1, n + 1) if n % b == 0]


def random_case_patterns(
    family: Algorithm | str, count: int, L: int, seed: int = 0
) -> list[MaskPattern]:
    """
    ``count`` seeded random parameterizations for a kernel family.

    Explicit families get random masks; implicit families get random windows, dilations,
    blocks and global token sets valid for L.
    """
    algo = Algorithm(family)
    if not algo.is_graph_kernel:
        raise ConfigurationError(f"{algo} is not a graph kernel family")
    gen = np.random.Generator(np.random.Philox([seed, *algo.value.encode()]))
    reach = max(1, L // 2)

    patterns: list[MaskPattern] = []
    for _ in range(count):
        match algo:
            case Algorithm.csr | Algorithm.coo:
                s_f = float(gen.uniform(0.005, 0.2))
                patterns.append(Random(s_f=s_f, seed=int(gen.integers(0, 2**31))))
            case Algorithm.local:
                patterns.append(Local(w=int(gen.integers(1, reach + 1))))
            case Algorithm.dilated1d:
                patterns.append(
                    Dilated1D(w=int(gen.integers(1, reach + 1)), r=int(gen.integers(1, 9)))
                )
            case Algorithm.dilated2d:
                b = int(gen.choice(_divisors(L)))
                patterns.append(Dilated2D(b=b, r=int(gen.integers(1, b + 1))))
            case Algorithm.global_:
                k = int(gen.integers(1, min(8, L) + 1))
                indices = tuple(int(i) for i in gen.choice(L, size=k, replace=False))
                patterns.append(Global(indices=indices, w=int(gen.integers(1, reach + 1))))
    return patterns


def _composition_cases(L: int, seed: int) -> list[list[LegSource]]:
    w = LOCAL_REACH + 1
    longformer: list[LegSource] = [Local(w=w), Global(indices=default_global_indices(L), w=w)]
    diagonal: list[LegSource] = [CsrMask.diagonal(L)]
    bigbird = preset("bigbird", L, seed)
    bigbird_legs: list[LegSource] = [
        leg.mask if leg.mask is not None else leg.pattern for leg in bigbird.legs  # type: ignore[misc]
    ]
    return [longformer, diagonal, bigbird_legs]


def run_suite(
    suite: Suite | str = Suite.all,
    seed: int | None = None,
    cases: int = 20,
    *,
    length: int = 256,
    d: int = 32,
    composition_lengths: Sequence[int] = (512, 4096),
) -> SuiteSummary:
    """Run the oracle, work and composition suites; deterministic per seed."""
    suite = Suite(suite)
    seed = settings.seed if seed is None else seed
    summary = SuiteSummary(suite=suite, seed=seed)

    plan: list[tuple[Suite, Algorithm, VerifyCase]] = []
    for algo in KERNEL_FAMILIES:
        for i, pattern in enumerate(random_case_patterns(algo, cases, length, seed)):
            case = VerifyCase(pattern=pattern, length=length, d=d, seed=seed + i)
            for kind in (Suite.oracle, Suite.work):
                if suite.includes(kind):
                    plan.append((kind, algo, case))

    if suite.includes(Suite.work):
        for fixed in (
            VerifyCase(mask=CsrMask.empty(16), length=16, d=d, seed=seed),
            VerifyCase(mask=CsrMask.full(16), length=16, d=d, seed=seed),
            VerifyCase(pattern=Local(w=2), length=8, d=d, seed=seed),
        ):
            plan.append((Suite.work, fixed.default_algorithm(), fixed))

    for kind, algo, case in tqdm(plan, desc=f"verify {suite}", unit="case", disable=None):
        if kind is Suite.oracle:
            summary.checks.append(verify_kernel(case, algo))
        else:
            summary.checks.append(verify_work(case, algo))

    if suite.includes(Suite.composition):
        for L in composition_lengths:
            for legs in _composition_cases(L, seed):
                summary.checks.append(verify_composition(legs, L, d, seed))

    logger.info(
        "Verify suite %s (seed %d): %d passed, %d failed",
        suite,
        seed,
        summary.passed,
        summary.failed,
        extra={"suite": str(suite), "seed": seed},
    )
    return summary
