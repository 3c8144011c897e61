import struct
from pathlib import Path

import pytest
import torch

from graph_attn.core.errors import MaskFileError
from graph_attn.core.mask import (
    Global,
    Local,
    gen_pattern_mask,
    load_csr,
    load_dense_csv,
    load_mask,
    mask_equal,
    save_csr,
)
from graph_attn.core.mask.io import MAGIC

pytestmark = pytest.mark.core


def test_save_and_load_binary(tmp_path: Path) -> None:
    mask = gen_pattern_mask(Global(indices=(0, 9), w=2), 16)
    path = save_csr(mask, tmp_path / "nested" / "global.csrm")
    assert path.read_bytes()[:4] == MAGIC
    loaded = load_mask(path)
    assert mask_equal(loaded, mask)
    assert torch.equal(loaded.offsets, mask.offsets)


def test_bad_magic(tmp_path: Path) -> None:
    path = tmp_path / "bad.csrm"
    save_csr(gen_pattern_mask(Local(w=2), 4), path)
    raw = bytearray(path.read_bytes())
    raw[:4] = b"NOPE"
    path.write_bytes(bytes(raw))
    with pytest.raises(MaskFileError, match="bad magic"):
        load_csr(path)


def test_truncated_file(tmp_path: Path) -> None:
    path = tmp_path / "short.csrm"
    save_csr(gen_pattern_mask(Local(w=2), 4), path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(MaskFileError, match="expected"):
        load_csr(path)
    path.write_bytes(b"CSR")
    with pytest.raises(MaskFileError, match="truncated header"):
        load_csr(path)


def test_unsupported_version(tmp_path: Path) -> None:
    path = tmp_path / "v2.csrm"
    path.write_bytes(struct.pack("<4sQQQ", MAGIC, 2, 1, 0) + struct.pack("<QQ", 0, 0))
    with pytest.raises(MaskFileError, match="version"):
        load_csr(path)


def test_invalid_contents_become_file_errors(tmp_path: Path) -> None:
    path = tmp_path / "oob.csrm"
    # L=2, one entry at column 5
    body = struct.pack("<QQQ", 0, 1, 1) + struct.pack("<Q", 5)
    path.write_bytes(struct.pack("<4sQQQ", MAGIC, 1, 2, 1) + body)
    with pytest.raises(MaskFileError, match="invalid mask"):
        load_csr(path)


def test_dense_csv(tmp_path: Path) -> None:
    path = tmp_path / "grid.csv"
    path.write_text("1,1,0\n1,1,1\n0,1,1\n", encoding="utf-8")
    mask = load_mask(path)
    assert mask_equal(mask, gen_pattern_mask(Local(w=2), 3))


def test_dense_csv_rejects_bad_grids(tmp_path: Path) -> None:
    path = tmp_path / "rect.csv"
    path.write_text("1,0,1\n0,1,0\n", encoding="utf-8")
    with pytest.raises(MaskFileError, match="square"):
        load_dense_csv(path)
    path.write_text("1,2\n0,1\n", encoding="utf-8")
    with pytest.raises(MaskFileError, match="0 or 1"):
        load_dense_csv(path)


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(MaskFileError, match="not found"):
        load_mask(tmp_path / "absent.csrm")


@pytest.mark.parametrize(
    "text",
    ["1,x\n0,1\n", "1,0\n1\n"],
    ids=["non_numeric", "ragged"],
)
def test_dense_csv_parse_failures_are_file_errors(tmp_path: Path, text: str) -> None:
    path = tmp_path / "broken.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(MaskFileError, match="not a 0-1 CSV grid") as exc_info:
        load_mask(path)
    assert exc_info.value.to_dict()["path"] == str(path)
