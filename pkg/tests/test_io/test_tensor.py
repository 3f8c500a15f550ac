import numpy as np
import pytest
import weightscope
from weightscope.io import DType, TensorRecord

def test_dtype():
    assert DType.from_tag("F64")  is DType.F64
    assert DType.from_tag("BF16") is DType.BF16
    assert DType.from_tag("I32")  is None
    assert DType.from_tag("f32")  is None

    assert DType.from_numpy(np.float32)  is DType.F32
    assert DType.from_numpy("<f2")       is DType.F16
    assert DType.from_numpy(">f4")       is None
    assert DType.from_numpy(np.int32)    is None

    assert [dtype.itemsize for dtype in DType] == [8, 4, 2, 2]

    assert DType.BF16.storage == np.dtype("<u2")
    assert DType.F32.tag      == "F32"

def test_widen_bf16():
    bits = np.array([0x0000, 0x3F80, 0xBF80, 0x4049, 0x7F80], dtype=np.uint16)

    assert np.array_equal(
        weightscope.io.widen_bf16(bits),

        np.array([0.0, 1.0, -1.0, 3.140625, np.inf], dtype=np.float32),
    )

def test_narrow_bf16():
    # Representable values are exact.
    values = np.array([0.0, 1.0, -2.0, 0.5, 3.140625, 256.0], dtype=np.float32)
    assert np.array_equal(weightscope.io.widen_bf16(weightscope.io.narrow_bf16(values)), values)

    # Rounds to nearest, ties to even.
    assert weightscope.io.narrow_bf16(np.array([1 + 2**-8]))[0]     == 0x3F80
    assert weightscope.io.narrow_bf16(np.array([1 + 3 * 2**-8]))[0] == 0x3F82
    assert weightscope.io.narrow_bf16(np.array([1 + 2**-7 + 2**-9]))[0] == 0x3F81

def test_bf16_error():
    values = weightscope.util.standard_normal(weightscope.util.generator(3), 1000)
    widened = weightscope.io.widen_bf16(weightscope.io.narrow_bf16(values))

    # 8 bits of precision.
    assert np.all(np.abs(widened - values) <= np.abs(values) * 2**-8 * (1 + 1e-6))

def test_tensor_record(tmp_path):
    path = tmp_path / "data.bin"
    path.write_bytes(b"\xFF" * 4 + np.arange(6, dtype="<f4").tobytes())

    record = TensorRecord(
        name        = "w",
        dtype       = DType.F32,
        shape       = [2, 3],
        byte_offset = 4,
        byte_length = 24,
        path        = str(path),
    )

    assert record.shape         == (2, 3)
    assert record.path          == path
    assert record.ndim          == 2
    assert record.element_count == 6

    data = record.memmap()
    assert np.array_equal(data, np.arange(6, dtype=np.float32).reshape(2, 3))
    assert not data.flags.writeable

def test_tensor_record_errors(tmp_path):
    with pytest.raises(weightscope.util.ParseError, match="needs 24 bytes but spans 20"):
        TensorRecord("w", DType.F32, (2, 3), 0, 20, tmp_path / "w")

    with pytest.raises(weightscope.util.ParseError, match="negative offset"):
        TensorRecord("w", DType.F32, (2, 3), -1, 24, tmp_path / "w")

    with pytest.raises(weightscope.util.ParseError, match="negative dimension"):
        TensorRecord("w", DType.F32, (2, -3), 0, 0, tmp_path / "w")

def test_empty_tensor_record(tmp_path):
    record = TensorRecord("w", DType.F16, (0, 4), 0, 0, tmp_path / "missing")

    assert record.memmap().shape == (0, 4)
