import numpy as np
import pytest
import weightscope
from weightscope.io import DType

def test_read_numpy_files(tmp_path):
    values = np.arange(12, dtype=np.float32).reshape(3, 4)

    np.save(tmp_path / "c.npy", values)
    np.save(tmp_path / "f.npy", np.asfortranarray(values.astype(np.float64)))

    c = weightscope.io.read_npy(tmp_path / "c.npy")
    assert c.name          == "c"
    assert c.dtype         is DType.F32
    assert c.shape         == (3, 4)
    assert not c.fortran_order
    assert np.array_equal(c.memmap(), values)

    f = weightscope.io.read_npy(tmp_path / "f.npy", name="renamed")
    assert f.name  == "renamed"
    assert f.dtype is DType.F64
    assert f.fortran_order
    assert np.array_equal(f.memmap(), values)

def test_save_npy_dir(tmp_path):
    gen = weightscope.util.generator(1)

    tensors = {
        "b": weightscope.util.standard_normal(gen, (5, 3)).astype(np.float16),
        "a": weightscope.util.standard_normal(gen, (2, 6)),
    }

    records = weightscope.io.save_npy_dir(tmp_path / "ckpt", tensors)

    assert [record.name for record in records] == ["a", "b"]
    assert records == weightscope.io.read_npy_dir(tmp_path / "ckpt")

    for record in records:
        assert record.byte_offset % 64 == 0
        assert np.array_equal(record.memmap(), tensors[record.name])

        # Readable by NumPy itself.
        assert np.array_equal(np.load(record.path), tensors[record.name])

def test_save_npy_dir_unsupported(tmp_path):
    with pytest.raises(ValueError, match="as NPY"):
        weightscope.io.save_npy_dir(tmp_path, {"w": np.zeros(3, dtype=np.uint16)})

def test_unsupported_dtypes(tmp_path):
    np.save(tmp_path / "big.npy", np.zeros(3, dtype=">f4"))
    with pytest.raises(weightscope.util.ParseError, match="unsupported dtype"):
        weightscope.io.read_npy(tmp_path / "big.npy")

    np.save(tmp_path / "int.npy", np.zeros(3, dtype=np.int32))
    with pytest.raises(weightscope.util.ParseError, match="unsupported dtype"):
        weightscope.io.read_npy(tmp_path / "int.npy")

def test_malformed(tmp_path):
    path = tmp_path / "w.npy"

    path.write_bytes(b"\x93NUMPZ\x01\x00")
    with pytest.raises(weightscope.util.ParseError, match="signature"):
        weightscope.io.read_npy(path)

    path.write_bytes(b"\x93NUMPY\x01")
    with pytest.raises(weightscope.util.ParseError):
        weightscope.io.read_npy(path)

    path.write_bytes(b"\x93NUMPY\x09\x00")
    with pytest.raises(weightscope.util.ParseError, match="unsupported NPY version 9.0"):
        weightscope.io.read_npy(path)

    np.save(path, np.zeros((4, 4)))
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(weightscope.util.ParseError, match="only 120 remain"):
        weightscope.io.read_npy(path)

def test_malformed_header(tmp_path):
    path   = tmp_path / "w.npy"
    header = weightscope.io.types.PrefixedString(weightscope.io.types.UInt16, encoding="latin1")

    path.write_bytes(b"\x93NUMPY\x01\x00" + header.pack("{'descr': '<f4'}\n"))
    with pytest.raises(weightscope.util.ParseError, match="lacks"):
        weightscope.io.read_npy(path)

    path.write_bytes(b"\x93NUMPY\x01\x00" + header.pack("not a literal\n"))
    with pytest.raises(weightscope.util.ParseError, match="not a Python literal"):
        weightscope.io.read_npy(path)
