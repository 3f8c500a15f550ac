import numpy as np
import pytest
import weightscope
from weightscope import Role, RoleTag

@pytest.fixture
def index(tmp_path):
    gen = weightscope.util.generator(0)

    layers = [
        {
            Role.MlpUp:   weightscope.util.standard_normal(gen, (8, 16)),
            Role.MlpDown: weightscope.util.standard_normal(gen, (8, 16)),
        }

        for _ in range(2)
    ]

    weightscope.test.write_checkpoint(tmp_path / "model.safetensors", layers)

    return weightscope.open_checkpoint(tmp_path / "model.safetensors", "llama"), layers

def test_resolve_compute_dtype():
    assert weightscope.resolve_compute_dtype("f32")      == np.float32
    assert weightscope.resolve_compute_dtype("FLOAT64")  == np.float64
    assert weightscope.resolve_compute_dtype(np.float64) == np.float64

    for value in ("f16", "bf16", np.int32, object()):
        with pytest.raises(weightscope.util.ArgError):
            weightscope.resolve_compute_dtype(value)

def test_load_matrix(index):
    index, layers = index

    up = weightscope.load_matrix(index, 1, RoleTag(Role.MlpUp), "f64")

    assert not up.oriented
    assert up.layer == 1
    assert up.role  == RoleTag(Role.MlpUp)
    assert up.shape == (16, 8)
    assert up.n_rows == 16
    assert up.n_cols == 8

    assert up.data.dtype == np.float64
    assert not up.data.flags.writeable
    assert np.array_equal(up.data, layers[1][Role.MlpUp].T)

    f32 = weightscope.load_matrix(index, 1, RoleTag(Role.MlpUp))
    assert f32.data.dtype == np.float32

def test_orient_matrix(index):
    index, layers = index

    up   = weightscope.load_oriented(index, 0, RoleTag(Role.MlpUp),   "f64")
    down = weightscope.load_oriented(index, 0, RoleTag(Role.MlpDown), "f64")

    # Both have the hidden dimension in rows once oriented.
    assert up.oriented and down.oriented
    assert up.shape   == (8, 16)
    assert down.shape == (8, 16)

    assert np.array_equal(up.data,   layers[0][Role.MlpUp])
    assert np.array_equal(down.data, layers[0][Role.MlpDown])

    with pytest.raises(weightscope.util.StateError, match="already oriented"):
        weightscope.orient_matrix(up)

def test_load_raw(tmp_path):
    values = np.array([[1.0, -2.0], [0.5, 3.140625]])

    weightscope.test.write_checkpoint(tmp_path / "w.safetensors", [{Role.Wo: values}], dtypes="bf16")
    index = weightscope.open_checkpoint(tmp_path / "w.safetensors", "llama")

    raw = weightscope.load_raw(index, weightscope.test.tensor_name(0, Role.Wo))
    assert raw.dtype == np.uint16
    assert np.array_equal(raw, weightscope.io.narrow_bf16(values))

    matrix = weightscope.load_oriented(index, 0, RoleTag(Role.Wo))
    assert matrix.data.dtype == np.float32
    assert np.array_equal(matrix.data, values)

def test_non_finite(tmp_path):
    values = np.ones((3, 3))
    values[1, 2] = np.nan
    values[0, 0] = np.inf

    weightscope.test.write_checkpoint(tmp_path / "w.safetensors", [{Role.Wo: values}], dtypes="f16")
    index = weightscope.open_checkpoint(tmp_path / "w.safetensors", "llama")

    with pytest.raises(weightscope.util.NonFiniteError, match="2 non-finite"):
        weightscope.load_matrix(index, 0, RoleTag(Role.Wo))

def test_f16_overflow(tmp_path):
    # Values are finite as stored, so decoding keeps them finite.
    values = np.full((2, 2), 65504.0)

    weightscope.test.write_checkpoint(tmp_path / "w.safetensors", [{Role.Wo: values}], dtypes="f16")
    index = weightscope.open_checkpoint(tmp_path / "w.safetensors", "llama")

    assert np.all(weightscope.load_matrix(index, 0, RoleTag(Role.Wo)).data == 65504.0)

def test_missing_slot(index):
    index, _ = index

    with pytest.raises(weightscope.util.SlotNotFoundError):
        weightscope.load_matrix(index, 5, RoleTag(Role.MlpUp))
