import numpy as np
import pytest
import weightscope
from weightscope import Role, RoleTag
from weightscope.io import DType, TensorRecord
from weightscope.test import tensor_name

def fake_record(name, shape=(4, 8), dtype=DType.F32):
    return TensorRecord(
        name        = name,
        dtype       = dtype,
        shape       = shape,
        byte_offset = 0,
        byte_length = int(np.prod(shape)) * dtype.itemsize,
        path        = "unused.safetensors",
    )

def test_build_index():
    records = [
        fake_record("model.embed_tokens.weight", (100, 8)),
        fake_record(tensor_name(1, Role.MlpUp)),
        fake_record(tensor_name(0, Role.MlpUp)),
        fake_record(tensor_name(0, Role.Wq)),
        fake_record("model.layers.0.input_layernorm.weight", (8,)),
    ]

    index = weightscope.build_index(records, "llama", model_id="tiny")

    assert index.model_id   == "tiny"
    assert index.num_layers == 2
    assert len(index)       == 3

    assert list(index.layer_map) == [
        (0, RoleTag(Role.Wq)),
        (0, RoleTag(Role.MlpUp)),
        (1, RoleTag(Role.MlpUp)),
    ]

    assert (1, RoleTag(Role.MlpUp)) in index
    assert (1, RoleTag(Role.Wq))    not in index

    assert index.roles()                   == [RoleTag(Role.Wq), RoleTag(Role.MlpUp)]
    assert index.layers(RoleTag(Role.MlpUp)) == [0, 1]
    assert index.layers(RoleTag(Role.Wq))    == [0]

    assert index.slot(1, RoleTag(Role.MlpUp)) is records[1]
    assert index.record("model.embed_tokens.weight") is records[0]

    # Unmapped tensors are kept, but fill no slot.
    assert len(index.records) == 5

def test_slot_not_found():
    index = weightscope.build_index([fake_record(tensor_name(0, Role.Wq))], "llama")

    with pytest.raises(weightscope.util.SlotNotFoundError, match=r"\(layer=3, role=Wq\)"):
        index.slot(3, RoleTag(Role.Wq))

    with pytest.raises(KeyError):
        index.record("missing")

def test_empty_index():
    index = weightscope.build_index([fake_record("lm_head.weight")], "llama")

    assert index.num_layers == 0
    assert index.roles()    == []

def test_experts():
    records = [
        fake_record(tensor_name(0, RoleTag(Role.ExpertW1, expert)))

        for expert in (3, 0, 1)
    ]
    records.append(fake_record(tensor_name(0, RoleTag(Role.ExpertW2, 0)), (8, 4)))

    index = weightscope.build_index(records, "mixtral")

    assert index.experts(0, Role.ExpertW1) == [0, 1, 3]
    assert index.experts(0, Role.ExpertW2) == [0]
    assert index.experts(1, Role.ExpertW1) == []

def test_duplicates():
    with pytest.raises(weightscope.util.DuplicateTensorError, match="Duplicate tensor name"):
        weightscope.build_index([fake_record("w"), fake_record("w")], "llama")

    config = weightscope.NamingConfig.from_json({"patterns": [
        {"regex": r"(?:a|b)\.(?P<layer>\d+)", "role": "Wq"},
    ]})

    with pytest.raises(weightscope.util.DuplicateTensorError, match="already taken"):
        weightscope.build_index([fake_record("a.0"), fake_record("b.0")], config)

def test_shape_errors():
    with pytest.raises(weightscope.util.ShapeError, match=r"\[4, 8, 2\]"):
        weightscope.build_index([fake_record(tensor_name(0, Role.Wq), (4, 8, 2))], "llama")

    with pytest.raises(weightscope.util.ShapeError, match=r"\[0, 8\]"):
        weightscope.build_index([fake_record(tensor_name(0, Role.Wq), (0, 8))], "llama")

def test_open_checkpoint(tmp_path):
    layers = [{Role.MlpUp: np.ones((4, 6)), Role.Wo: np.eye(4)} for _ in range(3)]

    weightscope.test.write_checkpoint(tmp_path / "model.safetensors", layers)

    index = weightscope.open_checkpoint(tmp_path / "model.safetensors", "llama")

    assert index.model_id   == "model"
    assert index.num_layers == 3
    assert index.roles()    == [RoleTag(Role.Wo), RoleTag(Role.MlpUp)]

    # Stored with the hidden dimension in columns.
    assert index.slot(0, RoleTag(Role.MlpUp)).shape == (6, 4)

def test_open_shards(tmp_path):
    first  = {tensor_name(0, Role.Wq): np.ones((2, 2)), tensor_name(1, Role.Wq): np.ones((2, 2))}
    second = {tensor_name(2, Role.Wq): np.ones((2, 2))}

    shards = tmp_path / "shards"
    shards.mkdir()

    weightscope.io.save_safetensors(shards / "model-00001.safetensors", first)
    weightscope.io.save_safetensors(shards / "model-00002.safetensors", second)

    index = weightscope.open_checkpoint(shards, "llama", model_id="sharded")
    assert index.model_id   == "sharded"
    assert index.num_layers == 3

    # A list of files is merged the same way.
    index = weightscope.open_checkpoint(sorted(shards.iterdir()), "llama")
    assert index.model_id   == "model-00001"
    assert index.num_layers == 3

    # Names must be unique across shards.
    weightscope.io.save_safetensors(shards / "model-00003.safetensors", second)
    with pytest.raises(weightscope.util.DuplicateTensorError):
        weightscope.open_checkpoint(shards, "llama")

def test_open_npy_dir(tmp_path):
    tensors = {tensor_name(layer, Role.MlpDown): np.eye(3) for layer in range(2)}

    weightscope.io.save_npy_dir(tmp_path / "npy", tensors)

    index = weightscope.open_checkpoint(tmp_path / "npy", "llama")
    assert index.layers(RoleTag(Role.MlpDown)) == [0, 1]

    index = weightscope.open_checkpoint(tmp_path / "npy" / f"{tensor_name(1, Role.MlpDown)}.npy", "llama")
    assert index.layers(RoleTag(Role.MlpDown)) == [1]

def test_open_missing(tmp_path):
    with pytest.raises(weightscope.util.ParseError, match="no such file"):
        weightscope.open_checkpoint(tmp_path / "missing.safetensors", "llama")
