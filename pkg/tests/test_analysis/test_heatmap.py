import numpy as np
import pytest
import weightscope
from weightscope import IndexKind, Role, RoleTag, SimilarityParams
from weightscope.verify import WITNESS_PAIRS

F64 = SimilarityParams(compute_dtype="f64")

def open_layers(path, layers, naming="llama"):
    weightscope.test.write_checkpoint(path, layers)

    return weightscope.open_checkpoint(path, naming)

def test_identical_layers(tmp_path):
    x     = weightscope.util.standard_normal(weightscope.util.generator(0), (16, 24))
    index = open_layers(tmp_path / "model.safetensors", [{Role.MlpUp: x} for _ in range(3)])

    sim = weightscope.layer_heatmap(index, Role.MlpUp, IndexKind.DOCS)

    assert sim.layer_count == 3
    assert sim.labels      == (0, 1, 2)
    assert sim.model_id    == "model"
    assert sim.role        == RoleTag(Role.MlpUp)
    assert sim.kind        is IndexKind.DOCS

    assert np.array_equal(sim.values, np.ones((3, 3)))

def test_witness_layers(tmp_path):
    x, y, expected = WITNESS_PAIRS[0]

    index = open_layers(tmp_path / "model.safetensors", [{Role.MlpDown: x}, {Role.MlpDown: y}])
    sim   = weightscope.layer_heatmap(index, RoleTag(Role.MlpDown), IndexKind.DOCS, F64)

    assert abs(sim.values[0, 1] - expected) <= 0.01
    assert sim.values[0, 1] == sim.values[1, 0]

def test_gaussian_layers(tmp_path):
    gen    = weightscope.util.generator(1)
    layers = [{Role.MlpUp: weightscope.util.standard_normal(gen, (64, 64))} for _ in range(4)]

    sim = weightscope.layer_heatmap(open_layers(tmp_path / "model.safetensors", layers), Role.MlpUp, IndexKind.DOCS)

    assert np.all(np.diag(sim.values) == 1.0)
    assert np.all(sim.off_diagonal() < 0.6)

@pytest.mark.parametrize("kind", list(IndexKind))
def test_invariants(tmp_path, kind):
    gen    = weightscope.util.generator(2)
    layers = [{Role.Wq: weightscope.util.standard_normal(gen, (12, 8))} for _ in range(3)]

    sim = weightscope.layer_heatmap(open_layers(tmp_path / "model.safetensors", layers), Role.Wq, kind, F64)

    if kind.symmetric:
        assert sim.is_symmetric()

    if kind.reflexive:
        assert sim.has_unit_diagonal()

    if kind is IndexKind.LINREG:
        assert not sim.is_symmetric()

def test_workers(tmp_path):
    gen    = weightscope.util.generator(3)
    layers = [{Role.Wo: weightscope.util.standard_normal(gen, (10, 10))} for _ in range(5)]
    index  = open_layers(tmp_path / "model.safetensors", layers)

    single = weightscope.layer_heatmap(index, Role.Wo, IndexKind.DOCS, SimilarityParams(workers=1))
    many   = weightscope.layer_heatmap(index, Role.Wo, IndexKind.DOCS, SimilarityParams(workers=4))

    assert np.array_equal(single.values, many.values)

def test_missing_layer(tmp_path):
    layers = [{Role.MlpUp: np.eye(4)}, {Role.Wq: np.eye(4)}, {Role.MlpUp: np.eye(4)}]
    index  = open_layers(tmp_path / "model.safetensors", layers)

    with pytest.raises(weightscope.util.SlotNotFoundError, match=r"layer=1, role=MlpUp"):
        weightscope.layer_heatmap(index, Role.MlpUp, IndexKind.DOCS)

def test_expert_heatmap(tmp_path):
    gen  = weightscope.util.generator(4)
    base = weightscope.util.standard_normal(gen, (32, 16))

    experts = [weightscope.test.perturb_columns(gen, base, 0.1) for _ in range(4)]
    experts[2] = weightscope.util.standard_normal(gen, (32, 16))

    layers = [{RoleTag(Role.ExpertW2, expert): matrix for expert, matrix in enumerate(experts)}]
    index  = open_layers(tmp_path / "moe.safetensors", layers, naming="mixtral")

    sim = weightscope.expert_heatmap(index, 0, Role.ExpertW2, IndexKind.DOCS)

    assert sim.labels == (0, 1, 2, 3)
    assert sim.role   is Role.ExpertW2
    assert sim.is_symmetric()

    assert weightscope.outlier_row(sim) == 2

    with pytest.raises(weightscope.util.ArgError, match="not an expert role"):
        weightscope.expert_heatmap(index, 0, Role.MlpUp, IndexKind.DOCS)

    with pytest.raises(weightscope.util.ArgError, match="at least 2 are needed"):
        weightscope.expert_heatmap(index, 0, Role.ExpertW1, IndexKind.DOCS)

def test_similarity_matrix():
    sim = weightscope.SimilarityMatrix([[1.0, 0.5], [0.25, 1.0]], IndexKind.LINREG, Role.Wq)

    assert sim.values.dtype == np.float64
    assert sim.labels       == (0, 1)
    assert sim.has_unit_diagonal()
    assert not sim.is_symmetric()

    assert np.array_equal(sim.off_diagonal(), [0.5, 0.25])

    with pytest.raises(weightscope.util.DimError, match="square"):
        weightscope.SimilarityMatrix(np.ones((2, 3)), IndexKind.DOCS, Role.Wq)

def test_as_role_tag():
    assert weightscope.as_role_tag(Role.Wq)              == RoleTag(Role.Wq)
    assert weightscope.as_role_tag("mlp_up")             == RoleTag(Role.MlpUp)
    assert weightscope.as_role_tag(RoleTag(Role.Wv))     == RoleTag(Role.Wv)

    with pytest.raises(ValueError):
        weightscope.as_role_tag(Role.ExpertW1)
