import json

import pytest
import weightscope
from weightscope import NamingConfig, NamingPattern, Role, RoleTag

def test_presets():
    llama   = NamingConfig.load("llama")
    gemma   = NamingConfig.load("gemma")
    mixtral = NamingConfig.load("mixtral")

    assert llama.name == "llama"

    assert llama.match("model.layers.0.self_attn.q_proj.weight")  == (0,  RoleTag(Role.Wq))
    assert llama.match("model.layers.31.mlp.down_proj.weight")    == (31, RoleTag(Role.MlpDown))
    assert llama.match("model.layers.2.mlp.gate_proj.weight")     == (2,  RoleTag(Role.MlpGate))

    # Names must match in full.
    assert llama.match("model.layers.2.mlp.gate_proj.weight.bak") is None
    assert llama.match("model.layers.2.mlp.gate_proj.bias")       is None
    assert llama.match("lm_head.weight")                          is None

    assert gemma.match("language_model.model.layers.4.self_attn.o_proj.weight") == (4, RoleTag(Role.Wo))
    assert gemma.match("model.layers.4.self_attn.o_proj.weight")                == (4, RoleTag(Role.Wo))

    assert mixtral.match("model.layers.1.block_sparse_moe.experts.7.w2.weight") == (1, RoleTag(Role.ExpertW2, 7))
    assert mixtral.match("model.layers.1.mlp.up_proj.weight")                   is None

    with pytest.raises(weightscope.util.ConfigError, match="Unknown naming preset"):
        NamingConfig.preset("gpt")

def test_first_match_wins():
    config = NamingConfig.from_json({"patterns": [
        {"regex": r"w\.(?P<layer>\d+)", "role": "Wq"},
        {"regex": r"w\.(?P<layer>\d+)", "role": "Wk"},
    ]})

    assert config.match("w.3") == (3, RoleTag(Role.Wq))

def test_load_file(tmp_path):
    path = tmp_path / "naming.json"
    path.write_text(json.dumps({"patterns": [
        {"regex": r"blocks\.(?P<layer>\d+)\.ffn\.(?P<expert>\d+)\.in", "role": "ExpertW1"},
    ]}))

    config = NamingConfig.load(path)

    assert config.name == str(path)
    assert config.match("blocks.5.ffn.3.in") == (5, RoleTag(Role.ExpertW1, 3))

    # Loaded configurations pass through.
    assert NamingConfig.load(config) is config

def test_load_errors(tmp_path):
    with pytest.raises(weightscope.util.ConfigError, match="neither a preset"):
        NamingConfig.load(tmp_path / "missing.json")

    path = tmp_path / "bad.json"
    path.write_text("{")
    with pytest.raises(weightscope.util.ConfigError, match="Cannot read"):
        NamingConfig.load(path)

    path.write_text("[]")
    with pytest.raises(weightscope.util.ConfigError, match="'patterns' list"):
        NamingConfig.load(path)

def test_pattern_errors():
    with pytest.raises(weightscope.util.ConfigError, match="string 'regex' and 'role'"):
        NamingPattern.from_json({"regex": r"(?P<layer>\d+)"})

    with pytest.raises(weightscope.util.ConfigError, match="Invalid naming regex"):
        NamingPattern.from_json({"regex": r"(?P<layer>\d+", "role": "Wq"})

    with pytest.raises(weightscope.util.ConfigError, match="lacks a named group 'layer'"):
        NamingPattern.from_json({"regex": r"w\.\d+", "role": "Wq"})

    with pytest.raises(weightscope.util.ConfigError, match="lacks a named group 'expert'"):
        NamingPattern.from_json({"regex": r"w\.(?P<layer>\d+)", "role": "ExpertW2"})

    with pytest.raises(weightscope.util.ConfigError, match="must not have a group 'expert'"):
        NamingPattern.from_json({"regex": r"w\.(?P<layer>\d+)\.(?P<expert>\d+)", "role": "Wv"})

    with pytest.raises(weightscope.util.ConfigError, match="Unknown role"):
        NamingPattern.from_json({"regex": r"w\.(?P<layer>\d+)", "role": "Embedding"})
