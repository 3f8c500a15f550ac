import pytest
import weightscope
from weightscope import Role, RoleTag

def test_role_parse():
    assert Role.parse("MlpUp")     is Role.MlpUp
    assert Role.parse("mlp_up")    is Role.MlpUp
    assert Role.parse("MLPDOWN")   is Role.MlpDown
    assert Role.parse("expert_w1") is Role.ExpertW1

    with pytest.raises(weightscope.util.ConfigError, match="Unknown role 'mlp'"):
        Role.parse("mlp")

def test_role_properties():
    assert {role for role in Role if role.is_expert} == {Role.ExpertW1, Role.ExpertW2, Role.ExpertW3}

    assert {role for role in Role if not role.transposed} == {Role.Wo, Role.MlpDown, Role.ExpertW2}

def test_role_tag():
    assert str(RoleTag(Role.Wq))          == "Wq"
    assert str(RoleTag(Role.ExpertW3, 0)) == "ExpertW3[0]"

    assert RoleTag(Role.ExpertW1, 2) == RoleTag(Role.ExpertW1, 2)
    assert RoleTag(Role.ExpertW1, 2) != RoleTag(Role.ExpertW1, 3)

    assert len({RoleTag(Role.Wq), RoleTag(Role.Wq)}) == 1

    with pytest.raises(ValueError, match="requires a non-negative expert index"):
        RoleTag(Role.ExpertW2)

    with pytest.raises(ValueError, match="requires a non-negative expert index"):
        RoleTag(Role.ExpertW2, -1)

    with pytest.raises(ValueError, match="does not take an expert index"):
        RoleTag(Role.MlpUp, 0)

def test_role_tag_order():
    tags = [
        RoleTag(Role.ExpertW1, 10),
        RoleTag(Role.MlpUp),
        RoleTag(Role.ExpertW1, 2),
        RoleTag(Role.Wq),
    ]

    assert sorted(tags, key=RoleTag.sort_key) == [
        RoleTag(Role.Wq),
        RoleTag(Role.MlpUp),
        RoleTag(Role.ExpertW1, 2),
        RoleTag(Role.ExpertW1, 10),
    ]
