import numpy as np
import pytest
import weightscope

def test_orthonormal_basis():
    gen = weightscope.util.generator(0)

    q = weightscope.orthonormal_basis(weightscope.random_orthogonal(6, gen))
    assert q.shape == (6, 6)
    assert np.allclose(q.T @ q, np.eye(6), rtol=0, atol=1e-10)

    v = weightscope.util.standard_normal(gen, (5, 1))
    assert weightscope.orthonormal_basis(np.hstack([v, 2 * v])).shape == (5, 1)

    assert weightscope.orthonormal_basis(np.zeros((4, 3))).shape == (4, 0)
    assert weightscope.orthonormal_basis(np.zeros((4, 0))).shape == (4, 0)

def test_orthonormal_basis_span():
    x = weightscope.util.standard_normal(weightscope.util.generator(1), (8, 5))
    q = weightscope.orthonormal_basis(x)

    assert q.shape == (8, 5)
    assert np.allclose(q.T @ q, np.eye(5), rtol=0, atol=1e-10)

    # Both projectors onto the column space agree.
    projector = x @ np.linalg.solve(x.T @ x, x.T)
    assert np.allclose(q @ q.T, projector, rtol=0, atol=1e-10)

def test_orthonormal_basis_non_finite():
    x = np.eye(3)
    x[0, 1] = np.inf

    with pytest.raises(weightscope.util.NonFiniteError):
        weightscope.orthonormal_basis(x)

def test_singular_values():
    assert np.allclose(weightscope.singular_values(np.eye(4)),              [1.0, 1.0, 1.0, 1.0])
    assert np.allclose(weightscope.singular_values(np.diag([3.0, 2.0, 1.0])), [3.0, 2.0, 1.0])

    x = weightscope.util.standard_normal(weightscope.util.generator(2), (6, 4))

    expected = np.sqrt(np.linalg.eigvalsh(x.T @ x))[::-1]
    assert np.allclose(weightscope.singular_values(x), expected, rtol=0, atol=1e-8)

    assert weightscope.nuclear_norm(np.diag([3.0, -2.0, 1.0])) == pytest.approx(6.0)

def test_hadamard():
    assert np.array_equal(weightscope.hadamard(1), [[1]])
    assert np.array_equal(weightscope.hadamard(2), [[1, 1], [1, -1]])

    for m in (4, 8, 64):
        h = weightscope.hadamard(m)

        assert set(np.unique(h)) == {-1, 1}
        assert np.array_equal(h.T @ h, m * np.eye(m, dtype=np.int64))

    for m in (0, 3, 6, 12, -4):
        with pytest.raises(weightscope.util.ArgError, match="power of two"):
            weightscope.hadamard(m)

def test_random_orthogonal():
    q = weightscope.random_orthogonal(16, weightscope.util.generator(3))

    assert np.allclose(q.T @ q, np.eye(16), rtol=0, atol=1e-12)
    assert np.allclose(q @ q.T, np.eye(16), rtol=0, atol=1e-12)

    assert np.array_equal(q, weightscope.random_orthogonal(16, weightscope.util.generator(3)))
    assert not np.array_equal(q, weightscope.random_orthogonal(16, weightscope.util.generator(4)))

    with pytest.raises(weightscope.util.ArgError):
        weightscope.random_orthogonal(0, weightscope.util.generator(3))
