"""Utilities for testing, exposed for users to use as well."""

import numpy as np

from . import io
from . import util
from .checkpoint import Role, RoleTag

__all__ = [
    "type_behavior",
    "type_behavior_func",
    "tensor_name",
    "stored_layout",
    "write_checkpoint",
    "perturb_columns",
    "planted_cluster_layers",
    "planted_block_matrix",
    "naive_max_cos_sim",
    "gumbel_samples",
]

def type_behavior(type_cls, *values_and_data, static_size, default):
    r"""Asserts values marshal to and from expected data using a :class:`.Type`.

    Whether the reported size from :meth:`.Type.size` for each value equals
    the size of the packed data is also asserted.

    Parameters
    ----------
    type_cls : subclass of :class:`.Type`
        The :class:`.Type` to test.
    *values_and_data : pair of any and :class:`bytes`
        The values and data to test.
    static_size : :class:`int` or ``None``
        The size of ``type_cls`` irrespective of any value.

        If ``None``, then ``type_cls`` should have no static size.
    default
        The default value of ``type_cls``.

    Examples
    --------
    >>> import weightscope
    >>> weightscope.test.type_behavior(
    ...     weightscope.io.UInt16,
    ...
    ...     (1,     b"\x01\x00"),
    ...     (0x102, b"\x02\x01"),
    ...
    ...     static_size = 2,
    ...     default     = 0,
    ... )
    """

    for value, data in values_and_data:
        data_from_value = type_cls.pack(value)
        value_from_data = type_cls.unpack(data)

        assert data_from_value == data,  f"{data_from_value=}; {data=}; {value=}"
        assert value_from_data == value, f"{value_from_data=}; {value=}; {data=}"

        size_from_value = type_cls.size(value)
        assert size_from_value == len(data), f"{size_from_value=}; {data=}; {value=}"

    assert type_cls.size() == static_size
    assert type_cls.default() == default

def type_behavior_func(*args, **kwargs):
    """Generates a function that calls :func:`type_behavior`.

    Parameters
    ----------
    *args, **kwargs
        Forwarded to :func:`type_behavior`.
    """

    return lambda: type_behavior(*args, **kwargs)

_NAME_FORMATS = {
    Role.Wq:       "model.layers.{layer}.self_attn.q_proj.weight",
    Role.Wk:       "model.layers.{layer}.self_attn.k_proj.weight",
    Role.Wv:       "model.layers.{layer}.self_attn.v_proj.weight",
    Role.Wo:       "model.layers.{layer}.self_attn.o_proj.weight",
    Role.MlpUp:    "model.layers.{layer}.mlp.up_proj.weight",
    Role.MlpDown:  "model.layers.{layer}.mlp.down_proj.weight",
    Role.MlpGate:  "model.layers.{layer}.mlp.gate_proj.weight",
    Role.ExpertW1: "model.layers.{layer}.block_sparse_moe.experts.{expert}.w1.weight",
    Role.ExpertW2: "model.layers.{layer}.block_sparse_moe.experts.{expert}.w2.weight",
    Role.ExpertW3: "model.layers.{layer}.block_sparse_moe.experts.{expert}.w3.weight",
}

def tensor_name(layer, role):
    """Gets the name of a slot's tensor under the ``llama`` and ``mixtral`` presets.

    Parameters
    ----------
    layer : :class:`int`
        The layer.
    role : :class:`.RoleTag` or :class:`.Role`
        The role.

    Returns
    -------
    :class:`str`
        The tensor name.

    Examples
    --------
    >>> from weightscope.checkpoint import Role, RoleTag
    >>> from weightscope.test import tensor_name
    >>> tensor_name(3, Role.MlpUp)
    'model.layers.3.mlp.up_proj.weight'
    >>> tensor_name(0, RoleTag(Role.ExpertW2, 5))
    'model.layers.0.block_sparse_moe.experts.5.w2.weight'
    """

    if isinstance(role, Role):
        role = RoleTag(role)

    return _NAME_FORMATS[role.role].format(layer=layer, expert=role.expert)

def stored_layout(role, oriented):
    """Converts an oriented matrix to how it is stored in a checkpoint."""

    if isinstance(role, RoleTag):
        role = role.role

    oriented = np.asarray(oriented)

    return oriented.T if role.transposed else oriented

def write_checkpoint(path, layers, *, dtypes=None, oriented=True):
    """Writes a synthetic checkpoint as a safetensors file.

    Parameters
    ----------
    path : path-like
        The file to write.
    layers : :class:`list` of :class:`dict`
        For each layer, a mapping of :class:`.RoleTag`\\s (or
        non-expert :class:`.Role`\\s) to matrices. Tensors are
        named as :func:`tensor_name` names them, so the
        checkpoint can be read with the ``llama`` preset, or
        the ``mixtral`` preset if it has experts.
    dtypes : :class:`.DType` or :class:`str` or ``None``
        The dtype to store every matrix as, or ``None``
        to store each in its own dtype.
    oriented : :class:`bool`
        Whether the matrices are given oriented, in which
        case they are converted with :func:`stored_layout`.

    Returns
    -------
    :class:`list` of :class:`.TensorRecord`
        The records of the written tensors.
    """

    tensors = {}
    for layer, matrices in enumerate(layers):
        for role, matrix in matrices.items():
            tensors[tensor_name(layer, role)] = stored_layout(role, matrix) if oriented else np.asarray(matrix)

    if dtypes is not None:
        dtypes = {name: dtypes for name in tensors}

    return io.save_safetensors(path, tensors, dtypes)

def perturb_columns(gen, x, fraction):
    """Adds Gaussian noise to each column of a matrix.

    Parameters
    ----------
    gen : :class:`numpy.random.Generator`
        The generator to draw the noise from.
    x : :class:`numpy.ndarray`
        The matrix.
    fraction : :class:`float`
        The expected norm of each column's noise,
        relative to the norm of the column.

    Returns
    -------
    :class:`numpy.ndarray`
        The perturbed matrix.
    """

    n     = x.shape[0]
    noise = util.standard_normal(gen, x.shape) / np.sqrt(n)

    return x + fraction * np.linalg.norm(x, axis=0) * noise

def planted_cluster_layers(seed, *, num_layers=12, clusters=((2, 6), (8, 12)), shape=(64, 64), noise=0.1, role=Role.MlpUp):
    """Makes layers whose matrices are grouped into clusters.

    Layers within a cluster are noisy copies of a shared base
    matrix, and every other matrix is drawn independently, so
    layer heatmaps have bright blocks along their diagonal.

    Parameters
    ----------
    seed : :class:`int`
        The seed.
    num_layers : :class:`int`
        The number of layers.
    clusters : iterable of pairs of :class:`int`
        The half-open ranges of layers in each cluster.
    shape : pair of :class:`int`
        The oriented shape of every matrix.
    noise : :class:`float`
        The relative noise, as for :func:`perturb_columns`.
    role : :class:`.Role`
        The role the matrices fill.

    Returns
    -------
    :class:`list` of :class:`dict`
        Layers for :func:`write_checkpoint`.
    """

    gen = util.generator(seed)

    matrices = [util.standard_normal(gen, shape) for _ in range(num_layers)]
    for start, stop in clusters:
        base = util.standard_normal(gen, shape)

        for layer in range(start, stop):
            matrices[layer] = perturb_columns(gen, base, noise)

    return [{role: matrix} for matrix in matrices]

def planted_block_matrix(size=12, block=(4, 8), inside=0.8, background=0.3):
    """Makes a similarity matrix with one bright diagonal block.

    Examples
    --------
    >>> from weightscope.test import planted_block_matrix
    >>> planted_block_matrix(4, (1, 3))
    array([[1. , 0.3, 0.3, 0.3],
           [0.3, 1. , 0.8, 0.3],
           [0.3, 0.8, 1. , 0.3],
           [0.3, 0.3, 0.3, 1. ]])
    """

    values = np.full((size, size), background)

    start, stop = block
    values[start:stop, start:stop] = inside

    np.fill_diagonal(values, 1.0)

    return values

def naive_max_cos_sim(a, b):
    """Computes maximum absolute cosine similarities by materializing every one.

    Parameters
    ----------
    a, b : :class:`numpy.ndarray`
        Matrices with the same number of rows.

    Returns
    -------
    :class:`numpy.ndarray`
        For each column of ``a``, its maximum absolute
        cosine similarity with the columns of ``b``.
    """

    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)

    cos = (a / np.linalg.norm(a, axis=0)).T @ (b / np.linalg.norm(b, axis=0))

    return np.abs(cos).max(axis=1)

def gumbel_samples(seed, count, location, scale):
    """Draws samples from a Gumbel distribution by inverting its CDF.

    Parameters
    ----------
    seed : :class:`int`
        The seed.
    count : :class:`int`
        The number of samples.
    location, scale : :class:`float`
        The parameters of the distribution.

    Returns
    -------
    :class:`numpy.ndarray`
        The samples.
    """

    uniforms = 1.0 - util.generator(seed).random(count)

    return location - scale * np.log(-np.log(uniforms))
