"""Similarity index kinds, scores and parameters."""

import dataclasses
import enum

from .. import util

__all__ = [
    "IndexKind",
    "SimilarityScore",
    "SimilarityParams",
]

class IndexKind(enum.Enum):
    """A similarity index between two weight matrices.

    Examples
    --------
    >>> from weightscope.simcore import IndexKind
    >>> IndexKind.parse("linear_cka")
    <IndexKind.LINEAR_CKA: 'LINEAR_CKA'>
    >>> IndexKind.LINREG.symmetric
    False
    >>> IndexKind.CCA_R2.reflexive
    False
    """

    DOCS          = "DOCS"
    DOCS_MEAN     = "DOCS_MEAN"
    LINREG        = "LINREG"
    CCA_R2        = "CCA_R2"
    CCA_NUCLEAR   = "CCA_NUCLEAR"
    SVCCA_R2      = "SVCCA_R2"
    SVCCA_NUCLEAR = "SVCCA_NUCLEAR"
    LINEAR_HSIC   = "LINEAR_HSIC"
    LINEAR_CKA    = "LINEAR_CKA"

    @property
    def is_docs(self):
        """Whether the kind is computed from column-wise cosine similarities."""

        return self in (IndexKind.DOCS, IndexKind.DOCS_MEAN)

    @property
    def symmetric(self):
        """Whether ``S(X, Y) == S(Y, X)`` for the kind."""

        return self not in (IndexKind.LINREG, IndexKind.LINEAR_HSIC)

    @property
    def reflexive(self):
        """Whether ``S(X, X) == 1`` for the kind."""

        return self not in (IndexKind.DOCS_MEAN, IndexKind.CCA_R2, IndexKind.LINEAR_HSIC)

    @property
    def bounded(self):
        """Whether values of the kind lie in ``[0, 1]``."""

        return self is not IndexKind.LINEAR_HSIC

    @classmethod
    def parse(cls, text):
        """Parses an :class:`IndexKind` from its name, ignoring case and dashes.

        Raises
        ------
        :exc:`.ConfigError`
            If no kind has that name.
        """

        key = text.strip().upper().replace("-", "_")
        if key in cls.__members__:
            return cls[key]

        raise util.ConfigError(f"Unknown index kind '{text}'; expected one of {', '.join(cls.__members__)}")

@dataclasses.dataclass(frozen=True)
class SimilarityScore:
    """The value of a similarity index for a pair of matrices.

    Parameters
    ----------
    kind : :class:`IndexKind`
        The index.
    value : :class:`float`
        Its value.
    meta : :class:`dict`
        Diagnostics, e.g. both Gumbel fits for DOCS.
    """

    kind:  IndexKind
    value: float
    meta:  dict = dataclasses.field(default_factory=dict, compare=False)

    def __float__(self):
        return self.value

@dataclasses.dataclass(frozen=True)
class SimilarityParams:
    """Parameters shared by similarity computations.

    Parameters
    ----------
    svcca_threshold : :class:`float`
        The fraction of variance kept by SVCCA truncation, in ``(0, 1]``.
    aggregate : :class:`str`
        ``"max"`` for DOCS, or ``"mean"`` for its mean-aggregation variant.
        Only used when a kind is not given explicitly.
    tile : :class:`int`
        The number of columns per tile of the cosine kernel.
    workers : :class:`int` or ``None``
        The number of worker threads. If ``None``, the number of
        CPUs, capped by the ``WEIGHTSCOPE_THREADS`` environment variable.
    compute_dtype : :class:`str`
        ``"f32"`` or ``"f64"``, the dtype matrices are decoded to.

    Raises
    ------
    :exc:`.ArgError`
        If any parameter is out of range.
    """

    svcca_threshold: float = 0.99
    aggregate:       str   = "max"
    tile:            int   = 512
    workers:         int   = None
    compute_dtype:   str   = "f32"

    def __post_init__(self):
        if not 0 < self.svcca_threshold <= 1:
            raise util.ArgError(f"SVCCA threshold must be in (0, 1], got {self.svcca_threshold}")

        if self.aggregate not in ("max", "mean"):
            raise util.ArgError(f"Aggregate must be 'max' or 'mean', got {self.aggregate!r}")

        if not isinstance(self.tile, int) or self.tile < 1:
            raise util.ArgError(f"Tile size must be a positive integer, got {self.tile!r}")

        if self.workers is not None and (not isinstance(self.workers, int) or self.workers < 1):
            raise util.ArgError(f"Worker count must be a positive integer, got {self.workers!r}")

        if self.compute_dtype not in ("f32", "f64", "float32", "float64"):
            raise util.ArgError(f"Compute dtype must be f32 or f64, got {self.compute_dtype!r}")

    def resolved_workers(self):
        """Gets the number of workers to actually use."""

        return util.worker_count(self.workers)
