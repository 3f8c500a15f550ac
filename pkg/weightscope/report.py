"""Writing results as CSV, JSON and PNG files.

Every writer is a pure function of its inputs, so that writing
the same results twice gives byte-identical files. CSV is the
source of truth: numbers are printed with 9 significant digits
in CSV and as unrounded doubles in JSON, and images only
visualize them.
"""

import csv
import dataclasses
import enum
import json
import math
import pathlib

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure               import Figure

__all__ = [
    "COLORMAP",
    "format_number",
    "json_safe",
    "write_csv",
    "write_json",
    "write_matrix_csv",
    "matrix_document",
    "color_range",
    "render_heatmap",
    "render_profiles",
]

#: The colormap for heatmaps.
COLORMAP = "viridis"

# Pinned so the PNG bytes don't depend on the matplotlib version.
_PNG_METADATA = {"Software": None}

def format_number(value):
    """Formats a value for CSV output.

    Parameters
    ----------
    value : :class:`float`, :class:`int` or ``None``
        The value.

    Returns
    -------
    :class:`str`
        Floats with 9 significant digits, integers as they are,
        and ``"undefined"`` for ``None``.

    Examples
    --------
    >>> from weightscope.report import format_number
    >>> format_number(2 / 3)
    '0.666666667'
    >>> format_number(1.0)
    '1'
    >>> format_number(None)
    'undefined'
    """

    if value is None:
        return "undefined"

    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()

    if isinstance(value, (int, np.integer)):
        return str(int(value))

    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9g}"

    return str(value)

def json_safe(obj):
    """Converts a value to one the :mod:`json` module can write.

    NumPy scalars and arrays become Python numbers and lists,
    enums become their values, dataclasses become :class:`dict`\\s,
    and non-finite floats become ``None``.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.report import json_safe
    >>> json_safe({"values": np.array([0.5, np.nan])})
    {'values': [0.5, None]}
    """

    if isinstance(obj, dict):
        return {str(json_safe(key)): json_safe(value) for key, value in obj.items()}

    if isinstance(obj, (list, tuple, range)):
        return [json_safe(value) for value in obj]

    if isinstance(obj, np.ndarray):
        return json_safe(obj.tolist())

    if isinstance(obj, enum.Enum):
        return obj.value

    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "as_dict"):
            return json_safe(obj.as_dict())

        return json_safe({field.name: getattr(obj, field.name) for field in dataclasses.fields(obj)})

    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)

    if isinstance(obj, (int, np.integer)):
        return int(obj)

    if isinstance(obj, (float, np.floating)):
        obj = float(obj)

        return obj if math.isfinite(obj) else None

    if obj is None or isinstance(obj, str):
        return obj

    return str(obj)

def write_csv(path, header, rows):
    """Writes a table to a CSV file.

    Parameters
    ----------
    path : path-like
        The file to write.
    header : iterable
        The column names.
    rows : iterable of iterables
        The rows, formatted with :func:`format_number`.

    Returns
    -------
    :class:`pathlib.Path`
        The written file.
    """

    path = pathlib.Path(path)

    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")

        writer.writerow([format_number(value) for value in header])
        writer.writerows([format_number(value) for value in row] for row in rows)

    return path

def write_json(path, document):
    """Writes a document to a JSON file.

    The document is first converted with :func:`json_safe`.

    Returns
    -------
    :class:`pathlib.Path`
        The written file.
    """

    path = pathlib.Path(path)
    path.write_text(json.dumps(json_safe(document), indent=2, allow_nan=False) + "\n", encoding="utf-8")

    return path

def write_matrix_csv(path, sim):
    """Writes a :class:`.SimilarityMatrix` to a CSV file.

    The first row and column hold the labels of the
    rows and columns, and the values follow row by row.
    """

    return write_csv(
        path,

        [""] + list(sim.labels),
        ([label] + list(row) for label, row in zip(sim.labels, sim.values)),
    )

def matrix_document(sim, **extra):
    """Describes a :class:`.SimilarityMatrix` as a JSON-compatible :class:`dict`.

    Parameters
    ----------
    sim : :class:`.SimilarityMatrix`
        The matrix.
    **extra
        Further entries for the document.
    """

    return dict(
        model_id = sim.model_id,
        role     = str(sim.role),
        kind     = sim.kind.value,
        labels   = list(sim.labels),
        values   = sim.values,

        **extra,
    )

def color_range(values):
    """Gets the color scale limits for a heatmap.

    Parameters
    ----------
    values : :class:`numpy.ndarray`
        The square matrix.

    Returns
    -------
    pair of :class:`float`
        The minimum and maximum of the off-diagonal entries,
        or of every entry if there are none.

    Examples
    --------
    >>> import numpy as np
    >>> from weightscope.report import color_range
    >>> color_range(np.array([[1.0, 0.25], [0.5, 1.0]]))
    (0.25, 0.5)
    """

    values = np.asarray(values, dtype=np.float64)

    count = values.shape[0]
    if count > 1:
        values = values[~np.eye(count, dtype=bool)]

    return float(np.min(values)), float(np.max(values))

def _figure():
    figure = Figure(figsize=(6, 5), dpi=100)
    FigureCanvasAgg(figure)

    return figure

def render_heatmap(path, sim, *, title=None):
    """Renders a :class:`.SimilarityMatrix` as a PNG heatmap.

    The color scale spans the off-diagonal entries, and is
    recorded in a sidecar JSON file next to the image, named
    like it but with a ``.scale.json`` suffix.

    Parameters
    ----------
    path : path-like
        The PNG file to write.
    sim : :class:`.SimilarityMatrix`
        The matrix.
    title : :class:`str` or ``None``
        The title. If ``None``, one is made from the matrix.

    Returns
    -------
    :class:`list` of :class:`pathlib.Path`
        The image and its sidecar.
    """

    path = pathlib.Path(path)

    vmin, vmax = color_range(sim.values)
    if title is None:
        title = f"{sim.kind.value} {sim.role} {sim.model_id}".strip()

    figure = _figure()
    axes   = figure.subplots()

    image = axes.imshow(sim.values, cmap=COLORMAP, vmin=vmin, vmax=vmax, interpolation="nearest")
    figure.colorbar(image, ax=axes)

    axes.set_title(title)
    axes.set_xlabel("Y")
    axes.set_ylabel("X")

    figure.savefig(path, format="png", metadata=_PNG_METADATA)

    sidecar = path.with_suffix(".scale.json")
    write_json(sidecar, dict(colormap=COLORMAP, vmin=vmin, vmax=vmax))

    return [path, sidecar]

def render_profiles(path, series, *, title="", xlabel="", ylabel=""):
    """Renders one or more curves as a PNG line plot.

    Parameters
    ----------
    path : path-like
        The PNG file to write.
    series : :class:`dict`
        A mapping of curve labels to ``(x, y)`` pairs.
    title, xlabel, ylabel : :class:`str`
        The labels of the plot.

    Returns
    -------
    :class:`pathlib.Path`
        The image.
    """

    path = pathlib.Path(path)

    figure = _figure()
    axes   = figure.subplots()

    for label, (x, y) in series.items():
        axes.plot(x, y, marker="o", label=label)

    axes.set_title(title)
    axes.set_xlabel(xlabel)
    axes.set_ylabel(ylabel)

    if len(series) > 0:
        axes.legend()

    figure.savefig(path, format="png", metadata=_PNG_METADATA)

    return path
