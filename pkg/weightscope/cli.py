"""The ``weightscope`` command-line interface.

Each subcommand reads its inputs, runs an analysis and writes
its results to the output directory. Progress is logged to
standard error, and standard output is only used for the single
JSON document printed with ``--stdout json``.

Exit codes are ``0`` on success, ``2`` for configuration errors,
``3`` for errors reading checkpoints, ``4`` for numerical errors
and ``5`` when the verification suite does not pass.
"""

import argparse
import dataclasses
import json
import logging
import os
import pathlib
import re
import sys

import numpy as np

from . import __version__
from . import analysis
from . import report
from . import util
from . import verify
from .checkpoint import NamingConfig, Role, RoleTag, load_oriented, open_checkpoint
from .simcore    import IndexKind, SimilarityParams, gumbel_fit_location, gumbel_histogram, max_cos_sim, mean_cos_sim

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_INGESTION",
    "EXIT_NUMERICAL",
    "EXIT_VERIFICATION",
    "COMMANDS",
    "FORMATS",
    "RunConfig",
    "parse_role_tag",
    "build_parser",
    "run",
    "main",
]

logger = logging.getLogger(__name__)

EXIT_OK           = 0
EXIT_CONFIG       = 2
EXIT_INGESTION    = 3
EXIT_NUMERICAL    = 4
EXIT_VERIFICATION = 5

COMMANDS = ("layers", "gini", "blocks", "compare", "experts", "ortho", "verify", "gumbel")
FORMATS  = frozenset({"csv", "json", "png"})

_ROLE_TAG_PATTERN = re.compile(r"(?P<role>\w+?)(?:\[(?P<expert>\d+)\])?")

def parse_role_tag(text):
    """Parses a :class:`.RoleTag` from text such as ``"MlpUp"`` or ``"ExpertW1[3]"``.

    A bare expert role, without an index, parses to the :class:`.Role` itself.

    Raises
    ------
    :exc:`.ConfigError`
        If the text names no role, or the expert index does not fit the role.

    Examples
    --------
    >>> from weightscope.cli import parse_role_tag
    >>> parse_role_tag("mlp_up")
    RoleTag(role=<Role.MlpUp: 'MlpUp'>, expert=None)
    >>> parse_role_tag("ExpertW1[3]")
    RoleTag(role=<Role.ExpertW1: 'ExpertW1'>, expert=3)
    >>> parse_role_tag("ExpertW2")
    <Role.ExpertW2: 'ExpertW2'>
    """

    match = _ROLE_TAG_PATTERN.fullmatch(text.strip())
    if match is None:
        raise util.ConfigError(f"Malformed role '{text}'")

    role   = Role.parse(match["role"])
    expert = match["expert"]

    if expert is None and role.is_expert:
        return role

    try:
        return RoleTag(role, None if expert is None else int(expert))
    except ValueError as e:
        raise util.ConfigError(str(e)) from None

def _slug(role):
    return str(getattr(role, "value", role)).replace("[", "-").replace("]", "")

@dataclasses.dataclass(frozen=True)
class RunConfig:
    """The validated configuration of one run.

    Parameters
    ----------
    command : :class:`str`
        One of :data:`COMMANDS`.
    checkpoints : :class:`tuple` of :class:`pathlib.Path`
        The checkpoint paths.
    naming : :class:`.NamingConfig`
        How tensors are mapped to slots.
    roles : :class:`tuple`
        The :class:`.RoleTag`\\s, or expert :class:`.Role`\\s, to analyze.
    kinds : :class:`tuple` of :class:`.IndexKind`
        The indices to compute.
    params : :class:`.SimilarityParams`
        Parameters for the similarity computations.
    seed : :class:`int`
        The seed for anything random.
    out : :class:`pathlib.Path`
        The output directory.
    formats : :class:`frozenset` of :class:`str`
        Which of ``"csv"``, ``"json"`` and ``"png"`` to write.
    thetas : :class:`tuple` of :class:`float`
        The perturbation strengths of the reference
        matrices for the ``ortho`` command.
    layers : :class:`tuple` of :class:`int` or ``None``
        The layers for the ``experts`` command,
        or ``None`` for every layer.
    trials : :class:`int`
        The number of trials for the ``verify`` command.
    pair : pair of :class:`int` or ``None``
        The layers for the ``gumbel`` command.
    stdout_json : :class:`bool`
        Whether to print a summary to standard output.
    """

    command:     str
    checkpoints: tuple
    naming:      NamingConfig
    roles:       tuple
    kinds:       tuple
    params:      SimilarityParams
    seed:        int
    out:         pathlib.Path
    formats:     frozenset
    thetas:      tuple = analysis.DEFAULT_THETAS
    layers:      tuple = None
    trials:      int   = 100
    pair:        tuple = None
    stdout_json: bool  = False

    @classmethod
    def from_args(cls, args):
        """Builds and validates a :class:`RunConfig` from parsed arguments.

        The output directory is created if it does not exist.

        Raises
        ------
        :exc:`.ConfigError`
            If any argument is invalid.
        """

        command = args.command

        formats = frozenset(part.strip().lower() for part in args.format.split(",") if part.strip() != "")
        if len(formats) == 0 or not formats <= FORMATS:
            raise util.ConfigError(f"Formats must be a subset of {', '.join(sorted(FORMATS))}, got '{args.format}'")

        if not 0 <= args.seed < 2**64:
            raise util.ConfigError(f"Seed must be an unsigned 64-bit integer, got {args.seed}")

        if args.trials < 1:
            raise util.ConfigError(f"Trial count must be positive, got {args.trials}")

        try:
            params = SimilarityParams(
                svcca_threshold = args.svcca_threshold,
                aggregate       = args.aggregate,
                tile            = args.tile,
                compute_dtype   = args.compute_dtype,
            )
        except util.ArgError as e:
            raise util.ConfigError(str(e)) from None

        checkpoints = tuple(pathlib.Path(path) for path in (args.checkpoint or ()))
        expected    = dict(compare=(2, 3), verify=(0,)).get(command, (1,))

        if len(checkpoints) not in expected:
            raise util.ConfigError(
                f"'{command}' takes {' or '.join(str(count) for count in expected)} checkpoint(s), got {len(checkpoints)}"
            )

        roles = tuple(parse_role_tag(text) for text in args.role or ())
        if command == "experts":
            if len(roles) == 0:
                roles = (Role.ExpertW1, Role.ExpertW2, Role.ExpertW3)

            for role in roles:
                if not isinstance(role, Role):
                    raise util.ConfigError(f"'experts' takes expert roles without an index, got '{role}'")

        elif command != "verify":
            if len(roles) == 0:
                roles = (RoleTag(Role.MlpUp),)

            for role in roles:
                if isinstance(role, Role):
                    raise util.ConfigError(f"Expert role '{role.value}' needs an expert index, e.g. '{role.value}[0]'")

        if args.kind is None:
            kinds = (IndexKind.DOCS_MEAN,) if args.aggregate == "mean" else (IndexKind.DOCS,)
        elif [text.lower() for text in args.kind] == ["all"]:
            kinds = tuple(IndexKind)
        else:
            kinds = tuple(dict.fromkeys(IndexKind.parse(text) for text in args.kind))

        if command in ("blocks", "gumbel") and len(kinds) != 1:
            raise util.ConfigError(f"'{command}' takes a single kind, got {len(kinds)}")

        if command == "gumbel":
            if args.pair is None:
                raise util.ConfigError("'gumbel' needs a layer pair, given with --pair I J")

            if not kinds[0].is_docs:
                raise util.ConfigError(f"'gumbel' needs a DOCS kind, got {kinds[0].value}")

        out = pathlib.Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise util.ConfigError(f"Cannot create output directory '{out}': {e}") from None

        if not os.access(out, os.W_OK):
            raise util.ConfigError(f"Output directory '{out}' is not writable")

        naming = NamingConfig.load(args.naming) if command != "verify" else None

        return cls(
            command     = command,
            checkpoints = checkpoints,
            naming      = naming,
            roles       = roles,
            kinds       = kinds,
            params      = params,
            seed        = args.seed,
            out         = out,
            formats     = formats,
            thetas      = tuple(args.theta) if args.theta is not None else analysis.DEFAULT_THETAS,
            layers      = tuple(args.layer) if args.layer is not None else None,
            trials      = args.trials,
            pair        = tuple(args.pair) if args.pair is not None else None,
            stdout_json = args.stdout == "json",
        )

    def open(self, position=0):
        """Opens one of the checkpoints."""

        return open_checkpoint(self.checkpoints[position], self.naming)

class _Outputs:
    # Collects written files and results for the summary document.

    def __init__(self, config):
        self.config  = config
        self.files   = []
        self.results = []

    def path(self, name):
        return self.config.out / name

    def csv(self, name, header, rows):
        if "csv" in self.config.formats:
            self.files.append(report.write_csv(self.path(name), header, rows))

    def json(self, name, document):
        if "json" in self.config.formats:
            self.files.append(report.write_json(self.path(name), document))

    def matrix(self, stem, sim, **extra):
        if "csv" in self.config.formats:
            self.files.append(report.write_matrix_csv(self.path(f"{stem}.csv"), sim))

        self.json(f"{stem}.json", report.matrix_document(sim, **extra))

        if "png" in self.config.formats:
            self.files.extend(report.render_heatmap(self.path(f"{stem}.png"), sim))

    def plot(self, name, series, **labels):
        if "png" in self.config.formats:
            self.files.append(report.render_profiles(self.path(name), series, **labels))

    def summary(self):
        return dict(
            command = self.config.command,
            files   = [str(path) for path in self.files],
            results = self.results,
        )

def cmd_layers(config, outputs):
    """Writes the layer heatmap and distance profile of each role and kind."""

    index = config.open()

    for role in config.roles:
        for kind in config.kinds:
            sim  = analysis.layer_heatmap(index, role, kind, config.params)
            stem = f"{_slug(role)}_{kind.value}"

            outputs.matrix(f"heatmap_{stem}", sim)

            if sim.layer_count >= 2:
                profile = analysis.distance_profile(sim)

                outputs.csv(
                    f"distance_{stem}.csv",

                    ["distance", "mean_sim", "std_sim"],
                    zip(profile.distances, profile.mean_sim, profile.std_sim),
                )

            outputs.results.append(dict(role=str(role), kind=kind.value, layers=sim.layer_count))

def cmd_gini(config, outputs):
    """Writes the Gini coefficient of each role's layer heatmap under each kind."""

    index = config.open()

    rows = []
    for role in config.roles:
        for kind in config.kinds:
            value = analysis.gini(analysis.layer_heatmap(index, role, kind, config.params))

            logger.info("Gini coefficient of %s under %s: %r", role, kind.value, value)

            rows.append([str(role), kind.value, value])
            outputs.results.append(dict(role=str(role), kind=kind.value, gini=value))

    outputs.csv("gini.csv", ["role", "kind", "gini"], rows)

def cmd_blocks(config, outputs):
    """Writes the diagonal block averages of each role's layer heatmap."""

    index = config.open()
    kind  = config.kinds[0]

    for role in config.roles:
        sim = analysis.layer_heatmap(index, role, kind, config.params)

        series = {}
        for block_size in analysis.BLOCK_SIZES:
            if block_size > sim.layer_count:
                logger.warning("Skipping blocks of size %d for %s since there are only %d layers", block_size, role, sim.layer_count)

                continue

            profile = analysis.block_profile(sim, block_size)

            outputs.csv(
                f"blocks_{_slug(role)}_k{block_size}.csv",

                ["start", "end", "average"],
                zip(profile.start_indices, profile.start_indices + block_size - 1, profile.averages),
            )

            series[f"k = {block_size}"] = (profile.start_indices, profile.averages)

            outputs.results.append(dict(
                role       = str(role),
                kind       = kind.value,
                block_size = block_size,
                best_start = int(np.argmax(profile.averages)),
            ))

        outputs.plot(
            f"blocks_{_slug(role)}.png", series,

            title  = f"{kind.value} block averages, {role}",
            xlabel = "Starting layer",
            ylabel = "Average similarity",
        )

def cmd_compare(config, outputs):
    """Compares corresponding layers of two checkpoints, or computes similarity ratios for three."""

    indices = [config.open(position) for position in range(len(config.checkpoints))]

    for role in config.roles:
        if len(indices) == 2:
            series = [analysis.cross_model_series(*indices, role, kind, config.params) for kind in config.kinds]

            outputs.csv(
                f"compare_{_slug(role)}.csv",

                ["layer"] + [kind.value for kind in config.kinds],
                ([layer] + [s.values[layer] for s in series] for layer in series[0].layers),
            )

            document = dict(
                role    = str(role),
                model_a = series[0].model_a,
                model_b = series[0].model_b,
                values  = {s.kind.value: s.values for s in series},
            )

            outputs.json(f"compare_{_slug(role)}.json", document)
            outputs.results.append(document)

        else:
            reports = [analysis.similarity_ratio(*indices, role, kind, config.params) for kind in config.kinds]

            outputs.csv(
                f"ratio_{_slug(role)}.csv",

                ["layer", "kind", "sim_ab", "sim_ac", "ratio"],

                (
                    [entry.layer, ratio_report.kind.value, entry.sim_ab, entry.sim_ac, entry.ratio]

                    for ratio_report in reports
                    for entry in ratio_report.entries
                ),
            )

            document = dict(
                role    = str(role),
                model_a = reports[0].model_a,
                model_b = reports[0].model_b,
                model_c = reports[0].model_c,

                kinds = {
                    ratio_report.kind.value: dict(
                        unnormalized = ratio_report.unnormalized,
                        entries      = ratio_report.entries,
                    )

                    for ratio_report in reports
                },
            )

            outputs.json(f"ratio_{_slug(role)}.json", document)
            outputs.results.append(document)

def cmd_experts(config, outputs):
    """Writes the expert heatmap of each layer and expert role."""

    index = config.open()

    for role in config.roles:
        layers = config.layers
        if layers is None:
            layers = sorted({layer for layer, tag in index.layer_map if tag.role is role})

        for layer in layers:
            for kind in config.kinds:
                sim     = analysis.expert_heatmap(index, layer, role, kind, config.params)
                outlier = sim.labels[analysis.outlier_row(sim)]

                logger.info("Expert least similar to the others in layer %d under %s: %d", layer, kind.value, outlier)

                outputs.matrix(f"experts_L{layer}_{role.value}_{kind.value}", sim, outlier_expert=outlier)
                outputs.results.append(dict(layer=layer, role=role.value, kind=kind.value, outlier_expert=outlier))

def cmd_ortho(config, outputs):
    """Writes how far each layer's matrix is from orthogonal, with reference matrices."""

    index = config.open()

    for role in config.roles:
        rows  = []
        n_ref = None

        for layer in range(index.num_layers):
            matrix = load_oriented(index, layer, role, config.params.compute_dtype)
            value  = analysis.offdiag_avg_cos(matrix, tile=config.params.tile, workers=config.params.resolved_workers())

            n_ref = matrix.n_rows if n_ref is None else n_ref
            rows.append([index.model_id, layer, None, value])

        references = []
        if n_ref is not None:
            for theta in config.thetas:
                reference = analysis.make_m_theta(n_ref, theta, config.seed)
                value     = analysis.offdiag_avg_cos(reference, tile=config.params.tile, workers=config.params.resolved_workers())

                rows.append(["M_theta", None, theta, value])
                references.append(dict(theta=theta, offdiag_avg_cos=value))

        outputs.csv(f"ortho_{_slug(role)}.csv", ["source", "layer", "theta", "offdiag_avg_cos"], rows)

        outputs.plot(
            f"ortho_{_slug(role)}.png",

            {str(role): ([row[1] for row in rows if row[2] is None], [row[3] for row in rows if row[2] is None])},

            title  = f"Off-diagonal average cosine similarity, {role}",
            xlabel = "Layer",
            ylabel = "Average |cos|",
        )

        outputs.results.append(dict(role=str(role), n=n_ref, references=references))

def cmd_verify(config, outputs):
    """Runs the verification suite and writes its report.

    Returns
    -------
    :class:`int`
        :data:`EXIT_VERIFICATION` if the suite does not pass.
    """

    reports = verify.run_suite(config.seed, config.trials)
    passes  = verify.suite_passes(reports)

    path = report.write_json(config.out / "verify_report.json", dict(reports=reports, passes=passes))
    outputs.files.append(path)

    outputs.results.append(dict(passes=passes))

    if not passes:
        logger.error("Verification suite did not pass; see '%s'", path)

        return EXIT_VERIFICATION

    return EXIT_OK

def cmd_gumbel(config, outputs):
    """Writes histograms of a layer pair's cosine similarity maxima with their Gumbel fits."""

    index = config.open()
    kind  = config.kinds[0]
    i, j  = config.pair

    reduce = max_cos_sim if kind is IndexKind.DOCS else mean_cos_sim

    for role in config.roles:
        x = load_oriented(index, i, role, config.params.compute_dtype)
        y = load_oriented(index, j, role, config.params.compute_dtype)

        rows = []
        fits = {}
        for direction, (a, b) in (("XY", (x, y)), ("YX", (y, x))):
            values    = reduce(a, b, tile=config.params.tile, workers=config.params.resolved_workers()).values
            fit       = gumbel_fit_location(values)
            histogram = gumbel_histogram(values, fit)

            fits[direction] = fit

            rows.extend(
                [direction, left, right, count, density, fitted]

                for left, right, count, density, fitted in zip(
                    histogram.edges[:-1],
                    histogram.edges[1:],
                    histogram.counts,
                    histogram.density,
                    histogram.fitted_density,
                )
            )

        stem = f"gumbel_{_slug(role)}_{i}_{j}"

        outputs.csv(f"{stem}.csv", ["direction", "bin_left", "bin_right", "count", "density", "fitted_density"], rows)

        document = dict(role=str(role), kind=kind.value, layers=[i, j], fits=fits)

        outputs.json(f"{stem}.json", document)
        outputs.results.append(document)

_COMMAND_FUNCTIONS = dict(
    layers  = cmd_layers,
    gini    = cmd_gini,
    blocks  = cmd_blocks,
    compare = cmd_compare,
    experts = cmd_experts,
    ortho   = cmd_ortho,
    verify  = cmd_verify,
    gumbel  = cmd_gumbel,
)

def build_parser():
    """Builds the argument parser."""

    common = argparse.ArgumentParser(add_help=False)

    common.add_argument("--checkpoint", nargs="+", action="extend", metavar="PATH", help="Checkpoint file or directory")
    common.add_argument("--naming", default="llama", help="Naming preset (llama, gemma, mixtral) or JSON file")
    common.add_argument("--role", nargs="+", action="extend", metavar="TAG", help="Roles to analyze, e.g. MlpUp or ExpertW1[0]")
    common.add_argument("--kind", nargs="+", action="extend", metavar="KIND", help="Similarity indices, or 'all'")
    common.add_argument("--svcca-threshold", type=float, default=0.99, help="Fraction of variance kept by SVCCA")
    common.add_argument("--aggregate", choices=("max", "mean"), default="max", help="Aggregation of cosine similarities for DOCS")
    common.add_argument("--tile", type=int, default=512, help="Columns per tile of the cosine kernel")
    common.add_argument("--seed", type=int, default=42, help="Seed for anything random")
    common.add_argument("--out", default=".", help="Output directory")
    common.add_argument("--format", default="csv,json", help="Comma-separated output formats: csv, json, png")
    common.add_argument("--compute-dtype", choices=("f32", "f64"), default="f32", help="Dtype matrices are decoded to")
    common.add_argument("--stdout", choices=("json",), default=None, help="Print a summary document to standard output")

    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Only log warnings and errors")

    parser = argparse.ArgumentParser(prog="weightscope", description="Weight-matrix similarity analysis for transformer checkpoints")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    for name in COMMANDS:
        subparser = subparsers.add_parser(name, parents=[common], help=_COMMAND_FUNCTIONS[name].__doc__.splitlines()[0])

        subparser.add_argument("--theta", nargs="+", type=float, default=None, help="Perturbation strengths of reference matrices (ortho)")
        subparser.add_argument("--layer", nargs="+", type=int, default=None, help="Layers to analyze (experts)")
        subparser.add_argument("--trials", type=int, default=100, help="Trials of the property checks (verify)")
        subparser.add_argument("--pair", nargs=2, type=int, default=None, metavar=("I", "J"), help="Layer pair (gumbel)")

    return parser

def _configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING

    package_logger = logging.getLogger("weightscope")

    for handler in list(package_logger.handlers):
        if getattr(handler, "_weightscope_cli", False):
            package_logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._weightscope_cli = True

    package_logger.addHandler(handler)
    package_logger.setLevel(level)

def run(config):
    """Runs a command.

    Parameters
    ----------
    config : :class:`RunConfig`
        The configuration.

    Returns
    -------
    pair of :class:`int` and :class:`dict`
        The exit code and a summary of what was written.
    """

    outputs = _Outputs(config)
    code    = _COMMAND_FUNCTIONS[config.command](config, outputs)

    return (EXIT_OK if code is None else code), outputs.summary()

def main(argv=None):
    """Runs the command-line interface.

    Parameters
    ----------
    argv : :class:`list` of :class:`str` or ``None``
        The arguments. If ``None``, :data:`sys.argv` is used.

    Returns
    -------
    :class:`int`
        The exit code.
    """

    args = build_parser().parse_args(argv)

    _configure_logging(args)

    try:
        config        = RunConfig.from_args(args)
        code, summary = run(config)

    except util.ConfigError as e:
        logger.error("%s", e)

        return EXIT_CONFIG

    except util.IngestionError as e:
        logger.error("%s", e)

        return EXIT_INGESTION

    except util.NumericalError as e:
        logger.error("%s", e)

        return EXIT_NUMERICAL

    if config.stdout_json:
        sys.stdout.write(json.dumps(report.json_safe(summary), indent=2, allow_nan=False) + "\n")

    return code
