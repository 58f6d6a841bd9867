"""Command-line interface.

Every command prints one JSON envelope to stdout:

    {"schema_version": 1, "command": ..., "config": ..., "result": ...}

with the fully-resolved configuration (defaults made explicit) echoed back, so
a run can be reproduced from its own output. elapsed_ms fields inside results
are the only values that vary between identical runs.

Heavy imports happen inside commands: ``main`` reads the thread request from
the command line (or VDMKIT_THREADS) and pins the BLAS thread-count
environment variables before numpy first loads.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

SCHEMA_VERSION = 1


# ---------------------------------------------------------------- plumbing


def _emit(command: str, config: dict, result, out: str | None = None) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    click.echo(text, nl=False)
    if out:
        Path(out).write_text(text)


def _guarded(fn):
    """Map computation failures to exit code 1 (usage errors stay 2)."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except click.ClickException:
            raise
        except Exception as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _with_config(ctx: click.Context, opts: dict) -> dict:
    """Overlay TOML config values onto options left at their defaults.

    Lookup order inside the file: a table named after the command, then
    top-level keys. Explicit command-line flags always win.
    """
    path = opts.get("config")
    if not path:
        return opts
    try:
        import tomllib as toml_reader
    except ModuleNotFoundError:
        import tomli as toml_reader

    with open(path, "rb") as fh:
        doc = toml_reader.load(fh)
    section = doc.get(ctx.command.name, {})
    merged = {k: v for k, v in doc.items() if not isinstance(v, dict)}
    merged.update(section if isinstance(section, dict) else {})

    by_name = {p.name: p for p in ctx.command.params}
    from click.core import ParameterSource

    for name, param in by_name.items():
        if name == "config":
            continue
        if ctx.get_parameter_source(name) != ParameterSource.DEFAULT:
            continue
        for key in (name, name.replace("_", "-")):
            if key in merged:
                value = merged[key]
                if param.multiple and not isinstance(value, (list, tuple)):
                    value = [value]
                opts[name] = param.type_cast_value(ctx, value)
                break
    return opts


def _metric_options(opts: dict) -> dict:
    """Collect explicitly-provided metric parameters for compute_metric."""
    out = {}
    if opts.get("gamma") is not None:
        g = opts["gamma"]
        out["gamma"] = g if g == "auto" else float(g)
    for key in ("degree", "coef", "ddof", "ridge", "clusters"):
        if opts.get(key) is not None:
            out[key] = opts[key]
    if opts.get("clamp_negative"):
        out["clamp_negative"] = True
    if opts.get("extractor") is not None:
        out["extractor"] = opts["extractor"]
    return out


def _common_metric_flags(fn):
    for deco in reversed(
        [
            click.option("--gamma", default=None,
                         help="Kernel gamma (number or 'auto')."),
            click.option("--degree", type=int, default=None,
                         help="Polynomial kernel degree."),
            click.option("--coef", type=float, default=None,
                         help="Polynomial kernel offset."),
            click.option("--ddof", type=int, default=None,
                         help="Covariance divisor: 0 for 1/n, 1 for 1/(n-1)."),
            click.option("--ridge", type=float, default=None,
                         help="Diagonal ridge added to covariances."),
            click.option("--clusters", type=int, default=None,
                         help="GMM components per side (mw2)."),
        ]
    ):
        fn = deco(fn)
    return fn


def _shared_flags(fn):
    for deco in reversed(
        [
            click.option("--config", type=click.Path(exists=True, dir_okay=False),
                         default=None, help="TOML config; flags override it."),
            click.option("--threads", type=int, default=None,
                         help="Worker/BLAS thread cap (or VDMKIT_THREADS)."),
            click.option("--out", "out_json", type=click.Path(dir_okay=False),
                         default=None, help="Also write the JSON envelope here."),
        ]
    ):
        fn = deco(fn)
    return fn


def _load_validated(path: str, manifest_path: str | None):
    """Read a feature file, checking it against its manifest when given."""
    from .errors import DimensionMismatchError
    from .features import load_manifest, read_array, validate_manifest

    m = read_array(path)
    extractor = None
    if manifest_path:
        manifest = load_manifest(manifest_path)
        validate_manifest(manifest, base_dir=str(Path(manifest_path).parent))
        if manifest.dim is not None and manifest.dim != m.d:
            raise DimensionMismatchError(
                f"{path} has d={m.d} but manifest {manifest_path} "
                f"declares dim={manifest.dim}"
            )
        extractor = manifest.extractor
    return m, extractor


def _threads(opts: dict) -> int:
    if opts.get("threads"):
        return max(1, int(opts["threads"]))
    env = os.environ.get("VDMKIT_THREADS", "")
    return max(1, int(env)) if env.isdigit() else 1


# ---------------------------------------------------------------- commands


@click.group(name="vdmkit")
@click.version_option(version="0.1.0", prog_name="vdmkit")
def cli():
    """Distribution distances and diagnostics for video feature sets."""


@cli.command(name="dist")
@click.option("--metric", required=True, help="One of the registered metric ids.")
@click.option("--real", "real_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--gen", "gen_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--clamp-negative", is_flag=True, default=False,
              help="Clamp a negative jedi score to 0 (flagged in params).")
@click.option("--extractor", default=None,
              help="Extractor id for jedi's provenance check.")
@click.option("--manifest-real", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--manifest-gen", type=click.Path(exists=True, dir_okay=False),
              default=None)
@_common_metric_flags
@_shared_flags
@click.pass_context
@_guarded
def dist_cmd(ctx, **opts):
    """Compute one metric between two feature files."""
    opts = _with_config(ctx, opts)
    from .registry import compute_metric

    real, real_ext = _load_validated(opts["real_path"], opts["manifest_real"])
    gen, gen_ext = _load_validated(opts["gen_path"], opts["manifest_gen"])
    options = _metric_options(opts)
    if opts["metric"] == "jedi" and "extractor" not in options:
        manifest_ext = real_ext or gen_ext
        if manifest_ext is not None:
            options["extractor"] = manifest_ext
    res = compute_metric(
        opts["metric"], real, gen, seed=opts["seed"], **options
    )
    config = {
        "metric": opts["metric"],
        "real": opts["real_path"],
        "gen": opts["gen_path"],
        "seed": opts["seed"],
        "options": {k: v for k, v in sorted(options.items())},
        "manifest_real": opts["manifest_real"],
        "manifest_gen": opts["manifest_gen"],
    }
    _emit("dist", config, res.to_dict(), opts["out_json"])


def _protocol_config(opts) -> "object":
    from .protocols import ConvergenceConfig

    return ConvergenceConfig(
        interval=opts["interval"],
        repeats=opts["repeats"],
        margin=opts["margin"],
        target_n=opts["target_n"],
        metric_id=opts["metric"],
        master_seed=opts["seed"],
        metric_options=_metric_options(opts),
    )


def _protocol_flags(fn):
    for deco in reversed(
        [
            click.option("--metric", required=True),
            click.option("--real", "real_path", required=True,
                         type=click.Path(exists=True, dir_okay=False)),
            click.option("--gen", "gen_path", required=True,
                         type=click.Path(exists=True, dir_okay=False)),
            click.option("--seed", type=int, default=0, show_default=True,
                         help="Master seed for all subsampling."),
            click.option("--interval", type=int, default=100, show_default=True),
            click.option("--repeats", type=int, default=None,
                         help="Samplings per grid point (default 5, rate curves 10)."),
            click.option("--margin", type=float, default=0.05, show_default=True),
            click.option("--target-n", type=int, default=5000, show_default=True),
            click.option("--csv", "csv_path", type=click.Path(dir_okay=False),
                         default=None, help="Write one row per grid point."),
            click.option("--plot", "plot_path", type=click.Path(dir_okay=False),
                         default=None, help="Write an SVG chart."),
        ]
    ):
        fn = deco(fn)
    return fn


@cli.command(name="converge")
@_protocol_flags
@_common_metric_flags
@_shared_flags
@click.pass_context
@_guarded
def converge_cmd(ctx, **opts):
    """Find the smallest stable sample size for a metric."""
    opts = _with_config(ctx, opts)
    from .protocols import convergence_sample_size

    cfg = _protocol_config(opts)
    real, _ = _load_validated(opts["real_path"], None)
    gen, _ = _load_validated(opts["gen_path"], None)
    report = convergence_sample_size(real, gen, cfg, threads=_threads(opts))
    if opts["csv_path"]:
        Path(opts["csv_path"]).write_text(report.to_csv())
    if opts["plot_path"]:
        from .plotting import emit_plot

        emit_plot(report, opts["plot_path"])
    doc = report.to_dict()
    config = dict(doc.pop("config"), real=opts["real_path"], gen=opts["gen_path"])
    _emit("converge", config, doc, opts["out_json"])


@cli.command(name="rate-curve")
@_protocol_flags
@_common_metric_flags
@_shared_flags
@click.pass_context
@_guarded
def rate_curve_cmd(ctx, **opts):
    """Relative deviation from the target-size mean, per grid size."""
    opts = _with_config(ctx, opts)
    from .protocols import rate_curve

    cfg = _protocol_config(opts)
    real, _ = _load_validated(opts["real_path"], None)
    gen, _ = _load_validated(opts["gen_path"], None)
    curve = rate_curve(real, gen, cfg, threads=_threads(opts))
    if opts["csv_path"]:
        Path(opts["csv_path"]).write_text(curve.to_csv())
    if opts["plot_path"]:
        from .plotting import emit_plot

        emit_plot(curve, opts["plot_path"])
    doc = curve.to_dict()
    config = dict(doc.pop("config"), real=opts["real_path"], gen=opts["gen_path"])
    _emit("rate-curve", config, doc, opts["out_json"])


@cli.command(name="sweep")
@click.option("--metric", required=True)
@click.option("--real", "real_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--gen", "gen_paths", required=True, multiple=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Repeat once per distortion level, in order.")
@click.option("--levels", default=None,
              help="Comma-separated level values (defaults to 0,1,2,...).")
@click.option("--n-sub", type=int, default=None,
              help="Subsample each side to this size with shared seeds.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
@click.option("--plot", "plot_path", type=click.Path(dir_okay=False), default=None)
@_common_metric_flags
@_shared_flags
@click.pass_context
@_guarded
def sweep_cmd(ctx, **opts):
    """Evaluate a metric against a series of distorted feature files."""
    opts = _with_config(ctx, opts)
    from .features import read_array
    from .protocols import sweep

    real = read_array(opts["real_path"])
    series = [read_array(p) for p in opts["gen_paths"]]
    levels = None
    if opts["levels"]:
        levels = [float(v) for v in str(opts["levels"]).split(",")]
    result = sweep(
        real,
        series,
        opts["metric"],
        seed=opts["seed"],
        levels=levels,
        n_sub=opts["n_sub"],
        **_metric_options(opts),
    )
    if opts["csv_path"]:
        Path(opts["csv_path"]).write_text(result.to_csv())
    if opts["plot_path"]:
        from .plotting import emit_plot

        emit_plot(result, opts["plot_path"])
    config = {
        "metric": opts["metric"],
        "real": opts["real_path"],
        "gen": list(opts["gen_paths"]),
        "levels": list(result.levels),
        "n_sub": opts["n_sub"],
        "seed": opts["seed"],
        "options": _metric_options(opts),
    }
    _emit("sweep", config, result.to_dict(), opts["out_json"])


@cli.command(name="normality")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--test", "which",
              type=click.Choice(["mardia-skew", "mardia-kurtosis", "hz", "all"]),
              default="all", show_default=True)
@_shared_flags
@click.pass_context
@_guarded
def normality_cmd(ctx, **opts):
    """Multivariate normality tests at significance 0.05."""
    opts = _with_config(ctx, opts)
    from .features import read_array
    from .normality import henze_zirkler, mardia_kurtosis, mardia_skewness

    m = read_array(opts["input_path"])
    runners = {
        "mardia-skew": mardia_skewness,
        "mardia-kurtosis": mardia_kurtosis,
        "hz": henze_zirkler,
    }
    if opts["which"] == "all":
        results = [runners[k](m) for k in ("mardia-skew", "mardia-kurtosis", "hz")]
    else:
        results = [runners[opts["which"]](m)]
    config = {"input": opts["input_path"], "test": opts["which"]}
    _emit("normality", config, {"tests": [r.to_dict() for r in results]},
          opts["out_json"])


@cli.group(name="reduce")
def reduce_group():
    """Fit or apply dimensionality reduction models."""


@reduce_group.command(name="fit")
@click.option("--method", type=click.Choice(["pca", "lda", "ae"]), required=True)
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--k", type=int, default=None, help="Components (pca/lda).")
@click.option("--plan", type=click.Choice(["i3d", "vit"]), default="i3d",
              show_default=True, help="Autoencoder layer plan.")
@click.option("--labels", "labels_path", type=click.Path(exists=True,
              dir_okay=False), default=None,
              help="JSON list of per-row class labels (lda).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--epochs", type=int, default=None, help="Autoencoder epochs.")
@_shared_flags
@click.pass_context
@_guarded
def reduce_fit_cmd(ctx, **opts):
    """Fit a reduction model and write it to --model (+ .json sidecar)."""
    opts = _with_config(ctx, opts)
    from .errors import DataError
    from .features import read_array
    from .reduction import (
        AeArchitecture,
        TrainConfig,
        ae_train,
        lda_fit,
        pca_fit,
        save_model,
    )

    m = read_array(opts["input_path"])
    method = opts["method"]
    if method == "pca":
        if opts["k"] is None:
            raise DataError("pca needs --k")
        model = pca_fit(m, opts["k"])
        summary = {
            "k": model.k,
            "explained_variance_ratio": [
                float(v) for v in model.explained_variance_ratio
            ],
        }
    elif method == "lda":
        if opts["k"] is None:
            raise DataError("lda needs --k")
        if not opts["labels_path"]:
            raise DataError("lda needs --labels")
        with open(opts["labels_path"]) as fh:
            labels = json.load(fh)
        model = lda_fit(m, labels, opts["k"])
        summary = {"k": model.k, "classes": list(model.classes)}
    else:
        arch = AeArchitecture(in_dim=m.d, plan=opts["plan"])
        hyper = TrainConfig() if opts["epochs"] is None else TrainConfig(
            epochs=opts["epochs"]
        )
        model = ae_train(m, arch, hyper=hyper, seed=opts["seed"])
        summary = {"dims": list(arch.dims), "train_stats": model.train_stats}
    save_model(model, opts["model_path"])
    config = {
        "method": method,
        "input": opts["input_path"],
        "model": opts["model_path"],
        "k": opts["k"],
        "plan": opts["plan"] if method == "ae" else None,
        "labels": opts["labels_path"],
        "seed": opts["seed"],
        "epochs": opts["epochs"],
    }
    _emit("reduce-fit", config, summary, opts["out_json"])


@reduce_group.command(name="apply")
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "output_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--reconstruct", is_flag=True, default=False,
              help="Map back to the input space (pca/ae).")
@click.option("--precision", type=click.Choice(["f32", "f64"]), default="f32",
              show_default=True)
@_shared_flags
@click.pass_context
@_guarded
def reduce_apply_cmd(ctx, **opts):
    """Project (or reconstruct) features with a fitted model."""
    opts = _with_config(ctx, opts)
    from .errors import DataError
    from .features import read_array, write_array
    from .reduction import (
        AeModel,
        LdaModel,
        PcaModel,
        ae_encode,
        ae_reconstruct,
        lda_transform,
        load_model,
        pca_reconstruct,
        pca_transform,
    )

    model = load_model(opts["model_path"])
    m = read_array(opts["input_path"])
    if isinstance(model, PcaModel):
        out = pca_reconstruct(model, pca_transform(model, m)) if \
            opts["reconstruct"] else pca_transform(model, m)
        method = "pca"
    elif isinstance(model, LdaModel):
        if opts["reconstruct"]:
            raise DataError("lda projections are not invertible")
        out = lda_transform(model, m)
        method = "lda"
    else:
        assert isinstance(model, AeModel)
        out = ae_reconstruct(model, m) if opts["reconstruct"] else \
            ae_encode(model, m)
        method = "ae"
    write_array(out, opts["output_path"], precision=opts["precision"])
    config = {
        "model": opts["model_path"],
        "input": opts["input_path"],
        "output": opts["output_path"],
        "reconstruct": opts["reconstruct"],
        "precision": opts["precision"],
    }
    _emit("reduce-apply", config,
          {"method": method, "n": out.n, "d": out.d,
           "output": opts["output_path"]},
          opts["out_json"])


@cli.command(name="fit-gmm")
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--clusters", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--model", "model_path", type=click.Path(dir_okay=False),
              default=None, help="Write the fitted mixture as JSON.")
@_shared_flags
@click.pass_context
@_guarded
def fit_gmm_cmd(ctx, **opts):
    """Fit a full-covariance Gaussian mixture to a feature file."""
    opts = _with_config(ctx, opts)
    from .features import read_array
    from .transport import fit_gmm

    m = read_array(opts["input_path"])
    model = fit_gmm(m, opts["clusters"], seed=opts["seed"])
    doc = model.to_dict()
    if opts["model_path"]:
        Path(opts["model_path"]).write_text(
            json.dumps(doc, sort_keys=True, indent=2) + "\n"
        )
    config = {
        "input": opts["input_path"],
        "clusters": opts["clusters"],
        "seed": opts["seed"],
        "model": opts["model_path"],
    }
    result = {
        "clusters": model.c,
        "dim": model.dim,
        "weights": [float(w) for w in model.weights],
    }
    if opts["model_path"] is None:
        result["mixture"] = doc
    _emit("fit-gmm", config, result, opts["out_json"])


@cli.command(name="align")
@click.option("--pairwise", "pairwise_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Preference matrix (JSON {labels, matrix} or labeled CSV).")
@click.option("--metrics", "metrics_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Metric value per item (JSON object or label,value CSV).")
@_shared_flags
@click.pass_context
@_guarded
def align_cmd(ctx, **opts):
    """Score a metric's agreement with human pairwise preferences."""
    opts = _with_config(ctx, opts)
    from .align import (
        align_score,
        invert_renormalize,
        load_metric_values,
        load_pairwise,
        priority_vector,
    )

    matrix = load_pairwise(opts["pairwise_path"])
    values = load_metric_values(opts["metrics_path"])
    priority = priority_vector(matrix)
    inverted = invert_renormalize(priority)
    score = align_score(matrix, values)
    config = {"pairwise": opts["pairwise_path"], "metrics": opts["metrics_path"]}
    result = {
        "align_score": score,
        "priority": priority.to_dict(),
        "inverted_priority": inverted.to_dict(),
    }
    _emit("align", config, result, opts["out_json"])


@cli.command(name="rankcorr")
@click.option("--xs", required=True, help="Comma-separated values.")
@click.option("--ys", required=True, help="Comma-separated values.")
@_shared_flags
@click.pass_context
@_guarded
def rankcorr_cmd(ctx, **opts):
    """Spearman rank correlation between two value lists."""
    opts = _with_config(ctx, opts)
    from .protocols import spearman

    xs = [float(v) for v in str(opts["xs"]).split(",")]
    ys = [float(v) for v in str(opts["ys"]).split(",")]
    rho = spearman(xs, ys)
    config = {"xs": xs, "ys": ys}
    _emit("rankcorr", config, {"spearman": rho, "n": len(xs)}, opts["out_json"])


@cli.command(name="synth")
@click.option("--dist", "dist_kind", type=click.Choice(["mg", "gmm"]),
              required=True)
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "--out-npy", "output_path", required=True,
              type=click.Path(dir_okay=False))
@click.option("--precision", type=click.Choice(["f32", "f64"]), default="f32",
              show_default=True)
@_shared_flags
@click.pass_context
@_guarded
def synth_cmd(ctx, **opts):
    """Generate a toy feature file (100-D Gaussian or mixture)."""
    opts = _with_config(ctx, opts)
    import hashlib

    from .features import write_array
    from .protocols import synth_gmm, synth_mg

    maker = synth_mg if opts["dist_kind"] == "mg" else synth_gmm
    m = maker(opts["n"], opts["seed"])
    write_array(m, opts["output_path"], precision=opts["precision"])
    digest = hashlib.sha256(Path(opts["output_path"]).read_bytes()).hexdigest()
    config = {
        "dist": opts["dist_kind"],
        "n": opts["n"],
        "seed": opts["seed"],
        "output": opts["output_path"],
        "precision": opts["precision"],
    }
    result = {"output": opts["output_path"], "n": m.n, "d": m.d,
              "sha256": digest}
    _emit("synth", config, result, opts["out_json"])


@cli.command(name="info")
@_shared_flags
@click.pass_context
@_guarded
def info_cmd(ctx, **opts):
    """Print the extractor table, metric ids, and default constants."""
    opts = _with_config(ctx, opts)
    from . import __version__
    from .features import EXTRACTOR_DIMS
    from .registry import DEFAULT_CLUSTERS, METRIC_IDS
    from .sample_metrics import BLOCK, JEDI_KERNEL, JEDI_SCALE

    result = {
        "version": __version__,
        "metric_ids": list(METRIC_IDS),
        "extractor_dims": dict(EXTRACTOR_DIMS),
        "defaults": {
            "kernel": {
                "degree": 2,
                "gamma": "auto (1/d)",
                "coef": 0.0,
            },
            "jedi": {
                "scale": JEDI_SCALE,
                "kernel_family": JEDI_KERNEL.family,
                "kernel_degree": JEDI_KERNEL.degree,
                "kernel_gamma": JEDI_KERNEL.gamma,
                "kernel_coef": JEDI_KERNEL.coef,
                "expected_extractor": "vjepa_ssv2",
            },
            "mmd_block": BLOCK,
            "gmm_clusters": DEFAULT_CLUSTERS,
            "convergence": {
                "interval": 100,
                "repeats": 5,
                "rate_curve_repeats": 10,
                "margin": 0.05,
                "target_n": 5000,
            },
            "significance": 0.05,
        },
    }
    _emit("info", {}, result, opts["out_json"])


def main(argv=None) -> int:
    """Entry point; resolves the thread request before numpy loads."""
    args = list(sys.argv[1:] if argv is None else argv)
    request = None
    for i, a in enumerate(args):
        if a == "--threads" and i + 1 < len(args):
            request = args[i + 1]
        elif a.startswith("--threads="):
            request = a.split("=", 1)[1]
    if request is None:
        request = os.environ.get("VDMKIT_THREADS")
    if request and str(request).isdigit() and int(request) >= 1:
        if "numpy" not in sys.modules:
            for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS",
                        "MKL_NUM_THREADS"):
                os.environ[var] = str(request)
    return cli.main(args=args, prog_name="vdmkit", standalone_mode=True)


if __name__ == "__main__":
    main()
