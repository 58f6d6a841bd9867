"""Distribution distances and diagnostics for video feature sets.

Submodules import lazily (PEP 562) so the CLI can configure BLAS threading
before numpy loads; ``import vdmkit`` alone touches no heavy dependency.
"""

from importlib import import_module

__version__ = "0.1.0"

_SUBMODULES = (
    "align",
    "errors",
    "features",
    "frechet",
    "normality",
    "plotting",
    "protocols",
    "reduction",
    "registry",
    "rng",
    "sample_metrics",
    "transport",
    "cli",
)

_EXPORTS = {
    # features
    "FeatureMatrix": "features",
    "ScalingStats": "features",
    "Manifest": "features",
    "EXTRACTOR_DIMS": "features",
    "as_features": "features",
    "read_array": "features",
    "write_array": "features",
    "peek_header": "features",
    "standardize": "features",
    "subsample": "features",
    "load_manifest": "features",
    "save_manifest": "features",
    "validate_manifest": "features",
    # frechet
    "GaussianMoments": "frechet",
    "FrechetResult": "frechet",
    "estimate_moments": "frechet",
    "sqrtm_psd": "frechet",
    "frechet_distance": "frechet",
    "fvd": "frechet",
    # sample metrics
    "KernelSpec": "sample_metrics",
    "MetricResult": "sample_metrics",
    "JEDI_KERNEL": "sample_metrics",
    "JEDI_SCALE": "sample_metrics",
    "kernel_eval": "sample_metrics",
    "mmd2_unbiased": "sample_metrics",
    "energy_distance": "sample_metrics",
    "jedi_score": "sample_metrics",
    # transport
    "GmmModel": "transport",
    "TransportPlan": "transport",
    "fit_gmm": "transport",
    "gaussian_w2_sq": "transport",
    "discrete_ot": "transport",
    "mw2_sq": "transport",
    # normality
    "NormalityTestResult": "normality",
    "mardia_skewness": "normality",
    "mardia_kurtosis": "normality",
    "henze_zirkler": "normality",
    "run_battery": "normality",
    # protocols
    "ConvergenceConfig": "protocols",
    "ConvergenceReport": "protocols",
    "RateCurve": "protocols",
    "SweepResult": "protocols",
    "synth_mg": "protocols",
    "synth_gmm": "protocols",
    "convergence_sample_size": "protocols",
    "rate_curve": "protocols",
    "blur_sigma_range": "protocols",
    "sweep": "protocols",
    "spearman": "protocols",
    # align
    "PairwiseMatrix": "align",
    "PriorityVector": "align",
    "priority_vector": "align",
    "invert_renormalize": "align",
    "align_score": "align",
    # registry
    "METRIC_IDS": "registry",
    "compute_metric": "registry",
    # plotting
    "render_line_chart": "plotting",
    "emit_plot": "plotting",
    # rng
    "make_generator": "rng",
    "derive_seeds": "rng",
    # errors
    "VdmkitError": "errors",
    "FormatError": "errors",
    "UnsupportedLayoutError": "errors",
    "DataError": "errors",
    "DimensionMismatchError": "errors",
    "NotPsdError": "errors",
    "SingularCovarianceError": "errors",
    "DegenerateFitError": "errors",
    "TransportError": "errors",
    "RangeError": "errors",
}

__all__ = ["__version__", *_SUBMODULES, *_EXPORTS]


def __getattr__(name):
    if name in _EXPORTS:
        value = getattr(import_module(f".{_EXPORTS[name]}", __name__), name)
        globals()[name] = value
        return value
    if name in _SUBMODULES:
        module = import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
