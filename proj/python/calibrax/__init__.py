"""Binomial-process calibration curves, calibration metrics and benchmarks."""

import json as _json

from ._core import (
    BetaParams,
    CalibrationError,
    CurveFit,
    Dataset,
    EstimatorConfig,
    PriorCurveParams,
    WilcoxonResult,
    beta_moment_fit,
    beta_pdf,
    builtin_spec_names,
    ece_bin,
    ece_debiased,
    ece_sweep,
    estimate_curve,
    g_eval,
    ingest_logits,
    ks_error,
    link_eval,
    load_pairs,
    simulate,
    tce_bpm,
    tce_exact,
    wilcoxon_signed_rank,
)
from ._core import _benchmark_json, _fit_map_json, _map_apply

__all__ = [
    "BetaParams",
    "CalibrationError",
    "CurveFit",
    "Dataset",
    "EstimatorConfig",
    "PriorCurveParams",
    "WilcoxonResult",
    "apply_map",
    "benchmark",
    "beta_moment_fit",
    "beta_pdf",
    "builtin_spec_names",
    "ece_bin",
    "ece_debiased",
    "ece_sweep",
    "estimate_curve",
    "fit_map",
    "g_eval",
    "ingest_logits",
    "ks_error",
    "link_eval",
    "load_pairs",
    "simulate",
    "tce_bpm",
    "tce_exact",
    "wilcoxon_signed_rank",
]


def benchmark(kind="metrics", dists=("D1",), sizes=(5000,), runs=20, seed=0,
              metrics=None, bins=15, threads=0):
    """Run the simulation benchmark and return the report as a dict."""
    text = _benchmark_json(kind, list(dists), list(sizes), runs, seed,
                           list(metrics) if metrics else [], bins, threads)
    return _json.loads(text)


def fit_map(method, dataset, bins=15):
    """Fit a confidence calibration map (tpm, hb, platt, isotonic); returns a dict."""
    return _json.loads(_fit_map_json(method, dataset, bins))


def apply_map(map_json, confidences):
    """Apply a serialized calibration map (dict) to a sequence of confidences."""
    return _map_apply(_json.dumps(map_json), list(confidences))
