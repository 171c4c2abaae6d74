"""Parameter sweeps driven by a JSON spec document.

A spec names the swept parameter and its grid, picks an evaluation
formula, and fixes the remaining parameters; optional Monte Carlo
settings add estimator columns next to the analytic ones. Specs are a
single JSON object so an experiment can live in the repo as a fixture:

    {
      "sweep": {"parameter": "m", "min": 0.0, "max": 3.0, "count": 13,
                "spacing": "linear"},
      "formula": "symmetric",
      "fixed": {"delta": 1.0, "tau": 1.0, "t": 1.0},
      "mc": {"samples": 100000, "seed": 7, "workers": 4}
    }
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic, control, dephasing, montecarlo
from .model import EvaluationPoint, TelegraphSource, suppression_schedule, waiting_schedule

SWEEP_PARAMETERS = (
    "m", "t", "tau_c", "tau_plus", "tau_minus", "delta", "sigma", "n_segments",
)
SPACINGS = ("linear", "log")
FORMULAS = (
    "symmetric", "general", "gaussian", "multi", "approx", "variance",
    "one_over_f", "waiting", "suppression", "qubit_rtn", "qubit_gaussian",
)


class SweepSpecError(ValueError):
    """Sweep document failed validation; message names the offending field."""


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    grid_min: float
    grid_max: float
    count: int
    spacing: str
    formula: str
    fixed: dict = field(default_factory=dict)
    mc: dict | None = None

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise SweepSpecError(
                f"sweep.parameter must be one of {SWEEP_PARAMETERS}, got {self.parameter!r}"
            )
        if self.formula not in FORMULAS:
            raise SweepSpecError(f"formula must be one of {FORMULAS}, got {self.formula!r}")
        if self.spacing not in SPACINGS:
            raise SweepSpecError(f"sweep.spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.count < 1:
            raise SweepSpecError(f"sweep.count must be >= 1, got {self.count}")
        if not (math.isfinite(self.grid_min) and math.isfinite(self.grid_max)):
            raise SweepSpecError("sweep.min and sweep.max must be finite")
        if self.grid_min > self.grid_max:
            raise SweepSpecError(
                f"sweep.min must be <= sweep.max, got {self.grid_min} > {self.grid_max}"
            )
        if self.spacing == "log" and self.grid_min <= 0:
            raise SweepSpecError("log spacing requires sweep.min > 0")
        if self.mc is not None:
            if int(self.mc.get("samples", 0)) < 2:
                raise SweepSpecError("mc.samples must be >= 2")

    @classmethod
    def from_document(cls, doc: dict) -> "SweepSpec":
        if not isinstance(doc, dict):
            raise SweepSpecError("spec document must be a JSON object")
        sweep = doc.get("sweep")
        if not isinstance(sweep, dict):
            raise SweepSpecError("field 'sweep' (object) is required")
        for key in ("parameter", "min", "max", "count"):
            if key not in sweep:
                raise SweepSpecError(f"field 'sweep.{key}' is required")
        if "formula" not in doc:
            raise SweepSpecError("field 'formula' is required")
        fixed = doc.get("fixed", {})
        if not isinstance(fixed, dict):
            raise SweepSpecError("field 'fixed' must be an object")
        mc = doc.get("mc")
        if mc is not None and not isinstance(mc, dict):
            raise SweepSpecError("field 'mc' must be an object")
        try:
            return cls(
                parameter=str(sweep["parameter"]),
                grid_min=float(sweep["min"]),
                grid_max=float(sweep["max"]),
                count=int(sweep["count"]),
                spacing=str(sweep.get("spacing", "linear")),
                formula=str(doc["formula"]),
                fixed=dict(fixed),
                mc=dict(mc) if mc is not None else None,
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SweepSpecError):
                raise
            raise SweepSpecError(f"bad field value: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SweepSpecError(f"spec is not valid JSON: {exc}") from exc
        return cls.from_document(doc)

    def grid(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.grid_min])
        if self.spacing == "log":
            return np.geomspace(self.grid_min, self.grid_max, self.count)
        return np.linspace(self.grid_min, self.grid_max, self.count)

    def params_hash(self) -> str:
        payload = json.dumps(
            {
                "parameter": self.parameter,
                "min": self.grid_min,
                "max": self.grid_max,
                "count": self.count,
                "spacing": self.spacing,
                "formula": self.formula,
                "fixed": self.fixed,
                "mc": self.mc,
            },
            sort_keys=True,
        )
        return hashlib.sha1(payload.encode()).hexdigest()[:12]


def _need(params: dict, formula: str, *names):
    out = []
    for name in names:
        if name not in params:
            raise SweepSpecError(f"formula {formula!r} needs fixed parameter {name!r}")
        out.append(params[name])
    return out


def _symmetric_source(params, formula) -> TelegraphSource:
    delta, tau = _need(params, formula, "delta", "tau")
    return TelegraphSource.symmetric(delta, tau, p_plus=params.get("p_plus", 0.5))


def _resolve(spec: SweepSpec, value: float) -> dict:
    params = dict(spec.fixed)
    name = {"tau_c": "tau", "n_segments": "n_segments"}.get(spec.parameter, spec.parameter)
    params[name] = int(round(value)) if spec.parameter == "n_segments" else value
    return params


def _mc_settings(spec: SweepSpec):
    mc = spec.mc
    return (
        int(mc.get("samples", 100_000)),
        int(mc.get("seed", 0)),
        int(mc.get("workers", 1)),
    )


def _eval_symmetric(spec, params, row):
    source = _symmetric_source(params, "symmetric")
    (m,) = _need(params, "symmetric", "m")
    (t,) = _need(params, "symmetric", "t")
    point = EvaluationPoint(m=m, t=t)
    row["analytic"] = analytic.cos_expectation_symmetric(source, point)
    if spec.mc:
        samples, seed, workers = _mc_settings(spec)
        est = montecarlo.estimate_char_fn(source, point, "mixed", samples, seed, workers)
        row.update(
            mc_re=est.mean.real, mc_im=est.mean.imag,
            se_re=est.std_error.real, se_im=est.std_error.imag,
        )


def _eval_general(spec, params, row):
    delta, tau_plus, tau_minus, m, t = _need(
        params, "general", "delta", "tau_plus", "tau_minus", "m", "t"
    )
    source = TelegraphSource(delta, tau_plus, tau_minus, p_plus=params.get("p_plus", 0.5))
    start = params.get("start", "mixed")
    point = EvaluationPoint(m=m, t=t)
    value = analytic.char_fn_general(source, point, start=start)
    row["analytic_re"] = value.real
    row["analytic_im"] = value.imag
    if spec.mc:
        samples, seed, workers = _mc_settings(spec)
        est = montecarlo.estimate_char_fn(source, point, start, samples, seed, workers)
        row.update(
            mc_re=est.mean.real, mc_im=est.mean.imag,
            se_re=est.std_error.real, se_im=est.std_error.imag,
        )


def _eval_gaussian(spec, params, row):
    m, sigma = _need(params, "gaussian", "m", "sigma")
    row["analytic"] = analytic.gaussian_cos_expectation(m, sigma)


def _eval_multi(spec, params, row):
    m, t, sources = _need(params, "multi", "m", "t", "sources")
    parsed = [
        TelegraphSource(s["delta"], s["tau_plus"], s["tau_minus"], s.get("p_plus", 0.5))
        for s in sources
    ]
    value = analytic.multi_source_char_fn(parsed, EvaluationPoint(m=m, t=t))
    row["analytic_re"] = value.real
    row["analytic_im"] = value.imag


def _eval_approx(spec, params, row):
    source = _symmetric_source(params, "approx")
    m, t, regime = _need(params, "approx", "m", "t", "regime")
    point = EvaluationPoint(m=m, t=t)
    row["approx"] = analytic.approx_cos_expectation(source, point, regime)
    row["exact"] = analytic.cos_expectation_symmetric(source, point)


def _eval_variance(spec, params, row):
    source = _symmetric_source(params, "variance")
    (t,) = _need(params, "variance", "t")
    row["variance"] = analytic.variance_symmetric(source, t)
    if spec.mc:
        samples, seed, workers = _mc_settings(spec)
        est = montecarlo.estimate_variance(source, t, samples, seed, workers)
        row.update(mc_variance=est.mean, mc_se=est.std_error)


def _ensemble(params, formula) -> analytic.OneOverFEnsemble:
    r, tau_a, tau_b, delta_mean = _need(params, formula, "r", "tau_a", "tau_b", "delta_mean")
    return analytic.OneOverFEnsemble(
        r=int(r), tau_a=tau_a, tau_b=tau_b, delta_mean=delta_mean,
        delta_sd=params.get("delta_sd", 0.0), alpha=params.get("alpha"),
    )


def _eval_one_over_f(spec, params, row):
    ensemble = _ensemble(params, "one_over_f")
    (t,) = _need(params, "one_over_f", "t")
    row["variance_approx"] = analytic.variance_one_over_f(ensemble, t, mode="approx")
    row["variance_quadrature"] = analytic.variance_one_over_f(ensemble, t, mode="quadrature")
    if spec.mc:
        samples, seed, workers = _mc_settings(spec)
        est = montecarlo.estimate_ensemble_variance(ensemble, t, samples, seed, workers)
        row.update(mc_variance=est.mean, mc_se=est.std_error)


def _eval_waiting(spec, params, row):
    source = _symmetric_source(params, "waiting")
    m, t, n = _need(params, "waiting", "m", "t", "n_segments")
    n = int(n)
    mode = params.get("mode", "exact")
    value = control.waiting_method_expectation(source, m, t, n, mode=mode)
    row["analytic"] = value
    row["error"] = 1.0 - value
    if spec.mc:
        samples, seed, workers = _mc_settings(spec)
        wait = params.get("wait", 50.0 * source.tau_plus)
        schedule = waiting_schedule(t, n, wait)
        est = montecarlo.estimate_schedule(schedule, source, m, samples, seed, workers)
        row.update(
            mc_re=est.mean.real, mc_im=est.mean.imag,
            se_re=est.std_error.real, se_im=est.std_error.imag,
        )


def _eval_suppression(spec, params, row):
    source = _symmetric_source(params, "suppression")
    m, t, n = _need(params, "suppression", "m", "t", "n_segments")
    n = int(n)
    mode = params.get("mode", "exact_transfer")
    value = control.suppression_method_expectation(source, m, t, n, mode=mode)
    row["analytic_re"] = value.real
    row["analytic_im"] = value.imag
    row["error"] = 1.0 - value.real
    if spec.mc:
        samples, seed, workers = _mc_settings(spec)
        schedule = suppression_schedule(t, n)
        est = montecarlo.estimate_schedule(schedule, source, m, samples, seed, workers)
        row.update(
            mc_re=est.mean.real, mc_im=est.mean.imag,
            se_re=est.std_error.real, se_im=est.std_error.imag,
        )


def _eval_qubit_rtn(spec, params, row):
    source = _symmetric_source(params, "qubit_rtn")
    (t,) = _need(params, "qubit_rtn", "t")
    if "n_segments" in params:
        probs = dephasing.probs_rtn_controlled(
            source, t, int(params["n_segments"]),
            method=params.get("method", "suppression"),
            mode=params.get("mode"),
        )
    else:
        probs = dephasing.probs_rtn(source, t)
    row.update(n0=probs.n0, n1=probs.n1, n2=probs.n2)


def _eval_qubit_gaussian(spec, params, row):
    (sigma,) = _need(params, "qubit_gaussian", "sigma")
    probs = dephasing.probs_gaussian(sigma)
    row.update(n0=probs.n0, n1=probs.n1, n2=probs.n2)
    if params.get("quartic"):
        q = dephasing.probs_gaussian(sigma, quartic=True)
        row.update(n0_quartic=q.n0, n1_quartic=q.n1, n2_quartic=q.n2)


_EVALUATORS = {
    "symmetric": _eval_symmetric,
    "general": _eval_general,
    "gaussian": _eval_gaussian,
    "multi": _eval_multi,
    "approx": _eval_approx,
    "variance": _eval_variance,
    "one_over_f": _eval_one_over_f,
    "waiting": _eval_waiting,
    "suppression": _eval_suppression,
    "qubit_rtn": _eval_qubit_rtn,
    "qubit_gaussian": _eval_qubit_gaussian,
}


def run_sweep(spec: SweepSpec) -> tuple[list[dict], list[str]]:
    """Evaluate the sweep; returns (rows, fieldnames) in grid order."""
    evaluator = _EVALUATORS[spec.formula]
    phash = spec.params_hash()
    rows = []
    for value in spec.grid():
        row = {spec.parameter: float(value)}
        try:
            evaluator(spec, _resolve(spec, float(value)), row)
        except (ValueError, KeyError) as exc:
            if isinstance(exc, SweepSpecError):
                raise
            raise SweepSpecError(f"evaluation failed at {spec.parameter}={value}: {exc}") from exc
        row["formula"] = spec.formula
        row["params_hash"] = phash
        rows.append(row)
    fieldnames = list(rows[0].keys()) if rows else [spec.parameter, "formula", "params_hash"]
    return rows, fieldnames
