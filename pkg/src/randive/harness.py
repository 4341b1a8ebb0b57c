"""Experiment harness: batch studies with CSV/JSON persistence.

Five experiments are available:

``bimodal``
    One random dive chain and three random walk chains on the two-mode
    mixture, reporting acceptance rates and mode occupancy.
``needle``
    Replicated dive chains on the needle-in-haystack mixture for five
    multiplier proposals, reporting the occupancy statistic P^ = mean of
    1(|x| < 0.05) per replicate.
``thicktail``
    Replicated chains on the thick-tailed target: a means study (normality
    tests of the per-chain ergodic means) and a convergence study
    (Kolmogorov-Smirnov distance of short chains to the true CDF).
``shareprice``
    Componentwise dive sampling of the skewed-t posterior for a price CSV,
    or for synthetic data drawn from the model when allowed.
``kernel-check``
    Direct numerical probes of the dive kernel: detailed balance, rejection
    probability limits, kernel-density normalization, and the two elementary
    inequalities behind the geometric drift bound.

Every experiment writes ``summary.json``, ``manifest.json`` and per-arm
``chains.csv`` (one row per chain, from which the aggregates are
recomputable) plus ``trace_{i}.csv`` files for the first ``traces_per_arm``
chains of each arm.  Reruns of an identical configuration produce
byte-identical ``summary.json`` (apart from the wall-clock field).
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import shareprice as sp
from .diagnostics import (
    ks_distance,
    normality_tests,
    proposal_kernel_density,
    rejection_prob_estimate,
)
from .proposals import beta_mixture, proposal_from_spec, uniform_y
from .rng import RngStream
from .samplers import ChainConfig, INNER, OUTER, rdmh_accept_log, run_chain
from .targets import bimodal_example1, needle_example2, thick_tailed, thick_tailed_cdf

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "run_experiment",
    "emit_csv",
    "emit_summary",
    "EXPERIMENTS",
]

EXPERIMENTS = ("bimodal", "needle", "thicktail", "shareprice", "kernel-check")


class ConfigError(ValueError):
    """Invalid experiment configuration (unknown keys, bad values, missing data)."""


_CONFIG_KEYS = {
    "experiment",
    "seed",
    "scale_factor",
    "threads",
    "output_dir",
    "n_iter",
    "burn_in",
    "thin",
    "n_chains",
    "init",
    "samplers",
    "ks_chains",
    "ks_len",
    "ks_thin",
    "ks_init",
    "data_path",
    "allow_synthetic",
    "synthetic_n",
    "synthetic_truth",
    "n_pairs",
    "n_mc",
    "n_lemma",
    "traces_per_arm",
    "check",
}

_DEFAULTS = {
    "bimodal": {"n_iter": 50_000, "burn_in": 20_000, "thin": 1, "seed": 20260810},
    "needle": {
        "n_iter": 50_000,
        "burn_in": 20_000,
        "thin": 1,
        "n_chains": 100,
        "init": 1.0,
        "seed": 20260801,
    },
    "thicktail": {
        "n_iter": 50_000,
        "burn_in": 10_000,
        "thin": 1,
        "n_chains": 1000,
        "init": 1.0,
        "samplers": ["rdmh", "rwmh-normal", "rwmh-cauchy", "lmh-2", "lmh-3", "lmh-4"],
        "ks_chains": 1000,
        "ks_len": 1000,
        "ks_thin": 5,
        "ks_init": 15.0,
        "seed": 20260803,
    },
    "shareprice": {
        "n_iter": 160_000,
        "burn_in": 10_000,
        "thin": 5,
        "seed": 20260807,
        "allow_synthetic": False,
        "synthetic_n": 500,
        "synthetic_truth": {"beta": 0.005, "sigma": 0.01, "nu": 8.0, "gamma": 0.7},
    },
    "kernel-check": {
        "n_pairs": 1000,
        "n_mc": 1_000_000,
        "n_lemma": 100_000,
        "seed": 20260801,
    },
}

_SAMPLER_ARMS = {
    "rdmh": {"sampler": "rdmh"},
    "rwmh-normal": {"sampler": "rwmh-normal", "tau": 1.5},
    "rwmh-cauchy": {"sampler": "rwmh-cauchy", "scale": 1.0},
    "lmh-2": {"sampler": "lmh", "scale": 2.0},
    "lmh-3": {"sampler": "lmh", "scale": 3.0},
    "lmh-4": {"sampler": "lmh", "scale": 4.0},
}

# Table rows for the needle study: label, proposal spec, reference occupancy
# E(P^) and reference average acceptance rate.
_NEEDLE_ROWS = (
    ("uniform", uniform_y(), 0.5115, 0.3714),
    ("beta(1,1)-w0.85", beta_mixture(0.15, 1.0, 1.0, 1.0, 1.0), 0.4953, 0.4108),
    ("beta(0.5,1)-w0.85", beta_mixture(0.15, 0.5, 1.0, 0.5, 1.0), 0.4938, 0.2851),
    ("beta(1,0.5)-w0.85", beta_mixture(0.15, 1.0, 0.5, 1.0, 0.5), 0.4912, 0.5679),
    ("beta(0.5,0.5)-sym", beta_mixture(0.5, 0.5, 0.5, 0.5, 0.5), 0.5024, 0.3791),
)

_TARGETS = {
    "bimodal": bimodal_example1,
    "needle": needle_example2,
    "thicktail": thick_tailed,
}


@dataclass
class ExperimentConfig:
    """Validated, fully-defaulted configuration of one experiment run."""

    experiment: str
    seed: int
    output_dir: str = "randive-out"
    scale_factor: float = 1.0
    threads: int = 0
    options: dict = field(default_factory=dict)

    @classmethod
    def build(cls, experiment, overrides=None):
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
        merged = dict(_DEFAULTS[experiment])
        overrides = dict(overrides or {})
        unknown = set(overrides) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        declared = overrides.pop("experiment", None)
        if declared is not None and declared != experiment:
            raise ConfigError(
                f"config file declares experiment {declared!r} but {experiment!r} was requested"
            )
        merged.update(overrides)
        seed = merged.pop("seed")
        if not 0 <= int(seed) < 2**64:
            raise ConfigError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
        scale = float(merged.pop("scale_factor", 1.0))
        if not 0.0 < scale <= 1.0:
            raise ConfigError(f"scale_factor must lie in (0, 1], got {scale}")
        threads = int(merged.pop("threads", 0))
        if threads < 0:
            raise ConfigError("threads must be non-negative")
        out = merged.pop("output_dir", "randive-out")
        merged.pop("check", None)
        try:
            _validate_options(experiment, merged)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(
            experiment=experiment,
            seed=int(seed),
            output_dir=str(out),
            scale_factor=scale,
            threads=threads,
            options=merged,
        )

    def scaled(self, count):
        """Rescale a replication count by the scale factor (at least 1)."""
        return max(1, round(count * self.scale_factor))

    def workers(self):
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def echo(self):
        doc = {
            "experiment": self.experiment,
            "seed": self.seed,
            "output_dir": self.output_dir,
            "scale_factor": self.scale_factor,
            "threads": self.threads,
        }
        doc.update(self.options)
        return doc


def _validate_options(experiment, opts):
    for key in ("n_iter", "burn_in", "thin", "n_chains", "ks_chains", "ks_len", "ks_thin",
                "n_pairs", "n_mc", "n_lemma", "traces_per_arm", "synthetic_n"):
        if key in opts:
            opts[key] = int(opts[key])
            if opts[key] < 0:
                raise ConfigError(f"{key} must be non-negative")
    if "n_iter" in opts and "burn_in" in opts and not opts["burn_in"] < opts["n_iter"]:
        raise ConfigError("burn_in must be smaller than n_iter")
    if "samplers" in opts:
        bad = [s for s in opts["samplers"] if s not in _SAMPLER_ARMS]
        if bad:
            raise ConfigError(f"unknown sampler arms: {bad}; expected {sorted(_SAMPLER_ARMS)}")
    if experiment == "shareprice" and "synthetic_truth" in opts:
        truth = dict(opts["synthetic_truth"])
        missing = {"beta", "sigma", "nu", "gamma"} - set(truth)
        if missing:
            raise ConfigError(f"synthetic_truth is missing {sorted(missing)}")
        opts["synthetic_truth"] = truth
    opts.setdefault("traces_per_arm", 1)


@dataclass
class ExperimentResult:
    """Outcome of one experiment: summary document, checks, wall clock."""

    experiment: str
    config: dict
    summary: dict
    checks: list
    wall_clock_s: float

    @property
    def all_checks_passed(self):
        return all(c["passed"] for c in self.checks)

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "config": self.config,
            "summary": self.summary,
            "checks": self.checks,
            "checks_passed": self.all_checks_passed,
            "wall_clock_s": self.wall_clock_s,
        }


# ---------------------------------------------------------------------------
# chain worker


def _chain_task(task):
    """Run one chain (worker-pool entry point) and reduce it to statistics."""
    target = _TARGETS[task["target"]]()
    proposal = proposal_from_spec(task["proposal"]) if task.get("proposal") else None
    config = ChainConfig(
        n_iter=task["n_iter"],
        burn_in=task["burn_in"],
        thin=task["thin"],
        init=task["init"],
        seed=task["seed"],
        stream_index=task["stream_index"],
    )
    trace = run_chain(config, task["sampler"], target, proposal)
    states = trace.states
    out = {"stream_index": task["stream_index"], "acceptance_rate": trace.acceptance_rate}
    measures = task.get("measures", ())
    if "mean" in measures:
        out["mean"] = float(states.mean())
    if "phat" in measures:
        out["phat"] = float((np.abs(states) < 0.05).mean())
    analysis_burn = task.get("analysis_burn_in", 0)
    if "upper_basin" in measures:
        out["upper_basin"] = float((states[analysis_burn:] > 5.0).mean())
    if "max_state" in measures:
        out["max_state"] = float(states.max())
    if "ks" in measures:
        stat, pval = ks_distance(states, thick_tailed_cdf)
        out["ks"] = stat
        out["ks_pvalue"] = pval
    if task.get("keep_states"):
        out["trace"] = trace
    return out


def _map_tasks(tasks, workers):
    if workers <= 1 or len(tasks) <= 1:
        return [_chain_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_chain_task, tasks, chunksize=chunk))


# ---------------------------------------------------------------------------
# CSV / JSON persistence


def emit_csv(trace, path, columns=None):
    """Write a trace as CSV: ``iter``, one column per state coordinate, ``accepted``.

    States are written with shortest round-trip precision, so reading the
    file back reproduces them bit-exactly.  The ``accepted`` column holds the
    0/1 flag of the step that produced the recorded row (for componentwise
    sweeps, the number of coordinate moves accepted in that sweep).
    """
    states = trace.states
    dim = 1 if states.ndim == 1 else states.shape[1]
    if columns is None:
        columns = ["state"] + [f"state{i + 1}" for i in range(1, dim)]
    elif len(columns) != dim:
        raise ValueError(f"need {dim} column names, got {len(columns)}")
    cfg = trace.config
    per_iter_flags = trace.accepted.reshape(cfg.n_iter, -1)
    with open(path, "w") as fh:
        fh.write("iter," + ",".join(columns) + ",accepted\n")
        for j in range(len(states)):
            step = cfg.burn_in + (j + 1) * cfg.thin
            row = states[j : j + 1].ravel() if dim == 1 else states[j]
            vals = ",".join(repr(float(v)) for v in row)
            fh.write(f"{step},{vals},{int(per_iter_flags[step - 1].sum())}\n")


def emit_summary(result, path):
    """Write the experiment result as a canonical (sorted-key) JSON document."""
    with open(path, "w") as fh:
        json.dump(result.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _emit_chain_rows(path, rows, fields):
    with open(path, "w") as fh:
        fh.write(",".join(fields) + "\n")
        for row in rows:
            fh.write(",".join(repr(row[f]) if isinstance(row[f], float) else str(row[f]) for f in fields) + "\n")


def _write_manifest(config, out_dir):
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump({"config": config.echo(), "seed": config.seed}, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _arm_dir(out_dir, arm):
    path = os.path.join(out_dir, arm)
    os.makedirs(path, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# experiments


def _check(name, passed, value, expected):
    return {"name": name, "passed": bool(passed), "value": value, "expected": expected}


def _run_bimodal(config, out_dir):
    opts = config.options
    n_iter, burn_in = opts["n_iter"], opts["burn_in"]
    arms = [
        ("rdmh", {"sampler": "rdmh"}, uniform_y().as_spec(), -2.0),
        ("rwmh_tau2_from0", {"sampler": "rwmh-normal", "tau": 2.0}, None, 0.0),
        ("rwmh_tau2_from10", {"sampler": "rwmh-normal", "tau": 2.0}, None, 10.0),
        ("rwmh_tau5_from10", {"sampler": "rwmh-normal", "tau": 5.0}, None, 10.0),
    ]
    tasks = []
    for idx, (label, sampler, proposal, init) in enumerate(arms):
        tasks.append(
            {
                "target": "bimodal",
                "sampler": sampler,
                "proposal": proposal,
                "n_iter": n_iter,
                "burn_in": 0,  # record everything; occupancy uses the nominal burn-in
                "thin": 1,
                "init": init,
                "seed": config.seed,
                "stream_index": idx,
                "measures": ("upper_basin", "max_state"),
                "analysis_burn_in": burn_in,
                "keep_states": opts["traces_per_arm"] > 0,
            }
        )
    results = _map_tasks(tasks, 1)  # four cheap chains; not worth a pool
    summary = {"arms": {}}
    rows = []
    for (label, sampler, _, init), res in zip(arms, results):
        summary["arms"][label] = {
            "acceptance_rate": res["acceptance_rate"],
            "fraction_upper_basin": res["upper_basin"],
            "max_state": res["max_state"],
            "init": init,
        }
        rows.append(
            {
                "arm": label,
                "acceptance_rate": res["acceptance_rate"],
                "fraction_upper_basin": res["upper_basin"],
                "max_state": res["max_state"],
            }
        )
        if "trace" in res:
            emit_csv(res["trace"], os.path.join(_arm_dir(out_dir, label), "trace_0.csv"))
    _emit_chain_rows(
        os.path.join(out_dir, "chains.csv"),
        rows,
        ["arm", "acceptance_rate", "fraction_upper_basin", "max_state"],
    )
    arms_out = summary["arms"]
    checks = [
        _check("rdmh_acceptance", abs(arms_out["rdmh"]["acceptance_rate"] - 0.302) <= 0.03,
               arms_out["rdmh"]["acceptance_rate"], "0.302 +- 0.03"),
        _check("rdmh_upper_basin_fraction",
               abs(arms_out["rdmh"]["fraction_upper_basin"] - 0.5) <= 0.05,
               arms_out["rdmh"]["fraction_upper_basin"], "0.5 +- 0.05"),
        _check("rwmh_tau2_trapped", arms_out["rwmh_tau2_from0"]["max_state"] < 5.0,
               arms_out["rwmh_tau2_from0"]["max_state"], "max state < 5"),
        _check("rwmh_tau5_acceptance",
               abs(arms_out["rwmh_tau5_from10"]["acceptance_rate"] - 0.143) <= 0.03,
               arms_out["rwmh_tau5_from10"]["acceptance_rate"], "0.143 +- 0.03"),
        _check("rwmh_tau5_both_basins",
               0.0 < arms_out["rwmh_tau5_from10"]["fraction_upper_basin"] < 1.0,
               arms_out["rwmh_tau5_from10"]["fraction_upper_basin"], "fraction in (0, 1)"),
    ]
    return summary, checks


def _run_needle(config, out_dir):
    opts = config.options
    reps = config.scaled(opts["n_chains"])
    workers = config.workers()
    summary = {"proposals": [], "replications": reps}
    checks = []
    for p_idx, (label, proposal, ref_phat, ref_acc) in enumerate(_NEEDLE_ROWS):
        tasks = [
            {
                "target": "needle",
                "sampler": {"sampler": "rdmh"},
                "proposal": proposal.as_spec(),
                "n_iter": opts["n_iter"],
                "burn_in": opts["burn_in"],
                "thin": opts["thin"],
                "init": opts["init"],
                "seed": config.seed,
                "stream_index": p_idx * 100_000 + rep,
                "measures": ("phat",),
                "keep_states": rep < opts["traces_per_arm"],
            }
            for rep in range(reps)
        ]
        results = _map_tasks(tasks, workers)
        phat = np.array([r["phat"] for r in results])
        acc = np.array([r["acceptance_rate"] for r in results])
        row = {
            "label": label,
            "proposal": proposal.as_spec(),
            "mean_phat": float(phat.mean()),
            "sd_phat": float(phat.std(ddof=1)) if reps > 1 else 0.0,
            "mse_phat": float(((phat - 0.5) ** 2).mean()),
            "avg_acceptance": float(acc.mean()),
            "reference_phat": ref_phat,
            "reference_acceptance": ref_acc,
        }
        summary["proposals"].append(row)
        arm = _arm_dir(out_dir, label)
        _emit_chain_rows(
            os.path.join(arm, "chains.csv"),
            [
                {"chain": r["stream_index"], "acceptance_rate": r["acceptance_rate"], "phat": r["phat"]}
                for r in results
            ],
            ["chain", "acceptance_rate", "phat"],
        )
        for r in results:
            if "trace" in r:
                emit_csv(r["trace"], os.path.join(arm, f"trace_{r['stream_index'] % 100_000}.csv"))
        checks.append(
            _check(f"phat[{label}]", abs(row["mean_phat"] - ref_phat) <= 0.06,
                   row["mean_phat"], f"{ref_phat} +- 0.06")
        )
        checks.append(
            _check(f"acceptance[{label}]", abs(row["avg_acceptance"] - ref_acc) <= 0.06,
                   row["avg_acceptance"], f"{ref_acc} +- 0.06")
        )
    return summary, checks


def _run_thicktail(config, out_dir):
    opts = config.options
    workers = config.workers()
    n_chains = config.scaled(opts["n_chains"])
    ks_chains = config.scaled(opts["ks_chains"])
    summary = {"means_study": {}, "ks_study": {}, "n_chains": n_chains, "ks_chains": ks_chains}
    for s_idx, label in enumerate(opts["samplers"]):
        sampler = _SAMPLER_ARMS[label]
        proposal = uniform_y().as_spec() if sampler["sampler"] == "rdmh" else None
        tasks = [
            {
                "target": "thicktail",
                "sampler": sampler,
                "proposal": proposal,
                "n_iter": opts["n_iter"],
                "burn_in": opts["burn_in"],
                "thin": opts["thin"],
                "init": opts["init"],
                "seed": config.seed,
                "stream_index": s_idx * 100_000 + chain,
                "measures": ("mean",),
                "keep_states": chain < opts["traces_per_arm"],
            }
            for chain in range(n_chains)
        ]
        results = _map_tasks(tasks, workers)
        means = np.array([r["mean"] for r in results])
        acc = np.array([r["acceptance_rate"] for r in results])
        entry = {
            "avg_acceptance": float(acc.mean()),
            "se_of_means": float(means.std(ddof=1)) if n_chains > 1 else 0.0,
            "normality": normality_tests(means) if n_chains >= 8 else None,
        }
        summary["means_study"][label] = entry
        arm = _arm_dir(out_dir, label)
        _emit_chain_rows(
            os.path.join(arm, "chains.csv"),
            [
                {"chain": r["stream_index"] % 100_000, "acceptance_rate": r["acceptance_rate"], "mean": r["mean"]}
                for r in results
            ],
            ["chain", "acceptance_rate", "mean"],
        )
        for r in results:
            if "trace" in r:
                emit_csv(r["trace"], os.path.join(arm, f"trace_{r['stream_index'] % 100_000}.csv"))

        ks_tasks = [
            {
                "target": "thicktail",
                "sampler": sampler,
                "proposal": proposal,
                "n_iter": opts["ks_len"] * opts["ks_thin"],
                "burn_in": 0,
                "thin": opts["ks_thin"],
                "init": opts["ks_init"],
                "seed": config.seed,
                "stream_index": 5_000_000 + s_idx * 100_000 + chain,
                "measures": ("ks",),
            }
            for chain in range(ks_chains)
        ]
        ks_results = _map_tasks(ks_tasks, workers)
        ks_vals = np.array([r["ks"] for r in ks_results])
        ks_p = np.array([r["ks_pvalue"] for r in ks_results])
        summary["ks_study"][label] = {
            "mean_ks": float(ks_vals.mean()),
            "mean_pvalue": float(ks_p.mean()),
        }
        _emit_chain_rows(
            os.path.join(arm, "ks_chains.csv"),
            [
                {"chain": r["stream_index"] % 100_000, "ks": r["ks"], "ks_pvalue": r["ks_pvalue"]}
                for r in ks_results
            ],
            ["chain", "ks", "ks_pvalue"],
        )

    checks = []
    ms, ks = summary["means_study"], summary["ks_study"]
    if "rdmh" in ms:
        checks.append(_check("rdmh_acceptance", abs(ms["rdmh"]["avg_acceptance"] - 0.664) <= 0.03,
                             ms["rdmh"]["avg_acceptance"], "0.664 +- 0.03"))
        if ms["rdmh"]["normality"]:
            pvals = {k: ms["rdmh"]["normality"][k] for k in ("ad_p", "cvm_p", "lillie_p")}
            checks.append(_check("rdmh_means_normal", all(p > 0.05 for p in pvals.values()),
                                 pvals, "all of ad_p, cvm_p, lillie_p > 0.05"))
        checks.append(_check("rdmh_mean_ks_band", 0.012 <= ks["rdmh"]["mean_ks"] <= 0.032,
                             ks["rdmh"]["mean_ks"], "within [0.012, 0.032]"))
    if "lmh-2" in ms and ms["lmh-2"]["normality"]:
        pvals = {k: ms["lmh-2"]["normality"][k] for k in ("ad_p", "cvm_p", "lillie_p")}
        checks.append(_check("lmh2_means_not_normal", all(p < 0.01 for p in pvals.values()),
                             pvals, "all of ad_p, cvm_p, lillie_p < 0.01"))
    if all(k in ks for k in ("rdmh", "rwmh-normal", "lmh-2")):
        order = (ks["rdmh"]["mean_ks"], ks["rwmh-normal"]["mean_ks"], ks["lmh-2"]["mean_ks"])
        checks.append(_check("ks_ordering", order[0] < order[1] < order[2],
                             list(order), "rdmh < rwmh-normal < lmh-2"))
    return summary, checks


def _run_shareprice(config, out_dir):
    opts = config.options
    data_path = opts.get("data_path")
    truth = None
    if data_path:
        try:
            data = sp.load_prices(data_path)
        except FileNotFoundError as exc:
            raise ConfigError(f"price file not found: {data_path}") from exc
        source = "file"
    elif opts.get("allow_synthetic"):
        truth = opts["synthetic_truth"]
        data = sp.synthetic_price_series(
            truth["beta"], truth["sigma"], truth["nu"], truth["gamma"],
            n=opts["synthetic_n"], seed=config.seed, stream_index=1_000_000,
        )
        source = "synthetic"
    else:
        raise ConfigError(
            "shareprice needs a price CSV (data_path); pass allow_synthetic to "
            "fall back to model-generated data"
        )
    chain_config = ChainConfig(
        n_iter=opts["n_iter"],
        burn_in=opts["burn_in"],
        thin=opts["thin"],
        init=sp.default_init(data),
        seed=config.seed,
        stream_index=0,
    )
    result = sp.run_shareprice_analysis(data, chain_config)
    summary = {
        "posterior": result.summaries,
        "data_source": source,
        "n_returns": int(data.n),
        "acceptance_rate": result.trace.acceptance_rate,
    }
    arm = _arm_dir(out_dir, "shareprice")
    if opts["traces_per_arm"] > 0:
        emit_csv(result.trace, os.path.join(arm, "trace_0.csv"), columns=list(sp.PARAM_NAMES))
    post = result.summaries
    checks = []
    if source == "synthetic":
        summary["synthetic_truth"] = truth
        err = abs(post["beta"]["mean"] - truth["beta"])
        checks.append(_check("synthetic_beta_recovery", err <= 3.0 * post["beta"]["sd"],
                             {"error": err, "posterior_sd": post["beta"]["sd"]},
                             "|mean(beta) - beta*| <= 3 posterior sd"))
    else:
        reference = {
            "beta": (0.0066, 0.0029),
            "sigma": (0.0091, 0.0018),
            "nu": (8.0119, 7.0520),
            "gamma": (0.6745, 0.1408),
        }
        for name, (ref_mean, ref_sd) in reference.items():
            err = abs(post[name]["mean"] - ref_mean)
            checks.append(_check(f"posterior_{name}", err <= 3.0 * ref_sd,
                                 post[name]["mean"], f"{ref_mean} +- {3.0 * ref_sd:.4g}"))
    return summary, checks


def _run_kernel_check(config, out_dir):
    opts = config.options
    target = thick_tailed()
    proposal = uniform_y()
    rng = RngStream(config.seed, 0)

    # detailed balance of the continuous kernel part
    n_pairs = opts["n_pairs"]
    max_rel = 0.0
    g = rng.generator
    for _ in range(n_pairs):
        x = 2.0 * g.standard_cauchy()
        y = 2.0 * g.standard_cauchy()
        if x == 0.0 or y == 0.0 or abs(x) == abs(y):
            continue
        if abs(y) < abs(x):
            eps_xy, dir_xy = y / x, INNER
            eps_yx, dir_yx = y / x, OUTER
        else:
            eps_xy, dir_xy = x / y, OUTER
            eps_yx, dir_yx = x / y, INNER
        lhs = (
            math.exp(target.log_density(x))
            * proposal_kernel_density(x, y, proposal)
            * math.exp(rdmh_accept_log(x, y, eps_xy, dir_xy, target))
        )
        rhs = (
            math.exp(target.log_density(y))
            * proposal_kernel_density(y, x, proposal)
            * math.exp(rdmh_accept_log(y, x, eps_yx, dir_yx, target))
        )
        denom = max(lhs, rhs)
        if denom > 0.0:
            max_rel = max(max_rel, abs(lhs - rhs) / denom)

    # rejection probability limits
    n_mc = opts["n_mc"]
    rho = {
        "1e4": rejection_prob_estimate(1e4, target, proposal, n_mc, RngStream(config.seed, 1)),
        "-1e4": rejection_prob_estimate(-1e4, target, proposal, n_mc, RngStream(config.seed, 2)),
        "1e-4": rejection_prob_estimate(1e-4, target, proposal, n_mc, RngStream(config.seed, 3)),
        "-1e-4": rejection_prob_estimate(-1e-4, target, proposal, n_mc, RngStream(config.seed, 4)),
    }

    # kernel density normalization in y for fixed x
    integrals = {}
    for x in (0.1, 1.0, 10.0):
        ax = abs(x)
        inner = quad(lambda y: proposal_kernel_density(x, y, proposal), -ax, ax, points=[0.0], limit=200)[0]
        outer = (
            quad(lambda y: proposal_kernel_density(x, y, proposal), ax, np.inf, limit=200)[0]
            + quad(lambda y: proposal_kernel_density(x, y, proposal), -np.inf, -ax, limit=200)[0]
        )
        integrals[str(x)] = inner + outer

    # elementary inequalities behind the drift bound
    n_lemma = opts["n_lemma"]
    g2 = RngStream(config.seed, 5).generator
    s = g2.random(n_lemma)
    eps = g2.random(n_lemma) * 2.0 - 1.0
    eps = np.where(eps == 0.0, 0.5, eps)
    a_eps = np.abs(eps)
    phi_max = float((a_eps**s + a_eps ** (1.0 - s) - a_eps).max())
    psi_max = {}
    for p in (2.0, 4.0, 10.0):
        sp_ = g2.random(n_lemma) * (0.5 - 0.5 / p)
        psi = a_eps**(p * sp_) + a_eps ** (p - p * sp_ - 1.0) - a_eps ** (p - 1.0)
        psi_max[str(int(p))] = float(psi.max())

    summary = {
        "detailed_balance_max_rel_err": max_rel,
        "rejection_prob": rho,
        "kernel_integrals": integrals,
        "phi_max": phi_max,
        "psi_max": psi_max,
    }
    checks = [
        _check("detailed_balance", max_rel < 1e-12, max_rel, "max relative error < 1e-12"),
        _check("rho_at_large_x",
               abs(rho["1e4"] - 0.375) <= 0.01 and abs(rho["-1e4"] - 0.375) <= 0.01,
               {"1e4": rho["1e4"], "-1e4": rho["-1e4"]}, "3/8 +- 0.01"),
        _check("rho_at_small_x",
               abs(rho["1e-4"] - 0.25) <= 0.01 and abs(rho["-1e-4"] - 0.25) <= 0.01,
               {"1e-4": rho["1e-4"], "-1e-4": rho["-1e-4"]}, "1/4 +- 0.01"),
        _check("kernel_normalization",
               all(abs(v - 1.0) <= 1e-6 for v in integrals.values()),
               integrals, "each integral within 1e-6 of 1"),
        _check("phi_inequality", phi_max < 1.0, phi_max, "sup phi(s, eps) < 1"),
        _check("psi_inequality", all(v < 1.0 for v in psi_max.values()), psi_max,
               "sup psi_p(s, eps) < 1 for p in {2, 4, 10}"),
    ]
    return summary, checks


_RUNNERS = {
    "bimodal": _run_bimodal,
    "needle": _run_needle,
    "thicktail": _run_thicktail,
    "shareprice": _run_shareprice,
    "kernel-check": _run_kernel_check,
}


def run_experiment(config):
    """Execute one experiment and persist its artifacts to ``output_dir``.

    Returns the :class:`ExperimentResult`; ``summary.json``, ``manifest.json``
    and the per-arm CSV files are written as side effects.
    """
    if isinstance(config, dict):
        overrides = dict(config)
        experiment = overrides.pop("experiment", None)
        if experiment is None:
            raise ConfigError("config dictionary needs an 'experiment' key")
        config = ExperimentConfig.build(experiment, {**overrides, "experiment": experiment})
    out_dir = config.output_dir
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc}") from exc
    started = time.perf_counter()
    summary, checks = _RUNNERS[config.experiment](config, out_dir)
    wall = time.perf_counter() - started
    result = ExperimentResult(
        experiment=config.experiment,
        config=config.echo(),
        summary=summary,
        checks=checks,
        wall_clock_s=wall,
    )
    _write_manifest(config, out_dir)
    emit_summary(result, os.path.join(out_dir, "summary.json"))
    return result
