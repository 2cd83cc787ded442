"""Config-driven Monte Carlo studies and the analysis/prediction workflows.

A study is a grid over vertex counts and correlation levels for one model;
each grid cell runs an independent batch of replicates.  Replicate ``r`` of a
cell uses seed ``cell_base + r`` where ``cell_base`` is derived from the base
seed and the cell index, so results are reproducible and independent of
execution order.  Result tables contain no timing data and rerun
byte-identically; wallclock goes into the run manifest instead.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from . import __version__
from .estimate import (
    apply_mask,
    block_mean_R,
    estimate_R,
    holdout_mask,
    naive_block_pearson,
    predict_links,
)
from .graphs import (
    GraphCorrError,
    GraphPair,
    complement,
    read_edge_list,
    union_indicator,
    write_edge_list,
)
from .hyptest import (
    TestReport,
    bootstrap_test_diff,
    bootstrap_test_same,
    lambda1_test,
    sbm_chi2_test,
)
from .samplers import (
    GraphonSpec,
    SbmSpec,
    pair_to_clique_instance,
    planted_clique_to_pair,
    sample_graphon_pair,
    sample_pair,
    sample_planted_clique,
    sample_sbm_pair,
)
from .spectral import UsvtConfig, usvt
from .statdist import sbm_theoretical_power

MODELS = (
    "CosineGraphon",
    "GaussianGraphon",
    "DiffMarginalGraphon",
    "CorrelatedSbm",
    "PlantedClique",
    "Lambda1ER",
)

# per-model truncation defaults; the absolute-cosine kernel needs its first
# harmonic pair kept, while the distinct-marginal statistic is sharpest on the
# mean level alone (rank 1)
_MODEL_USVT = {
    "CosineGraphon": UsvtConfig(rank=4),
    "GaussianGraphon": UsvtConfig(),
    "DiffMarginalGraphon": UsvtConfig(rank=1),
    "PlantedClique": UsvtConfig(),
    "Lambda1ER": UsvtConfig(),
    "CorrelatedSbm": UsvtConfig(),
}


def derive_seed(*parts: int) -> int:
    """Deterministically mix integer parts into a fresh 63-bit seed."""
    ss = np.random.SeedSequence([int(p) & 0x7FFFFFFFFFFFFFFF for p in parts])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one Monte Carlo study."""

    model: str
    n_values: tuple = (200,)
    r_values: tuple = (0.0,)
    K: int = 2
    mc_replicates: int = 100
    bootstrap_m: int = 99
    alpha: float = 0.05
    base_seed: int = 0
    usvt: UsvtConfig | None = None
    er_p: float = 0.5
    out: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise GraphCorrError(f"unknown model {self.model!r}; choose from {MODELS}")
        if not self.n_values or not self.r_values:
            raise GraphCorrError("n and r grids must be nonempty")
        if self.mc_replicates < 1:
            raise GraphCorrError("mc_replicates must be at least 1")
        if self.bootstrap_m < 1:
            raise GraphCorrError("bootstrap_m must be at least 1")
        if not (0.0 < self.alpha < 1.0):
            raise GraphCorrError("alpha must lie in (0, 1)")
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "r_values", tuple(float(r) for r in self.r_values))

    @property
    def usvt_config(self) -> UsvtConfig:
        return self.usvt if self.usvt is not None else _MODEL_USVT[self.model]


def sbm_design(K: int, r: float, n: int, tau=None) -> SbmSpec:
    """Banded blockmodel design with decaying cross-block probabilities.

    Block (k, l) gets marginals ``0.45 - |k-l|/(2K)`` and ``0.4 - |k-l|/(2K+2)``
    and correlation ``r (1 - |k-l|/K)``; memberships are uniform unless given.
    """
    d = np.abs(np.subtract.outer(np.arange(K), np.arange(K))).astype(np.float64)
    theta_p = 0.45 - d / (2 * K)
    theta_q = 0.4 - d / (2 * K + 2)
    theta_r = r * (1.0 - d / K)
    if tau is not None:
        return SbmSpec(K, theta_p, theta_q, theta_r, tau=tau)
    return SbmSpec(K, theta_p, theta_q, theta_r, n=n)


def two_group_corr_matrix(n: int, r: float, seed: int) -> np.ndarray:
    """Correlation r between pairs in the same half of a random balanced split."""
    if n % 2:
        raise GraphCorrError("the two-group design needs an even vertex count")
    rng = np.random.default_rng(seed)
    sign = np.repeat([1.0, -1.0], n // 2)
    rng.shuffle(sign)
    R = np.where(np.equal.outer(sign, sign), float(r), 0.0)
    np.fill_diagonal(R, 0.0)
    return R


def _run_replicate(config: ExperimentConfig, n: int, r: float, seed: int) -> TestReport:
    cfg = config.usvt_config
    m = config.bootstrap_m
    alpha = config.alpha
    sample_seed = derive_seed(seed, 0)
    test_seed = derive_seed(seed, 1)
    model = config.model
    if model == "CosineGraphon":
        pair = sample_graphon_pair(GraphonSpec(n, link="cosine", g=r), sample_seed)
        return bootstrap_test_same(pair, cfg, m, alpha, test_seed)
    if model == "GaussianGraphon":
        pair = sample_graphon_pair(GraphonSpec(n, link="gaussian", g=r), sample_seed)
        return bootstrap_test_same(pair, cfg, m, alpha, test_seed)
    if model == "DiffMarginalGraphon":
        spec = GraphonSpec(
            n,
            link="cosine",
            q_link="cosine",
            q_rho=0.5,
            g=r,
            clamp_correlation=True,
        )
        pair = sample_graphon_pair(spec, sample_seed)
        return bootstrap_test_diff(pair, cfg, m, test_seed, alpha=alpha)
    if model == "CorrelatedSbm":
        pair = sample_sbm_pair(sbm_design(config.K, r, n), sample_seed)
        return sbm_chi2_test(pair, config.K, alpha, test_seed)
    if model == "PlantedClique":
        s0 = int(round(r * n))
        instance, _ = sample_planted_clique(n, 0.5, s0, sample_seed)
        pair = planted_clique_to_pair(instance, derive_seed(seed, 2))
        return bootstrap_test_same(pair, cfg, m, alpha, test_seed)
    if model == "Lambda1ER":
        R = two_group_corr_matrix(n, r, sample_seed)
        p = np.full((n, n), config.er_p)
        np.fill_diagonal(p, 0.0)
        pair = sample_pair(p, None, R, derive_seed(seed, 2))
        return lambda1_test(pair, alpha, m, test_seed)
    raise GraphCorrError(f"unknown model {model!r}")


def run_experiment(config: ExperimentConfig):
    """Run every grid cell and return (rows, manifest).

    Each row maps column names to values: model, n, r, K, rejection_rate and
    theoretical_power (blockmodel cells only; blank otherwise).  Cell failures
    are recorded in the manifest and leave a blank rejection rate; the run
    continues.  When ``config.out`` is set the table and manifest are written
    to ``<out>`` and ``<out>.manifest.json``.
    """
    rows = []
    errors = []
    cell_seconds = []
    t_start = time.perf_counter()
    cell_idx = 0
    for n in config.n_values:
        for r in config.r_values:
            t_cell = time.perf_counter()
            cell_base = derive_seed(config.base_seed, cell_idx)
            row = {
                "model": config.model,
                "n": n,
                "r": r,
                "K": config.K if config.model == "CorrelatedSbm" else "",
                "rejection_rate": "",
                "theoretical_power": "",
            }
            try:
                rejects = [
                    _run_replicate(config, n, r, cell_base + rep)
                    for rep in range(config.mc_replicates)
                ]
                row["rejection_rate"] = float(np.mean([rep.reject for rep in rejects]))
                if config.model == "CorrelatedSbm":
                    row["theoretical_power"] = sbm_theoretical_power(
                        config.K, n, r, config.alpha
                    )
            except GraphCorrError as exc:
                errors.append({"n": n, "r": r, "error": str(exc)})
            rows.append(row)
            cell_seconds.append(time.perf_counter() - t_cell)
            cell_idx += 1
    manifest = {
        "version": __version__,
        "config": config_to_dict(config),
        "errors": errors,
        "cell_wallclock_s": [round(s, 3) for s in cell_seconds],
        "total_wallclock_s": round(time.perf_counter() - t_start, 3),
    }
    if config.out:
        write_result_table(rows, config.out)
        with open(str(config.out) + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return rows, manifest


_COLUMNS = ("model", "n", "r", "K", "rejection_rate", "theoretical_power")


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def write_result_table(rows, path) -> None:
    """Write experiment rows as deterministic CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in _COLUMNS) + "\n")


def config_to_dict(config: ExperimentConfig) -> dict:
    d = {
        "model": config.model,
        "n": list(config.n_values),
        "r": list(config.r_values),
        "K": config.K,
        "mc_replicates": config.mc_replicates,
        "bootstrap_m": config.bootstrap_m,
        "alpha": config.alpha,
        "base_seed": config.base_seed,
        "er_p": config.er_p,
        "out": config.out,
    }
    cfg = config.usvt_config
    d["usvt"] = (
        {"rank": cfg.rank, "clip": cfg.clip}
        if cfg.rank is not None
        else {"c0": cfg.c0, "clip": cfg.clip}
    )
    return d


def load_config(path) -> ExperimentConfig:
    """Read an experiment description from a YAML file.

    Recognized keys: ``model``, ``n`` (scalar or list), ``r`` (scalar or
    list), ``K``, ``mc_replicates``, ``bootstrap_m``, ``alpha``,
    ``base_seed``, ``er_p``, ``out`` and a nested ``usvt`` mapping with
    either ``rank`` or ``c0`` plus optional ``clip``.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise GraphCorrError(f"{path}: config must be a mapping")
    known = {
        "model",
        "n",
        "r",
        "K",
        "mc_replicates",
        "bootstrap_m",
        "alpha",
        "base_seed",
        "er_p",
        "usvt",
        "out",
    }
    unknown = set(raw) - known
    if unknown:
        raise GraphCorrError(f"{path}: unknown config keys {sorted(unknown)}")
    kwargs = {}
    if "model" not in raw:
        raise GraphCorrError(f"{path}: config must name a model")
    kwargs["model"] = str(raw["model"])
    if "n" in raw:
        v = raw["n"]
        kwargs["n_values"] = tuple(v) if isinstance(v, (list, tuple)) else (int(v),)
    if "r" in raw:
        v = raw["r"]
        kwargs["r_values"] = tuple(v) if isinstance(v, (list, tuple)) else (float(v),)
    for key, name in (
        ("K", "K"),
        ("mc_replicates", "mc_replicates"),
        ("bootstrap_m", "bootstrap_m"),
        ("base_seed", "base_seed"),
    ):
        if key in raw:
            kwargs[name] = int(raw[key])
    if "alpha" in raw:
        kwargs["alpha"] = float(raw["alpha"])
    if "er_p" in raw:
        kwargs["er_p"] = float(raw["er_p"])
    if "out" in raw and raw["out"] is not None:
        kwargs["out"] = str(raw["out"])
    if "usvt" in raw and raw["usvt"] is not None:
        u = raw["usvt"]
        if not isinstance(u, dict):
            raise GraphCorrError(f"{path}: usvt must be a mapping")
        clip = bool(u.get("clip", True))
        if "rank" in u and u["rank"] is not None:
            kwargs["usvt"] = UsvtConfig(rank=int(u["rank"]), clip=clip)
        else:
            kwargs["usvt"] = UsvtConfig(c0=float(u.get("c0", 4.01)), clip=clip)
    return ExperimentConfig(**kwargs)


def override_config(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Copy a config with non-None overrides applied (CLI flags win)."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(config, **updates) if updates else config


# --- analysis of user-supplied graph pairs ---------------------------------

_ANALYZE_TESTS = ("diff", "same", "sbm", "lambda1")


@dataclass(frozen=True)
class AnalysisResult:
    report: TestReport
    labels: np.ndarray | None = None
    block_mean_r: np.ndarray | None = None
    block_pearson: np.ndarray | None = None
    label_names: tuple = field(default=())


def read_labels(path, n: int):
    """One label per vertex per line; returns (1..K codes, sorted names)."""
    with open(path, "r", encoding="utf-8") as fh:
        names = [line.strip() for line in fh if line.strip()]
    if len(names) != n:
        raise GraphCorrError(f"{path}: got {len(names)} labels for {n} vertices")
    uniq = sorted(set(names))
    index = {name: k + 1 for k, name in enumerate(uniq)}
    return np.array([index[v] for v in names], dtype=np.int64), tuple(uniq)


def analyze_pair(
    a: np.ndarray,
    b: np.ndarray,
    test: str = "diff",
    cfg: UsvtConfig = UsvtConfig(),
    m: int = 99,
    alpha: float = 0.05,
    seed: int = 0,
    K: int = 2,
    labels: np.ndarray | None = None,
    label_names: tuple = (),
    use_complement: bool = False,
) -> AnalysisResult:
    """Test a user-supplied pair for edge correlation and summarize estimates.

    With vertex labels, the estimated pairwise correlations are averaged per
    block pair and a plain per-block Pearson table is added for comparison
    (blank where undefined).  ``use_complement`` flips both graphs first,
    which is the better-conditioned form for very sparse graphs.
    """
    if test not in _ANALYZE_TESTS:
        raise GraphCorrError(f"unknown test {test!r}; choose from {_ANALYZE_TESTS}")
    if use_complement:
        a, b = complement(a), complement(b)
    pair = GraphPair(a, b)
    if test == "diff":
        report = bootstrap_test_diff(pair, cfg, m, seed, alpha=alpha)
    elif test == "same":
        report = bootstrap_test_same(pair, cfg, m, alpha, seed)
    elif test == "sbm":
        report = sbm_chi2_test(pair, K, alpha, seed)
    else:
        report = lambda1_test(pair, alpha, m, seed)
    if labels is None:
        return AnalysisResult(report)
    k = int(labels.max())
    r_hat = estimate_R(
        usvt(pair.a, cfg), usvt(pair.b, cfg), usvt(union_indicator(pair.a, pair.b), cfg)
    )
    return AnalysisResult(
        report=report,
        labels=labels,
        block_mean_r=block_mean_R(r_hat, labels, k),
        block_pearson=naive_block_pearson(pair, labels, k),
        label_names=label_names,
    )


def write_block_table(matrix: np.ndarray, names, path) -> None:
    """Write a labelled K-by-K block summary as CSV with NA for missing cells."""
    K = matrix.shape[0]
    names = list(names) if names else [str(k + 1) for k in range(K)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("," + ",".join(names) + "\n")
        for k in range(K):
            cells = [
                "NA" if np.isnan(matrix[k, l]) else format(matrix[k, l], ".6g")
                for l in range(K)
            ]
            fh.write(names[k] + "," + ",".join(cells) + "\n")


# --- hold-out link prediction ----------------------------------------------


def predict_auc(
    a: np.ndarray,
    b: np.ndarray | None,
    fraction: float = 0.1,
    repeats: int = 100,
    cfg: UsvtConfig = UsvtConfig(),
    base_seed: int = 0,
    exact_conditional: bool = False,
):
    """Repeat the hold-out experiment and summarize AUCs for both score modes.

    Each repeat masks a fresh uniformly random pair subset (seed
    ``base_seed + t``), scores the held-out entries of ``a`` from the masked
    graph alone and, when ``b`` is given, jointly with the auxiliary graph.
    Returns a summary dict plus the first repeat's ROC curves.
    """
    if repeats < 1:
        raise GraphCorrError("repeats must be at least 1")
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    single_aucs = []
    joint_aucs = []
    first_rocs = {}
    for t in range(repeats):
        mask = holdout_mask(n, fraction, base_seed + t)
        masked_a = apply_mask(a, mask)
        scores, roc = predict_links(masked_a, None, mask, a, cfg)
        single_aucs.append(roc.auc)
        if t == 0:
            first_rocs["single"] = roc
        if b is not None:
            scores, roc = predict_links(
                masked_a, b, mask, a, cfg, exact_conditional=exact_conditional
            )
            joint_aucs.append(roc.auc)
            if t == 0:
                first_rocs["joint"] = roc
    def _summary(values):
        arr = np.asarray(values)
        stderr = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
        return {"mean_auc": float(arr.mean()), "stderr": stderr, "aucs": arr.tolist()}

    summary = {"fraction": fraction, "repeats": repeats, "single": _summary(single_aucs)}
    if b is not None:
        summary["joint"] = _summary(joint_aucs)
    return summary, first_rocs


# --- planted-clique reduction ----------------------------------------------


def reduce_clique(n: int, p: float, s0: int, seed: int, out_dir) -> dict:
    """Sample a planted-clique instance, map it to a graph pair, and verify.

    Writes the pair and the recovered instance as edge lists plus the planted
    vertex set, checks the round trip reproduces the instance bit for bit,
    and reports the implied correlation norm (equal to the clique size).
    """
    import os

    instance, clique = sample_planted_clique(n, p, s0, seed)
    pair = planted_clique_to_pair(instance, derive_seed(seed, 1))
    recovered = pair_to_clique_instance(pair)
    if not np.array_equal(recovered, instance):
        raise GraphCorrError("round trip failed to reproduce the instance")
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "a": os.path.join(out_dir, "pair_a.edges"),
        "b": os.path.join(out_dir, "pair_b.edges"),
        "instance": os.path.join(out_dir, "instance_recovered.edges"),
        "clique": os.path.join(out_dir, "clique_vertices.txt"),
    }
    write_edge_list(pair.a, paths["a"])
    write_edge_list(pair.b, paths["b"])
    write_edge_list(recovered, paths["instance"])
    with open(paths["clique"], "w", encoding="utf-8") as fh:
        for v in clique.tolist():
            fh.write(f"{v}\n")
    return {
        "paths": paths,
        "clique_size": int(s0),
        "correlation_frobenius_norm": float(s0),
        "round_trip_exact": True,
    }
