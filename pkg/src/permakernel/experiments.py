"""Experiment drivers: seeded, reproducible runs writing CSV/JSON reports and figures."""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path

import numpy as np
import scipy.linalg
from joblib import Parallel, delayed

from . import plotting
from .antisym import AntisymKernel
from .datasets import (
    isomorphic_copy,
    load_molecule_corpus,
    random_connected_graph,
    synthetic_molecule_corpus,
)
from .graphs import GraphKernel
from .kernels import gaussian, kernel_from_config
from .learn import DEFAULT_RIDGE, augment_antisymmetric, gram, kpca, krr_fit, krr_predict, mercer_features
from .schrodinger import (
    ProblemSpec,
    box_analytic_eigenvalue,
    eval_eigenfunction,
    solve_box_problem,
)
from .sym import QuotientGaussianKernel, SymKernel

SCHEMA_VERSION = 1
DEFAULT_SIGMAS = (0.25, 0.26, 0.27, 0.28, 2.5, 2.6, 2.7, 2.8)


def build_kernel(cfg: dict):
    """Build a kernel evaluator from its JSON config.

    Base kernels use {family, sigma | c, p, dy}; the flags ``antisymmetrize``
    and ``symmetrize`` wrap them (with an optional ``strategy``), and
    {sigma1, sigma2} selects the determinant-quotient kernel.
    """
    if cfg.get("family") == "quotient" or ("sigma1" in cfg and "sigma2" in cfg):
        return QuotientGaussianKernel(float(cfg["sigma1"]), float(cfg["sigma2"]))
    base = kernel_from_config(cfg)
    if cfg.get("antisymmetrize"):
        return AntisymKernel(base, cfg.get("strategy", "slater_determinant"))
    if cfg.get("symmetrize"):
        return SymKernel(base, cfg.get("strategy", "permanent"))
    return base


def _n_jobs() -> int:
    raw = os.environ.get("PERMAKERNEL_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _csv_cell(value):
    # repr of a float is its shortest round-trip decimal form
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def _json_value(value):
    if isinstance(value, (np.floating, np.float64)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


def _emit_rows(out_dir: Path, stem: str, header, rows, fmt: str) -> Path:
    if fmt == "json":
        path = out_dir / f"{stem}.json"
        payload = {
            "schema_version": SCHEMA_VERSION,
            "columns": list(header),
            "rows": [[_json_value(v) if isinstance(v, np.generic) else v for v in row] for row in rows],
        }
        path.write_text(json.dumps(payload, indent=1))
        return path
    path = out_dir / f"{stem}.csv"
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])
    return path


def _write_summary(out_dir: Path, payload: dict) -> Path:
    path = out_dir / "summary.json"
    path.write_text(json.dumps(payload, indent=1, default=_json_value))
    return path


def _require_seed(config: dict) -> int:
    if "seed" not in config:
        raise ValueError("randomized experiments require an explicit seed")
    return int(config["seed"])


def box_midpoint_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Midpoints of a regular n x n box discretization of [lo, hi]^2."""
    ticks = lo + (np.arange(n) + 0.5) * (hi - lo) / n
    xx, yy = np.meshgrid(ticks, ticks, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


# ---------------------------------------------------------------------------
# regress-demo: recover an antisymmetric target with and without the
# antisymmetrized kernel, plus the data-augmentation baseline.
# ---------------------------------------------------------------------------


def _swap_target(points: np.ndarray) -> np.ndarray:
    return np.sin(np.pi * (points[:, 0] - points[:, 1]))


def _krr_rmse(kernel, x, y, grid, grid_truth, ridge) -> float:
    model = krr_fit(gram(kernel, x), y, ridge)
    prediction = krr_predict(model, grid)
    return float(np.sqrt(np.mean((prediction - grid_truth) ** 2)))


def _regress_run(seed: int, m_values, base_config, ridge: float, grid) -> list:
    rng = np.random.default_rng(seed)
    truth = _swap_target(grid)
    if isinstance(base_config, dict):
        plain = kernel_from_config(base_config)
    else:
        plain = gaussian(float(base_config))
    anti = AntisymKernel(plain)
    rows = []
    for m in m_values:
        x = rng.uniform(-1.0, 1.0, size=(m, 2))
        y = _swap_target(x)
        rmse_plain = _krr_rmse(plain, x, y, grid, truth, ridge)
        rmse_anti = _krr_rmse(anti, x, y, grid, truth, ridge)
        x_aug, y_aug = augment_antisymmetric(x, y, (0, 1))
        rmse_aug = _krr_rmse(plain, x_aug, y_aug, grid, truth, ridge)
        rows.append((m, rmse_plain, rmse_anti, rmse_aug))
    return rows


def run_regress_demo(config: dict, out_dir: Path) -> dict:
    seed = _require_seed(config)
    runs = int(config.get("runs", 200))
    if runs < 1:
        raise ValueError("repetitions must be >= 1")
    m_values = [int(m) for m in config.get("m_values", range(10, 101, 10))]
    base = config.get("kernel", {"family": "gaussian", "sigma": float(config.get("sigma", 0.5))})
    ridge = float(config.get("lambda", DEFAULT_RIDGE))
    grid = box_midpoint_grid(-1.0, 1.0, int(config.get("grid_points", 30)))
    fmt = config.get("format", "csv")

    per_run = Parallel(n_jobs=_n_jobs())(
        delayed(_regress_run)(seed + r, m_values, base, ridge, grid) for r in range(runs)
    )
    rows = [
        (run, m, rp, ra, rg)
        for run, block in enumerate(per_run)
        for (m, rp, ra, rg) in block
    ]
    runs_path = _emit_rows(
        out_dir, "runs", ("run", "m", "rmse_plain", "rmse_antisym", "rmse_augmented"), rows, fmt
    )

    table = np.array([[r[2], r[3], r[4]] for r in rows])
    ms = np.array([r[1] for r in rows])
    summary_rows = []
    series = {"plain": [], "antisym": [], "augmented 2m": []}
    for m in m_values:
        block = table[ms == m]
        means = block.mean(axis=0)
        summary_rows.append((m, *means, *np.median(block, axis=0)))
        series["plain"].append(means[0])
        series["antisym"].append(means[1])
        series["augmented 2m"].append(means[2])
    summary_path = _emit_rows(
        out_dir,
        "rmse_vs_m",
        (
            "m",
            "mean_rmse_plain",
            "mean_rmse_antisym",
            "mean_rmse_augmented",
            "median_rmse_plain",
            "median_rmse_antisym",
            "median_rmse_augmented",
        ),
        summary_rows,
        fmt,
    )
    figure_path = out_dir / "rmse_vs_m.png"
    plotting.save_rmse_curves(figure_path, m_values, series)

    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": "regress-demo",
        "config": {"seed": seed, "runs": runs, "m_values": m_values, "kernel": base, "lambda": ridge},
        "mean_rmse": {
            str(m): {
                "plain": series["plain"][i],
                "antisym": series["antisym"][i],
                "augmented": series["augmented 2m"][i],
            }
            for i, m in enumerate(m_values)
        },
        "files": [str(runs_path), str(summary_path), str(figure_path)],
    }
    _write_summary(out_dir, summary)
    return summary


# ---------------------------------------------------------------------------
# mercer: empirical eigenfunctions of the plain, antisymmetric, and symmetric
# gaussian kernels on the square, rendered as heatmap panels.
# ---------------------------------------------------------------------------


def run_mercer(config: dict, out_dir: Path) -> dict:
    seed = _require_seed(config)
    sigma = float(config.get("sigma", 0.5))
    m = int(config.get("m", 300))
    n_features = int(config.get("n_features", 2))
    n_grid = int(config.get("grid_points", 31))
    fmt = config.get("format", "csv")

    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(m, 2))
    grid = box_midpoint_grid(-1.0, 1.0, n_grid)
    swap_index = np.arange(n_grid * n_grid).reshape(n_grid, n_grid).T.ravel()

    base = gaussian(sigma)
    kernels = {
        "plain": base,
        "antisym": AntisymKernel(base),
        "sym": SymKernel(base),
    }
    panels = []
    titles = []
    defects = {}
    files = []
    for name, kernel in kernels.items():
        feats = mercer_features(kernel, points, grid, n_features)
        header = ["x1", "x2"] + [f"feature_{j + 1}" for j in range(n_features)]
        rows = [
            (*grid[g], *feats.grid_values[:, g]) for g in range(grid.shape[0])
        ]
        files.append(str(_emit_rows(out_dir, f"mercer_{name}", header, rows, fmt)))
        for j in range(n_features):
            panels.append(feats.grid_values[j].reshape(n_grid, n_grid))
            titles.append(f"{name} feature {j + 1}")
        mirrored = feats.grid_values[:, swap_index]
        if name == "antisym":
            defects[name] = float(np.abs(feats.grid_values + mirrored).max())
        elif name == "sym":
            defects[name] = float(np.abs(feats.grid_values - mirrored).max())
    figure_path = out_dir / "mercer_features.png"
    plotting.save_heatmap_panels(
        figure_path, panels, titles, extent=(-1, 1, -1, 1), ncols=n_features
    )
    files.append(str(figure_path))

    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": "mercer",
        "config": {"seed": seed, "sigma": sigma, "m": m, "n_features": n_features},
        "equivariance_defects": defects,
        "files": files,
    }
    _write_summary(out_dir, summary)
    return summary


# ---------------------------------------------------------------------------
# schrodinger-box: particles in a box with an (anti)symmetric kernel.
# ---------------------------------------------------------------------------


def _box_kernel(config: dict, dim: int):
    if "kernel" in config:
        return build_kernel(config["kernel"])
    sigma = float(config.get("sigma", 0.1))
    base = gaussian(sigma)
    return AntisymKernel(base) if dim >= 2 else base


def _analytic_levels(dim: int, n_eigs: int, hbar, mass, length) -> list[float]:
    import itertools

    combos = itertools.combinations(range(1, n_eigs + dim + 4), dim)
    energies = sorted(
        box_analytic_eigenvalue(c, hbar, mass, length, antisymmetric=True) for c in combos
    )
    return energies[:n_eigs]


def run_schrodinger_box(config: dict, out_dir: Path) -> dict:
    seed = _require_seed(config)
    dim = int(config.get("d", config.get("dim", 2)))
    hbar = float(config.get("hbar", 1.0))
    mass = float(config.get("mass", 1.0))
    length = float(config.get("L", config.get("length", math.pi)))
    m_interior = int(config.get("m_interior", 900))
    m_boundary = int(config.get("m_boundary", 124))
    n_eigs = int(config.get("n_eigs", 3))
    interaction = bool(config.get("interaction", False))
    n_grid = int(config.get("grid_points", 41))
    fmt = config.get("format", "csv")

    kernel = _box_kernel(config, dim)
    problem = ProblemSpec(
        kernel=kernel, hbar=hbar, mass=mass, length=length, dim=dim, interaction=interaction
    )
    solution = solve_box_problem(problem, m_interior, m_boundary, seed, n_eigs)

    files = []
    result = {
        "schema_version": SCHEMA_VERSION,
        "eigenvalues": [float(v) for v in solution.eigenvalues],
        "residuals": [float(r) for r in solution.residuals],
    }
    if dim == 2 and not interaction:
        antisym = isinstance(kernel, AntisymKernel)
        if antisym:
            result["analytic"] = _analytic_levels(dim, n_eigs, hbar, mass, length)
    eig_path = out_dir / "eigenvalues.json"
    eig_path.write_text(json.dumps(result, indent=1))
    files.append(str(eig_path))

    if dim == 2:
        grid = box_midpoint_grid(0.0, length, n_grid)
        panels = []
        titles = []
        for idx in range(n_eigs):
            psi = eval_eigenfunction(solution, idx, grid)
            rows = [(*grid[g], psi[g]) for g in range(grid.shape[0])]
            files.append(
                str(_emit_rows(out_dir, f"psi_{idx + 1}", ("x1", "x2", "psi"), rows, fmt))
            )
            panels.append(psi.reshape(n_grid, n_grid))
            titles.append(f"eigenfunction {idx + 1}")
        figure_path = out_dir / "eigenfunctions.png"
        plotting.save_heatmap_panels(figure_path, panels, titles, extent=(0, length, 0, length))
        files.append(str(figure_path))

    sweep = config.get("m_sweep")
    if sweep:
        sweep_seeds = int(config.get("sweep_seeds", 5))
        means, stds, rows = [], [], []
        for m in sweep:
            block = np.array(
                [
                    solve_box_problem(problem, int(m), m_boundary, seed + s, n_eigs).eigenvalues
                    for s in range(sweep_seeds)
                ]
            )
            means.append(block.mean(axis=0))
            stds.append(block.std(axis=0))
            for s in range(sweep_seeds):
                rows.append((int(m), s, *block[s]))
        header = ("m", "seed_index", *[f"eigenvalue_{i + 1}" for i in range(n_eigs)])
        files.append(str(_emit_rows(out_dir, "eigenvalues_vs_m", header, rows, fmt)))
        if "analytic" in result:
            figure = out_dir / "eigenvalues_vs_m.png"
            plotting.save_eigenvalue_convergence(
                figure, [int(m) for m in sweep], means, stds, result["analytic"]
            )
            files.append(str(figure))
        result["sweep_means"] = [list(map(float, row)) for row in means]

    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": "schrodinger-box",
        "config": {
            "seed": seed,
            "dim": dim,
            "m_interior": m_interior,
            "m_boundary": m_boundary,
            "n_eigs": n_eigs,
            "interaction": interaction,
        },
        **result,
        "files": files,
    }
    _write_summary(out_dir, summary)
    return summary


# ---------------------------------------------------------------------------
# graph-kpca: kernel PCA over random connected graphs with planted
# isomorphic twins.
# ---------------------------------------------------------------------------


def run_graph_kpca(config: dict, out_dir: Path) -> dict:
    seed = _require_seed(config)
    n_graphs = int(config.get("n_graphs", 100))
    size = int(config.get("graph_size", 5))
    sigma = float(config.get("sigma", 1.0))
    n_components = int(config.get("n_components", 2))
    fmt = config.get("format", "csv")

    rng = np.random.default_rng(seed)
    graphs = []
    groups = []
    for group in range(n_graphs // 2):
        base = random_connected_graph(size, rng)
        graphs.extend([base, isomorphic_copy(base, rng)])
        groups.extend([group, group])
    while len(graphs) < n_graphs:
        graphs.append(random_connected_graph(size, rng))
        groups.append(len(graphs))
    order = rng.permutation(len(graphs))
    graphs = [graphs[i] for i in order]
    groups = [groups[i] for i in order]

    kernel = GraphKernel(sigma, family="gaussian")
    K = gram(kernel, graphs).values
    scores = kpca(K, n_components)

    rows = [(i, groups[i], *scores[i]) for i in range(len(graphs))]
    header = ("index", "group", *[f"pc{j + 1}" for j in range(n_components)])
    scores_path = _emit_rows(out_dir, "scores", header, rows, fmt)
    figure_path = out_dir / "kpca_scores.png"
    plotting.save_score_scatter(figure_path, scores, groups)

    by_group: dict[int, list[float]] = {}
    for g, s in zip(groups, scores[:, 0]):
        by_group.setdefault(g, []).append(float(s))
    twin_gap = max(
        (max(vals) - min(vals) for vals in by_group.values() if len(vals) > 1),
        default=0.0,
    )

    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": "graph-kpca",
        "config": {"seed": seed, "n_graphs": n_graphs, "graph_size": size, "sigma": sigma},
        "max_isomorphic_pc1_gap": twin_gap,
        "files": [str(scores_path), str(figure_path)],
    }
    _write_summary(out_dir, summary)
    return summary


# ---------------------------------------------------------------------------
# boiling-points: kernel ridge regression of molecule boiling points over a
# bandwidth sweep, with a synthetic fallback corpus.
# ---------------------------------------------------------------------------


def _split_metrics(K, values, n_train, seed, ridge) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(values))
    train, test = order[:n_train], order[n_train:]
    system = K[np.ix_(train, train)] + ridge * np.eye(n_train)
    theta = scipy.linalg.solve(system, values[train], assume_a="sym")
    prediction = theta @ K[np.ix_(train, test)]
    errors = prediction - values[test]
    return float(np.mean(np.abs(errors))), float(np.sqrt(np.mean(errors**2)))


def run_boiling_points(config: dict, out_dir: Path) -> dict:
    seed = _require_seed(config)
    repetitions = int(config.get("repetitions", 100))
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    sigmas = [float(s) for s in config.get("sigmas", DEFAULT_SIGMAS)]
    ridge = float(config.get("lambda", DEFAULT_RIDGE))
    family = config.get("family", "laplacian")
    train_fraction = float(config.get("train_fraction", 0.9))
    fmt = config.get("format", "csv")

    corpus_path = config.get("corpus")
    if corpus_path:
        data = load_molecule_corpus(corpus_path)
        source = str(corpus_path)
    else:
        data = synthetic_molecule_corpus(seed=seed)
        source = "synthetic"
    graphs = [g for g, _ in data]
    values = np.array([v for _, v in data])
    n_train = int(round(train_fraction * len(graphs)))
    if not 0 < n_train < len(graphs):
        raise ValueError(f"train fraction {train_fraction} leaves no test split")

    rows = []
    per_sigma = []
    for sigma in sigmas:
        K = gram(GraphKernel(sigma, family=family), graphs).values
        metrics = Parallel(n_jobs=_n_jobs())(
            delayed(_split_metrics)(K, values, n_train, seed + r, ridge)
            for r in range(repetitions)
        )
        avg = np.array([m[0] for m in metrics])
        rmse = np.array([m[1] for m in metrics])
        rows.extend(
            (sigma, r, avg[r], rmse[r]) for r in range(repetitions)
        )
        per_sigma.append(
            {
                "sigma": sigma,
                "mean_average_error": float(avg.mean()),
                "median_average_error": float(np.median(avg)),
                "p30_average_error": float(np.percentile(avg, 30)),
                "p70_average_error": float(np.percentile(avg, 70)),
                "mean_rmse": float(rmse.mean()),
                "median_rmse": float(np.median(rmse)),
                "p30_rmse": float(np.percentile(rmse, 30)),
                "p70_rmse": float(np.percentile(rmse, 70)),
            }
        )

    runs_path = _emit_rows(
        out_dir, "runs", ("sigma", "repetition", "average_error", "rmse"), rows, fmt
    )
    summary_rows = [
        (
            s["sigma"],
            s["mean_average_error"],
            s["median_average_error"],
            s["mean_rmse"],
            s["median_rmse"],
        )
        for s in per_sigma
    ]
    table_path = _emit_rows(
        out_dir,
        "errors_vs_sigma",
        ("sigma", "mean_average_error", "median_average_error", "mean_rmse", "median_rmse"),
        summary_rows,
        fmt,
    )
    figure_path = out_dir / "errors_vs_sigma.png"
    plotting.save_error_band(
        figure_path,
        sigmas,
        {
            "average error": (
                [s["median_average_error"] for s in per_sigma],
                [s["p30_average_error"] for s in per_sigma],
                [s["p70_average_error"] for s in per_sigma],
            ),
            "RMSE": (
                [s["median_rmse"] for s in per_sigma],
                [s["p30_rmse"] for s in per_sigma],
                [s["p70_rmse"] for s in per_sigma],
            ),
        },
    )

    best = min(per_sigma, key=lambda s: s["median_average_error"])
    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": "boiling-points",
        "config": {
            "seed": seed,
            "repetitions": repetitions,
            "sigmas": sigmas,
            "lambda": ridge,
            "family": family,
            "corpus": source,
            "n_graphs": len(graphs),
        },
        "per_sigma": per_sigma,
        "best": best,
        "files": [str(runs_path), str(table_path), str(figure_path)],
    }
    _write_summary(out_dir, summary)
    return summary


_EXPERIMENTS = {
    "regress-demo": run_regress_demo,
    "mercer": run_mercer,
    "schrodinger-box": run_schrodinger_box,
    "graph-kpca": run_graph_kpca,
    "boiling-points": run_boiling_points,
}


def run_experiment(config: dict, out_dir) -> dict:
    """Dispatch a named experiment; writes its report files under out_dir."""
    name = config.get("experiment")
    if name not in _EXPERIMENTS:
        raise ValueError(
            f"unknown experiment {name!r}; expected one of {sorted(_EXPERIMENTS)}"
        )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _EXPERIMENTS[name](config, out)
