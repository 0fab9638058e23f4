"""Built-in experiment presets.

Each recipe reproduces one benchmark data set (figure or table) as CSV
rows.  A recipe is a function (spec -> header, rows, summary) where all
randomness flows from the spec seed through per-row child seeds, so
output is byte-reproducible and independent of the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import anon, backbench, money, qds, vbqc
from .noise import HardwareProfile, LossModel, MeasurementFlip

NV_FLIPS = MeasurementFlip(p1=0.05, p2=0.005)
NV_PROFILE = HardwareProfile(t1=36000.0, t2=1.0, flips=NV_FLIPS)


@dataclass(frozen=True)
class ExperimentSpec:
    """One CLI invocation: recipe, seed and optional overrides."""

    protocol: str
    recipe: str
    seed: int
    trials: Optional[int] = None
    threads: int = 1
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RecipeResult:
    header: list[str]
    rows: list[dict]
    summary: str


def _child_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _parallel(fn: Callable, items: Sequence, threads: int) -> list:
    """Order-preserving map; results identical for any thread count."""
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_fig1(spec: ExperimentSpec) -> RecipeResult:
    """Banknote verification probability c versus client wait time."""
    block = spec.trials or 10_000
    reps = int(spec.params.get("repetitions", 10))
    t_grid = [round(0.05 * k, 2) for k in range(0, 21)]
    rngs = _child_rngs(spec.seed, len(t_grid))

    def point(arg):
        wait, rng = arg
        cfg = money.BanknoteConfig(block, wait, NV_PROFILE)
        est = money.estimate_c(cfg, block, reps, rng)
        return {
            "t_seconds": wait,
            "c_mean": est.mean,
            "c_lower": est.lower,
            "c_upper": est.upper,
        }

    rows = _parallel(point, list(zip(t_grid, rngs)), spec.threads)
    crossing = next((r["t_seconds"] for r in rows if r["c_mean"] < 0.875), None)
    summary = f"fig1: c(0)={rows[0]['c_mean']:.4f}, first c<0.875 at T={crossing}"
    return RecipeResult(["c_lower", "c_mean", "c_upper", "t_seconds"], rows, summary)


def run_fig2(spec: ExperimentSpec) -> RecipeResult:
    """Security bounds versus number of qubit pairs for two wait times."""
    block = spec.trials or 10_000
    reps = int(spec.params.get("repetitions", 10))
    waits = (0.01, 0.1)
    rngs = _child_rngs(spec.seed, len(waits))
    n_grid = np.unique(np.logspace(3, 5, 25).astype(int))
    rows = []
    for wait, rng in zip(waits, rngs):
        cfg = money.BanknoteConfig(block, wait, NV_PROFILE)
        c = money.estimate_c(cfg, block, reps, rng).mean
        for n in n_grid:
            rows.append(
                {
                    "t_seconds": wait,
                    "n_pairs": int(n),
                    "c_mean": c,
                    "p_correct_bound": money.p_correct_bound(c, int(n)),
                    "p_forge_bound": money.p_forge_bound(c, int(n)),
                }
            )
    n_at_target = money.min_pairs_for_forge(rows[0]["c_mean"], 1e-7)
    summary = f"fig2: at T=0.01 s, P_forge<=1e-7 needs n>={n_at_target}"
    header = ["c_mean", "n_pairs", "p_correct_bound", "p_forge_bound", "t_seconds"]
    return RecipeResult(header, rows, summary)


def run_fig4(spec: ExperimentSpec) -> RecipeResult:
    """Average teleported fidelity for memory dephasing pairs (q1, q2)."""
    q1_grid = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3]
    offsets = [0.0, 0.1]
    jobs = [(q1, min(q1 + off, 0.45)) for q1 in q1_grid for off in offsets]

    def point(pair):
        q1, q2 = pair
        cfg = anon.AnonConfig(n_parties=4, q1=q1, q2=q2)
        return {
            "q1": q1,
            "q2": q2,
            "f_ave": anon.average_fidelity(cfg),
            "f_gamma": anon.f_gamma(q1),
        }

    rows = _parallel(point, jobs, spec.threads)
    summary = f"fig4: F_ave(q1=q2=0.2)={rows[8]['f_ave']:.4f}"
    return RecipeResult(["f_ave", "f_gamma", "q1", "q2"], rows, summary)


def run_fig5(spec: ExperimentSpec) -> RecipeResult:
    """Average teleported fidelity versus correction-gate noise."""
    q_grid = [round(0.025 * k, 3) for k in range(0, 13)]
    jobs = [(kind, q) for kind in ("dephasing", "depolarizing") for q in q_grid]

    def point(job):
        kind, q = job
        gate = anon.GateNoise(kind, q) if q > 0 else None
        cfg = anon.AnonConfig(n_parties=4, gate_noise=gate)
        return {"model": kind, "q": q, "f_ave": anon.average_fidelity(cfg)}

    rows = _parallel(point, jobs, spec.threads)
    summary = "fig5: F_ave at q=0.15 dephasing = " + format(
        next(r["f_ave"] for r in rows if r["model"] == "dephasing" and r["q"] == 0.15), ".4f"
    )
    return RecipeResult(["f_ave", "model", "q"], rows, summary)


def run_fig6(spec: ExperimentSpec) -> RecipeResult:
    """Protocol failure probability versus transmission loss in dB."""
    rows = []
    for n_parties in (4, 6, 8):
        for db in [round(0.5 * k, 1) for k in range(0, 25)]:
            cfg = anon.LossConfig(
                n_parties=n_parties,
                eta_d=0.8,
                eta_tr=10.0 ** (-db / 10.0),
                eta_bsm=0.8,
                eta0=0.8,
                sender_ratio=0.002,
                receiver_ratio=0.004,
            )
            rows.append({"loss_db": db, "n_parties": n_parties, "p_fail": anon.p_fail(cfg)})
    at10 = next(r["p_fail"] for r in rows if r["n_parties"] == 4 and r["loss_db"] == 10.0)
    summary = f"fig6: P_fail(N=4, 10 dB)={at10:.4f}"
    return RecipeResult(["loss_db", "n_parties", "p_fail"], rows, summary)


def run_fig7(spec: ExperimentSpec) -> RecipeResult:
    """Test-round failure probability versus gate depolarizing noise."""
    trials = spec.trials or 3000
    q_grid = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05]
    rngs = _child_rngs(spec.seed, len(q_grid))

    def point(arg):
        from .stats import wilson_interval

        q, rng = arg
        profile = vbqc.VbqcProfile(gate_depolarizing_q=q, flips=NV_FLIPS)
        failures = sum(
            0 if vbqc.run_test_round(profile, rng) else 1 for _ in range(trials)
        )
        w95 = wilson_interval(failures, trials, 0.95)
        w9995 = wilson_interval(failures, trials, 0.9995)
        return {
            "q": q,
            "p_fail_mean": w95.mean,
            "p_min_95": w95.lower,
            "p_max_95": w95.upper,
            "p_min_9995": w9995.lower,
            "p_max_9995": w9995.upper,
        }

    rows = _parallel(point, list(zip(q_grid, rngs)), spec.threads)
    summary = f"fig7: P_max95(q=0.05)={rows[-1]['p_max_95']:.4f}"
    header = ["p_fail_mean", "p_max_95", "p_max_9995", "p_min_95", "p_min_9995", "q"]
    return RecipeResult(header, rows, summary)


def run_table4(spec: ExperimentSpec) -> RecipeResult:
    """Minimal (T1, T2) improvements for secure storage times."""
    generations = spec.trials or 60
    baseline = backbench.Genome(t1=36000.0, t2=1.0)
    weights = backbench.CostWeights(w1=1000.0, w2=1.0)
    storages = (1.0, 2.0, 5.0)
    seeds = np.random.SeedSequence(spec.seed).spawn(len(storages))

    def point(arg):
        storage, seq = arg
        child = np.random.default_rng(seq)
        ga = backbench.GaParams(generations=generations, seed=spec.seed)
        objective = backbench.money_objective(storage, baseline, weights, NV_FLIPS)
        best, history = backbench.ga_optimize(objective, baseline, ga, child)
        return {
            "storage_seconds": storage,
            "t1_hours": best.t1 / 3600.0,
            "t2_seconds": best.t2,
            "best_cost": history[-1],
        }

    rows = _parallel(point, list(zip(storages, seeds)), spec.threads)
    summary = f"table4: storage 1 s -> T2={rows[0]['t2_seconds']:.3f} s"
    return RecipeResult(["best_cost", "storage_seconds", "t1_hours", "t2_seconds"], rows, summary)


def run_table5(spec: ExperimentSpec) -> RecipeResult:
    """Signature security levels across fibre lengths and device errors."""
    n_photons = spec.trials or 50_000
    grid = [(l, e) for e in (0.0, 0.015) for l in (5.0, 10.0, 20.0)]
    rngs = _child_rngs(spec.seed, len(grid))

    def point(arg):
        (fibre, e_d), rng = arg
        cfg = qds.QdsConfig(
            n_photons=n_photons,
            e_d=e_d,
            loss=LossModel(eta_sys=0.5, fibre_length=fibre, attenuation=0.2),
        )
        rep = qds.evaluate(cfg, rng)
        return {
            "e_d": e_d,
            "l_fib_km": fibre,
            "l_signature": rep.l,
            "p_abort": rep.p_abort,
            "p_for": rep.p_for,
            "p_rep": rep.p_rep,
        }

    rows = _parallel(point, list(zip(grid, rngs)), spec.threads)
    summary = f"table5: p_rep(5 km, e_d=0)={rows[0]['p_rep']:.3g}"
    header = ["e_d", "l_fib_km", "l_signature", "p_abort", "p_for", "p_rep"]
    return RecipeResult(header, rows, summary)


RECIPES: dict[str, tuple[str, Callable[[ExperimentSpec], RecipeResult], str]] = {
    "fig1": ("money", run_fig1, "verification probability c vs client wait time"),
    "fig2": ("money", run_fig2, "correctness/forging bounds vs number of qubit pairs"),
    "fig4": ("anon", run_fig4, "average teleport fidelity vs memory dephasing (q1, q2)"),
    "fig5": ("anon", run_fig5, "average teleport fidelity vs correction-gate noise"),
    "fig6": ("anon", run_fig6, "protocol failure probability vs transmission loss"),
    "fig7": ("vbqc", run_fig7, "test-round failure probability vs gate depolarizing q"),
    "table4": ("backbench", run_table4, "minimal (T1, T2) improvements per storage time"),
    "table5": ("qds", run_table5, "signature security levels vs fibre length and e_d"),
}


def list_recipes() -> str:
    """Stable text table of the built-in recipes."""
    lines = ["recipe    protocol   description"]
    for name in sorted(RECIPES):
        protocol, _, desc = RECIPES[name]
        lines.append(f"{name:<9} {protocol:<10} {desc}")
    return "\n".join(lines)


def run_recipe(spec: ExperimentSpec) -> RecipeResult:
    if spec.recipe not in RECIPES:
        raise KeyError(f"unknown recipe {spec.recipe!r}")
    protocol, fn, _ = RECIPES[spec.recipe]
    if spec.protocol != protocol:
        raise KeyError(f"recipe {spec.recipe!r} belongs to protocol {protocol!r}")
    return fn(spec)
