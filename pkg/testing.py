"""Manual seeded runs on the benchmark crowd: fusion benefit, iteration ablation, noise.

Run with ``python testing.py``; prints one table per experiment. The pass/fail thresholds
for the first two live in tests/test_experiment_service.py.
"""

import numpy as np

from logger import logger
from wireless_reid.services import (
    affinity_service,
    align_service,
    eval_service,
    rcpm_service,
    simgen_service,
)
from wireless_reid.services.experiment_config import BENCHMARK_RCPM, RunConfig
from wireless_reid.services.experiment_service import ExperimentService
from wireless_reid.services.rcpm_service import RcpmVariant
from wireless_reid.services.simgen_service import BENCHMARK_PRESET

SEEDS = range(10)
ITERATIONS = range(9)


# === Fusion benefit over the two baselines ===
def fusion_benefit() -> None:
    service = ExperimentService(logger=logger)
    signal_gain: list[float] = []
    map_gain: list[float] = []
    print(f"{'seed':>4} {'SM r1':>7} {'RCPM r1':>8} {'vis mAP':>8} {'RCPM mAP':>9}")
    for seed in SEEDS:
        scenario = simgen_service.generate(simgen_service.preset(BENCHMARK_PRESET, seed=seed))
        result = service.run_experiment(scenario, RunConfig(rcpm=BENCHMARK_RCPM, seed=seed))
        by_key = {(r.method, r.task.value): r.report for r in result.reports}
        sm = by_key[("SM-Baseline", "signal")].cmc[0]
        rcpm_signal = by_key[("RCPM", "signal")].cmc[0]
        visual = by_key[("baseline-visual", "reid")].map
        rcpm_reid = by_key[("RCPM", "reid")].map
        signal_gain.append(rcpm_signal - sm)
        map_gain.append(rcpm_reid - visual)
        print(f"{seed:>4} {sm:>7.3f} {rcpm_signal:>8.3f} {visual:>8.3f} {rcpm_reid:>9.3f}")

    for name, gains in (("signal rank-1", signal_gain), ("re-ID mAP", map_gain)):
        wins = sum(gain > 0 for gain in gains)
        print(f"{name}: mean gain {np.mean(gains):+.4f}, positive in {wins}/{len(gains)} seeds")


# === Iteration ablation, standard against star ===
def iteration_ablation() -> None:
    curves: dict[RcpmVariant, np.ndarray] = {
        variant: np.zeros((len(ITERATIONS), 2)) for variant in RcpmVariant
    }
    for seed in SEEDS:
        scenario = simgen_service.generate(simgen_service.preset(BENCHMARK_PRESET, seed=seed))
        s0 = affinity_service.visual_affinity(affinity_service.feature_distances(scenario))
        d0 = align_service.distance_matrix(scenario)
        for variant in RcpmVariant:
            config = BENCHMARK_RCPM.model_copy(
                update={"iterations": ITERATIONS[-1], "variant": variant}
            )
            curves[variant][0] += (
                eval_service.evaluate_reid(s0, scenario).map,
                eval_service.sm_baseline(d0, scenario).cmc[0],
            )
            for t, state in enumerate(rcpm_service.iterate(s0, d0, config), start=1):
                reid = eval_service.evaluate_reid(state.s, scenario)
                signal = eval_service.evaluate_signal(state.d, scenario)
                curves[variant][t] += (reid.map, signal.cmc[0])

    print(f"{'iters':>5} {'mAP':>7} {'sig r1':>7} {'mAP*':>7} {'sig r1*':>8}")
    standard = curves[RcpmVariant.STANDARD] / len(SEEDS)
    star = curves[RcpmVariant.STAR] / len(SEEDS)
    for t in ITERATIONS:
        print(
            f"{t:>5} {standard[t, 0]:>7.3f} {standard[t, 1]:>7.3f} "
            f"{star[t, 0]:>7.3f} {star[t, 1]:>8.3f}"
        )
    drift = np.abs(standard[8] - standard[4]).max() * 100
    drop = (star.max(axis=0) - star[8]).max() * 100
    print(f"standard drift 4->8: {drift:.2f} points; star drop from peak: {drop:.2f} points")


# === Positioning noise calibration ===
def noise_calibration() -> None:
    means: list[float] = []
    for seed in SEEDS:
        scenario = simgen_service.generate(simgen_service.preset(BENCHMARK_PRESET, seed=seed))
        owner = {sig.identity: sig for sig in scenario.signals}
        distances: list[np.ndarray] = []
        for seq in scenario.sequences:
            signal = owner.get(seq.identity)
            if signal is None:
                continue
            pairs = align_service.aligned_pairs(seq.trajectory, signal)
            distances.append(np.linalg.norm(pairs.visual - pairs.wireless, axis=1))
        means.append(float(np.concatenate(distances).mean()))
        print(f"seed {seed}: mean true-pair distance {means[-1]:.2f} m")
    print(f"overall: {np.mean(means):.2f} m (target 7-13 m)")


if __name__ == "__main__":
    print("--- Fusion benefit")
    fusion_benefit()
    print("--- Iteration ablation")
    iteration_ablation()
    print("--- Noise calibration")
    noise_calibration()
