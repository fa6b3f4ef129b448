"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
lines as they complete.  Every tolerance is pinned here.
"""

import numpy as np
import pytest

from cvqrc.backends import PipelineCovariance
from cvqrc.config import config_from_dict
from cvqrc.measurement import (
    CovarianceMatrix,
    diagonal_covariance,
    global_phase_covariance,
    omega,
    symplectic_from_unitary,
)
from cvqrc.presets import build_ensemble
from cvqrc.reservoir import fit_noise, kernel_quality, run_sequence
from cvqrc.rng import stream
from cvqrc.runner import _resolved_source, run_seed
from cvqrc.tasks import DoubleScrollState, double_scroll_trajectory


def _report(number: int, name: str, ok: bool, detail: str) -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number} ({name}): {verdict} -- {detail}", flush=True)
    assert ok, f"criterion {number} ({name}): {detail}"


def _random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r))).conj()


def _memory_config(reservoirs: int, tau: int, seeds):
    return config_from_dict({
        "task": "memory",
        "preset": f"memory_r{reservoirs}",
        "noise": "average",
        "tau": tau,
        "sizes": {"washout": 50, "train": 100, "test": 50},
        "seeds": list(seeds),
    })


def test_criterion_1_full_pipeline_matches_closed_form(source):
    worst = 0.0
    for n in (1, 2, 4):
        model = PipelineCovariance(
            pump=source.pump,
            crystal=source.crystal,
            modes=n,
            samples=source.grid_samples,
            n_kept=source.n_kept,
            r_scale=source.r_scale,
            basis="frexel",
        )
        overlap = model.measurement_basis.overlap
        assert not np.iscomplexobj(overlap)
        for delta in np.linspace(0.0, np.pi / 2, 9):
            full = model.covariance([delta])
            closed = global_phase_covariance(delta, overlap, model.schmidt.r).matrix
            worst = max(worst, float(np.max(np.abs(full - closed))))
    _report(1, "oracle equivalence", worst < 1e-8,
            f"max entrywise deviation {worst:.2e} (tol 1e-8), n in (1, 2, 4)")


def test_criterion_2_symplectic_suite():
    rng = stream(2024, "acceptance-symplectic")
    worst_omega = 0.0
    for k in range(100):
        n = 1 + k % 4
        s = symplectic_from_unitary(_random_unitary(rng, n))
        worst_omega = max(
            worst_omega, float(np.max(np.abs(s.T @ omega(n) @ s - omega(n))))
        )
    min_nu, spd = np.inf, True
    for k in range(100):
        n = 1 + k % 3
        u = _random_unitary(rng, n)
        r = rng.uniform(0.01, 0.4, size=n)
        s_u = symplectic_from_unitary(u)
        sigma = CovarianceMatrix(
            0.5 * (lambda m: m + m.T)(s_u.T @ diagonal_covariance(r) @ s_u)
        )
        spd &= sigma.is_positive_definite()
        min_nu = min(min_nu, float(sigma.symplectic_eigenvalues().min()))
    ok = worst_omega < 1e-10 and spd and min_nu >= 1.0 - 1e-6
    _report(2, "symplectic suite", ok,
            f"omega deviation {worst_omega:.2e} (tol 1e-10), SPD={spd}, "
            f"min symplectic eigenvalue {min_nu:.9f} (>= 1 - 1e-6)")


def test_criterion_3_xor_accuracy():
    results = {}
    for noise, bound in (("average", 0.95), ("low", 0.97)):
        config = config_from_dict({
            "task": "xor", "preset": "xor", "noise": noise,
            "sizes": {"washout": 50, "train": 70, "test": 49},
            "seeds": list(range(10)),
        })
        src = _resolved_source(config)
        accs = [run_seed(config, src, s).metrics["accuracy"] for s in config.seeds]
        results[noise] = (float(np.mean(accs)), bound)
    ok = all(mean >= bound for mean, bound in results.values())
    detail = ", ".join(
        f"{noise}: mean {mean:.3f} (>= {bound})"
        for noise, (mean, bound) in results.items()
    )
    _report(3, "XOR", ok, detail + "; 70 train / 49 test, 10 seeds")


def test_criterion_4_linear_memory():
    seeds = range(10)
    curves = {}
    for reservoirs in (5, 1):
        means = []
        for tau in (1, 2, 3, 4, 5):
            config = _memory_config(reservoirs, tau, seeds)
            src = _resolved_source(config)
            caps = [run_seed(config, src, s).metrics["capacity"] for s in seeds]
            means.append(float(np.mean(caps)))
        curves[reservoirs] = means

    r5 = curves[5]
    in_band = 0.70 <= r5[0] <= 0.92
    rises = [max(0.0, later - earlier) for earlier, later in zip(r5, r5[1:])]
    inversions = [r for r in rises if r > 0.0]
    monotone = len(inversions) <= 1 and all(r <= 0.03 for r in inversions)
    dominates = all(a >= b for a, b in zip(curves[5], curves[1]))
    ok = in_band and monotone and dominates
    _report(4, "linear memory", ok,
            f"R=5 capacities {np.round(r5, 3).tolist()} (tau=1 in [0.70, 0.92]); "
            f"inversions {np.round(inversions, 3).tolist()} (<= 1 of size <= 0.03); "
            f"R=5 dominates R=1: {dominates}")


def test_criterion_5_parity_check(source):
    def accuracy_for(segments, modes, tau, seeds):
        config = config_from_dict({
            "task": "parity", "preset": "general", "noise": "off",
            "backend": "pipeline" if segments > 1 else "analytic",
            "segments": segments, "modes": modes, "tau": tau,
            "sizes": {"washout": 30, "train": 300, "test": 100},
            "seeds": list(seeds),
        })
        return [
            run_seed(config, source, s).metrics["accuracy"] for s in config.seeds
        ]

    seeds = range(5)
    rich = {tau: float(np.mean(accuracy_for(9, 9, tau, seeds))) for tau in (1, 2, 3)}
    narrow = float(np.mean(accuracy_for(1, 1, 3, seeds)))
    ok = all(acc >= 0.99 for acc in rich.values()) and narrow < min(rich.values())
    _report(5, "parity check", ok,
            f"N=n=9 accuracies {rich} (>= 0.99 for tau 1..3); "
            f"N=1 tau=3 accuracy {narrow:.3f} strictly lower")


def test_criterion_6_double_scroll_forecast():
    bounds = {"capacity_v1": 0.85, "capacity_v2": 0.75, "capacity_i": 0.80}
    config = config_from_dict({
        "task": "double-scroll", "preset": "double_scroll",
        "noise": "experimental", "reservoirs": 15,
        "sizes": {"washout": 50, "train": 350, "test": 12},
        "seeds": list(range(5)),
    })
    src = _resolved_source(config)

    by_train = {}
    for train_rows in (100, 200, 350):
        metrics = [
            run_seed(config, src, s, train_rows=train_rows).metrics
            for s in config.seeds
        ]
        by_train[train_rows] = {
            key: float(np.mean([m[key] for m in metrics])) for key in bounds
        }
    full = by_train[350]
    meets = all(full[key] >= bound for key, bound in bounds.items())
    growing = all(
        by_train[100][key] <= by_train[200][key] <= by_train[350][key]
        for key in bounds
    )
    ok = meets and growing
    _report(6, "double-scroll forecast", ok,
            f"capacities at train=350 {np.round(list(full.values()), 3).tolist()} "
            f">= (0.85, 0.75, 0.80); non-decreasing over train sizes "
            f"{dict((k, [np.round(by_train[t][k], 3) for t in (100, 200, 350)]) for k in bounds)}")


def test_criterion_7_kernel_quality(source):
    def mean_rank(segments_match: bool, n: int) -> float:
        ranks = []
        for seed in range(10):
            segments = n if segments_match else 1
            ens = build_ensemble(
                "general", source=source, segments=segments, modes=n,
                backend="pipeline" if segments > 1 else "analytic",
                seed=seed, normalization="raw",
            )
            d = n * (2 * n + 1)
            inputs = stream(seed, "kernel-inputs").uniform(-1.0, 1.0, 20 + d)
            ranks.append(kernel_quality(run_sequence(inputs, ens, 20)))
        return float(np.mean(ranks))

    sizes = (1, 2, 4, 6, 8)
    flat = {n: mean_rank(False, n) for n in sizes}
    matched = {n: mean_rank(True, n) for n in sizes}
    flat_ok = all(rank <= 3 for rank in flat.values())
    gap_ok = all(matched[n] > flat[n] for n in (4, 6, 8))
    mono_ok = all(
        matched[a] <= matched[b] for a, b in zip(sizes, sizes[1:])
    )
    ok = flat_ok and gap_ok and mono_ok
    _report(7, "kernel quality", ok,
            f"N=1 ranks {flat} (<= 3); N=n ranks {matched} "
            f"(strictly above N=1 for n >= 4, non-decreasing)")


def test_criterion_8_double_scroll_integrator():
    origin = double_scroll_trajectory(DoubleScrollState(0.0, 0.0, 0.0), 100)
    origin_ok = float(np.max(np.abs(origin))) < 1e-12

    coarse = double_scroll_trajectory(DoubleScrollState(0.1, 0.0, 0.0), 1, dt=0.01)
    fine = double_scroll_trajectory(DoubleScrollState(0.1, 0.0, 0.0), 1, dt=0.001)
    step_err = float(np.max(np.abs(coarse[1] - fine[1])))

    long_run = double_scroll_trajectory(DoubleScrollState(0.1, 0.2, 0.3), 10_000)
    bounded = bool(np.all(np.abs(long_run) < 3.0))

    ok = origin_ok and step_err < 1e-6 and bounded
    _report(8, "double-scroll integrator", ok,
            f"origin magnitude {np.max(np.abs(origin)):.1e} (< 1e-12); "
            f"one-sample vs dt/10 error {step_err:.2e} (< 1e-6); "
            f"10^4-sample trajectory bounded: {bounded}")


def test_criterion_9_noise_fit_recovery():
    from cvqrc.backends import AnalyticCovariance
    from cvqrc.reservoir import Normalizer, ObservableSelection

    model = AnalyticCovariance(r=[0.0518])
    sel = ObservableSelection.single_mode("minmax")
    norm = Normalizer.exact_phase_extremes(model, sel)

    def predicted(phase):
        return norm(sel.extract(model.covariance([phase])))

    phases = np.repeat(np.linspace(0.0, np.pi / 2, 20), 10)  # 200 repetitions
    clean = np.array([predicted(p) for p in phases])
    noisy = clean + stream(9, "acceptance-noise").normal(0.0, 0.05, clean.shape)
    fitted = fit_noise(phases, noisy, predicted)
    errors = np.abs(np.atleast_1d(fitted.std) - 0.05)
    ok = bool(np.all(errors < 0.01))
    _report(9, "noise-fit recovery", ok,
            f"recovered std {np.round(np.atleast_1d(fitted.std), 4).tolist()} "
            f"(target 0.05 +- 0.01 from 200 repetitions)")
