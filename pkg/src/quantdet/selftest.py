"""Built-in sanity battery: does the installed package still tell the truth?

Four checks, each an independent consequence of the model rather than a
re-execution of the implementation:

* ``null_moments``      -- H0 Rao statistics look chi-square(2): mean,
                           variance and a far-tail exceedance.
* ``one_bit_closed_form`` -- with a sign quantizer the general machinery
                           must collapse to the textbook one-bit result:
                           information ratio exactly 2/pi and the
                           statistic equal to a direct sign-correlation
                           formula.
* ``fisher_identity``   -- the Monte Carlo covariance of the score at
                           beta = 0 matches the information matrix
                           (equal diagonal, vanishing cross term).
* ``score_test_identity`` -- the closed-form statistic agrees with a
                           numerically differentiated log-likelihood
                           oracle on random instances.

``run_selftest`` returns structured results; the CLI renders them one
per line and maps any failure to its own exit code.  ``table_transform``
exists so a test harness can corrupt the bin-statistics table that the
closed form uses and confirm that ``score_test_identity`` actually has
teeth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detectors import _score_sums, rao_statistic
from .montecarlo import RaoDetector, TrialConfig, run_trials, subseed
from .optimizer import PsoConfig, optimize_thresholds
from .perf_theory import chi2_quantile, fisher_information
from .quantizer import (
    ThresholdSet,
    bin_indices,
    bin_probability,
    bin_stats_table,
    quantize,
)
from .signal_model import (
    EffectiveSignal,
    Hypothesis,
    SceneConfig,
    effective_signal,
    stream_rng,
    synthesize_observation,
    trial_counter,
)

DEFAULT_SEED = 20260819


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"check={self.name} status={status} {self.detail}"


def _default_scene() -> SceneConfig:
    return SceneConfig(n_tx=2, n_rx=16, snapshots=8, noise_power=2.0)


def _check_null_moments(seed: int, trials: int) -> CheckResult:
    scene = _default_scene()
    signal = effective_signal(scene)
    design = optimize_thresholds(
        2, signal, scene.noise_power, PsoConfig(seed=subseed(seed, 1))
    )
    cfg = TrialConfig(
        scene=scene,
        detector=RaoDetector(design.thresholds),
        n_trials_h0=trials,
        n_trials_h1=0,
        seed=subseed(seed, 2),
    )
    h0, _ = run_trials(cfg)
    mean = float(h0.mean())
    var = float(h0.var(ddof=1))
    eta = chi2_quantile(0.01)
    pfa = float((h0 > eta).mean())
    ok = abs(mean - 2.0) <= 0.05 and abs(var - 4.0) <= 0.3 and abs(pfa - 0.01) <= 1e-3
    detail = f"mean={mean:.4f} var={var:.4f} pfa@1%={pfa:.5f} trials={trials}"
    return CheckResult("null_moments", ok, detail)


def _check_one_bit(seed: int) -> CheckResult:
    rng = np.random.default_rng(subseed(seed, 3))
    sign_q = ThresholdSet(bits=1, interior=np.array([0.0]))
    worst_ratio = 0.0
    worst_stat = 0.0
    for _ in range(3):
        scene = SceneConfig(
            n_tx=int(rng.integers(1, 5)),
            n_rx=int(rng.integers(2, 9)),
            snapshots=int(rng.integers(4, 13)),
            angle=float(rng.uniform(-1.2, 1.2)),
            noise_power=float(rng.uniform(0.5, 4.0)),
        )
        signal = effective_signal(scene)
        table = bin_stats_table(sign_q, scene.noise_power)
        # information ratio against the unquantized limit 2 / noise_power
        ratio = table.info_per_energy * scene.noise_power / 2.0
        worst_ratio = max(worst_ratio, abs(ratio - 2.0 / math.pi))
        # statistic against the direct sign-correlation form
        x = synthesize_observation(
            scene, signal, Hypothesis.H0, stream_rng(subseed(seed, 4), 0)
        )
        stat = rao_statistic(quantize(x, sign_q), signal, sign_q, scene.noise_power)
        signs = np.sign(x.real) + 1j * np.sign(x.imag)
        direct = abs(np.conj(signal.z) @ signs) ** 2 / signal.energy
        worst_stat = max(worst_stat, abs(stat - direct) / direct)
    ok = worst_ratio <= 1e-12 and worst_stat <= 1e-12
    detail = f"max|ratio-2/pi|={worst_ratio:.2e} max_rel_stat_err={worst_stat:.2e}"
    return CheckResult("one_bit_closed_form", ok, detail)


def _check_fisher_identity(seed: int, trials: int) -> CheckResult:
    scene = _default_scene()
    signal = effective_signal(scene)
    design = optimize_thresholds(
        2, signal, scene.noise_power, PsoConfig(seed=subseed(seed, 5))
    )
    thresholds = design.thresholds
    table = bin_stats_table(thresholds, scene.noise_power)
    info = fisher_information(signal, thresholds, scene.noise_power).diagonal
    mc_seed = subseed(seed, 6)
    n = len(signal)
    re0 = np.empty((trials, n), dtype=np.int64)
    im0 = np.empty((trials, n), dtype=np.int64)
    for i in range(trials):
        rng = stream_rng(mc_seed, trial_counter(Hypothesis.H0, i))
        x = synthesize_observation(scene, signal, Hypothesis.H0, rng)
        re0[i] = bin_indices(x.real, thresholds)
        im0[i] = bin_indices(x.imag, thresholds)
    s_r, s_i = _score_sums(re0, im0, signal, table)
    # var(S_R) estimates the diagonal with SE ~ diag * sqrt(2/n);
    # E[S_R S_I] estimates 0 with SE ~ diag / sqrt(n)
    se_diag = info * math.sqrt(2.0 / trials)
    se_cross = info / math.sqrt(trials)
    var_err = abs(float(np.mean(s_r**2)) - info)
    cross = abs(float(np.mean(s_r * s_i)))
    ok = var_err <= 3.0 * se_diag and cross <= 3.0 * se_cross
    detail = (
        f"diag={info:.4f} |var_err|={var_err:.4f} (3se={3*se_diag:.4f}) "
        f"|cross|={cross:.4f} (3se={3*se_cross:.4f})"
    )
    return CheckResult("fisher_identity", ok, detail)


def _loglik(u_re, u_im, thresholds, noise_power, re_bins, im_bins):
    """Exact quantized log-likelihood at per-sample means (u_re, u_im)."""
    total = 0.0
    for n in range(len(re_bins)):
        total += math.log(bin_probability(u_re[n], int(re_bins[n]), thresholds, noise_power))
        total += math.log(bin_probability(u_im[n], int(im_bins[n]), thresholds, noise_power))
    return total


def _oracle_statistic(y, signal, thresholds, noise_power, eps=1e-4):
    """Rao statistic rebuilt from numerical derivatives only.

    The score comes from central differences of the log-likelihood in
    (Re beta, Im beta) at zero; the information from central differences
    of the per-bin masses.  No F', F'' or score-ratio code is reused.
    """
    g, h = signal.g, signal.h

    def ell(br, bi):
        return _loglik(br * g - bi * h, br * h + bi * g, thresholds, noise_power,
                       y.re_bins, y.im_bins)

    s_r = (ell(eps, 0.0) - ell(-eps, 0.0)) / (2 * eps)
    s_i = (ell(0.0, eps) - ell(0.0, -eps)) / (2 * eps)

    info1 = 0.0
    for i in range(1, thresholds.n_bins + 1):
        f0 = bin_probability(0.0, i, thresholds, noise_power)
        fp = bin_probability(eps, i, thresholds, noise_power)
        fm = bin_probability(-eps, i, thresholds, noise_power)
        d1 = (fp - fm) / (2 * eps)
        d2 = (fp - 2 * f0 + fm) / (eps * eps)
        info1 += (d1 * d1 - d2 * f0) / f0
    return (s_r * s_r + s_i * s_i) / (signal.energy * info1)


def _check_score_identity(seed: int, table_transform=None) -> CheckResult:
    rng = np.random.default_rng(subseed(seed, 7))
    worst = 0.0
    for trial in range(10):
        bits = int(rng.integers(1, 4))
        noise_power = float(rng.uniform(0.5, 4.0))
        s = math.sqrt(noise_power / 2.0)
        interior = np.sort(rng.uniform(-2.5 * s, 2.5 * s, size=2**bits - 1))
        interior += np.arange(2**bits - 1) * 1e-6  # guard against near-ties
        thresholds = ThresholdSet(bits=bits, interior=interior)
        n = 6
        zc = rng.normal(size=n) + 1j * rng.normal(size=n)
        signal = EffectiveSignal(g=zc.real, h=zc.imag)
        x = s * (rng.normal(size=n) + 1j * rng.normal(size=n))
        y = quantize(x, thresholds)
        table = bin_stats_table(thresholds, noise_power)
        if table_transform is not None:
            table = table_transform(table)
        closed = rao_statistic(y, signal, thresholds, noise_power, table=table)
        oracle = _oracle_statistic(y, signal, thresholds, noise_power)
        worst = max(worst, abs(closed - oracle) / max(abs(oracle), 1e-12))
    ok = worst <= 1e-6
    return CheckResult("score_test_identity", ok, f"max_rel_err={worst:.2e}")


def run_selftest(
    seed: int = DEFAULT_SEED,
    trials: int = 100000,
    table_transform=None,
) -> list:
    """Run all checks; never raises, failures land in the results."""
    checks = (
        ("null_moments", lambda: _check_null_moments(seed, trials)),
        ("one_bit_closed_form", lambda: _check_one_bit(seed)),
        ("fisher_identity", lambda: _check_fisher_identity(seed, min(trials, 20000))),
        ("score_test_identity", lambda: _check_score_identity(seed, table_transform)),
    )
    results = []
    for name, run in checks:
        try:
            results.append(run())
        except Exception as exc:  # noqa: BLE001 - selftest must report, not crash
            results.append(CheckResult(name, False, f"raised {exc!r}"))
    return results
