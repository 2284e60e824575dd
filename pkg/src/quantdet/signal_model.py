"""Scene geometry, probing waveform and observation synthesis.

Models a colocated MIMO radar: ``n_tx`` transmitters and ``n_rx``
receivers on uniform linear arrays with common element spacing, probing
a far-field point scatterer at a known angle.  After matched filtering,
the length ``n_rx * snapshots`` observation under the two hypotheses is

    H0:  x = w
    H1:  x = beta * z + w

where ``z`` is the deterministic effective signal (steering structure
times waveform), ``beta`` the unknown complex amplitude and ``w``
circular complex Gaussian noise with per-sample power ``noise_power``
(so ``noise_power / 2`` per real component).

Vectorization convention: space-time matrices of shape
``(n_rx, snapshots)`` are flattened receiver-major (C order), i.e. all
snapshots of receiver 0 first.  Every consumer of ``z`` in this package
relies on that ordering.

Reproducibility: all randomness flows through counter-based Philox
streams built by :func:`stream_rng`.  A (master seed, counter) pair
names a stream independently of how work is batched or distributed, so
serial and parallel runs of the same experiment produce identical draws.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Hypothesis(Enum):
    """Null (noise only) versus alternative (signal present)."""

    H0 = "H0"
    H1 = "H1"


@dataclass(frozen=True)
class SceneConfig:
    """Immutable description of one radar scene.

    Parameters
    ----------
    n_tx, n_rx : int
        Number of transmit / receive elements (>= 1).
    snapshots : int
        Temporal samples per receiver after matched filtering (>= 1).
    wavelength : float
        Carrier wavelength; only the ratio ``spacing / wavelength``
        matters for the steering structure.
    spacing : float
        Inter-element spacing, shared by both arrays.
    angle : float
        Target direction in radians, 0 = broadside.
    noise_power : float
        Complex noise power per sample (variance of Re + variance of Im).
    beta : tuple of float
        Complex reflection amplitude as ``(real, imag)``.
    """

    n_tx: int
    n_rx: int
    snapshots: int
    wavelength: float = 1.0
    spacing: float = 0.5
    angle: float = 0.0
    noise_power: float = 2.0
    beta: tuple = (1.0, 0.0)

    def __post_init__(self):
        for name in ("n_tx", "n_rx", "snapshots"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        for name in ("wavelength", "spacing", "noise_power"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {v!r}")
        if not math.isfinite(self.angle):
            raise ValueError("angle must be finite")
        b = self.beta
        if len(b) != 2 or not all(math.isfinite(c) for c in b):
            raise ValueError(f"beta must be a finite (real, imag) pair, got {b!r}")
        object.__setattr__(self, "beta", (float(b[0]), float(b[1])))

    @property
    def n_samples(self) -> int:
        return self.n_rx * self.snapshots

    @property
    def beta_complex(self) -> complex:
        return complex(self.beta[0], self.beta[1])

    def snr_db(self) -> float:
        """Per-sample SNR in dB: 10 log10(|beta|^2 / noise_power)."""
        mag2 = self.beta[0] ** 2 + self.beta[1] ** 2
        if mag2 == 0.0:
            return -math.inf
        return 10.0 * math.log10(mag2 / self.noise_power)

    def with_snr_db(self, snr_db: float) -> "SceneConfig":
        """Copy of the scene with |beta| rescaled to hit ``snr_db``.

        The phase of beta is preserved (a zero beta is rescaled along
        the real axis).  Round-trips: ``c.with_snr_db(s).snr_db() == s``
        up to float rounding.
        """
        if not math.isfinite(snr_db):
            raise ValueError("snr_db must be finite")
        target_mag = math.sqrt(self.noise_power * 10.0 ** (snr_db / 10.0))
        old_mag = math.hypot(*self.beta)
        if old_mag == 0.0:
            new_beta = (target_mag, 0.0)
        else:
            scale = target_mag / old_mag
            new_beta = (self.beta[0] * scale, self.beta[1] * scale)
        return dataclasses.replace(self, beta=new_beta)


def steering_matrix(cfg: SceneConfig) -> np.ndarray:
    """Joint receive/transmit steering matrix of shape (n_rx, n_tx).

    Entry (i, k) is exp(-j * 2 pi * (i + k) * spacing * sin(angle) /
    wavelength) with zero-based element indices -- the outer product of
    the receive and transmit steering vectors, hence rank one with every
    entry on the unit circle.
    """
    phase_step = 2.0 * math.pi * cfg.spacing * math.sin(cfg.angle) / cfg.wavelength
    rx = np.arange(cfg.n_rx)[:, None]
    tx = np.arange(cfg.n_tx)[None, :]
    return np.exp(-1j * phase_step * (rx + tx))


def lfm_waveform(n_tx: int, snapshots: int) -> np.ndarray:
    """Orthogonal-ish linear-FM probing matrix of shape (n_tx, snapshots).

    Row p (1-based), sample l (1-based):

        S[p, l] = exp(j 2 pi p (l-1) / snapshots + j pi (l-1)^2 / snapshots) / n_tx

    Every entry has magnitude 1 / n_tx.
    """
    if n_tx < 1 or snapshots < 1:
        raise ValueError("n_tx and snapshots must be positive")
    p = np.arange(1, n_tx + 1)[:, None]
    l0 = np.arange(snapshots)[None, :]
    phase = 2.0 * math.pi * p * l0 / snapshots + math.pi * l0 ** 2 / snapshots
    return np.exp(1j * phase) / n_tx


@dataclass(frozen=True)
class EffectiveSignal:
    """Known noise-free signal template z, split into real and imaginary parts.

    ``g`` and ``h`` are equal-length float arrays with Re(z) and Im(z).
    Instances are immutable (the arrays are marked read-only) so one
    template can be shared freely across threads and worker processes.
    """

    g: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if g.ndim != 1 or g.shape != h.shape:
            raise ValueError("g and h must be 1-D arrays of equal length")
        if not (np.isfinite(g).all() and np.isfinite(h).all()):
            raise ValueError("signal template must be finite")
        g = g.copy()
        h = h.copy()
        g.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)

    def __len__(self) -> int:
        return self.g.shape[0]

    @property
    def z(self) -> np.ndarray:
        """Complex view g + j h (fresh array)."""
        return self.g + 1j * self.h

    @property
    def energy(self) -> float:
        """sum(g^2 + h^2) = ||z||^2."""
        return float(np.sum(self.g ** 2) + np.sum(self.h ** 2))


def effective_signal(cfg: SceneConfig) -> EffectiveSignal:
    """Template z = vec(A(angle) @ S), receiver-major flattening.

    A is the steering matrix, S the LFM probing matrix; the (n_rx,
    snapshots) product is raveled in C order per the module convention.
    """
    a = steering_matrix(cfg)
    s = lfm_waveform(cfg.n_tx, cfg.snapshots)
    z = (a @ s).ravel(order="C")
    return EffectiveSignal(g=z.real, h=z.imag)


def stream_rng(master_seed: int, counter: int = 0) -> np.random.Generator:
    """Independent Philox stream named by (master_seed, counter).

    The 128-bit Philox key is the concatenation ``master_seed << 64 |
    counter`` (both reduced mod 2^64), so distinct counters give
    independent streams without any sequential draw-order coupling --
    the property that makes trial-level parallelism reproducible.
    """
    key = np.array(
        [counter & 0xFFFFFFFFFFFFFFFF, master_seed & 0xFFFFFFFFFFFFFFFF],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def trial_counter(hypothesis: Hypothesis, trial_index: int) -> int:
    """Stream counter for one Monte Carlo trial.

    Bit 63 carries the hypothesis (0 for H0, 1 for H1) and the low bits
    the trial index, so the two hypothesis populations never share a
    stream even at equal indices.
    """
    if trial_index < 0 or trial_index >= 1 << 63:
        raise ValueError("trial_index out of range")
    hyp_bit = 1 if hypothesis is Hypothesis.H1 else 0
    return (hyp_bit << 63) | trial_index


def synthesize_observation(
    cfg: SceneConfig,
    signal: EffectiveSignal,
    hypothesis: Hypothesis,
    rng,
    noise_free: bool = False,
) -> np.ndarray:
    """One complex observation vector under the requested hypothesis.

    Parameters
    ----------
    cfg : SceneConfig
        Supplies beta and the noise power.
    signal : EffectiveSignal
        Template z; its length must equal ``cfg.n_samples``.
    hypothesis : Hypothesis
        H0 draws pure noise; H1 adds ``beta * z``.
    rng : numpy.random.Generator or int
        Noise source.  An int is shorthand for ``stream_rng(rng)``.
    noise_free : bool
        If True, skip the noise draw entirely (useful for oracles);
        the rng is not consumed.

    Notes
    -----
    The noise is drawn as one ``standard_normal((2, n))`` block -- row 0
    scaled into the real part, row 1 into the imaginary part -- so a
    given stream always yields the same observation regardless of
    surrounding code.
    """
    if len(signal) != cfg.n_samples:
        raise ValueError(
            f"template length {len(signal)} != n_rx * snapshots = {cfg.n_samples}"
        )
    if isinstance(rng, (int, np.integer)):
        rng = stream_rng(int(rng))
    mean = cfg.beta_complex * signal.z if hypothesis is Hypothesis.H1 else 0.0
    if noise_free:
        return np.asarray(mean if hypothesis is Hypothesis.H1 else np.zeros(len(signal), dtype=complex))
    comp_std = math.sqrt(cfg.noise_power / 2.0)
    w = rng.standard_normal((2, len(signal)))
    return mean + comp_std * (w[0] + 1j * w[1])
