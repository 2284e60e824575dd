"""Per-component scalar quantization and its Gaussian bin statistics.

A ``q``-bit quantizer is a strictly increasing vector of ``2^q - 1``
interior thresholds; with the implicit -inf / +inf edges it induces
``2^q`` half-open bins.  Boundary convention: bin ``i`` (1-based) is
``tau_{i-1} < x <= tau_i`` -- right-closed, so a sample exactly on a
threshold belongs to the lower-indexed bin.  Real and imaginary parts
are quantized independently by the same thresholds.

For a Gaussian component N(u, noise_power / 2) the per-bin probability
mass F_i and its first two derivatives in u,

    F_i  = Q((tau_{i-1} - u)/s) - Q((tau_i - u)/s),        s = sqrt(noise_power/2)
    F'_i = phi_s(tau_{i-1} - u) - phi_s(tau_i - u)
    F''_i = [(tau_{i-1} - u) phi_s(tau_{i-1} - u) - (tau_i - u) phi_s(tau_i - u)] / s^2

(phi_s the N(0, s^2) density) are the only statistics any downstream
code needs: the score ratios F'_i / F_i drive the detector and
sum_i (F'_i^2 - F''_i F_i) / F_i drives both the information matrix and
threshold design.  Terms at infinite edges vanish and are evaluated as
exact zeros here rather than left to 0 * inf arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import gauss_density, qfunc


class DegenerateBinError(ArithmeticError):
    """A quantizer bin has (numerically) zero probability mass.

    Raised instead of letting 1/F overflow; callers treating threshold
    vectors as candidates (e.g. the swarm optimizer) catch this and score
    the candidate as infeasible.
    """


@dataclass(frozen=True)
class ThresholdSet:
    """Strictly increasing interior thresholds of a ``bits``-bit quantizer."""

    bits: int
    interior: np.ndarray

    def __post_init__(self):
        if not isinstance(self.bits, (int, np.integer)) or self.bits < 1:
            raise ValueError(f"bits must be a positive integer, got {self.bits!r}")
        t = np.asarray(self.interior, dtype=float).copy()
        want = 2 ** self.bits - 1
        if t.ndim != 1 or t.shape[0] != want:
            raise ValueError(
                f"{self.bits}-bit quantizer needs {want} interior thresholds, got shape {t.shape}"
            )
        if not np.isfinite(t).all():
            raise ValueError("interior thresholds must be finite")
        if want > 1 and not (np.diff(t) > 0.0).all():
            raise ValueError("interior thresholds must be strictly increasing")
        t.flags.writeable = False
        object.__setattr__(self, "bits", int(self.bits))
        object.__setattr__(self, "interior", t)

    @property
    def n_bins(self) -> int:
        return 2 ** self.bits

    def edges(self) -> np.ndarray:
        """Interior thresholds framed by -inf and +inf (length 2^bits + 1)."""
        return np.concatenate(([-np.inf], self.interior, [np.inf]))

    def to_line(self) -> str:
        """Serialize as ``bits; t1,t2,...`` with full round-trip precision."""
        body = ",".join(repr(float(v)) for v in self.interior)
        return f"{self.bits}; {body}"

    @classmethod
    def from_line(cls, line: str) -> "ThresholdSet":
        """Parse the :meth:`to_line` format (whitespace tolerant)."""
        head, sep, body = line.partition(";")
        if not sep:
            raise ValueError(f"threshold line missing ';' separator: {line!r}")
        bits = int(head.strip())
        values = [float(tok) for tok in body.split(",")] if body.strip() else []
        return cls(bits=bits, interior=np.array(values, dtype=float))


@dataclass(frozen=True)
class QuantizedObservation:
    """Bin indices (1-based, in 1..2^bits) of one observation's Re/Im parts."""

    re_bins: np.ndarray
    im_bins: np.ndarray

    def __post_init__(self):
        rb = np.asarray(self.re_bins)
        ib = np.asarray(self.im_bins)
        if rb.shape != ib.shape or rb.ndim != 1:
            raise ValueError("re_bins and im_bins must be 1-D with equal length")
        if not (np.issubdtype(rb.dtype, np.integer) and np.issubdtype(ib.dtype, np.integer)):
            raise ValueError("bin indices must be integers")
        if rb.size and (rb.min() < 1 or ib.min() < 1):
            raise ValueError("bin indices are 1-based; found index < 1")
        rb = rb.copy()
        ib = ib.copy()
        rb.flags.writeable = False
        ib.flags.writeable = False
        object.__setattr__(self, "re_bins", rb)
        object.__setattr__(self, "im_bins", ib)

    def __len__(self) -> int:
        return self.re_bins.shape[0]


def bin_indices(values: np.ndarray, thresholds: ThresholdSet) -> np.ndarray:
    """0-based bin index of each real value (vectorized hot path).

    ``searchsorted(..., side="left")`` counts thresholds strictly below
    the value, which lands x == tau_i in bin i-1 (0-based): exactly the
    right-closed convention.
    """
    return np.searchsorted(thresholds.interior, values, side="left")


def quantize(x: np.ndarray, thresholds: ThresholdSet) -> QuantizedObservation:
    """Quantize a complex observation componentwise to 1-based bin indices."""
    x = np.asarray(x)
    re = bin_indices(x.real, thresholds) + 1
    im = bin_indices(x.imag, thresholds) + 1
    return QuantizedObservation(re_bins=re, im_bins=im)


def _edge_terms(edges: np.ndarray, u, s: float):
    """(Q values, densities, t*density) at shifted edges, inf-safe.

    Returns arrays shaped like ``edges - u`` broadcast: ``qfunc((e-u)/s)``,
    ``phi_s(e-u)`` and ``(e-u) * phi_s(e-u)``, the last two forced to an
    exact 0.0 at infinite edges.
    """
    t = (edges - u) / s
    finite = np.isfinite(t)
    tf = np.where(finite, t, 0.0)
    dens = np.where(finite, gauss_density(tf * s, sigma=s), 0.0)
    return qfunc(t), dens, tf * s * dens


def _stats_from_edges(edges: np.ndarray, u, noise_power: float):
    """Core (F, F', F'') evaluation shared by the table builder and optimizer.

    ``edges`` has the framing infinities along its last axis; broadcasting
    over leading axes lets one call score a whole swarm of candidate
    threshold vectors.
    """
    s = math.sqrt(noise_power / 2.0)
    qv, dens, tdens = _edge_terms(edges, u, s)
    lo = slice(None, -1)
    hi = slice(1, None)
    f = qv[..., lo] - qv[..., hi]
    f1 = dens[..., lo] - dens[..., hi]
    f2 = (tdens[..., lo] - tdens[..., hi]) / (s * s)
    return f, f1, f2


def bin_probability(u, i: int, thresholds: ThresholdSet, noise_power: float):
    """Probability that N(u, noise_power/2) falls in bin ``i`` (1-based)."""
    if not 1 <= i <= thresholds.n_bins:
        raise ValueError(f"bin index {i} outside 1..{thresholds.n_bins}")
    s = math.sqrt(noise_power / 2.0)
    e = thresholds.edges()
    out = qfunc((e[i - 1] - np.asarray(u, dtype=float)) / s) - qfunc(
        (e[i] - np.asarray(u, dtype=float)) / s
    )
    return float(out) if np.isscalar(u) or np.ndim(u) == 0 else out

def bin_derivatives(u, i: int, thresholds: ThresholdSet, noise_power: float):
    """(dF_i/du, d2F_i/du2) at mean ``u`` for bin ``i`` (1-based)."""
    if not 1 <= i <= thresholds.n_bins:
        raise ValueError(f"bin index {i} outside 1..{thresholds.n_bins}")
    e = thresholds.edges()[i - 1 : i + 1]
    _, f1, f2 = _stats_from_edges(e, np.asarray(u, dtype=float)[..., None], noise_power)
    f1 = f1[..., 0]
    f2 = f2[..., 0]
    if np.ndim(u) == 0:
        return float(f1), float(f2)
    return f1, f2


@dataclass(frozen=True)
class BinStats:
    """All per-bin Gaussian statistics of one quantizer at mean zero.

    Arrays ``f``, ``f1``, ``f2`` have length 2^bits.  ``score_ratio`` is
    F'/F (the per-bin detector weight) and ``info_per_energy`` the scalar
    sum_i (F'_i^2 - F''_i F_i)/F_i, i.e. the Fisher information per unit
    of signal energy; log-concavity of the Gaussian makes every summand,
    hence the sum, strictly positive.
    """

    f: np.ndarray
    f1: np.ndarray
    f2: np.ndarray

    def __post_init__(self):
        for name in ("f", "f1", "f2"):
            a = np.asarray(getattr(self, name), dtype=float).copy()
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def score_ratio(self) -> np.ndarray:
        return self.f1 / self.f

    @property
    def info_per_energy(self) -> float:
        return float(np.sum((self.f1 ** 2 - self.f2 * self.f) / self.f))


def bin_stats_table(
    thresholds: ThresholdSet, noise_power: float, floor: float = 1e-300
) -> BinStats:
    """Precompute (F, F', F'') for every bin at u = 0.

    Raises
    ------
    DegenerateBinError
        If any bin mass falls below ``floor`` -- such a quantizer cannot
        be scored or run without dividing by (near) zero.
    """
    if not noise_power > 0.0:
        raise ValueError("noise_power must be positive")
    f, f1, f2 = _stats_from_edges(thresholds.edges(), 0.0, noise_power)
    if f.min() < floor:
        worst = int(np.argmin(f))
        raise DegenerateBinError(
            f"bin {worst + 1} of {thresholds.n_bins} has mass {f[worst]:.3e} < {floor:g}"
        )
    return BinStats(f=f, f1=f1, f2=f2)
