"""Stationary Gaussian processes with a prescribed spectral measure.

Paths are synthesized harmonically,

    X_t = sum_j sqrt(2 w_j) (A_j cos 2 pi x_j t + B_j sin 2 pi x_j t),

so that ``Cov(X_u, X_{u+t})`` is the transform of the symmetrized spectral
measure at ``t``.  A density part is represented per path by ``M`` frequencies
drawn from the normalized density, each carrying weight ``mass / M``; the
covariance stays unbiased and every one-time marginal is exactly Gaussian.

Randomness comes from NumPy's Philox counter-based generator keyed by the seed,
with the path index in the high counter word, so path ``p`` is the same no matter
how many paths are drawn or in which order.
"""

from __future__ import annotations

import hashlib
import json
import math
import struct
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats

from .specmeasure import Measure, bochner, symmetrize
from .specmeasure.io import dumps_json

DEFAULT_FREQS = 256
MIN_GAUSS_PATHS = 100
MAX_GAUSS_TIMES = 10
GRID_TOL = 1e-9
MAGIC = b"KLPATHS1"


@dataclass(frozen=True)
class ProcessSpec:
    spectral: Measure
    t0: float = 0.0
    step: float = 0.25
    count: int = 64
    paths: int = 1000
    seed: int = 0
    density_freqs: int = DEFAULT_FREQS
    assignment: dict | None = None

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.count < 1 or self.paths < 1:
            raise ValueError("count and paths must be >= 1")
        if not float(self.spectral.total_mass) > 0:
            raise ValueError("spectral measure has zero mass")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def numeric_spectral(self) -> Measure:
        return self.spectral.evaluate(self.assignment) if self.spectral.tier == "symbolic" \
            else self.spectral

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(self.count)

    def measure_hash(self) -> str:
        return hashlib.sha256(dumps_json(self.spectral).encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class PathSample:
    """``values[p, n]`` is path ``p`` at time ``time_scale * times[n]``."""

    times: np.ndarray
    values: np.ndarray
    spec: ProcessSpec
    time_scale: float = 1.0

    def __post_init__(self):
        if self.values.shape != (self.spec.paths, len(self.times)):
            raise ValueError("values must have shape (paths, len(times))")

    @property
    def effective_step(self) -> float:
        return self.spec.step * self.time_scale


def _path_rng(seed: int, path: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, path]))


def _coefficients(spec: ProcessSpec, atoms, pieces, path: int):
    """Frequencies, amplitudes and Gaussian coefficients for one path."""
    rng = _path_rng(spec.seed, path)
    freqs = [x for x, _ in atoms]
    amps = [math.sqrt(2 * w) for _, w in atoms]
    if pieces:
        masses = np.array([(u - l) * v for l, u, v in pieces])
        total = float(masses.sum())
        which = rng.choice(len(pieces), size=spec.density_freqs, p=masses / total)
        offs = rng.random(spec.density_freqs)
        lo = np.array([pieces[k][0] for k in which])
        hi = np.array([pieces[k][1] for k in which])
        freqs += list(lo + offs * (hi - lo))
        amps += [math.sqrt(2 * total / spec.density_freqs)] * spec.density_freqs
    ab = rng.standard_normal((2, len(freqs)))
    return np.array(freqs), np.array(amps), ab


def _evaluate(spec: ProcessSpec, times: np.ndarray) -> np.ndarray:
    m = spec.numeric_spectral()
    atoms = m.float_atoms()
    pieces = m.float_density()
    out = np.empty((spec.paths, len(times)))
    if not pieces:
        # every path shares the frequencies, so one matrix product does the work
        coef = np.empty((spec.paths, 2 * len(atoms)))
        for p in range(spec.paths):
            freqs, amps, ab = _coefficients(spec, atoms, pieces, p)
            coef[p] = np.concatenate([amps * ab[0], amps * ab[1]])
        phase = 2 * np.pi * np.outer(freqs, times)
        basis = np.concatenate([np.cos(phase), np.sin(phase)])
        return coef @ basis
    for p in range(spec.paths):
        freqs, amps, ab = _coefficients(spec, atoms, pieces, p)
        phase = 2 * np.pi * np.outer(freqs, times)
        out[p] = (amps * ab[0]) @ np.cos(phase) + (amps * ab[1]) @ np.sin(phase)
    return out


def simulate(spec: ProcessSpec) -> PathSample:
    times = spec.times
    return PathSample(times, _evaluate(spec, times), spec, 1.0)


def regenerate(sample: PathSample, times) -> np.ndarray:
    """Values of the same paths at arbitrary (unscaled) times."""
    return _evaluate(sample.spec, np.asarray(times, dtype=float) * sample.time_scale)


def rescale_paths(sample: PathSample, s: float) -> PathSample:
    """The process ``t -> X_{s t}``, regenerated from the seed rather than interpolated."""
    if not s > 0:
        raise ValueError("scale must be positive")
    scale = sample.time_scale * s
    values = _evaluate(sample.spec, sample.times * scale)
    return PathSample(sample.times, values, sample.spec, scale)


def theoretical_covariance(spec: ProcessSpec, t: float) -> float:
    """Transform of the symmetrized spectral measure at ``t``."""
    return bochner(symmetrize(spec.numeric_spectral()), t).real


# -- covariance ------------------------------------------------------------------------


@dataclass(frozen=True)
class CovarianceReport:
    lags: list
    empirical: list
    theoretical: list
    stderr: list

    def within(self, k: float = 3.0) -> list[bool]:
        return [abs(e - t) <= k * s for e, t, s in zip(self.empirical, self.theoretical, self.stderr)]

    def to_dict(self) -> dict:
        return {"lags": self.lags, "empirical": self.empirical,
                "theoretical": self.theoretical, "stderr": self.stderr}


def _lag_index(sample: PathSample, lag: float) -> int:
    k = lag / sample.spec.step
    n = round(k)
    if abs(k - n) > GRID_TOL * max(1.0, abs(k)) or n < 0:
        raise ValueError(f"lag {lag} is not a nonnegative multiple of the step {sample.spec.step}")
    if n >= len(sample.times):
        raise ValueError(f"lag {lag} exceeds the grid span")
    return n


def empirical_autocovariance(sample: PathSample, lags) -> CovarianceReport:
    """Mean of ``X_u X_{u+lag}``: averaged over base times ``u`` within a path, then across paths.

    The mean is known to be zero, so the estimate is unbiased; ``stderr`` is the
    spread of the per-path averages over ``sqrt(paths)``.
    """
    if sample.spec.paths < 2:
        raise ValueError("at least two paths are needed for a standard error")
    X = sample.values
    emp, theo, err = [], [], []
    for lag in lags:
        n = _lag_index(sample, float(lag))
        per_path = (X[:, :X.shape[1] - n] * X[:, n:]).mean(axis=1)
        emp.append(float(per_path.mean()))
        err.append(float(per_path.std(ddof=1) / math.sqrt(len(per_path))))
        theo.append(theoretical_covariance(sample.spec, float(lag) * sample.time_scale))
    return CovarianceReport([float(l) for l in lags], emp, theo, err)


# -- spectrum --------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralEstimate:
    freqs: np.ndarray
    power: np.ndarray
    stderr: np.ndarray
    bin_width: float

    def peaks(self, rel_threshold: float = 0.1) -> list[tuple[float, float, float]]:
        """Local maxima above ``rel_threshold`` times the largest power."""
        p = self.power
        floor = rel_threshold * float(p.max())
        out = []
        for i in range(len(p)):
            left = p[i - 1] if i > 0 else -np.inf
            right = p[i + 1] if i + 1 < len(p) else -np.inf
            if p[i] >= floor and p[i] > left and p[i] >= right:
                out.append((float(self.freqs[i]), float(p[i]), float(self.stderr[i])))
        return out

    def to_rows(self) -> list[tuple[float, float]]:
        return [(float(f), float(v)) for f, v in zip(self.freqs, self.power)]


def min_gap(sample: PathSample) -> float:
    xs = sorted({s * x for x, _ in sample.spec.numeric_spectral().float_atoms()
                 for s in (sample.time_scale, -sample.time_scale)})
    gaps = [b - a for a, b in zip(xs, xs[1:]) if b > a]
    return min(gaps) if gaps else math.inf


def spectral_estimate(sample: PathSample, freq_grid=None) -> SpectralEstimate:
    """Path-averaged periodogram ``|sum_n X_n exp(-2 pi i f t_n)|**2 / N**2``.

    With no ``freq_grid`` the FFT bins ``k / (N * step)`` up to Nyquist are used.
    A peak of an atom ``(x, w)`` sitting on a bin has expected power ``w``.
    """
    # frequencies are in the sample's own time variable: X_{s t} oscillates at s * x
    N = len(sample.times)
    dt = sample.spec.step
    span = N * dt
    gap = min_gap(sample)
    if gap < math.inf and span < 4 / gap:
        raise ValueError(f"span {span:g} is below 4 / min-gap = {4 / gap:g}")
    top = max((abs(x) * sample.time_scale for x, _ in sample.spec.numeric_spectral().float_atoms()),
              default=0.0)
    if top > 1 / (2 * dt):
        warnings.warn(f"frequency {top:g} exceeds Nyquist {1 / (2 * dt):g}; peaks will alias",
                      RuntimeWarning, stacklevel=2)
    X = sample.values
    if freq_grid is None:
        spec = np.fft.rfft(X, axis=1)
        freqs = np.fft.rfftfreq(N, dt)
    else:
        freqs = np.asarray(freq_grid, dtype=float)
        spec = X @ np.exp(-2j * np.pi * np.outer(sample.times, freqs))
    per_path = np.abs(spec) ** 2 / N**2
    power = per_path.mean(axis=0)
    stderr = per_path.std(axis=0, ddof=1) / math.sqrt(X.shape[0]) if X.shape[0] > 1 \
        else np.zeros_like(power)
    width = float(freqs[1] - freqs[0]) if len(freqs) > 1 else 1 / span
    return SpectralEstimate(freqs, power, stderr, width)


# -- rigidity and Gaussianity --------------------------------------------------------------


def rigidity_check(sample: PathSample, t_w: float, tol: float = 0.01) -> dict:
    """Second-order rigidity along ``t_w``: ``E|X_{u+t_w} - X_u|^2`` against ``tol * Var``."""
    shifted = regenerate(sample, sample.times + t_w)
    diff2 = (shifted - sample.values) ** 2
    per_path = diff2.mean(axis=1)
    empirical = float(per_path.mean())
    stderr = float(per_path.std(ddof=1) / math.sqrt(len(per_path))) if len(per_path) > 1 else 0.0
    var = theoretical_covariance(sample.spec, 0.0)
    theo = 2 * (var - theoretical_covariance(sample.spec, t_w * sample.time_scale))
    theo = max(theo, 0.0)
    agree = abs(empirical - theo) <= 3 * stderr or empirical == theo
    return {
        "t_w": float(t_w), "tol": tol, "variance": var,
        "theoretical": theo, "empirical": empirical, "stderr": stderr,
        "theoretical_below": theo < tol * var, "empirical_below": empirical < tol * var,
        "agree_3se": bool(agree),
        "passed": bool(theo < tol * var and empirical < tol * var and agree),
    }


def gaussianity_test(sample: PathSample, alpha: float = 0.01, n_times: int = MAX_GAUSS_TIMES) -> dict:
    """D'Agostino-Pearson omnibus test of the one-time marginals, Bonferroni across times."""
    X = sample.values
    if X.shape[0] < MIN_GAUSS_PATHS:
        raise ValueError(f"need at least {MIN_GAUSS_PATHS} paths")
    k = min(n_times, MAX_GAUSS_TIMES, X.shape[1])
    idx = np.unique(np.linspace(0, X.shape[1] - 1, k).round().astype(int))
    rows = []
    for i in idx:
        col = X[:, i]
        if not np.std(col) > 0:
            return {"status": "degenerate-variance", "passed": False, "alpha": alpha,
                    "time": float(sample.times[i]), "results": rows}
        stat, p = stats.normaltest(col)
        rows.append({"time": float(sample.times[i]), "statistic": float(stat), "pvalue": float(p)})
    level = alpha / len(rows)
    passed = all(r["pvalue"] >= level for r in rows)
    return {"status": "pass" if passed else "reject", "passed": passed, "alpha": alpha,
            "bonferroni_level": level, "results": rows}


# -- export ----------------------------------------------------------------------------


def to_csv(sample: PathSample) -> str:
    lines = ["time," + ",".join(f"path{p}" for p in range(sample.values.shape[0]))]
    for n, t in enumerate(sample.times * sample.time_scale):
        lines.append(repr(float(t)) + "," + ",".join(repr(float(v)) for v in sample.values[:, n]))
    return "\n".join(lines) + "\n"


def header(sample: PathSample) -> dict:
    s = sample.spec
    return {"seed": s.seed, "grid": {"t0": s.t0, "step": s.step, "count": s.count},
            "paths": s.paths, "time_scale": sample.time_scale, "density_freqs": s.density_freqs,
            "measure_hash": s.measure_hash(), "dtype": "<f8"}


def to_binary(sample: PathSample) -> bytes:
    """``MAGIC``, 4-byte little-endian header length, JSON header, float64 values row-major."""
    head = json.dumps(header(sample), sort_keys=True).encode()
    body = np.ascontiguousarray(sample.values, dtype="<f8").tobytes()
    return MAGIC + struct.pack("<I", len(head)) + head + body


def from_binary(data: bytes) -> tuple[dict, np.ndarray]:
    if not data.startswith(MAGIC):
        raise ValueError("not a path file")
    (n,) = struct.unpack_from("<I", data, len(MAGIC))
    start = len(MAGIC) + 4
    head = json.loads(data[start:start + n])
    values = np.frombuffer(data[start + n:], dtype="<f8")
    return head, values.reshape(head["paths"], head["grid"]["count"])


def with_paths(spec: ProcessSpec, paths: int) -> ProcessSpec:
    return replace(spec, paths=paths)
