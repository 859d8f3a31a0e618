"""SVD of the channel matrix, Marcenko-Pastur noise calibration, rank selection
and optional Frobenius-optimal singular-value shrinkage."""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import PipelineError, ValidationError
from .model import ChannelMatrix


@dataclass(frozen=True)
class SourceDecomposition:
    """Thin SVD of the filtered matrix plus noise and rank estimates.

    ``left_vectors`` is (n_r, k) with orthonormal columns; ``right_vectors``
    is (k, n_t) with orthonormal rows; k = min(n_r, n_t).
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray
    noise_sigma: float
    beta: float
    retained_rank: int
    sample_rate_hz: float
    degenerate: bool = False

    @property
    def n_regions(self):
        return self.left_vectors.shape[0]

    @property
    def n_frames(self):
        return self.right_vectors.shape[1]

    def reconstruct(self):
        return (self.left_vectors * self.singular_values) @ self.right_vectors


def mp_support(beta):
    """Support edges (1 -+ sqrt(beta))^2 of the Marcenko-Pastur law."""
    sq = np.sqrt(beta)
    return (1.0 - sq) ** 2, (1.0 + sq) ** 2


def _mp_density(x, beta):
    lam_minus, lam_plus = mp_support(beta)
    inside = (x > lam_minus) & (x < lam_plus)
    out = np.zeros_like(np.asarray(x, dtype=float))
    xi = np.asarray(x, dtype=float)[inside]
    out[inside] = np.sqrt((lam_plus - xi) * (xi - lam_minus)) / (2 * np.pi * beta * xi)
    return out


def mp_median(beta):
    """Median of the Marcenko-Pastur distribution with aspect ratio beta.

    Solved by adaptive quadrature of the density plus root bracketing; no
    closed form exists.
    """
    if not 0 < beta <= 1:
        raise ValidationError(f"beta must be in (0, 1], got {beta}")
    lam_minus, lam_plus = mp_support(beta)

    def cdf_minus_half(m):
        val, _ = integrate.quad(
            lambda x: float(_mp_density(np.array([x]), beta)[0]),
            lam_minus, m, limit=400, epsabs=1e-12, epsrel=1e-12,
        )
        return val - 0.5

    eps = (lam_plus - lam_minus) * 1e-12
    return optimize.brentq(cdf_minus_half, lam_minus + eps, lam_plus - eps, xtol=1e-9)


def svd(channels: ChannelMatrix) -> SourceDecomposition:
    """Full thin SVD with noise level and retained rank populated.

    Sign convention: the first nonzero entry of each left vector is made
    positive so the factorization is reproducible.
    """
    if not channels.filtered:
        raise ValidationError("decomposition expects a bandpass-filtered matrix")
    y = channels.values
    try:
        u, s, vt = np.linalg.svd(y, full_matrices=False)
    except np.linalg.LinAlgError as e:
        raise PipelineError("decomposition", f"SVD did not converge: {e}") from e
    # resolve sign indeterminacy
    for i in range(u.shape[1]):
        col = u[:, i]
        nz = np.flatnonzero(col != 0)
        if nz.size and col[nz[0]] < 0:
            u[:, i] = -col
            vt[i, :] = -vt[i, :]
    n_r, n_t = y.shape
    beta = min(n_r, n_t) / max(n_r, n_t)
    decomp = SourceDecomposition(
        left_vectors=u, singular_values=s, right_vectors=vt,
        noise_sigma=0.0, beta=beta, retained_rank=0,
        sample_rate_hz=channels.meta.sample_rate_hz,
    )
    sigma_hat, degenerate = estimate_noise(decomp)
    decomp = SourceDecomposition(
        left_vectors=u, singular_values=s, right_vectors=vt,
        noise_sigma=sigma_hat, beta=beta, retained_rank=0,
        sample_rate_hz=channels.meta.sample_rate_hz, degenerate=degenerate,
    )
    rank = select_rank(decomp)
    return SourceDecomposition(
        left_vectors=u, singular_values=s, right_vectors=vt,
        noise_sigma=sigma_hat, beta=beta, retained_rank=rank,
        sample_rate_hz=channels.meta.sample_rate_hz, degenerate=degenerate,
    )


def estimate_noise(decomp: SourceDecomposition):
    """Noise level from the singular-value median against the MP median.

    Singular values of an n_r x n_t unit-noise matrix concentrate at
    sqrt(max(n_r, n_t) * x) with x Marcenko-Pastur distributed, hence the
    sqrt(max dim) normalization.  Returns (sigma_hat, degenerate).
    """
    s = decomp.singular_values
    if not len(s) or np.all(s == 0):
        return 0.0, True
    n_big = max(decomp.n_regions, decomp.n_frames)
    mu_b = mp_median(decomp.beta)
    return float(np.median(s) / (np.sqrt(mu_b) * np.sqrt(n_big))), False


def _normalized_sv(decomp: SourceDecomposition):
    n_big = max(decomp.n_regions, decomp.n_frames)
    return decomp.singular_values / (decomp.noise_sigma * np.sqrt(n_big))


def select_rank(decomp: SourceDecomposition) -> int:
    """Count singular values whose shrinkage weight is positive: y > 1 + sqrt(beta)."""
    if decomp.degenerate or decomp.noise_sigma == 0:
        return 0
    y = _normalized_sv(decomp)
    return int(np.sum(y > 1.0 + np.sqrt(decomp.beta)))


def shrinkage_weight(y, beta):
    """Frobenius-optimal shrinker: sqrt((y^2-beta-1)^2 - 4 beta)/y above the
    detection edge 1+sqrt(beta), zero below."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    above = y > 1.0 + np.sqrt(beta)
    ya = y[above]
    out[above] = np.sqrt((ya ** 2 - beta - 1.0) ** 2 - 4.0 * beta) / ya
    return out


def optimal_shrink(decomp: SourceDecomposition, template: ChannelMatrix) -> ChannelMatrix:
    """Denoised matrix from shrunken singular values; output rank = retained rank."""
    if decomp.degenerate or decomp.noise_sigma == 0:
        warnings.warn("degenerate noise estimate; returning input unchanged")
        return template
    n_big = max(decomp.n_regions, decomp.n_frames)
    y = _normalized_sv(decomp)
    shrunk = decomp.noise_sigma * np.sqrt(n_big) * shrinkage_weight(y, decomp.beta)
    denoised = (decomp.left_vectors * shrunk) @ decomp.right_vectors
    return template.with_values(denoised)


def write_scree(decomp: SourceDecomposition, path):
    """Dump (singular value, threshold, retained) rows for scree plots."""
    if decomp.noise_sigma > 0:
        n_big = max(decomp.n_regions, decomp.n_frames)
        thr = (1.0 + np.sqrt(decomp.beta)) * decomp.noise_sigma * np.sqrt(n_big)
    else:
        thr = np.inf
    with open(path, "w") as f:
        f.write("# singular_value threshold retained\n")
        for i, s in enumerate(decomp.singular_values):
            f.write(f"{s!r} {thr!r} {int(i < decomp.retained_rank)}\n")
