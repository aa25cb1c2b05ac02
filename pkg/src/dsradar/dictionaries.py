"""Sampling index sets, delay/Doppler partial-Fourier dictionaries, coherence."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .ds_codes import DifferenceSet, equivalent_shift
from .errors import (
    DimensionOverflow,
    DSOutOfRange,
    NonPositiveParameter,
    TooManyIndices,
    ValidationError,
    ZeroColumn,
)

#: default ceiling for a dense Kronecker dictionary, in bytes
KRON_MEMORY_BUDGET = 512 * 2**20


def _snap_int(x, rtol=1e-9):
    """Round ``x`` to the nearest integer if it is within float noise of it."""
    r = round(x)
    if abs(x - r) <= rtol * max(1.0, abs(x)):
        return float(r)
    return x


class Scheme(str, Enum):
    CONSECUTIVE = "consecutive"
    RANDOM = "random"
    DS = "ds"


@dataclass(frozen=True)
class FourierRange:
    lo: int
    hi: int

    @property
    def size(self):
        return self.hi - self.lo + 1

    def __contains__(self, k):
        return self.lo <= k <= self.hi

    def indices(self):
        return np.arange(self.lo, self.hi + 1)


def fourier_range(pri, bandwidth):
    """Indices of the non-zero Fourier coefficients of a B_h-wide pulse.

    Returns ``{-ceil(pri*B/2), ..., floor(pri*B/2)}``.  Note this has
    ``pri*B + 1`` members when ``pri*B`` is an even integer.
    """
    if pri <= 0 or bandwidth <= 0:
        raise NonPositiveParameter("pri and bandwidth must be positive")
    half = _snap_int(pri * bandwidth / 2.0)
    return FourierRange(-int(math.ceil(half)), int(math.floor(half)))


@dataclass(frozen=True)
class SamplingIndexSet:
    scheme: Scheme
    indices: tuple
    fourier_range: FourierRange = None
    ds: DifferenceSet = field(default=None, compare=False)

    @property
    def K(self):
        return len(self.indices)

    def as_array(self):
        return np.asarray(self.indices, dtype=np.int64)


def build_sampling(scheme, K=None, rng_range=None, ds=None, seed=None):
    """Choose K Fourier-bin indices from ``rng_range``.

    consecutive: a contiguous block starting at ``-(K // 2)``.
    random:      K distinct uniform draws, reproducible from ``seed``.
    ds:          the zero-straddling equivalent of ``ds``; K is implied.
    """
    scheme = Scheme(scheme)
    frange = rng_range
    if scheme is Scheme.DS:
        if ds is None:
            raise ValidationError("DS scheme needs a difference set")
        idx = equivalent_shift(ds)
        if K is not None and K != len(idx):
            raise ValidationError(f"K={K} does not match |DS|={len(idx)}")
        if frange is not None and (idx[0] < frange.lo or idx[-1] > frange.hi):
            raise DSOutOfRange(
                f"shifted DS spans [{idx[0]}, {idx[-1]}], outside "
                f"Fourier range [{frange.lo}, {frange.hi}]"
            )
        return SamplingIndexSet(scheme, tuple(idx), frange, ds)

    if K is None or K < 1:
        raise ValidationError("K must be a positive integer")
    if frange is None:
        raise ValidationError(f"{scheme.value} scheme needs a Fourier range")
    if K > frange.size:
        raise TooManyIndices(f"K={K} exceeds |I|={frange.size}")
    if scheme is Scheme.CONSECUTIVE:
        start = -(K // 2)
        start = min(max(start, frange.lo), frange.hi - K + 1)
        idx = list(range(start, start + K))
    else:
        rng = np.random.default_rng(seed)
        idx = sorted(int(i) for i in rng.choice(frange.indices(), size=K, replace=False))
    return SamplingIndexSet(scheme, tuple(idx), frange)


@dataclass(frozen=True, eq=False)
class DelayDictionary:
    """K x N matrix with entries exp(-j 2 pi kappa_k n / N), n = 0..N-1."""

    kappa: np.ndarray
    N: int
    matrix: np.ndarray

    @property
    def K(self):
        return self.kappa.size

    @property
    def shape(self):
        return self.matrix.shape


@dataclass(frozen=True, eq=False)
class DopplerDictionary:
    """P x M matrix with entries exp(j 2 pi f_m p tau), p = 0..P-1."""

    grid: np.ndarray
    pri: float
    matrix: np.ndarray

    @property
    def P(self):
        return self.matrix.shape[0]

    @property
    def M(self):
        return self.matrix.shape[1]


def delay_grid(pri, N):
    return np.arange(N) * pri / N


def doppler_grid(pri, M):
    """Left-closed uniform grid over [-1/(2 pri), 1/(2 pri))."""
    return -0.5 / pri + np.arange(M) / (M * pri)


def delay_dictionary(sampling, N):
    kappa = np.asarray(
        sampling.as_array() if isinstance(sampling, SamplingIndexSet) else sampling,
        dtype=np.int64,
    )
    N = int(N)
    if N < kappa.size:
        raise ValidationError(f"N={N} must be >= K={kappa.size}")
    # exact integer phase reduction keeps entries accurate for large kappa*n
    phase = np.outer(kappa, np.arange(N)) % N
    mat = np.exp(-2j * np.pi * phase / N)
    mat.setflags(write=False)
    kappa.setflags(write=False)
    return DelayDictionary(kappa, N, mat)


def doppler_dictionary(P, M, pri):
    if P < 1 or M < 1:
        raise ValidationError("P and M must be >= 1")
    if pri <= 0:
        raise NonPositiveParameter("pri must be positive")
    f = doppler_grid(pri, M)
    # f_m * p * pri = p * (-1/2 + m/M); use the dimensionless form
    cycles = np.outer(np.arange(P), -0.5 + np.arange(M) / M)
    mat = np.exp(2j * np.pi * cycles)
    mat.setflags(write=False)
    return DopplerDictionary(f, pri, mat)


@dataclass(frozen=True, eq=False)
class CoherenceReport:
    mu: float
    welch: float
    mu_profile: np.ndarray = None


def welch_bound(N, K):
    if not (1 <= K <= N) or N < 2:
        raise ValidationError(f"need 1 <= K <= N and N >= 2, got N={N}, K={K}")
    return math.sqrt((N - K) / (K * (N - 1)))


def mu_profile(kappa, N):
    """mu(u) = |sum_k exp(-j 2 pi u kappa_k / N)| / K for u = 1..N-1.

    Uses an N-point FFT of the index-occupancy vector.
    """
    kappa = np.asarray(kappa, dtype=np.int64)
    occ = np.bincount(kappa % N, minlength=N).astype(float)
    prof = np.abs(np.fft.fft(occ)) / kappa.size
    return prof[1:]


def dirichlet_profile(K, N):
    """Closed-form mu(u) for a consecutive block of K indices."""
    u = np.arange(1, N)
    return np.abs(np.sin(np.pi * u * K / N) / np.sin(np.pi * u / N)) / K


def brute_force_coherence(matrix):
    """Largest normalized |<a_i, a_j>| over column pairs i != j."""
    A = np.asarray(matrix)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise ZeroColumn("dictionary has an all-zero column")
    An = A / norms
    G = np.abs(An.conj().T @ An)
    np.fill_diagonal(G, 0.0)
    return float(G.max())


def coherence(matrix):
    """Coherence report for a dictionary.

    A :class:`DelayDictionary` goes through the circulant shortcut and
    carries its full mu(u) profile; any other matrix is handled by
    brute-force Gram evaluation.
    """
    if isinstance(matrix, DelayDictionary):
        if matrix.N < 2:
            raise ValidationError("need at least two columns")
        prof = mu_profile(matrix.kappa, matrix.N)
        return CoherenceReport(float(prof.max()), welch_bound(matrix.N, min(matrix.K, matrix.N)), prof)
    A = np.asarray(getattr(matrix, "matrix", matrix))
    if A.ndim != 2 or A.shape[1] < 2:
        raise ValidationError("need a 2-D matrix with at least two columns")
    rows, cols = A.shape
    welch = welch_bound(cols, rows) if rows <= cols else 0.0
    return CoherenceReport(brute_force_coherence(A), welch)


def kronecker_dictionary(Phi, Psi, budget=KRON_MEMORY_BUDGET):
    """Dense A = Phi (x) Psi; rows ordered (k, p), columns (n, m)."""
    Phi = np.asarray(getattr(Phi, "matrix", Phi))
    Psi = np.asarray(getattr(Psi, "matrix", Psi))
    rows = Phi.shape[0] * Psi.shape[0]
    cols = Phi.shape[1] * Psi.shape[1]
    nbytes = rows * cols * np.dtype(np.complex128).itemsize
    if nbytes > budget:
        raise DimensionOverflow(
            f"{rows}x{cols} Kronecker dictionary needs {nbytes / 2**20:.0f} MiB "
            f"(budget {budget / 2**20:.0f} MiB)"
        )
    return np.kron(Phi, Psi)


def kronecker_shape(K, P, N, M):
    return K * P, N * M


def sparsity_bound(K):
    """floor((1 + sqrt(K)) / 2): delays recoverable from K DS samples."""
    return int(math.floor((1 + math.sqrt(K)) / 2))


def df_capacity(P, K):
    """floor(P/2 * (1 + sqrt(K))): targets recoverable by Doppler focusing."""
    return int(math.floor(P / 2 * (1 + math.sqrt(K))))
