"""Target scenes and sub-Nyquist measurement synthesis.

Two synthesis paths produce the K x P matrix of normalized Fourier
coefficients Ybar_p[kappa_k] = pri * Y_p[kappa_k] / H(omega_k):

* :func:`synthesize_model` evaluates the semi-periodic FRI approximation
  Ybar_p[k] = sum_s a_s exp(j 2 pi f_s p pri) exp(-j omega_k t_s) directly.
* :func:`synthesize_time_oracle` + :func:`fourier_extract` build the
  Nyquist-rate echo in the time domain and take per-PRI DFT bins.

DFT convention, used everywhere: for a band-limited PRI sampled at
L = round(pri * B_h) points, c_k = DFT_k / L, negative k read from bin L + k.
"""

from dataclasses import dataclass

import numpy as np

from .dictionaries import (
    SamplingIndexSet,
    _snap_int,
    delay_grid,
    doppler_grid,
    fourier_range,
)
from .errors import DelayOverrun, NumericallyUnsampledBin, ValidationError
from .waveforms import fourier_coefficients, sample_time

#: sampled bins whose |c_k| falls below this fraction of max |c| are rejected
COEFF_GUARD = 1e-6


@dataclass(frozen=True)
class RadarParams:
    pri: float
    bandwidth: float
    pulses: int
    delay_grids: int
    doppler_grids: int

    def __post_init__(self):
        if self.pri <= 0 or self.bandwidth <= 0:
            raise ValidationError("pri and bandwidth must be positive")
        if self.pulses < 1 or self.doppler_grids < 1 or self.delay_grids < 1:
            raise ValidationError("pulses, delay and Doppler grid counts must be >= 1")
        if self.delay_grids > self.fourier_range.size:
            raise ValidationError(
                f"N={self.delay_grids} exceeds |I|={self.fourier_range.size}"
            )

    @property
    def P(self):
        return self.pulses

    @property
    def N(self):
        return self.delay_grids

    @property
    def M(self):
        return self.doppler_grids

    @property
    def fourier_range(self):
        return fourier_range(self.pri, self.bandwidth)

    @property
    def nyquist_per_pri(self):
        return int(round(_snap_int(self.pri * self.bandwidth)))

    @property
    def delay_bin(self):
        return 1.0 / self.bandwidth

    @property
    def doppler_bin(self):
        return 1.0 / (self.pulses * self.pri)

    def delay_grid(self):
        return delay_grid(self.pri, self.delay_grids)

    def doppler_grid(self):
        return doppler_grid(self.pri, self.doppler_grids)


@dataclass(frozen=True)
class Target:
    attenuation: complex
    delay: float
    doppler: float


@dataclass(frozen=True)
class Scene:
    targets: tuple = ()

    def __len__(self):
        return len(self.targets)

    def __iter__(self):
        return iter(self.targets)

    @property
    def amplitudes(self):
        return np.array([t.attenuation for t in self.targets], dtype=complex)

    @property
    def delays(self):
        return np.array([t.delay for t in self.targets], dtype=float)

    @property
    def dopplers(self):
        return np.array([t.doppler for t in self.targets], dtype=float)

    def to_rows(self):
        return [
            (i, t.attenuation.real, t.attenuation.imag, t.delay, t.doppler)
            for i, t in enumerate(self.targets)
        ]


SCENE_HEADER = ("target_id", "re_a", "im_a", "delay_s", "doppler_hz")


def random_scene(S, params, rng, on_grid=False, max_delay=None):
    """S unit-amplitude targets, uniform over the unambiguous region.

    ``max_delay`` (default ``pri``) shrinks the delay interval, e.g. to
    ``pri - T_p`` so echoes never spill past the PRI.  With ``on_grid`` the
    delay and Doppler are snapped to grid points below the bound.
    """
    if S < 0:
        raise ValidationError("S must be non-negative")
    rng = np.random.default_rng(rng)
    tau = params.pri
    max_delay = tau if max_delay is None else max_delay
    if not 0 < max_delay <= tau:
        raise ValidationError(f"max_delay must lie in (0, pri], got {max_delay}")
    phase = rng.uniform(0, 2 * np.pi, S)
    if on_grid:
        n_max = max(1, int(np.ceil(max_delay / tau * params.N - 1e-9)))
        n = rng.integers(0, n_max, S)
        m = rng.integers(0, params.M, S)
        delays = params.delay_grid()[n]
        dopplers = params.doppler_grid()[m]
    else:
        delays = rng.uniform(0, max_delay, S)
        dopplers = rng.uniform(-0.5 / tau, 0.5 / tau, S)
    return Scene(
        tuple(
            Target(complex(np.exp(1j * ph)), float(t), float(f))
            for ph, t, f in zip(phase, delays, dopplers)
        )
    )


def grid_scene(cells, params, amplitudes=None):
    """Scene of on-grid targets at (m, n) Doppler/delay grid indices."""
    dg, fg = params.delay_grid(), params.doppler_grid()
    if amplitudes is None:
        amplitudes = [1.0] * len(cells)
    return Scene(
        tuple(Target(complex(a), float(dg[n]), float(fg[m])) for (m, n), a in zip(cells, amplitudes))
    )


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    values: np.ndarray
    sampling: SamplingIndexSet
    noisy: bool = False

    @property
    def shape(self):
        return self.values.shape


def _kappa(sampling):
    if isinstance(sampling, SamplingIndexSet):
        return sampling.as_array()
    return np.asarray(sampling, dtype=np.int64)


def synthesize_model(scene, sampling, params):
    kappa = _kappa(sampling).astype(float)
    p = np.arange(params.P)
    if len(scene) == 0:
        Y = np.zeros((kappa.size, params.P), dtype=complex)
    else:
        a, t, f = scene.amplitudes, scene.delays, scene.dopplers
        delay_part = np.exp(-2j * np.pi * np.outer(kappa, t) / params.pri) * a
        doppler_part = np.exp(2j * np.pi * np.outer(f, p) * params.pri)
        Y = delay_part @ doppler_part
    return MeasurementMatrix(Y, sampling if isinstance(sampling, SamplingIndexSet) else None)


def synthesize_time_oracle(scene, waveform, params, wrap=True):
    """P x L Nyquist-rate samples of the received echo, one row per PRI.

    With ``wrap`` the pulse train is treated as already running before the
    CPI, so the tail of pulse p-1 lands at the start of PRI p.  Without it,
    any echo reaching past the PRI raises :class:`DelayOverrun`.
    """
    L = params.nyquist_per_pri
    tau = params.pri
    blocks = np.zeros((params.P, L), dtype=complex)
    l = np.arange(L)
    p = np.arange(params.P)[:, None]
    for tgt in scene:
        if not 0 <= tgt.delay < tau:
            raise DelayOverrun(f"delay {tgt.delay} outside [0, pri)")
        if not wrap and tgt.delay + waveform.pulse_width > tau * (1 + 1e-12):
            raise DelayOverrun(
                f"echo at {tgt.delay:.4g}s with T_p={waveform.pulse_width:.4g}s crosses the PRI"
            )
        if tgt.attenuation == 0:
            continue
        # offsets in sample units, snapped so on-grid delays hit samples exactly
        u = np.array([_snap_int(x) for x in (l - tgt.delay * L / tau)])
        env = sample_time(waveform, u * tau / L)
        if wrap:
            env = env + sample_time(waveform, (u + L) * tau / L)
        t_abs = p * tau + l * tau / L
        blocks += tgt.attenuation * env[None, :] * np.exp(2j * np.pi * tgt.doppler * t_abs)
    return blocks


def waveform_coefficients(waveform, sampling, guard=COEFF_GUARD, reference=None):
    """c_k at the sampled bins, refusing bins that carry no pulse energy.

    ``reference`` is the magnitude the guard is relative to; by default the
    largest |c_k| over the sampled bins and the DC bin.
    """
    kappa = _kappa(sampling)
    c = fourier_coefficients(waveform, kappa)
    if reference is None:
        reference = max(np.abs(c).max(), np.abs(fourier_coefficients(waveform, [0]))[0])
    weak = np.abs(c) < guard * reference
    if np.any(weak):
        raise NumericallyUnsampledBin(
            f"{waveform.kind.value} pulse has ~zero energy at bins {kappa[weak][:8].tolist()}"
        )
    return c


def fourier_extract(blocks, sampling, waveform):
    """Per-PRI Fourier coefficients at the sampled bins, divided by c_k."""
    blocks = np.asarray(blocks)
    L = blocks.shape[1]
    kappa = _kappa(sampling)
    if np.any(np.abs(kappa) >= L / 2 + 0.5):
        raise ValidationError("sampled bins exceed the Nyquist range of the blocks")
    c = waveform_coefficients(waveform, kappa)
    spectra = np.fft.fft(blocks, axis=1) / L
    Y = spectra[:, kappa % L].T / c[:, None]
    return MeasurementMatrix(Y, sampling if isinstance(sampling, SamplingIndexSet) else None)


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float
    seed: int = 0


def pulse_samples(waveform):
    """Nyquist samples of one pulse, L_p = floor(T_p * B_h) long."""
    Lp = max(1, waveform.nyquist_length())
    return sample_time(waveform, np.arange(Lp) / waveform.bandwidth)


def discrete_snr(h, attenuation, sigma2):
    """||a h||^2 / (L sigma_w^2)."""
    h = np.asarray(h)
    return float(np.sum(np.abs(attenuation * h) ** 2) / (h.size * sigma2))


def noise_variance(snr_db, waveform, attenuation=1.0):
    """Per-sample sigma_w^2 giving the requested SNR for a reference target."""
    snr = 10.0 ** (snr_db / 10.0)
    if np.isinf(snr):
        return 0.0
    return discrete_snr(pulse_samples(waveform), attenuation, 1.0) / snr


def complex_gaussian(rng, shape, variance):
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def coefficient_noise_std(sigma2, waveform, sampling, L):
    """Std of normalized-coefficient noise at each sampled bin.

    Time noise of variance sigma2 per sample maps to sigma2 / L per DFT
    coefficient, then to sigma2 / (L |c_k|^2) after dividing by c_k.
    """
    c = waveform_coefficients(waveform, sampling)
    return np.sqrt(sigma2 / L) / np.abs(c)


def add_noise(data, noise, waveform, params, sampling=None, rng=None):
    """Add AWGN calibrated to ``noise.snr_db``.

    ``data`` is either P x L time blocks (noise added per Nyquist sample) or
    a :class:`MeasurementMatrix` (the equivalent per-coefficient noise).
    """
    rng = np.random.default_rng(noise.seed if rng is None else rng)
    sigma2 = noise_variance(noise.snr_db, waveform)
    if isinstance(data, MeasurementMatrix):
        Y = data.values
        if sigma2 == 0:
            return MeasurementMatrix(Y.copy(), data.sampling, data.noisy)
        samp = sampling if sampling is not None else data.sampling
        std = coefficient_noise_std(sigma2, waveform, samp, params.nyquist_per_pri)
        W = complex_gaussian(rng, Y.shape, 1.0) * std[:, None]
        return MeasurementMatrix(Y + W, data.sampling, True)
    blocks = np.asarray(data)
    if sigma2 == 0:
        return blocks.copy()
    return blocks + complex_gaussian(rng, blocks.shape, sigma2)


def quadrature_coefficients(scene, waveform, sampling, params, wrap=True, rtol=1e-10):
    """Normalized coefficients from the continuous per-PRI Fourier integral.

    Integrates (1/pri) * int_0^pri y_p(t) exp(-j omega_k t) dt numerically,
    with no small-Doppler approximation, then divides by c_k.  Slow; meant
    as an independent reference for both synthesis paths.
    """
    from scipy import integrate

    kappa = _kappa(sampling).astype(float)
    tau = params.pri
    c = waveform_coefficients(waveform, kappa.astype(np.int64))
    Y = np.zeros((kappa.size, params.P), dtype=complex)
    for tgt in scene:
        for p in range(params.P):

            def integrand(t):
                env = sample_time(waveform, t - tgt.delay)
                if wrap:
                    env = env + sample_time(waveform, t - tgt.delay + tau)
                val = env * np.exp(2j * np.pi * tgt.doppler * (p * tau + t))
                val = val * np.exp(-2j * np.pi * kappa * t / tau)
                return np.concatenate([val.real, val.imag])

            # break at the pulse edges so the integrand is smooth on each piece
            edges = {0.0, tau}
            for e in (tgt.delay, tgt.delay + waveform.pulse_width, tgt.delay + waveform.pulse_width - tau):
                if 0 < e < tau:
                    edges.add(e)
            edges = sorted(edges)
            acc = np.zeros(2 * kappa.size)
            for a, b in zip(edges[:-1], edges[1:]):
                val, _ = integrate.quad_vec(integrand, a, b, epsrel=rtol, epsabs=1e-13 * tau, limit=500)
                acc += val
            Y[:, p] += tgt.attenuation * (acc[: kappa.size] + 1j * acc[kappa.size:]) / tau
    return Y / c[:, None]
