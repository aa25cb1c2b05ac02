"""Baseband pulses: rectangular, LFM chirp and DS-FCM.

Every pulse lives on [0, T_p) and is scaled to unit average power over its
support.  ``fourier_coefficients`` returns the per-PRI Fourier-series
coefficients c_k = H(k / pri) / pri that normalize the measurements.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate

from .dictionaries import FourierRange, _snap_int
from .errors import QuadratureFailure, ValidationError, WrongKind


class Kind(str, Enum):
    RECT = "rect"
    LFM = "lfm"
    DSFCM = "dsfcm"


@dataclass(frozen=True)
class Waveform:
    kind: Kind
    pulse_width: float
    pri: float
    bandwidth: float
    indices: tuple = ()
    amplitude: float = 1.0

    @property
    def K(self):
        return len(self.indices)

    def nyquist_length(self):
        """floor(T_p * B_h): Nyquist samples spanned by the pulse."""
        return int(np.floor(_snap_int(self.pulse_width * self.bandwidth)))


def _dsfcm_raw_power(indices, pulse_width, pri):
    """(1/T_p) * integral |(1/K) sum_k e^{j 2 pi k t / pri}|^2 over [0, T_p)."""
    k = np.asarray(indices, dtype=float)
    d = (k[:, None] - k[None, :]) * pulse_width / pri
    cross = np.exp(1j * np.pi * d) * np.sinc(d)
    return float(np.real(cross.sum())) / k.size**2


def make_waveform(kind, pri, bandwidth, pulse_width=None, indices=None):
    """Build a unit-power pulse.

    Default pulse widths: rect 1/B_h (one Nyquist sample), LFM and DS-FCM
    the full PRI.  DS-FCM needs the (shifted) difference-set ``indices``.
    """
    kind = Kind(kind)
    if pri <= 0 or bandwidth <= 0:
        raise ValidationError("pri and bandwidth must be positive")
    if pulse_width is None:
        pulse_width = 1.0 / bandwidth if kind is Kind.RECT else pri
    if not 0 < pulse_width <= pri * (1 + 1e-12):
        raise ValidationError(f"need 0 < T_p <= pri, got T_p={pulse_width}")
    pulse_width = min(pulse_width, pri)
    if kind is Kind.DSFCM:
        if indices is None or len(indices) == 0:
            raise ValidationError("DS-FCM needs difference-set indices")
        idx = tuple(int(i) for i in indices)
        amp = 1.0 / np.sqrt(_dsfcm_raw_power(idx, pulse_width, pri))
        return Waveform(kind, pulse_width, pri, bandwidth, idx, float(amp))
    return Waveform(kind, pulse_width, pri, bandwidth)


def sample_time(w, t):
    """Complex pulse value at times ``t`` (seconds); zero off [0, T_p)."""
    t = np.asarray(t, dtype=float)
    inside = (t >= 0) & (t < w.pulse_width)
    if w.kind is Kind.RECT:
        out = np.ones_like(t, dtype=complex)
    elif w.kind is Kind.LFM:
        rate = w.bandwidth / w.pulse_width
        out = np.exp(1j * np.pi * rate * (t - w.pulse_width / 2) ** 2)
    else:
        k = np.asarray(w.indices, dtype=float)
        out = np.exp(2j * np.pi * np.multiply.outer(t, k) / w.pri).mean(axis=-1)
    return w.amplitude * np.where(inside, out, 0.0)


def _lfm_ctft(w, f, rtol=1e-8):
    f = np.atleast_1d(np.asarray(f, dtype=float))
    rate = w.bandwidth / w.pulse_width
    Tp = w.pulse_width

    def integrand(t):
        ph = np.pi * rate * (t - Tp / 2) ** 2 - 2 * np.pi * f * t
        return np.concatenate([np.cos(ph), np.sin(ph)])

    # split the support so every piece holds a bounded number of chirp cycles
    n_pieces = max(1, int(np.ceil(w.bandwidth * Tp / 50)))
    edges = np.linspace(0, Tp, n_pieces + 1)
    total = np.zeros(2 * f.size)
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad_vec(integrand, a, b, epsrel=rtol, epsabs=1e-14 * Tp, limit=2000)
        total += val
        err += e
    scale = np.linalg.norm(total) + 1e-300
    if err > 1e-6 * scale + 1e-12 * Tp * np.sqrt(f.size):
        raise QuadratureFailure(f"LFM spectrum quadrature error {err:.3g} too large")
    return w.amplitude * (total[: f.size] + 1j * total[f.size:])


def ctft(w, f):
    """Continuous-time Fourier transform H(f) = int h(t) e^{-j 2 pi f t} dt."""
    f = np.asarray(f, dtype=float)
    Tp = w.pulse_width
    if w.kind is Kind.RECT:
        return w.amplitude * Tp * np.exp(-1j * np.pi * f * Tp) * np.sinc(f * Tp)
    if w.kind is Kind.DSFCM:
        k = np.asarray(w.indices, dtype=float) / w.pri
        x = np.subtract.outer(f, k) * Tp
        terms = Tp * np.exp(-1j * np.pi * x) * np.sinc(x)
        return w.amplitude * terms.mean(axis=-1)
    return _lfm_ctft(w, f).reshape(f.shape)


def fourier_coefficients(w, indices):
    """c_k = (1/pri) * int_0^pri h(t) e^{-j 2 pi k t / pri} dt.

    ``indices`` is a :class:`FourierRange` or any integer sequence.
    """
    if isinstance(indices, FourierRange):
        indices = indices.indices()
    k = np.asarray(indices, dtype=float)
    return ctft(w, k / w.pri) / w.pri


def bandwidth_estimate(w):
    """(k_max - k_min) / pri for a DS-FCM pulse."""
    if w.kind is not Kind.DSFCM:
        raise WrongKind(f"bandwidth estimate is defined for DS-FCM, not {w.kind.value}")
    return (max(w.indices) - min(w.indices)) / w.pri


def power_spectrum(w, freqs):
    """|H(f)|^2 on ``freqs``."""
    return np.abs(ctft(w, freqs)) ** 2


def average_power(w, n=200_001):
    """(1/T_p) * int |h|^2 via a left Riemann sum; a numerical cross-check."""
    t = np.linspace(0, w.pulse_width, n, endpoint=False)
    return float(np.mean(np.abs(sample_time(w, t)) ** 2))
