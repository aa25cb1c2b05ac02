"""Config-driven Monte-Carlo experiments.

A run is a list of sweep points (SNR, pulse count, target count, spacing)
times a list of variants (recovery model plus its sampling/waveform front
end).  Every trial draws its scene and noise from a seed that depends only
on (master seed, point index, trial index), so serial and pooled runs give
identical tables.
"""

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from . import dictionaries as dct
from .ds_codes import catalog, equivalent_shift
from .errors import ConfigError, DSRadarError, KindMismatch
from .measurement import (
    NoiseSpec,
    RadarParams,
    Scene,
    Target,
    add_noise,
    fourier_extract,
    random_scene,
    synthesize_model,
    synthesize_time_oracle,
)
from .metrics import (
    NyquistBins,
    estimates_from_map,
    match_detections,
    separate_detection,
    wrapped_doppler_error,
    Estimate,
)
from .recovery import (
    DelayDopplerMap,
    RecoveryConfig,
    df_recover,
    doppler_focus,
    extract_targets,
    standard_recover,
    structured_recover,
)
from .waveforms import Kind, make_waveform, power_spectrum

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

MODELS = ("standard", "structured", "df", "modified-df", "nyquist-reference")
KINDS = ("detect", "rmse", "separate", "pulses-sweep", "targets-sweep", "coherence", "spectrum")
SCHEMES = ("consecutive", "random", "ds")
WAVEFORMS = ("rect", "lfm", "dsfcm")

_TOP_KEYS = {
    "kind", "seed", "trials", "jobs", "pri_s", "bandwidth_hz", "pulses", "delay_grids",
    "doppler_grids", "ds", "sampling", "num_samples", "sampling_seed", "waveform",
    "pulse_width_s", "models", "snr_db", "num_targets", "synthesis", "on_grid",
    "delay_spacing_bins", "doppler_spacing_bins", "sparsity", "variant", "spectrum_points",
    "spectrum_span_hz", "histogram_bins", "description",
}
_VARIANT_KEYS = {"label", "model", "sampling", "ds", "num_samples", "waveform", "pulse_width_s", "sampling_seed"}


@dataclass(frozen=True)
class Variant:
    label: str
    model: str
    sampling: str
    ds: str
    num_samples: int
    waveform: str
    pulse_width_s: float
    sampling_seed: int


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "detect"
    seed: int = 0
    trials: int = 100
    jobs: int = 1
    pri_s: float = 10e-6
    bandwidth_hz: float = 99.3e6
    pulses: tuple = (20,)
    delay_grids: int = 993
    doppler_grids: int = 128
    ds: str = "993-32-1"
    sampling: str = "ds"
    num_samples: int = None
    sampling_seed: int = 0
    waveform: str = "dsfcm"
    pulse_width_s: float = None
    models: tuple = ("structured",)
    snr_db: tuple = (0.0,)
    num_targets: tuple = (3,)
    synthesis: str = "model"
    on_grid: bool = False
    delay_spacing_bins: tuple = (2.0,)
    doppler_spacing_bins: float = 1.0
    sparsity: str = "known"
    variants: tuple = ()
    spectrum_points: int = 2001
    spectrum_span_hz: float = None
    histogram_bins: int = 50
    description: str = ""

    def radar(self, pulses=None):
        return RadarParams(
            self.pri_s, self.bandwidth_hz, int(pulses or self.pulses[0]),
            self.delay_grids, self.doppler_grids,
        )

    def resolved_variants(self):
        if self.variants:
            return self.variants
        return tuple(
            Variant(m, m, self.sampling, self.ds, self.num_samples, self.waveform,
                    self.pulse_width_s, self.sampling_seed)
            for m in self.models
        )

    def points(self):
        """Sweep points as dicts, in a fixed order."""
        spacing = self.delay_spacing_bins if self.kind == "separate" else (None,)
        targets = (2,) if self.kind == "separate" else self.num_targets
        return [
            {"snr_db": float(s), "pulses": int(p), "num_targets": int(t), "delay_spacing_bins": d}
            for p, t, d, s in itertools.product(self.pulses, targets, spacing, self.snr_db)
        ]


def _tuple_of(value, cast):
    if isinstance(value, (list, tuple)):
        return tuple(cast(v) for v in value)
    return (cast(value),)


def config_from_dict(raw):
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = dict(raw)
    kw.pop("variant", None)
    for key, cast in (("pulses", int), ("snr_db", float), ("num_targets", int),
                      ("delay_spacing_bins", float), ("models", str)):
        if key in kw:
            kw[key] = _tuple_of(kw[key], cast)
    cfg = ExperimentConfig(**kw)
    variants = []
    for i, v in enumerate(raw.get("variant", [])):
        bad = set(v) - _VARIANT_KEYS
        if bad:
            raise ConfigError(f"unknown keys in variant {i}: {sorted(bad)}")
        if "model" not in v:
            raise ConfigError(f"variant {i} needs a model")
        variants.append(
            Variant(
                label=v.get("label", v["model"]),
                model=v["model"],
                sampling=v.get("sampling", cfg.sampling),
                ds=v.get("ds", cfg.ds),
                num_samples=v.get("num_samples", cfg.num_samples),
                waveform=v.get("waveform", cfg.waveform),
                pulse_width_s=v.get("pulse_width_s", cfg.pulse_width_s),
                sampling_seed=v.get("sampling_seed", cfg.sampling_seed),
            )
        )
    if variants:
        cfg = replace(cfg, variants=tuple(variants), models=tuple(v.model for v in variants))
    validate_config(cfg)
    return cfg


def load_config(path, **overrides):
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    raw.update({k: v for k, v in overrides.items() if v is not None})
    return config_from_dict(raw)


def validate_config(cfg):
    if cfg.kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {cfg.kind!r}")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be >= 1")
    if cfg.synthesis not in ("model", "oracle"):
        raise ConfigError("synthesis must be 'model' or 'oracle'")
    if cfg.sparsity not in ("known", "auto"):
        raise ConfigError("sparsity must be 'known' or 'auto'")
    if any(s < 0 for s in cfg.num_targets):
        raise ConfigError("num_targets must be non-negative")
    try:
        for p in cfg.pulses:
            cfg.radar(p)
    except DSRadarError as exc:
        raise ConfigError(str(exc)) from None
    for v in cfg.resolved_variants():
        if v.model not in MODELS:
            raise ConfigError(f"unknown model {v.model!r}; choose from {MODELS}")
        if v.sampling not in SCHEMES:
            raise ConfigError(f"unknown sampling scheme {v.sampling!r}")
        if v.waveform not in WAVEFORMS:
            raise ConfigError(f"unknown waveform {v.waveform!r}")
        try:
            _front_end(cfg, v)
        except DSRadarError as exc:
            raise ConfigError(f"variant {v.label!r}: {exc}") from None


def _front_end(cfg, v):
    """Sampling set and pulse for one variant."""
    params = cfg.radar()
    ds = catalog(v.ds) if v.ds else None
    K = v.num_samples if v.num_samples else (ds.K if ds is not None else None)
    if v.sampling == "ds":
        sampling = dct.build_sampling("ds", rng_range=params.fourier_range, ds=ds)
    else:
        sampling = dct.build_sampling(v.sampling, K=K, rng_range=params.fourier_range, seed=v.sampling_seed)
    indices = sampling.indices if v.sampling == "ds" else (equivalent_shift(ds) if ds else None)
    if v.model == "nyquist-reference":
        wf = make_waveform("rect", cfg.pri_s, cfg.bandwidth_hz)
    else:
        wf = make_waveform(v.waveform, cfg.pri_s, cfg.bandwidth_hz, v.pulse_width_s, indices)
    return sampling, wf


def max_target_delay(pri, waveforms):
    """Latest admissible delay: pri - T_p for short pulses, pri for CW-like ones."""
    bound = pri
    for w in waveforms:
        if w.pulse_width < pri:
            bound = min(bound, pri - w.pulse_width)
    return bound


def trial_seed(master, point, trial):
    return np.random.SeedSequence([int(master), int(point), int(trial)])


def nyquist_process(blocks, waveform, params, num_peaks):
    """Matched filter per PRI, then an M-point FFT across pulses.

    Returns a :class:`DelayDopplerMap` on an L-cell delay axis holding the
    ``num_peaks`` largest local maxima of the magnitude map.
    """
    blocks = np.asarray(blocks)
    P, L = blocks.shape
    M = params.M
    h = np.zeros(L, dtype=complex)
    from .measurement import pulse_samples

    hs = pulse_samples(waveform)[:L]
    h[: hs.size] = hs
    mf = np.fft.ifft(np.fft.fft(blocks, axis=1) * np.conj(np.fft.fft(h))[None, :], axis=1)
    sign = (-1.0) ** np.arange(P)
    Z = np.fft.fft(mf * sign[:, None], n=max(M, P), axis=0)[:M]  # M x L
    out = DelayDopplerMap(M, L)
    if num_peaks <= 0:
        return out
    mag = np.abs(Z)
    if not np.any(mag):
        return out
    peak = mag == ndimage.maximum_filter(mag, size=3, mode=("wrap", "nearest"))
    peak &= mag > 0
    m_idx, l_idx = np.nonzero(peak)
    order = np.lexsort((l_idx, m_idx, -mag[m_idx, l_idx]))[:num_peaks]
    out.entries = [(int(m_idx[i]), int(l_idx[i]), complex(Z[m_idx[i], l_idx[i]])) for i in order]
    return out


def nyquist_reference(scene, params, noise, rng=None):
    """Conventional processing of the Nyquist-rate echo of a rect pulse."""
    wf = make_waveform("rect", params.pri, params.bandwidth)
    blocks = synthesize_time_oracle(scene, wf, params)
    blocks = add_noise(blocks, noise, wf, params, rng=rng)
    return nyquist_process(blocks, wf, params, len(scene))


def nyquist_estimates(dmap, params):
    """Delay/Doppler estimates from a Nyquist map.

    A one-sample rect echo at delay t lands on sample ceil(t L / pri), so the
    peak cell is reported half a sample earlier to centre the quantization
    error (the unbiased choice for off-grid delays).
    """
    L = dmap.N
    return [
        Estimate(((n - 0.5) % L) * params.pri / L, float(params.doppler_grid()[m]), a)
        for m, n, a in dmap.entries
    ]


def _separate_scene(rng, params, spacing_bins, doppler_bins, max_delay):
    dt = spacing_bins * params.delay_bin
    dfq = doppler_bins * params.doppler_bin
    t1 = rng.uniform(0, max(max_delay - dt, 1e-30))
    f1 = rng.uniform(-0.5 / params.pri, 0.5 / params.pri)
    f2 = float(wrapped_doppler_error(f1 + dfq, 0.0, params.pri))
    ph = rng.uniform(0, 2 * np.pi, 2)
    return Scene((
        Target(complex(np.exp(1j * ph[0])), float(t1), float(f1)),
        Target(complex(np.exp(1j * ph[1])), float(t1 + dt), f2),
    ))


class _Context:
    """Per-configuration objects shared by every trial of a run."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.variants = cfg.resolved_variants()
        self.front = [_front_end(cfg, v) for v in self.variants]
        self.max_delay = max_target_delay(cfg.pri_s, [w for _, w in self.front])
        self._dicts = {}

    def dictionaries(self, vi, pulses):
        key = (vi, pulses)
        if key not in self._dicts:
            params = self.cfg.radar(pulses)
            sampling, _ = self.front[vi]
            Phi = dct.delay_dictionary(sampling, params.N)
            Psi = dct.doppler_dictionary(params.P, params.M, params.pri)
            self._dicts[key] = (Phi, Psi)
        return self._dicts[key]


def _recover(model, Y, Phi, Psi, params, S, sparsity_mode):
    cfg = RecoveryConfig(sparsity=(S if sparsity_mode == "known" else None))
    if model == "structured":
        dmap = structured_recover(Y, Phi, Psi, cfg)
    elif model == "standard":
        dmap = standard_recover(Y, Phi, Psi, cfg)
    elif model in ("df", "modified-df"):
        D = doppler_focus(Y, params.pri, params.doppler_grid())
        cap = S if model == "df" else None
        dmap = df_recover(D, Phi, cfg, per_column_cap=cap)
    else:
        raise ConfigError(f"unknown model {model!r}")
    return dmap


def run_trial(ctx, point_index, point, trial):
    """Scores for every variant on one seeded scene."""
    cfg = ctx.cfg
    params = cfg.radar(point["pulses"])
    bins = NyquistBins.from_radar(params.bandwidth, params.P, params.pri)
    ss = trial_seed(cfg.seed, point_index, trial)
    scene_ss, *noise_ss = ss.spawn(1 + len(ctx.variants))
    scene_rng = np.random.default_rng(scene_ss)
    S = point["num_targets"]
    if cfg.kind == "separate":
        scene = _separate_scene(scene_rng, params, point["delay_spacing_bins"],
                                cfg.doppler_spacing_bins, ctx.max_delay)
    else:
        scene = random_scene(S, params, scene_rng, on_grid=cfg.on_grid, max_delay=ctx.max_delay)
    S = len(scene)
    results = []
    for vi, v in enumerate(ctx.variants):
        rng = np.random.default_rng(noise_ss[vi])
        sampling, wf = ctx.front[vi]
        noise = NoiseSpec(point["snr_db"])
        if v.model == "nyquist-reference":
            dmap = nyquist_reference(scene, params, noise, rng=rng)
            estimates = nyquist_estimates(dmap, params)
        else:
            if cfg.synthesis == "oracle":
                blocks = add_noise(synthesize_time_oracle(scene, wf, params), noise, wf, params, rng=rng)
                Y = fourier_extract(blocks, sampling, wf)
            else:
                Y = add_noise(synthesize_model(scene, sampling, params), noise, wf, params, sampling, rng=rng)
            Phi, Psi = ctx.dictionaries(vi, params.P)
            dmap = _recover(v.model, Y.values, Phi, Psi, params, S, cfg.sparsity)
            estimates = estimates_from_map(extract_targets(dmap, S), params)
        score = match_detections(scene, estimates, bins, pri=params.pri)
        if cfg.kind == "separate":
            score.separate_detected = separate_detection(scene.targets, estimates, pri=params.pri)
        results.append(score)
    return results


@dataclass
class ResultTable:
    kind: str
    columns: tuple
    rows: list = field(default_factory=list)
    timing: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return repr(round(x, 12))
    return str(x)


def _chunk_worker(args):
    cfg, tasks = args
    ctx = _Context(cfg)
    out = []
    for pi, point, trial in tasks:
        t0 = time.perf_counter()
        res = run_trial(ctx, pi, point, trial)
        out.append(((pi, trial), res, time.perf_counter() - t0))
    return out


def dry_run_summary(cfg):
    """Problem sizes a run would use, without computing anything."""
    lines = []
    for v in cfg.resolved_variants():
        for P in cfg.pulses:
            params = cfg.radar(P)
            sampling, wf = _front_end(cfg, v)
            K, N, M = sampling.K, params.N, params.M
            nbytes = {
                "delay_dict_bytes": K * N * 16,
                "doppler_dict_bytes": P * M * 16,
                "kronecker_bytes": K * P * N * M * 16,
            }
            lines.append(
                {"variant": v.label, "model": v.model, "K": K, "N": N, "M": M, "P": P,
                 "L": params.nyquist_per_pri, "waveform": wf.kind.value,
                 "pulse_width_s": wf.pulse_width, **nbytes}
            )
    return lines


def run_experiment(cfg, jobs=None, progress=None):
    if cfg.kind == "coherence":
        return coherence_experiment(cfg)
    if cfg.kind == "spectrum":
        return spectrum_experiment(cfg)
    jobs = jobs or cfg.jobs
    points = cfg.points()
    tasks = [(pi, pt, t) for pi, pt in enumerate(points) for t in range(cfg.trials)]
    results = {}
    timing = {}
    if jobs <= 1:
        ctx = _Context(cfg)
        for pi, pt, t in tasks:
            t0 = time.perf_counter()
            results[(pi, t)] = run_trial(ctx, pi, pt, t)
            timing[(pi, t)] = time.perf_counter() - t0
            if progress:
                progress(len(results), len(tasks))
    else:
        size = max(1, math.ceil(len(tasks) / (4 * jobs)))
        chunks = [(cfg, tasks[i:i + size]) for i in range(0, len(tasks), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_chunk_worker, chunks):
                for key, res, dt in chunk:
                    results[key] = res
                    timing[key] = dt
                if progress:
                    progress(len(results), len(tasks))
    return aggregate(cfg, points, results, timing)


def aggregate(cfg, points, results, timing=None):
    variants = cfg.resolved_variants()
    sep = cfg.kind == "separate"
    columns = ["snr_db", "model", "sampling", "waveform", "trials", "p_detect", "e_t", "e_f"]
    if sep:
        columns.append("p_separate")
    columns += ["pulses", "num_targets"] + (["delay_spacing_bins"] if sep else [])
    table = ResultTable(cfg.kind, tuple(columns))
    for pi, pt in enumerate(points):
        for vi, v in enumerate(variants):
            scores = [results[(pi, t)][vi] for t in range(cfg.trials)]
            n_targets = sum(s.targets for s in scores)
            n_det = sum(s.detections for s in scores)
            dts = [e for s in scores for e in s.delay_errors]
            dfs = [e for s in scores for e in s.doppler_errors]
            row = {
                "snr_db": pt["snr_db"],
                "model": v.label,
                "sampling": "nyquist" if v.model == "nyquist-reference" else v.sampling,
                "waveform": "rect" if v.model == "nyquist-reference" else v.waveform,
                "trials": cfg.trials,
                "p_detect": n_det / n_targets if n_targets else float("nan"),
                "e_t": math.sqrt(math.fsum(e * e for e in dts) / len(dts)) if dts else float("nan"),
                "e_f": math.sqrt(math.fsum(e * e for e in dfs) / len(dfs)) if dfs else float("nan"),
                "pulses": pt["pulses"],
                "num_targets": pt["num_targets"],
            }
            if sep:
                row["p_separate"] = sum(bool(s.separate_detected) for s in scores) / cfg.trials
                row["delay_spacing_bins"] = pt["delay_spacing_bins"]
            table.rows.append(row)
            if timing:
                total = math.fsum(timing[(pi, t)] for t in range(cfg.trials))
                table.timing.append({"point": pi, "model": v.label, "trial_seconds_total": total})
    return table


def coherence_experiment(cfg):
    """mu(u) per sampling scheme plus the random-coherence histogram."""
    params = cfg.radar()
    N = params.N
    ds = catalog(cfg.ds)
    K = cfg.num_samples or ds.K
    profiles = {}
    for scheme in SCHEMES:
        if scheme == "ds":
            samp = dct.build_sampling("ds", rng_range=params.fourier_range, ds=ds)
        else:
            samp = dct.build_sampling(scheme, K=K, rng_range=params.fourier_range, seed=cfg.sampling_seed)
        profiles[scheme] = dct.mu_profile(samp.as_array(), N)
    rng = np.random.default_rng(cfg.seed)
    draws = np.array([
        dct.mu_profile(rng.choice(params.fourier_range.indices(), K, replace=False), N).max()
        for _ in range(cfg.trials)
    ])
    table = ResultTable("coherence", ("scheme", "u", "mu_of_u"))
    for scheme, prof in profiles.items():
        for u, mu in enumerate(prof, start=1):
            table.rows.append({"scheme": scheme, "u": u, "mu_of_u": float(mu)})
    table.extras["welch"] = dct.welch_bound(N, K)
    table.extras["coherence"] = {s: float(p.max()) for s, p in profiles.items()}
    table.extras["random_coherence"] = draws
    table.extras["histogram_bins"] = cfg.histogram_bins
    return table


def spectrum_experiment(cfg):
    """|H(f)|^2 in dB for the three pulse types at equal unit power."""
    ds = catalog(cfg.ds)
    idx = equivalent_shift(ds)
    span = cfg.spectrum_span_hz or 1.2 * cfg.bandwidth_hz
    freqs = np.linspace(-span / 2, span / 2, cfg.spectrum_points)
    table = ResultTable("spectrum", ("waveform", "freq_hz", "power_db"))
    for kind in WAVEFORMS:
        pw = cfg.pulse_width_s if kind != "rect" else None
        wf = make_waveform(kind, cfg.pri_s, cfg.bandwidth_hz, pw, idx if kind == "dsfcm" else None)
        table.rows.extend(
            {"waveform": kind, "freq_hz": float(f), "power_db": float(d)}
            for f, d in zip(freqs, spectrum_db(wf, freqs))
        )
    return table


def spectrum_db(wf, freqs):
    """10 log10(|H(f)|^2 / T_p), floored at -300 dB."""
    ps = power_spectrum(wf, freqs) / wf.pulse_width
    return 10 * np.log10(np.maximum(ps, 1e-30))


def histogram_rows(values, bins):
    counts, edges = np.histogram(values, bins=bins)
    return [{"bin_lo": float(lo), "bin_hi": float(hi), "count": int(c)}
            for lo, hi, c in zip(edges[:-1], edges[1:], counts)]


PLOT_KINDS = {
    "detect": ("snr_db", "model", "p_detect"),
    "pulses-sweep": ("snr_db", "model", "pulses", "p_detect"),
    "targets-sweep": ("num_targets", "model", "pulses", "p_detect"),
    "rmse": ("snr_db", "model", "e_t", "e_f"),
    "separate": ("delay_spacing_bins", "model", "sampling", "p_separate"),
    "coherence": ("scheme", "u", "mu_of_u"),
    "spectrum": ("waveform", "freq_hz", "power_db"),
}


def emit_plot_data(table, kind):
    """Tidy plot-ready rows for one figure family.

    Returns ``{name: (columns, rows)}``; the CLI writes each entry as CSV.
    """
    if kind not in PLOT_KINDS:
        raise KindMismatch(f"no plot data for kind {kind!r}")
    compatible = {
        "detect": {"detect", "rmse", "pulses-sweep", "targets-sweep"},
        "rmse": {"detect", "rmse", "pulses-sweep", "targets-sweep"},
        "pulses-sweep": {"pulses-sweep", "detect"},
        "targets-sweep": {"targets-sweep"},
        "separate": {"separate"},
        "coherence": {"coherence"},
        "spectrum": {"spectrum"},
    }[kind]
    if table.kind not in compatible:
        raise KindMismatch(f"table of kind {table.kind!r} cannot feed {kind!r} plot data")
    cols = PLOT_KINDS[kind]
    out = {f"{kind}_plot": (cols, [{c: r[c] for c in cols} for r in table.rows])}
    if kind == "coherence":
        out["coherence_summary"] = (
            ("scheme", "mu", "welch"),
            [{"scheme": s, "mu": m, "welch": table.extras["welch"]}
             for s, m in table.extras["coherence"].items()],
        )
        out["coherence_histogram"] = (
            ("bin_lo", "bin_hi", "count"),
            histogram_rows(table.extras["random_coherence"], table.extras["histogram_bins"]),
        )
    return out


def format_csv(columns, rows):
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join(_fmt(r.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


@dataclass
class SingleTrial:
    scene: Scene
    Y: object
    params: RadarParams
    variant: Variant
    Phi: object
    Psi: object


def single_trial(cfg, model=None):
    """One seeded scene and its measurements at the first sweep point.

    Used by the ``sim`` and ``recover`` commands; the scene draw matches
    trial 0 of point 0 of :func:`run_experiment`.
    """
    ctx = _Context(cfg)
    vi = 0
    if model is not None:
        matches = [i for i, v in enumerate(ctx.variants) if v.model == model]
        if matches:
            vi = matches[0]
        else:
            base = ctx.variants[0]
            v = replace(base, label=model, model=model)
            validate_config(replace(cfg, variants=(v,), models=(model,)))
            ctx = _Context(replace(cfg, variants=(v,), models=(model,)))
    v = ctx.variants[vi]
    if v.model == "nyquist-reference":
        raise ConfigError("single-trial synthesis needs a sub-Nyquist model")
    point = cfg.points()[0]
    params = cfg.radar(point["pulses"])
    scene_ss, *noise_ss = trial_seed(cfg.seed, 0, 0).spawn(1 + len(ctx.variants))
    rng = np.random.default_rng(scene_ss)
    if cfg.kind == "separate":
        scene = _separate_scene(rng, params, point["delay_spacing_bins"], cfg.doppler_spacing_bins, ctx.max_delay)
    else:
        scene = random_scene(point["num_targets"], params, rng, on_grid=cfg.on_grid, max_delay=ctx.max_delay)
    sampling, wf = ctx.front[vi]
    noise = NoiseSpec(point["snr_db"])
    nrng = np.random.default_rng(noise_ss[vi])
    if cfg.synthesis == "oracle":
        Y = fourier_extract(add_noise(synthesize_time_oracle(scene, wf, params), noise, wf, params, rng=nrng), sampling, wf)
    else:
        Y = add_noise(synthesize_model(scene, sampling, params), noise, wf, params, sampling, rng=nrng)
    Phi, Psi = ctx.dictionaries(vi, params.P)
    return SingleTrial(scene, Y, params, v, Phi, Psi)


def recover_single(trial, sparsity_mode="known"):
    return _recover(trial.variant.model, trial.Y.values, trial.Phi, trial.Psi, trial.params,
                    len(trial.scene), sparsity_mode)
