"""Command-line entry point: ``dsradar <command> ...``.

Exit codes: 0 success, 1 validation error (bad input, config, or an
invalid difference set), 2 runtime failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import dictionaries as dct
from . import experiment as ex
from .ds_codes import catalog, difference_histogram, equivalent_shift, verify_difference_set
from .errors import ConfigError, DSRadarError, ValidationError
from .measurement import SCENE_HEADER
from .waveforms import make_waveform


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _sibling(path, suffix):
    """``results.csv`` -> ``results_<suffix>.csv``; None stays None."""
    if path is None or path == "-":
        return None
    stem, ext = os.path.splitext(path)
    return f"{stem}_{suffix}{ext or '.csv'}"


def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, help="TOML experiment config")
    p.add_argument("--out", default=d, help="output CSV path (default: stdout)")
    p.add_argument("--seed", type=int, default=d, help="master seed override")
    p.add_argument("--jobs", type=int, default=d, help="worker processes")
    p.add_argument("--dry-run", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="validate config and print problem sizes only")


def build_parser():
    ap = argparse.ArgumentParser(prog="dsradar", description=__doc__.splitlines()[0])
    _global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def leaf(parent, name, **kw):
        p = parent.add_parser(name, **kw)
        _global_flags(p, suppress=True)
        return p

    ds = sub.add_parser("ds", help="difference sets").add_subparsers(dest="action", required=True)
    p = leaf(ds, "verify", help="check a candidate (N, K, lambda) difference set")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--elements", required=True, help="comma-separated residues")
    p.set_defaults(func=cmd_ds_verify)
    p = leaf(ds, "catalog", help="print a catalogued set and its shifted indices")
    p.add_argument("name")
    p.set_defaults(func=cmd_ds_catalog)

    dc = sub.add_parser("dict", help="dictionaries").add_subparsers(dest="action", required=True)
    p = leaf(dc, "coherence", help="mu(u) profile and Welch bound")
    p.add_argument("--scheme", choices=ex.SCHEMES, required=True)
    p.add_argument("--ds", default="91-10-1", help="difference set (gives K, and N for ds)")
    p.add_argument("-N", type=int, required=True, help="delay grid size")
    p.add_argument("-K", type=int, default=None, help="samples for consecutive/random")
    p.add_argument("--trials", type=int, default=None, help="random draws for the histogram")
    p.add_argument("--bins", type=int, default=50)
    p.set_defaults(func=cmd_dict_coherence)

    wf = sub.add_parser("waveform", help="pulses").add_subparsers(dest="action", required=True)
    p = leaf(wf, "spectrum", help="|H(f)|^2 in dB")
    p.add_argument("--kind", choices=ex.WAVEFORMS, required=True)
    p.add_argument("--ds", default="91-10-1")
    p.add_argument("--pri", type=float, default=10e-6)
    p.add_argument("--pw", type=float, default=None, help="pulse width [s]")
    p.add_argument("--bandwidth", type=float, default=None, help="B_h [Hz] (default N / pri)")
    p.add_argument("--span", type=float, default=None, help="frequency span [Hz]")
    p.add_argument("--points", type=int, default=2001)
    p.set_defaults(func=cmd_waveform_spectrum)

    sm = sub.add_parser("sim", help="scene and measurement synthesis").add_subparsers(dest="action", required=True)
    p = leaf(sm, "run", help="dump a seeded scene and its measurements")
    p.set_defaults(func=cmd_sim_run)

    p = leaf(sub, "recover", help="recover one seeded scene")
    p.add_argument("--model", choices=[m for m in ex.MODELS if m != "nyquist-reference"], required=True)
    p.set_defaults(func=cmd_recover)

    er = sub.add_parser("exper", help="Monte-Carlo experiments").add_subparsers(dest="action", required=True)
    p = leaf(er, "run", help="run a configured experiment")
    p.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    p.set_defaults(func=cmd_exper_run)
    return ap


def _load(args):
    if not args.config:
        raise ConfigError("--config is required")
    over = {"seed": args.seed, "jobs": args.jobs}
    return ex.load_config(args.config, **over)


def _dry_run(args, cfg):
    for line in ex.dry_run_summary(cfg):
        print(json.dumps(line))
    return 0


def cmd_ds_verify(args):
    try:
        elems = [int(x) for x in args.elements.split(",") if x.strip()]
    except ValueError:
        raise ValidationError("--elements must be a comma-separated list of integers") from None
    N = args.modulus
    try:
        ds = verify_difference_set(elems, N)
    except ValidationError as exc:
        hist = difference_histogram([e % N for e in elems], N) if N > 0 else []
        print(f"invalid: {exc}")
        if len(hist) > 1:
            print(f"difference counts range {int(min(hist[1:]))}..{int(max(hist[1:]))}")
        return 1
    print(f"valid ({ds.N},{ds.K},{ds.lam}) difference set")
    return 0


def cmd_ds_catalog(args):
    ds = catalog(args.name)
    print(f"name,{args.name}")
    print(f"params,{ds.N},{ds.K},{ds.lam}")
    print("elements," + ",".join(str(e) for e in ds.elements))
    print("shifted," + ",".join(str(e) for e in equivalent_shift(ds)))
    return 0


def cmd_dict_coherence(args):
    N = args.N
    ds = catalog(args.ds)
    K = args.K or ds.K
    rng_range = dct.FourierRange(-(N // 2), N - N // 2 - 1)
    if args.scheme == "ds":
        if ds.N != N:
            raise ValidationError(f"-N {N} does not match the difference set modulus {ds.N}")
        samp = dct.build_sampling("ds", rng_range=rng_range, ds=ds)
    else:
        samp = dct.build_sampling(args.scheme, K=K, rng_range=rng_range, seed=args.seed)
    prof = dct.mu_profile(samp.as_array(), N)
    rows = [{"u": u, "mu_of_u": float(m)} for u, m in enumerate(prof, start=1)]
    summary = [{"mu": float(prof.max()), "welch": dct.welch_bound(N, samp.K)}]
    main = ex.format_csv(("u", "mu_of_u"), rows)
    summ = ex.format_csv(("mu", "welch"), summary)
    if args.out:
        _write(args.out, main)
        _write(_sibling(args.out, "summary"), summ)
    else:
        _write(None, main + "\n" + summ)
    if args.trials:
        if args.scheme != "random":
            raise ValidationError("--trials applies to the random scheme only")
        rng = np.random.default_rng(args.seed)
        draws = [dct.mu_profile(rng.choice(rng_range.indices(), K, replace=False), N).max()
                 for _ in range(args.trials)]
        hist = ex.format_csv(("bin_lo", "bin_hi", "count"), ex.histogram_rows(draws, args.bins))
        _write(_sibling(args.out, "histogram"), hist if args.out else "\n" + hist)
    return 0


def cmd_waveform_spectrum(args):
    ds = catalog(args.ds)
    bw = args.bandwidth or ds.N / args.pri
    idx = equivalent_shift(ds) if args.kind == "dsfcm" else None
    w = make_waveform(args.kind, args.pri, bw, args.pw, idx)
    span = args.span or 1.2 * bw
    f = np.linspace(-span / 2, span / 2, args.points)
    rows = [{"freq_hz": float(a), "power_db": float(b)} for a, b in zip(f, ex.spectrum_db(w, f))]
    _write(args.out, ex.format_csv(("freq_hz", "power_db"), rows))
    return 0


def _y_csv(Y, sampling):
    kappa = sampling.as_array()
    rows = [{"k": int(kappa[i]), "p": p, "re": float(Y[i, p].real), "im": float(Y[i, p].imag)}
            for i in range(Y.shape[0]) for p in range(Y.shape[1])]
    return ex.format_csv(("k", "p", "re", "im"), rows)


def cmd_sim_run(args):
    cfg = _load(args)
    if args.dry_run:
        return _dry_run(args, cfg)
    trial = ex.single_trial(cfg)
    rows = [dict(zip(SCENE_HEADER, r)) for r in trial.scene.to_rows()]
    _write(args.out, ex.format_csv(SCENE_HEADER, rows))
    sampling = trial.Phi.sampling if hasattr(trial.Phi, "sampling") else trial.Y.sampling
    ytxt = _y_csv(trial.Y.values, sampling)
    _write(_sibling(args.out, "Y"), ytxt if args.out else "\n" + ytxt)
    return 0


def cmd_recover(args):
    cfg = _load(args)
    if args.dry_run:
        return _dry_run(args, cfg)
    trial = ex.single_trial(cfg, model=args.model)
    dmap = ex.recover_single(trial, cfg.sparsity)
    rows = [{"m": m, "n": n, "re_amp": float(a.real), "im_amp": float(a.imag)} for m, n, a in dmap.entries]
    diag = [{"iter": i, "residual_norm": r} for i, r in enumerate(dmap.residual_norms)]
    main = ex.format_csv(("m", "n", "re_amp", "im_amp"), rows)
    dtxt = ex.format_csv(("iter", "residual_norm"), diag)
    _write(args.out, main)
    _write(_sibling(args.out, "diag"), dtxt if args.out else "\n" + dtxt)
    return 0


def cmd_exper_run(args):
    cfg = _load(args)
    if args.dry_run:
        return _dry_run(args, cfg)

    def progress(done, total):
        if total >= 200 and done % (total // 20) == 0:
            print(f"{done}/{total} trials", file=sys.stderr)

    table = ex.run_experiment(cfg, progress=progress)
    _write(args.out, ex.format_csv(table.columns, table.rows))
    if not args.out:
        return 0
    for name, (cols, rows) in ex.emit_plot_data(table, table.kind).items():
        _write(os.path.join(os.path.dirname(args.out) or ".", f"{name}.csv"), ex.format_csv(cols, rows))
    if table.timing:
        _write(_sibling(args.out, "timing"),
               ex.format_csv(("point", "model", "trial_seconds_total"), table.timing))
    if not args.no_plots:
        from .plotting import render

        stem = os.path.splitext(os.path.basename(args.out))[0]
        for path in render(table, os.path.dirname(args.out) or ".", stem):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DSRadarError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
