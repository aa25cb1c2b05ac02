"""Scoring recovered targets against ground truth in Nyquist-bin units."""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyTrialSet, NoDetections

_UNMATCHABLE = 1e6


@dataclass(frozen=True)
class NyquistBins:
    delay: float
    doppler: float

    @classmethod
    def from_radar(cls, bandwidth, pulses, pri):
        return cls(1.0 / bandwidth, 1.0 / (pulses * pri))


@dataclass(frozen=True)
class Estimate:
    delay: float
    doppler: float
    amplitude: complex = 0j


@dataclass
class TrialScore:
    targets: int
    detections: int
    delay_errors: list = field(default_factory=list)
    doppler_errors: list = field(default_factory=list)
    separate_detected: bool = None


def wrapped_doppler_error(f_hat, f, pri):
    """Signed Doppler difference on the circle [-1/(2 pri), 1/(2 pri))."""
    span = 1.0 / pri
    return (np.asarray(f_hat) - np.asarray(f) + span / 2) % span - span / 2


def estimates_from_map(peaks, params):
    """Convert (m, n, amplitude) grid peaks into physical estimates."""
    dg, fg = params.delay_grid(), params.doppler_grid()
    return [Estimate(float(dg[n]), float(fg[m]), complex(a)) for m, n, a in peaks]


def match_detections(truth, estimates, bins, pri=None):
    """One-to-one matching of estimates to true targets.

    A pair is admissible when |dt| < delta_t and |df| < delta_f (strict).
    Among admissible pairs the matching maximizes the number of detections
    and, within that, minimizes the summed normalized error
    sqrt((dt/delta_t)^2 + (df/delta_f)^2).  Doppler differences wrap when
    ``pri`` is given.
    """
    targets = list(truth)
    S, E = len(targets), len(estimates)
    score = TrialScore(S, 0)
    if S == 0 or E == 0:
        return score
    t = np.array([x.delay for x in targets])
    f = np.array([x.doppler for x in targets])
    th = np.array([e.delay for e in estimates])
    fh = np.array([e.doppler for e in estimates])
    dt = (th[None, :] - t[:, None]) / bins.delay
    if pri is None:
        df = fh[None, :] - f[:, None]
    else:
        df = wrapped_doppler_error(fh[None, :], f[:, None], pri)
    df = df / bins.doppler
    ok = (np.abs(dt) < 1) & (np.abs(df) < 1)
    if not ok.any():
        return score
    cost = np.where(ok, np.hypot(dt, df), _UNMATCHABLE)
    rows, cols = linear_sum_assignment(cost)
    for r, c in zip(rows, cols):
        if ok[r, c]:
            score.detections += 1
            score.delay_errors.append(float(dt[r, c]))
            score.doppler_errors.append(float(df[r, c]))
    return score


def prob_detection(scores):
    scores = list(scores)
    if not scores:
        raise EmptyTrialSet("no trials to aggregate")
    total = sum(s.targets for s in scores)
    if total == 0:
        raise EmptyTrialSet("trials contain no targets")
    return sum(s.detections for s in scores) / total


def normalized_rmse(scores):
    """Pooled (e_t, e_f) over all true detections, in Nyquist bins."""
    dts = [e for s in scores for e in s.delay_errors]
    dfs = [e for s in scores for e in s.doppler_errors]
    if not dts:
        raise NoDetections("no true detections to average over")
    return float(np.sqrt(np.mean(np.square(dts)))), float(np.sqrt(np.mean(np.square(dfs))))


def separate_detection(truth_pair, estimates, pri=None):
    """Both of two close targets resolved to within half their spacing.

    True iff two distinct estimates can be assigned to the two targets with
    |dt| < t_ij / 2 and |df| < f_ij / 2 for each.
    """
    ti, tj = truth_pair
    t_ij = abs(ti.delay - tj.delay)
    if pri is None:
        f_ij = abs(ti.doppler - tj.doppler)
    else:
        f_ij = abs(float(wrapped_doppler_error(ti.doppler, tj.doppler, pri)))

    def fits(est, tgt):
        if pri is None:
            dfe = abs(est.doppler - tgt.doppler)
        else:
            dfe = abs(float(wrapped_doppler_error(est.doppler, tgt.doppler, pri)))
        return abs(est.delay - tgt.delay) < t_ij / 2 and dfe < f_ij / 2

    for a, ea in enumerate(estimates):
        if not fits(ea, ti):
            continue
        for b, eb in enumerate(estimates):
            if b != a and fits(eb, tj):
                return True
    return False
