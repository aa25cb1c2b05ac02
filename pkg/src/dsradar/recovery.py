"""Greedy delay-Doppler recovery.

Three pipelines share one delay-Doppler map type:

* standard: OMP over the Kronecker dictionary Phi (x) Psi, evaluated
  implicitly so the full-size problem never materializes;
* structured: SOMP on Y = Phi B for the delays, then a Doppler match of
  each recovered row of B against Psi;
* Doppler focusing: per-Doppler-bin focusing of Y followed by OMP on each
  focused vector.
"""

from dataclasses import dataclass, field

import numpy as np

from .dictionaries import sparsity_bound
from .errors import RankDeficientSupport, ValidationError


@dataclass(frozen=True)
class RecoveryConfig:
    """``sparsity=None`` is the Auto mode: floor(sqrt(K)) greedy steps."""

    sparsity: int = None
    residual_tol: float = 0.0

    def __post_init__(self):
        if self.sparsity is not None and self.sparsity < 1:
            raise ValidationError("sparsity must be >= 1 or None (auto)")

    def steps(self, K):
        return self.sparsity if self.sparsity is not None else int(np.floor(np.sqrt(K)))


@dataclass
class DelayDopplerMap:
    """Sparse M x N map; ``entries`` is a list of (m, n, amplitude)."""

    M: int
    N: int
    entries: list = field(default_factory=list)
    residual_norms: list = field(default_factory=list)

    def dense(self):
        X = np.zeros((self.M, self.N), dtype=complex)
        for m, n, a in self.entries:
            X[m, n] += a
        return X

    @property
    def support(self):
        return {(m, n) for m, n, _ in self.entries}

    def __len__(self):
        return len(self.entries)


@dataclass
class JointSparseEstimate:
    B: np.ndarray
    support: list
    residual_norms: list


def _as_array(A):
    return np.asarray(getattr(A, "matrix", A))


def _lstsq(A_sel, rhs, rcond=1e-10):
    """Least squares with an explicit rank check on the selected atoms."""
    s = np.linalg.svd(A_sel, compute_uv=False)
    if s.size == 0 or s[-1] <= rcond * s[0]:
        raise RankDeficientSupport(
            f"selected atoms are linearly dependent (cond > {1 / rcond:.0e})"
        )
    coef, *_ = np.linalg.lstsq(A_sel, rhs, rcond=None)
    return coef


def _omp_core(correlate, column, norms, y, steps, tol):
    """Generic OMP given a correlation operator and a column generator."""
    y = np.asarray(y, dtype=complex)
    r = y.copy()
    support, coef = [], np.zeros(0, dtype=complex)
    y_norm = np.linalg.norm(y)
    history = [float(y_norm)]
    cols = []
    for _ in range(steps):
        r_norm = np.linalg.norm(r)
        if r_norm <= max(tol, 1e-13 * y_norm) or y_norm == 0:
            break
        score = np.abs(correlate(r)) / norms
        if support:
            score[support] = -np.inf
        j = int(np.argmax(score))
        if not np.isfinite(score[j]):
            break
        support.append(j)
        cols.append(column(j))
        A_sel = np.column_stack(cols)
        coef = _lstsq(A_sel, y)
        r = y - A_sel @ coef
        history.append(float(np.linalg.norm(r)))
    return support, coef, history


def omp(A, y, cfg=RecoveryConfig()):
    """Orthogonal matching pursuit.

    Returns ``(x, residual_norms)`` where ``x`` is the full-length sparse
    coefficient vector.
    """
    A = _as_array(A)
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise ValidationError("dictionary has an all-zero column")
    support, coef, hist = _omp_core(
        lambda r: A.conj().T @ r, lambda j: A[:, j], norms, y, cfg.steps(A.shape[0]), cfg.residual_tol
    )
    x = np.zeros(A.shape[1], dtype=complex)
    x[support] = coef
    return x, hist


def somp(Phi, Y, cfg=RecoveryConfig()):
    """Simultaneous OMP: joint delay support of all pulses.

    Each step picks the atom maximizing ||phi_j^H R||_2 over j not yet in
    the support, re-fits B on the support by least squares against Y and
    updates the residual.
    """
    Phi = _as_array(Phi)
    Y = np.asarray(Y, dtype=complex)
    K, N = Phi.shape
    if Y.shape[0] != K:
        raise ValidationError(f"Y has {Y.shape[0]} rows, Phi has {K}")
    norms = np.linalg.norm(Phi, axis=0)
    R = Y.copy()
    y_norm = np.linalg.norm(Y)
    history = [float(y_norm)]
    support = []
    B_sel = np.zeros((0, Y.shape[1]), dtype=complex)
    for _ in range(cfg.steps(K)):
        r_norm = np.linalg.norm(R)
        if y_norm == 0 or r_norm <= max(cfg.residual_tol, 1e-13 * y_norm):
            break
        score = np.linalg.norm(Phi.conj().T @ R, axis=1) / norms
        score[support] = -np.inf
        n = int(np.argmax(score))
        support.append(n)
        Phi_sel = Phi[:, support]
        B_sel = _lstsq(Phi_sel, Y)
        R = Y - Phi_sel @ B_sel
        history.append(float(np.linalg.norm(R)))
    B = np.zeros((N, Y.shape[1]), dtype=complex)
    if support:
        B[support] = B_sel
    return JointSparseEstimate(B, support, history)


def doppler_match(B, support, Psi, mode="dictionary"):
    """Assign each recovered delay row a Doppler grid cell.

    For row b of B at delay n, picks m maximizing |psi_m^H b| and sets the
    amplitude to the scalar least-squares fit psi_m^H b / ||psi_m||^2.
    ``mode="fft"`` computes the same correlations with an M-point FFT
    (requires the uniform grid of :func:`doppler_dictionary` and M >= P).
    """
    Psi = _as_array(Psi)
    P, M = Psi.shape
    B = np.asarray(B)
    norms2 = np.sum(np.abs(Psi) ** 2, axis=0)
    out = DelayDopplerMap(M, B.shape[0])
    for n in support:
        b = B[n]
        if mode == "fft":
            if M < P:
                raise ValidationError("FFT Doppler matching needs M >= P")
            sign = (-1.0) ** np.arange(P)
            corr = np.fft.fft(b * sign, n=M)
        else:
            corr = Psi.conj().T @ b
        m = int(np.argmax(np.abs(corr)))
        out.entries.append((m, int(n), complex(corr[m] / norms2[m])))
    return out


def structured_recover(Y, Phi, Psi, cfg=RecoveryConfig(), mode="dictionary"):
    Y = getattr(Y, "values", Y)
    est = somp(Phi, Y, cfg)
    out = doppler_match(est.B, est.support, Psi, mode=mode)
    out.residual_norms = est.residual_norms
    return out


def doppler_focus(Y, pri, grid):
    """D[k, m] = sum_p Y[k, p] exp(-j 2 pi f_m p pri)."""
    Y = np.asarray(getattr(Y, "values", Y))
    grid = np.asarray(grid, dtype=float)
    P = Y.shape[1]
    E = np.exp(-2j * np.pi * np.outer(np.arange(P) * pri, grid))
    return Y @ E


def df_recover(D, Phi, cfg=RecoveryConfig(), per_column_cap=None):
    """OMP on every focused column d_m = Phi x_m.

    The per-column sparsity is ``min(cfg sparsity, sparsity_bound(K))``
    unless ``per_column_cap`` overrides it.  Amplitudes stay in focused
    units (P times the target amplitude for an on-grid target).
    """
    D = np.asarray(D)
    Phi = _as_array(Phi)
    K, N = Phi.shape
    cap = per_column_cap
    if cap is None:
        cap = sparsity_bound(K)
        if cfg.sparsity is not None:
            cap = min(cap, cfg.sparsity)
    steps = RecoveryConfig(sparsity=max(1, cap)).steps(K)
    M = D.shape[1]
    out = DelayDopplerMap(M, N)
    norms = np.linalg.norm(Phi, axis=0)
    PhiH = Phi.conj().T
    # every column runs its own OMP; the columns advance together in lockstep
    d_norm = np.linalg.norm(D, axis=0)
    floor = np.maximum(cfg.residual_tol, 1e-13 * d_norm)
    active = d_norm > 0
    R = D.astype(complex, copy=True)
    sel = np.zeros((M, steps), dtype=np.int64)
    coef = np.zeros((M, steps), dtype=complex)
    count = np.zeros(M, dtype=np.int64)
    for s in range(steps):
        active &= np.linalg.norm(R, axis=0) > floor
        cols = np.flatnonzero(active)
        if cols.size == 0:
            break
        score = np.abs(PhiH @ R[:, cols]) / norms[:, None]
        if s:
            score[sel[cols, :s].T, np.arange(cols.size)[None, :]] = -np.inf
        sel[cols, s] = np.argmax(score, axis=0)
        A = np.transpose(Phi[:, sel[cols, : s + 1]], (1, 0, 2))  # cols x K x (s+1)
        sv = np.linalg.svd(A, compute_uv=False)
        if np.any(sv[:, -1] <= 1e-10 * sv[:, 0]):
            raise RankDeficientSupport("selected atoms are linearly dependent (cond > 1e+10)")
        Q, Rq = np.linalg.qr(A)
        rhs = np.einsum("ckj,kc->cj", Q.conj(), D[:, cols])
        c = np.linalg.solve(Rq, rhs[..., None])[..., 0]
        coef[cols, : s + 1] = c
        R[:, cols] = D[:, cols] - np.einsum("ckj,cj->kc", A, c)
        count[cols] = s + 1
    for m in range(M):
        out.entries.extend((m, int(sel[m, i]), complex(coef[m, i])) for i in range(count[m]))
    return out


def standard_recover(Y, Phi, Psi, cfg=RecoveryConfig()):
    """OMP on y = (Phi (x) Psi) x without materializing the Kronecker matrix.

    Row-major vec: y[k * P + p] = Y[k, p]; column j = n * M + m.
    The correlation A^H r reduces to Phi^H R conj(Psi).
    """
    Y = np.asarray(getattr(Y, "values", Y), dtype=complex)
    Phi, Psi = _as_array(Phi), _as_array(Psi)
    K, N = Phi.shape
    P, M = Psi.shape
    if Y.shape != (K, P):
        raise ValidationError(f"Y shape {Y.shape} != ({K}, {P})")
    PhiH, PsiC = Phi.conj().T, Psi.conj()
    norms = np.outer(np.linalg.norm(Phi, axis=0), np.linalg.norm(Psi, axis=0)).ravel()

    def correlate(r):
        return (PhiH @ r.reshape(K, P) @ PsiC).ravel()

    def column(j):
        n, m = divmod(j, M)
        return np.kron(Phi[:, n], Psi[:, m])

    support, coef, hist = _omp_core(correlate, column, norms, Y.ravel(), cfg.steps(K), cfg.residual_tol)
    out = DelayDopplerMap(M, N, residual_norms=hist)
    for j, a in zip(support, coef):
        n, m = divmod(j, M)
        out.entries.append((m, n, complex(a)))
    return out


def mixed_norm(B, i, q):
    """(sum_n ||row_n(B)||_i^q)^(1/q)."""
    if i < 1 or q < 1:
        raise ValidationError("mixed norm needs i, q >= 1")
    rows = np.linalg.norm(np.atleast_2d(B), ord=i, axis=1)
    return float(np.sum(rows**q) ** (1.0 / q))


def extract_targets(dmap, S, neighborhood=1, circular_doppler=True):
    """The S largest local maxima of |X| among the map's entries.

    An entry is a local maximum when no other entry within ``neighborhood``
    cells (Doppler axis wraps around) is strictly larger; ties keep the
    lower (m, n).  Returns a list of (m, n, amplitude), largest first.
    """
    if not dmap.entries or S <= 0:
        return []
    cells = {}
    for m, n, a in dmap.entries:
        cells[(m, n)] = cells.get((m, n), 0) + a
    keys = sorted(cells)
    mags = {k: abs(cells[k]) for k in keys}
    peaks = []
    for (m, n) in keys:
        mag = mags[(m, n)]
        is_peak = True
        for dm in range(-neighborhood, neighborhood + 1):
            for dn in range(-neighborhood, neighborhood + 1):
                if dm == 0 and dn == 0:
                    continue
                mm = (m + dm) % dmap.M if circular_doppler else m + dm
                other = mags.get((mm, n + dn))
                if other is None:
                    continue
                if other > mag or (other == mag and (mm, n + dn) < (m, n)):
                    is_peak = False
                    break
            if not is_peak:
                break
        if is_peak:
            peaks.append((m, n, cells[(m, n)]))
    peaks.sort(key=lambda e: (-abs(e[2]), e[0], e[1]))
    return peaks[:S]
