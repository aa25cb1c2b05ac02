"""Cyclic difference sets: verification, histograms, catalog and shifting.

A subset K of Z_N is an (N, K, lambda) difference set when the K(K-1)
ordered differences (k - l) mod N, k != l, hit every non-zero residue
exactly lambda times.  Such sets are what make a partial-Fourier delay
dictionary reach the Welch bound.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateElements,
    NotADifferenceSet,
    NotPrime,
    OutOfRange,
    UnknownName,
    WrongResidueClass,
)


@dataclass(frozen=True)
class DifferenceSet:
    modulus: int
    size: int
    multiplicity: int
    elements: tuple

    @property
    def N(self):
        return self.modulus

    @property
    def K(self):
        return self.size

    @property
    def lam(self):
        return self.multiplicity

    @property
    def params(self):
        return (self.modulus, self.size, self.multiplicity)

    def __len__(self):
        return self.size

    def __iter__(self):
        return iter(self.elements)


def _as_residues(elements, N):
    arr = np.asarray(list(elements), dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise OutOfRange("element list must be a non-empty 1-D sequence")
    if np.any(arr < 0) or np.any(arr >= N):
        bad = arr[(arr < 0) | (arr >= N)]
        raise OutOfRange(f"elements {bad.tolist()} not in [0, {N})")
    return arr


def difference_histogram(elements, N):
    """Count the ordered pairwise differences modulo ``N``.

    Returns an integer array ``counts`` of length ``N`` where ``counts[d]``
    is the number of pairs (k, l), k != l, with (k - l) mod N == d.
    ``counts[0]`` is only non-zero when the input repeats a residue.
    """
    N = int(N)
    arr = _as_residues(elements, N)
    diff = (arr[:, None] - arr[None, :]) % N
    off_diag = ~np.eye(arr.size, dtype=bool)
    return np.bincount(diff[off_diag], minlength=N)


def parameter_check(N, K, lam):
    """True iff lam * (N - 1) == K * (K - 1)."""
    return int(lam) * (int(N) - 1) == int(K) * (int(K) - 1)


def verify_difference_set(elements, N):
    N = int(N)
    if N < 2:
        raise OutOfRange(f"modulus must be >= 2, got {N}")
    arr = _as_residues(elements, N)
    if np.unique(arr).size != arr.size:
        raise DuplicateElements("difference set elements must be distinct")
    counts = difference_histogram(arr, N)
    nonzero = counts[1:]
    lam = int(nonzero[0])
    if lam == 0 or np.any(nonzero != lam):
        missing = np.flatnonzero(nonzero != lam) + 1
        raise NotADifferenceSet(
            f"differences not uniform mod {N}: e.g. d={missing[:5].tolist()} "
            f"occur {nonzero[missing[:5] - 1].tolist()} times (expected {lam})"
        )
    K = arr.size
    # flat histogram implies the counting identity; checked anyway
    assert parameter_check(N, K, lam)
    return DifferenceSet(N, K, lam, tuple(sorted(int(x) for x in arr)))


def equivalent_shift(ds):
    """Map each element above floor(N/2) to ``element - N``.

    The result is sorted ascending and straddles zero, which is how the
    indices are laid out against the two-sided Fourier range.
    """
    N = ds.modulus
    half = N // 2
    return sorted(k - N if k > half else k for k in ds.elements)


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def quadratic_residue_ds(p):
    """Paley difference set of the non-zero quadratic residues mod ``p``.

    Requires p prime with p = 3 (mod 4); the result has parameters
    (p, (p-1)/2, (p-3)/4).
    """
    p = int(p)
    if not _is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p % 4 != 3:
        raise WrongResidueClass(f"{p} mod 4 = {p % 4}, need 3")
    residues = sorted({(x * x) % p for x in range(1, p)})
    return verify_difference_set(residues, p)


_TABLE = {
    "91-10-1": (91, (0, 1, 3, 9, 27, 49, 56, 61, 77, 81)),
    "993-32-1": (
        993,
        (0, 1, 33, 86, 90, 132, 148, 168, 191, 213,
         241, 251, 260, 262, 265, 446, 490, 507, 586, 615,
         650, 656, 663, 690, 774, 792, 800, 872, 887, 926,
         938, 963),
    ),
    "2863-54-1": (
        2863,
        (0, 1, 18, 90, 101, 354, 429, 490, 514, 612,
         620, 622, 671, 731, 753, 797, 809, 849, 911, 1054,
         1074, 1083, 1087, 1171, 1178, 1199, 1236, 1306, 1387, 1458,
         1622, 1637, 1669, 1672, 1714, 1837, 1843, 1868, 1873, 1916,
         1942, 1983, 2010, 2029, 2063, 2086, 2149, 2213, 2347, 2361,
         2516, 2555, 2571, 2609),
    ),
}

CATALOG_NAMES = tuple(_TABLE)

_cache = {}


def catalog(name):
    """Built-in difference set by name, re-verified on first load."""
    if name not in _TABLE:
        raise UnknownName(
            f"unknown difference set {name!r}; known: {', '.join(CATALOG_NAMES)}"
        )
    if name not in _cache:
        N, elements = _TABLE[name]
        _cache[name] = verify_difference_set(elements, N)
    return _cache[name]
