"""Statistics of the eavesdropper's metric under random sign reversal.

For a candidate ordering ``P`` the signal part of Eve's correlation metric is
``f(P) = Re{a^H P^T P_h (b * a)}`` with ``a = steering(2 pi / M + u)``. Over a
uniformly random ``P`` and i.i.d. signs with ``Pr{b = -1} = Q / M`` it is close
to Gaussian with the mean and variance given by :func:`prop1_params`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bob import perm_matrix
from ..channel import steering_vector
from ..core import InputError


def _as_perm_matrix(P) -> np.ndarray:
    P = np.asarray(P)
    return perm_matrix(P) if P.ndim == 1 else P


def fb_re(P, P_h, b_h, u_thetaphi: float, M: int) -> float:
    """``Re{a^H P^T P_h (b_h * a)}``; ``P`` and ``P_h`` are matrices or index vectors."""
    a = steering_vector(2 * np.pi / M + u_thetaphi, M)
    P, P_h = _as_perm_matrix(P), _as_perm_matrix(P_h)
    if P.shape != (M, M) or P_h.shape != (M, M):
        raise InputError(f"permutations must be {M} x {M}")
    return float(np.real(a.conj() @ P.T @ P_h @ (np.asarray(b_h) * a)))


def dirichlet_sq(M: int, x):
    """``sin^2(M x / 2) / sin^2(x / 2)`` with the limit ``M^2`` where the denominator vanishes."""
    x = np.asarray(x, dtype=float)
    s = np.sin(x / 2)
    near = np.abs(s) < 1e-8
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sin(M * x / 2) ** 2 / s**2
    return np.where(near, float(M * M), r)


@dataclass(frozen=True)
class Prop1Params:
    M: int
    Q: int
    u_thetaphi: float
    mu_f: float
    sigma2_f: float

    @property
    def in_region(self) -> bool:
        """Inside ``0 <= u <= 2 pi (M - 2) / M`` where the Gaussian law is claimed."""
        return 0.0 <= self.u_thetaphi <= 2 * np.pi * (self.M - 2) / self.M + 1e-12


def prop1_params(M: int, Q: int, u_thetaphi: float) -> Prop1Params:
    mu = (M - 2 * Q) / M**2 * float(dirichlet_sq(M, u_thetaphi + 2 * np.pi / M))
    return Prop1Params(M, Q, float(u_thetaphi), mu, (M - mu**2) / 2)


def _cos_matrix(M: int, u: float) -> np.ndarray:
    m = np.arange(M)
    return np.cos((m[:, None] - m[None, :]) * (u + 2 * np.pi / M))


def prop1_exact_moments(M: int, Q: int, u_thetaphi: float) -> tuple[float, float]:
    """Exact mean and variance of ``f`` under uniform ``P`` and i.i.d. signs.

    With ``C[m, k] = cos((m - k) x)`` and ``mu1 = E b = (M - 2Q) / M``:
    ``E f = mu1 * mean(C) * M`` and
    ``Var f = (1 - mu1^2) * sum(C^2) / M + mu1^2 * sum(D^2) / (M - 1)``,
    ``D`` being ``C`` with row and column means removed (the variance of a
    random assignment sum).
    """
    C = _cos_matrix(M, u_thetaphi)
    mu1 = (M - 2 * Q) / M
    mean = mu1 * C.sum() / M
    D = C - C.mean(axis=0, keepdims=True) - C.mean(axis=1, keepdims=True) + C.mean()
    var_assign = (D**2).sum() / (M - 1) if M > 1 else 0.0
    var = (1 - mu1**2) * (C**2).sum() / M + mu1**2 * var_assign
    return float(mean), float(var)


@dataclass(frozen=True)
class Prop1Empirical:
    mean: float
    var: float
    counts: np.ndarray
    edges: np.ndarray
    trials: int


def fb_samples(M: int, Q: int, u_thetaphi: float, trials: int, rng: np.random.Generator):
    """Draw ``(f, perms, c)`` with ``f[t] = sum_m b[pi(m)] c[t, m]``, ``c = cos((m - pi(m)) x)``.

    The signs are i.i.d. and independent of ``pi``, so ``b[pi(m)]`` is drawn
    directly instead of being gathered.
    """
    m = np.arange(M)
    perms = rng.permuted(np.broadcast_to(m, (trials, M)), axis=1)
    c = _cos_matrix(M, u_thetaphi)[m, perms]
    signs = np.where(rng.random((trials, M)) < Q / M, -1.0, 1.0)
    f = (signs * c).sum(axis=1)
    return f, perms, c


def prop1_empirical(M: int, Q: int, u_thetaphi: float, trials: int, rng: np.random.Generator,
                    method: str = "direct", bins: int = 64, chunk: int = 1 << 17) -> Prop1Empirical:
    """Monte Carlo mean, variance and histogram of ``f`` (histogram edges span ``[-M, M]``).

    ``method="direct"`` uses sample moments of ``f``. ``method="conditional"``
    averages the sign law analytically for every drawn permutation, which
    targets the same moments with a much smaller spread; the histogram
    always comes from the raw samples.
    """
    if trials < 1000:
        raise InputError("use at least 1000 trials")
    if method not in ("direct", "conditional"):
        raise InputError(f"unknown estimator {method!r}")
    mu1 = (M - 2 * Q) / M
    edges = np.linspace(-M, M, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    s1 = s2 = s_cv = 0.0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        f, _, c = fb_samples(M, Q, u_thetaphi, n, rng)
        counts += np.histogram(f, bins=edges)[0]
        if method == "direct":
            s1 += f.sum()
            s2 += (f * f).sum()
        else:
            cm = mu1 * c.sum(axis=1)
            s1 += cm.sum()
            s2 += (cm * cm).sum()
            s_cv += (1 - mu1**2) * (c * c).sum()
        done += n
    mean = s1 / trials
    var = s2 / trials - mean**2 + s_cv / trials
    return Prop1Empirical(float(mean), float(var), counts, edges, trials)


def np_lower_bound(M: int) -> float:
    """``M! / 2 * erfc((M - 2) / sqrt(M))``."""
    if M < 2:
        raise InputError("needs M >= 2")
    return math.factorial(M) / 2 * math.erfc((M - 2) / math.sqrt(M))


def h_fn(mu_f, M: int, Q: int):
    """``((M - 2Q) - mu_f) / sqrt(M - mu_f^2)``."""
    mu_f = np.asarray(mu_f, dtype=float)
    return ((M - 2 * Q) - mu_f) / np.sqrt(M - mu_f**2)


@dataclass(frozen=True)
class HMonoReport:
    M: int
    max_step: dict  # Q -> largest forward difference of h along the mu grid
    nonincreasing_in_mu: bool
    decreasing_in_Q: bool


def region_mu_max(M: int, Q: int, n: int = 4001) -> float:
    """Largest ``mu_f`` over the angular region ``[0, 2 pi (M - 2) / M]``."""
    u = np.linspace(0, 2 * np.pi * (M - 2) / M, n)
    x = u + 2 * np.pi / M
    return float(np.max((M - 2 * Q) / M**2 * dirichlet_sq(M, x)))


def h_mono_check(M: int, Qs, grid: int = 1000, mu_max: float | None = None,
                 tol: float = 1e-12) -> HMonoReport:
    """Finite-difference monotonicity of ``h`` in ``mu_f`` and in ``Q``.

    For each Q the grid spans ``[0, mu_max]``, or ``[0, M - 2Q]`` with the
    part where ``h`` is not real (``mu_f^2 >= M``) dropped when ``mu_max``
    is not given. The Q comparison uses the grid common to all Q.
    """
    Qs = sorted(int(q) for q in Qs)
    steps = {}
    top = {}
    for Q in Qs:
        hi = M - 2 * Q if mu_max is None else min(mu_max, M - 2 * Q)
        mu = np.linspace(0.0, hi, grid)
        mu = mu[mu**2 < M]
        top[Q] = mu[-1] if mu.size else 0.0
        h = h_fn(mu, M, Q)
        steps[Q] = float(np.max(np.diff(h))) if mu.size > 1 else -np.inf
    common = np.linspace(0.0, min(top.values()), grid)
    hs = np.array([h_fn(common, M, Q) for Q in Qs])
    dec_q = bool(np.all(np.diff(hs, axis=0) < 0)) if len(Qs) > 1 else True
    return HMonoReport(M, steps, all(s <= tol for s in steps.values()), dec_q)
