"""Logarithmic Mahler measures, the Lobachevsky function and ideal polyhedron volumes.

The two-variable measure is computed as an outer integral over ``z = e^{i theta}``
of the one-variable measure in ``w``, which Jensen's formula gives exactly
in terms of the roots.  The outer integrand is continuous but has kinks where
``p`` vanishes on the torus, so it is integrated with adaptive Gauss-Kronrod
bisection.  A midpoint grid average over the torus is kept as an independent
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .laurent import ComplexPoly1, LaurentPoly2, ZeroSpecialization


class ToleranceNotReached(RuntimeError):
    """Adaptive quadrature ran out of nodes before meeting the tolerance."""

    def __init__(self, message: str, partial: "MahlerResult"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class MahlerResult:
    value: float
    error: float  # heuristic a-posteriori estimate
    method: str  # "jensen-adaptive" | "grid" | "exact"
    samples: int

    def __float__(self):
        return self.value


# ---------------------------------------------------------------------------
# Lobachevsky function
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> tuple[Fraction, ...]:
    # Akiyama-Tanigawa; B_1 = +1/2 convention, only even indices are used
    out = []
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return tuple(out)


_SERIES_TERMS = 40


def _lobachevsky_coefficients() -> tuple[float, ...]:
    # zeta(2k) / (k (2k+1) pi^(2k)) with zeta(2k) = (-1)^(k+1) B_2k (2 pi)^(2k) / (2 (2k)!)
    b = _bernoulli(2 * _SERIES_TERMS)
    coeffs = []
    for k in range(1, _SERIES_TERMS + 1):
        zeta_over_pi = abs(b[2 * k]) * Fraction(2 ** (2 * k), 2 * math.factorial(2 * k))
        coeffs.append(float(zeta_over_pi / (k * (2 * k + 1))))
    return tuple(coeffs)


_LOB_COEFFS = _lobachevsky_coefficients()


def lobachevsky(theta: float) -> float:
    """Lobachevsky function ``-int_0^theta log|2 sin t| dt``.

    Odd and pi-periodic.  After reduction to [0, pi/2] the small-angle
    expansion ``t - t log(2t) + sum zeta(2k) t^(2k+1) / (k (2k+1) pi^(2k))`` is
    summed directly; its ratio is at most 1/4 there.
    """
    t = math.fmod(theta, math.pi)
    if t > math.pi / 2:
        t -= math.pi
    elif t < -math.pi / 2:
        t += math.pi
    sign = 1.0
    if t < 0:
        sign, t = -1.0, -t
    if t == 0.0:
        return 0.0
    u = t * t
    acc, power = 0.0, t
    for c in _LOB_COEFFS:
        power *= u
        term = c * power
        acc += term
        if term < 1e-18 * t:
            break
    return sign * (t - t * math.log(2 * t) + acc)


@dataclass(frozen=True)
class VolumeConstants:
    v_tet: float
    v_oct: float


def volume_constants() -> VolumeConstants:
    """Volumes of the regular ideal tetrahedron and octahedron."""
    return VolumeConstants(3 * lobachevsky(math.pi / 3), 8 * lobachevsky(math.pi / 4))


# ---------------------------------------------------------------------------
# Roots and one-variable Mahler measure
# ---------------------------------------------------------------------------


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Batched companion-matrix eigenvalues; ``coeffs`` is (B, d+1) ascending, monic-able."""
    b, d1 = coeffs.shape
    d = d1 - 1
    mon = coeffs[:, :-1] / coeffs[:, -1:]
    comp = np.zeros((b, d, d), dtype=complex)
    comp[:, 1:, :-1] = np.eye(d - 1)
    comp[:, :, -1] = -mon
    return np.linalg.eigvals(comp)


def aberth_roots(coeffs, maxiter: int = 100) -> np.ndarray:
    """Roots of each row of ``coeffs`` (ascending degree, nonzero leading term).

    Aberth-Ehrlich simultaneous iteration, vectorized over rows.  Rows that
    fail to converge fall back to companion-matrix eigenvalues followed by
    two Newton polish steps.  Returns a (B, d) complex array.
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    nb, d1 = c.shape
    d = d1 - 1
    if d == 0:
        return np.zeros((nb, 0), dtype=complex)
    c = c / c[:, -1:]
    if d == 1:
        return -c[:, :1]
    # start on a circle whose radius matches the product of the roots
    radius = np.abs(c[:, 0]) ** (1.0 / d)
    radius = np.where(radius > 0, radius, 1.0)
    angles = 2 * np.pi * np.arange(d) / d + 0.4
    z = radius[:, None] * np.exp(1j * angles)[None, :]
    done = np.zeros(nb, dtype=bool)
    eye = np.eye(d, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(maxiter):
            p = np.ones_like(z)
            dp = np.zeros_like(z)
            for k in range(d - 1, -1, -1):
                dp = dp * z + p
                p = p * z + c[:, k : k + 1]
            diff = z[:, :, None] - z[:, None, :]
            diff[:, eye] = 1.0
            recip = 1.0 / diff
            recip[:, eye] = 0.0
            s = recip.sum(axis=2)
            corr = p / (dp - p * s)
            corr = np.where(p == 0, 0.0, corr)
            bad = ~np.isfinite(corr)
            corr = np.where(bad, 0.0, corr)
            corr[done] = 0.0
            z = z - corr
            small = np.abs(corr) <= 4e-16 * np.maximum(np.abs(z), 1e-300)
            done |= np.all(small & ~bad, axis=1)
            if done.all():
                break
    if not done.all():
        idx = np.flatnonzero(~done)
        fallback = _companion_roots(c[idx])
        for _ in range(2):
            p = np.ones_like(fallback)
            dp = np.zeros_like(fallback)
            for k in range(d - 1, -1, -1):
                dp = dp * fallback + p
                p = p * fallback + c[idx, k : k + 1]
            with np.errstate(all="ignore"):
                step = np.where(dp != 0, p / dp, 0.0)
            fallback = fallback - np.where(np.isfinite(step), step, 0.0)
        z[idx] = fallback
    return z


def mahler_1var(q: ComplexPoly1 | list | tuple | np.ndarray) -> float:
    """``log|leading| + sum log max(1, |root|)`` (Jensen's formula)."""
    coeffs = np.asarray(q.coeffs if isinstance(q, ComplexPoly1) else q, dtype=complex)
    nz = np.flatnonzero(coeffs != 0)
    if nz.size == 0:
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    coeffs = coeffs[nz[0] : nz[-1] + 1]
    lead = abs(coeffs[-1])
    if coeffs.size == 1:
        return math.log(lead)
    roots = aberth_roots(coeffs[None, :])[0]
    return math.log(lead) + float(np.sum(np.log(np.maximum(1.0, np.abs(roots)))))


def _mahler_1var_batch(coeffs: np.ndarray) -> np.ndarray:
    """Row-wise Jensen measure for rows sharing a nonzero leading coefficient column."""
    lead = np.abs(coeffs[:, -1])
    if coeffs.shape[1] == 1:
        return np.log(lead)
    roots = aberth_roots(coeffs)
    return np.log(lead) + np.sum(np.log(np.maximum(1.0, np.abs(roots))), axis=1)


class _OuterIntegrand:
    """``theta -> m(p(e^{i theta}, w))`` evaluated on arrays of angles."""

    def __init__(self, p: LaurentPoly2, rtol: float = 1e-12):
        self.p = p
        self.rtol = rtol
        _, _, self.b0, b1 = p.bounding_box()
        self.width = b1 - self.b0 + 1
        self.terms = [(a, b - self.b0, float(c)) for (a, b), c in p.items()]
        self.calls = 0

    def __call__(self, thetas: np.ndarray) -> np.ndarray:
        thetas = np.asarray(thetas, dtype=float)
        self.calls += thetas.size
        z = np.exp(1j * thetas)
        coeffs = np.zeros((thetas.size, self.width), dtype=complex)
        scale = np.zeros(thetas.size)
        for a, col, c in self.terms:
            term = c * z ** a
            coeffs[:, col] += term
            scale += np.abs(term)
        lead_ok = np.abs(coeffs[:, -1]) > self.rtol * scale
        out = np.empty(thetas.size)
        if lead_ok.any():
            out[lead_ok] = _mahler_1var_batch(coeffs[lead_ok])
        for i in np.flatnonzero(~lead_ok):
            try:
                out[i] = mahler_1var(self.p.specialize_w(z[i], rtol=self.rtol))
            except ZeroSpecialization:
                out[i] = -np.inf
        return out


# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk_batch(f, lo: np.ndarray, hi: np.ndarray):
    """Kronrod estimates and |Kronrod - Gauss| for each interval [lo_i, hi_i]."""
    half = (hi - lo) / 2
    mid = (hi + lo) / 2
    nodes = mid[:, None] + half[:, None] * GK_NODES[None, :]
    vals = f(nodes.ravel()).reshape(nodes.shape)
    kron = half * (vals @ GK_WEIGHTS)
    gauss = half * (vals @ G_WEIGHTS)
    return kron, np.abs(kron - gauss)


def mahler_2var(p: LaurentPoly2, tol: float = 1e-6, max_evals: int = 400_000, initial: int = 16) -> MahlerResult:
    """Two-variable logarithmic Mahler measure by Jensen in ``w`` and adaptive quadrature in ``z``."""
    if p.is_zero():
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if p.is_monomial():
        (_, c), = p.items()
        return MahlerResult(math.log(abs(float(c))), 1e-16, "exact", 0)
    f = _OuterIntegrand(p)
    two_pi = 2 * math.pi
    budget = tol * two_pi
    edges = np.linspace(0.0, two_pi, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    val, err = _gk_batch(f, lo, hi)
    while True:
        total_err = float(err.sum())
        if total_err <= budget:
            break
        if f.calls >= max_evals:
            partial = MahlerResult(float(val.sum()) / two_pi, total_err / two_pi, "jensen-adaptive", f.calls)
            raise ToleranceNotReached(
                f"estimated error {partial.error:.3g} above tolerance {tol:.3g} after {f.calls} evaluations",
                partial,
            )
        share = budget * (hi - lo) / two_pi
        split = err > share
        if not split.any():
            split = err >= np.quantile(err, 0.9)
        mid = (lo[split] + hi[split]) / 2
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nv, ne = _gk_batch(f, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
    # sum in angular order so the result does not depend on refinement history
    order = np.argsort(lo)
    value = math.fsum(val[order]) / two_pi
    floor = 1e-14 * float(np.abs(val).sum()) / two_pi
    return MahlerResult(value, max(float(err.sum()) / two_pi, floor), "jensen-adaptive", f.calls)


def _grid_mean(p: LaurentPoly2, n: int, chunk: int = 256) -> float:
    t = np.exp(1j * (2 * np.pi * np.arange(n) + np.pi) / n)
    acc = 0.0
    for start in range(0, n, chunk):
        z = t[start : start + chunk, None]
        vals = p.evaluate(z, t[None, :])
        acc += math.fsum(np.log(np.abs(vals)).ravel())
    return acc / (n * n)


def mahler_2var_grid(p: LaurentPoly2, n: int = 1024) -> MahlerResult:
    """Mean of ``log|p|`` over the half-shifted ``n x n`` grid of roots of unity.

    The error estimate is the change from the ``n // 2`` grid.
    """
    if n < 4:
        raise ValueError("grid size must be at least 4")
    if p.is_zero():
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    value = _grid_mean(p, n)
    coarse = _grid_mean(p, n // 2)
    return MahlerResult(value, max(abs(value - coarse), 1e-15), "grid", n * n)
