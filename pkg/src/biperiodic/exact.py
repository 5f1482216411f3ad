"""Exact spanning-tree counts, Smith normal forms and Laplacian torsion.

Everything here returns Python integers.  Large determinants go through a
multi-modular route (numpy ``int64`` elimination modulo primes below 2^31,
recombined by the Chinese remainder theorem); the Fourier route for torus
quotients evaluates the block-diagonalized Laplacian in high precision with
mpmath and rounds, retrying at higher precision if the result is not
convincingly integral.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .periodic_graph import FiniteGraph, TorusGraph, torus_quotient


class PrecisionExhausted(ArithmeticError):
    """The Fourier product never rounded cleanly to an integer."""


@dataclass(frozen=True)
class ElementaryDivisors:
    """Nonzero Smith invariants ``d_1 | d_2 | ...`` and the number of zero diagonal entries."""

    divisors: tuple[int, ...]
    zeros: int

    def __post_init__(self):
        for a, b in zip(self.divisors, self.divisors[1:]):
            if a <= 0 or b % a:
                raise ValueError(f"not a divisibility chain: {self.divisors}")
        if self.divisors and self.divisors[-1] <= 0:
            raise ValueError("elementary divisors must be positive")

    @property
    def rank(self) -> int:
        return len(self.divisors)

    @property
    def torsion_order(self) -> int:
        return math.prod(self.divisors)

    @property
    def torsion(self) -> tuple[int, ...]:
        """Invariant factors of the torsion subgroup (divisors other than 1)."""
        return tuple(d for d in self.divisors if d != 1)


# ---------------------------------------------------------------------------
# Laplacians
# ---------------------------------------------------------------------------


def laplacian(g: FiniteGraph) -> list[list]:
    """Weighted Laplacian; self-loops contribute nothing."""
    n = g.num_vertices
    lap = [[0] * n for _ in range(n)]
    for u, v, w in g.edges:
        if u == v:
            continue
        lap[u][u] += w
        lap[v][v] += w
        lap[u][v] -= w
        lap[v][u] -= w
    return lap


def reduced_laplacian(g: FiniteGraph, root: int = 0) -> list[list]:
    lap = laplacian(g)
    return [row[:root] + row[root + 1 :] for i, row in enumerate(lap) if i != root]


def _clear_denominators(m: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    den = 1
    for row in m:
        for v in row:
            if isinstance(v, Fraction):
                den = math.lcm(den, v.denominator)
    return [[int(v * den) for v in row] for row in m], den


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination over the integers."""
    a = [list(map(int, row)) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (akk * rowi[j] - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11):  # deterministic below 2.1e12
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_PRIMES: list[int] = []


def _primes(count: int) -> list[int]:
    """The ``count`` largest primes below 2^31 (products of two residues fit in int64)."""
    cand = _PRIMES[-1] - 2 if _PRIMES else (1 << 31) - 1
    while len(_PRIMES) < count:
        if _is_prime(cand):
            _PRIMES.append(cand)
        cand -= 2
    return _PRIMES[:count]


def _det_mod_p(a: np.ndarray, p: int) -> int:
    a = a % p
    n = a.shape[0]
    det = 1
    for k in range(n):
        nz = np.flatnonzero(a[k:, k])
        if nz.size == 0:
            return 0
        r = k + int(nz[0])
        if r != k:
            a[[k, r]] = a[[r, k]]
            det = -det
        pivot = int(a[k, k])
        det = det * pivot % p
        if k == n - 1:
            break
        # only rows with a nonzero in column k and columns up to the pivot row's
        # last nonzero change; banded Laplacians stay cheap this way
        rows = k + 1 + np.flatnonzero(a[k + 1 :, k])
        if rows.size == 0:
            continue
        last = k + 1 + int(np.flatnonzero(a[k, k + 1 :])[-1]) + 1 if a[k, k + 1 :].any() else k + 1
        inv = pow(pivot, p - 2, p)
        row = a[k, k + 1 : last] * inv % p
        block = a[rows, k + 1 : last]
        a[rows, k + 1 : last] = (block - np.outer(a[rows, k], row) % p) % p
        a[rows, k] = 0
    return det % p


def hadamard_bound_bits(m: Sequence[Sequence[int]]) -> float:
    """log2 of the Hadamard bound on |det m|."""
    total = 0.0
    for row in m:
        s = sum(int(v) * int(v) for v in row)
        if s == 0:
            return -math.inf
        total += 0.5 * math.log2(s)
    return total


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t, m1 * m2


def modular_det(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant from residues modulo enough primes to cover twice the Hadamard bound."""
    n = len(m)
    if n == 0:
        return 1
    bits = hadamard_bound_bits(m)
    if bits == -math.inf:
        return 0
    a = np.array([[int(v) for v in row] for row in m], dtype=object)
    residue, modulus = 0, 1
    for p in _primes(int(bits + 1) // 30 + 2):
        mat = np.array((a % p).tolist(), dtype=np.int64)
        residue, modulus = _crt_pair(residue, modulus, _det_mod_p(mat, p), p)
        if modulus.bit_length() > bits + 2:
            break
    return residue - modulus if residue > modulus // 2 else residue


# ---------------------------------------------------------------------------
# Spanning trees
# ---------------------------------------------------------------------------

BAREISS_MAX_DIM = 80


def tree_count(g: FiniteGraph, method: str = "auto") -> int | Fraction:
    """Number of spanning trees (weighted sum for non-unit weights); 0 if disconnected.

    ``method`` is ``"bareiss"``, ``"modular"`` or ``"auto"`` (Bareiss up to
    80 vertices).
    """
    if g.num_vertices == 0:
        raise ValueError("graph has no vertices")
    if not g.is_connected():
        return 0
    if g.num_vertices == 1:
        return 1
    red, den = _clear_denominators(reduced_laplacian(g))
    if method == "auto":
        method = "bareiss" if len(red) <= BAREISS_MAX_DIM else "modular"
    if method == "bareiss":
        d = bareiss_det(red)
    elif method == "modular":
        d = modular_det(red)
    else:
        raise ValueError(f"unknown determinant method {method!r}")
    if den == 1:
        return d
    out = Fraction(d, den ** len(red))
    return int(out) if out.denominator == 1 else out


def brute_force_tree_count(g: FiniteGraph, max_edges: int = 20) -> int | Fraction:
    """Enumerate every (v-1)-subset of non-loop edges and keep the acyclic ones."""
    edges = [(u, v, w) for u, v, w in g.edges if u != v]
    if len(edges) > max_edges:
        raise ValueError(f"brute force limited to {max_edges} edges, graph has {len(edges)}")
    n = g.num_vertices
    total = 0
    for subset in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        weight = 1
        for u, v, w in subset:
            ru, rv = find(u), find(v)
            if ru == rv:
                break
            parent[ru] = rv
            weight *= w
        else:
            total += weight
    return total


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


class _EntryBlowup(Exception):
    pass


def _divisibility_chain(values: list[int]) -> list[int]:
    vals = [abs(v) for v in values]
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            a, b = vals[i], vals[j]
            g = math.gcd(a, b)
            if g:
                vals[i], vals[j] = g, a // g * b
    return vals


def _diagonalize(a: list[list[int]], modulus: int | None, entry_bits: int | None) -> list[int]:
    """Unimodular row/column elimination with smallest-magnitude pivots.

    With a modulus every entry may also be shifted by multiples of it, which
    keeps the entries bounded.
    """
    m = len(a)
    n = len(a[0]) if m else 0

    def reduce(v):
        if modulus is None:
            return v
        v %= modulus
        return v - modulus if v > modulus // 2 else v

    diag = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            rowt = a[t]
            clean = True
            for i in range(t + 1, m):
                v = a[i][t]
                if v:
                    q = v // p
                    rowi = a[i]
                    for j in range(t, n):
                        if rowt[j]:
                            rowi[j] = reduce(rowi[j] - q * rowt[j])
                    if rowi[t]:
                        clean = False
            for j in range(t + 1, n):
                v = rowt[j]
                if v:
                    q = v // p
                    for i in range(t, m):
                        if a[i][t]:
                            a[i][j] = reduce(a[i][j] - q * a[i][t])
                    if rowt[j]:
                        clean = False
            if not clean:
                cands = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
                cands += [(abs(rowt[j]), t, j) for j in range(t + 1, n) if rowt[j]]
                _, i, j = min(cands)
                if i != t:
                    a[t], a[i] = a[i], a[t]
                else:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                continue
            bad = next((i for i in range(t + 1, m) if any(v % p for v in a[i][t + 1 :])), None)
            if bad is not None and modulus is None:
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                continue
            break
        diag.append(a[t][t])
        if entry_bits is not None and any(abs(v).bit_length() > entry_bits for row in a[t + 1 :] for v in row[t + 1 :]):
            raise _EntryBlowup
    return diag


def _modular_rank_and_minor(a: list[list[int]], trials: int = 3) -> tuple[int, list[int], list[int]]:
    """Rank over Q and a nonsingular maximal minor, by elimination modulo random primes."""
    rng = random.Random(0x5EED)
    best = (0, [], [])
    for _ in range(trials):
        p = rng.choice(_primes(64))
        mat = np.array([[v % p for v in row] for row in a], dtype=np.int64)
        m, n = mat.shape
        rows, cols = list(range(m)), list(range(n))
        rank = 0
        for k in range(min(m, n)):
            sub = mat[k:, k:]
            nz = np.argwhere(sub != 0)
            if nz.size == 0:
                break
            i, j = (int(v) + k for v in nz[0])
            mat[[k, i]] = mat[[i, k]]
            mat[:, [k, j]] = mat[:, [j, k]]
            rows[k], rows[i] = rows[i], rows[k]
            cols[k], cols[j] = cols[j], cols[k]
            inv = pow(int(mat[k, k]), p - 2, p)
            row = mat[k, k + 1 :] * inv % p
            mat[k + 1 :, k + 1 :] = (mat[k + 1 :, k + 1 :] - np.outer(mat[k + 1 :, k], row) % p) % p
            mat[k + 1 :, k] = 0
            rank += 1
        if rank > best[0]:
            best = (rank, sorted(rows[:rank]), sorted(cols[:rank]))
    return best


def smith_normal_form(m: Sequence[Sequence[int]], entry_bits: int | None = 4096) -> ElementaryDivisors:
    """Elementary divisors of an integer matrix.

    Integer elimination is tried first; if entries outgrow ``entry_bits``
    the computation restarts modulo the determinant of a nonsingular maximal
    minor, which is a multiple of every nonzero invariant factor.
    """
    a = [[int(v) for v in row] for row in m]
    if not a or not a[0]:
        return ElementaryDivisors((), 0)
    size = min(len(a), len(a[0]))
    try:
        diag = _diagonalize([row[:] for row in a], None, entry_bits)
        chain = [d for d in _divisibility_chain(diag) if d]
        return ElementaryDivisors(tuple(chain), size - len(chain))
    except _EntryBlowup:
        return smith_normal_form_modular(a)


def smith_normal_form_modular(m: Sequence[Sequence[int]]) -> ElementaryDivisors:
    """Smith form computed modulo a determinantal multiple of the invariant factors."""
    a = [[int(v) for v in row] for row in m]
    if not a or not a[0]:
        return ElementaryDivisors((), 0)
    rows, cols = len(a), len(a[0])
    size = min(rows, cols)
    rank, prow, pcol = _modular_rank_and_minor(a)
    if rank == 0:
        return ElementaryDivisors((), size)
    modulus = abs(modular_det([[a[i][j] for j in pcol] for i in prow]))
    if modulus == 1:
        return ElementaryDivisors((1,) * rank, size - rank)
    diag = _diagonalize([row[:] for row in a], modulus, None)
    vals = [math.gcd(d, modulus) for d in diag] + [modulus] * (rows - len(diag))
    chain = _divisibility_chain(vals)
    return ElementaryDivisors(tuple(chain[:rank]), size - rank)


# ---------------------------------------------------------------------------
# Torsion of torus quotients
# ---------------------------------------------------------------------------


def laplacian_divisors(h: FiniteGraph) -> ElementaryDivisors:
    lap, den = _clear_denominators(laplacian(h))
    if den != 1:
        raise ValueError("torsion needs integer edge weights")
    return smith_normal_form(lap)


def torsion_order(h: FiniteGraph) -> int:
    """Order of the torsion subgroup of the Laplacian cokernel."""
    if not h.is_connected():
        raise ValueError("torsion order is defined here for connected graphs only")
    return laplacian_divisors(h).torsion_order


def _weighted_degree_bits(g: TorusGraph) -> float:
    deg = [0.0] * g.num_vertices
    for e in g.edges:
        if e.tail == e.head:
            continue
        deg[e.tail] += float(e.weight)
        deg[e.head] += float(e.weight)
    return sum(math.log2(d) for d in deg if d > 1)


def fourier_tree_count(g: TorusGraph, n: int, max_factor: int = 8) -> int:
    """Spanning trees of ``torus_quotient(g, n)`` from the Fourier factorization.

    tau(H_n) = tau(H_1) * prod_{(j,k) != (0,0)} D(zeta^j, zeta^k) / n^2, with
    ``D`` the Laplacian polynomial and ``zeta = e^{2 pi i / n}``.  Precision
    starts at twice the bit size bound of the answer and doubles on an
    integrality failure, up to ``max_factor`` times the bound.
    """
    from .charpoly import laplacian_poly

    if n < 1:
        raise ValueError("quotient size must be positive")
    if any(isinstance(e.weight, Fraction) and e.weight.denominator != 1 for e in g.edges):
        raise ValueError("Fourier count expects integer weights")
    if not torus_quotient(g, n).is_connected():
        return 0
    tau1 = tree_count(torus_quotient(g, 1))
    if n == 1:
        return tau1
    d = laplacian_poly(g)
    terms = [(a, b, int(c)) for (a, b), c in d.items()]
    need = n * n * _weighted_degree_bits(g) + math.log2(max(tau1, 1)) + 64
    prec = int(2 * need)
    while prec <= max_factor * need:
        with mpmath.workprec(prec + 32):
            two_pi_over_n = 2 * mpmath.pi / n
            cos = [mpmath.cos(two_pi_over_n * t) for t in range(n)]
            product = mpmath.mpf(1)
            for j in range(n):
                for k in range(n):
                    if j == 0 and k == 0:
                        continue
                    val = mpmath.fsum(c * cos[(j * a + k * b) % n] for a, b, c in terms)
                    product *= val
            x = tau1 * product / (n * n)
            r = mpmath.nint(x)
            if abs(x - r) < 0.25:
                return int(r)
        prec *= 2
    raise PrecisionExhausted(f"no integral result for n={n} within {max_factor}x precision budget")
