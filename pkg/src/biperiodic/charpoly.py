"""Laplacian determinant polynomials and toroidal dimer characteristic polynomials."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .laurent import LaurentMatrix, LaurentPoly2, det
from .periodic_graph import MapValidationError, TorusGraph


class KasteleynError(RuntimeError):
    """The face parity system for Kasteleyn signs has no solution."""


def laplacian_matrix(g: TorusGraph) -> LaurentMatrix:
    """Periodic Laplacian ``L(x, y)``; translations enter as ``x^a y^b``."""
    n = g.num_vertices
    rows = [[LaurentPoly2() for _ in range(n)] for _ in range(n)]
    for e in g.edges:
        (a, b), c = e.offset, e.weight
        if e.tail == e.head:
            loop = 2 - LaurentPoly2.monomial(a, b) - LaurentPoly2.monomial(-a, -b)
            rows[e.tail][e.tail] += loop.scale(c)
            continue
        rows[e.tail][e.tail] += c
        rows[e.head][e.head] += c
        rows[e.tail][e.head] -= LaurentPoly2.monomial(a, b, c)
        rows[e.head][e.tail] -= LaurentPoly2.monomial(-a, -b, c)
    return LaurentMatrix(rows)


def laplacian_poly(g: TorusGraph) -> LaurentPoly2:
    """``D(x, y) = det L(x, y)`` for a connected periodic graph."""
    if not g.is_connected():
        raise MapValidationError("Laplacian polynomial needs a connected periodic graph")
    return det(laplacian_matrix(g))


@dataclass(frozen=True)
class SignAssignment:
    """A sign per edge of a bipartite torus graph (``signs[i]`` for ``edges[i]``)."""

    signs: tuple[int, ...]

    def negatives_per_face(self, g: TorusGraph) -> list[int]:
        if g.faces is None:
            raise MapValidationError("graph carries no face structure")
        return [sum(self.signs[e] < 0 for e in face) for face in g.faces]

    def is_kasteleyn(self, g: TorusGraph) -> bool:
        """Every face of length 2k has product of signs ``(-1)^(k+1)``."""
        for face, neg in zip(g.faces, self.negatives_per_face(g)):
            if neg % 2 != (len(face) // 2 + 1) % 2:
                return False
        return True


def _solve_gf2(rows: list[int], rhs: list[int], nvars: int, rng: random.Random | None):
    """Solve ``rows * x = rhs`` over GF(2); rows are bitmasks.  Free variables random if ``rng``."""
    pivots: list[tuple[int, int, int]] = []  # (pivot column, row mask, rhs bit)
    for mask, bit in zip(rows, rhs):
        for col, pmask, pbit in pivots:
            if mask >> col & 1:
                mask ^= pmask
                bit ^= pbit
        if mask == 0:
            if bit:
                return None
            continue
        col = mask.bit_length() - 1
        # keep earlier pivot rows reduced against the new one
        pivots = [(c, m ^ mask, b ^ bit) if m >> col & 1 else (c, m, b) for c, m, b in pivots]
        pivots.append((col, mask, bit))
    pivot_cols = {c for c, _, _ in pivots}
    x = 0
    for v in range(nvars):
        if v not in pivot_cols and rng is not None and rng.random() < 0.5:
            x |= 1 << v
    for col, mask, bit in pivots:
        others = (mask & ~(1 << col)) & x
        if bin(others).count("1") % 2 != bit:
            x |= 1 << col
        else:
            x &= ~(1 << col)
    return x


def kasteleyn_signs(gb: TorusGraph, seed: int | None = None) -> SignAssignment:
    """Real Kasteleyn signs: an odd number of negative edges on each quadrilateral face.

    With ``seed=None`` the free variables of the parity system are fixed to
    +1; any integer seed picks a random member of the solution space, which
    differs from the default by a gauge change or a sign flip of ``z``/``w``.
    """
    if gb.faces is None:
        raise MapValidationError("Kasteleyn signs need the face structure of the graph")
    rows, rhs = [], []
    for face in gb.faces:
        if len(face) % 2:
            raise MapValidationError("bipartite faces must have even length")
        mask = 0
        for e in face:
            mask ^= 1 << e
        rows.append(mask)
        rhs.append((len(face) // 2 + 1) % 2)
    sol = _solve_gf2(rows, rhs, gb.num_edges, None if seed is None else random.Random(seed))
    if sol is None:
        raise KasteleynError("face parity system is infeasible")
    signs = SignAssignment(tuple(-1 if sol >> e & 1 else 1 for e in range(gb.num_edges)))
    if not signs.is_kasteleyn(gb):
        raise KasteleynError("internal error: solution violates the face condition")
    return signs


def kasteleyn_matrix(gb: TorusGraph, signs: SignAssignment, weights=None) -> LaurentMatrix:
    """``K(z, w)``: rows are white vertices, columns black, ``x``/``y`` play ``z``/``w``."""
    if gb.colors is None:
        raise MapValidationError("Kasteleyn matrix needs a bipartite graph")
    black = gb.vertices_colored("black")
    white = gb.vertices_colored("white")
    if len(black) != len(white):
        raise MapValidationError(f"unbalanced bipartition: {len(black)} black vs {len(white)} white")
    if len(signs.signs) != gb.num_edges:
        raise ValueError("one sign per edge required")
    col = {v: i for i, v in enumerate(black)}
    row = {v: i for i, v in enumerate(white)}
    entries = [[LaurentPoly2() for _ in black] for _ in white]
    for i, e in enumerate(gb.edges):
        wt = e.weight if weights is None else weights[i]
        if gb.colors[e.tail] == "black":
            b, w, (a, c) = e.tail, e.head, e.offset
        else:
            b, w, (a, c) = e.head, e.tail, (-e.offset[0], -e.offset[1])
        # white sits at cell (a, c) relative to black
        entries[row[w]][col[b]] += LaurentPoly2.monomial(a, c, signs.signs[i] * wt)
    return LaurentMatrix(entries)


def dimer_char_poly(gb: TorusGraph, signs: SignAssignment | None = None, weights=None, canonical: bool = True) -> LaurentPoly2:
    """Characteristic polynomial ``p(z, w) = det K(z, w)`` of the toroidal dimer model."""
    if signs is None:
        signs = kasteleyn_signs(gb)
    elif gb.faces is not None and not signs.is_kasteleyn(gb):
        raise MapValidationError("sign assignment violates the Kasteleyn face condition")
    p = det(kasteleyn_matrix(gb, signs, weights))
    return canonicalize(p) if canonical else p


def canonicalize(p: LaurentPoly2) -> LaurentPoly2:
    """Representative of ``p`` modulo monomial units, ``z -> -z``, ``w -> -w`` and sign.

    The Newton box is centered at the origin (rounding down), the sign
    variant with the largest ``|p(1, 1)|`` is kept (ties broken by the
    coefficient listing), and the overall sign makes the constant term
    nonnegative, falling back to the first term.
    """
    if p.is_zero():
        return p
    a0, a1, b0, b1 = p.bounding_box()
    p = p.shift(-((a0 + a1) // 2), -((b0 + b1) // 2))

    def oriented(q):
        lead = q.coefficient(0, 0) or next(iter(q.items()))[1]
        return -q if lead < 0 else q

    def score(q):
        return (-abs(sum(c for _, c in q.items())), tuple(q.items()))

    variants = [oriented(p.substitute_signs(sx, sy)) for sx in (1, -1) for sy in (1, -1)]
    return min(variants, key=score)
