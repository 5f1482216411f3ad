"""Doubly periodic combinatorial maps and graphs on the torus.

A :class:`TorusMap` is a rotation system on a set of darts together with a
translation vector in Z^2 for every dart: the dart runs from its tail vertex
in cell (0, 0) of the universal cover to its head vertex in cell ``offset``.
Darts ``d`` and ``pair[d]`` form one edge and carry opposite offsets.

Faces are traced with ``next = rotation[pair[d]]``, so the face containing a
dart lies to its right.  Every dart also records the corner it opens: the
cell in which the face's anchored lift meets the dart's tail vertex.  Those
corner offsets are what the Tait and overlaid graphs are built from.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

Offset = tuple[int, int]
Weight = int | Fraction

BUILTIN_NAMES = ("square-weave", "triaxial", "rhombitrihexagonal")


class MapValidationError(ValueError):
    """A map or graph violates one of its structural invariants."""


def _add(a: Offset, b: Offset) -> Offset:
    return (a[0] + b[0], a[1] + b[1])


def _sub(a: Offset, b: Offset) -> Offset:
    return (a[0] - b[0], a[1] - b[1])


def _neg(a: Offset) -> Offset:
    return (-a[0], -a[1])


class Face(NamedTuple):
    darts: tuple[int, ...]
    corners: tuple[Offset, ...]  # cell of tail(darts[i]) relative to the face anchor
    offset: Offset  # total translation around the boundary

    @property
    def length(self) -> int:
        return len(self.darts)

    @property
    def contractible(self) -> bool:
        return self.offset == (0, 0)


class Checkerboard(NamedTuple):
    shaded: tuple[int, ...]
    white: tuple[int, ...]
    color: tuple[int, ...]  # per face: 0 shaded, 1 white

    def faces_of(self, cls: str) -> tuple[int, ...]:
        return self.shaded if _class_index(cls) == 0 else self.white


def _class_index(cls: str) -> int:
    if cls == "shaded":
        return 0
    if cls == "white":
        return 1
    raise ValueError(f"face class must be 'shaded' or 'white', got {cls!r}")


@dataclass(frozen=True)
class TorusMap:
    """Combinatorial map on the torus with Z^2 dart offsets.

    ``vertex_darts[v]`` lists the darts leaving ``v`` in counterclockwise
    order.  ``shaded_dart``, when given, names a dart whose face belongs to
    the shaded checkerboard class.
    """

    vertex_darts: tuple[tuple[int, ...], ...]
    pair: tuple[int, ...]
    offset: tuple[Offset, ...]
    shaded_dart: int | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        self._validate()

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_darts)

    @property
    def num_darts(self) -> int:
        return len(self.pair)

    @property
    def num_edges(self) -> int:
        return len(self.pair) // 2

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces

    @cached_property
    def rotation(self) -> tuple[int, ...]:
        rot = [0] * self.num_darts
        for darts in self.vertex_darts:
            for i, d in enumerate(darts):
                rot[d] = darts[(i + 1) % len(darts)]
        return tuple(rot)

    @cached_property
    def rotation_inverse(self) -> tuple[int, ...]:
        inv = [0] * self.num_darts
        for d, e in enumerate(self.rotation):
            inv[e] = d
        return tuple(inv)

    @cached_property
    def vertex_of(self) -> tuple[int, ...]:
        owner = [0] * self.num_darts
        for v, darts in enumerate(self.vertex_darts):
            for d in darts:
                owner[d] = v
        return tuple(owner)

    def head(self, d: int) -> int:
        return self.vertex_of[self.pair[d]]

    def edges(self) -> list[tuple[int, int, Offset]]:
        """One ``(dart, paired dart, offset of dart)`` record per edge, by smallest dart."""
        return [(d, self.pair[d], self.offset[d]) for d in range(self.num_darts) if d < self.pair[d]]

    def degree(self, v: int) -> int:
        return len(self.vertex_darts[v])

    @property
    def is_four_valent(self) -> bool:
        return all(len(ds) == 4 for ds in self.vertex_darts)

    @cached_property
    def faces(self) -> tuple[Face, ...]:
        seen = [False] * self.num_darts
        out = []
        for start in range(self.num_darts):
            if seen[start]:
                continue
            darts, corners = [], []
            pos = (0, 0)
            d = start
            while not seen[d]:
                seen[d] = True
                darts.append(d)
                corners.append(pos)
                pos = _add(pos, self.offset[d])
                d = self.rotation[self.pair[d]]
            out.append(Face(tuple(darts), tuple(corners), pos))
        return tuple(out)

    @cached_property
    def face_of(self) -> tuple[int, ...]:
        owner = [0] * self.num_darts
        for f, face in enumerate(self.faces):
            for d in face.darts:
                owner[d] = f
        return tuple(owner)

    @cached_property
    def corner(self) -> tuple[Offset, ...]:
        """Cell of ``vertex_of[d]`` as seen from the anchored lift of ``face_of[d]``."""
        out: list[Offset] = [(0, 0)] * self.num_darts
        for face in self.faces:
            for d, c in zip(face.darts, face.corners):
                out[d] = c
        return tuple(out)

    def _validate(self) -> None:
        n = len(self.pair)
        if n == 0 or n % 2:
            raise MapValidationError("dart count must be positive and even")
        if len(self.offset) != n:
            raise MapValidationError("one offset per dart required")
        for d, e in enumerate(self.pair):
            if not 0 <= e < n:
                raise MapValidationError(f"dart {d} paired with out-of-range dart {e}")
            if e == d or self.pair[e] != d:
                raise MapValidationError(f"pairing is not a fixed-point-free involution at dart {d}")
            if self.offset[e] != _neg(self.offset[d]):
                raise MapValidationError(f"offsets of darts {d} and {e} do not negate")
        listed = [d for ds in self.vertex_darts for d in ds]
        if sorted(listed) != list(range(n)):
            raise MapValidationError("every dart must appear exactly once in the vertex rotations")
        if any(len(ds) == 0 for ds in self.vertex_darts):
            raise MapValidationError("isolated vertex in rotation system")
        if self.shaded_dart is not None and not 0 <= self.shaded_dart < n:
            raise MapValidationError("shaded dart out of range")
        if not self._connected():
            raise MapValidationError("map is not connected")
        chi = self.euler_characteristic
        if chi != 0:
            raise MapValidationError(f"Euler characteristic is {chi}, expected 0 on the torus")

    def _connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            d = queue.popleft()
            for e in (self.pair[d], self.rotation[d]):
                if e not in seen:
                    seen.add(e)
                    queue.append(e)
        return len(seen) == self.num_darts

    def require_link_diagram(self) -> "TorusMap":
        """Raise unless this map can be a link diagram: 4-valent with disc faces."""
        if not self.is_four_valent:
            raise MapValidationError("link diagrams need 4-valent vertices")
        if not all(f.contractible for f in self.faces):
            raise MapValidationError("link diagrams need contractible faces")
        return self


class PeriodicEdge(NamedTuple):
    tail: int
    head: int
    offset: Offset
    weight: Weight = 1

    def reversed(self) -> "PeriodicEdge":
        return PeriodicEdge(self.head, self.tail, _neg(self.offset), self.weight)


@dataclass(frozen=True)
class TorusGraph:
    """Weighted multigraph on the torus; edge offsets are head cell minus tail cell.

    ``colors`` optionally labels a bipartition ("black"/"white").  ``faces``
    optionally lists face boundaries as tuples of edge indices.
    """

    num_vertices: int
    edges: tuple[PeriodicEdge, ...]
    colors: tuple[str, ...] | None = None
    faces: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(PeriodicEdge(*e) for e in self.edges))
        for e in self.edges:
            if not (0 <= e.tail < self.num_vertices and 0 <= e.head < self.num_vertices):
                raise MapValidationError(f"edge {e} has an endpoint out of range")
            if e.weight <= 0:
                raise MapValidationError(f"edge {e} has nonpositive weight")
        if self.colors is not None:
            if len(self.colors) != self.num_vertices:
                raise MapValidationError("one color per vertex required")
            for e in self.edges:
                if self.colors[e.tail] == self.colors[e.head]:
                    raise MapValidationError(f"edge {e} joins two {self.colors[e.tail]} vertices")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertices_colored(self, color: str) -> list[int]:
        if self.colors is None:
            raise MapValidationError("graph carries no bipartition")
        return [v for v, c in enumerate(self.colors) if c == color]

    def degree(self, v: int) -> int:
        return sum((e.tail == v) + (e.head == v) for e in self.edges)

    def is_connected(self) -> bool:
        return _connected(self.num_vertices, [(e.tail, e.head) for e in self.edges])


@dataclass(frozen=True)
class FiniteGraph:
    """Undirected weighted multigraph; self-loops allowed."""

    num_vertices: int
    edges: tuple[tuple[int, int, Weight], ...]
    toroidal: bool = False

    def __post_init__(self):
        edges = tuple((u, v, w) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v, w in edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise MapValidationError(f"edge ({u}, {v}) out of range")
            if w <= 0:
                raise MapValidationError(f"edge ({u}, {v}) has nonpositive weight")

    @classmethod
    def from_pairs(cls, num_vertices: int, pairs: Sequence[tuple[int, int]], toroidal: bool = False):
        return cls(num_vertices, tuple((u, v, 1) for u, v in pairs), toroidal)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        return _connected(self.num_vertices, [(u, v) for u, v, _ in self.edges])

    def degree_sequence(self) -> list[int]:
        deg = [0] * self.num_vertices
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return sorted(deg)


def _connected(n: int, pairs) -> bool:
    if n <= 1:
        return True
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = n
    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


# ---------------------------------------------------------------------------
# Built-in semi-regular diagrams
# ---------------------------------------------------------------------------


def map_from_geometry(
    positions: Sequence[tuple[float, float]],
    lattice: tuple[tuple[float, float], tuple[float, float]],
    edge_length: float = 1.0,
    shaded_dart: int | None = None,
    name: str = "",
) -> TorusMap:
    """Periodic map whose edges join lattice translates at distance ``edge_length``.

    Rotations come from the angles of the edge vectors, so the result is the
    honest planar embedding of the periodic drawing.
    """
    (ax, ay), (bx, by) = lattice
    reps = set()
    for u, (ux, uy) in enumerate(positions):
        for v, (vx, vy) in enumerate(positions):
            for i, j in itertools.product((-1, 0, 1), repeat=2):
                dx = vx + i * ax + j * bx - ux
                dy = vy + i * ay + j * by - uy
                if abs(math.hypot(dx, dy) - edge_length) < 1e-9:
                    reps.add(min((u, v, (i, j)), (v, u, (-i, -j))))
    reps = sorted(reps)
    pair, offset, tail, angle = [], [], [], []
    for k, (u, v, off) in enumerate(reps):
        pair += [2 * k + 1, 2 * k]
        offset += [off, _neg(off)]
        tail += [u, v]
        dx = positions[v][0] + off[0] * ax + off[1] * bx - positions[u][0]
        dy = positions[v][1] + off[0] * ay + off[1] * by - positions[u][1]
        angle += [math.atan2(dy, dx), math.atan2(-dy, -dx)]
    vertex_darts = []
    for v in range(len(positions)):
        darts = [d for d in range(len(tail)) if tail[d] == v]
        vertex_darts.append(tuple(sorted(darts, key=lambda d: angle[d])))
    return TorusMap(tuple(vertex_darts), tuple(pair), tuple(offset), shaded_dart, name)


def _square_weave() -> TorusMap:
    m = map_from_geometry([(0, 0), (1, 0), (0, 1), (1, 1)], ((2, 0), (0, 2)), name="square-weave")
    # shaded class: face to the left of dart 0
    return _with_shaded(m, m.pair[0])


def _triaxial() -> TorusMap:
    h = math.sqrt(3) / 2
    m = map_from_geometry([(1, 0), (-0.5, h), (0.5, h)], ((2, 0), (-1, 2 * h)), name="triaxial")
    hexagon = next(f for f in m.faces if f.length == 6)
    return _with_shaded(m, hexagon.darts[0])


def _rhombitrihexagonal() -> TorusMap:
    s = 1 + math.sqrt(3)
    lattice = ((s * math.cos(math.pi / 6), s * math.sin(math.pi / 6)), (0.0, s))
    hexagon = [(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]
    m = map_from_geometry(hexagon, lattice, name="rhombitrihexagonal")
    square = next(f for f in m.faces if f.length == 4)
    return _with_shaded(m, square.darts[0])


def _with_shaded(m: TorusMap, dart: int) -> TorusMap:
    return TorusMap(m.vertex_darts, m.pair, m.offset, dart, m.name)


_BUILDERS = {
    "square-weave": _square_weave,
    "triaxial": _triaxial,
    "rhombitrihexagonal": _rhombitrihexagonal,
}


def build_builtin(name: str) -> TorusMap:
    """Fundamental domain of one of the built-in semi-regular alternating links."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown builtin link {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return builder().require_link_diagram()


# ---------------------------------------------------------------------------
# Faces, checkerboard, Tait and overlaid graphs
# ---------------------------------------------------------------------------


def faces(m: TorusMap) -> tuple[Face, ...]:
    return m.faces


def checkerboard(m: TorusMap) -> Checkerboard:
    """Two-color the faces so that faces sharing an edge differ.

    The shaded class is the one containing ``m.shaded_dart`` (default: the
    face to the left of dart 0).
    """
    m.require_link_diagram()
    nf = m.num_faces
    color = [-1] * nf
    ref = m.shaded_dart if m.shaded_dart is not None else m.pair[0]
    start = m.face_of[ref]
    color[start] = 0
    queue = deque([start])
    while queue:
        f = queue.popleft()
        for d in m.faces[f].darts:
            g = m.face_of[m.pair[d]]
            if color[g] == -1:
                color[g] = 1 - color[f]
                queue.append(g)
            elif color[g] == color[f]:
                raise MapValidationError("face adjacency is not 2-colorable; not a checkerboard diagram")
    shaded = tuple(f for f in range(nf) if color[f] == 0)
    white = tuple(f for f in range(nf) if color[f] == 1)
    return Checkerboard(shaded, white, tuple(color))


def tait_graph(m: TorusMap, cls: str = "shaded") -> TorusGraph:
    """Checkerboard graph on the faces of one class; one edge per crossing."""
    board = checkerboard(m)
    want = _class_index(cls)
    members = board.faces_of(cls)
    index = {f: i for i, f in enumerate(members)}
    edges = []
    for darts in m.vertex_darts:
        # corner of face_of[d] sits between rotation_inverse[d] and d
        picks = [d for d in darts if board.color[m.face_of[d]] == want]
        if len(picks) != 2:
            raise MapValidationError("checkerboard classes do not alternate around a crossing")
        d1, d2 = picks
        f1, f2 = m.face_of[d1], m.face_of[d2]
        edges.append(PeriodicEdge(index[f1], index[f2], _sub(m.corner[d1], m.corner[d2])))
    return TorusGraph(len(members), tuple(edges))


def dual_graph(m: TorusMap, cls: str = "shaded") -> TorusGraph:
    """Planar dual of ``tait_graph(m, cls)``: the Tait graph of the other class."""
    return tait_graph(m, "white" if _class_index(cls) == 0 else "shaded")


def overlaid_graph(m: TorusMap) -> TorusGraph:
    """Balanced bipartite face/crossing incidence graph with its quadrilateral faces.

    Vertices ``0..F-1`` are black (faces of the diagram), ``F..F+V-1`` are white
    (crossings).  Edge ``d`` is the corner opened by dart ``d`` and runs from the
    face to the crossing.  Each diagram edge bounds one quadrilateral face.
    """
    m.require_link_diagram()
    nf, nv = m.num_faces, m.num_vertices
    edges = tuple(
        PeriodicEdge(m.face_of[d], nf + m.vertex_of[d], m.corner[d]) for d in range(m.num_darts)
    )
    quads = []
    rot = m.rotation
    for d, e, _ in m.edges():
        quads.append((d, rot[e], e, rot[d]))
    colors = ("black",) * nf + ("white",) * nv
    return TorusGraph(nf + nv, edges, colors, tuple(quads))


# ---------------------------------------------------------------------------
# Covers, quotients and planar windows
# ---------------------------------------------------------------------------


def _cell_index(i: int, j: int, n: int) -> int:
    return i * n + j


def blow_up(g: TorusGraph, k: int) -> TorusGraph:
    """The same periodic graph seen with the k-times larger fundamental domain."""
    if k < 1:
        raise ValueError("blow-up factor must be positive")
    nv = g.num_vertices
    edges = []
    for i, j in itertools.product(range(k), repeat=2):
        base = _cell_index(i, j, k) * nv
        for e in g.edges:
            hi, hj = i + e.offset[0], j + e.offset[1]
            head = _cell_index(hi % k, hj % k, k) * nv + e.head
            edges.append(PeriodicEdge(base + e.tail, head, (hi // k, hj // k), e.weight))
    colors = None if g.colors is None else tuple(g.colors) * (k * k)
    return TorusGraph(nv * k * k, tuple(edges), colors)


def cover_map(m: TorusMap, n: int) -> TorusMap:
    """Diagram of the n x n quotient ``L_n`` built from the fundamental domain ``L_1``."""
    if n < 1:
        raise ValueError("cover degree must be positive")
    nd = m.num_darts

    def dart(d, i, j):
        return _cell_index(i, j, n) * nd + d

    pair = [0] * (nd * n * n)
    offset: list[Offset] = [(0, 0)] * (nd * n * n)
    vertex_darts = []
    for i, j in itertools.product(range(n), repeat=2):
        for ds in m.vertex_darts:
            vertex_darts.append(tuple(dart(d, i, j) for d in ds))
        for d in range(nd):
            hi, hj = i + m.offset[d][0], j + m.offset[d][1]
            pair[dart(d, i, j)] = dart(m.pair[d], hi % n, hj % n)
            offset[dart(d, i, j)] = (hi // n, hj // n)
    shaded = None if m.shaded_dart is None else dart(m.shaded_dart, 0, 0)
    return TorusMap(tuple(vertex_darts), tuple(pair), tuple(offset), shaded, f"{m.name}[{n}]")


def torus_quotient(g: TorusGraph, n: int) -> FiniteGraph:
    """Finite graph ``G / (nZ x nZ)``; periodic edges wrap around modulo n."""
    if n < 1:
        raise ValueError("quotient size must be positive")
    big = blow_up(g, n)
    return FiniteGraph(big.num_vertices, tuple((e.tail, e.head, e.weight) for e in big.edges), toroidal=True)


def planar_cut(g: TorusGraph, n: int) -> FiniteGraph:
    """Induced graph on an n x n window of cells; edges leaving the window are dropped."""
    if n < 1:
        raise ValueError("window size must be positive")
    nv = g.num_vertices
    edges = []
    for i, j in itertools.product(range(n), repeat=2):
        for e in g.edges:
            hi, hj = i + e.offset[0], j + e.offset[1]
            if 0 <= hi < n and 0 <= hj < n:
                edges.append((_cell_index(i, j, n) * nv + e.tail, _cell_index(hi, hj, n) * nv + e.head, e.weight))
    return FiniteGraph(nv * n * n, tuple(edges), toroidal=False)


def isomorphic(a: FiniteGraph, b: FiniteGraph, max_vertices: int = 8) -> bool:
    """Brute-force multigraph isomorphism for tiny graphs (weights respected)."""
    if a.num_vertices != b.num_vertices or a.num_edges != b.num_edges:
        return False
    if a.degree_sequence() != b.degree_sequence():
        return False
    n = a.num_vertices
    if n > max_vertices:
        raise ValueError(f"brute-force isomorphism limited to {max_vertices} vertices")

    def key(edges, perm):
        return sorted((min(perm[u], perm[v]), max(perm[u], perm[v]), w) for u, v, w in edges)

    target = key(b.edges, list(range(n)))
    return any(key(a.edges, perm) == target for perm in itertools.permutations(range(n)))
