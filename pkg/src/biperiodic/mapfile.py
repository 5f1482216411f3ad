"""Plain-text periodic-map documents.

One record per line; ``#`` starts a comment and blank lines are ignored::

    torusmap 1
    name square-weave
    vertices 4
    v 0 : 0 2 4 6
    ...
    e 0 1 : 1 0
    ...
    shaded 1

``v`` lists the darts leaving a vertex in counterclockwise order.  ``e``
pairs two darts into an edge and gives the offset of the first one (the
second carries its negation).  ``name`` and ``shaded`` (a dart whose face is
in the shaded checkerboard class) are optional.  :func:`export_map` writes
records in a canonical order, so ``export_map(load_map(text)) == text`` for
any exported document.
"""

from __future__ import annotations

from pathlib import Path

from .periodic_graph import BUILTIN_NAMES, MapValidationError, TorusMap, build_builtin

FORMAT_VERSION = 1


class MapParseError(ValueError):
    """Malformed periodic-map document."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise MapParseError(lineno, f"expected integers, got {' '.join(tokens)!r}") from None


def _split_record(rest: str, lineno: int, left: int, right: int) -> tuple[list[int], list[int]]:
    if rest.count(":") != 1:
        raise MapParseError(lineno, "expected exactly one ':' separator")
    a, b = rest.split(":")
    lhs, rhs = _ints(a.split(), lineno), _ints(b.split(), lineno)
    if len(lhs) != left or (right >= 0 and len(rhs) != right):
        raise MapParseError(lineno, "wrong number of fields")
    return lhs, rhs


def load_map(text: str) -> TorusMap:
    """Parse and validate a periodic-map document."""
    header = False
    name = ""
    nverts = None
    vertices: dict[int, tuple[int, ...]] = {}
    edges: list[tuple[int, int, tuple[int, int], int]] = []
    shaded = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if not header:
            if key != "torusmap" or rest != str(FORMAT_VERSION):
                raise MapParseError(lineno, f"document must start with 'torusmap {FORMAT_VERSION}'")
            header = True
        elif key == "name":
            name = rest
        elif key == "vertices":
            (nverts,) = _ints([rest], lineno)
            if nverts <= 0:
                raise MapParseError(lineno, "vertex count must be positive")
        elif key == "v":
            (v,), darts = _split_record(rest, lineno, 1, -1)
            if v in vertices:
                raise MapParseError(lineno, f"vertex {v} listed twice")
            vertices[v] = tuple(darts)
        elif key == "e":
            (d, e), (ax, ay) = _split_record(rest, lineno, 2, 2)
            edges.append((d, e, (ax, ay), lineno))
        elif key == "shaded":
            (shaded,) = _ints([rest], lineno)
        else:
            raise MapParseError(lineno, f"unknown record {key!r}")
    if not header:
        raise MapParseError(0, "empty document")
    if nverts is None:
        raise MapParseError(0, "missing 'vertices' header")
    if sorted(vertices) != list(range(nverts)):
        raise MapParseError(0, f"expected vertex records 0..{nverts - 1}")
    ndarts = 2 * len(edges)
    pair = [-1] * ndarts
    offset = [(0, 0)] * ndarts
    for d, e, (ax, ay), lineno in edges:
        for x in (d, e):
            if not 0 <= x < ndarts:
                raise MapValidationError(f"line {lineno}: dart {x} out of range 0..{ndarts - 1}")
            if pair[x] != -1:
                raise MapValidationError(f"line {lineno}: dart {x} belongs to two edges")
        if d == e:
            raise MapValidationError(f"line {lineno}: an edge needs two distinct darts")
        pair[d], pair[e] = e, d
        offset[d], offset[e] = (ax, ay), (-ax, -ay)
    return TorusMap(tuple(vertices[v] for v in range(nverts)), tuple(pair), tuple(offset), shaded, name)


def export_map(m: TorusMap) -> str:
    lines = [f"torusmap {FORMAT_VERSION}"]
    if m.name:
        if "#" in m.name or "\n" in m.name or m.name != m.name.strip():
            raise ValueError(f"map name {m.name!r} cannot be written to a map document")
        lines.append(f"name {m.name}")
    lines.append(f"vertices {m.num_vertices}")
    for v, darts in enumerate(m.vertex_darts):
        lines.append(f"v {v} : {' '.join(map(str, darts))}")
    for d, e, (ax, ay) in m.edges():
        lines.append(f"e {d} {e} : {ax} {ay}")
    if m.shaded_dart is not None:
        lines.append(f"shaded {m.shaded_dart}")
    return "\n".join(lines) + "\n"


def resolve_link(spec: str) -> TorusMap:
    """A builtin name or the path of a map document."""
    if spec in BUILTIN_NAMES:
        return build_builtin(spec)
    path = Path(spec)
    if not path.is_file():
        raise ValueError(f"{spec!r} is neither a builtin ({', '.join(BUILTIN_NAMES)}) nor a readable file")
    m = load_map(path.read_text())
    return m.require_link_diagram()
