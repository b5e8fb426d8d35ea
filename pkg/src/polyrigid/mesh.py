"""Closed triangulated surfaces and the text formats for meshes and fields.

Mesh file::

    # comment
    v 4
    f 0 1 2
    ...

Field file (vertex and edge fields respectively)::

    v 0 1.25
    e 0 1 2.0

Edges are unordered vertex pairs stored sorted and indexed in lexicographic
order; field files always name edges by their endpoints.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateEntry,
    DuplicateTriangle,
    IndexOutOfRange,
    MeshError,
    MissingEntry,
    NonManifoldVertex,
    OpenEdge,
    ParseError,
)
from .errors import DegenerateTriangle as _DegenerateTriangle


class DegenerateTriangle(MeshError, _DegenerateTriangle):
    """Triangle with a repeated vertex."""


class Support(enum.Enum):
    VERTICES = "v"
    EDGES = "e"


@dataclass(frozen=True, eq=False)
class Mesh:
    """Validated closed triangulated surface.

    Attributes
    ----------
    n_vertices : int
    triangles : (F, 3) int array
        Vertex indices per triangle, as given.
    edges : (E, 2) int array
        Sorted endpoint pairs in lexicographic order.
    tri_edges : (F, 3) int array
        ``tri_edges[t, c]`` is the edge opposite corner ``c`` of triangle ``t``.
    edge_tris : (E, 2, 2) int array
        For each edge its two ``(triangle, corner)`` incidences, where the
        corner faces the edge.
    """

    n_vertices: int
    triangles: np.ndarray
    edges: np.ndarray
    tri_edges: np.ndarray
    edge_tris: np.ndarray
    edge_index: dict = field(repr=False)
    connected: bool = True

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_triangles

    def edge_id(self, i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        try:
            return self.edge_index[key]
        except KeyError:
            raise MeshError(f"no edge between vertices {i} and {j}") from None

    def same_topology(self, other: "Mesh") -> bool:
        return (self.n_vertices == other.n_vertices
                and np.array_equal(self.triangles, other.triangles))


def build(vertex_count: int, triangles) -> Mesh:
    """Validate a triangle list and derive edges and incidence tables."""
    tris = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    n = int(vertex_count)
    if n <= 0:
        raise MeshError("vertex count must be positive")
    if len(tris) == 0:
        raise MeshError("mesh has no triangles")
    if tris.min() < 0 or tris.max() >= n:
        bad = int(np.argmax((tris < 0).any(axis=1) | (tris >= n).any(axis=1)))
        raise IndexOutOfRange(f"triangle {bad} {tris[bad].tolist()} references a vertex outside [0, {n})")

    seen = {}
    for t, (a, b, c) in enumerate(tris.tolist()):
        if a == b or b == c or a == c:
            raise DegenerateTriangle(f"triangle {t} has a repeated vertex: {[a, b, c]}")
        key = tuple(sorted((a, b, c)))
        if key in seen:
            raise DuplicateTriangle(f"triangles {seen[key]} and {t} coincide")
        seen[key] = t

    incidences = defaultdict(list)
    for t, tri in enumerate(tris.tolist()):
        for c in range(3):
            i, j = tri[(c + 1) % 3], tri[(c + 2) % 3]
            incidences[(min(i, j), max(i, j))].append((t, c))
    for key, inc in incidences.items():
        if len(inc) != 2:
            raise OpenEdge(f"edge {key} has {len(inc)} incident triangles (need 2)")

    keys = sorted(incidences)
    edge_index = {key: e for e, key in enumerate(keys)}
    edges = np.array(keys, dtype=np.int64)
    tri_edges = np.empty_like(tris)
    edge_tris = np.empty((len(keys), 2, 2), dtype=np.int64)
    for key, e in edge_index.items():
        for s, (t, c) in enumerate(incidences[key]):
            tri_edges[t, c] = e
            edge_tris[e, s] = (t, c)

    _check_links(n, tris)
    mesh = Mesh(n, tris, edges, tri_edges, edge_tris, edge_index, _is_connected(n, edges))
    return mesh


def _check_links(n: int, tris: np.ndarray) -> None:
    # the link of every vertex must be a single cycle of opposite edges
    link = defaultdict(list)
    for tri in tris.tolist():
        for c in range(3):
            link[tri[c]].append((tri[(c + 1) % 3], tri[(c + 2) % 3]))
    for v in range(n):
        segs = link.get(v)
        if not segs:
            raise NonManifoldVertex(f"vertex {v} belongs to no triangle")
        adj = defaultdict(list)
        for a, b in segs:
            adj[a].append(b)
            adj[b].append(a)
        if any(len(nb) != 2 for nb in adj.values()):
            raise NonManifoldVertex(f"link of vertex {v} is not a cycle")
        start = next(iter(adj))
        prev, cur, steps = None, start, 0
        while True:
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            prev, cur = cur, nxt
            steps += 1
            if cur == start:
                break
        if steps != len(adj):
            raise NonManifoldVertex(f"link of vertex {v} has several cycles (pinched vertex)")


def _is_connected(n: int, edges: np.ndarray) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges.tolist():
        parent[find(i)] = find(j)
    return len({find(v) for v in range(n)}) == 1


# --------------------------------------------------------------------------
# file formats

def _data_lines(path):
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_mesh(lines) -> Mesh:
    count = None
    tris = []
    for lineno, tok in lines:
        if tok[0] == "v":
            if count is not None or len(tok) != 2:
                raise ParseError("expected a single 'v <count>' header", lineno)
            try:
                count = int(tok[1])
            except ValueError:
                raise ParseError(f"bad vertex count {tok[1]!r}", lineno) from None
        elif tok[0] == "f":
            if count is None:
                raise ParseError("'f' line before 'v <count>' header", lineno)
            if len(tok) != 4:
                raise ParseError(f"face needs 3 indices, got {len(tok) - 1}", lineno)
            try:
                tris.append([int(x) for x in tok[1:]])
            except ValueError:
                raise ParseError(f"bad face indices {tok[1:]}", lineno) from None
        else:
            raise ParseError(f"unknown record {tok[0]!r}", lineno)
    if count is None:
        raise ParseError("missing 'v <count>' header")
    return build(count, tris)


def load_mesh(path) -> Mesh:
    return parse_mesh(_data_lines(path))


def format_mesh(mesh: Mesh) -> str:
    rows = [f"v {mesh.n_vertices}"]
    rows += [f"f {a} {b} {c}" for a, b, c in mesh.triangles.tolist()]
    return "\n".join(rows) + "\n"


def save_mesh(mesh: Mesh, path) -> None:
    Path(path).write_text(format_mesh(mesh), encoding="utf-8")


@dataclass
class Field:
    """Real values on every vertex or every edge of a mesh (by index)."""

    support: Support
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


def fmt(x: float) -> str:
    """17 significant digits: exact round trip for doubles."""
    return f"{float(x):.17g}"


def format_field(fld: Field, mesh: Mesh) -> str:
    if fld.support is Support.VERTICES:
        rows = [f"v {i} {fmt(x)}" for i, x in enumerate(fld.values)]
    else:
        rows = [f"e {i} {j} {fmt(x)}" for (i, j), x in zip(mesh.edges.tolist(), fld.values)]
    return "\n".join(rows) + "\n"


def save_field(fld: Field, mesh: Mesh, path) -> None:
    Path(path).write_text(format_field(fld, mesh), encoding="utf-8")


def parse_field(lines, mesh: Mesh, support: Support) -> Field:
    size = mesh.n_vertices if support is Support.VERTICES else mesh.n_edges
    values = np.full(size, np.nan)
    seen = np.zeros(size, dtype=bool)
    tag = support.value
    nidx = 1 if support is Support.VERTICES else 2
    for lineno, tok in lines:
        if tok[0] != tag or len(tok) != nidx + 2:
            raise ParseError(f"expected '{tag} " + "<i> " * nidx + "<value>'", lineno)
        try:
            idx = [int(x) for x in tok[1:1 + nidx]]
            val = float(tok[-1])
        except ValueError:
            raise ParseError(f"malformed entry {' '.join(tok)!r}", lineno) from None
        if not math.isfinite(val):
            raise ParseError(f"non-finite value {tok[-1]!r}", lineno)
        if support is Support.VERTICES:
            if not 0 <= idx[0] < size:
                raise ParseError(f"vertex {idx[0]} out of range", lineno)
            k = idx[0]
        else:
            i, j = idx
            if i >= j:
                raise ParseError(f"edge endpoints must satisfy i < j, got {i} {j}", lineno)
            try:
                k = mesh.edge_index[(i, j)]
            except KeyError:
                raise ParseError(f"({i}, {j}) is not an edge of the mesh", lineno) from None
        if seen[k]:
            raise DuplicateEntry(f"line {lineno}: duplicate entry for {tag} {' '.join(tok[1:1 + nidx])}")
        seen[k] = True
        values[k] = val
    if not seen.all():
        k = int(np.argmin(seen))
        name = str(k) if support is Support.VERTICES else "{} {}".format(*mesh.edges[k])
        raise MissingEntry(f"no value for {tag} {name}")
    return Field(support, values)


def load_field(path, mesh: Mesh, support: Support) -> Field:
    return parse_field(_data_lines(path), mesh, support)


# --------------------------------------------------------------------------
# standard closed surfaces

def tetrahedron() -> Mesh:
    return build(4, [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)])


def octahedron() -> Mesh:
    # 0/1 poles, 2..5 equator
    eq = [2, 3, 4, 5]
    tris = []
    for a in range(4):
        b, c = eq[a], eq[(a + 1) % 4]
        tris += [(0, b, c), (1, c, b)]
    return build(6, tris)


def icosahedron() -> Mesh:
    # 0 top, 1..5 upper ring, 6..10 lower ring, 11 bottom
    tris = []
    for k in range(5):
        a, b = 1 + k, 1 + (k + 1) % 5
        c, d = 6 + k, 6 + (k + 1) % 5
        tris += [(0, a, b), (a, c, b), (b, c, d), (11, d, c)]
    return build(12, tris)


def disjoint_union(a: Mesh, b: Mesh) -> Mesh:
    return build(a.n_vertices + b.n_vertices,
                 np.vstack([a.triangles, b.triangles + a.n_vertices]))


PLATONIC = {"tetrahedron": tetrahedron, "octahedron": octahedron, "icosahedron": icosahedron}
