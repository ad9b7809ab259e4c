"""Partite graded complexes and the uniform hypergraphs they are built from.

A complex stores, for every level ``i`` in ``2..k``, a set of sorted
``i``-tuples of vertex ids.  Vertices are partitioned into ordered classes and
every edge meets each class at most once.  Levels are downward closed: every
``(i-1)``-subset of an ``i``-edge is itself an edge.
"""

from __future__ import annotations

import json
from collections import deque
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .errors import StructuralError, ValidationError

MAX_K = 4

Edge = tuple[int, ...]


class VertexClasses:
    """Ordered, pairwise disjoint vertex classes."""

    __slots__ = ("classes", "class_of")

    def __init__(self, classes: Iterable[Iterable[int]]):
        self.classes: tuple[frozenset[int], ...] = tuple(frozenset(c) for c in classes)
        class_of: dict[int, int] = {}
        for idx, cls in enumerate(self.classes):
            for v in cls:
                if v in class_of:
                    raise StructuralError(
                        f"vertex {v} appears in classes {class_of[v]} and {idx}"
                    )
                class_of[v] = idx
        self.class_of = class_of

    @classmethod
    def equal(cls, num_classes: int, size: int) -> "VertexClasses":
        """``num_classes`` classes of ``size`` consecutive ids each."""
        return cls(range(j * size, (j + 1) * size) for j in range(num_classes))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "VertexClasses":
        out, start = [], 0
        for s in sizes:
            out.append(range(start, start + s))
            start += s
        return cls(out)

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, idx: int) -> frozenset[int]:
        return self.classes[idx]

    def __iter__(self):
        return iter(self.classes)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VertexClasses) and self.classes == other.classes

    def __hash__(self) -> int:
        return hash(self.classes)

    def __repr__(self) -> str:
        return f"VertexClasses(sizes={self.sizes})"

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.class_of)

    def is_crossing(self, edge: Iterable[int]) -> bool:
        seen = set()
        for v in edge:
            c = self.class_of[v]
            if c in seen:
                return False
            seen.add(c)
        return True

    def class_tuple(self, edge: Iterable[int]) -> tuple[int, ...]:
        """Sorted tuple of the class indices met by ``edge``."""
        return tuple(sorted(self.class_of[v] for v in edge))


def _canonical(edge: Iterable[int]) -> Edge:
    return tuple(sorted(edge))


class UniformHypergraph:
    """A ``k``-uniform hypergraph, optionally with a partite structure.

    Without explicit classes the vertex set is ``range(num_vertices)``.
    """

    def __init__(
        self,
        k: int,
        edges: Iterable[Iterable[int]],
        vertex_classes: VertexClasses | None = None,
        num_vertices: int | None = None,
    ):
        self.k = k
        self.edges: frozenset[Edge] = frozenset(_canonical(e) for e in edges)
        for e in self.edges:
            if len(e) != k or len(set(e)) != k:
                raise StructuralError(f"edge {e} is not a {k}-set")
        self.vertex_classes = vertex_classes
        if vertex_classes is not None:
            verts = vertex_classes.vertices
            for e in self.edges:
                if not verts.issuperset(e):
                    raise StructuralError(f"edge {e} uses an unknown vertex")
                if not vertex_classes.is_crossing(e):
                    raise StructuralError(f"edge {e} is not crossing")
            self.vertices = verts
        else:
            if num_vertices is None:
                num_vertices = 1 + max((max(e) for e in self.edges), default=-1)
            self.vertices = frozenset(range(num_vertices))
            for e in self.edges:
                if not self.vertices.issuperset(e):
                    raise StructuralError(f"edge {e} uses an unknown vertex")

    def __len__(self) -> int:
        return len(self.vertices)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def max_degree(self) -> int:
        counts: dict[int, int] = {}
        for e in self.edges:
            for v in e:
                counts[v] = counts.get(v, 0) + 1
        return max(counts.values(), default=0)

    def __repr__(self) -> str:
        return f"UniformHypergraph(k={self.k}, |V|={len(self.vertices)}, e={len(self.edges)})"


class Complex:
    """An ``ell``-partite ``k``-complex.

    ``edges`` maps each level ``i`` in ``2..k`` to a set of sorted ``i``-tuples.
    Instances are treated as immutable; the cached indices below rely on it.
    """

    def __init__(
        self,
        vertex_classes: VertexClasses,
        k: int,
        edges: Mapping[int, Iterable[Iterable[int]]] | None = None,
        check: bool = True,
    ):
        if k < 2:
            raise ValidationError(f"k must be at least 2, got {k}")
        if k > MAX_K:
            raise ValidationError(f"k={k} exceeds the supported maximum {MAX_K}")
        self.vertex_classes = vertex_classes
        self.k = k
        edges = edges or {}
        unknown = set(edges) - set(range(2, k + 1))
        if unknown:
            raise StructuralError(f"levels {sorted(unknown)} outside 2..{k}")
        self.edges: dict[int, frozenset[Edge]] = {
            i: frozenset(_canonical(e) for e in edges.get(i, ())) for i in range(2, k + 1)
        }
        if check:
            self.check()

    def check(self) -> None:
        """Verify crossing, size and closure invariants; raise on violation."""
        vc = self.vertex_classes
        for i, level in self.edges.items():
            for e in level:
                if len(e) != i or len(set(e)) != i:
                    raise StructuralError(f"level-{i} edge {e} has the wrong size")
                if any(v not in vc.class_of for v in e):
                    raise StructuralError(f"edge {e} uses an unknown vertex")
                if not vc.is_crossing(e):
                    raise StructuralError(f"edge {e} is not crossing")
                if i >= 3:
                    below = self.edges[i - 1]
                    for sub in combinations(e, i - 1):
                        if sub not in below:
                            raise StructuralError(
                                f"closure violated: {sub} missing below edge {e}"
                            )

    # -- basic accessors -------------------------------------------------

    @property
    def classes(self) -> tuple[frozenset[int], ...]:
        return self.vertex_classes.classes

    @property
    def num_classes(self) -> int:
        return len(self.vertex_classes)

    @property
    def vertices(self) -> frozenset[int]:
        return self.vertex_classes.vertices

    def __len__(self) -> int:
        return len(self.vertex_classes.class_of)

    def e(self, i: int) -> int:
        return len(self.edges.get(i, ()))

    def class_of(self, v: int) -> int:
        return self.vertex_classes.class_of[v]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Complex)
            and self.k == other.k
            and self.vertex_classes == other.vertex_classes
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.k, self.vertex_classes, tuple(self.edges[i] for i in sorted(self.edges))))

    def __repr__(self) -> str:
        counts = ", ".join(f"e{i}={self.e(i)}" for i in range(2, self.k + 1))
        return f"Complex(k={self.k}, sizes={self.vertex_classes.sizes}, {counts})"

    # -- indices ---------------------------------------------------------

    @cached_property
    def neighbours(self) -> dict[int, frozenset[int]]:
        nb: dict[int, set[int]] = {v: set() for v in self.vertices}
        for a, b in self.edges[2]:
            nb[a].add(b)
            nb[b].add(a)
        return {v: frozenset(s) for v, s in nb.items()}

    @cached_property
    def links(self) -> dict[int, dict[Edge, frozenset[int]]]:
        """``links[i][S]`` is the set of vertices ``w`` with ``S + {w}`` an ``i``-edge."""
        out: dict[int, dict[Edge, frozenset[int]]] = {}
        for i in range(2, self.k + 1):
            acc: dict[Edge, set[int]] = {}
            for e in self.edges[i]:
                for pos, w in enumerate(e):
                    acc.setdefault(e[:pos] + e[pos + 1:], set()).add(w)
            out[i] = {s: frozenset(ws) for s, ws in acc.items()}
        return out

    def link(self, i: int, others: Iterable[int]) -> frozenset[int]:
        return self.links[i].get(_canonical(others), frozenset())

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "classes": [sorted(c) for c in self.classes],
            "k": self.k,
            "edges": {str(i): [list(e) for e in sorted(self.edges[i])] for i in range(2, self.k + 1)},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Complex":
        return cls(
            VertexClasses(data["classes"]),
            int(data["k"]),
            {int(i): [tuple(e) for e in es] for i, es in data.get("edges", {}).items()},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Complex":
        return cls.from_dict(json.loads(text))


def complete_complex(num_classes: int, n: int, k: int) -> Complex:
    """Every crossing ``i``-set is an edge, for ``i = 2..k``."""
    vc = VertexClasses.equal(num_classes, n)
    edges = {}
    for i in range(2, k + 1):
        level = []
        for cls_tuple in combinations(range(num_classes), i):
            level.extend(_product_sorted([vc[c] for c in cls_tuple]))
        edges[i] = level
    return Complex(vc, k, edges, check=False)


def _product_sorted(classes: Sequence[Iterable[int]]) -> list[Edge]:
    return [_canonical(t) for t in product(*classes)]


def downward_closure(u: UniformHypergraph) -> Complex:
    """Complex whose ``i``-edges are all ``i``-subsets of edges of ``u``.

    Without a partite structure on ``u`` each vertex becomes its own class.
    """
    vc = u.vertex_classes
    if vc is None:
        vc = VertexClasses([v] for v in sorted(u.vertices))
    for e in u.edges:
        if not vc.is_crossing(e):
            raise StructuralError(f"edge {e} is not crossing")
    levels: dict[int, set[Edge]] = {i: set() for i in range(2, u.k + 1)}
    for e in u.edges:
        for i in range(2, u.k + 1):
            levels[i].update(combinations(e, i))
    return Complex(vc, u.k, levels, check=False)


def complex_degree(c: Complex, v: int) -> int:
    """Maximum over levels of the number of edges containing ``v``."""
    if v not in c.vertex_classes.class_of:
        raise KeyError(f"unknown vertex {v}")
    return max((sum(1 for e in c.edges[i] if v in e) for i in range(2, c.k + 1)), default=0)


def max_degree(c: Complex) -> int:
    best = 0
    for i in range(2, c.k + 1):
        counts: dict[int, int] = {}
        for e in c.edges[i]:
            for v in e:
                counts[v] = counts.get(v, 0) + 1
        best = max(best, max(counts.values(), default=0))
    return best


def components(c: Complex) -> list[frozenset[int]]:
    """Connected components of the level-2 graph, ordered by smallest vertex."""
    seen: set[int] = set()
    out = []
    nb = c.neighbours
    for start in sorted(c.vertices):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in nb[x]:
                if y not in comp:
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        out.append(frozenset(comp))
    return out


def induced_subcomplex(c: Complex, s: Iterable[int]) -> Complex:
    """Restriction of ``c`` to the vertex set ``s``.

    Vertex ids and class positions are preserved (classes may become empty),
    so the result is literally a subcomplex of ``c``.
    """
    s = frozenset(s)
    missing = s - c.vertices
    if missing:
        raise KeyError(f"unknown vertices {sorted(missing)}")
    vc = VertexClasses(cls & s for cls in c.classes)
    edges = {i: [e for e in c.edges[i] if s.issuperset(e)] for i in range(2, c.k + 1)}
    return Complex(vc, c.k, edges, check=False)


def truncate(c: Complex, j: int) -> Complex:
    """Drop all levels above ``j``."""
    if not 2 <= j <= c.k:
        raise ValidationError(f"truncation level {j} outside 2..{c.k}")
    if j == c.k:
        return c
    return Complex(c.vertex_classes, j, {i: c.edges[i] for i in range(2, j + 1)}, check=False)


def uniform_from_complex(c: Complex) -> UniformHypergraph:
    """The top level of ``c`` as a partite uniform hypergraph."""
    return UniformHypergraph(c.k, c.edges[c.k], c.vertex_classes)
