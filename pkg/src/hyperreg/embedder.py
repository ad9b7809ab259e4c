"""Greedy class assignment and bounded-degree embedding search."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping

from .complex import Complex, UniformHypergraph, VertexClasses, downward_closure
from .counting import Embedding, PartitionWarning, _check_classes, respects_partition, verify_map
from .errors import StructuralError, ValidationError

DEFAULT_BUDGET = 10**6
DEFAULT_SIZE_RATIO = 0.05


class ColouringError(StructuralError):
    """Greedy class assignment got stuck."""

    def __init__(self, vertex: int, q: int):
        super().__init__(f"vertex {vertex} has co-edge neighbours in all {q} classes")
        self.vertex = vertex


@dataclass
class ClassAssignment:
    """Vertex -> class index in ``0..q-1``; no edge repeats a class."""

    classes: dict[int, int]
    q: int

    def is_proper(self, h: UniformHypergraph) -> bool:
        return all(len({self.classes[v] for v in e}) == len(e) for e in h.edges)

    def vertex_classes(self) -> VertexClasses:
        groups: list[list[int]] = [[] for _ in range(self.q)]
        for v, c in sorted(self.classes.items()):
            groups[c].append(v)
        return VertexClasses(groups)

    def to_complex(self, h: UniformHypergraph) -> Complex:
        """``h`` made partite by this assignment, then closed downward."""
        return downward_closure(UniformHypergraph(h.k, h.edges, self.vertex_classes()))


def assign_classes(h: UniformHypergraph, q: int) -> ClassAssignment:
    """Greedy strong colouring: each vertex takes the lowest class unused by co-edge neighbours.

    With ``q >= (k-1) * max_degree + 1`` this always succeeds.
    """
    if q < 1:
        raise ValidationError("q must be positive")
    nbrs: dict[int, set[int]] = {v: set() for v in h.vertices}
    for e in h.edges:
        for v in e:
            nbrs[v].update(e)
    for v in nbrs:
        nbrs[v].discard(v)
    out: dict[int, int] = {}
    for v in sorted(h.vertices):
        taken = {out[u] for u in nbrs[v] if u in out}
        free = next((c for c in range(q) if c not in taken), None)
        if free is None:
            raise ColouringError(v, q)
        out[v] = free
    return ClassAssignment(out, q)


@dataclass
class EmbeddingResult:
    status: str  # "found" | "absent" | "indeterminate"
    embedding: Embedding | None
    nodes: int
    warnings: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == "found"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "nodes": self.nodes,
            "embedding": None if self.embedding is None else self.embedding.to_dict(),
            "warnings": self.warnings,
        }


class _BudgetExhausted(Exception):
    pass


def find_embedding(
    h: Complex,
    g: Complex,
    budget: int = DEFAULT_BUDGET,
    class_map: Mapping[int, int] | None = None,
    verify: bool = True,
    size_ratio: float = DEFAULT_SIZE_RATIO,
) -> EmbeddingResult:
    """Backtracking search for one partition-respecting copy of ``h`` in ``g``.

    Candidate sets are kept for every unplaced vertex and narrowed by forward
    checking whenever an edge is left with a single unplaced vertex.  The next
    vertex is the one with the fewest candidates (ties: higher degree, smaller
    id).  ``budget`` caps the number of placements tried; running out yields
    ``"indeterminate"``, while an exhausted search space yields ``"absent"``.
    """
    _check_classes(h, g, class_map)
    notes = []
    if not respects_partition(g, h, class_map):
        warnings.warn("host does not respect the partition of the pattern", PartitionWarning,
                      stacklevel=2)
        notes.append("host does not respect the partition of the pattern")
    cm = (lambda j: j) if class_map is None else class_map.__getitem__
    for j, cls in enumerate(h.classes):
        host_size = len(g.classes[cm(j)])
        if len(cls) > size_ratio * host_size:
            notes.append(f"class {j}: |X|={len(cls)} exceeds {size_ratio}*n={size_ratio * host_size:g}")

    incident: dict[int, list[tuple[int, tuple[int, ...]]]] = {x: [] for x in h.vertices}
    deg = {x: 0 for x in h.vertices}
    for i in range(2, h.k + 1):
        per = {x: 0 for x in h.vertices}
        for e in h.edges[i]:
            for x in e:
                incident[x].append((i, e))
                per[x] += 1
        for x in h.vertices:
            deg[x] = max(deg[x], per[x])
    same_class: dict[int, list[int]] = {}
    for x in h.vertices:
        same_class.setdefault(h.class_of(x), []).append(x)

    cand: dict[int, frozenset[int]] = {x: g.classes[cm(h.class_of(x))] for x in h.vertices}
    images: dict[int, int] = {}
    links = g.links
    nodes = 0

    def place(x: int, y: int) -> list[tuple[int, frozenset[int]]]:
        """Assign ``x -> y`` and forward-check; return the undo log."""
        undo: list[tuple[int, frozenset[int]]] = []
        images[x] = y
        for z in same_class[h.class_of(x)]:
            if z not in images and y in cand[z]:
                undo.append((z, cand[z]))
                cand[z] = cand[z] - {y}
                if not cand[z]:
                    return undo
        for i, e in incident[x]:
            free = [z for z in e if z not in images]
            if len(free) != 1:
                continue
            z = free[0]
            key = tuple(sorted(images[o] for o in e if o != z))
            narrowed = cand[z] & links[i].get(key, frozenset())
            if narrowed != cand[z]:
                undo.append((z, cand[z]))
                cand[z] = narrowed
                if not narrowed:
                    return undo
        return undo

    def wiped(undo) -> bool:
        return any(not cand[z] for z, _ in undo)

    def unplace(x: int, undo) -> None:
        for z, old in reversed(undo):
            cand[z] = old
        del images[x]

    def rec() -> bool:
        nonlocal nodes
        if len(images) == len(cand):
            return True
        x = min((z for z in cand if z not in images),
                key=lambda z: (len(cand[z]), -deg[z], z))
        for y in sorted(cand[x]):
            nodes += 1
            if nodes > budget:
                raise _BudgetExhausted
            undo = place(x, y)
            if not wiped(undo) and rec():
                return True
            unplace(x, undo)
        return False

    try:
        ok = rec()
    except _BudgetExhausted:
        return EmbeddingResult("indeterminate", None, nodes, notes)
    if not ok:
        return EmbeddingResult("absent", None, nodes, notes)
    emb = Embedding(dict(images), None if class_map is None else dict(class_map))
    if verify:
        good, why = verify_map(h, g, emb)
        if not good:
            raise AssertionError(f"search returned an invalid embedding: {why}")
    return EmbeddingResult("found", emb, nodes, notes)


def verify_embedding(
    h: Complex, g: Complex, e: Embedding | Mapping[int, int]
) -> tuple[bool, str | None]:
    """``(True, None)`` for a valid embedding, else ``(False, first violation)``."""
    if not isinstance(e, Embedding):
        e = Embedding(dict(e))
    return verify_map(h, g, e)
