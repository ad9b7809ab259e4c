"""Random regular complexes, slicing, and families of partitions.

Every random decision about an edge is a hash of ``(seed, tag, level, edge)``,
so outputs do not depend on iteration order.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

from .complex import Complex, Edge, VertexClasses
from .density import DensityVector, cliques, cliques_of
from .errors import StructuralError, ValidationError

_MASK = (1 << 64) - 1


def _mix(x: int) -> int:
    # splitmix64 finalizer
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def edge_key(seed: int, tag: str, level: int) -> int:
    return _mix(_mix(seed & _MASK) ^ zlib.crc32(tag.encode()) ^ (level << 40))


def edge_uniform(key: int, edge: Iterable[int]) -> float:
    """Uniform value in ``[0, 1)`` determined by ``key`` and the edge as a set."""
    h = key
    for v in sorted(edge):
        h = _mix(h ^ v)
    return (h >> 11) * (1.0 / (1 << 53))


# -- regular complexes -------------------------------------------------------------


def generate_regular_complex(
    num_classes: int, n: int, d: DensityVector, seed: int = 0
) -> Complex:
    """Random ``(d.k, num_classes)``-complex with ``n`` vertices per class.

    Level 2 is a random ``num_classes``-partite graph; each clique of level
    ``i-1`` becomes an ``i``-edge independently with probability ``d_i`` (or the
    override for its class tuple).
    """
    if num_classes < 2 or n < 1:
        raise ValidationError("need at least 2 classes and n >= 1")
    k = d.k
    vc = VertexClasses.equal(num_classes, n)
    levels: dict[int, list[Edge]] = {}
    key = edge_key(seed, "regular", 2)
    level2 = []
    for a, b in combinations(range(num_classes), 2):
        p = d.at(2, (a, b))
        for x, y in product(sorted(vc[a]), sorted(vc[b])):
            if edge_uniform(key, (x, y)) < p:
                level2.append((x, y))
    levels[2] = level2
    for i in range(3, k + 1):
        key = edge_key(seed, "regular", i)
        keep = []
        for c in cliques_of(levels[i - 1], i):
            if edge_uniform(key, c) < d.at(i, vc.class_tuple(c)):
                keep.append(c)
        levels[i] = keep
    return Complex(vc, k, levels, check=False)


# -- slicing --------------------------------------------------------------------


@dataclass(frozen=True)
class SliceSpec:
    probabilities: tuple[float, ...]
    seed: int = 0
    p0: float | None = None
    s0: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "probabilities", tuple(self.probabilities))
        ps = self.probabilities
        if not ps:
            raise ValidationError("slice needs at least one probability")
        if any(p <= 0 for p in ps):
            raise ValidationError("slice probabilities must be positive")
        if sum(ps) > 1 + 1e-12:
            raise ValidationError(f"slice probabilities sum to {sum(ps)} > 1")
        if self.p0 is not None and min(ps) < self.p0:
            raise ValidationError(f"probability {min(ps)} below p0={self.p0}")
        if self.s0 is not None and len(ps) > self.s0:
            raise ValidationError(f"{len(ps)} parts exceed s0={self.s0}")


def slice_level(
    g: Complex, j: int, spec: SliceSpec, edges: Iterable[Edge] | None = None
) -> list[set[Edge]]:
    """Split level ``j`` (or the given subset of it) into parts ``E0, E1..Es``.

    Each edge lands in part ``i`` with probability ``p_i`` and in ``E0``
    otherwise.  When the probabilities sum to 1 ``E0`` is empty.
    """
    if not 2 <= j <= g.k:
        raise ValidationError(f"level {j} outside 2..{g.k}")
    pool = g.edges[j] if edges is None else set(edges)
    if edges is not None and not pool <= g.edges[j]:
        raise StructuralError("edges to slice are not all level-j edges")
    bounds = []
    acc = 0.0
    for p in spec.probabilities:
        acc += p
        bounds.append(acc)
    exhaustive = abs(acc - 1) <= 1e-12
    parts: list[set[Edge]] = [set() for _ in range(len(bounds) + 1)]
    key = edge_key(spec.seed, "slice", j)
    for e in pool:
        u = edge_uniform(key, e)
        for idx, b in enumerate(bounds):
            if u < b:
                parts[idx + 1].add(e)
                break
        else:
            (parts[-1] if exhaustive else parts[0]).add(e)
    return parts


def slicing_precondition(g: Complex, j: int) -> dict:
    """Whether ``|K_j(G_{j-1})| > n^j / ln n`` holds (reported, not enforced)."""
    n = max(g.vertex_classes.sizes)
    count = len(cliques(g, j))
    bound = n**j / math.log(n) if n > 1 else math.inf
    return {"cliques": count, "bound": bound, "holds": count > bound}


# -- families of partitions -----------------------------------------------------------


@dataclass(frozen=True)
class Polyad:
    """The union of the parts of level ``level`` beneath a crossing set."""

    key: tuple
    level: int
    clusters: tuple[int, ...]
    edges: frozenset[Edge]


@dataclass
class PartitionFamily:
    """Clusters plus, for each level ``2..k-1``, a part label for each crossing set.

    The part containing a crossing ``j``-set ``J`` is identified by
    ``part_id(J) = (clusters of J, polyad key of J, label of J)``; labels range
    over ``0..a_j-1`` so ``K_j`` of every polyad is split into ``a_j`` parts.
    """

    vertices: tuple[int, ...]
    a: tuple[int, ...]
    clusters: tuple[tuple[int, ...], ...]
    labels: dict[int, dict[Edge, int]]
    seed: int = 0
    cluster_of: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.cluster_of:
            self.cluster_of = {v: ci for ci, cl in enumerate(self.clusters) for v in cl}
        self._part_cache: dict[Edge, tuple] = {}

    @property
    def k(self) -> int:
        return len(self.a) + 1

    @property
    def vertex_classes(self) -> VertexClasses:
        return VertexClasses(self.clusters)

    def is_crossing(self, s: Iterable[int]) -> bool:
        seen = set()
        for v in s:
            c = self.cluster_of[v]
            if c in seen:
                return False
            seen.add(c)
        return True

    def clusters_of(self, s: Iterable[int]) -> tuple[int, ...]:
        return tuple(sorted(self.cluster_of[v] for v in s))

    def part_id(self, s: Edge) -> tuple:
        s = tuple(sorted(s))
        cached = self._part_cache.get(s)
        if cached is not None:
            return cached
        if len(s) == 1:
            pid = (self.clusters_of(s), (), 0)
        else:
            if len(s) >= self.k:
                raise ValidationError(f"partitions only cover levels 1..{self.k - 1}")
            if not self.is_crossing(s):
                raise StructuralError(f"{s} is not crossing")
            pid = (self.clusters_of(s), self.polyad_key(s), self.labels[len(s)][s])
        self._part_cache[s] = pid
        return pid

    def polyad_key(self, s: Edge) -> tuple:
        """Canonical key of the polyad of the crossing set ``s``."""
        s = tuple(sorted(s))
        if not self.is_crossing(s):
            raise StructuralError(f"{s} is not crossing")
        return tuple(sorted(self.part_id(sub) for sub in combinations(s, len(s) - 1)))

    def part_edges(self, pid: tuple) -> frozenset[Edge]:
        return self._parts_index().get(pid, frozenset())

    def _parts_index(self) -> dict[tuple, frozenset[Edge]]:
        idx = getattr(self, "_parts", None)
        if idx is None:
            acc: dict[tuple, set[Edge]] = {}
            for v in self.vertices:
                acc.setdefault(self.part_id((v,)), set()).add((v,))
            for j, lab in self.labels.items():
                for s in lab:
                    acc.setdefault(self.part_id(s), set()).add(s)
            idx = {pid: frozenset(es) for pid, es in acc.items()}
            self._parts = idx
        return idx

    def polyad(self, s: Edge) -> Polyad:
        """The polyad of a crossing ``j``-set: union of parts beneath it at level ``j-1``."""
        s = tuple(sorted(s))
        if not 2 <= len(s) <= self.k:
            raise ValidationError(f"polyads exist for crossing sets of size 2..{self.k}")
        key = self.polyad_key(s)
        edges = frozenset().union(*(self.part_edges(pid) for pid in key))
        return Polyad(key, len(s) - 1, self.clusters_of(s), edges)

    def crossing_sets(self, j: int, cluster_tuple: Sequence[int] | None = None) -> Iterable[Edge]:
        tuples = [tuple(cluster_tuple)] if cluster_tuple is not None else combinations(
            range(len(self.clusters)), j)
        for ct in tuples:
            for s in product(*(self.clusters[c] for c in ct)):
                yield tuple(sorted(s))

    def polyads_over(self, cluster_tuple: Sequence[int]) -> dict[tuple, list[Edge]]:
        """Group the crossing sets on ``cluster_tuple`` by their polyad key.

        Values are the members of ``K_j`` of each polyad (``j = len(cluster_tuple)``).
        """
        groups: dict[tuple, list[Edge]] = {}
        for s in self.crossing_sets(len(cluster_tuple), cluster_tuple):
            groups.setdefault(self.polyad_key(s), []).append(s)
        return groups

    def polyad_count(self, j: int) -> int:
        """Number of polyads of level ``j-1`` induced on any ``j`` clusters."""
        total = 1
        for i in range(2, j):
            total *= self.a[i - 1] ** math.comb(j, i)
        return total

    def check(self) -> None:
        """Verify the structural invariants of a family of partitions."""
        for j in range(2, self.k):
            for ct in combinations(range(len(self.clusters)), j):
                for key, members in self.polyads_over(ct).items():
                    labels = {self.labels[j][s] for s in members}
                    if not labels <= set(range(self.a[j - 1])):
                        raise StructuralError(f"labels {labels} outside 0..{self.a[j - 1] - 1}")
                    pe = self.polyad(members[0]).edges
                    for s in members:
                        for sub in combinations(s, j - 1):
                            if sub not in pe:
                                raise StructuralError(f"{s} not in K_j of its polyad")

    def equitability(self) -> dict:
        """Fraction of non-crossing ``k``-sets and per-polyad part densities."""
        m, k = len(self.vertices), self.k
        sizes = [len(c) for c in self.clusters]
        cross_k = sum(math.prod(sizes[c] for c in ct) for ct in combinations(range(len(sizes)), k))
        total = math.comb(m, k)
        non_crossing = (total - cross_k) / total if total else 0.0
        levels = {}
        for j in range(2, k):
            target = 1 / self.a[j - 1]
            devs = []
            for ct in combinations(range(len(self.clusters)), j):
                for members in self.polyads_over(ct).values():
                    counts = [0] * self.a[j - 1]
                    for s in members:
                        counts[self.labels[j][s]] += 1
                    devs.extend(abs(c / len(members) - target) for c in counts)
            levels[j] = {
                "target": target,
                "max_abs_deviation": max(devs, default=0.0),
                "mean_abs_deviation": sum(devs) / len(devs) if devs else 0.0,
            }
        return {"non_crossing_fraction": non_crossing, "levels": levels}

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "a": list(self.a),
            "seed": self.seed,
            "clusters": [list(c) for c in self.clusters],
            "labels": {str(j): [[list(s), lab] for s, lab in sorted(d.items())]
                       for j, d in self.labels.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PartitionFamily":
        labels = {int(j): {tuple(s): int(lab) for s, lab in items}
                  for j, items in data["labels"].items()}
        return cls(tuple(data["vertices"]), tuple(data["a"]),
                   tuple(tuple(c) for c in data["clusters"]), labels, data.get("seed", 0))


def generate_partition_family(
    vertices: int | Sequence[int], a: Sequence[int], seed: int = 0, discard_remainder: bool = False
) -> PartitionFamily:
    """Family of partitions built by iterated slicing of complete levels.

    Clusters are consecutive blocks of the sorted vertex list.  Each ``K_j`` of
    a polyad is sliced into ``a_j`` parts with probability ``1/a_j`` each.
    """
    verts = list(range(vertices)) if isinstance(vertices, int) else sorted(vertices)
    a = tuple(int(x) for x in a)
    if not a or any(x < 1 for x in a):
        raise ValidationError("a must be a nonempty vector of positive integers")
    a1 = a[0]
    if len(verts) % a1:
        if not discard_remainder:
            raise ValidationError(f"a_1={a1} does not divide |V|={len(verts)}")
        verts = verts[: len(verts) - len(verts) % a1]
    if not verts:
        raise ValidationError("no vertices left after discarding the remainder")
    size = len(verts) // a1
    clusters = tuple(tuple(verts[c * size:(c + 1) * size]) for c in range(a1))
    labels: dict[int, dict[Edge, int]] = {}
    k = len(a) + 1
    fam = PartitionFamily(tuple(verts), a, clusters, labels, seed)
    for j in range(2, k):
        key = edge_key(seed, "family", j)
        aj = a[j - 1]
        lab = {}
        for s in fam.crossing_sets(j):
            lab[s] = min(int(edge_uniform(key, s) * aj), aj - 1)
        labels[j] = lab
    return fam
