"""Exact counting of labelled partition-respecting copies and extensions."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterator, Mapping

from .complex import Complex, truncate
from .density import DensityVector
from .errors import CapacityError, StructuralError, ValidationError

NAIVE_CAP = 10**7
STATS_CAP = 10**6


class PartitionWarning(UserWarning):
    """The host does not respect the partition of the pattern."""


@dataclass(frozen=True)
class Embedding:
    """A map from pattern vertices to host vertices.

    ``class_map`` sends pattern class indices to host class indices; ``None``
    means the identity.
    """

    map: Mapping[int, int]
    class_map: Mapping[int, int] | None = None

    def target_class(self, j: int) -> int:
        return j if self.class_map is None else self.class_map[j]

    def to_dict(self) -> dict:
        return {
            "map": {str(x): y for x, y in sorted(self.map.items())},
            "class_map": None if self.class_map is None
            else {str(a): b for a, b in sorted(self.class_map.items())},
        }


@dataclass
class ExtensionStats:
    counts: list[int]
    mean: float
    variance: float
    predicted: float
    typical_fraction: float
    epsilon: float
    copies: list[dict[int, int]] = field(default_factory=list, repr=False)

    @property
    def relative_variance(self) -> float:
        """``variance / mean^2`` (inf for a zero mean)."""
        return self.variance / self.mean**2 if self.mean else math.inf

    def to_dict(self) -> dict:
        return {
            "copies": len(self.counts),
            "mean": self.mean,
            "variance": self.variance,
            "relative_variance": self.relative_variance,
            "predicted": self.predicted,
            "typical_fraction": self.typical_fraction,
            "epsilon": self.epsilon,
        }


# -- validity --------------------------------------------------------------------


def verify_map(h: Complex, g: Complex, e: Embedding) -> tuple[bool, str | None]:
    """Check injectivity, class respect and every edge at every level."""
    m = e.map
    if set(m) != set(h.vertices):
        missing = sorted(set(h.vertices) - set(m))
        extra = sorted(set(m) - set(h.vertices))
        return False, f"domain mismatch: missing {missing}, unexpected {extra}"
    seen: dict[int, int] = {}
    for x, y in sorted(m.items()):
        if y in seen:
            return False, f"injectivity: {seen[y]} and {x} both map to {y}"
        seen[y] = x
    for x, y in sorted(m.items()):
        if y not in g.vertex_classes.class_of:
            return False, f"vertex {x} maps to unknown host vertex {y}"
        want = e.target_class(h.class_of(x))
        if g.class_of(y) != want:
            return False, f"class: {x} maps to {y} outside host class {want}"
    for i in range(2, h.k + 1):
        host = g.edges.get(i, frozenset())
        for edge in sorted(h.edges[i]):
            img = tuple(sorted(m[x] for x in edge))
            if img not in host:
                return False, f"edge: level-{i} edge {edge} maps to non-edge {img}"
    return True, None


def respects_partition(g: Complex, h: Complex, class_map: Mapping[int, int] | None = None) -> bool:
    """Every class tuple used by an edge of ``h`` carries an edge of ``g`` at that level."""
    cm = (lambda j: j) if class_map is None else class_map.__getitem__
    for i in range(2, h.k + 1):
        used = {tuple(sorted(cm(h.class_of(v)) for v in e)) for e in h.edges[i]}
        if not used:
            continue
        if i > g.k:
            return False
        present = {g.vertex_classes.class_tuple(e) for e in g.edges[i]}
        if not used <= present:
            return False
    return True


def _check_classes(h: Complex, g: Complex, class_map) -> None:
    if class_map is None:
        if h.num_classes != g.num_classes:
            raise StructuralError(
                f"pattern has {h.num_classes} classes, host has {g.num_classes}"
            )
    else:
        if sorted(class_map) != list(range(h.num_classes)):
            raise StructuralError("class_map must cover every pattern class")
        if len(set(class_map.values())) != len(class_map):
            raise StructuralError("class_map must be injective")
        if any(not 0 <= c < g.num_classes for c in class_map.values()):
            raise StructuralError("class_map points outside the host classes")
    if h.k > g.k and any(h.edges[i] for i in range(g.k + 1, h.k + 1)):
        raise StructuralError(f"pattern has edges above host level {g.k}")


# -- backtracking engine ----------------------------------------------------------


class Matcher:
    """Backtracking over pattern vertices with link-based candidate sets.

    Vertices in ``fixed`` are placed first; among the rest the order prefers
    vertices with many already-placed neighbours, then high degree, then a
    small candidate class, then the smaller id.
    """

    def __init__(
        self,
        h: Complex,
        g: Complex,
        class_map: Mapping[int, int] | None = None,
        fixed: Mapping[int, int] | None = None,
    ):
        _check_classes(h, g, class_map)
        self.h, self.g = h, g
        self.fixed = dict(fixed or {})
        cm = (lambda j: j) if class_map is None else class_map.__getitem__
        self.domain = {x: g.classes[cm(h.class_of(x))] for x in h.vertices}
        self.order = self._order()
        pos = {x: p for p, x in enumerate(self.order)}
        # checks[p]: (level, earlier pattern vertices) for edges completed at position p
        self.checks: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in self.order]
        for i in range(2, h.k + 1):
            for e in h.edges[i]:
                last = max(e, key=pos.__getitem__)
                others = tuple(x for x in e if x != last)
                self.checks[pos[last]].append((i, others))
        for p in range(len(self.order)):
            # higher levels first: their links are smaller
            self.checks[p].sort(key=lambda c: -c[0])

    def _order(self) -> list[int]:
        h = self.h
        deg = {x: 0 for x in h.vertices}
        for i in range(2, h.k + 1):
            cnt: dict[int, int] = {}
            for e in h.edges[i]:
                for v in e:
                    cnt[v] = cnt.get(v, 0) + 1
            for v, c in cnt.items():
                deg[v] = max(deg[v], c)
        nb = h.neighbours
        order = sorted(self.fixed)
        placed = set(order)
        rest = set(h.vertices) - placed
        while rest:
            best = min(
                rest,
                key=lambda x: (-len(nb[x] & placed), -deg[x], len(self.domain[x]), x),
            )
            order.append(best)
            placed.add(best)
            rest.discard(best)
        return order

    def candidates(self, p: int, images: dict[int, int], used: set[int]) -> list[int] | frozenset[int]:
        x = self.order[p]
        sets = [self.domain[x]]
        links = self.g.links
        for i, others in self.checks[p]:
            key = tuple(sorted(images[o] for o in others))
            s = links[i].get(key)
            if not s:
                return ()
            sets.append(s)
        sets.sort(key=len)
        cand = sets[0]
        for s in sets[1:]:
            cand = cand & s
            if not cand:
                return ()
        if used:
            cand = cand - used
        return cand

    def _start(self) -> tuple[dict[int, int], set[int]]:
        images = dict(self.fixed)
        used = set(images.values())
        return images, used

    def count(self) -> int:
        images, used = self._start()
        start = len(self.fixed)
        order = self.order
        # edgeless vertices sort last; count them with falling factorials
        nb = self.h.neighbours
        iso = [x for x in order[start:] if not nb[x]]
        core = len(order) - len(iso)
        groups: dict[frozenset[int], int] = {}
        for x in iso:
            groups[self.domain[x]] = groups.get(self.domain[x], 0) + 1

        def tail() -> int:
            out = 1
            for dom, cnt in groups.items():
                free = len(dom) - sum(1 for y in used if y in dom)
                out *= math.perm(free, cnt) if free >= cnt else 0
            return out

        if start == core:
            return tail()

        def rec(p: int) -> int:
            cand = self.candidates(p, images, used)
            if p == core - 1 and not iso:
                return len(cand)
            total = 0
            x = order[p]
            for y in cand:
                images[x] = y
                used.add(y)
                total += rec(p + 1) if p + 1 < core else tail()
                used.discard(y)
            images.pop(x, None)
            return total

        return rec(start)

    def iterate(self) -> Iterator[dict[int, int]]:
        images, used = self._start()
        start = len(self.fixed)
        n = len(self.order)
        order = self.order

        def rec(p: int):
            if p == n:
                yield dict(images)
                return
            x = order[p]
            for y in sorted(self.candidates(p, images, used)):
                images[x] = y
                used.add(y)
                yield from rec(p + 1)
                used.discard(y)
                del images[x]

        yield from rec(start)


def count_copies(h: Complex, g: Complex, class_map: Mapping[int, int] | None = None) -> int:
    """Number of labelled partition-respecting copies of ``h`` in ``g``."""
    if not respects_partition(g, h, class_map):
        warnings.warn("host does not respect the partition of the pattern", PartitionWarning,
                      stacklevel=2)
    return Matcher(h, g, class_map).count()


def iter_copies(h: Complex, g: Complex, class_map: Mapping[int, int] | None = None
                ) -> Iterator[dict[int, int]]:
    return Matcher(h, g, class_map).iterate()


def count_copies_naive(
    h: Complex, g: Complex, class_map: Mapping[int, int] | None = None, cap: int = NAIVE_CAP
) -> int:
    """Brute force over all injective class-respecting maps."""
    _check_classes(h, g, class_map)
    cm = (lambda j: j) if class_map is None else class_map.__getitem__
    groups = [sorted(cls) for cls in h.classes]
    targets = [sorted(g.classes[cm(j)]) for j in range(h.num_classes)]
    size = 1
    for xs, ys in zip(groups, targets):
        size *= math.perm(len(ys), len(xs)) if len(xs) <= len(ys) else 0
    if size > cap:
        raise CapacityError(f"naive enumeration of {size} maps exceeds cap {cap}")
    if size == 0:
        return 0
    edges = [(i, e) for i in range(2, h.k + 1) for e in h.edges[i]]
    total = 0
    for choice in product(*(permutations(ys, len(xs)) for xs, ys in zip(groups, targets))):
        m = {}
        for xs, ys in zip(groups, choice):
            m.update(zip(xs, ys))
        if all(tuple(sorted(m[v] for v in e)) in g.edges[i] for i, e in edges):
            total += 1
    return total


# -- predictions --------------------------------------------------------------------


def _edge_weight(h: Complex, d: DensityVector, levels, skip=frozenset()) -> float:
    w = 1.0
    for i in levels:
        for e in h.edges[i]:
            if e in skip:
                continue
            w *= d.at(i, h.vertex_classes.class_tuple(e))
    return w


def _used_levels(h: Complex, d: DensityVector) -> range:
    for i in range(d.k + 1, h.k + 1):
        if h.edges[i]:
            raise ValidationError(f"no density given for level {i}")
    return range(2, min(h.k, d.k) + 1)


def expected_copies(h: Complex, n: int, d: DensityVector) -> float:
    """``n^|h|`` times the product of the densities of all edges of ``h``."""
    return float(n) ** len(h) * _edge_weight(h, d, _used_levels(h, d))


def _check_induced(h: Complex, h_prime: Complex) -> None:
    if not h.vertices <= h_prime.vertices:
        raise StructuralError("pattern is not a vertex subset of the extension")
    for j, cls in enumerate(h.classes):
        if j >= h_prime.num_classes or not cls <= h_prime.classes[j]:
            raise StructuralError("pattern classes are not inside the extension's classes")
    for i in range(2, h_prime.k + 1):
        inside = {e for e in h_prime.edges[i] if h.vertices.issuperset(e)}
        mine = h.edges[i] if i <= h.k else frozenset()
        if inside != mine:
            raise StructuralError(f"pattern is not induced in the extension at level {i}")


def expected_extensions(
    h: Complex, h_prime: Complex, n: int, d: DensityVector, truncated: bool = False
) -> float:
    """Random-model number of extensions of a copy of ``h`` to ``h_prime``.

    The truncated form omits the top density level ``d_k``.
    """
    _check_induced(h, h_prime)
    levels = list(_used_levels(h_prime, d))
    if truncated:
        levels = [i for i in levels if i < d.k]
    inner = set()
    for i in levels:
        inner |= h.edges.get(i, frozenset()) if i <= h.k else set()
    return float(n) ** (len(h_prime) - len(h)) * _edge_weight(h_prime, d, levels, inner)


def _truncated_pair(h_prime: Complex, g: Complex) -> tuple[Complex, Complex]:
    if g.k < 3:
        raise ValidationError("truncated extensions need a host with k >= 3")
    top = g.k - 1
    hp = truncate(h_prime, min(h_prime.k, top)) if h_prime.k > top else h_prime
    return hp, truncate(g, top)


class ExtensionCounter:
    """Counts extensions of many copies of ``h`` to ``h_prime`` in one host."""

    def __init__(self, h: Complex, h_prime: Complex, g: Complex, truncated: bool = False,
                 class_map: Mapping[int, int] | None = None):
        _check_induced(h, h_prime)
        if truncated:
            h_prime, g = _truncated_pair(h_prime, g)
            h = truncate(h, min(h.k, h_prime.k)) if h.k > h_prime.k else h
        self.h, self.h_prime, self.g = h, h_prime, g
        self.class_map = class_map
        self._template: Matcher | None = None

    def count(self, copy: Embedding | Mapping[int, int]) -> int:
        emb = copy if isinstance(copy, Embedding) else Embedding(dict(copy), self.class_map)
        ok, why = verify_map(self.h, self.g, emb)
        if not ok:
            raise ValidationError(f"invalid copy: {why}")
        return self._count_unchecked(emb.map)

    def _count_unchecked(self, fixed: Mapping[int, int]) -> int:
        if self._template is None:
            self._template = Matcher(self.h_prime, self.g, self.class_map, fixed)
        m = self._template
        m.fixed = dict(fixed)
        return m.count()


def count_extensions(
    h: Complex,
    h_prime: Complex,
    copy: Embedding | Mapping[int, int],
    g: Complex,
    truncated: bool = False,
) -> int:
    """Number of ways to extend ``copy`` (a copy of ``h``) to a copy of ``h_prime``."""
    cm = copy.class_map if isinstance(copy, Embedding) else None
    return ExtensionCounter(h, h_prime, g, truncated, cm).count(copy)


def extension_statistics(
    h: Complex,
    h_prime: Complex,
    g: Complex,
    epsilon: float,
    d: DensityVector,
    n: int | None = None,
    truncated: bool = False,
    cap: int = STATS_CAP,
    keep_copies: bool = False,
) -> ExtensionStats:
    """Extension counts of every copy of ``h`` against the random-model prediction."""
    if n is None:
        n = max(g.vertex_classes.sizes)
    counter = ExtensionCounter(h, h_prime, g, truncated)
    predicted = expected_extensions(h, h_prime, n, d, truncated)
    counts: list[int] = []
    kept = []
    base = Matcher(counter.h, counter.g)
    for copy in base.iterate():
        if len(counts) >= cap:
            raise CapacityError(f"more than {cap} copies of the base pattern")
        counts.append(counter._count_unchecked(copy))
        if keep_copies:
            kept.append(copy)
    if not counts:
        return ExtensionStats([], 0.0, 0.0, predicted, 0.0, epsilon, kept)
    mean = sum(counts) / len(counts)
    var = sum((c - mean) ** 2 for c in counts) / len(counts)
    lo, hi = (1 - epsilon) * predicted, (1 + epsilon) * predicted
    typical = sum(1 for c in counts if lo <= c <= hi) / len(counts)
    return ExtensionStats(counts, mean, var, predicted, typical, epsilon, kept)
