"""Two-colourings of complete hypergraphs, reduced hypergraphs, and Ramsey search.

The pipeline here runs the regularity-method argument at desk scale: a family
of partitions stands in for the regular partition, fruitful cluster tuples form
the reduced hypergraph, a dense clique in it yields a majority colouring, and a
monochromatic clique of clusters hosts the final embedding.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Iterable, Mapping

from .complex import Complex, Edge, UniformHypergraph, VertexClasses
from .density import CliqueFamily, tested_tuples
from .embedder import assign_classes, find_embedding, verify_embedding
from .errors import StructuralError, ValidationError
from .random_models import (
    PartitionFamily,
    SliceSpec,
    edge_key,
    edge_uniform,
    generate_partition_family,
    slice_level,
)

RED, BLUE = "red", "blue"


def other(colour: str) -> str:
    return BLUE if colour == RED else RED


@dataclass(frozen=True)
class ColoredHypergraph:
    """A red/blue colouring of all ``k``-subsets of ``range(m)``."""

    m: int
    k: int
    red: frozenset[Edge]
    blue: frozenset[Edge]

    def __post_init__(self):
        if self.red & self.blue:
            raise StructuralError("an edge is coloured both red and blue")
        if len(self.red) + len(self.blue) != math.comb(self.m, self.k):
            raise StructuralError("colouring does not cover every k-subset exactly once")
        for e in self.red:
            if len(e) != self.k or e != tuple(sorted(e)) or not 0 <= e[0] <= e[-1] < self.m:
                raise StructuralError(f"bad edge {e}")

    @classmethod
    def from_red(cls, m: int, k: int, red: Iterable[Iterable[int]]) -> "ColoredHypergraph":
        red = frozenset(tuple(sorted(e)) for e in red)
        blue = frozenset(e for e in combinations(range(m), k) if e not in red)
        return cls(m, k, red, blue)

    def colour_of(self, e: Iterable[int]) -> str:
        return RED if tuple(sorted(e)) in self.red else BLUE

    def edges_of(self, colour: str) -> frozenset[Edge]:
        return self.red if colour == RED else self.blue

    def swapped(self) -> "ColoredHypergraph":
        return ColoredHypergraph(self.m, self.k, self.blue, self.red)

    def hypergraph(self, colour: str) -> UniformHypergraph:
        return UniformHypergraph(self.k, self.edges_of(colour), num_vertices=self.m)

    def to_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "red": [list(e) for e in sorted(self.red)]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "ColoredHypergraph":
        return cls.from_red(int(data["m"]), int(data["k"]), data["red"])


def color_complete(
    m: int,
    k: int,
    source: str | Callable[[Edge], str] = "random",
    seed: int = 0,
    p: float = 0.5,
) -> ColoredHypergraph:
    """Colour ``K_m^(k)``.

    ``source`` is ``"random"`` (red with probability ``p``), ``"all-red"``,
    ``"all-blue"``, ``"parity"`` (red iff the vertex sum is even) or a
    callable returning a colour per edge.
    """
    if m < k:
        raise ValidationError(f"need m >= k, got m={m}, k={k}")
    edges = list(combinations(range(m), k))
    if callable(source):
        rule = source
    elif source == "random":
        key = edge_key(seed, "colour", k)
        rule = lambda e: RED if edge_uniform(key, e) < p else BLUE  # noqa: E731
    elif source == "all-red":
        rule = lambda e: RED  # noqa: E731
    elif source == "all-blue":
        rule = lambda e: BLUE  # noqa: E731
    elif source == "parity":
        rule = lambda e: RED if sum(e) % 2 == 0 else BLUE  # noqa: E731
    else:
        raise ValidationError(f"unknown colouring source {source!r}")
    red = [e for e in edges if rule(e) == RED]
    return ColoredHypergraph.from_red(m, k, red)


# -- reduced hypergraph ---------------------------------------------------------------


@dataclass
class PolyadReport:
    clusters: tuple[int, ...]
    key: tuple
    volume: int
    density: Fraction
    best_d: Fraction
    half_range: Fraction
    regular: bool
    tested: list[frozenset[Edge]] = field(default_factory=list, repr=False)


@dataclass
class ReducedHypergraph:
    """Fruitful ``k``-tuples of clusters, with the per-polyad evidence."""

    a1: int
    k: int
    colour: str
    delta_k: float
    r: int
    edges: set[tuple[int, ...]]
    irregular_fraction: dict[tuple[int, ...], float]
    polyads: dict[tuple[tuple[int, ...], tuple], PolyadReport]

    @property
    def fruitful_fraction(self) -> float:
        total = math.comb(self.a1, self.k)
        return len(self.edges) / total if total else 0.0

    def as_hypergraph(self) -> UniformHypergraph:
        return UniformHypergraph(self.k, self.edges, num_vertices=self.a1)

    def summary(self) -> dict:
        return {
            "clusters": self.a1,
            "k": self.k,
            "colour": self.colour,
            "delta_k": self.delta_k,
            "r": self.r,
            "edges": len(self.edges),
            "fruitful_fraction": self.fruitful_fraction,
            "bound": 1 - 2 * math.sqrt(self.delta_k),
            "polyads_tested": len(self.polyads),
            "regular_polyads": sum(1 for rep in self.polyads.values() if rep.regular),
        }


def polyad_regularity(
    fam: CliqueFamily, delta_k: float, r: int, samples: int, rng: random.Random,
    keep_tests: bool = False,
) -> tuple[Fraction, Fraction, bool, list[frozenset[Edge]]]:
    """Whether some ``d`` makes the top level ``(d, delta_k, r)``-regular on the sampled tuples.

    Returns ``(best_d, half_range, regular, tested clique sets)``; ``best_d`` is
    the midpoint of the extreme tested densities, the smallest possible worst
    deviation.
    """
    qs = tested_tuples(fam, delta_k, r, "sampled", samples, rng)
    if not qs:
        return Fraction(0), Fraction(0), True, []
    lo = min(t.density for t in qs)
    hi = max(t.density for t in qs)
    best = (lo + hi) / 2
    half = (hi - lo) / 2
    tests = [frozenset(fam.cliques_in(t.clique_mask)) for t in qs] if keep_tests else []
    return best, half, half <= Fraction(delta_k), tests


def _majority(c: ColoredHypergraph) -> str:
    return RED if len(c.red) >= len(c.blue) else BLUE


def reduced_hypergraph(
    c: ColoredHypergraph,
    p: PartitionFamily,
    delta_k: float,
    r: int = 16,
    samples: int = 64,
    seed: int = 0,
    colour: str | None = None,
    max_polyads: int = 256,
    keep_tests: bool = False,
) -> ReducedHypergraph:
    """Reduced hypergraph of one colour class with respect to a family of partitions.

    A ``k``-tuple of clusters is an edge when at most a ``sqrt(delta_k)``
    fraction of its polyads fail the regularity test.  Polyads whose ``K_k`` is
    empty are vacuously regular.  ``colour`` defaults to the majority colour.
    """
    if p.k != c.k:
        raise StructuralError(f"family is for k={p.k}, colouring has k={c.k}")
    if not set(p.vertices) <= set(range(c.m)):
        raise StructuralError("family uses vertices outside the colouring")
    colour = colour or _majority(c)
    top = c.edges_of(colour)
    k = c.k
    total_polyads = p.polyad_count(k)
    threshold = math.sqrt(delta_k)
    edges = set()
    irregular: dict[tuple[int, ...], float] = {}
    reports: dict[tuple[tuple[int, ...], tuple], PolyadReport] = {}
    for ct in combinations(range(len(p.clusters)), k):
        groups = p.polyads_over(ct)
        keys = sorted(groups)
        pick_rng = random.Random(f"polyads:{seed}:{ct}")
        if len(keys) > max_polyads:
            keys = sorted(pick_rng.sample(keys, max_polyads))
        bad = 0
        for key in keys:
            members = groups[key]
            base = p.polyad(members[0]).edges
            fam = CliqueFamily(base, members, top)
            rng = random.Random(f"fruitful:{seed}:{ct}:{key!r}")
            best, half, ok, tests = polyad_regularity(fam, delta_k, r, samples, rng, keep_tests)
            reports[(ct, key)] = PolyadReport(
                ct, key, len(members), fam.density(fam.full_cliques), best, half, ok, tests)
            bad += not ok
        # scale the sampled irregular share to all polyads (empty ones are regular)
        share = bad / len(keys) * len(groups) / total_polyads if keys else 0.0
        irregular[ct] = share
        if share <= threshold:
            edges.add(ct)
    return ReducedHypergraph(len(p.clusters), k, colour, delta_k, r, edges, irregular, reports)


def transfer_identity_checks(c: ColoredHypergraph, rh: ReducedHypergraph) -> list[bool]:
    """For every tested tuple of every regular polyad, compare both sides exactly.

    With ``d`` the certified density of the reduced colour, the deviation of the
    other colour from ``1 - d`` must equal the deviation of the reduced colour
    from ``d``.  Densities are recounted from the colouring itself.
    """
    major = c.edges_of(rh.colour)
    minor = c.edges_of(other(rh.colour))
    out = []
    for rep in rh.polyads.values():
        if not rep.regular:
            continue
        d = rep.best_d
        for kq in rep.tested:
            n_major = sum(1 for e in kq if e in major)
            n_minor = sum(1 for e in kq if e in minor)
            d_major = Fraction(n_major, len(kq))
            d_minor = Fraction(n_minor, len(kq))
            out.append(abs((1 - d) - d_minor) == abs(d - d_major))
    return out


# -- cliques in the reduced hypergraph ------------------------------------------------


def turan_threshold(t: int, k: int, ell: int) -> Fraction:
    """Edge count above which a ``k``-graph on ``t`` vertices must contain ``K_ell``."""
    return (1 - Fraction(1, math.comb(ell, k))) * math.comb(t, k)


def find_clique(rh: UniformHypergraph, ell: int) -> tuple[int, ...] | None:
    """An ``ell``-set spanning all its ``k``-subsets as edges, or ``None`` if none exists."""
    k = rh.k
    if ell < k:
        raise ValidationError(f"clique size {ell} below uniformity {k}")
    edges = rh.edges
    verts = sorted(rh.vertices)
    if len(verts) < ell:
        return None
    if ell == k:
        return min(edges) if edges else None
    # vertices of degree below C(ell-1, k-1) cannot lie in a K_ell
    need = math.comb(ell - 1, k - 1)
    deg = {v: 0 for v in verts}
    for e in edges:
        for v in e:
            deg[v] += 1
    verts = [v for v in verts if deg[v] >= need]
    chosen: list[int] = []

    def fits(v: int) -> bool:
        if len(chosen) < k - 1:
            return True
        for sub in combinations(chosen, k - 1):
            if tuple(sorted(sub + (v,))) not in edges:
                return False
        return True

    def rec(start: int) -> bool:
        if len(chosen) == ell:
            return True
        for idx in range(start, len(verts)):
            if len(verts) - idx < ell - len(chosen):
                return False
            v = verts[idx]
            if fits(v):
                chosen.append(v)
                if rec(idx + 1):
                    return True
                chosen.pop()
        return False

    return tuple(chosen) if rec(0) else None


# -- complex selection and majority colouring -------------------------------------------


@dataclass
class Selection:
    """A ``(k-1, ell)``-complex on chosen clusters: one part label per cluster tuple and level."""

    clusters: tuple[int, ...]
    labels: dict[int, dict[tuple[int, ...], int]]

    def part_id(self, ct: tuple[int, ...]) -> tuple:
        ct = tuple(sorted(ct))
        if len(ct) == 1:
            return (ct, (), 0)
        return (ct, self.polyad_key(ct), self.labels[len(ct)][ct])

    def polyad_key(self, ct: tuple[int, ...]) -> tuple:
        ct = tuple(sorted(ct))
        return tuple(sorted(self.part_id(sub) for sub in combinations(ct, len(ct) - 1)))


def select_complex(p: PartitionFamily, clusters: Iterable[int], seed: int = 0) -> Selection:
    """Choose one part uniformly at random for every cluster tuple, level by level."""
    clusters = tuple(sorted(clusters))
    rng = random.Random(f"select:{seed}:{clusters}")
    labels: dict[int, dict[tuple[int, ...], int]] = {}
    for j in range(2, p.k):
        labels[j] = {ct: rng.randrange(p.a[j - 1]) for ct in combinations(clusters, j)}
    return Selection(clusters, labels)


def majority_color(
    c: ColoredHypergraph,
    p: PartitionFamily,
    clique_clusters: Iterable[int],
    s: Selection,
) -> dict[tuple[int, ...], str]:
    """Colour each ``k``-tuple of clusters red iff red has density >= 1/2 on its polyad in ``s``."""
    out = {}
    for ct in combinations(sorted(clique_clusters), c.k):
        members = p.polyads_over(ct).get(s.polyad_key(ct), [])
        reds = sum(1 for e in members if e in c.red)
        dens = Fraction(reds, len(members)) if members else Fraction(0)
        out[ct] = RED if dens >= Fraction(1, 2) else BLUE
    return out


def monochromatic_clique(
    colouring: Mapping[tuple[int, ...], str], vertices: Iterable[int], k: int, size: int
) -> tuple[tuple[int, ...], str] | None:
    """A ``size``-set all of whose ``k``-subsets share a colour, searched exhaustively."""
    for cand in combinations(sorted(vertices), size):
        cols = {colouring[sub] for sub in combinations(cand, k)}
        if len(cols) == 1:
            return cand, cols.pop()
    return None


# -- pipeline ---------------------------------------------------------------------


KNOWN_CLIQUE_RAMSEY = {(2, 2): 2, (2, 3): 6, (2, 4): 18}


@dataclass
class PipelineConfig:
    a: tuple[int, ...] | None = None
    delta_k: float = 0.2
    r: int = 16
    samples: int = 64
    seed: int = 0
    budget: int = 10**6
    ell: int | None = None
    selection_attempts: int = 20
    verify: bool = True


@dataclass
class PipelineResult:
    success: bool
    colour: str | None
    vertex_map: dict[int, int] | None
    failed_stage: str | None
    trace: dict

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "colour": self.colour,
            "vertex_map": None if self.vertex_map is None
            else {str(x): y for x, y in sorted(self.vertex_map.items())},
            "failed_stage": self.failed_stage,
            "trace": self.trace,
        }


def _is_monochromatic(c: ColoredHypergraph, h: UniformHypergraph, vmap, colour) -> bool:
    if len(set(vmap.values())) != len(vmap):
        return False
    target = c.edges_of(colour)
    return all(tuple(sorted(vmap[v] for v in e)) in target for e in h.edges)


def _default_ell(k: int, delta: int) -> int | None:
    s = k * delta
    if s == k:
        return k
    return KNOWN_CLIQUE_RAMSEY.get((k, s))


def ramsey_pipeline(
    h: UniformHypergraph,
    c: ColoredHypergraph,
    cfg: PipelineConfig | None = None,
) -> PipelineResult:
    """Find a monochromatic copy of ``h`` in ``c`` through the reduced-hypergraph route.

    Stage failures are reported in ``failed_stage`` with the trace up to that
    point; nothing is raised for hypotheses that fail at small ``m``.
    """
    cfg = cfg or PipelineConfig()
    k = c.k
    if h.k != k:
        raise ValidationError(f"pattern is {h.k}-uniform, colouring is {k}-uniform")
    trace: dict = {"m": c.m, "k": k, "pattern_vertices": len(h), "pattern_edges": len(h.edges)}
    if len(h) > c.m:
        return PipelineResult(False, None, None, "pattern larger than colouring", trace)

    # short cuts: one colour class is complete, or the pattern has at most one edge
    for col in (RED, BLUE):
        if not c.edges_of(other(col)):
            vmap = {v: i for i, v in enumerate(sorted(h.vertices))}
            trace["short_circuit"] = f"{other(col)} is empty"
            return PipelineResult(True, col, vmap, None, trace)
    if len(h.edges) <= 1:
        edge = min(h.edges) if h.edges else None
        order = sorted(h.vertices, key=lambda v: (edge is None or v not in edge, v))
        vmap = {v: i for i, v in enumerate(order)}
        col = c.colour_of(range(k)) if edge else RED
        trace["short_circuit"] = "pattern has at most one edge"
        return PipelineResult(True, col, vmap, None, trace)

    delta = h.max_degree()
    s_size = k * delta
    ell = cfg.ell or _default_ell(k, delta)
    if ell is None:
        raise ValidationError(f"no known Ramsey number for K_{s_size}^({k}); set cfg.ell")
    trace.update({"max_degree": delta, "mono_clique_size": s_size, "ell": ell})

    swapped = len(c.blue) > len(c.red)
    work = c.swapped() if swapped else c
    trace["reduced_colour"] = BLUE if swapped else RED

    a = cfg.a or (max(ell, 4),) + (2,) * (k - 2)
    fam = generate_partition_family(c.m, a, seed=cfg.seed, discard_remainder=True)
    trace["family"] = {"a": list(a), "used_vertices": len(fam.vertices),
                       "cluster_size": len(fam.clusters[0]), **fam.equitability()}
    if len(fam.clusters) < ell:
        return PipelineResult(False, None, None, "too few clusters", trace)

    rh = reduced_hypergraph(work, fam, cfg.delta_k, cfg.r, cfg.samples, cfg.seed, colour=RED,
                            keep_tests=True)
    trace["reduced"] = rh.summary()
    thr = turan_threshold(rh.a1, k, ell)
    trace["turan"] = {"threshold": float(thr), "edges": len(rh.edges),
                      "above_threshold": len(rh.edges) > thr}
    clique = find_clique(rh.as_hypergraph(), ell)
    trace["clique"] = None if clique is None else list(clique)
    if clique is None:
        return PipelineResult(False, None, None, "no clique in reduced hypergraph", trace)

    selection = None
    for attempt in range(cfg.selection_attempts):
        sel = select_complex(fam, clique, seed=cfg.seed * 1000 + attempt)
        ok = all(
            rh.polyads.get((ct, sel.polyad_key(ct))) is None
            or rh.polyads[(ct, sel.polyad_key(ct))].regular
            for ct in combinations(clique, k)
        )
        if ok:
            selection = sel
            trace["selection_attempts"] = attempt + 1
            break
    if selection is None:
        trace["selection_attempts"] = cfg.selection_attempts
        return PipelineResult(False, None, None, "no regular selection", trace)

    colouring = majority_color(work, fam, clique, selection)
    trace["cluster_colouring"] = {RED: sum(1 for v in colouring.values() if v == RED),
                                  BLUE: sum(1 for v in colouring.values() if v == BLUE)}
    mono = monochromatic_clique(colouring, clique, k, s_size)
    if mono is None:
        return PipelineResult(False, None, None, "no monochromatic clique of clusters", trace)
    chosen, work_colour = mono
    trace["mono_clusters"] = list(chosen)
    transfer = transfer_identity_checks(work, rh)
    trace["transfer_identity"] = {"checked": len(transfer), "held": sum(transfer)}

    host, slice_info = _coloured_host(work, fam, selection, chosen, work_colour, cfg.seed)
    trace["slices"] = slice_info
    assignment = assign_classes(h, s_size)
    pattern = assignment.to_complex(h)
    result = find_embedding(pattern, host, budget=cfg.budget, verify=cfg.verify)
    trace["embedding"] = {"status": result.status, "nodes": result.nodes,
                          "warnings": result.warnings}
    if not result.found:
        return PipelineResult(False, None, None, f"embedding {result.status}", trace)
    ok, why = verify_embedding(pattern, host, result.embedding)
    vmap = dict(result.embedding.map)
    final_colour = other(work_colour) if swapped else work_colour
    mono_ok = _is_monochromatic(c, h, vmap, final_colour)
    trace["verified"] = {"embedding": ok, "monochromatic": mono_ok, "violation": why}
    if not (ok and mono_ok):
        raise AssertionError(f"pipeline produced an invalid copy: {why}")
    return PipelineResult(True, final_colour, vmap, None, trace)


def _coloured_host(
    c: ColoredHypergraph,
    fam: PartitionFamily,
    sel: Selection,
    chosen: tuple[int, ...],
    colour: str,
    seed: int,
) -> tuple[Complex, list[dict]]:
    """Complex on the chosen clusters: selected parts below, sliced colour class on top.

    On each polyad the colour class is thinned to density 1/2 by slicing with
    ``p = (1/2) / measured density``.
    """
    k = c.k
    vc = VertexClasses(fam.clusters[ci] for ci in chosen)
    levels: dict[int, set[Edge]] = {}
    for j in range(2, k):
        level = set()
        for ct in combinations(chosen, j):
            level |= fam.part_edges(sel.part_id(ct))
        levels[j] = level
    target = c.edges_of(colour)
    tuples = list(combinations(chosen, k))
    members = {ct: fam.polyads_over(ct).get(sel.polyad_key(ct), []) for ct in tuples}
    coloured = {ct: [e for e in members[ct] if e in target] for ct in tuples}
    full = Complex(vc, k, {**levels, k: [e for ct in tuples for e in coloured[ct]]})
    kept: list[Edge] = []
    info = []
    for idx, ct in enumerate(tuples):
        edges = coloured[ct]
        if not edges:
            info.append({"clusters": list(ct), "density": 0.0, "p": None, "kept": 0})
            continue
        dens = len(edges) / len(members[ct])
        p_keep = min(1.0, 0.5 / dens)
        parts = slice_level(full, k, SliceSpec((p_keep,), seed=seed * 7919 + idx), edges=edges)
        kept.extend(parts[1])
        info.append({"clusters": list(ct), "density": dens, "p": p_keep, "kept": len(parts[1]),
                     "sliced_density": len(parts[1]) / len(members[ct])})
    host = Complex(vc, k, {**levels, k: kept}, check=False)
    return host, info


# -- exact Ramsey oracle ------------------------------------------------------------------


def contains_copy(edges: frozenset[Edge], m: int, h: UniformHypergraph) -> bool:
    """Whether the ``k``-graph ``edges`` on ``range(m)`` contains a copy of ``h``."""
    if len(h) > m:
        return False
    if not h.edges:
        return True
    hv = sorted({v for e in h.edges for v in e})
    incident: dict[int, list[Edge]] = {v: [] for v in hv}
    for e in h.edges:
        for v in e:
            incident[v].append(e)
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < len(hv):
        x = max((v for v in hv if v not in placed),
                key=lambda v: (sum(1 for e in incident[v] for u in e if u in placed), len(incident[v]), -v))
        order.append(x)
        placed.add(x)
    pos = {x: i for i, x in enumerate(order)}
    checks = [[] for _ in order]
    for e in h.edges:
        last = max(e, key=pos.__getitem__)
        checks[pos[last]].append(tuple(u for u in e if u != last))
    img: dict[int, int] = {}
    used: set[int] = set()

    def rec(p: int) -> bool:
        if p == len(order):
            return True
        x = order[p]
        for y in range(m):
            if y in used:
                continue
            if all(tuple(sorted([img[u] for u in others] + [y])) in edges for others in checks[p]):
                img[x] = y
                used.add(y)
                if rec(p + 1):
                    return True
                used.discard(y)
                del img[x]
        return False

    return rec(0)


class _Canon:
    """Canonical forms of colourings of ``K_m^(k)`` under vertex permutations and colour swap."""

    def __init__(self, m: int, k: int, use_perms: bool):
        self.edges = list(combinations(range(m), k))
        self.index = {e: i for i, e in enumerate(self.edges)}
        self.maps: list[list[int]] = []
        if use_perms:
            for perm in permutations(range(m)):
                self.maps.append([self.index[tuple(sorted(perm[v] for v in e))] for e in self.edges])
        self.full = (1 << len(self.edges)) - 1

    def canon(self, mask: int) -> int:
        best = min(mask, self.full ^ mask)
        for mp in self.maps:
            for cand in (mask, self.full ^ mask):
                out = 0
                bits = cand
                i = 0
                while bits:
                    if bits & 1:
                        out |= 1 << mp[i]
                    bits >>= 1
                    i += 1
                if out < best:
                    best = out
        return best

    def red_edges(self, mask: int) -> frozenset[Edge]:
        return frozenset(e for i, e in enumerate(self.edges) if mask >> i & 1)


@dataclass
class OracleResult:
    exact: bool
    value: int | None
    lower_bound: int
    witness: ColoredHypergraph | None
    survivors: dict[int, int]
    budget_exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "exact": self.exact,
            "value": self.value,
            "lower_bound": self.lower_bound,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "survivors": {str(m): n for m, n in self.survivors.items()},
            "budget_exhausted": self.budget_exhausted,
        }


def ramsey_oracle(
    h: UniformHypergraph,
    m_max: int,
    budget: int = 10**7,
    iso_limit: int = 8,
) -> OracleResult:
    """Exact ``R(h)`` by growing all monochromatic-free colourings one vertex at a time.

    Survivors are kept up to isomorphism (vertex permutations and colour swap)
    while ``m <= iso_limit``.  When ``m_max`` or ``budget`` is reached the
    result is a lower bound carrying a re-checked witness colouring.
    """
    k = h.k
    hv = len(h)
    survivors: set[int] = {0}
    counts: dict[int, int] = {}
    spent = 0
    witness_m, witness_mask = k - 1, 0
    for m in range(k, m_max + 1):
        prev = _Canon(m - 1, k, False)
        cur = _Canon(m, k, m <= iso_limit)
        new_edges = [cur.index[e] for e in cur.edges if e[-1] == m - 1]
        old_pos = [cur.index[e] for e in prev.edges]
        nxt: set[int] = set()
        for mask in survivors:
            base = 0
            for i, pos in enumerate(old_pos):
                if mask >> i & 1:
                    base |= 1 << pos
            for choice in range(2 ** len(new_edges)):
                spent += 1
                if spent > budget:
                    return _bound(h, k, witness_m, witness_mask, counts, exhausted=True)
                ext = base
                for j, pos in enumerate(new_edges):
                    if choice >> j & 1:
                        ext |= 1 << pos
                red = cur.red_edges(ext)
                blue = frozenset(cur.edges) - red
                if m >= hv and (contains_copy(red, m, h) or contains_copy(blue, m, h)):
                    continue
                nxt.add(cur.canon(ext))
        counts[m] = len(nxt)
        if not nxt:
            witness = ColoredHypergraph.from_red(witness_m, k, _Canon(witness_m, k, False)
                                                 .red_edges(witness_mask)) if witness_m >= k else None
            if witness is not None:
                _recheck(witness, h)
            return OracleResult(True, m, m, witness, counts)
        survivors = nxt
        witness_m, witness_mask = m, min(nxt)
    return _bound(h, k, witness_m, witness_mask, counts, exhausted=False)


def _recheck(w: ColoredHypergraph, h: UniformHypergraph) -> None:
    if contains_copy(w.red, w.m, h) or contains_copy(w.blue, w.m, h):
        raise AssertionError("witness colouring contains a monochromatic copy")


def _bound(h, k, wm, wmask, counts, exhausted) -> OracleResult:
    witness = None
    if wm >= k:
        witness = ColoredHypergraph.from_red(wm, k, _Canon(wm, k, False).red_edges(wmask))
        _recheck(witness, h)
    return OracleResult(False, None, wm + 1, witness, counts, exhausted)
