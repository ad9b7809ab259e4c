"""Shared instance builders and brute-force oracles for the test suite.

The oracles here deliberately avoid the package's own indices: cliques are
found by scanning every crossing tuple, and copies by scanning every
class-respecting injection.
"""

import random
import sys
from itertools import combinations, permutations, product

import pytest
from hypothesis import settings

from hyperreg.complex import Complex, UniformHypergraph, VertexClasses, downward_closure
from hyperreg.density import DensityVector
from hyperreg.random_models import generate_regular_complex

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def crossing_tuples(classes, i):
    """All ``i``-sets meeting each class at most once, sorted tuples."""
    out = []
    for picked in combinations(range(len(classes)), i):
        for choice in product(*(sorted(classes[c]) for c in picked)):
            out.append(tuple(sorted(choice)))
    return out


def oracle_cliques(g: Complex, i: int):
    below = g.edges[i - 1] if i >= 3 else None
    out = set()
    for t in crossing_tuples(g.classes, i):
        if i == 2 or all(s in below for s in combinations(t, i - 1)):
            out.add(t)
    return out


def oracle_count(h: Complex, g: Complex) -> int:
    """Copies of ``h`` in ``g`` by scanning all per-class injections."""
    hv = [sorted(c) for c in h.classes]
    total = 0
    per_class = [list(permutations(sorted(g.classes[j]), len(hv[j]))) for j in range(len(hv))]
    for choice in product(*per_class):
        m = {}
        for xs, ys in zip(hv, choice):
            m.update(zip(xs, ys))
        if all(tuple(sorted(m[v] for v in e)) in g.edges[i]
               for i in range(2, h.k + 1) for e in h.edges[i]):
            total += 1
    return total


def random_host(rng: random.Random, num_classes: int, n: int, k: int) -> Complex:
    dens = tuple(rng.choice([0.3, 0.5, 0.7, 0.9, 1.0]) for _ in range(k - 1))
    return generate_regular_complex(num_classes, n, DensityVector(dens), rng.randrange(10**6))


def random_pattern(rng: random.Random, num_classes: int, k: int, max_vertices: int) -> Complex:
    """Random closed pattern with at least one vertex per class."""
    t = rng.randint(num_classes, max(num_classes, max_vertices))
    labels = list(range(num_classes)) + [rng.randrange(num_classes) for _ in range(t - num_classes)]
    rng.shuffle(labels)
    groups = [[v for v in range(t) if labels[v] == c] for c in range(num_classes)]
    vc = VertexClasses(groups)
    pool = crossing_tuples(groups, k)
    edges = [e for e in pool if rng.random() < 0.5]
    top = downward_closure(UniformHypergraph(k, edges, vc))
    # sprinkle extra low-level edges that lie under no top edge
    extra = {2: set(top.edges[2])}
    for e in crossing_tuples(groups, 2):
        if rng.random() < 0.2:
            extra[2].add(e)
    levels = {2: extra[2]}
    for i in range(3, k + 1):
        levels[i] = set(top.edges[i])
    return Complex(vc, k, levels)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
