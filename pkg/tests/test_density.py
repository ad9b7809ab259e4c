import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from hyperreg.complex import Complex, VertexClasses, complete_complex, downward_closure, UniformHypergraph
from hyperreg.density import (
    CliqueFamily,
    DensityVector,
    certify_regularity,
    class_tuple_families,
    cliques,
    relative_density,
    tuple_density,
)
from hyperreg import density as dn
from hyperreg.errors import CapacityError, StructuralError
from hyperreg.random_models import generate_regular_complex

from conftest import oracle_cliques, random_host


def test_cliques_complete_tripartite():
    g = complete_complex(3, 2, 2)
    assert len(cliques(g, 3)) == 8


def test_cliques_of_empty_level():
    g = Complex(VertexClasses.equal(3, 2), 3, {})
    assert cliques(g, 3) == set()


@given(st.integers(0, 10**6))
def test_cliques_match_triple_loop(seed):
    g = generate_regular_complex(3, 5, DensityVector((0.5, 0.5)), seed)
    assert cliques(g, 3) == oracle_cliques(g, 3)


@given(st.integers(0, 10**6))
def test_cliques_match_oracle_k4(seed):
    g = random_host(random.Random(seed), 4, 3, 4)
    for i in (3, 4):
        assert cliques(g, i) == oracle_cliques(g, i)


def test_relative_density_examples():
    closed = downward_closure(UniformHypergraph(3, [(0, 1, 2), (0, 1, 3)],
                                                VertexClasses([[0], [1], [2, 3]])))
    assert relative_density(closed, 3) == 1
    g = complete_complex(3, 2, 3)
    empty_top = Complex(g.vertex_classes, 3, {2: g.edges[2]})
    assert relative_density(empty_top, 3) == 0
    half = Complex(g.vertex_classes, 3, {2: g.edges[2], 3: sorted(g.edges[3])[:4]})
    assert relative_density(half, 3) == Fraction(1, 2)


def test_tuple_density_examples():
    g = generate_regular_complex(3, 5, DensityVector((0.6, 0.5)), 4)
    full = list(g.edges[2])
    assert tuple_density(g, 3, [full]) == relative_density(g, 3)
    assert tuple_density(g, 3, [full, full, full]) == relative_density(g, 3)
    with pytest.raises(StructuralError):
        tuple_density(g, 3, [[(0, 99)]])


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_tuple_density_matches_union_then_count(seed, r):
    rng = random.Random(seed)
    g = random_host(rng, 3, 4, 3)
    base = sorted(g.edges[2])
    q = [[e for e in base if rng.random() < 0.5] for _ in range(r)]
    union = set()
    for member in q:
        member = set(member)
        union |= {t for t in oracle_cliques(g, 3) if all(s in member for s in combinations(t, 2))}
    want = Fraction(len(union & g.edges[3]), len(union)) if union else Fraction(0)
    got = tuple_density(g, 3, q)
    assert got == want
    assert 0 <= got <= 1


def test_density_vector_integrality_warning():
    assert DensityVector((0.5, 0.7)).integrality_issues() == []
    assert DensityVector((0.4, 0.5)).integrality_issues()
    with pytest.raises(Exception):
        DensityVector((0.0, 0.5))


def test_density_vector_round_trip():
    d = DensityVector((0.5, 0.5), {(3, (0, 1, 2)): 0.25})
    assert DensityVector.from_dict(d.to_dict()) == d
    assert d.at(3, (0, 1, 2)) == 0.25 and d.at(3, (0, 1, 3)) == 0.5


def test_complete_level_certifies():
    g = complete_complex(3, 3, 3)
    rep = certify_regularity(g, 3, 1.0, 0.05, samples=50)
    assert rep.passed and rep.max_deviation == 0 and not rep.witnesses


def planted():
    """n=2 per class: the 4 triangles through vertex 0 are edges, the other 4 are not."""
    g = complete_complex(3, 2, 2)
    top = [t for t in cliques(g, 3) if 0 in t]
    return Complex(g.vertex_classes, 3, {2: g.edges[2], 3: top})


def test_planted_violation_detected_exhaustively():
    g = planted()
    assert relative_density(g, 3) == Fraction(1, 2)
    rep = certify_regularity(g, 3, 0.5, 0.2, mode="exhaustive")
    assert not rep.passed
    assert rep.max_deviation == pytest.approx(0.5)
    w = rep.witnesses[0]
    assert w["density"] in (0.0, 1.0) and w["volume"] > 0.2 * 8


def test_exhaustive_cap_is_explicit():
    g = generate_regular_complex(3, 4, DensityVector((0.8, 0.5)), 1)
    with pytest.raises(CapacityError):
        certify_regularity(g, 3, 0.5, 0.1, mode="exhaustive")


def test_level2_planted_pair():
    # class 0 vertices 0..5 adjacent to all of class 1; 6..11 to none
    vc = VertexClasses.equal(2, 12)
    edges = [(a, b) for a in range(6) for b in range(12, 24)]
    g = Complex(vc, 2, {2: edges})
    rep = certify_regularity(g, 2, 0.5, 0.2)
    assert rep.mode == "exhaustive" and not rep.passed
    assert rep.max_deviation == pytest.approx(0.5)


def test_level2_complete_pair_passes():
    g = complete_complex(2, 8, 2)
    assert certify_regularity(g, 2, 1.0, 0.1).passed


def test_zero_density_tuples_exempt():
    g = complete_complex(4, 2, 3)
    keep = [t for t in g.edges[3] if g.vertex_classes.class_tuple(t) != (0, 1, 2)]
    g = Complex(g.vertex_classes, 3, {2: g.edges[2], 3: keep})
    rep = certify_regularity(g, 3, 1.0, 0.1, samples=30)
    assert rep.passed
    assert any(t["exempt"] for t in rep.per_class_tuple)


def test_random_regular_complex_certifies():
    passes = 0
    for seed in range(20):
        g = generate_regular_complex(3, 40, DensityVector((0.5, 0.5)), seed)
        passes += certify_regularity(g, 3, 0.5, 0.1, samples=200, seed=seed).passed
    assert passes >= 19


def test_report_serialization():
    rep = certify_regularity(planted(), 3, 0.5, 0.2, mode="exhaustive")
    d = rep.to_dict()
    assert d["pass"] is False and len(d["witnesses"]) <= 3
    assert rep.verdict().startswith("FAIL")


@given(st.integers(0, 10**6), st.floats(0.05, 0.4), st.floats(0.0, 0.3))
def test_monotone_in_delta_on_same_sample(seed, delta, extra):
    g = random_host(random.Random(seed), 3, 3, 3)
    fams = class_tuple_families(g, 3)
    for K, fam in fams.items():
        qs_lo = dn.tested_tuples(fam, delta, 2, "sampled", 20, random.Random(seed))
        qs_hi = dn.tested_tuples(fam, delta + extra, 2, "sampled", 20, random.Random(seed))
        hi_masks = {q.members for q in qs_hi}
        assert hi_masks <= {q.members for q in qs_lo}
        d = float(fam.density(fam.full_cliques))
        dev_lo = max((abs(float(q.density) - d) for q in qs_lo), default=0.0)
        dev_hi = max((abs(float(q.density) - d) for q in qs_hi), default=0.0)
        assert dev_hi <= dev_lo


def test_clique_family_masks():
    g = planted()
    fam = CliqueFamily(g.edges[2], cliques(g, 3), g.edges[3])
    assert fam.spanned(fam.full_base) == fam.full_cliques
    assert fam.density(fam.full_cliques) == Fraction(1, 2)
    assert fam.spanned(0) == 0
