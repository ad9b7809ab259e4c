"""Relative densities and graded regularity certification.

All densities are exact :class:`fractions.Fraction` values; reports convert
them to floats only when serialized.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .complex import Complex, Edge
from .errors import CapacityError, StructuralError, ValidationError

DEFAULT_CAP = 2**20
# X, Y subsets are enumerated exhaustively for classes of size <= 12.
DEFAULT_CAP_LEVEL2 = 2**24
EXHAUSTIVE_CLASS_SIZE = 12


@dataclass(frozen=True)
class DensityVector:
    """Target densities ``d_2..d_k`` with optional per-class-tuple overrides.

    ``overrides`` maps ``(level, sorted class tuple)`` to a density.
    """

    d: tuple[float, ...]
    overrides: Mapping[tuple[int, tuple[int, ...]], float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(self.d))
        for value in self.d:
            if not 0 < value <= 1:
                raise ValidationError(f"density {value} outside (0, 1]")
        # a zero override switches one class tuple off
        for value in self.overrides.values():
            if not 0 <= value <= 1:
                raise ValidationError(f"override density {value} outside [0, 1]")
        for level, _ in self.overrides:
            if not 2 <= level <= self.k:
                raise ValidationError(f"override for level {level} outside 2..{self.k}")

    @classmethod
    def uniform(cls, value: float, k: int) -> "DensityVector":
        return cls(tuple([value] * (k - 1)))

    @property
    def k(self) -> int:
        return len(self.d) + 1

    def at(self, level: int, class_tuple: Sequence[int] | None = None) -> float:
        if not 2 <= level <= self.k:
            raise ValidationError(f"no density for level {level}")
        if class_tuple is not None:
            key = (level, tuple(sorted(class_tuple)))
            if key in self.overrides:
                return self.overrides[key]
        return self.d[level - 2]

    def integrality_issues(self) -> list[str]:
        """Levels ``i < k`` whose density is not of the form ``1/a``."""
        issues = []
        for level in range(2, self.k):
            inv = 1 / self.d[level - 2]
            if abs(inv - round(inv)) > 1e-9:
                issues.append(f"1/d_{level} = {inv:.6g} is not an integer")
        return issues

    def to_dict(self) -> dict:
        return {
            "d": list(self.d),
            "overrides": [[lvl, list(ct), v] for (lvl, ct), v in sorted(self.overrides.items())],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DensityVector":
        over = {(int(l), tuple(ct)): float(v) for l, ct, v in data.get("overrides", [])}
        return cls(tuple(float(x) for x in data["d"]), over)


@dataclass
class RegularityReport:
    level: int
    target_density: float
    measured_base_density: Fraction
    max_deviation: float
    tuples_tested: int
    mode: str
    passed: bool
    delta: float
    r: int
    witnesses: list[dict] = field(default_factory=list)
    per_class_tuple: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "target_density": self.target_density,
            "measured_base_density": float(self.measured_base_density),
            "max_deviation": self.max_deviation,
            "tuples_tested": self.tuples_tested,
            "mode": self.mode,
            "pass": self.passed,
            "delta": self.delta,
            "r": self.r,
            "witnesses": self.witnesses,
            "per_class_tuple": self.per_class_tuple,
        }

    def verdict(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return (
            f"{word} level={self.level} d={self.target_density:.6g} delta={self.delta:.6g} "
            f"max_dev={self.max_deviation:.6g} tested={self.tuples_tested} mode={self.mode}"
        )


# -- cliques -------------------------------------------------------------------


def cliques_of(edges: Iterable[Edge], i: int) -> set[Edge]:
    """All ``i``-sets whose every ``(i-1)``-subset lies in ``edges``.

    ``edges`` must consist of ``(i-1)``-tuples with ``i >= 3``.
    """
    if i < 3:
        raise ValidationError("cliques_of needs i >= 3; use cliques() for level 2")
    edges = set(edges)
    link: dict[Edge, set[int]] = {}
    for e in edges:
        for pos, w in enumerate(e):
            link.setdefault(e[:pos] + e[pos + 1:], set()).add(w)
    out = set()
    for e in edges:
        top = e[-1]
        cands = None
        for pos in range(len(e)):
            ws = link.get(e[:pos] + e[pos + 1:])
            if ws is None:
                cands = set()
                break
            cands = {w for w in ws if w > top} if cands is None else cands & ws
            if not cands:
                break
        for w in cands or ():
            out.add(e + (w,))
    return out


def cliques(g: Complex, i: int) -> set[Edge]:
    """``K_i`` of level ``i-1`` of ``g``; for ``i = 2`` all crossing pairs."""
    if i < 2:
        raise ValidationError(f"clique level must be >= 2, got {i}")
    if i == 2:
        cls = g.classes
        out = set()
        for a, b in combinations(range(len(cls)), 2):
            for x in cls[a]:
                for y in cls[b]:
                    out.add((x, y) if x < y else (y, x))
        return out
    if i - 1 > g.k:
        raise ValidationError(f"complex has no level {i - 1}")
    return cliques_of(g.edges[i - 1], i)


def _ratio(num: int, den: int) -> Fraction:
    return Fraction(num, den) if den else Fraction(0)


def relative_density(g: Complex, i: int) -> Fraction:
    """``|K_i(G_{i-1}) & E(G_i)| / |K_i(G_{i-1})|``, 0 for an empty base."""
    if not 2 <= i <= g.k:
        raise ValidationError(f"level {i} outside 2..{g.k}")
    base = cliques(g, i)
    return _ratio(len(base & g.edges[i]), len(base))


def tuple_density(g: Complex, i: int, q: Sequence[Iterable[Edge]]) -> Fraction:
    """Density of level ``i`` relative to the union of cliques of the members of ``q``."""
    if not 3 <= i <= g.k:
        raise ValidationError(f"tuple density needs 3 <= i <= k, got {i}")
    below = g.edges[i - 1]
    union: set[Edge] = set()
    for member in q:
        member = {tuple(sorted(e)) for e in member}
        bad = member - below
        if bad:
            raise StructuralError(f"Q member contains non-edge {min(bad)}")
        union |= cliques_of(member, i)
    return _ratio(len(union & g.edges[i]), len(union))


# -- candidate families ------------------------------------------------------------


class CliqueFamily:
    """Base edges and cliques of one class tuple, indexed for bitmask tests.

    A subset of base edges is an int bitmask over ``base``; the cliques it spans
    are an int bitmask over ``cliques``.
    """

    def __init__(self, base: Iterable[Edge], clique_list: Iterable[Edge], top: Iterable[Edge]):
        self.base: list[Edge] = sorted(base)
        self.cliques: list[Edge] = sorted(clique_list)
        index = {e: pos for pos, e in enumerate(self.base)}
        self.requires: list[int] = []
        for c in self.cliques:
            mask = 0
            for sub in combinations(c, len(c) - 1):
                mask |= 1 << index[sub]
            self.requires.append(mask)
        top = set(top)
        self.top_mask = sum(1 << pos for pos, c in enumerate(self.cliques) if c in top)
        self.full_base = (1 << len(self.base)) - 1
        self.full_cliques = (1 << len(self.cliques)) - 1

    def spanned(self, base_mask: int) -> int:
        out = 0
        for pos, req in enumerate(self.requires):
            if base_mask & req == req:
                out |= 1 << pos
        return out

    def density(self, clique_mask: int) -> Fraction:
        return _ratio((clique_mask & self.top_mask).bit_count(), clique_mask.bit_count())

    def edges_of(self, base_mask: int) -> list[Edge]:
        return [e for pos, e in enumerate(self.base) if base_mask >> pos & 1]

    def cliques_in(self, clique_mask: int) -> list[Edge]:
        return [c for pos, c in enumerate(self.cliques) if clique_mask >> pos & 1]


@dataclass
class TestedQ:
    members: tuple[int, ...]  # base-edge bitmasks
    clique_mask: int
    density: Fraction


def tested_tuples(
    fam: CliqueFamily,
    delta: float,
    r: int,
    mode: str,
    samples: int,
    rng: random.Random,
    cap: int = DEFAULT_CAP,
) -> list[TestedQ]:
    """Admissible r-tuples (volume strictly above ``delta`` of the base) to test.

    The sample drawn depends only on ``rng``, never on ``delta``.
    """
    volume_floor = delta * len(fam.cliques)
    out = []

    def consider(members: tuple[int, ...], spans: Sequence[int]) -> None:
        kq = 0
        for s in spans:
            kq |= s
        if kq.bit_count() > volume_floor:
            out.append(TestedQ(members, kq, fam.density(kq)))

    if mode == "exhaustive":
        m = len(fam.base)
        count = 2 ** (m * r)
        if count > cap:
            raise CapacityError(
                f"exhaustive regularity test needs {count} candidates (> cap {cap})"
            )
        span_of = [fam.spanned(mask) for mask in range(2**m)]
        if r == 1:
            for mask in range(2**m):
                consider((mask,), (span_of[mask],))
        else:
            for members in product(range(2**m), repeat=r):
                consider(members, [span_of[x] for x in members])
    elif mode == "sampled":
        full = tuple([fam.full_base] * r)
        consider(full, [fam.full_cliques])
        m = len(fam.base)
        for _ in range(samples):
            members = tuple(rng.getrandbits(m) if m else 0 for _ in range(r))
            consider(members, [fam.spanned(x) for x in members])
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return out


def class_tuple_families(g: Complex, i: int) -> dict[tuple[int, ...], CliqueFamily]:
    """One :class:`CliqueFamily` per ``i``-tuple of classes (``i >= 3``)."""
    vc = g.vertex_classes
    base_by: dict[tuple[int, ...], list[Edge]] = {}
    for e in g.edges[i - 1]:
        base_by.setdefault(vc.class_tuple(e), []).append(e)
    cl_by: dict[tuple[int, ...], list[Edge]] = {}
    for c in cliques(g, i):
        cl_by.setdefault(vc.class_tuple(c), []).append(c)
    out = {}
    for K in combinations(range(len(vc)), i):
        base = [e for sub in combinations(K, i - 1) for e in base_by.get(sub, ())]
        out[K] = CliqueFamily(base, cl_by.get(K, ()), g.edges[i])
    return out


# -- certification --------------------------------------------------------------


def _witness(fam: CliqueFamily, t: TestedQ, K) -> dict:
    return {
        "classes": list(K),
        "members": [[list(e) for e in fam.edges_of(m)] for m in t.members],
        "volume": t.clique_mask.bit_count(),
        "density": float(t.density),
    }


def certify_regularity(
    g: Complex,
    i: int,
    d: float,
    delta: float,
    r: int = 1,
    mode: str = "sampled",
    samples: int = 200,
    seed: int = 0,
    cap: int | None = None,
) -> RegularityReport:
    """Test ``(d, delta, r)``-regularity of level ``i`` against level ``i-1``.

    Each class tuple is certified separately; tuples whose relative density is
    0 are exempt.  For ``i = 2`` vertex-subset pairs replace edge subsets.
    """
    if not 2 <= i <= g.k:
        raise ValidationError(f"level {i} outside 2..{g.k}")
    if not 0 < delta <= 1 or r < 1:
        raise ValidationError("need 0 < delta <= 1 and r >= 1")
    if i == 2:
        return _certify_pairs(g, d, delta, mode, samples, seed, cap or DEFAULT_CAP_LEVEL2)
    cap = cap or DEFAULT_CAP
    worst = 0.0
    tested = 0
    violations: list[tuple[float, dict]] = []
    per_tuple = []
    any_active = False
    for K, fam in class_tuple_families(g, i).items():
        base_d = fam.density(fam.full_cliques)
        if base_d == 0:
            per_tuple.append({"classes": list(K), "base_density": 0.0, "exempt": True})
            continue
        any_active = True
        rng = random.Random(f"certify:{seed}:{i}:{K}")
        qs = tested_tuples(fam, delta, r, mode, samples, rng, cap)
        local = 0.0
        for t in qs:
            dev = abs(float(t.density) - d)
            local = max(local, dev)
            if dev > delta:
                violations.append((dev, _witness(fam, t, K)))
        tested += len(qs)
        worst = max(worst, local)
        per_tuple.append(
            {"classes": list(K), "base_density": float(base_d), "max_deviation": local,
             "tested": len(qs), "exempt": False}
        )
    witnesses = [w for _, w in sorted(violations, key=lambda x: -x[0])[:3]]
    if not any_active:
        worst = max(worst, d)
        witnesses = [{"classes": None, "members": [], "volume": 0, "density": 0.0}]
    passed = any_active and worst <= delta
    return RegularityReport(
        level=i, target_density=d, measured_base_density=relative_density(g, i),
        max_deviation=worst, tuples_tested=tested, mode=mode, passed=passed,
        delta=delta, r=r, witnesses=witnesses, per_class_tuple=per_tuple,
    )


def _subset_matrix(size: int) -> np.ndarray:
    masks = np.arange(2**size, dtype=np.int64)
    return ((masks[:, None] >> np.arange(size)) & 1).astype(np.int32)


def _certify_pairs(g, d, delta, mode, samples, seed, cap) -> RegularityReport:
    classes = [sorted(c) for c in g.classes]
    edges = g.edges[2]
    worst = 0.0
    tested = 0
    violations = []
    per_tuple = []
    any_active = False
    used_modes = set()
    for a, b in combinations(range(len(classes)), 2):
        A, B = classes[a], classes[b]
        adj = np.array([[1 if (min(x, y), max(x, y)) in edges else 0 for y in B] for x in A],
                       dtype=np.int32).reshape(len(A), len(B))
        total = int(adj.sum())
        if total == 0:
            per_tuple.append({"classes": [a, b], "base_density": 0.0, "exempt": True})
            continue
        any_active = True
        small = len(A) <= EXHAUSTIVE_CLASS_SIZE and len(B) <= EXHAUSTIVE_CLASS_SIZE
        if mode == "exhaustive" and 2 ** (len(A) + len(B)) > cap:
            raise CapacityError(
                f"exhaustive pair test needs {2 ** (len(A) + len(B))} candidates (> cap {cap})"
            )
        if mode == "exhaustive" or small:
            used_modes.add("exhaustive")
            local, n_tested, viol = _pairs_exhaustive(adj, d, delta)
        elif mode == "sampled":
            used_modes.add("sampled")
            rng = np.random.default_rng([seed, a, b])
            local, n_tested, viol = _pairs_sampled(adj, d, delta, samples, rng)
        else:
            raise ValidationError(f"unknown mode {mode!r}")
        for dev, xs, ys, dens in viol:
            violations.append((dev, {"classes": [a, b], "X": [A[x] for x in xs],
                                     "Y": [B[y] for y in ys], "density": dens}))
        worst = max(worst, local)
        tested += n_tested
        per_tuple.append({"classes": [a, b], "base_density": total / adj.size,
                          "max_deviation": local, "tested": n_tested, "exempt": False})
    witnesses = [w for _, w in sorted(violations, key=lambda x: -x[0])[:3]]
    if not any_active:
        worst = max(worst, d)
        witnesses = [{"classes": None, "X": [], "Y": [], "density": 0.0}]
    passed = any_active and worst <= delta
    return RegularityReport(
        level=2, target_density=d, measured_base_density=relative_density(g, 2),
        max_deviation=worst, tuples_tested=tested,
        mode="sampled" if "sampled" in used_modes else "exhaustive",
        passed=passed, delta=delta, r=1, witnesses=witnesses, per_class_tuple=per_tuple,
    )


def _pairs_exhaustive(adj: np.ndarray, d: float, delta: float, chunk: int = 256):
    na, nb = adj.shape
    SX, SY = _subset_matrix(na), _subset_matrix(nb)
    sx, sy = SX.sum(1), SY.sum(1)
    okx, oky = sx >= delta * na, sy >= delta * nb
    SX, sx = SX[okx], sx[okx]
    SY, sy = SY[oky], sy[oky]
    worst, tested, viol = 0.0, 0, []
    for lo in range(0, len(SX), chunk):
        deg = SX[lo:lo + chunk] @ adj
        e = deg @ SY.T
        dens = e / (sx[lo:lo + chunk, None] * sy[None, :])
        dev = np.abs(dens - d)
        tested += dev.size
        idx = np.unravel_index(np.argmax(dev), dev.shape)
        if dev[idx] > worst:
            worst = float(dev[idx])
        if dev[idx] > delta:
            xs = np.flatnonzero(SX[lo + idx[0]])
            ys = np.flatnonzero(SY[idx[1]])
            viol.append((float(dev[idx]), xs.tolist(), ys.tolist(), float(dens[idx])))
    viol.sort(key=lambda v: -v[0])
    return worst, tested, viol[:3]


def _pairs_sampled(adj: np.ndarray, d: float, delta: float, samples: int, rng):
    na, nb = adj.shape
    worst, tested, viol = 0.0, 0, []
    draws = [(np.ones(na, bool), np.ones(nb, bool))]
    for _ in range(samples):
        draws.append((rng.random(na) < 0.5, rng.random(nb) < 0.5))
    for X, Y in draws:
        if X.sum() < delta * na or Y.sum() < delta * nb or not X.any() or not Y.any():
            continue
        dens = adj[np.ix_(X, Y)].mean()
        dev = abs(float(dens) - d)
        tested += 1
        worst = max(worst, dev)
        if dev > delta:
            viol.append((dev, np.flatnonzero(X).tolist(), np.flatnonzero(Y).tolist(), float(dens)))
    viol.sort(key=lambda v: -v[0])
    return worst, tested, viol[:3]
