import itertools
import json
import random

import pytest

from kocover import (Complex, ConstructionError, CoverBundle, CoverError,
                     OpenCellSet, SimplicialMap, SubdivisionTower, builtin,
                     build_cover, cover_parameters, is_k_cover, ord_profile,
                     pullback_cover, random_complex, verify_cover_bundle)
from kocover.certify import Certificate, PartitionPush, Target
from kocover.cover import _cover_signatures


def three_point_family():
    cx = Complex(["a", "b", "c"], [["a"], ["b"], ["c"]])
    t = SubdivisionTower(cx)
    ab = OpenCellSet(t, 0, [(0,), (1,)])
    bc = OpenCellSet(t, 0, [(1,), (2,)])
    ca = OpenCellSet(t, 0, [(2,), (0,)])
    return t, [ab, bc, ca]


def test_ord_profile_examples():
    cx = builtin("delta-2")
    t = SubdivisionTower(cx)
    whole = OpenCellSet(t, 0, cx.cells())
    prof = ord_profile([whole, whole, whole])
    assert set(prof.table.values()) == {3}

    _, fam = three_point_family()
    prof = ord_profile(fam)
    assert set(prof.table.values()) == {2}
    assert prof.min_on_skeleton(0) == 2


def test_ord_profile_matches_naive_recount():
    rng = random.Random(7)
    for _ in range(25):
        cx = random_complex(rng.randrange(1, 3), rng.randrange(4, 7),
                            rng.randrange(10 ** 6))
        t = SubdivisionTower(cx)
        cells = list(cx.cells())
        fam = [OpenCellSet(t, 0, rng.sample(cells, rng.randrange(1, len(cells) + 1)))
               for _ in range(rng.randrange(2, 5))]
        prof = ord_profile(fam)
        for cell in cells:
            naive = sum(1 for s in fam if cell in s.cells)
            assert prof.table[cell] == naive


def test_is_k_cover_examples():
    _, fam = three_point_family()
    assert is_k_cover(fam, 2)
    assert not is_k_cover(fam, 1)
    cx = builtin("delta-2")
    t = SubdivisionTower(cx)
    whole = OpenCellSet(t, 0, cx.cells())
    for k in (1, 2, 3, 4):
        assert is_k_cover([whole] * 4, k)
    with pytest.raises(CoverError):
        is_k_cover(fam, 0)


def test_n_cover_equivalence_seeded():
    """Subfamily brute force agrees with the multiplicity criterion; the
    assertion lives inside is_k_cover, so this exercises many families."""
    rng = random.Random(123)
    runs = 0
    while runs < 120:
        cx = random_complex(rng.randrange(1, 3), rng.randrange(3, 8),
                            rng.randrange(10 ** 6), connected=False)
        t = SubdivisionTower(cx)
        cells = list(cx.cells())
        m = rng.randrange(2, 7)
        fam = []
        for _ in range(m):
            fam.append(OpenCellSet(
                t, 0, rng.sample(cells, rng.randrange(1, len(cells) + 1))))
        k = rng.randrange(1, m + 1)
        is_k_cover(fam, k)
        runs += 1


FEASIBLE = [
    ("s1", 0, 2), ("s1", 0, 3), ("s1", 0, 5),
    ("delta-2", 0, 3), ("delta-2", 0, 4), ("delta-2", 0, 5),
    ("boundary-delta-3", 0, 3), ("torus-7", 0, 4), ("rp2-6", 0, 3),
    ("boundary-delta-3", 1, 2), ("torus-7", 1, 2), ("s1-x-s1", 1, 2),
    ("delta-3", 1, 2), ("delta-3", 2, 2),
    ("s1", 1, 3), ("delta-2", 2, 4), ("point", 0, 2),
]


@pytest.mark.parametrize("name,r,m", FEASIBLE)
def test_build_cover_verifies(name, r, m):
    bundle = build_cover(builtin(name), r, m)
    assert bundle.m == m
    report = verify_cover_bundle(bundle)
    assert report.ok, [c for c in report.checks if not c.passed]
    if r == 0:
        for cert in bundle.certificates:
            assert cert.target == Target("skeletal", 0)


def test_build_cover_argument_errors():
    with pytest.raises(CoverError):
        build_cover(builtin("delta-2"), 0, 2)  # m below N
    disconnected = Complex(["a", "b", "c", "d"],
                           [["a", "b"], ["c", "d"]])
    with pytest.raises(CoverError):
        build_cover(disconnected, 0, 3)


def test_build_cover_infeasible_raises_diagnostics():
    with pytest.raises(ConstructionError, match="unattainable"):
        build_cover(builtin("boundary-delta-3"), 1, 3)
    # packing beyond the depth cap is only implemented up to dimension 2
    with pytest.raises(ConstructionError, match="graphs and surfaces"):
        build_cover(builtin("delta-3"), 0, 5)


def test_wheel_cover_structure():
    bundle = build_cover(builtin("delta-2"), 0, 5)
    assert bundle.construction == "wheel-cracks"
    assert all(el.level == 4 for el in bundle.elements)
    tower = bundle.tower
    # every element contains all base vertices and misses exactly one
    # interior vertex per base edge
    base_vert_cells = {(tower.lift_base_vertex(v, 4),) for v in range(3)}
    for el in bundle.elements:
        assert base_vert_cells <= el.cells
        for e in [c for c in bundle.complex.cells() if len(c) == 2]:
            missed = [c for c in tower.cells(4)
                      if c not in el.cells and tower.carrier0(4, c) == e]
            assert len(missed) == 1 and len(missed[0]) == 1
    # misses on edges never collide across elements
    edge_misses = [frozenset(c for c in tower.cells(4)
                             if c not in el.cells
                             and len(tower.carrier0(4, c)) == 2)
                   for el in bundle.elements]
    for a, b in itertools.combinations(edge_misses, 2):
        assert not (a & b)


def test_single_vertex_cover():
    bundle = build_cover(builtin("point"), 1, 1)
    assert len(bundle.elements) == 1
    assert bundle.certificates[0].steps == ()
    assert verify_cover_bundle(bundle).ok


@pytest.mark.parametrize("name,r,m", [
    ("boundary-delta-3", 1, 2),  # staggered
    ("delta-2", 0, 3),           # layered stars
    ("s1", 0, 4),                # arc phases
    ("point", 0, 2),             # trivial
])
def test_bundle_json_round_trip(name, r, m):
    bundle = build_cover(builtin(name), r, m)
    data = json.loads(json.dumps(bundle.to_json(), sort_keys=True))
    again = CoverBundle.from_json(data)
    assert verify_cover_bundle(again).ok
    assert again.m == bundle.m and again.r == bundle.r


def test_deleted_element_fails_verification():
    bundle = build_cover(builtin("delta-2"), 0, 3)
    bundle.elements = bundle.elements[:-1]
    bundle.certificates = bundle.certificates[:-1]
    report = verify_cover_bundle(bundle)
    assert not report.ok
    failing = {c.name for c in report.checks if not c.passed}
    assert "element-count" in failing or any(n.startswith("profile") for n in failing)


def test_corrupted_certificate_fails_only_itself():
    bundle = build_cover(builtin("delta-2"), 0, 3)
    bad = bundle.certificates[1]
    bundle.certificates[1] = Certificate(
        bad.start, (PartitionPush(bad.start.level, frozenset()),), bad.target)
    report = verify_cover_bundle(bundle)
    names = {c.name: c.passed for c in report.checks}
    assert not names["certificate-1"]
    assert names["certificate-0"] and names["certificate-2"]
    assert names["coverage"] and names["profile-k1"]


def test_profile_monotone_in_m():
    """Restricting the (m+1)-element bundle to its first m elements meets
    the m-element profile; elements only depend on their own index."""
    for name, r, m in [("s1", 0, 3), ("delta-2", 0, 3)]:
        big = build_cover(builtin(name), r, m + 1)
        small = build_cover(builtin(name), r, m)
        for el_big, el_small in zip(big.elements, small.elements):
            assert type(el_big) is type(el_small)
        sigs = _cover_signatures(big.tower, big.elements[:m])
        for claim in small.profile_claims:
            dims = [d for d in sigs if d <= claim.skeleton]
            min_ord = min((len(s) for d in dims for s in sigs[d]), default=m)
            assert min_ord >= claim.min_multiplicity


def test_block_signatures_agree_with_direct_enumeration():
    """The per-block minima used on huge levels match the cell-by-cell
    enumeration on an instance where both strategies run."""
    bundle = build_cover(builtin("boundary-delta-3"), 0, 3)
    tower, els = bundle.tower, bundle.elements
    level = max(el.level for el in els)
    direct = {}
    for cell in tower.iter_cells(level):
        cov = frozenset(i for i, el in enumerate(els) if el.contains_at(level, cell))
        direct.setdefault(tower.carrier0_dim(level, cell), set()).add(cov)
    block = _cover_signatures(tower, els)  # picks the block path (stars on top)
    assert set(direct) == set(block)
    for d in direct:
        assert min(len(s) for s in direct[d]) == min(len(s) for s in block[d])
        dmin = {s for s in direct[d] if not any(t < s for t in direct[d])}
        bmin = {s for s in block[d] if not any(t < s for t in block[d])}
        assert dmin == bmin


def test_pullback_cover():
    s2 = builtin("boundary-delta-3")
    bundle = build_cover(s2, 1, 2)
    ident = SimplicialMap.identity(s2)
    pulled = pullback_cover(ident, bundle)
    for el, back in zip(bundle.elements, pulled):
        level = el.level
        for c in bundle.tower.cells(level):
            assert el.contains(c) == back.contains(c)

    # subcomplex inclusion: multiplicity never drops
    sk = s2.skeleton(1)
    incl = SimplicialMap(sk, s2, {v: v for v in sk.vertices})
    pulled = pullback_cover(incl, bundle)
    src_tower = pulled[0].tower
    level = max(el.level for el in bundle.elements)
    for c in src_tower.cells(level):
        up = sum(1 for s in pulled if s.contains_at(level, c))
        img = src_tower.map_cell(bundle.tower, incl, level, c)
        down = sum(1 for s in bundle.elements if s.contains_at(level, img))
        assert up >= down


def test_pullback_random_maps_preserve_coverage():
    rng = random.Random(99)
    target = builtin("delta-2")
    bundle = build_cover(target, 0, 3)
    for _ in range(10):
        cx = random_complex(1, rng.randrange(3, 6), rng.randrange(10 ** 6))
        mapping = {v: rng.choice(target.vertices) for v in cx.vertices}
        try:
            f = SimplicialMap(cx, target, mapping)
        except Exception:
            continue
        pulled = pullback_cover(f, bundle)
        tower = pulled[0].tower
        for level in {p.level for p in pulled}:
            pass
        level = max(p.level for p in pulled)
        for c in tower.iter_cells(level):
            assert any(p.contains_at(level, c) for p in pulled)


def test_cover_parameters():
    assert cover_parameters(builtin("delta-2"), 0) == 3
    assert cover_parameters(builtin("delta-3"), 1) == 2
    assert cover_parameters(builtin("s1"), 2) == 1
