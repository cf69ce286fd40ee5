import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kocover import (Complex, OpenCellSet, SimplicialMap, SubdivisionTower,
                     TowerDepthError, builtin, dual_complex, preimage,
                     random_complex, star)
from kocover.tower import _proper_subsets


def chains_of(cells):
    """Independent chain enumerator: count nonempty chains in the face poset."""
    cells = sorted(cells, key=len)
    memo = {}
    for c in cells:
        memo[c] = 1 + sum(memo[f] for f in _proper_subsets(c) if f in memo)
    return sum(memo.values())


def test_bary_of_triangle():
    t = SubdivisionTower(builtin("delta-2"))
    lvl1 = t.cells(1)
    verts = [c for c in lvl1 if len(c) == 1]
    tops = [c for c in lvl1 if len(c) == 3]
    assert len(verts) == 7
    assert len(tops) == 6


def test_bary_of_vertex_is_vertex():
    t = SubdivisionTower(builtin("point"))
    for lvl in range(3):
        assert t.cells(lvl) == [(0,)]


def test_barycentric_deepens_by_one():
    from kocover import barycentric
    t = SubdivisionTower(builtin("delta-2"))
    view = barycentric(t)
    assert view is t
    assert len(t._levels) == 2
    barycentric(t)
    assert len(t._levels) == 3
    # flags at the new top satisfy the chain characterization
    lv = t.level(2)
    for cell in t.cells(2):
        members = sorted((lv.verts[v] for v in cell), key=len)
        for a, b in zip(members, members[1:]):
            assert set(a) < set(b)


def test_flag_count_identity():
    for name in ("delta-2", "s1", "boundary-delta-3"):
        t = SubdivisionTower(builtin(name))
        for lvl in range(3):
            assert len(t.cells(lvl + 1)) == chains_of(t.cells(lvl))
            assert t.count_cells(lvl + 1) == len(t.cells(lvl + 1))


@pytest.mark.parametrize("name", ["delta-2", "s1", "boundary-delta-3", "torus-7"])
def test_euler_constant_across_levels(name):
    t = SubdivisionTower(builtin(name))
    chi = t.base.euler_characteristic()
    for lvl in range(4):
        assert t.euler_characteristic(lvl) == chi


@given(st.integers(1, 2), st.integers(3, 6), st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_euler_constant_random(dim, nverts, seed):
    cx = random_complex(dim, nverts, seed)
    t = SubdivisionTower(cx)
    chi = cx.euler_characteristic()
    assert t.euler_characteristic(1) == chi
    assert t.euler_characteristic(2) == chi


def test_carrier_laws():
    t = SubdivisionTower(builtin("delta-2"))
    for lvl in (1, 2):
        lv = t.level(lvl)
        for cell in t.cells(lvl):
            carrier = t.carrier_down(lvl, cell)
            # the carrier is the chain maximum: every member is a face of it
            for v in cell:
                assert set(lv.verts[v]) <= set(carrier)
            # carrier of a face is a face-or-equal of the carrier
            for f in _proper_subsets(cell):
                assert set(t.carrier_down(lvl, f)) <= set(carrier)
            # carriers compose
            assert t.carrier(lvl, cell, 0) == t.carrier0(lvl, cell)


def test_cells_have_distinct_member_dimensions():
    # every cell is a chain, so its vertices have pairwise distinct
    # underlying dimensions; the lazy certificate path relies on this
    for name in ("delta-2", "boundary-delta-3"):
        t = SubdivisionTower(builtin(name))
        for lvl in (1, 2):
            lv = t.level(lvl)
            for cell in t.cells(lvl):
                dims = [lv.vdim[v] for v in cell]
                assert len(set(dims)) == len(dims)


def test_dual_complex_examples():
    s2 = builtin("boundary-delta-3")
    t = SubdivisionTower(s2)
    d = dual_complex(t, 1)
    assert len(d.cells) == 4 and d.dim() == 0

    d2 = builtin("delta-2")
    t2 = SubdivisionTower(d2)
    d = dual_complex(t2, 0)
    # star graph: three edge barycenters joined to the face barycenter
    assert d.dim() == 1
    assert len([c for c in d.cells if len(c) == 1]) == 4
    assert len([c for c in d.cells if len(c) == 2]) == 3

    assert dual_complex(t2, 2).is_empty()


@pytest.mark.parametrize("name", ["delta-2", "delta-3", "boundary-delta-3",
                                  "boundary-delta-4", "s1", "torus-7", "rp2-6",
                                  "s1-x-s1", "s1-x-s2"])
def test_dual_dimension_law(name):
    cx = builtin(name)
    t = SubdivisionTower(cx)
    for m in range(cx.dim):
        d = dual_complex(t, m)
        assert d.dim() == cx.dim - m - 1


@pytest.mark.parametrize("name", ["delta-2", "delta-3", "boundary-delta-3", "s1"])
def test_dual_disjoint_from_skeleton(name):
    cx = builtin(name)
    t = SubdivisionTower(cx)
    for m in range(cx.dim):
        skel = {c for c in cx.cells() if len(c) - 1 <= m}
        d = dual_complex(t, m)
        assert all(t.carrier0(1, c) not in skel for c in d.cells)


def test_star_examples():
    d2 = builtin("delta-2")
    t = SubdivisionTower(d2)
    vstar = star(t, OpenCellSet(t, 0, [(0,)]), "open")
    # all flags through the vertex
    assert len(vstar.cells) == 6
    assert vstar.is_open()
    assert star(t, OpenCellSet(t, 0, []), "open").is_empty()
    closed = star(t, OpenCellSet(t, 0, [(0,)]), "closed")
    assert closed.is_closed()
    assert vstar.cells <= closed.cells


def _closed_cell_pairs(cx):
    """All pairs of disjoint single-cell closures, a tractable exhaustive
    family of disjoint closed sets."""
    cells = cx.cells()
    for a, b in itertools.combinations(cells, 2):
        if not (set(a) & set(b)):
            yield a, b


@pytest.mark.parametrize("name", ["delta-2", "boundary-delta-3", "s1", "torus-7"])
def test_disjoint_stars(name):
    """Open stars of disjoint closed sets never meet; closed stars become
    disjoint after refining the cores once more (the pre-subdivision that
    neighborhood constructions rely on)."""
    cx = builtin(name)
    t = SubdivisionTower(cx)
    pairs = list(_closed_cell_pairs(cx))[:40]
    for a, b in pairs:
        sa = OpenCellSet(t, 0, [a]).closure()
        sb = OpenCellSet(t, 0, [b]).closure()
        assert sa.point_disjoint(sb)
        open_a, open_b = star(t, sa, "open"), star(t, sb, "open")
        assert open_a.point_disjoint(open_b)
        # refined cores have closure-disjoint stars one level further down
        ra = OpenCellSet(t, 1, [c for c in t.cells(1)
                                if sa.contains_at(1, c)]).closure()
        rb = OpenCellSet(t, 1, [c for c in t.cells(1)
                                if sb.contains_at(1, c)]).closure()
        ca, cb = star(t, ra, "closed"), star(t, rb, "closed")
        assert ca.point_disjoint(cb)


def test_adjacent_vertices_show_closed_star_sharpness():
    # the closed stars of two adjacent vertices meet at the edge barycenter
    # after one subdivision, which is why the refinement step above exists
    cx = Complex(["a", "b"], [["a", "b"]])
    t = SubdivisionTower(cx)
    sa = OpenCellSet(t, 0, [(0,)])
    sb = OpenCellSet(t, 0, [(1,)])
    ca = star(t, sa, "closed")
    cb = star(t, sb, "closed")
    assert not ca.point_disjoint(cb)


def test_preimage_examples():
    d2 = builtin("delta-2")
    t = SubdivisionTower(d2)
    ident = SimplicialMap.identity(d2)
    s = OpenCellSet(t, 0, [(0,), (0, 1)])
    assert preimage(ident, t, t, s).cells == s.cells

    s1 = builtin("s1")
    ts = SubdivisionTower(s1)
    const = SimplicialMap.constant(s1, d2, "a")
    vstar = star(t, OpenCellSet(t, 0, [(0,)]), "open")
    # pulling the open vertex star back along a constant map gives everything
    lifted = OpenCellSet(t, 1, vstar.cells)
    pre = preimage(const, ts, t, lifted)
    assert pre.cells == frozenset(ts.cells(1))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_preimage_preserves_two_covers(seed):
    import random
    rng = random.Random(seed)
    cx = random_complex(rng.randrange(1, 3), rng.randrange(4, 7), rng.randrange(10 ** 6))
    target = builtin("delta-2")
    mapping = {v: rng.choice(target.vertices) for v in cx.vertices}
    try:
        f = SimplicialMap(cx, target, mapping)
    except Exception:
        return  # random vertex maps are not always simplicial toward delta-2
    tt = SubdivisionTower(target)
    ts = SubdivisionTower(cx)
    cells = list(target.cells())
    half = len(cells) // 2 + 1
    u = OpenCellSet(tt, 0, cells[:half] + cells[-1:])
    v = OpenCellSet(tt, 0, cells[half - 1:])
    # multiply covered downstairs stays multiply covered upstairs
    for c in ts.cells(0):
        img = ts.map_cell(tt, f, 0, c)
        up = sum(1 for s in (u, v) if f and preimage(f, ts, tt, s).contains(c))
        down = sum(1 for s in (u, v) if s.contains(img))
        assert up == down


def test_depth_cap(monkeypatch):
    monkeypatch.setenv("KO_COVER_MAX_LEVEL", "2")
    t = SubdivisionTower(builtin("delta-2"))
    assert t.max_level == 2
    t.cells(2)
    with pytest.raises(TowerDepthError):
        t.cells(3)
