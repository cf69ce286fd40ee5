"""Multiplicity calculus and multiple covers with deformation certificates.

A cover bundle holds m open cell sets on a subdivision tower together with
one deformability certificate per element and a claimed multiplicity
profile: on the base skeleton of dimension k(r+1)-1 every point must lie
in at least m-k+1 elements, for every k up to N = ceil((dim+1)/(r+1)).

The verifier recomputes multiplicities from scratch. When the top working
level is too large to enumerate, it walks the cells one level down and
uses the exact per-block minimum: every finer cell inside the open cell of
F carries the barycenter vertex of F, so a star-backed element at the top
level either contains the whole block (its center set holds that
barycenter) or misses the block's own barycenter cell.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .complexes import Complex, SimplicialMap
from .certify import (Certificate, CertificateFormatError, PartitionPush, Refine,
                      StarSnap, Target, Verdict, _apply_snap, _components,
                      _expand_keep, _materialize_start, _refine_carrier,
                      certificate_from_json, certificate_to_json,
                      cellset_from_json, verify_certificate)
from .tower import (CellSet, CellT, OpenCellSet, SubdivisionTower, TowerDepthError,
                    TowerError, TowerSizeError, VertexStarSet, _proper_subsets)


class CoverError(ValueError):
    """Invalid arguments to a cover operation."""


class ConstructionError(RuntimeError):
    """The builder cannot produce a verified bundle for these parameters."""


# -- multiplicity -------------------------------------------------------------


@dataclass
class OrdProfile:
    """Exact multiplicity data for a family of open cell sets."""

    level: int
    table: dict[CellT, int] | None               # per-cell counts when enumerable
    skeleton_minima: dict[int, int]               # base-skeleton dim -> min Ord
    signatures: dict[int, set[frozenset[int]]]    # dim -> minimal cover index sets

    def min_on_skeleton(self, j: int) -> int:
        dims = [d for d in self.skeleton_minima if d <= j]
        if not dims:
            return 0
        return min(self.skeleton_minima[d] for d in dims)


def _common_level(elements: list[CellSet]) -> int:
    return max(el.level for el in elements)


def ord_profile(elements: list[CellSet], max_table: int = 200_000) -> OrdProfile:
    """Per-cell multiplicity counts at the finest element level."""
    if not elements:
        raise CoverError("empty family")
    tower = elements[0].tower
    level = _common_level(elements)
    table: dict[CellT, int] | None = {}
    minima: dict[int, int] = {}
    sigs: dict[int, set[frozenset[int]]] = {}
    for cell in tower.iter_cells(level):
        cov = frozenset(i for i, el in enumerate(elements)
                        if el.contains_at(level, cell))
        d = tower.carrier0_dim(level, cell)
        minima[d] = min(minima.get(d, len(elements) + 1), len(cov))
        sigs.setdefault(d, set()).add(cov)
        if table is not None:
            table[cell] = len(cov)
            if len(table) > max_table:
                table = None
    return OrdProfile(level, table, minima, sigs)


def is_k_cover(elements: list[CellSet], k: int, region: CellSet | None = None) -> bool:
    """Does every k-element subfamily cover the region?

    Computed both by brute force over subfamilies and by the multiplicity
    criterion (min Ord >= m-k+1); the two must agree.
    """
    m = len(elements)
    if not 1 <= k <= m:
        raise CoverError(f"k must lie in 1..{m}")
    tower = elements[0].tower
    level = _common_level(elements)
    if region is not None:
        level = max(level, region.level)
    cover_sets: set[frozenset[int]] = set()
    min_ord = m + 1
    for cell in tower.iter_cells(level):
        if region is not None and not region.contains_at(level, cell):
            continue
        cov = frozenset(i for i, el in enumerate(elements)
                        if el.contains_at(level, cell))
        cover_sets.add(cov)
        min_ord = min(min_ord, len(cov))
    if min_ord == m + 1:
        return True  # empty region
    brute = all(
        all(set(sub) & cov for cov in cover_sets)
        for sub in itertools.combinations(range(m), k))
    criterion = min_ord >= m - k + 1
    if brute != criterion:
        raise AssertionError(
            f"k-cover brute force ({brute}) disagrees with the multiplicity "
            f"criterion ({criterion}) at k={k}")
    return brute


# -- bundles ------------------------------------------------------------------


@dataclass
class ProfileClaim:
    k: int
    skeleton: int
    min_multiplicity: int


@dataclass
class CoverBundle:
    complex: Complex
    tower: SubdivisionTower
    r: int
    N: int
    m: int
    elements: list[CellSet]
    certificates: list[Certificate]
    construction: str = ""

    @property
    def profile_claims(self) -> list[ProfileClaim]:
        return [ProfileClaim(k, k * (self.r + 1) - 1, self.m - k + 1)
                for k in range(1, self.N + 1)]

    def to_json(self) -> dict:
        return {
            "complex": self.complex.to_json(),
            "params": {"r": self.r, "N": self.N, "m": self.m,
                       "max_level": self.tower.max_level,
                       "construction": self.construction},
            "elements": [el.to_json() for el in self.elements],
            "certificates": [certificate_to_json(self.tower, c)
                             for c in self.certificates],
            "profile": [{"k": p.k, "skeleton": p.skeleton,
                         "min_multiplicity": p.min_multiplicity}
                        for p in self.profile_claims],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoverBundle":
        cx = Complex.from_json(data["complex"])
        params = data["params"]
        tower = SubdivisionTower(cx, max_level=params.get("max_level"))
        elements = [cellset_from_json(tower, e) for e in data["elements"]]
        certs = [certificate_from_json(tower, c) for c in data["certificates"]]
        return cls(cx, tower, params["r"], params["N"], params["m"],
                   elements, certs, params.get("construction", ""))


def cover_parameters(cx: Complex, r: int) -> int:
    """Minimal admissible N for the profile on this complex."""
    if r < 0:
        raise CoverError("r must be nonnegative")
    return math.ceil((cx.dim + 1) / (r + 1))


# -- construction -------------------------------------------------------------

_STREAM_BUDGET = 3_000_000


def build_cover(cx: Complex, r: int, m: int,
                max_level: int | None = None) -> CoverBundle:
    """Construct an m-element cover with the graded multiplicity profile.

    Elements are unions of open vertex stars (or arc complements on graphs)
    chosen so that a single partition push, plus a final vertex snap when
    r = 0, certifies every element. The layered star families realize the
    profile exactly; see the construction notes in the README.
    """
    N = cover_parameters(cx, r)
    if m < N:
        raise CoverError(f"m={m} is below the minimal admissible N={N}")
    if not cx.is_connected():
        raise CoverError("the complex must be connected")
    tower = SubdivisionTower(cx, max_level=max_level)
    n = cx.dim

    if N == 1:
        whole = OpenCellSet(tower, 0, cx.cells())
        target = Target("skeletal", 0) if r == 0 else Target("dimensional", r)
        elements: list[CellSet] = [whole for _ in range(m)]
        certs = [Certificate(whole, (), target) for _ in range(m)]
        return CoverBundle(cx, tower, r, N, m, elements, certs, "trivial")

    if r == 0 and n == 1:
        return _build_arc_cover(cx, tower, m)

    if r == 0:
        if m > tower.max_level:
            if n == 2 and tower.max_level >= 4:
                return _build_wheel_cover(cx, tower, m)
            raise ConstructionError(
                f"the layered star family needs subdivision level {m}, over the "
                f"cap {tower.max_level} (KO_COVER_MAX_LEVEL); packing several "
                f"elements into one level needs separating-crack components, "
                f"which this builder only constructs for graphs and surfaces")
        if tower.estimate_top_cells(m - 1) > _STREAM_BUDGET:
            raise ConstructionError(
                f"verification at level {m} would stream more than "
                f"{_STREAM_BUDGET} cells; the complex is too large for m={m}")
        elements = [VertexStarSet(tower, w, "old") for w in range(1, m + 1)]
        certs = [Certificate(el,
                             (PartitionPush(el.level, "old"),
                              StarSnap(el.level, "min-base-vertex")),
                             Target("skeletal", 0))
                 for el in elements]
        return CoverBundle(cx, tower, r, N, m, elements, certs, "layered-stars")

    # r >= 1
    if N > 2:
        raise ConstructionError(
            f"r={r} with N={N} > 2 is outside the implemented construction "
            f"(catalog complexes always have N <= 2 for r >= 1)")
    if m > 2:
        raise ConstructionError(
            f"every element must contain the full {r}-skeleton, and a third "
            f"certified element cannot cover the saturated mixed-flag vertices; "
            f"m={m} > 2 is unattainable in this certificate language")
    return _build_staggered_cover(cx, tower, r, m)


def _build_arc_cover(cx: Complex, tower: SubdivisionTower, m: int) -> CoverBundle:
    """Graph cover: element i removes one interior vertex per base edge, at a
    dyadic phase chosen once per i, so misses never collide across elements."""
    phases = _dyadic_phases(m)
    depth_needed = max(d for d, _ in phases)
    if depth_needed > tower.max_level:
        raise ConstructionError(
            f"m={m} arc phases need subdivision level {depth_needed}, over the "
            f"cap {tower.max_level} (KO_COVER_MAX_LEVEL)")
    base_edges = [c for c in cx.cells() if len(c) == 2]
    elements: list[CellSet] = []
    certs: list[Certificate] = []
    for i in range(m):
        depth, num = phases[i]
        miss: set[CellT] = set()
        for e in base_edges:
            path = _edge_path_vertices(tower, depth, e)
            miss.add((path[num],))
        cells = [c for c in tower.cells(depth) if c not in miss]
        el = OpenCellSet(tower, depth, cells)
        elements.append(el)
        certs.append(Certificate(
            el, (StarSnap(depth, "min-base-vertex"),), Target("skeletal", 0)))
    return CoverBundle(cx, tower, 0, 2, m, elements, certs, "arc-phases")


def _dyadic_phases(m: int) -> list[tuple[int, int]]:
    """First m dyadic positions (depth, index along the edge path), breadth
    first: 1/2, then 1/4, 3/4, then odd eighths, and so on. Element i is
    independent of m, so truncating a larger family gives a smaller one."""
    out: list[tuple[int, int]] = []
    depth = 1
    while len(out) < m:
        for num in range(1, 2 ** depth, 2):
            out.append((depth, num))
            if len(out) == m:
                break
        depth += 1
    return out


def _edge_path_vertices(tower: SubdivisionTower, t: int, edge: CellT) -> list[int]:
    """Interior vertices of a subdivided base edge, ordered from the least
    endpoint; entry k sits at dyadic position k / 2^t. Index 0 is unused."""
    lv = tower.level(t)
    a, b = edge
    on_edge = [v for v in range(len(lv.verts)) if lv.vbase[v] == edge]
    # adjacency along the subdivided edge: two vertices joined by a level-t cell
    cells_on = [c for c in tower.cells(t)
                if len(c) == 2 and tower.carrier0(t, c) == edge]
    adj: dict[int, list[int]] = {}
    for u, w in cells_on:
        adj.setdefault(u, []).append(w)
        adj.setdefault(w, []).append(u)
    start = tower.lift_base_vertex(a, t)
    end = tower.lift_base_vertex(b, t)
    path = [start]
    prev = None
    cur = start
    while cur != end:
        nxts = [x for x in adj[cur] if x != prev]
        if len(nxts) != 1:
            raise ConstructionError("subdivided edge is not a path")
        prev, cur = cur, nxts[0]
        path.append(cur)
    interior = path[1:-1]
    if len(interior) != 2 ** t - 1 or any(v not in on_edge for v in interior):
        raise ConstructionError("unexpected edge subdivision structure")
    return [start] + interior  # index k = position k/2^t


def _build_wheel_cover(cx: Complex, tower: SubdivisionTower, m: int) -> CoverBundle:
    """Surface cover that packs several elements into one level.

    Element i misses a crack built at level 4: around every 2-cell
    barycenter, the boundary of the i-th iterated closed neighborhood
    (these boundaries are nested and pairwise disjoint, so each is missed
    by one element only); three arcs from that circle to a fresh interior
    vertex on each edge of the 2-cell; and those edge vertices themselves.
    Crack cells of distinct elements overlap at most doubly in 2-cell
    interiors and never on edges or base vertices, which is exactly the
    graded budget. Removing a crack leaves components that are each
    contained in the star of a base vertex (the central disks and the
    corner regions), so a single vertex snap certifies every element; the
    certificate verifier re-checks that claim from scratch.
    """
    level = 4
    if tower.max_level < level:
        raise ConstructionError(
            f"wheel cracks need subdivision level {level}, over the cap "
            f"{tower.max_level} (KO_COVER_MAX_LEVEL)")
    try:
        cells = tower.cells(level)
    except TowerSizeError as exc:
        raise ConstructionError(f"wheel cracks: {exc}") from None
    lv = tower.level(level)
    cell_set = set(cells)
    carrier_dim = {c: tower.carrier0_dim(level, c) for c in cells}

    cofaces: dict[CellT, list[CellT]] = {c: [] for c in cells}
    for c in cells:
        for f in _proper_subsets(c):
            cofaces[f].append(c)

    two_cells = [c for c in cx.cells() if len(c) == 3]
    base_edges = [c for c in cx.cells() if len(c) == 2]
    edge_of_tri = {t: list(itertools.combinations(t, 2)) for t in two_cells}

    def lift_barycenter(t: CellT) -> CellT:
        v = tower.level(1).vert_id[t]
        for s in range(2, level + 1):
            v = tower.level(s).vert_id[(v,)]
        return (v,)

    # nested neighborhood circles around every 2-cell barycenter
    circles: dict[tuple[int, CellT], set[CellT]] = {}
    for t in two_cells:
        seed = lift_barycenter(t)
        region: set[CellT] = {seed}
        for k in range(1, m + 1):
            verts_in = {v for c in region for v in c}
            grown = set(region)
            for v in verts_in:
                grown.update(cofaces[(v,)])
                grown.add((v,))
            closed = set(grown)
            for c in grown:
                closed.update(_proper_subsets(c))
            bd = {c for c in closed
                  if any(cf not in closed for cf in cofaces[c])}
            if any(tower.carrier0(level, c) != t for c in bd):
                raise ConstructionError(
                    f"wheel cracks: m={m} neighborhood rings around a 2-cell "
                    f"barycenter reach its boundary at level {level}")
            circles[(k, t)] = bd
            region = closed
    # one fresh interior edge vertex per element and edge, spread dyadically
    positions = [num * 2 ** (level - depth) for depth, num in _dyadic_phases(m)]
    edge_vert: dict[tuple[int, CellT], CellT] = {}
    for e in base_edges:
        path = _edge_path_vertices(tower, level, e)
        for i in range(m):
            edge_vert[(i, e)] = (path[positions[i]],)

    counts: dict[CellT, int] = {}
    cracks: list[set[CellT]] = [set() for _ in range(m)]
    for i in range(m):
        for t in two_cells:
            cracks[i].update(circles[(i + 1, t)])
        for e in base_edges:
            cracks[i].add(edge_vert[(i, e)])
    for crack in cracks:
        for c in crack:
            counts[c] = counts.get(c, 0) + 1
    if any(counts[c] > carrier_dim[c] for crack in cracks for c in crack):
        raise ConstructionError("wheel cracks: ring reservation exceeds a budget")

    def usable(c: CellT, own: set[CellT]) -> bool:
        if c in own:
            return False
        return counts.get(c, 0) + 1 <= carrier_dim[c]

    for i in range(m):
        crack = cracks[i]
        for t in two_cells:
            starts = {v for c in circles[(i + 1, t)] for v in c}
            for e in edge_of_tri[t]:
                target = edge_vert[(i, e)][0]
                path = _arc_bfs(lv, cofaces, carrier_dim, counts, crack,
                                starts, target, t)
                if path is None:
                    raise ConstructionError(
                        f"wheel cracks: no room for an arc of element {i} "
                        f"in 2-cell {cx.label_cell(t)}")
                for c in path:
                    if c not in crack:
                        crack.add(c)
                        counts[c] = counts.get(c, 0) + 1

    elements: list[CellSet] = []
    certs: list[Certificate] = []
    for i in range(m):
        el = OpenCellSet(tower, level, (c for c in cells if c not in cracks[i]))
        cert = Certificate(el, (StarSnap(level, "min-base-vertex"),),
                           Target("skeletal", 0))
        verdict = verify_certificate(tower, cert)
        if not verdict.passed:
            raise ConstructionError(
                f"wheel cracks: element {i} does not snap: {verdict.reason}")
        elements.append(el)
        certs.append(cert)
    return CoverBundle(cx, tower, 0, 3, m, elements, certs, "wheel-cracks")


def _arc_bfs(lv, cofaces, carrier_dim, counts, own_crack,
             starts: set[int], target: int, tri: CellT):
    """Shortest vertex path from a circle to an edge vertex, through cells
    strictly interior to the 2-cell whose remaining miss budget allows one
    more crack; returns the new crack cells or None."""

    def vert_ok(v: int) -> bool:
        c = (v,)
        if v == target:
            return counts.get(c, 0) <= carrier_dim[c]  # already reserved
        return lv.vbase[v] == tri and c not in own_crack \
            and counts.get(c, 0) + 1 <= carrier_dim[c]

    def edge_ok(u: int, w: int) -> bool:
        c = (u, w) if u < w else (w, u)
        return c in cofaces and c not in own_crack \
            and counts.get(c, 0) + 1 <= carrier_dim[c]

    prev: dict[int, int | None] = {v: None for v in starts}
    queue = sorted(starts)
    while queue:
        nxt = []
        for u in queue:
            for c in cofaces[(u,)]:
                if len(c) != 2:
                    continue
                w = c[0] if c[1] == u else c[1]
                if w in prev or not edge_ok(u, w) or not vert_ok(w):
                    continue
                prev[w] = u
                if w == target:
                    out: set[CellT] = set()
                    cur: int | None = w
                    while cur is not None and prev[cur] is not None:
                        p = prev[cur]
                        out.add((cur,))
                        out.add((p, cur) if p < cur else (cur, p))  # type: ignore[operator]
                        cur = p
                    return out
                nxt.append(w)
        queue = sorted(nxt)
    return None


def _build_staggered_cover(cx: Complex, tower: SubdivisionTower,
                           r: int, m: int) -> CoverBundle:
    """Two-element cover for N = 2: the first element keeps everything near
    the r-skeleton (star of low barycenters at level 1), the second adds
    the barycenters of all-high flags at level 2, which are exactly the
    cells of the dual complex the first element misses."""
    lv1 = tower.level(1)
    low1 = frozenset(v for v in range(len(lv1.verts))
                     if len(lv1.vbase[v]) - 1 <= r)
    el1 = VertexStarSet(tower, 1, low1)
    cert1 = Certificate(el1, (PartitionPush(1, low1),), Target("dimensional", r))

    lv2 = tower.level(2)
    centers2 = set()
    for v in range(len(lv2.verts)):
        if len(lv2.vbase[v]) - 1 <= r:
            centers2.add(v)
            continue
        flag = lv2.verts[v]  # a level-1 cell: a chain of base cells
        if all(lv1.vdim[w] > r for w in flag):
            centers2.add(v)
    el2 = VertexStarSet(tower, 2, frozenset(centers2))
    cert2 = Certificate(el2, (PartitionPush(2, frozenset(centers2)),),
                        Target("dimensional", r))
    return CoverBundle(cx, tower, r, 2, m, [el1, el2], [cert1, cert2],
                       "staggered-duals")


# -- verification -------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CoverReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, passed, detail))

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                           for c in self.checks]}


def verify_cover_bundle(bundle: CoverBundle) -> CoverReport:
    """Re-derive multiplicities, check the profile both ways, re-verify all
    certificates. Failures become report entries, never exceptions."""
    report = CoverReport()
    tower = bundle.tower
    m = bundle.m
    try:
        sigs = _cover_signatures(tower, bundle.elements)
    except (TowerError, ConstructionError) as exc:
        report.add("multiplicity", False, f"enumeration failed: {exc}")
        return report

    if len(bundle.elements) != m:
        report.add("element-count", False,
                   f"bundle claims m={m} but has {len(bundle.elements)} elements")
    else:
        report.add("element-count", True)

    min_all = min((min(len(s) for s in ss) for ss in sigs.values() if ss),
                  default=0)
    report.add("coverage", min_all >= 1,
               "" if min_all >= 1 else "some open cell lies in no element")

    for claim in bundle.profile_claims:
        dims = [d for d in sigs if d <= claim.skeleton]
        min_ord = min((len(s) for d in dims for s in sigs[d]), default=m)
        formula_ok = min_ord >= claim.min_multiplicity
        brute_ok = _brute_k_cover(sigs, claim.skeleton, claim.k, m)
        agree = formula_ok == brute_ok
        report.add(f"profile-k{claim.k}", formula_ok and agree,
                   f"min Ord {min_ord} on skeleton {claim.skeleton}, "
                   f"need {claim.min_multiplicity}"
                   + ("" if agree else "; brute force disagrees with the criterion"))

    for i, (el, cert) in enumerate(zip(bundle.elements, bundle.certificates)):
        if not _same_set(el, cert.start):
            report.add(f"certificate-{i}", False,
                       "certificate start differs from the element")
            continue
        try:
            verdict = verify_certificate(tower, cert)
        except (CertificateFormatError, TowerError) as exc:
            report.add(f"certificate-{i}", False, f"structural error: {exc}")
            continue
        if not verdict.passed:
            report.add(f"certificate-{i}", False,
                       f"step {verdict.failing_step}: {verdict.reason}")
            continue
        if bundle.r == 0:
            good = cert.target.kind == "skeletal" and cert.target.r == 0 \
                and verdict.monotone
            report.add(f"certificate-{i}", good,
                       "" if good else "r=0 needs a monotone certificate into the 0-skeleton")
        else:
            good = (cert.target.kind == "dimensional" and cert.target.r <= bundle.r) \
                or (cert.target.kind == "skeletal" and cert.target.r <= bundle.r)
            report.add(f"certificate-{i}", good,
                       "" if good else f"target does not witness {bundle.r}-deformability")

    disjoint_ok, detail = _snap_closures_disjoint(tower, bundle.certificates)
    report.add("snap-closure-disjointness", disjoint_ok, detail)
    return report


def _same_set(a: CellSet, b: CellSet) -> bool:
    if a is b:
        return True
    if isinstance(a, VertexStarSet) and isinstance(b, VertexStarSet):
        return a.level == b.level and a.centers == b.centers
    if isinstance(a, OpenCellSet) and isinstance(b, OpenCellSet):
        return a.level == b.level and a.cells == b.cells
    return False


def _cover_signatures(tower: SubdivisionTower,
                      elements: list[CellSet]) -> dict[int, set[frozenset[int]]]:
    """Minimal cover index sets per base-carrier dimension, exact.

    Enumerates the common level directly when it fits the streaming budget;
    otherwise walks one level down and uses per-block minima, which star
    sets at the top level support exactly.
    """
    level = _common_level(elements)
    low = [(i, el) for i, el in enumerate(elements) if el.level < level]
    top = [(i, el) for i, el in enumerate(elements) if el.level == level]
    blockable = level >= 1 and all(isinstance(el, VertexStarSet) for _, el in top)
    sigs: dict[int, set[frozenset[int]]] = {}
    if not blockable:
        if not _direct_enumeration_ok(tower, level):
            raise ConstructionError(
                f"level {level} is too large to enumerate and some top-level "
                f"element is not star-backed")
        for cell in tower.iter_cells(level):
            cov = frozenset(i for i, el in enumerate(elements)
                            if el.contains_at(level, cell))
            d = tower.carrier0_dim(level, cell)
            sigs.setdefault(d, set()).add(cov)
        return sigs
    # per-block minima over the cells one level down; the block's own
    # barycenter cell realizes the minimum
    for block in tower.iter_cells(level - 1):
        cov = set(i for i, el in low if el.contains_at(level - 1, block))
        for i, el in top:
            if el.center_over_lower_cell(block):
                cov.add(i)
        d = tower.carrier0_dim(level - 1, block)
        sigs.setdefault(d, set()).add(frozenset(cov))
    return sigs


def _direct_enumeration_ok(tower: SubdivisionTower, level: int) -> bool:
    if level == 0:
        return True
    try:
        tower.cells(level - 1)
        return tower.count_cells(level) <= _STREAM_BUDGET
    except (TowerSizeError, TowerDepthError):
        return False


def _brute_k_cover(sigs: dict[int, set[frozenset[int]]], skeleton: int,
                   k: int, m: int) -> bool:
    sets = [s for d, ss in sigs.items() if d <= skeleton for s in ss]
    return all(
        all(set(sub) & s for s in sets)
        for sub in itertools.combinations(range(m), k))


def _snap_closures_disjoint(tower: SubdivisionTower,
                            certs: list[Certificate]) -> tuple[bool, str]:
    """At every snap step, the snapped components must have pairwise
    disjoint closures (isolated vertex cells pass structurally)."""
    for idx, cert in enumerate(certs):
        if isinstance(cert.start, VertexStarSet) and cert.start.centers == "old":
            continue  # lazy path snaps isolated vertex cells only
        level, cells = _materialize_start(tower, cert.start)
        for step in cert.steps:
            if isinstance(step, Refine):
                level, cells = _refine_carrier(tower, level, cells)
            elif isinstance(step, PartitionPush):
                keep = _expand_keep(tower, level, step.keep)
                cells = frozenset(tuple(v for v in c if v in keep) for c in cells)
                if any(not c for c in cells):
                    return False, f"certificate {idx}: push empties a cell"
            elif isinstance(step, StarSnap):
                comps = _components(cells)
                closures = []
                for comp in comps:
                    cl: set[CellT] = set()
                    for c in comp:
                        cl.add(c)
                        cl.update(_proper_subsets(c))
                    closures.append(cl)
                # closures of distinct snapped pieces may only meet outside
                # the carrier; a shared carrier cell would join the pieces
                # and break the piecewise contraction
                for a, b in itertools.combinations(closures, 2):
                    if (a & b) & cells:
                        return False, (f"certificate {idx}: snapped components "
                                       f"share a carrier cell")
                res = _apply_snap(tower, level, cells, step)
                if isinstance(res, Verdict):
                    return False, f"certificate {idx}: {res.reason}"
                cells = res
    return True, ""


# -- pullback -----------------------------------------------------------------


def pullback_cover(fmap: SimplicialMap, bundle: CoverBundle,
                   source_tower: SubdivisionTower | None = None) -> list[OpenCellSet]:
    """Preimages of the bundle elements under a simplicial map; coverage is
    preserved and multiplicity only grows pointwise."""
    if fmap.target != bundle.complex:
        raise CoverError("map target does not match the bundle's complex")
    if source_tower is None:
        source_tower = SubdivisionTower(fmap.source,
                                        max_level=bundle.tower.max_level)
    out = []
    for el in bundle.elements:
        t = el.level
        cells = [c for c in source_tower.cells(t)
                 if el.contains(source_tower.map_cell(bundle.tower, fmap, t, c))]
        out.append(OpenCellSet(source_tower, t, cells))
    return out
