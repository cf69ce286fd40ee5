"""Iterated barycentric subdivision towers with carrier tracking.

Level 0 is the base complex. A vertex of level t+1 is a cell of level t
(structural identity, so carrier maps are table lookups), and a cell of
level t+1 is a chain of level-t cells, stored as a strictly increasing
tuple of vertex ids. Chain elements have pairwise distinct dimensions, so
the inclusion order of a chain is recovered by sorting on dimension.

Deep levels explode factorially. Levels are materialized lazily and only
up to a cell budget; one level beyond the last materialized level can
still be enumerated by streaming chains of the level below.
"""

from __future__ import annotations

import itertools
import os
from typing import Callable, Iterable, Iterator

from .complexes import Complex, ComplexError, SimplicialMap

CellT = tuple[int, ...]

DEFAULT_MAX_LEVEL = 4
DEFAULT_MAX_CELLS = 600_000


class TowerError(ValueError):
    """Invalid tower operation."""


class TowerDepthError(TowerError):
    """A requested level exceeds the configured subdivision depth cap."""


class TowerSizeError(TowerError):
    """A level is too large to materialize under the cell budget."""


def max_level_from_env() -> int:
    raw = os.environ.get("KO_COVER_MAX_LEVEL", "")
    try:
        return int(raw) if raw else DEFAULT_MAX_LEVEL
    except ValueError:
        return DEFAULT_MAX_LEVEL


def _proper_subsets(cell: CellT) -> Iterator[CellT]:
    for k in range(len(cell) - 1, 0, -1):
        yield from itertools.combinations(cell, k)


class _Level:
    """Vertex tables for one tower level.

    verts[i] is the underlying object of vertex i: the base vertex index at
    level 0, and the level-(t-1) cell at level t. vdim is the dimension of
    that underlying cell; vbase is the base cell whose open cell contains
    the vertex point.
    """

    def __init__(self, t: int, verts: list, vdim: list[int], vbase: list[CellT]):
        self.t = t
        self.verts = verts
        self.vert_id: dict = {v: i for i, v in enumerate(verts)}
        self.vdim = vdim
        self.vbase = vbase
        self.cells_list: list[CellT] | None = None
        self.cells_set: frozenset[CellT] | None = None


class SubdivisionTower:
    """Lazy chain of barycentric subdivisions of a base complex."""

    def __init__(self, base: Complex, max_level: int | None = None,
                 max_cells: int = DEFAULT_MAX_CELLS):
        self.base = base
        self.max_level = max_level_from_env() if max_level is None else max_level
        self.max_cells = max_cells
        lvl0 = _Level(
            0,
            verts=list(range(len(base.vertices))),
            vdim=[0] * len(base.vertices),
            vbase=[(i,) for i in range(len(base.vertices))],
        )
        lvl0.cells_list = list(base.cells())
        lvl0.cells_set = frozenset(lvl0.cells_list)
        self._levels: list[_Level] = [lvl0]

    # -- level materialization ------------------------------------------

    def level(self, t: int) -> _Level:
        """Vertex tables at level t (cells of level t-1 must fit the budget)."""
        if t < 0:
            raise TowerError("negative level")
        if t > self.max_level:
            raise TowerDepthError(
                f"level {t} exceeds the subdivision depth cap {self.max_level} "
                f"(KO_COVER_MAX_LEVEL)")
        while len(self._levels) <= t:
            s = len(self._levels) - 1
            lower_cells = self.cells(s)
            vdim = [len(c) - 1 for c in lower_cells]
            vbase = [self._carrier0_materialized(s, c) for c in lower_cells]
            self._levels.append(_Level(s + 1, list(lower_cells), vdim, vbase))
        return self._levels[t]

    def cells(self, t: int, dim: int | None = None) -> list[CellT]:
        """All cells of level t, materialized (guarded by the cell budget)."""
        lv = self.level(t)
        if lv.cells_list is None:
            n = self.count_cells(t)
            if n > self.max_cells:
                raise TowerSizeError(
                    f"level {t} has {n} cells, over the materialization budget "
                    f"{self.max_cells}")
            lv.cells_list = list(self.iter_cells(t))
            lv.cells_set = frozenset(lv.cells_list)
        if dim is None:
            return lv.cells_list
        return [c for c in lv.cells_list if len(c) - 1 == dim]

    def cell_set(self, t: int) -> frozenset[CellT]:
        self.cells(t)
        return self._levels[t].cells_set  # type: ignore[return-value]

    def iter_cells(self, t: int) -> Iterator[CellT]:
        """Stream the cells of level t without materializing them.

        Level t cells are the nonempty chains of level t-1 cells; each chain
        is produced once, by descending from its maximal element through
        faces of the current minimum.
        """
        if t == 0:
            yield from self.cells(0)
            return
        lv = self.level(t)
        if lv.cells_list is not None:
            yield from lv.cells_list
            return
        vid = lv.vert_id
        stack: list[tuple[list[int], CellT]] = []
        for top_id, top_cell in enumerate(lv.verts):
            stack.append(([top_id], top_cell))
            while stack:
                ids, mn = stack.pop()
                yield tuple(sorted(ids))
                for f in _proper_subsets(mn):
                    stack.append((ids + [vid[f]], f))

    def count_cells(self, t: int) -> int:
        """Exact cell count of level t (chain-count DP over level t-1)."""
        if t == 0:
            return len(self.cells(0))
        lower = self.cells(t - 1)
        order = sorted(lower, key=len)
        memo: dict[CellT, int] = {}
        for c in order:
            memo[c] = 1 + sum(memo[f] for f in _proper_subsets(c))
        return sum(memo.values())

    def estimate_top_cells(self, t: int) -> int:
        """Cheap upper-level size signal: top flags multiply by (d+1)! each level."""
        n = 0
        for f in self.base.facets:
            d = len(f) - 1
            per = 1
            for _ in range(t):
                per *= _factorial(d + 1)
            n += per
        return n

    # -- carriers ----------------------------------------------------------

    def _carrier0_materialized(self, t: int, cell: CellT) -> CellT:
        # base carrier of a level-t cell, available once level t exists
        if t == 0:
            return cell
        lv = self._levels[t]
        top = max(cell, key=lambda v: lv.vdim[v])
        return lv.vbase[top]

    def carrier_down(self, t: int, cell: CellT) -> CellT:
        """Minimal level-(t-1) cell carrying the open cell (the chain maximum)."""
        if t == 0:
            raise TowerError("level 0 has no lower carrier")
        lv = self.level(t)
        top = max(cell, key=lambda v: lv.vdim[v])
        return lv.verts[top]

    def carrier(self, t: int, cell: CellT, s: int) -> CellT:
        """Carrier of a level-t cell at level s <= t."""
        if s > t:
            raise TowerError("carrier target level above the cell's level")
        cur = cell
        for lvl in range(t, s, -1):
            cur = self.carrier_down(lvl, cur)
        return cur

    def carrier0(self, t: int, cell: CellT) -> CellT:
        if t == 0:
            return cell
        lv = self.level(t)
        top = max(cell, key=lambda v: lv.vdim[v])
        return lv.vbase[top]

    def carrier0_dim(self, t: int, cell: CellT) -> int:
        return len(self.carrier0(t, cell)) - 1

    def lift_base_vertex(self, v: int, t: int) -> int:
        """Vertex id at level t of a base vertex (iterated singleton cell)."""
        cur = v
        for s in range(1, t + 1):
            cur = self.level(s).vert_id[(cur,)]
        return cur

    def euler_characteristic(self, t: int) -> int:
        return sum((-1) ** (len(c) - 1) for c in self.iter_cells(t))

    # -- induced maps against another tower --------------------------------

    def map_cell(self, other: "SubdivisionTower", fmap: SimplicialMap,
                 t: int, cell: CellT) -> CellT:
        """Image of a level-t cell under the subdivision of a simplicial map."""
        if t == 0:
            return fmap.image_cell(cell)
        lv = self.level(t)
        olv = other.level(t)
        imgs = {self.map_cell(other, fmap, t - 1, lv.verts[v]) for v in cell}
        return tuple(sorted(olv.vert_id[c] for c in imgs))


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# -- open cell sets ----------------------------------------------------------


class OpenCellSet:
    """A union of open cells at one tower level, stored explicitly."""

    kind = "cells"

    def __init__(self, tower: SubdivisionTower, level: int, cells: Iterable[CellT]):
        self.tower = tower
        self.level = level
        self.cells = frozenset(cells)

    # point membership works per cell: a finer cell lies in the set iff its
    # carrier at this level does
    def contains(self, cell: CellT) -> bool:
        return cell in self.cells

    def contains_at(self, t: int, cell: CellT) -> bool:
        if t < self.level:
            raise TowerError("cannot test a coarser cell against a finer set")
        return self.contains(self.tower.carrier(t, cell, self.level))

    def iter_at(self, t: int) -> Iterator[CellT]:
        """Cells of the refinement of this set at level t >= level."""
        if t == self.level:
            yield from self.cells
            return
        for c in self.tower.iter_cells(t):
            if self.contains_at(t, c):
                yield c

    def is_empty(self) -> bool:
        return not self.cells

    def closure(self) -> "OpenCellSet":
        out: set[CellT] = set()
        for c in self.cells:
            out.add(c)
            out.update(_proper_subsets(c))
        return OpenCellSet(self.tower, self.level, out)

    def is_closed(self) -> bool:
        return self.cells == self.closure().cells

    def is_open(self) -> bool:
        """Open means coface-closed within the level's cell universe."""
        universe = self.tower.cell_set(self.level)
        for c in universe:
            if c in self.cells:
                continue
            if any(f in self.cells for f in _proper_subsets(c)):
                return False
        return True

    def union(self, other: "OpenCellSet") -> "OpenCellSet":
        self._check_mate(other)
        return OpenCellSet(self.tower, self.level, self.cells | other.cells)

    def intersection(self, other: "OpenCellSet") -> "OpenCellSet":
        self._check_mate(other)
        return OpenCellSet(self.tower, self.level, self.cells & other.cells)

    def point_disjoint(self, other: "OpenCellSet") -> bool:
        """Two open-cell unions share a point iff they share a cell at a common level."""
        t = max(self.level, other.level)
        a, b = self, other
        if a.level == b.level:
            return not (a.cells & b.cells)
        fine, coarse = (a, b) if a.level == t else (b, a)
        return not any(coarse.contains_at(t, c) for c in fine.cells)

    def dim(self) -> int:
        return max((len(c) - 1 for c in self.cells), default=-1)

    def to_json(self) -> dict:
        enc = cell_encoder(self.tower)
        return {"kind": "cells", "level": self.level,
                "cells": sorted(enc(self.level, c) for c in self.cells)}

    def __repr__(self) -> str:
        return f"OpenCellSet(level={self.level}, cells={len(self.cells)})"


class VertexStarSet:
    """Union of open vertex stars at one level, kept implicit.

    centers is either a frozenset of vertex ids at this level or the string
    "old", meaning every vertex that was already a vertex one level down
    (underlying cell of dimension 0). Cells of the set are exactly the
    level cells meeting the center set.
    """

    kind = "star"

    def __init__(self, tower: SubdivisionTower, level: int,
                 centers: frozenset[int] | str):
        if level < 1:
            raise TowerError("vertex stars live at level 1 or deeper")
        self.tower = tower
        self.level = level
        self.centers = centers

    def center_has_vert(self, v: int) -> bool:
        if self.centers == "old":
            return self.tower.level(self.level).vdim[v] == 0
        return v in self.centers  # type: ignore[operator]

    def center_over_lower_cell(self, lower: CellT) -> bool:
        """Is the barycenter vertex of a level-(level-1) cell a center?

        Usable without the vertex table of this level when centers == "old".
        """
        if self.centers == "old":
            return len(lower) == 1
        return self.tower.level(self.level).vert_id[lower] in self.centers  # type: ignore[operator]

    def contains(self, cell: CellT) -> bool:
        return any(self.center_has_vert(v) for v in cell)

    def contains_at(self, t: int, cell: CellT) -> bool:
        if t < self.level:
            raise TowerError("cannot test a coarser cell against a finer set")
        return self.contains(self.tower.carrier(t, cell, self.level))

    def iter_at(self, t: int) -> Iterator[CellT]:
        for c in self.tower.iter_cells(t):
            if self.contains_at(t, c):
                yield c

    def is_empty(self) -> bool:
        if self.centers == "old":
            return False
        return not self.centers

    def materialize(self) -> OpenCellSet:
        return OpenCellSet(self.tower, self.level,
                           (c for c in self.tower.cells(self.level) if self.contains(c)))

    def to_json(self) -> dict:
        if self.centers == "old":
            centers = {"kind": "old-vertices"}
        else:
            enc = cell_encoder(self.tower)
            lv = self.tower.level(self.level)
            centers = {"kind": "explicit",
                       "verts": sorted(enc(self.level - 1, lv.verts[v])
                                       for v in self.centers)}  # type: ignore[union-attr]
        return {"kind": "star", "level": self.level, "centers": centers}

    def __repr__(self) -> str:
        c = "old" if self.centers == "old" else len(self.centers)  # type: ignore[arg-type]
        return f"VertexStarSet(level={self.level}, centers={c})"


CellSet = OpenCellSet | VertexStarSet


# -- cell encoding for stable JSON -------------------------------------------


def cell_encoder(tower: SubdivisionTower) -> Callable[[int, CellT], object]:
    """Encode a level-t cell as nested label lists, independent of id interning."""

    def enc(t: int, cell: CellT):
        if t == 0:
            return [tower.base.vertices[i] for i in cell]
        lv = tower.level(t)
        return sorted((enc(t - 1, lv.verts[v]) for v in cell), key=_nested_key)

    return enc


def cell_decoder(tower: SubdivisionTower) -> Callable[[int, object], CellT]:
    def dec(t: int, data) -> CellT:
        if t == 0:
            idx = tower.base._index
            return tuple(sorted(idx[v] for v in data))
        lv = tower.level(t)
        return tuple(sorted(lv.vert_id[dec(t - 1, d)] for d in data))

    return dec


def _nested_key(x):
    if isinstance(x, str):
        return (0, x)
    return (1, tuple(_nested_key(y) for y in x))


# -- tower operations ----------------------------------------------------------


def barycentric(tower: SubdivisionTower) -> SubdivisionTower:
    """Deepen the tower by one subdivision level and return it.

    Materialization is idempotent and never alters existing levels, so the
    returned view is safe to share with readers of shallower levels.
    """
    tower.level(len(tower._levels))
    return tower


def dual_complex(tower: SubdivisionTower, m: int) -> OpenCellSet:
    """Full subcomplex of the first subdivision on barycenters of cells of
    dimension greater than m. Empty (not an error) when m >= dim."""
    if m < 0:
        raise ComplexError("dual skeleton dimension must be nonnegative")
    base_cells = tower.cells(0)
    high = [c for c in base_cells if len(c) - 1 > m]
    if not high:
        return OpenCellSet(tower, 1, ())
    highset = set(high)
    lv = tower.level(1)
    vid = lv.vert_id
    out: list[CellT] = []
    stack: list[tuple[list[int], CellT]] = []
    for top in high:
        stack.append(([vid[top]], top))
        while stack:
            ids, mn = stack.pop()
            out.append(tuple(sorted(ids)))
            for f in _proper_subsets(mn):
                if f in highset:
                    stack.append((ids + [vid[f]], f))
    return OpenCellSet(tower, 1, out)


def star(tower: SubdivisionTower, core: CellSet, kind: str = "open") -> OpenCellSet:
    """Open star of a core set, one level deeper: all cells there having a
    vertex whose carrier cell lies in the closure of the core. The closed
    star is its downward closure."""
    if kind not in ("open", "closed"):
        raise TowerError("star kind must be 'open' or 'closed'")
    t = core.level
    if isinstance(core, VertexStarSet):
        core = core.materialize()
    closure_cells = core.closure().cells
    nxt = tower.level(t + 1)
    marked = {nxt.vert_id[c] for c in closure_cells}
    cells = [c for c in tower.cells(t + 1) if any(v in marked for v in c)]
    out = OpenCellSet(tower, t + 1, cells)
    if kind == "closed":
        out = out.closure()
    return out


def preimage(fmap: SimplicialMap, source_tower: SubdivisionTower,
             target_tower: SubdivisionTower, s: CellSet) -> OpenCellSet:
    """Preimage of an open cell set under a simplicial map, lifted through
    subdivisions to the set's level."""
    if fmap.target is not target_tower.base and fmap.target != target_tower.base:
        raise TowerError("set does not live on the map's target")
    t = s.level
    cells = [c for c in source_tower.cells(t)
             if s.contains(source_tower.map_cell(target_tower, fmap, t, c))]
    return OpenCellSet(source_tower, t, cells)
