"""Deformation certificates and their step-by-step verifier.

A certificate deforms an open cell set by three step kinds:

* refine: pass to the next tower level (identity on points);
* partition push: inside each cell, push points along join lines away from
  the vertices outside a kept set T, landing on the face spanned by T; the
  cell effect is sigma -> sigma intersect T;
* star snap: contract each connected component of the carrier along
  straight lines to a base vertex lying in every member cell's base
  carrier.

All three are monotone: along every track the base-carrier dimension never
increases (push and snap tracks stay inside the open carrier cell until
they land in a face, refine is the identity). Verification is independent
of how a certificate was produced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tower import (CellSet, CellT, OpenCellSet, SubdivisionTower,
                    VertexStarSet, _proper_subsets, cell_decoder, cell_encoder)


class CertificateFormatError(ValueError):
    """Structurally malformed certificate (distinct from a failing verdict)."""


class CertificateGenerationError(ValueError):
    """A certificate generator could not produce a valid certificate."""


@dataclass(frozen=True)
class Refine:
    kind: str = field(default="refine", init=False)


@dataclass(frozen=True)
class PartitionPush:
    level: int
    keep: frozenset[int] | str  # vertex ids at `level`, or "old"
    kind: str = field(default="push", init=False)


@dataclass(frozen=True)
class StarSnap:
    level: int
    # cell -> base vertex id, or the rule "min-base-vertex"
    assignment: tuple[tuple[CellT, int], ...] | str
    kind: str = field(default="snap", init=False)


Step = Refine | PartitionPush | StarSnap


@dataclass(frozen=True)
class Target:
    kind: str  # "skeletal" or "dimensional"
    r: int

    def __post_init__(self):
        if self.kind not in ("skeletal", "dimensional"):
            raise CertificateFormatError(f"unknown target kind {self.kind!r}")
        if self.r < 0:
            raise CertificateFormatError("target dimension must be nonnegative")


@dataclass(frozen=True)
class Certificate:
    start: CellSet
    steps: tuple[Step, ...]
    target: Target


@dataclass
class Verdict:
    passed: bool
    monotone: bool
    achieved: tuple[int, int] | None  # (max final cell dim, max final base-carrier dim)
    failing_step: int | None = None
    reason: str = ""
    witness: object = None

    def __bool__(self) -> bool:
        return self.passed


def _fail(step: int | None, reason: str, witness=None) -> Verdict:
    return Verdict(False, False, None, failing_step=step, reason=reason, witness=witness)


# -- verification -------------------------------------------------------------


def verify_certificate(tower: SubdivisionTower, cert: Certificate) -> Verdict:
    """Check every step precondition and the claimed final target.

    Star-backed sets whose centers are the "old" vertices follow a
    structural path that never materializes the top level; it relies only
    on tower facts (the elements of a cell form a chain of distinct
    dimensions, so a cell holds at most one vertex of each kind), which the
    test suite checks independently on materialized levels.
    """
    if isinstance(cert.start, VertexStarSet) and cert.start.centers == "old":
        return _verify_star_old(tower, cert)
    carrier = _materialize_start(tower, cert.start)
    return _verify_explicit(tower, cert, carrier)


def _materialize_start(tower: SubdivisionTower, start: CellSet) -> tuple[int, frozenset[CellT]]:
    if isinstance(start, VertexStarSet):
        start = start.materialize()
    return start.level, frozenset(start.cells)


def _verify_explicit(tower: SubdivisionTower, cert: Certificate,
                     carrier: tuple[int, frozenset[CellT]]) -> Verdict:
    level, cells = carrier
    for idx, step in enumerate(cert.steps):
        if isinstance(step, Refine):
            level, cells = _refine_carrier(tower, level, cells)
        elif isinstance(step, PartitionPush):
            if step.level != level:
                raise CertificateFormatError(
                    f"push at level {step.level} applied to a level-{level} carrier")
            keep = _expand_keep(tower, level, step.keep)
            new_cells = set()
            for c in cells:
                kept = tuple(v for v in c if v in keep)
                if not kept:
                    return _fail(idx, "push leaves a carrier cell with no kept vertex",
                                 witness=c)
                new_cells.add(kept)
            cells = frozenset(new_cells)
        elif isinstance(step, StarSnap):
            if step.level != level:
                raise CertificateFormatError(
                    f"snap at level {step.level} applied to a level-{level} carrier")
            result = _apply_snap(tower, level, cells, step)
            if isinstance(result, Verdict):
                result.failing_step = idx
                return result
            cells = result
        else:  # pragma: no cover
            raise CertificateFormatError(f"unknown step {step!r}")
    return _final_verdict(tower, cert.target, level, cells)


def _refine_carrier(tower: SubdivisionTower, level: int,
                    cells: frozenset[CellT]) -> tuple[int, frozenset[CellT]]:
    nxt = tower.level(level + 1)
    vid = nxt.vert_id
    out: set[CellT] = set()
    for c in cells:
        # chains of faces with maximum equal to the cell itself
        stack = [([vid[c]], c)]
        while stack:
            ids, mn = stack.pop()
            out.add(tuple(sorted(ids)))
            for f in _proper_subsets(mn):
                stack.append((ids + [vid[f]], f))
    return level + 1, frozenset(out)


def _expand_keep(tower: SubdivisionTower, level: int,
                 keep: frozenset[int] | str) -> frozenset[int]:
    lv = tower.level(level)
    if keep == "old":
        return frozenset(v for v in range(len(lv.verts)) if lv.vdim[v] == 0)
    if not all(0 <= v < len(lv.verts) for v in keep):  # type: ignore[operator]
        raise CertificateFormatError("push keeps a vertex that is not at its level")
    return keep  # type: ignore[return-value]


def _apply_snap(tower: SubdivisionTower, level: int, cells: frozenset[CellT],
                step: StarSnap):
    comp = _components(cells)
    if step.assignment == "min-base-vertex":
        assign: dict[CellT, int] = {}
        for cls in comp:
            common = None
            for c in cls:
                verts = set(tower.carrier0(level, c))
                common = verts if common is None else common & verts
            if not common:
                return _fail(None, "snap component has no common base-carrier vertex",
                             witness=sorted(cls)[0])
            target = min(common)
            for c in cls:
                assign[c] = target
    else:
        assign = dict(step.assignment)  # type: ignore[arg-type]
        missing = [c for c in cells if c not in assign]
        if missing:
            raise CertificateFormatError("snap assignment does not cover the carrier")
        nbase = len(tower.base.vertices)
        if any(not 0 <= v < nbase for v in assign.values()):
            raise CertificateFormatError("snap assigns a non-vertex of the base complex")
        for cls in comp:
            targets = {assign[c] for c in cls}
            if len(targets) > 1:
                return _fail(None, "snap assigns different vertices inside one component",
                             witness=sorted(cls)[0])
            (target,) = targets
            for c in cls:
                if target not in tower.carrier0(level, c):
                    return _fail(None,
                                 "snap target is not a vertex of a member cell's base carrier",
                                 witness=c)
    out = {( tower.lift_base_vertex(assign[next(iter(cls))], level), ) for cls in comp}
    return frozenset(out)


def _components(cells: frozenset[CellT]) -> list[set[CellT]]:
    """Connected components of an open cell union: two open cells touch iff
    one is a face of the other and both are present."""
    parent: dict[CellT, CellT] = {c: c for c in cells}

    def find(x: CellT) -> CellT:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in cells:
        for f in _proper_subsets(c):
            if f in parent:
                parent[find(f)] = find(c)
    comp: dict[CellT, set[CellT]] = {}
    for c in cells:
        comp.setdefault(find(c), set()).add(c)
    return list(comp.values())


def _final_verdict(tower: SubdivisionTower, target: Target, level: int,
                   cells: frozenset[CellT]) -> Verdict:
    max_dim = max((len(c) - 1 for c in cells), default=-1)
    max_base = max((tower.carrier0_dim(level, c) for c in cells), default=-1)
    achieved = (max_dim, max_base)
    if target.kind == "skeletal":
        if max_base > target.r:
            bad = next(c for c in cells if tower.carrier0_dim(level, c) > target.r)
            return _fail(None, f"final carrier leaves the base {target.r}-skeleton",
                         witness=bad)
    else:
        if max_dim > target.r:
            bad = next(c for c in cells if len(c) - 1 > target.r)
            return _fail(None,
                         f"final carrier has dimension {max_dim} > {target.r}",
                         witness=bad)
    return Verdict(True, True, achieved)


def _verify_star_old(tower: SubdivisionTower, cert: Certificate) -> Verdict:
    """Structural path for star sets centered at all old vertices.

    Expected shape: [push(old)] followed by an optional snap rule. The push
    precondition holds by definition of the star; each cell keeps at most
    one vertex because a cell's elements form a chain, which contains at
    most one zero-dimensional member. The pushed carrier is the set of old
    vertex cells, whose points are the vertices of the level below.
    """
    start: VertexStarSet = cert.start  # type: ignore[assignment]
    level = start.level
    steps = list(cert.steps)
    if not steps or not isinstance(steps[0], PartitionPush) or steps[0].keep != "old" \
            or steps[0].level != level:
        # fall back to explicit verification, which may be expensive
        return _verify_explicit(tower, cert, _materialize_start(tower, start))
    # after the push: one cell per old vertex; old vertices at `level` are
    # exactly the vertices of level-1, i.e. the cells of level-2
    lowlv = tower.level(level - 1)
    old_verts = list(range(len(lowlv.verts)))  # level-(L-1) vertex ids
    rest = steps[1:]
    if not rest:
        # bare push: final carrier is the old vertex cells
        max_base = max((len(lowlv.vbase[w]) - 1 for w in old_verts), default=-1)
        return _final_verdict_lazy(cert.target, 0, max_base)
    if len(rest) == 1 and isinstance(rest[0], StarSnap) \
            and rest[0].assignment == "min-base-vertex" and rest[0].level == level:
        # isolated vertex cells are their own components; the rule picks the
        # least vertex of each base carrier, which is a valid assignment
        return _final_verdict_lazy(cert.target, 0, 0)
    return _fail(1, "unsupported step after a lazy star push", witness=None)


def _final_verdict_lazy(target: Target, max_dim: int, max_base: int) -> Verdict:
    if target.kind == "skeletal" and max_base > target.r:
        return _fail(None, f"final carrier leaves the base {target.r}-skeleton")
    if target.kind == "dimensional" and max_dim > target.r:
        return _fail(None, f"final carrier has dimension {max_dim} > {target.r}")
    return Verdict(True, True, (max_dim, max_base))


# -- generators ---------------------------------------------------------------


def run_steps(tower: SubdivisionTower, start: CellSet,
              steps: list[Step]) -> tuple[int, frozenset[CellT]]:
    """Apply steps to a set, returning the final carrier; raises on failure."""
    level, cells = _materialize_start(tower, start)
    for step in steps:
        if isinstance(step, Refine):
            level, cells = _refine_carrier(tower, level, cells)
        elif isinstance(step, PartitionPush):
            keep = _expand_keep(tower, level, step.keep)
            new_cells = set()
            for c in cells:
                kept = tuple(v for v in c if v in keep)
                if not kept:
                    raise CertificateGenerationError("push drops a cell entirely")
                new_cells.add(kept)
            cells = frozenset(new_cells)
        elif isinstance(step, StarSnap):
            res = _apply_snap(tower, level, cells, step)
            if isinstance(res, Verdict):
                raise CertificateGenerationError(res.reason)
            cells = res
    return level, cells


def make_dual_push(s: CellSet, avoid_cells: set[CellT]) -> list[Step]:
    """Refine then push away from a base subcomplex the set does not meet.

    The kept vertices are the barycenters of the cells not contained in the
    avoided subcomplex; when the avoided set contains the base m-skeleton
    and the input lives at level 0, the result lands in the dual complex of
    dimension at most dim - m - 1.
    """
    tower = s.tower
    for c in (s.materialize().cells if isinstance(s, VertexStarSet) else s.cells):
        if tower.carrier0(s.level, c) in avoid_cells:
            raise CertificateGenerationError(
                f"set meets the avoided subcomplex at {c}")
    nxt = tower.level(s.level + 1)
    keep = frozenset(
        v for v in range(len(nxt.verts))
        if nxt.vbase[v] not in avoid_cells)
    return [Refine(), PartitionPush(s.level + 1, keep)]


def make_star_snap(s: CellSet) -> StarSnap:
    """Snap a set of isolated points to base vertices (least vertex id wins)."""
    if isinstance(s, VertexStarSet):
        s = s.materialize()
    tower = s.tower
    if any(len(c) != 1 for c in s.cells):
        raise CertificateGenerationError("star snap needs a zero-dimensional carrier")
    assign = tuple(sorted((c, min(tower.carrier0(s.level, c))) for c in s.cells))
    return StarSnap(s.level, assign)


def certify_to_dimension(s: CellSet, r: int) -> Certificate:
    """Dual-push certificate for a set avoiding a deep enough skeleton.

    Scans for the largest skeleton the set misses; fails (with a report,
    not a crash) when no skeleton of dimension at least dim-r-1 qualifies.
    """
    tower = s.tower
    n = tower.base.dim
    if r < 0:
        raise CertificateGenerationError("negative target dimension")
    cells = s.materialize().cells if isinstance(s, VertexStarSet) else s.cells
    if n <= r:
        return Certificate(s, (), Target("dimensional", r))
    lowest = n - r - 1
    base_cells = tower.cells(0)
    for sk in range(n - 1, lowest - 1, -1):
        avoid = {c for c in base_cells if len(c) - 1 <= sk}
        if any(tower.carrier0(s.level, c) in avoid for c in cells):
            continue
        steps = make_dual_push(s, avoid)
        if r == 0:
            level, carrier = run_steps(tower, s, steps)
            if any(len(c) != 1 for c in carrier):
                continue
            snap = StarSnap(level, tuple(
                sorted((c, min(tower.carrier0(level, c))) for c in carrier)))
            cert = Certificate(s, tuple(steps) + (snap,), Target("skeletal", 0))
        else:
            cert = Certificate(s, tuple(steps), Target("dimensional", r))
        verdict = verify_certificate(tower, cert)
        if verdict.passed:
            return cert
    raise CertificateGenerationError(
        f"no skeleton of dimension >= {lowest} is avoided by the set")


# -- serialization ------------------------------------------------------------


def certificate_to_json(tower: SubdivisionTower, cert: Certificate) -> dict:
    enc = cell_encoder(tower)
    steps = []
    for step in cert.steps:
        if isinstance(step, Refine):
            steps.append({"kind": "refine"})
        elif isinstance(step, PartitionPush):
            if step.keep == "old":
                keep = {"kind": "old-vertices"}
            else:
                lv = tower.level(step.level)
                keep = {"kind": "explicit",
                        "verts": sorted(
                            (enc(step.level - 1, lv.verts[v]) for v in step.keep),
                            key=_json_key)}
            steps.append({"kind": "push", "level": step.level, "keep": keep})
        elif isinstance(step, StarSnap):
            if step.assignment == "min-base-vertex":
                assignment = {"kind": "min-base-vertex"}
            else:
                assignment = {"kind": "explicit",
                              "pairs": sorted(
                                  ([enc(step.level, c), tower.base.vertices[v]]
                                   for c, v in step.assignment),
                                  key=_json_key)}
            steps.append({"kind": "snap", "level": step.level, "assignment": assignment})
    return {"start": cert.start.to_json(), "steps": steps,
            "target": {"kind": cert.target.kind, "r": cert.target.r}}


def certificate_from_json(tower: SubdivisionTower, data: dict) -> Certificate:
    start = cellset_from_json(tower, data["start"])
    dec = cell_decoder(tower)
    steps: list[Step] = []
    for sd in data["steps"]:
        if sd["kind"] == "refine":
            steps.append(Refine())
        elif sd["kind"] == "push":
            level = sd["level"]
            if sd["keep"]["kind"] == "old-vertices":
                steps.append(PartitionPush(level, "old"))
            else:
                lv = tower.level(level)
                keep = frozenset(lv.vert_id[dec(level - 1, v)]
                                 for v in sd["keep"]["verts"])
                steps.append(PartitionPush(level, keep))
        elif sd["kind"] == "snap":
            level = sd["level"]
            if sd["assignment"]["kind"] == "min-base-vertex":
                steps.append(StarSnap(level, "min-base-vertex"))
            else:
                idx = tower.base._index
                pairs = tuple(sorted(
                    (dec(level, c), idx[v]) for c, v in sd["assignment"]["pairs"]))
                steps.append(StarSnap(level, pairs))
        else:
            raise CertificateFormatError(f"unknown step kind {sd.get('kind')!r}")
    tgt = data["target"]
    return Certificate(start, tuple(steps), Target(tgt["kind"], tgt["r"]))


def cellset_from_json(tower: SubdivisionTower, data: dict) -> CellSet:
    dec = cell_decoder(tower)
    if data["kind"] == "cells":
        return OpenCellSet(tower, data["level"],
                           (dec(data["level"], c) for c in data["cells"]))
    if data["kind"] == "star":
        if data["centers"]["kind"] == "old-vertices":
            return VertexStarSet(tower, data["level"], "old")
        lv = tower.level(data["level"])
        centers = frozenset(lv.vert_id[dec(data["level"] - 1, v)]
                            for v in data["centers"]["verts"])
        return VertexStarSet(tower, data["level"], centers)
    raise CertificateFormatError(f"unknown cell set kind {data.get('kind')!r}")


def _json_key(x):
    if isinstance(x, str):
        return (0, x)
    return (1, tuple(_json_key(y) for y in x))
