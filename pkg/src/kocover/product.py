"""Product CW skeleta and assembled product covers.

The product of two simplicial complexes carries the CW structure whose
cells are pairs of open cells, filtered by total dimension. A product
cover pairs an m-element 1-deformable cover of the first factor with an
m-element monotone 0-deformable cover of the second, m = (d+n)//2 + 1;
the index-matching count shows the paired sets cover the whole product
n-skeleton, which bounds its category by m - 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .complexes import Complex
from .certify import (Certificate, PartitionPush, Refine, StarSnap,
                      _expand_keep, _materialize_start, _refine_carrier)
from .cover import CoverBundle, CoverError, CoverReport, build_cover
from .tower import CellT, SubdivisionTower


class ProductComplex:
    """CW product of two complexes: cells are pairs of base cells."""

    def __init__(self, x: Complex, b: Complex):
        self.x = x
        self.b = b

    def cells(self) -> list[tuple[CellT, CellT]]:
        return [(s, t) for s in self.x.cells() for t in self.b.cells()]

    def skeleton_cells(self, n: int) -> list[tuple[CellT, CellT]]:
        return [(s, t) for s, t in self.cells()
                if (len(s) - 1) + (len(t) - 1) <= n]

    @property
    def dim(self) -> int:
        return self.x.dim + self.b.dim


def product_skeleton(x: Complex, b: Complex, n: int) -> list[tuple[CellT, CellT]]:
    """All product cells of total dimension at most n."""
    if n > x.dim + b.dim:
        raise CoverError("skeleton dimension exceeds the product dimension")
    return ProductComplex(x, b).skeleton_cells(n)


def lemma_bound(n: int, d: int) -> int:
    """Category bound for the product n-skeleton: floor((d+n)/2)."""
    if not 0 <= d <= n:
        raise CoverError("the bound needs 0 <= d <= n")
    return (d + n) // 2


@dataclass
class ProductCoverBundle:
    x: Complex
    b: Complex
    n: int
    d: int
    m: int
    x_bundle: CoverBundle  # 1-deformable cover of the x factor
    b_bundle: CoverBundle  # monotone 0-deformable cover of the b factor

    def to_json(self) -> dict:
        return {
            "params": {"n": self.n, "d": self.d, "m": self.m},
            "x_bundle": self.x_bundle.to_json(),
            "b_bundle": self.b_bundle.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ProductCoverBundle":
        xb = CoverBundle.from_json(data["x_bundle"])
        bb = CoverBundle.from_json(data["b_bundle"])
        p = data["params"]
        return cls(xb.complex, bb.complex, p["n"], p["d"], p["m"], xb, bb)


def assemble_product_cover(x: Complex, b: Complex,
                           max_level: int | None = None) -> ProductCoverBundle:
    """Build the paired covers behind the halved-dimension bound.

    Requires dim b <= dim x. The number of elements is (d+n)//2 + 1; the
    paired sets are the products of same-index elements.
    """
    n, d = x.dim, b.dim
    if d > n:
        raise CoverError("the second factor must not exceed the first in dimension")
    m = (d + n) // 2 + 1
    b_bundle = build_cover(b, 0, m, max_level=max_level)
    x_bundle = build_cover(x, 1, m, max_level=max_level)
    return ProductCoverBundle(x, b, n, d, m, x_bundle, b_bundle)


def verify_product_cover(pcb: ProductCoverBundle) -> CoverReport:
    """Three checks: direct coverage of the product n-skeleton, the
    index-matching replay, and the filtration discipline of the factor
    certificates. The final contractibility of each paired set also uses
    simple connectivity of the first factor, which is recorded as an
    explicit assumption rather than verified."""
    report = CoverReport()
    n, d, m = pcb.n, pcb.d, pcb.m

    if m != (d + n) // 2 + 1 or len(pcb.x_bundle.elements) != m \
            or len(pcb.b_bundle.elements) != m:
        report.add("element-count", False,
                   f"expected m={(d + n) // 2 + 1} paired elements")
        return report
    report.add("element-count", True, f"m={m}")

    guard = all(2 * (m - j) - 1 >= n - j for j in range(d + 1))
    report.add("arithmetic-guard", guard,
               "2(m-j)-1 >= n-j for all j <= d" if guard else
               "index-matching arithmetic fails for some j")

    xt, bt = pcb.x_bundle.tower, pcb.b_bundle.tower
    lx = max(el.level for el in pcb.x_bundle.elements)
    lb = max(el.level for el in pcb.b_bundle.elements)
    x_cells = list(xt.iter_cells(lx))
    b_cells = list(bt.iter_cells(lb))
    x_cov = {}
    for s in x_cells:
        x_cov[s] = frozenset(i for i, el in enumerate(pcb.x_bundle.elements)
                             if el.contains_at(lx, s))
    b_cov = {}
    for t in b_cells:
        b_cov[t] = frozenset(i for i, el in enumerate(pcb.b_bundle.elements)
                             if el.contains_at(lb, t))
    x_dim = {s: xt.carrier0_dim(lx, s) for s in x_cells}
    b_dim = {t: bt.carrier0_dim(lb, t) for t in b_cells}

    # (a) direct brute force over refined product cells of total base dim <= n
    witness = None
    for s, t in itertools.product(x_cells, b_cells):
        if x_dim[s] + b_dim[t] > n:
            continue
        if not x_cov[s] & b_cov[t]:
            witness = (s, t)
            break
    report.add("coverage-direct", witness is None,
               "" if witness is None else f"uncovered product cell {witness}")

    # (b) the index-matching replay: the b-part of a cell over the j-skeleton
    # is covered by at least m-j elements, and those indices restricted to
    # the x cover form an (m-j)-cover of the x (2(m-j)-1)-skeleton, which
    # contains the (n-j)-skeleton by the arithmetic guard
    replay_ok = True
    replay_detail = ""
    for t in b_cells:
        j = b_dim[t]
        idxs = b_cov[t]
        if len(idxs) < m - j:
            replay_ok = False
            replay_detail = f"b-cell over the {j}-skeleton covered {len(idxs)} < {m - j} times"
            break
        sk = 2 * (m - j) - 1
        for s in x_cells:
            if x_dim[s] <= sk and not (x_cov[s] & idxs):
                replay_ok = False
                replay_detail = (f"indices covering a {j}-dim b-cell miss an x-cell "
                                 f"of the {sk}-skeleton")
                break
        if not replay_ok:
            break
    report.add("coverage-replay", replay_ok, replay_detail)
    agree = (witness is None) == replay_ok
    report.add("coverage-agreement", agree,
               "" if agree else "direct check and replay disagree")

    # (c) filtration: b certificates are monotone into the 0-skeleton and
    # never raise the b-carrier dimension along any step
    for i, cert in enumerate(pcb.b_bundle.certificates):
        ok = cert.target.kind == "skeletal" and cert.target.r == 0
        detail = "" if ok else "b-factor certificate is not a 0-skeleton certificate"
        if ok:
            drop = _steps_never_raise_carrier(bt, cert)
            ok = drop is None
            detail = "" if ok else f"step raises the base-carrier dimension at {drop}"
        report.add(f"b-filtration-{i}", ok, detail)
    for i, cert in enumerate(pcb.x_bundle.certificates):
        ok = cert.target.kind == "dimensional" and cert.target.r <= 1
        report.add(f"x-deformability-{i}", ok,
                   "" if ok else "x-factor certificate does not witness 1-deformability")
    report.add("assumption", True,
               "final contractibility of each paired set additionally uses "
               "simple connectivity of the first factor (not verified here)")
    return report


def _steps_never_raise_carrier(tower: SubdivisionTower, cert: Certificate):
    """Walk a certificate; return a witness cell if some step image has a
    larger base carrier than its source, else None. Star-backed starts are
    handled by materializing (factor complexes are small)."""
    level, cells = _materialize_start(tower, cert.start)
    for step in cert.steps:
        if isinstance(step, Refine):
            level, cells = _refine_carrier(tower, level, cells)
        elif isinstance(step, PartitionPush):
            keep = _expand_keep(tower, level, step.keep)
            new_cells = set()
            for c in cells:
                img = tuple(v for v in c if v in keep)
                if not img:
                    return c
                if tower.carrier0_dim(level, img) > tower.carrier0_dim(level, c):
                    return c
                new_cells.add(img)
            cells = frozenset(new_cells)
        elif isinstance(step, StarSnap):
            # snap targets are base vertices (carrier dimension 0), which can
            # never raise the carrier dimension; keep walking on the images
            if step.assignment == "min-base-vertex":
                break
            cells = frozenset((tower.lift_base_vertex(v, level),)
                              for c, v in step.assignment if c in cells)
    return None
