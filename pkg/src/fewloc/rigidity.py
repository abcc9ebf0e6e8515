"""Rigidity matrices, rigidity decisions, and exact motion/stress witnesses.

The rigidity matrix of a framework on graph (V, E) in dimension d is the
d|V| x |E| matrix whose column for edge vu carries f(v)-f(u) in the v-rows
and f(u)-f(v) in the u-rows.  Motions live in the left kernel, stresses in
the right kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Iterable, Sequence

import numpy as np

from . import exact_linalg
from .exact_linalg import RankCertificate, RationalMatrix

Point = tuple[Fraction, ...]


class FrameworkError(ValueError):
    """Invalid framework input (unplaced vertex, bad dimension, ...)."""


def _norm_edge(e: Sequence[int]) -> tuple[int, int]:
    a, b = int(e[0]), int(e[1])
    if a == b:
        raise FrameworkError(f"loop edge {e}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Framework:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    dim: int
    placement: dict[int, Point] = field(hash=False)

    @classmethod
    def build(cls, vertices: Iterable[int], edges: Iterable[Sequence[int]],
              dim: int, placement: dict[int, Sequence]) -> "Framework":
        if dim not in (2, 3):
            raise FrameworkError(f"dimension must be 2 or 3, got {dim}")
        vs = tuple(sorted(set(int(v) for v in vertices)))
        es = tuple(sorted({_norm_edge(e) for e in edges}))
        pl = {}
        for v in vs:
            if v not in placement:
                raise FrameworkError(f"vertex {v} unplaced")
            pt = tuple(Fraction(x) for x in placement[v])
            if len(pt) != dim:
                raise FrameworkError(f"point for {v} has wrong dimension")
            pl[v] = pt
        for a, b in es:
            if a not in pl or b not in pl:
                raise FrameworkError(f"edge ({a},{b}) endpoint unplaced")
        return cls(vertices=vs, edges=es, dim=dim, placement=pl)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def required_rank(self) -> int:
        return self.dim * self.n - comb(self.dim + 1, 2)

    def row_index(self) -> dict[tuple[int, int], int]:
        # rows ordered vertex-id-major, coordinate-minor
        return {(v, k): i * self.dim + k
                for i, v in enumerate(self.vertices) for k in range(self.dim)}

    def affine_span_rank(self) -> int:
        """Exact dimension of the affine span of the placed points."""
        pts = [self.placement[v] for v in self.vertices]
        base = pts[0]
        rows = [[x - b for x, b in zip(p, base)] for p in pts[1:]]
        if not rows:
            return 0
        mat = RationalMatrix.from_rows(rows)
        return exact_linalg.exact_rank(mat.integer_rows())

    def is_spanning(self) -> bool:
        return self.affine_span_rank() == self.dim


@dataclass(frozen=True)
class MotionWitness:
    velocities: dict[int, Point] = field(hash=False)
    violated_pair: tuple[int, int] | None = None

    def verify(self, fw: Framework) -> bool:
        for a, b in fw.edges:
            if _pair_value(fw, self.velocities, a, b) != 0:
                return False
        if self.violated_pair is None:
            return False
        u, v = self.violated_pair
        return _pair_value(fw, self.velocities, u, v) != 0


@dataclass(frozen=True)
class StressVector:
    coefficients: dict[tuple[int, int], Fraction] = field(hash=False)

    def verify(self, fw: Framework) -> bool:
        for tau in fw.vertices:
            for k in range(fw.dim):
                s = Fraction(0)
                for (a, b), w in self.coefficients.items():
                    if tau == a:
                        other = b
                    elif tau == b:
                        other = a
                    else:
                        continue
                    s += w * (fw.placement[other][k] - fw.placement[tau][k])
                if s != 0:
                    return False
        return True


def _pair_value(fw: Framework, vel: dict[int, Point], u: int, v: int) -> Fraction:
    fu, fv = fw.placement[u], fw.placement[v]
    au = vel.get(u, tuple(Fraction(0) for _ in range(fw.dim)))
    av = vel.get(v, tuple(Fraction(0) for _ in range(fw.dim)))
    return sum((av[k] - au[k]) * (fv[k] - fu[k]) for k in range(fw.dim))


def rigidity_matrix(fw: Framework) -> RationalMatrix:
    """Exact rigidity matrix; rows vertex-major, columns edges in lex order."""
    ridx = fw.row_index()
    rows = [[Fraction(0)] * len(fw.edges) for _ in range(fw.dim * fw.n)]
    for j, (u, v) in enumerate(fw.edges):
        fu, fv = fw.placement[u], fw.placement[v]
        for k in range(fw.dim):
            d = fv[k] - fu[k]
            rows[ridx[(v, k)]][j] = d
            rows[ridx[(u, k)]][j] = -d
    return RationalMatrix.from_rows(rows)


def rigidity_matrix_mod(fw: Framework, p: int) -> np.ndarray:
    """Rigidity matrix reduced mod p (requires integral placement)."""
    ridx = fw.row_index()
    a = np.zeros((fw.dim * fw.n, len(fw.edges)), dtype=np.int64)
    for j, (u, v) in enumerate(fw.edges):
        fu, fv = fw.placement[u], fw.placement[v]
        for k in range(fw.dim):
            d = fv[k] - fu[k]
            if d.denominator != 1:
                raise FrameworkError("modular path needs integer coordinates")
            a[ridx[(v, k)], j] = int(d) % p
            a[ridx[(u, k)], j] = (-int(d)) % p
    return a


def _integral_framework(fw: Framework) -> Framework:
    """Scale all coordinates to integers (rigidity-rank invariant)."""
    denom = 1
    for pt in fw.placement.values():
        for x in pt:
            denom = lcm(denom, x.denominator)
    if denom == 1:
        return fw
    pl = {v: tuple(x * denom for x in pt) for v, pt in fw.placement.items()}
    return Framework(vertices=fw.vertices, edges=fw.edges, dim=fw.dim, placement=pl)


def _exact_left_kernel(fw: Framework) -> list[list[Fraction]]:
    mat = rigidity_matrix(fw)
    return exact_linalg.kernel_basis(mat, side="left")


def _vector_to_velocities(fw: Framework, vec: Sequence[Fraction]) -> dict[int, Point]:
    out = {}
    for i, v in enumerate(fw.vertices):
        out[v] = tuple(vec[i * fw.dim + k] for k in range(fw.dim))
    return out


def _find_violated_pair(fw: Framework, vel: dict[int, Point]) -> tuple[int, int] | None:
    vs = fw.vertices
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            if _pair_value(fw, vel, vs[i], vs[j]) != 0:
                return (vs[i], vs[j])
    return None


def motion_witness(fw: Framework) -> MotionWitness | None:
    """First nontrivial exact left-kernel vector, or None when all trivial."""
    for vec in _exact_left_kernel(fw):
        vel = _vector_to_velocities(fw, vec)
        pair = _find_violated_pair(fw, vel)
        if pair is not None:
            return MotionWitness(velocities=vel, violated_pair=pair)
    return None


def stress_basis(fw: Framework) -> list[StressVector]:
    """Exact basis of the stress space (right kernel of the rigidity matrix)."""
    mat = rigidity_matrix(fw)
    basis = exact_linalg.kernel_basis(mat, side="right")
    out = []
    for vec in basis:
        sv = StressVector(coefficients={e: vec[j] for j, e in enumerate(fw.edges)})
        assert sv.verify(fw)
        out.append(sv)
    return out


@dataclass(frozen=True)
class RigidityResult:
    rigid: bool
    certificate: RankCertificate | None
    witness: MotionWitness | None
    degenerate_span: bool = False


def is_infinitesimally_rigid(fw: Framework, seed: int = 0) -> RigidityResult:
    """Decide rigidity with a sound certificate either way.

    rigid=True carries a modular (or exact) full-rank certificate.
    rigid=False carries an exact motion witness when one exists; for
    placements that do not affinely span, the exact span-rank computation
    is the certificate and a witness is attached when the all-pairs test
    admits one.
    """
    if fw.n < fw.dim + 1:
        raise FrameworkError(f"need at least {fw.dim + 1} vertices")
    required = fw.required_rank()
    if not fw.is_spanning():
        return RigidityResult(rigid=False, certificate=None,
                              witness=motion_witness(fw), degenerate_span=True)
    ifw = _integral_framework(fw)
    if ifw.edges:
        for offset in range(2):
            p = exact_linalg.pick_prime(seed, offset)
            arr = rigidity_matrix_mod(ifw, p)
            r, prows, pcols, _ = exact_linalg.mod_echelon(arr, p)
            if r == required:
                cert = RankCertificate(
                    rank_lower_bound=r, method=f"modular_prime({p})", exact=False,
                    witness_rows=tuple(prows), witness_cols=tuple(pcols))
                return RigidityResult(rigid=True, certificate=cert, witness=None)
    # modular rank deficient (or edgeless): settle exactly
    witness = motion_witness(fw)
    if witness is None:
        mat = rigidity_matrix(fw)
        cert = exact_linalg.rank(mat, mode="exact")
        assert cert.rank_lower_bound == required
        return RigidityResult(rigid=True, certificate=cert, witness=None)
    return RigidityResult(rigid=False, certificate=None, witness=witness)


def skeleton_framework(vertices: Iterable[int], edges: Iterable[Sequence[int]],
                       dim: int, coords: dict[int, Sequence]) -> Framework:
    return Framework.build(vertices, edges, dim, coords)


def format_placement_file(fw: Framework) -> str:
    lines = []
    for v in fw.vertices:
        coords = " ".join(str(x) for x in fw.placement[v])
        lines.append(f"{v} {coords}")
    return "\n".join(lines) + "\n"


def parse_placement_file(text: str, dim: int) -> dict[int, Point]:
    out: dict[int, Point] = {}
    for ln in text.splitlines():
        if not ln.strip() or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) != dim + 1:
            raise FrameworkError(f"bad placement line {ln!r}")
        out[int(parts[0])] = tuple(Fraction(x) for x in parts[1:])
    return out


def format_graph(vertices: Sequence[int], edges: Sequence[tuple[int, int]]) -> str:
    lines = [f"{len(vertices)} {len(edges)}"]
    for a, b in sorted(edges):
        lines.append(f"{a} {b}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> tuple[list[int], list[tuple[int, int]]]:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    head = lines[0].split()
    if len(head) != 2:
        raise FrameworkError(f"bad graph header {lines[0]!r}")
    nv, ne = int(head[0]), int(head[1])
    edges = [_norm_edge(tuple(int(x) for x in ln.split())) for ln in lines[1:1 + ne]]
    verts = sorted({v for e in edges for v in e})
    if len(verts) != nv:
        raise FrameworkError(f"header says {nv} vertices, edges use {len(verts)}")
    return verts, edges
