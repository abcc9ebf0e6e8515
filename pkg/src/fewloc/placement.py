"""Few-locations placement: location sets, avoidance rings, the
contract/replay placement search, and independent certification.

The search replays a reduction schedule in reverse.  Rigidity across the
replay is certified incrementally: we maintain a square nonsingular minor
of the rigidity matrix mod p (rows I, edge columns J) together with its
inverse.  Reinserting a vertex of degree k modifies at most k columns and
appends three rows, so each candidate location is tested by a small
determinant and each acceptance updates the inverse in O(m^2) time.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact_linalg
from .complex2 import Complex2, build_and_validate
from .contraction import ContractionStep, ReductionSchedule, reduction_schedule, vertex_split
from .rigidity import Framework, is_infinitesimally_rigid


class PlacementError(ValueError):
    """Refused placement: bad input, insufficient or degenerate locations."""


@dataclass(frozen=True)
class LocationSet:
    points: tuple[tuple[int, ...], ...]
    seed: int
    coordinate_bound: int

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.points[0])


def generate_locations(c: int, d: int = 3, seed: int = 0,
                       coordinate_bound: int = 2 ** 40) -> LocationSet:
    """c pairwise-distinct integer points, deterministic under the seed."""
    if c < 1:
        raise PlacementError("need at least one location")
    rng = random.Random(seed)
    pts: list[tuple[int, ...]] = []
    seen = set()
    while len(pts) < c:
        p = tuple(rng.randint(-coordinate_bound, coordinate_bound) for _ in range(d))
        if p in seen:
            continue
        seen.add(p)
        pts.append(p)
    return LocationSet(points=tuple(pts), seed=seed, coordinate_bound=coordinate_bound)


def format_locations(ls: LocationSet) -> str:
    lines = [f"{ls.size} {ls.dim}"]
    for p in ls.points:
        lines.append(" ".join(str(x) for x in p))
    return "\n".join(lines) + "\n"


def parse_locations(text: str) -> LocationSet:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    c, d = (int(x) for x in lines[0].split())
    pts = tuple(tuple(int(x) for x in ln.split()) for ln in lines[1:1 + c])
    if len(pts) != c or any(len(p) != d for p in pts):
        raise PlacementError("malformed location file")
    return LocationSet(points=pts, seed=-1, coordinate_bound=max(
        (abs(x) for p in pts for x in p), default=1))


# ---------------------------------------------------------------------------
# incremental rank certificate


class IncrementalCertificate:
    """Nonsingular minor of the rigidity matrix mod p, maintained across
    vertex reinsertions.  Rows are (vertex, axis) pairs, columns are edges."""

    def __init__(self, p: int, points: dict[int, tuple[int, ...]],
                 rows: list[tuple[int, int]], cols: list[tuple[int, int]],
                 minv: np.ndarray):
        self.p = p
        self.points = dict(points)
        self.rows = list(rows)
        self.cols = list(cols)
        self.minv = minv
        self._rows_by_vertex: dict[int, list[tuple[int, int]]] = {}
        for pos, (v, axis) in enumerate(self.rows):
            self._rows_by_vertex.setdefault(v, []).append((axis, pos))

    @property
    def rank(self) -> int:
        return len(self.cols)

    @classmethod
    def from_assignment(cls, edges, points: dict[int, tuple[int, ...]],
                        p: int) -> "IncrementalCertificate | None":
        """Full elimination; None when the rank certificate falls short."""
        verts = sorted(points)
        vidx = {v: i for i, v in enumerate(verts)}
        edges = sorted(tuple(sorted(e)) for e in edges)
        n = len(verts)
        required = 3 * n - 6
        a = np.zeros((3 * n, len(edges)), dtype=np.int64)
        for j, (u, v) in enumerate(edges):
            pu, pv = points[u], points[v]
            for k in range(3):
                d = (pv[k] - pu[k]) % p
                a[3 * vidx[v] + k, j] = d
                a[3 * vidx[u] + k, j] = (-d) % p
        rank, prow, pcol, _ = exact_linalg.mod_echelon(a.copy(), p)
        if rank < required:
            return None
        prow, pcol = prow[:required], pcol[:required]
        rows = [(verts[r // 3], r % 3) for r in prow]
        cols = [edges[c] for c in pcol]
        minor = a[np.ix_(prow, pcol)]
        minv = exact_linalg.mod_inverse_matrix(minor, p)
        if minv is None:  # pragma: no cover - pivot minor is nonsingular
            return None
        return cls(p=p, points=points, rows=rows, cols=cols, minv=minv)

    def _column_values(self, v: int, w: int) -> tuple[np.ndarray, np.ndarray]:
        """Column of edge (v, w): values at the minor rows and at v's rows."""
        p = self.p
        pv, pw = self.points[v], self.points[w]
        b = np.zeros(len(self.rows), dtype=np.int64)
        for axis, pos in self._rows_by_vertex.get(w, ()):
            b[pos] = (pw[axis] - pv[axis]) % p
        c = np.array([(pv[k] - pw[k]) % p for k in range(3)], dtype=np.int64)
        return b, c

    def begin_insert(self, step: ContractionStep) -> dict:
        v, u = step.removed_vertex, step.target_vertex
        cyc = list(step.link_cycle_of_v)
        k = len(cyc)
        i = cyc.index(u)
        a, b = cyc[(i - 1) % k], cyc[(i + 1) % k]
        interior = [cyc[(i + 1 + j) % k] for j in range(1, k - 2)]
        colpos = {e: j for j, e in enumerate(self.cols)}
        slots, slot_partners = [], []
        loose = []
        for w in interior:
            e = tuple(sorted((u, w)))
            if e in colpos:
                slots.append(colpos[e])
                slot_partners.append(w)
            else:
                loose.append(w)
        append_candidates = [u, a, b] + loose
        return {"v": v, "u": u, "a": a, "b": b, "interior": interior,
                "slots": slots, "slot_partners": slot_partners,
                "append_candidates": append_candidates}

    def try_point(self, ctx: dict, point: tuple[int, ...]) -> dict | None:
        """Small-determinant test for one candidate location of v."""
        p = self.p
        v = ctx["v"]
        self.points[v] = point
        try:
            partners = ctx["slot_partners"] + ctx["append_candidates"]
            bs, cs = [], []
            for w in partners:
                bw, cw = self._column_values(v, w)
                bs.append(bw)
                cs.append(cw)
            b_all = np.stack(bs, axis=1) if partners else np.zeros((len(self.rows), 0), dtype=np.int64)
            c_all = np.stack(cs, axis=1)
            ns = len(ctx["slots"])
            x_slot_rows = (self.minv[ctx["slots"], :] @ b_all) % p if ns else \
                np.zeros((0, b_all.shape[1]), dtype=np.int64)
            napp = len(ctx["append_candidates"])
            for combo in itertools.islice(
                    itertools.combinations(range(napp), 3), 12):
                pick = list(range(ns)) + [ns + j for j in combo]
                kmat = np.concatenate(
                    [x_slot_rows[:, pick], c_all[:, pick]], axis=0)
                if exact_linalg.mod_inverse_matrix(kmat, p) is not None:
                    return {"combo": combo, "b_all": b_all, "c_all": c_all,
                            "pick": pick, "point": point}
            return None
        finally:
            del self.points[v]

    def commit(self, ctx: dict, attempt: dict) -> None:
        p = self.p
        v = ctx["v"]
        m = len(self.rows)
        self.points[v] = attempt["point"]
        pick = attempt["pick"]
        b_mod = attempt["b_all"][:, pick]
        c_mod = attempt["c_all"][:, pick]
        kt = len(pick)
        x_full = (self.minv @ b_mod) % p
        fcols = np.concatenate([x_full, c_mod], axis=0)  # (m+3) x kt
        special = list(ctx["slots"]) + [m, m + 1, m + 2]
        kmat = fcols[special, :]
        kinv = exact_linalg.mod_inverse_matrix(kmat, p)
        assert kinv is not None, "commit after failed test"
        not_special = [i for i in range(m + 3) if i not in set(ctx["slots"])
                       and i < m]
        delta = np.zeros((m + 3, kt), dtype=np.int64)
        eye_s = np.zeros((kt, kt), dtype=np.int64)
        np.fill_diagonal(eye_s, 1)
        delta[special, :] = (kinv - eye_s) % p
        delta[not_special, :] = (-(fcols[not_special, :] @ kinv)) % p
        bd = np.zeros((m + 3, m + 3), dtype=np.int64)
        bd[:m, :m] = self.minv
        bd[m:, m:] = np.eye(3, dtype=np.int64)
        self.minv = (bd + delta @ bd[special, :]) % p
        # bookkeeping: rename slot edges, append the chosen fresh edges
        for pos, w in zip(ctx["slots"], ctx["slot_partners"]):
            self.cols[pos] = tuple(sorted((v, w)))
        for j in attempt["combo"]:
            w = ctx["append_candidates"][j]
            self.cols.append(tuple(sorted((v, w))))
        for axis in range(3):
            pos = len(self.rows)
            self.rows.append((v, axis))
            self._rows_by_vertex.setdefault(v, []).append((axis, pos))

    def selfcheck(self) -> bool:
        """Recompute the minor and confirm minv is its inverse (tests)."""
        p = self.p
        m = len(self.rows)
        rowpos = {rc: i for i, rc in enumerate(self.rows)}
        a = np.zeros((m, m), dtype=np.int64)
        for j, (x, y) in enumerate(self.cols):
            px, py = self.points[x], self.points[y]
            for k in range(3):
                d = (py[k] - px[k]) % p
                if (y, k) in rowpos:
                    a[rowpos[(y, k)], j] = d
                if (x, k) in rowpos:
                    a[rowpos[(x, k)], j] = (-d) % p
        if m > 2048:  # inner dimension too large for int64 accumulation
            prod = (a.astype(object) @ self.minv.astype(object)) % p
            prod = prod.astype(np.int64)
        else:
            prod = (a @ self.minv) % p
        return bool(np.array_equal(prod, np.eye(m, dtype=np.int64)))


# ---------------------------------------------------------------------------
# avoidance sets and local injectivity conditions


def _rings(c: Complex2, v: int) -> tuple[set[int], set[int], set[int]]:
    star = [t for t in c.triangles if v in t]
    star_set = set(star)
    ring1 = {x for t in star for x in t} - {v}
    et = c.edge_triangles()
    ring2_tris = set()
    for t in star:
        a, b_, c_ = t
        for e in ((a, b_), (a, c_), (b_, c_)):
            for t2 in et[e]:
                if v not in t2:
                    ring2_tris.add(t2)
    ring2 = {x for t in ring2_tris for x in t} - ring1 - {v}
    ring3_tris = set()
    for t in ring2_tris:
        a, b_, c_ = t
        for e in ((a, b_), (a, c_), (b_, c_)):
            for t2 in et[e]:
                if v not in t2 and t2 not in ring2_tris:
                    ring3_tris.add(t2)
    ring3 = {x for t in ring3_tris for x in t} - ring2 - ring1 - {v}
    return ring1, ring2, ring3


def _fan_windows(c: Complex2, center: int, max_len: int = 4):
    """Windows of up to max_len consecutive triangles around a vertex."""
    from .complex2 import link_cycle as _lc

    cyc = _lc(c, center)
    t = len(cyc)
    tris = [tuple(sorted((center, cyc[i], cyc[(i + 1) % t]))) for i in range(t)]
    for size in range(2, min(max_len, t) + 1):
        for s in range(t):
            if size == t:
                yield tris
                break
            yield [tris[(s + j) % t] for j in range(size)]


def avoidance_set(c: Complex2, v: int, assignment: dict[int, int],
                  mode: str | None) -> set[int]:
    """Location indices the new vertex must avoid under the given local
    injectivity mode (None restricts only against the link)."""
    if mode in ("C", "C'"):
        ring1, ring2, ring3 = _rings(c, v)
        verts = ring1 | ring2 if mode == "C'" else ring1 | ring2 | ring3
    elif mode == 'C"':
        verts = set()
        star = [t for t in c.triangles if v in t]
        link = {x for t in star for x in t} - {v}
        for center in {v} | link:
            for window in _fan_windows(c, center):
                if any(v in t for t in window):
                    verts.update(x for t in window for x in t)
        verts.discard(v)
    elif mode is None:
        verts = {x for t in c.triangles if v in t for x in t} - {v}
    else:
        raise PlacementError(f"unknown condition mode {mode!r}")
    return {assignment[w] for w in verts if w in assignment}


def check_condition_C(c: Complex2, assignment: dict[int, int],
                      mode: str | None) -> dict:
    """Verify local injectivity on every disc required by the mode."""
    if mode is None:
        return {"ok": True, "violating_disc": None}
    if mode == 'C"':
        for center in c.vertices:
            for window in _fan_windows(c, center):
                verts = sorted({x for t in window for x in t})
                vals = [assignment[x] for x in verts]
                if len(set(vals)) != len(vals):
                    return {"ok": False, "violating_disc": tuple(window)}
        return {"ok": True, "violating_disc": None}
    if mode not in ("C", "C'"):
        raise PlacementError(f"unknown condition mode {mode!r}")
    et = c.edge_triangles()
    neighbors: dict[tuple, set[tuple]] = {t: set() for t in c.triangles}
    for ts in et.values():
        if len(ts) == 2:
            neighbors[ts[0]].add(ts[1])
            neighbors[ts[1]].add(ts[0])
    seen = set()
    for t1, nbrs in neighbors.items():
        for t2 in nbrs:
            key = frozenset((t1, t2))
            if key in seen:
                continue
            seen.add(key)
            verts = sorted(set(t1) | set(t2))
            vals = [assignment[x] for x in verts]
            if len(set(vals)) != len(vals):
                return {"ok": False, "violating_disc": (t1, t2)}
    if mode == "C":
        seen3 = set()
        for mid, nbrs in neighbors.items():
            for t1, t3 in itertools.combinations(sorted(nbrs), 2):
                key = frozenset((t1, mid, t3))
                if key in seen3:
                    continue
                seen3.add(key)
                verts = sorted(set(t1) | set(mid) | set(t3))
                vals = [assignment[x] for x in verts]
                if len(set(vals)) != len(vals):
                    return {"ok": False, "violating_disc": (t1, mid, t3)}
    return {"ok": True, "violating_disc": None}


# ---------------------------------------------------------------------------
# the placement search


@dataclass(frozen=True)
class PlacementCertificate:
    rank: int
    required_rank: int
    condition_mode: str | None
    condition_ok: bool
    prime: int


@dataclass(frozen=True)
class PlacementResult:
    assignment: dict[int, int] = field(hash=False)
    certificate: PlacementCertificate = field(default=None)
    failure_counts: dict[int, int] = field(hash=False, default=None)

    @property
    def max_failures(self) -> int:
        return max(self.failure_counts.values(), default=0)


_STRATEGIES = {
    # max_degree, floor, condition mode, minimum |A|
    "sphere76": (5, 76, "C", 76),
    "surface": (6, 4, 'C"', None),
    "stacked": (3, 4, None, 4),
    "q10": (4, 4, "C'", 10),
}


def _full_rank_probe(edges, points, p) -> bool:
    cert = IncrementalCertificate.from_assignment(edges, points, p)
    return cert is not None


def place(c: Complex2, locations: LocationSet, strategy: str,
          seed: int = 0, max_retries: int = 8) -> PlacementResult:
    """Map the triangulation's vertices into the location set with a
    certified rigid result; see the module docstring for the engine.

    Ring avoidance keeps the local injectivity condition for discs around
    each inserted vertex, but a degree-5 (or 6) reinsertion shortens fans
    around the contraction target and can pull two earlier vertices into a
    common disc, which no choice for the new vertex can repair.  When the
    final condition check fails, the whole placement is retried with a
    reshuffled candidate order.
    """
    if strategy not in _STRATEGIES:
        raise PlacementError(f"unknown strategy {strategy!r}")
    max_degree, floor, mode, min_a = _STRATEGIES[strategy]
    _, report = build_and_validate(c.triangles_sorted())
    if not report.is_closed_surface:
        raise PlacementError(f"input is not a closed surface: {report.failure}")
    if strategy != "surface" and report.euler_characteristic != 2:
        raise PlacementError("strategy requires a sphere triangulation")
    if locations.dim != 3:
        raise PlacementError("placement needs 3-dimensional locations")
    if min_a is not None and locations.size < min_a:
        raise PlacementError(f"insufficient locations, need >= {min_a}")

    schedule = reduction_schedule(c, max_degree=max_degree, floor_size=floor)
    base = schedule.base
    if strategy in ("stacked", "q10") and base.n_vertices > 4:
        raise PlacementError(
            f"complex not reducible to K4 with degree <= {max_degree}")
    if base.n_vertices > locations.size:
        raise PlacementError(
            f"insufficient locations, need >= {base.n_vertices}")

    last_violation = None
    for retry in range(max_retries):
        p = exact_linalg.pick_prime(seed + retry)
        assignment = {v: i for i, v in enumerate(sorted(base.vertices))}
        points = {v: locations.points[i] for v, i in assignment.items()}
        cert = IncrementalCertificate.from_assignment(base.edges, points, p)
        if cert is None:
            raise PlacementError("location set not generic enough, resample")

        failure_counts: dict[int, int] = {}
        cur = base
        for step in reversed(schedule.steps):
            cur = vertex_split(cur, step)
            v = step.removed_vertex
            avoid = avoidance_set(cur, v, assignment, mode)
            ctx = cert.begin_insert(step)
            edges_next = set(cur.edges)
            failures = 0
            placed = False
            order = list(range(locations.size))
            if retry:
                # first-fit makes distant vertices pick identical values;
                # decorrelate per vertex when a condition retry is needed
                random.Random(f"{seed}:{retry}:{v}").shuffle(order)
            for idx in order:
                if idx in avoid:
                    continue
                attempt = cert.try_point(ctx, locations.points[idx])
                if attempt is None:
                    # escalate before counting: the minor test is a
                    # sufficient but row/column-specific check
                    trial_points = dict(cert.points)
                    trial_points[v] = locations.points[idx]
                    if _full_rank_probe(edges_next, trial_points, p):
                        cert = IncrementalCertificate.from_assignment(
                            edges_next, trial_points, p)
                        assignment[v] = idx
                        placed = True
                        break
                    failures += 1
                    continue
                cert.commit(ctx, attempt)
                assignment[v] = idx
                placed = True
                break
            failure_counts[v] = failures
            if not placed:
                raise PlacementError("location set not generic enough, resample")

        n = c.n_vertices
        required = 3 * n - 6
        assert cert.rank == required
        cond = check_condition_C(c, assignment, mode)
        if not cond["ok"]:
            last_violation = cond["violating_disc"]
            continue
        certificate = PlacementCertificate(
            rank=cert.rank, required_rank=required, condition_mode=mode,
            condition_ok=True, prime=p)
        return PlacementResult(assignment=dict(assignment),
                               certificate=certificate,
                               failure_counts=failure_counts)
    raise PlacementError(
        f"condition {mode} violated on {last_violation} "
        f"after {max_retries} attempts")


def certify_placement(c: Complex2, locations: LocationSet,
                      assignment: dict[int, int],
                      mode: str | None = "C", seed: int = 0) -> dict:
    """Independent re-certification from scratch (used by `verify`)."""
    placement = {v: tuple(Fraction(x) for x in locations.points[assignment[v]])
                 for v in c.vertices}
    fw = Framework.build(c.vertices, sorted(c.edges), 3, placement)
    res = is_infinitesimally_rigid(fw, seed=seed)
    cond = check_condition_C(c, assignment, mode)
    return {
        "rigid": res.rigid,
        "rank": fw.required_rank() if res.rigid else None,
        "required_rank": fw.required_rank(),
        "condition_mode": mode,
        "condition_ok": bool(cond["ok"]),
        "witness": res.witness,
        "degenerate_span": res.degenerate_span,
    }


def format_placement(result: PlacementResult) -> str:
    lines = [f"{v} {idx}" for v, idx in sorted(result.assignment.items())]
    cert = result.certificate
    lines.append(f"# rank: {cert.rank}/{cert.required_rank}")
    lines.append(f"# condition: {cert.condition_mode or 'none'} "
                 f"{'ok' if cert.condition_ok else 'violated'}")
    lines.append(f"# prime: {cert.prime}")
    return "\n".join(lines) + "\n"


def parse_assignment(text: str) -> dict[int, int]:
    out = {}
    for ln in text.splitlines():
        if not ln.strip() or ln.startswith("#"):
            continue
        v, idx = (int(x) for x in ln.split())
        out[v] = idx
    return out
