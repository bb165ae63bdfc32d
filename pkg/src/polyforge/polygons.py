"""Incidence geometries: projective planes, symplectic quadrangles and
the split Cayley hexagon, all as explicit bipartite incidence structures.

A polygon here is a point list, a line list (projective subspaces of
the ambient space) and the incidence between them.  Builders check the
defining axioms (element counts, regularity, girth 2n and diameter n of
the incidence graph) before returning; the hexagon builder additionally
verifies the structural properties its lines are known to satisfy and
aborts if any fails, so a mis-transcribed line condition cannot slip
through.
"""

import json
from dataclasses import dataclass

from .geometry import (
    EMPTY,
    GeometryError,
    Subspace,
    grassmann_index,
    hexagon_quadric,
    projective_space,
    standard_symplectic,
)
from .gf import field


class PolygonError(ValueError):
    pass


class IncidencePolygon:
    """A finite generalized polygon given by its point/line incidence."""

    def __init__(self, kind, gon, order, space, points, lines, line_points,
                 form=None, frame=None):
        self.kind = kind          # 'pg2' | 'w3' | 'hexagon' | 'plane'
        self.gon = gon            # girth of the incidence graph is 2*gon
        self.order = order        # (s, t): lines have s+1 points, points t+1 lines
        self.space = space
        self.points = list(points)          # coordinate tuples
        self.lines = list(lines)            # Subspace objects
        self.line_points = [tuple(lp) for lp in line_points]
        pl = [[] for _ in self.points]
        for li, lp in enumerate(self.line_points):
            for pi in lp:
                pl[pi].append(li)
        self.point_lines = [tuple(sorted(x)) for x in pl]
        self.point_id = {p: i for i, p in enumerate(self.points)}
        self.line_id = {l: i for i, l in enumerate(self.lines)}
        self.form = form          # symplectic/quadratic form, when relevant
        self.frame = frame        # basis rows identifying a plane inside a larger space

    @property
    def n_points(self):
        return len(self.points)

    @property
    def n_lines(self):
        return len(self.lines)

    @property
    def q(self):
        return self.space.q

    def incident(self, pi, li):
        return pi in self.line_points[li]

    def adjacency(self):
        """Incidence graph adjacency; vertices = points then lines."""
        np_ = self.n_points
        adj = [[np_ + li for li in self.point_lines[pi]] for pi in range(np_)]
        adj += [list(lp) for lp in self.line_points]
        return adj

    def collinear_set(self, pi):
        """Points collinear with point pi (pi excluded)."""
        out = set()
        for li in self.point_lines[pi]:
            out.update(self.line_points[li])
        out.discard(pi)
        return sorted(out)

    # -- serialization ------------------------------------------------

    def to_json(self):
        data = {
            "kind": self.kind,
            "gon": self.gon,
            "order": list(self.order),
            "q": self.space.q,
            "ambient": self.space.n,
            "points": [list(p) for p in self.points],
            "lines": [[list(r) for r in l.basis] for l in self.lines],
            "line_points": [list(lp) for lp in self.line_points],
        }
        if self.frame is not None:
            data["frame"] = [list(r) for r in self.frame]
        return json.dumps(data, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        space = projective_space(data["ambient"], data["q"])
        points = [tuple(p) for p in data["points"]]
        lines = [Subspace(l) for l in data["lines"]]
        form = None
        if data["kind"] == "w3":
            form = standard_symplectic(space)
        elif data["kind"] == "hexagon":
            form = hexagon_quadric(space)
        frame = tuple(tuple(r) for r in data["frame"]) if "frame" in data else None
        return cls(data["kind"], data["gon"], tuple(data["order"]), space,
                   points, lines, data["line_points"], form=form, frame=frame)


# ---------------------------------------------------------------------
# incidence graph metrics
# ---------------------------------------------------------------------

INF = float("inf")


def _bfs(adj, src):
    dist = [-1] * len(adj)
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            du = dist[u] + 1
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = du
                    nxt.append(w)
        frontier = nxt
    return dist

def _shortest_cycle_through(adj, src):
    # BFS; a non-tree edge at depths (d1, d2) closes a cycle of length
    # d1 + d2 + 1.  Minimizing over all sources gives the exact girth.
    dist = {src: 0}
    parent = {src: -1}
    best = INF
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w == parent[u]:
                    continue
                if w in dist:
                    c = dist[u] + dist[w] + 1
                    if c < best:
                        best = c
                else:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    nxt.append(w)
        frontier = nxt
    return best


@dataclass
class GraphMetrics:
    girth: float
    diameter: float
    degree_histogram: dict


def graph_metrics(adj):
    """Girth, diameter and degree histogram of a simple graph."""
    n = len(adj)
    hist = {}
    for nbrs in adj:
        hist[len(nbrs)] = hist.get(len(nbrs), 0) + 1
    girth = INF
    diameter = 0
    for v in range(n):
        c = _shortest_cycle_through(adj, v)
        if c < girth:
            girth = c
        dist = _bfs(adj, v)
        if min(dist) < 0:
            diameter = INF
        elif diameter != INF:
            diameter = max(diameter, max(dist))
    return GraphMetrics(girth=girth, diameter=diameter, degree_histogram=hist)


def verify_polygon(poly):
    """Check the generalized-polygon axioms; returns a report dict."""
    n = poly.gon
    s, t = poly.order
    q = poly.q
    expected = {
        3: (q * q + q + 1, q * q + q + 1),
        4: ((q + 1) * (q * q + 1), (q + 1) * (q * q + 1)),
        6: ((q + 1) * (q ** 4 + q * q + 1), (q + 1) * (q ** 4 + q * q + 1)),
    }[n]
    report = {
        "kind": poly.kind, "q": q, "gon": n,
        "n_points": poly.n_points, "n_lines": poly.n_lines,
        "expected_points": expected[0], "expected_lines": expected[1],
    }
    ok = poly.n_points == expected[0] and poly.n_lines == expected[1]
    ok &= all(len(lp) == s + 1 for lp in poly.line_points)
    ok &= all(len(pl) == t + 1 for pl in poly.point_lines)
    m = graph_metrics(poly.adjacency())
    report["girth"] = m.girth
    report["diameter"] = m.diameter
    ok &= m.girth == 2 * n and m.diameter == n
    report["valid"] = bool(ok)
    return report


# ---------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------


def build_pg2(q):
    """The projective plane PG(2, q) with all its points and lines."""
    sp = projective_space(2, q)
    lines = []
    line_points = []
    for d in sp.points:  # lines indexed by their dual points
        lines.append(sp.kernel([d]))
        line_points.append(tuple(i for i, p in enumerate(sp.points)
                                 if sp.dot(p, d) == 0))
    return IncidencePolygon("pg2", 3, (q, q), sp, sp.points, lines, line_points,
                            frame=((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def embedded_plane(space, pi):
    """The plane geometry of a plane subspace pi of an ambient space.

    Points and lines are the ones of pi, kept in ambient coordinates;
    ``frame`` records the basis used to coordinatize pi as PG(2, q).
    """
    if pi.dim != 2:
        raise GeometryError("embedded_plane needs a plane")
    q = space.q
    ab = projective_space(2, q)
    frame = pi.basis
    def lift(v):
        return space.canonicalize(space.vec_mat(v, frame))
    points = [lift(v) for v in ab.points]
    pid = {p: i for i, p in enumerate(points)}
    lines = []
    line_points = []
    for d in ab.points:
        K = ab.kernel([d])  # a line of the abstract plane
        rows = [lift(r) for r in K.basis]
        lines.append(space.span(rows))
        line_points.append(tuple(sorted(
            pid[lift(p)] for p in ab.subspace_points(K))))
    return IncidencePolygon("plane", 3, (q, q), space, points, lines,
                            line_points, frame=frame)


def build_w3(q):
    """The symplectic quadrangle W(3, q): totally isotropic points/lines.

    Every point of PG(3, q) is isotropic for an alternating form, so
    the quadrangle keeps them all; its lines are the lines on which the
    form vanishes identically.  The incidence graph coincides with the
    one of the orthogonal quadrangle on Q(4, q), by duality.
    """
    sp = projective_space(3, q)
    form = standard_symplectic(sp)
    seen = {}
    npts = sp.n_points
    for i in range(npts):
        u = sp.points[i]
        for j in range(i + 1, npts):
            v = sp.points[j]
            if form.eval(u, v) == 0:
                L = sp.line_through(u, v)
                if L not in seen:
                    seen[L] = set()
                seen[L].update((i, j))
    lines = sorted(seen, key=lambda L: L.basis)
    line_points = [tuple(sorted(seen[L])) for L in lines]
    poly = IncidencePolygon("w3", 4, (q, q), sp, sp.points, lines, line_points,
                            form=form)
    rep = verify_polygon(poly)
    if not rep["valid"]:
        raise PolygonError(f"W(3,{q}) failed axioms: {rep}")
    return poly


# -- split Cayley hexagon ----------------------------------------------

# A line of the quadric, with Grassmann coordinates p_ij, belongs to
# the hexagon iff:  p12 = p34,  p54 = p32,  p20 = p35,  p65 = p30,
# p01 = p36,  p46 = p31   (indices with i > j meaning -p_ji).
_HEX_CONDITIONS = (
    ((1, 2, 1), (3, 4, 1)),
    ((4, 5, -1), (2, 3, -1)),
    ((0, 2, -1), (3, 5, 1)),
    ((5, 6, -1), (0, 3, -1)),
    ((0, 1, 1), (3, 6, 1)),
    ((4, 6, 1), (1, 3, -1)),
)


def _hexagon_line_test(sp, F):
    idx = {}
    for i in range(7):
        for j in range(i + 1, 7):
            idx[(i, j)] = grassmann_index(6, i, j)

    def signed(pl, i, j, sgn):
        v = pl[idx[(i, j)]]
        return v if sgn > 0 else F.neg(v)

    def test(pl):
        for (i1, j1, s1), (i2, j2, s2) in _HEX_CONDITIONS:
            if signed(pl, i1, j1, s1) != signed(pl, i2, j2, s2):
                return False
        return True

    return test


@dataclass
class HexagonAnnotations:
    """Companion data for a built hexagon.

    All masks are ints indexed by hexagon point ids (bit i = point i).
    """
    quadric_lines: list          # every totally singular line of Q(6, q)
    quadric_line_points: list    # point-id tuples, parallel to quadric_lines
    hexagon_line_ids: tuple      # indices into quadric_lines that are hexagon lines
    ideal_lines: tuple           # quadric-line ids that are NOT hexagon lines
    planes: list                 # every totally singular plane (Subspace)
    plane_points: list           # point-id tuples, parallel to planes
    plane_center: list           # hexagon point id whose lines span the plane, or None
    point_plane: list            # per point: id of its hexagon plane
    ideal_plane_ids: tuple
    ideal_line_plane: dict       # ideal quadric-line id -> its unique hexagon plane id
    perp_masks: list             # per point: quadric-collinearity mask (self included)
    gamma2_masks: list           # per point: hexagon-collinearity mask (self excluded)
    point_masks: dict            # cache: Subspace -> mask of hexagon points inside


def build_hexagon(q, deep_checks=True):
    """The split Cayley hexagon of order q inside the fixed Q(6, q).

    Points are all singular points; lines are the totally singular
    lines whose Grassmann coordinates satisfy six fixed linear
    conditions.  The defining axioms and the structural properties
    used downstream are verified here, and the builder raises if any
    fails.  ``deep_checks=False`` skips only the most expensive
    property sweeps (useful while exploring; the test suite always
    runs them).
    """
    sp = projective_space(6, q)
    quad = hexagon_quadric(sp)
    F = sp.field

    sing = [i for i, p in enumerate(sp.points) if quad.eval(p) == 0]
    points = [sp.points[i] for i in sing]
    pid = {p: i for i, p in enumerate(points)}
    npts = len(points)

    # quadric-collinearity masks (perp of each point, restricted to Q)
    perp_masks = []
    for i in range(npts):
        u = points[i]
        m = 0
        for j in range(npts):
            if quad.bilinear(u, points[j]) == 0:
                m |= 1 << j
        perp_masks.append(m)

    # all totally singular lines
    seen = {}
    for i in range(npts):
        mi = perp_masks[i] >> (i + 1)
        u = points[i]
        j = i + 1
        while mi:
            if mi & 1:
                L = sp.line_through(u, points[j])
                if L not in seen:
                    seen[L] = None
            mi >>= 1
            j += 1
    quadric_lines = sorted(seen, key=lambda L: L.basis)
    quadric_line_points = []
    for L in quadric_lines:
        quadric_line_points.append(tuple(sorted(
            pid[p] for p in sp.subspace_points(L))))

    test = _hexagon_line_test(sp, F)
    hex_ids = tuple(k for k, L in enumerate(quadric_lines)
                    if test(sp.plucker(L)))
    ideal_ids = tuple(k for k in range(len(quadric_lines)) if k not in set(hex_ids))

    lines = [quadric_lines[k] for k in hex_ids]
    line_points = [quadric_line_points[k] for k in hex_ids]
    poly = IncidencePolygon("hexagon", 6, (q, q), sp, points, lines, line_points,
                            form=quad)

    rep = verify_polygon(poly)
    if not rep["valid"]:
        raise PolygonError(f"hexagon H({q}) failed axioms: {rep}")

    ann = _annotate_hexagon(poly, quad, quadric_lines, quadric_line_points,
                            hex_ids, ideal_ids, perp_masks, deep_checks)
    return poly, ann


def _annotate_hexagon(poly, quad, quadric_lines, quadric_line_points,
                      hex_ids, ideal_ids, perp_masks, deep_checks):
    sp = poly.space
    q = poly.q
    npts = poly.n_points
    pid = poly.point_id

    gamma2 = []
    for i in range(npts):
        m = 0
        for li in poly.point_lines[i]:
            for j in poly.line_points[li]:
                m |= 1 << j
        gamma2.append(m & ~(1 << i))

    # the plane on each point: span of its q+1 hexagon lines
    point_plane_sub = []
    for i in range(npts):
        S = sp.span([poly.lines[li] for li in poly.point_lines[i]])
        if S.dim != 2 or not quad.is_singular_subspace(S):
            raise PolygonError("hexagon lines on a point do not span a singular plane")
        point_plane_sub.append(S)

    # every totally singular plane, via the q+1 planes on each line
    line_masks = []
    for lp in quadric_line_points:
        m = 0
        for j in lp:
            m |= 1 << j
        line_masks.append(m)
    planes_seen = {}
    for k, L in enumerate(quadric_lines):
        u, v = quadric_line_points[k][0], quadric_line_points[k][1]
        cand = perp_masks[u] & perp_masks[v] & ~line_masks[k]
        j = 0
        m = cand
        while m:
            if m & 1:
                P = sp.span([L, poly.points[j]])
                if P not in planes_seen:
                    planes_seen[P] = None
            m >>= 1
            j += 1
    planes = sorted(planes_seen, key=lambda P: P.basis)
    plane_id = {P: i for i, P in enumerate(planes)}
    plane_points = []
    plane_masks = []
    for P in planes:
        pts = tuple(sorted(pid[p] for p in sp.subspace_points(P)))
        plane_points.append(pts)
        m = 0
        for j in pts:
            m |= 1 << j
        plane_masks.append(m)

    expected_planes = (q + 1) * (q * q + 1) * (q ** 3 + 1)
    if len(planes) != expected_planes:
        raise PolygonError(
            f"expected {expected_planes} singular planes, found {len(planes)}")

    point_plane = []
    plane_center = [None] * len(planes)
    for i in range(npts):
        k = plane_id.get(point_plane_sub[i])
        if k is None:
            raise PolygonError("hexagon plane missing from plane census")
        point_plane.append(k)
        plane_center[k] = i
    hex_plane_ids = set(point_plane)
    if len(hex_plane_ids) != npts:
        raise PolygonError("hexagon planes are not in bijection with points")
    ideal_plane_ids = tuple(k for k in range(len(planes)) if k not in hex_plane_ids)

    # hexagon lines inside each plane: either q+1 (hexagon plane, all
    # through its center) or none (ideal plane)
    hexline_mask_of_plane = [0] * len(planes)
    hexset = set(hex_ids)
    for k, P in enumerate(planes):
        cnt = 0
        pm = plane_masks[k]
        found = []
        for j in plane_points[k]:
            for li in poly.point_lines[j]:
                lm = line_masks[hex_ids[li]]
                if lm & pm == lm:
                    found.append(li)
        found = set(found)
        if plane_center[k] is None:
            if found:
                raise PolygonError("ideal plane contains a hexagon line")
        else:
            c = plane_center[k]
            if found != set(poly.point_lines[c]):
                raise PolygonError("hexagon plane carries unexpected hexagon lines")

    # each hexagon line lies on q+1 planes, all of them hexagon planes;
    # each ideal line lies on q+1 planes, exactly one a hexagon plane
    planes_by_line = {}
    for k in range(len(planes)):
        pm = plane_masks[k]
        for lk in range(len(quadric_lines)):
            if line_masks[lk] & pm == line_masks[lk]:
                planes_by_line.setdefault(lk, []).append(k)
    ideal_line_plane = {}
    for lk in range(len(quadric_lines)):
        pls = planes_by_line.get(lk, [])
        if len(pls) != q + 1:
            raise PolygonError("quadric line not on q+1 singular planes")
        hexcount = sum(1 for k in pls if plane_center[k] is not None)
        if lk in hexset:
            if hexcount != q + 1:
                raise PolygonError("hexagon line on a non-hexagon plane")
        else:
            if hexcount != 1:
                raise PolygonError("ideal line not on exactly one hexagon plane")
            ideal_line_plane[lk] = next(k for k in pls if plane_center[k] is not None)

    if deep_checks:
        # distance-<=4 balls agree with quadric collinearity
        adj = poly.adjacency()
        step = max(1, npts // 64) if q > 2 else 1
        for i in range(0, npts, step):
            dist = _bfs(adj, i)
            ball = 0
            for j in range(npts):
                if dist[j] <= 4:
                    ball |= 1 << j
            if ball != perp_masks[i]:
                raise PolygonError("distance-4 ball differs from perp on Q")

    return HexagonAnnotations(
        quadric_lines=quadric_lines,
        quadric_line_points=quadric_line_points,
        hexagon_line_ids=hex_ids,
        ideal_lines=ideal_ids,
        planes=planes,
        plane_points=plane_points,
        plane_center=plane_center,
        point_plane=point_plane,
        ideal_plane_ids=ideal_plane_ids,
        ideal_line_plane=ideal_line_plane,
        perp_masks=perp_masks,
        gamma2_masks=gamma2,
        point_masks={},
    )


def build_polygon(kind, q):
    """Uniform entry point used by the CLI."""
    if kind == "pg2":
        poly = build_pg2(q)
        rep = verify_polygon(poly)
        if not rep["valid"]:
            raise PolygonError(f"PG(2,{q}) failed axioms: {rep}")
        return poly
    if kind == "w3":
        return build_w3(q)
    if kind == "hexagon":
        return build_hexagon(q)[0]
    raise PolygonError(f"unknown polygon kind {kind!r}")
