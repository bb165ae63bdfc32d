"""Builders and verifiers for t-good structures.

A t-good structure of a generalized polygon is a point set and a line
set chosen so that every point left outside lies on exactly t chosen
lines and every line left outside carries exactly t chosen points.
Deleting the chosen elements from the incidence graph leaves a
(q + 1 - t)-regular induced subgraph with the girth of the host, so
large t-good structures certify small regular subgraphs and feed the
cage-style bounds in :mod:`polyforge.spectral`.

Three families are built here:

* the three 1-good structures of a projective plane (a line with the
  pencil of an incident point, the same with a detached point, and the
  subfield subplane of square order with its extended lines);
* their lift into the symplectic quadrangle through the perp plane of
  a base point;
* the hexagon family cut out by a 4-space of the ambient 6-space
  together with a base point on its quadric section.  The size of the
  result depends only on how the section meets the quadric and where
  the base point sits, and ``classify_case`` predicts every count from
  that type data alone; ``hexagon_good`` recounts everything directly
  so the two routes can be compared pair by pair.
"""

import json
import random
from dataclasses import dataclass, fields
from itertools import combinations
from math import isqrt

from .geometry import classify_section, projective_space
from .polygons import INF, _shortest_cycle_through, embedded_plane


class ConstructionError(ValueError):
    pass


# ---------------------------------------------------------------------
# the structure object and its verifier
# ---------------------------------------------------------------------


class GoodStructure:
    """A chosen point set and line set of a host polygon.

    Ids index the host's point and line lists.  This is plain data;
    ``verify_tgood`` does the actual checking.
    """

    def __init__(self, host, t, point_ids, line_ids, provenance=None):
        self.host = host
        self.t = t
        self.point_ids = tuple(sorted(set(point_ids)))
        self.line_ids = tuple(sorted(set(line_ids)))
        self.provenance = dict(provenance) if provenance else {}
        if self.point_ids and not (0 <= self.point_ids[0]
                                   and self.point_ids[-1] < host.n_points):
            raise ConstructionError("point id out of range for the host")
        if self.line_ids and not (0 <= self.line_ids[0]
                                  and self.line_ids[-1] < host.n_lines):
            raise ConstructionError("line id out of range for the host")

    @property
    def size(self):
        """Number of chosen points (equals chosen lines when valid)."""
        return len(self.point_ids)

    def __repr__(self):
        return (f"GoodStructure(t={self.t}, points={len(self.point_ids)}, "
                f"lines={len(self.line_ids)}, host={self.host.kind!r})")

    # -- serialization ------------------------------------------------

    def to_json(self):
        data = {
            "host": {"kind": self.host.kind, "q": self.host.q,
                     "points": self.host.n_points, "lines": self.host.n_lines},
            "t": self.t,
            "point_ids": list(self.point_ids),
            "line_ids": list(self.line_ids),
            "provenance": self.provenance,
        }
        return json.dumps(data, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text, host):
        data = json.loads(text)
        hd = data["host"]
        if (hd["kind"], hd["q"], hd["points"], hd["lines"]) != \
                (host.kind, host.q, host.n_points, host.n_lines):
            raise ConstructionError("structure was saved for a different host")
        return cls(host, data["t"], data["point_ids"], data["line_ids"],
                   data.get("provenance"))


def verify_tgood(struct, girth=True):
    """Exhaustively check the two defining conditions of a t-good structure.

    The report also covers the complement subgraph: the degrees seen
    on it (q + 1 - t everywhere exactly when the structure is valid)
    and, unless ``girth`` is switched off to save time, its girth.
    Failures are report entries, never exceptions.
    """
    host, t = struct.host, struct.t
    pset, lset = set(struct.point_ids), set(struct.line_ids)

    bad_points = []
    for pi in range(host.n_points):
        if pi in pset:
            continue
        c = sum(1 for li in host.point_lines[pi] if li in lset)
        if c != t:
            bad_points.append((pi, c))
    bad_lines = []
    for li in range(host.n_lines):
        if li in lset:
            continue
        c = sum(1 for pi in host.line_points[li] if pi in pset)
        if c != t:
            bad_lines.append((li, c))

    comp_points = [pi for pi in range(host.n_points) if pi not in pset]
    comp_lines = [li for li in range(host.n_lines) if li not in lset]
    pmap = {pi: v for v, pi in enumerate(comp_points)}
    adj = [[] for _ in range(len(comp_points) + len(comp_lines))]
    for v, li in enumerate(comp_lines):
        lv = len(comp_points) + v
        for pi in host.line_points[li]:
            pv = pmap.get(pi)
            if pv is not None:
                adj[pv].append(lv)
                adj[lv].append(pv)
    degrees = sorted({len(nbrs) for nbrs in adj})

    comp_girth = None
    if girth and any(adj):
        g = min(_shortest_cycle_through(adj, v) for v in range(len(adj)))
        comp_girth = None if g == INF else int(g)

    return {
        "host": host.kind,
        "q": host.q,
        "t": t,
        "points": len(pset),
        "lines": len(lset),
        "size": len(pset),
        "sizes_equal": len(pset) == len(lset),
        "point_failures": len(bad_points),
        "line_failures": len(bad_lines),
        "failed_points": bad_points[:16],
        "failed_lines": bad_lines[:16],
        "full": not comp_points and not comp_lines,
        "complement_points": len(comp_points),
        "complement_lines": len(comp_lines),
        "complement_degrees": degrees,
        "complement_regular": len(degrees) <= 1,
        "expected_degree": host.order[1] + 1 - t,
        "complement_girth": comp_girth,
        "valid": not bad_points and not bad_lines,
    }


# ---------------------------------------------------------------------
# projective plane structures
# ---------------------------------------------------------------------


def planar_one_good(plane, kind, point=None, line=None):
    """One of the three 1-good structures of a projective plane.

    ``point-on-line``: the q+1 points of a line and the pencil of an
    incident point.  ``point-off-line``: a line's points plus a point
    off it; the extra point's pencil plus the line itself.  ``baer``:
    the subfield subplane of square order with its extended lines.
    Anchors default to the lowest ids; the subplane is the canonical
    subfield one.
    """
    if plane.gon != 3:
        raise ConstructionError("planar structures need a projective plane")
    if kind == "point-on-line":
        if point is None:
            point = plane.line_points[line][0] if line is not None else 0
        if line is None:
            line = plane.point_lines[point][0]
        if point not in plane.line_points[line]:
            raise ConstructionError("anchor point must lie on the anchor line")
        pts = set(plane.line_points[line])
        lns = set(plane.point_lines[point])
        prov = {"construction": "planar", "kind": kind,
                "point": point, "line": line}
    elif kind == "point-off-line":
        if point is None:
            point = 0
        if line is None:
            line = next(li for li in range(plane.n_lines)
                        if point not in plane.line_points[li])
        if point in plane.line_points[line]:
            raise ConstructionError("anchor point must avoid the anchor line")
        pts = set(plane.line_points[line]) | {point}
        lns = set(plane.point_lines[point]) | {line}
        prov = {"construction": "planar", "kind": kind,
                "point": point, "line": line}
    elif kind == "baer":
        ids = _subfield_subplane_ids(plane.q)
        pts = set(ids)
        lns = set(ids)  # lines are enumerated by their dual points
        prov = {"construction": "planar", "kind": kind}
    else:
        raise ConstructionError(f"unknown planar structure kind {kind!r}")
    return GoodStructure(plane, 1, pts, lns, prov)


def _subfield_subplane_ids(q):
    # Plane builders enumerate points (and lines, via dual points) in
    # the canonical order of PG(2, q), so the subplane over the
    # square-root subfield is the same id set on both sides.
    ab = projective_space(2, q)
    F = ab.field
    if F.e % 2:
        raise ConstructionError(
            "a subplane of square-root order needs a square q")
    sub = set(F.subfield(F.e // 2))
    ids = [i for i, p in enumerate(ab.points) if all(c in sub for c in p)]
    r = isqrt(q)
    if len(ids) != q + r + 1:  # pragma: no cover - subfield is closed
        raise ConstructionError("subfield subplane has the wrong size")
    return ids


def subfield_subplanes(plane):
    """Every subplane of square-root order, as (point ids, line ids).

    Purely combinatorial: four points in general position close up,
    under joining and meeting, to the subplane they coordinatize over
    the prime field, and that subplane has square-root order exactly
    when q is the square of a prime (the only case accepted here).
    Lines are reported by id, so the result plugs straight into
    GoodStructure regardless of how the host enumerates its lines.
    """
    if plane.gon != 3:
        raise ConstructionError("subplane enumeration needs a projective plane")
    q = plane.q
    r = isqrt(q)
    if r * r != q or r < 2 or any(r % d == 0 for d in range(2, r)):
        raise ConstructionError(
            "subplane enumeration needs q to be the square of a prime")
    line_sets = [frozenset(pts) for pts in plane.line_points]
    join = {}
    for li, pts in enumerate(plane.line_points):
        for a, b in combinations(pts, 2):
            join[a, b] = join[b, a] = li

    def closure(quad):
        pts = set(quad)
        while True:
            lns = {join[a, b] for a, b in combinations(sorted(pts), 2)}
            grown = set()
            for l1, l2 in combinations(sorted(lns), 2):
                grown |= line_sets[l1] & line_sets[l2]
            if grown <= pts:
                return frozenset(pts), frozenset(lns)
            pts |= grown

    subs = []
    for quad in combinations(range(plane.n_points), 4):
        a, b, c, d = quad
        if (c in line_sets[join[a, b]] or d in line_sets[join[a, b]]
                or d in line_sets[join[a, c]] or d in line_sets[join[b, c]]):
            continue
        qset = set(quad)
        if any(qset <= pts for pts, _ in subs):
            continue
        pts, lns = closure(quad)
        if len(pts) != q + r + 1 or len(lns) != q + r + 1:
            raise ConstructionError("quadrangle closure is not a subplane")
        subs.append((pts, lns))
    return sorted((tuple(sorted(p)), tuple(sorted(l))) for p, l in subs)


# ---------------------------------------------------------------------
# the lift into the symplectic quadrangle
# ---------------------------------------------------------------------


def perp_plane(w, point_id):
    """The perp of a quadrangle point as a plane geometry.

    All quadrangle points collinear with the point lie on this plane,
    but the plane geometry keeps every line of the plane, isotropic or
    not; planar structures to be lifted live here.
    """
    if w.kind != "w3":
        raise ConstructionError("perp_plane expects the symplectic quadrangle")
    pi = w.form.perp(w.points[point_id])
    return embedded_plane(w.space, pi)


def lift_w3(w, point_id, planar):
    """Lift a 1-good structure of a point's perp plane to the quadrangle.

    The chosen lines are the pencil of the base point plus every
    quadrangle line whose trace on the plane is a chosen plane point;
    the chosen points are the base point, the chosen plane points, and
    every point whose perp cuts the plane in a chosen plane line.
    """
    if w.kind != "w3":
        raise ConstructionError("lift_w3 expects the symplectic quadrangle")
    sp = w.space
    P = w.points[point_id]
    pi = w.form.perp(P)
    host = planar.host
    if host.kind != "plane" or host.frame is None \
            or sp.span(host.frame) != pi:
        raise ConstructionError(
            "the planar structure must live in the perp plane of the base point")
    if planar.t != 1:
        raise ConstructionError("only 1-good planar structures lift")
    rep = verify_tgood(planar, girth=False)
    if not rep["valid"]:
        raise ConstructionError("planar structure fails its own verification")

    chosen_pts = {host.points[i] for i in planar.point_ids}
    chosen_lns = {host.lines[i] for i in planar.line_ids}

    pts = {point_id}
    pts.update(w.point_id[p] for p in chosen_pts)
    for xi in range(w.n_points):
        if xi == point_id:
            continue
        if sp.meet(w.form.perp(w.points[xi]), pi) in chosen_lns:
            pts.add(xi)

    lns = set(w.point_lines[point_id])
    for li, L in enumerate(w.lines):
        if point_id in w.line_points[li]:
            continue
        trace = sp.meet(L, pi)
        if trace.dim == 0 and trace.basis[0] in chosen_pts:
            lns.add(li)

    q = w.q
    base_inside = host.point_id[P] in set(planar.point_ids)
    expected = q * planar.size + (1 if base_inside else q + 1)
    if len(pts) != expected or len(lns) != expected:
        raise ConstructionError("lift size does not match the counting formula")
    prov = {"construction": "quadrangle-lift", "base_point": point_id,
            "base_inside": base_inside, "planar": planar.provenance}
    return GoodStructure(w, 1, pts, lns, prov)


def lift_sizes(q):
    """All sizes the quadrangle lift can reach for a given order."""
    planar = [q + 1, q + 2]
    r = isqrt(q)
    if r * r == q:
        planar.append(q + r + 1)
    out = set()
    for s in planar:
        out.add(q * s + 1)      # base point chosen in the plane structure
        out.add(q * s + q + 1)  # base point left out
    return sorted(out)


# ---------------------------------------------------------------------
# hexagon structures from a 4-space section
# ---------------------------------------------------------------------

# Section types of a 4-space, by its quadric section and its hexagon
# content: a nondegenerate section; a cone over an elliptic 3-space
# quadric; a cone over a hyperbolic one, split by whether the vertex's
# hexagon plane lies inside the section; and a cone over a conic,
# split by whether the vertex line is a hexagon line.
SECTION_CASES = ("parabolic", "cone-elliptic", "cone-hyperbolic-plane",
                 "cone-hyperbolic-line", "cone-ideal-line",
                 "cone-hexagon-line")


@dataclass
class SectionInfo:
    """Type data of a 4-space relative to the hexagon."""
    case: str
    vertex: object       # Subspace; empty for the parabolic case
    section_points: int  # hexagon points in the section
    section_lines: int   # hexagon lines inside the section


@dataclass
class HexCaseReport:
    """Counts for one (section, base point) choice.

    ``overlap`` decomposes as (q + 1) + trace_crossers + far_links
    whenever the base plane is not covered, where the trace is the
    line (or point) the base point's plane cuts on the section.
    """
    case: str
    trace_dim: int              # dim of (base plane meet section): 0, 1 or 2
    base_in_vertex_plane: bool | None   # hyperbolic cones only
    base_plane_covered: bool    # every line meeting the base plane meets S
    section_points: int         # hexagon points in the section
    section_lines: int          # hexagon lines inside the section
    lines_meeting_section: int
    lines_meeting_base_plane: int
    overlap: int
    trace_crossers: int | None  # overlap lines crossing the trace off-base
    far_links: int | None       # overlap lines reached from far section points
    ideal_through_base: int | None  # ideal lines on the base inside the section

    @property
    def size(self):
        """Chosen line count: both line families minus their overlap."""
        return (self.lines_meeting_section + self.lines_meeting_base_plane
                - self.overlap)


def _family(case):
    if case.startswith("cone-hyperbolic"):
        return "cone-hyperbolic"
    if case in ("cone-ideal-line", "cone-hexagon-line"):
        return "cone-line"
    return case


def section_case(hexp, ann, S):
    """Classify a 4-space by its quadric section and hexagon content."""
    sp, quad, q = hexp.space, hexp.form, hexp.q
    cls = classify_section(quad, S)
    if cls.tag == "parabolic":
        return SectionInfo("parabolic", cls.vertex,
                           q**3 + q*q + q + 1, q + 1)
    if cls.tag == "cone-point":
        if cls.base == "elliptic":
            return SectionInfo("cone-elliptic", cls.vertex,
                               q**3 + q + 1, 1)
        v_id = hexp.point_id[cls.vertex.basis[0]]
        vertex_plane = ann.planes[ann.point_plane[v_id]]
        inside = sp.subspace_le(vertex_plane, S)
        case = "cone-hyperbolic-plane" if inside else "cone-hyperbolic-line"
        return SectionInfo(case, cls.vertex, q**3 + 2*q*q + q + 1,
                           (q + 1) ** 2 if inside else 2*q + 1)
    # vertex is a line; the section is a cone over a conic
    case = ("cone-hexagon-line" if cls.vertex in hexp.line_id
            else "cone-ideal-line")
    return SectionInfo(case, cls.vertex, q**3 + q*q + q + 1,
                       q*q + q + 1 if case == "cone-hexagon-line" else q + 1)


def _overlap_parts(family, trace_dim, in_vertex_plane, q):
    # (trace_crossers, ideal_through_base, far_links) per counting row
    if family == "parabolic":
        if trace_dim == 1:
            return q*q, q, q*q
        return 0, q + 1, q*q + q
    if family == "cone-elliptic":
        if trace_dim == 1:
            return q*q, 0, 0
        return 0, 1, q
    if family == "cone-hyperbolic":
        if trace_dim == 0:
            return 0, 2*q + 1, 2*q*q + q
        if in_vertex_plane:
            return q*q, 0, 0
        return q*q, 2*q, q*q
    if family == "cone-line":
        if trace_dim == 1:
            return q*q, 0, 0
        return 0, q + 1, q*q + q
    raise ConstructionError(f"no counting row for section family {family!r}")


def classify_case(hexp, ann, S, base_id, info=None):
    """Predict every count for a base point from the section type alone."""
    sp, quad, q = hexp.space, hexp.form, hexp.q
    if S.dim != 4:
        raise ConstructionError("the section must be a 4-space")
    A = hexp.points[base_id]
    if not sp.contains(S, A):
        raise ConstructionError("base point must lie in the section")
    if info is None:
        info = section_case(hexp, ann, S)

    base_plane = ann.planes[ann.point_plane[base_id]]
    trace_dim = sp.meet(base_plane, S).dim
    in_tangent = all(quad.bilinear(A, r) == 0 for r in S.basis)
    family = _family(info.case)
    in_vplane = None
    if family == "cone-hyperbolic":
        v_id = hexp.point_id[info.vertex.basis[0]]
        in_vplane = base_id in ann.plane_points[ann.point_plane[v_id]]

    l2 = q**3 + q*q + q + 1
    l1 = info.section_points * (q + 1) - info.section_lines * q
    if trace_dim == 2 or in_tangent:
        return HexCaseReport(info.case, trace_dim, in_vplane, True,
                             info.section_points, info.section_lines,
                             l1, l2, l2, None, None, None)
    alpha, gamma, beta = _overlap_parts(family, trace_dim, in_vplane, q)
    if trace_dim != 0:
        # only the trace-0 rows tie far_links to the ideal-line count
        # (far_links = q * ideal_through_base); no prediction otherwise
        gamma = None
    return HexCaseReport(info.case, trace_dim, in_vplane, False,
                         info.section_points, info.section_lines,
                         l1, l2, q + 1 + alpha + beta, alpha, beta, gamma)


# -- direct computation ------------------------------------------------


def _mask_of(ids):
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def _mask_ids(m):
    out = []
    while m:
        b = m & -m
        out.append(b.bit_length() - 1)
        m ^= b
    return out


def _section_mask(hexp, ann, S):
    """Bitmask of hexagon points inside a subspace (cached on ann)."""
    m = ann.point_masks.get(S)
    if m is None:
        sp, quad = hexp.space, hexp.form
        m = 0
        for p in sp.subspace_points(S):
            if quad.eval(p) == 0:
                m |= 1 << hexp.point_id[p]
        ann.point_masks[S] = m
    return m


def _hex_line_masks(hexp, ann):
    masks = getattr(ann, "_hex_line_masks", None)
    if masks is None:
        masks = [_mask_of(lp) for lp in hexp.line_points]
        ann._hex_line_masks = masks
    return masks


def _ideal_masks_by_point(hexp, ann):
    table = getattr(ann, "_ideal_by_point", None)
    if table is None:
        table = [[] for _ in range(hexp.n_points)]
        for lk in ann.ideal_lines:
            lp = ann.quadric_line_points[lk]
            m = _mask_of(lp)
            for pj in lp:
                table[pj].append(m)
        ann._ideal_by_point = table
    return table


def _section_lines(hexp, ann, S):
    """Line ids meeting the section, and how many lie fully inside."""
    cache = getattr(ann, "_section_line_cache", None)
    if cache is None:
        cache = {}
        ann._section_line_cache = cache
    hit = cache.get(S)
    if hit is None:
        smask = _section_mask(hexp, ann, S)
        meeting = set()
        inside = 0
        for li, lm in enumerate(_hex_line_masks(hexp, ann)):
            if lm & smask:
                meeting.add(li)
                if lm & smask == lm:
                    inside += 1
        hit = (frozenset(meeting), inside)
        cache[S] = hit
    return hit


def _plane_line_ids(hexp, ann, plane_id):
    """Hexagon line ids meeting a given singular plane (cached)."""
    cache = getattr(ann, "_plane_line_cache", None)
    if cache is None:
        cache = {}
        ann._plane_line_cache = cache
    hit = cache.get(plane_id)
    if hit is None:
        pmask = _mask_of(ann.plane_points[plane_id])
        hit = frozenset(li for li, lm in enumerate(_hex_line_masks(hexp, ann))
                        if lm & pmask)
        cache[plane_id] = hit
    return hit


def hexagon_good(hexp, ann, S, base_id):
    """Build the hexagon structure for (section, base) and count directly.

    Chosen points: the distance-four ball of the base, the section's
    quadric points, and the points outside the section collinear with
    an unexpected number (not one) of section points.  Chosen lines:
    those meeting the section and those meeting the base point's
    plane.  Returns the structure and a report of direct counts.
    """
    sp, quad, q = hexp.space, hexp.form, hexp.q
    if S.dim != 4:
        raise ConstructionError("the section must be a 4-space")
    A = hexp.points[base_id]
    if not sp.contains(S, A):
        raise ConstructionError("base point must lie in the section")

    smask = _section_mask(hexp, ann, S)
    near = ann.perp_masks[base_id]
    forced = 0
    for xi in range(hexp.n_points):
        if not (smask >> xi) & 1 \
                and (ann.gamma2_masks[xi] & smask).bit_count() != 1:
            forced |= 1 << xi
    pmask = near | smask | forced

    meeting, inside = _section_lines(hexp, ann, S)
    base_plane_id = ann.point_plane[base_id]
    near_lines = _plane_line_ids(hexp, ann, base_plane_id)
    overlap = len(meeting & near_lines)

    info = section_case(hexp, ann, S)
    base_plane = ann.planes[base_plane_id]
    trace_dim = sp.meet(base_plane, S).dim
    covered = near_lines <= meeting
    in_vplane = None
    if _family(info.case) == "cone-hyperbolic":
        v_id = hexp.point_id[info.vertex.basis[0]]
        in_vplane = base_id in ann.plane_points[ann.point_plane[v_id]]
    if covered:
        alpha = beta = gamma = None
    else:
        alpha = q * q if trace_dim == 1 else 0
        beta = overlap - (q + 1) - alpha
        gamma = sum(1 for m in _ideal_masks_by_point(hexp, ann)[base_id]
                    if m & smask == m)

    report = HexCaseReport(info.case, trace_dim, in_vplane, covered,
                           smask.bit_count(), inside,
                           len(meeting), len(near_lines), overlap,
                           alpha, beta, gamma)
    prov = {"construction": "hexagon-section",
            "section": [list(r) for r in S.basis], "base_point": base_id}
    struct = GoodStructure(hexp, 1, _mask_ids(pmask),
                           meeting | near_lines, prov)
    return struct, report


def compare_reports(direct, predicted):
    """Names of the fields on which two case reports disagree.

    Fields left as None on either side carry no claim and are skipped.
    """
    bad = []
    for f in fields(HexCaseReport):
        a, b = getattr(direct, f.name), getattr(predicted, f.name)
        if a is not None and b is not None and a != b:
            bad.append(f.name)
    return bad


def achievable_sizes(q):
    """Every size the hexagon construction can produce, as a set."""
    base = q**4 + q**3 + q*q + q + 1
    offsets = (0, q**3 - q, q**3, q**3 + q*q - q, 2*q**3 - q*q - q,
               2*q**3 - q*q, 2*q**3 - q, 2*q**3, 3*q**3 - q*q - q,
               3*q**3 - q*q, 3*q**3)
    return {base + k for k in offsets}


# -- sweeps and witness hunting -----------------------------------------


def section_survey(hexp, ann, sections, verify=False):
    """Run the construction for every base point of every section.

    Yields one row per (section, base) pair carrying the direct and
    the predicted reports, the fields on which they disagree, and
    (optionally) the verifier verdict.
    """
    for S in sections:
        info = section_case(hexp, ann, S)
        for base_id in _mask_ids(_section_mask(hexp, ann, S)):
            struct, direct = hexagon_good(hexp, ann, S, base_id)
            predicted = classify_case(hexp, ann, S, base_id, info=info)
            row = {
                "case": info.case,
                "section": S,
                "base": base_id,
                "size": direct.size,
                "mismatch": compare_reports(direct, predicted),
                "direct": direct,
                "predicted": predicted,
            }
            if verify:
                row["valid"] = verify_tgood(struct, girth=False)["valid"]
            yield row


def random_section(space, rng):
    """A random 4-space (seeded, not uniform over sections)."""
    npts = space.n_points
    while True:
        rows = [space.points[rng.randrange(npts)] for _ in range(5)]
        S = space.span(rows)
        if S.dim == 4:
            return S


COVERED_KEYS = (("covered", "plane"), ("covered", "tangent"))


def row_keys(q):
    """Every nonempty (case, trace dim, base in vertex plane) row.

    Two rows are empty for every q: a hexagon-line cone never has
    trace dim 0 (the hexagon lines inside it cover all its points),
    and a hyperbolic cone whose vertex plane lies inside the section
    never does either (the section is a union of hexagon planes
    through the vertex).  A third row, base on the vertex-plane trace
    of an outer hyperbolic cone, needs a point there besides the
    vertex and the two plane centres, so it first appears at q = 3.
    """
    rows = [("parabolic", 1, None), ("parabolic", 0, None),
            ("cone-elliptic", 1, None), ("cone-elliptic", 0, None),
            ("cone-hyperbolic-plane", 1, True),
            ("cone-hyperbolic-plane", 1, False),
            ("cone-hyperbolic-line", 0, False),
            ("cone-hyperbolic-line", 1, False)]
    if q > 2:
        rows.append(("cone-hyperbolic-line", 1, True))
    rows += [("cone-ideal-line", 1, None), ("cone-ideal-line", 0, None),
             ("cone-hexagon-line", 1, None)]
    return tuple(rows)


def case_examples(hexp, ann, want=3, seed=0, max_tries=3000):
    """Hunt down (section, base) witnesses for every counting row.

    Line cones come from line perps, point cones from spans inside a
    point perp, inner hyperbolic cones from spans of a hexagon plane,
    the rest from random sections.  Raises when some row stays empty
    within the try budget.
    """
    sp, quad = hexp.space, hexp.form
    rng = random.Random(seed)
    buckets = {k: [] for k in row_keys(hexp.order[0]) + COVERED_KEYS}

    def consider(S):
        if S.dim != 4:
            return
        info = section_case(hexp, ann, S)
        for base_id in _mask_ids(_section_mask(hexp, ann, S)):
            rep = classify_case(hexp, ann, S, base_id, info=info)
            if rep.base_plane_covered:
                key = ("covered",
                       "plane" if rep.trace_dim == 2 else "tangent")
            else:
                iv = rep.base_in_vertex_plane \
                    if info.case.startswith("cone-hyperbolic") else None
                key = (info.case, rep.trace_dim, iv)
            lst = buckets.get(key)
            if lst is not None and len(lst) < want:
                lst.append((S, base_id))

    def unfilled():
        return [k for k, v in buckets.items() if len(v) < want]

    for li in range(min(want + 2, hexp.n_lines)):
        consider(quad.perp(hexp.lines[li]))
    for lk in ann.ideal_lines[:want + 2]:
        consider(quad.perp(ann.quadric_lines[lk]))

    tries = 0
    while unfilled() and tries < max_tries:
        tries += 1
        branch = tries % 4
        if branch == 0:
            # span a hexagon plane: sections with the plane inside
            center = rng.randrange(hexp.n_points)
            pl = ann.planes[ann.point_plane[center]]
            extra = [sp.points[rng.randrange(sp.n_points)] for _ in range(2)]
            consider(sp.span([pl] + extra))
        elif branch == 1:
            # sections inside a point perp: point cones of all kinds
            vertex = hexp.points[rng.randrange(hexp.n_points)]
            wall = sp.subspace_points(quad.perp(vertex))
            picks = [wall[rng.randrange(len(wall))] for _ in range(4)]
            consider(sp.span([vertex] + picks))
        else:
            consider(random_section(sp, rng))
    missing = unfilled()
    if missing:
        raise ConstructionError(f"no witnesses found for rows: {missing}")
    return buckets
