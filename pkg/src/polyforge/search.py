"""Exhaustive backtracking search for t-good structures.

Every point and line of the host polygon is a ternary variable
(in / out / undecided).  An element that ends up outside the structure
must see exactly t chosen incident partners, which yields four watch
rules driven by two counters per element; the search branches on the
most constrained undecided element and the propagator chases each
decision to a fixpoint.  The same engine runs an orbit-variable model
for searches restricted to structures invariant under a prescribed
automorphism subgroup, where incidence multiplicities between orbits
replace the 0/1 weights.

Solutions stream out as verified GoodStructure objects and can be
classified into collineation-orbit classes: one representative per
class together with its stabilizer order and the stabilizer's orbit
multisets on the structure and on the complementary subgraph.
"""

import json
import multiprocessing
import os
from dataclasses import dataclass

from .constructions import (ConstructionError, GoodStructure, lift_w3,
                            perp_plane, planar_one_good, subfield_subplanes,
                            verify_tgood)
from .permgroup import PermGroup, set_stabilizer, _mask_indices, _to_mask

UNDEC, IN, OUT = 0, 1, 2


class SearchError(ValueError):
    pass


class SearchLimit(RuntimeError):
    """Raised when a node budget runs out; carries partial statistics."""

    def __init__(self, stats):
        super().__init__(f"node limit reached: {stats}")
        self.stats = dict(stats)


class SearchState:
    """Variable statuses plus the two watch counters per element.

    adj[e] lists (partner, weight) pairs where weight is the amount e
    contributes to the partner's chosen count when e is taken in; in
    the plain model every weight is 1 and the counters literally count
    incident elements.  The orbit model is asymmetric, so the rules
    read the reverse table radj[e], the weights feeding e's counters.
    """

    __slots__ = ("n", "t", "adj", "radj", "status", "chosen", "undec",
                 "trail", "stats", "_queue")

    def __init__(self, adj, t=1):
        self.n = len(adj)
        self.t = t
        self.adj = adj
        self.status = bytearray(self.n)
        self.chosen = [0] * self.n
        self.undec = [0] * self.n
        radj = [[] for _ in range(self.n)]
        for e, row in enumerate(adj):
            for f, w in row:
                self.undec[f] += w
                radj[f].append((e, w))
        self.radj = [tuple(r) for r in radj]
        self.trail = []
        self.stats = {"nodes": 0, "propagations": 0}
        self._queue = []

    def decide(self, e, value):
        """Set an undecided element and queue the affected checks."""
        if self.status[e] != UNDEC:
            raise SearchError(f"element {e} already decided")
        self.status[e] = value
        self.trail.append(e)
        for f, w in self.adj[e]:
            self.undec[f] -= w
            if value == IN:
                self.chosen[f] += w
            if self.status[f] == OUT:
                self._queue.append(f)
        if value == OUT:
            self._queue.append(e)

    def propagate(self):
        """Chase queued checks to a fixpoint; False means conflict."""
        t = self.t
        while self._queue:
            e = self._queue.pop()
            if self.status[e] != OUT:
                continue
            c, u = self.chosen[e], self.undec[e]
            if c > t or c + u < t:
                self._queue.clear()
                return False
            if u == 0:
                continue
            if c == t:
                self.stats["propagations"] += 1
                for f, _ in self.radj[e]:
                    if self.status[f] == UNDEC:
                        self.decide(f, OUT)
            elif c + u == t:
                self.stats["propagations"] += 1
                for f, _ in self.radj[e]:
                    if self.status[f] == UNDEC:
                        self.decide(f, IN)
            else:
                # a single partner too heavy to ever fit must stay out
                for f, w in self.radj[e]:
                    if self.status[f] == UNDEC and c + w > t:
                        self.stats["propagations"] += 1
                        self.decide(f, OUT)
        return True

    def mark(self):
        return len(self.trail)

    def undo(self, mark):
        while len(self.trail) > mark:
            e = self.trail.pop()
            value = self.status[e]
            self.status[e] = UNDEC
            for f, w in self.adj[e]:
                self.undec[f] += w
                if value == IN:
                    self.chosen[f] -= w
        self._queue.clear()

    def branch_element(self):
        """Most constrained undecided element, lowest index on ties."""
        best, key = None, None
        for e in range(self.n):
            if self.status[e] == UNDEC:
                k = self.undec[e]
                if key is None or k < key:
                    best, key = e, k
        return best


def _element_adjacency(poly):
    npts = poly.n_points
    adj = [[] for _ in range(npts + poly.n_lines)]
    for li, pts in enumerate(poly.line_points):
        for p in pts:
            adj[p].append((npts + li, 1))
            adj[npts + li].append((p, 1))
    return [tuple(r) for r in adj]


def root_prefix(poly):
    """Symmetry-breaking root decisions: a fixed anti-flag pattern.

    Any solution other than the all-in one misses some point, and that
    point lies on exactly t chosen lines, giving an incident pair with
    the point out and the line in.  The collineation group is
    transitive on incident pairs, so every solution class has a
    representative satisfying these two root decisions.
    """
    return ((0, OUT), (poly.n_points + poly.point_lines[0][0], IN))


def enumerate_one_good(poly, t=1, prefix=(), root_break=False,
                       include_full=False, verify=True, node_limit=None,
                       min_size=None, max_size=None, state=None):
    """Stream every t-good structure extending the given decisions.

    With root_break the root_prefix decisions are prepended, so the
    stream covers at least one member of every solution class; without
    it (and no prefix) the stream is the complete labeled enumeration.
    Size bounds count structure points and prune subtrees that cannot
    reach the window any more.
    """
    if state is None:
        state = SearchState(_element_adjacency(poly), t)
    npts = poly.n_points
    if root_break:
        prefix = tuple(root_prefix(poly)) + tuple(prefix)
    for e, value in prefix:
        if state.status[e] == value:
            continue
        if state.status[e] != UNDEC:
            return
        state.decide(e, value)
        if not state.propagate():
            return

    def emit():
        pts = tuple(e for e in range(npts) if state.status[e] == IN)
        lns = tuple(e - npts for e in range(npts, state.n)
                    if state.status[e] == IN)
        if not include_full and len(pts) == npts and len(lns) == poly.n_lines:
            return None
        struct = GoodStructure(poly, t, pts, lns,
                               provenance={"construction": "search"})
        if verify and not verify_tgood(struct, girth=False)["valid"]:
            raise SearchError("search emitted an invalid structure")
        return struct

    def size_window_open():
        taken = possible = 0
        for e in range(npts):
            if state.status[e] == IN:
                taken += 1
                possible += 1
            elif state.status[e] == UNDEC:
                possible += 1
        if max_size is not None and taken > max_size:
            return False
        return min_size is None or possible >= min_size

    bounded = min_size is not None or max_size is not None

    def walk():
        state.stats["nodes"] += 1
        if node_limit is not None and state.stats["nodes"] > node_limit:
            raise SearchLimit(state.stats)
        if bounded and not size_window_open():
            return
        e = state.branch_element()
        if e is None:
            out = emit()
            if out is None:
                return
            if min_size is not None and out.size < min_size:
                return
            if max_size is not None and out.size > max_size:
                return
            yield out
            return
        for value in (OUT, IN):
            m = state.mark()
            state.decide(e, value)
            if state.propagate():
                yield from walk()
            state.undo(m)

    yield from walk()


def brute_force_one_good(poly, t=1, include_full=True):
    """Oracle enumeration: all point subsets, lines by exact cover.

    For a candidate point set, lines meeting it in other than t points
    are forced into the structure; the remaining optional lines are
    chosen by a small exact-cover recursion so every outside point ends
    up on exactly t chosen lines.  Exponential, for small hosts only.
    """
    npts, nlns = poly.n_points, poly.n_lines
    out = []
    for pmask in range(1 << npts):
        forced, optional = [], []
        for li, pts in enumerate(poly.line_points):
            k = sum(1 for p in pts if pmask >> p & 1)
            (optional if k == t else forced).append(li)
        forced_set = set(forced)
        need = {}
        ok = True
        for p in range(npts):
            if pmask >> p & 1:
                continue
            c = sum(1 for li in poly.point_lines[p] if li in forced_set)
            if c > t:
                ok = False
                break
            need[p] = t - c
        if not ok:
            continue

        optional_set = set(optional)
        sols, chosen, banned = [], set(), set()

        def cover():
            target = None
            for p in need:
                if need[p] > 0:
                    target = p
                    break
            if target is None:
                sols.append(tuple(sorted(chosen)))
                return
            # branch on which optional line covers the target; banning
            # each tried line for its siblings keeps branches disjoint
            local = []
            for li in poly.point_lines[target]:
                if li not in optional_set or li in chosen or li in banned:
                    continue
                outs = [x for x in poly.line_points[li] if x in need]
                if all(need[x] >= 1 for x in outs):
                    for x in outs:
                        need[x] -= 1
                    chosen.add(li)
                    cover()
                    chosen.discard(li)
                    for x in outs:
                        need[x] += 1
                banned.add(li)
                local.append(li)
            for li in local:
                banned.discard(li)

        cover()
        pts = tuple(p for p in range(npts) if pmask >> p & 1)
        for extra in sols:
            lns = tuple(sorted(forced + list(extra)))
            if not include_full and len(pts) == npts and len(lns) == nlns:
                continue
            struct = GoodStructure(poly, t, pts, lns)
            if verify_tgood(struct, girth=False)["valid"]:
                out.append(struct)
            else:
                raise SearchError("exact cover produced an invalid structure")
    return sorted(out, key=lambda s: (s.point_ids, s.line_ids))


# ---------------------------------------------------------------------
# orbit-variable model


def _orbit_adjacency(poly, group):
    """Orbit variables with exact inter-orbit incidence counts.

    adj[m] holds (v, w) when taking orbit m in contributes w incident
    chosen elements to each member of orbit v; invariance under the
    group makes that count independent of the chosen representative.
    """
    npts = poly.n_points
    n = npts + poly.n_lines
    if group.degree != n:
        raise SearchError("group degree does not match the polygon")
    for g in group.gens:
        for li, pts in enumerate(poly.line_points):
            img = g[npts + li] - npts
            if img < 0 or tuple(sorted(g[p] for p in pts)) != poly.line_points[img]:
                raise SearchError("group does not preserve incidence")
    orbits = group.orbits(range(n))
    orbit_of = {}
    for vi, orb in enumerate(orbits):
        if orb[0] < npts <= orb[-1]:
            raise SearchError("an orbit mixes points and lines")
        for e in orb:
            orbit_of[e] = vi
    adj = [[] for _ in range(len(orbits))]
    for vi, orb in enumerate(orbits):
        rep = orb[0]
        counts = {}
        if rep < npts:
            for li in poly.point_lines[rep]:
                mi = orbit_of[npts + li]
                counts[mi] = counts.get(mi, 0) + 1
        else:
            for p in poly.line_points[rep - npts]:
                counts[orbit_of[p]] = counts.get(orbit_of[p], 0) + 1
        for mi, w in counts.items():
            adj[mi].append((vi, w))
    return [tuple(sorted(r)) for r in adj], orbits


def enumerate_with_group(poly, group, t=1, include_full=False, verify=True,
                         node_limit=None):
    """Stream t-good structures that are unions of the group's orbits."""
    adj, orbits = _orbit_adjacency(poly, group)
    npts = poly.n_points
    state = SearchState(adj, t)

    def expand(struct_vars):
        pts, lns = [], []
        for vi in struct_vars:
            for e in orbits[vi]:
                (pts if e < npts else lns).append(e if e < npts else e - npts)
        return tuple(sorted(pts)), tuple(sorted(lns))

    def walk():
        state.stats["nodes"] += 1
        if node_limit is not None and state.stats["nodes"] > node_limit:
            raise SearchLimit(state.stats)
        e = state.branch_element()
        if e is None:
            chosen = [vi for vi in range(state.n) if state.status[vi] == IN]
            pts, lns = expand(chosen)
            if not include_full and len(pts) == npts:
                return
            struct = GoodStructure(poly, t, pts, lns,
                                   provenance={"construction": "search-orbit"})
            if verify and not verify_tgood(struct, girth=False)["valid"]:
                raise SearchError("orbit search emitted an invalid structure")
            yield struct
            return
        for value in (OUT, IN):
            m = state.mark()
            state.decide(e, value)
            if state.propagate():
                yield from walk()
            state.undo(m)

    yield from walk()


# ---------------------------------------------------------------------
# branch splitting, parallel runs, checkpoints


def split_prefixes(poly, t=1, root_break=True, target=16):
    """Partition the search tree into at least target disjoint prefixes.

    Repeatedly expands the shallowest prefix at its branch element, so
    replaying any returned prefix (after the root decisions when
    root_break is set) reaches a distinct subtree; conflicted prefixes
    are dropped on the spot.
    """
    state = SearchState(_element_adjacency(poly), t)
    base = root_prefix(poly) if root_break else ()

    def replay(prefix):
        m = state.mark()
        for e, value in base + prefix:
            if state.status[e] == value:
                continue
            if state.status[e] != UNDEC:
                state.undo(m)
                return None, m
            state.decide(e, value)
            if not state.propagate():
                state.undo(m)
                return None, m
        return True, m

    frontier = [()]
    leaves = []
    while frontier and len(frontier) + len(leaves) < target:
        prefix = frontier.pop(0)
        ok, m = replay(prefix)
        if ok is None:
            continue
        e = state.branch_element()
        state.undo(m)
        if e is None:
            leaves.append(prefix)
            continue
        frontier.extend((prefix + ((e, OUT),), prefix + ((e, IN),)))
    return leaves + frontier


_POOL_CTX = {}


def _run_prefix(idx):
    poly = _POOL_CTX["poly"]
    opts = _POOL_CTX["opts"]
    prefix = _POOL_CTX["prefixes"][idx]
    found = [(s.point_ids, s.line_ids)
             for s in enumerate_one_good(poly, prefix=prefix, **opts)]
    return idx, found


def parallel_enumerate(poly, t=1, jobs=1, root_break=True, include_full=False,
                       checkpoint=None, target_prefixes=None):
    """Run the search over disjoint branch prefixes, optionally forked.

    The checkpoint file records finished prefixes and their solutions,
    so an interrupted long run resumes where it stopped.  Output order
    is deterministic regardless of job count.
    """
    if target_prefixes is None:
        target_prefixes = max(16, 4 * jobs)
    prefixes = split_prefixes(poly, t, root_break, target_prefixes)
    done = {}
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            data = json.load(fh)
        if data.get("prefixes") != [list(map(list, p)) for p in prefixes]:
            raise SearchError("checkpoint does not match this run")
        done = {int(k): [(tuple(p), tuple(l)) for p, l in v]
                for k, v in data["done"].items()}

    def save():
        if checkpoint:
            payload = {
                "prefixes": [list(map(list, p)) for p in prefixes],
                "done": {str(k): [[list(p), list(l)] for p, l in v]
                         for k, v in done.items()},
            }
            tmp = checkpoint + ".tmp"
            with open(tmp, "w") as fh:
                json.dump(payload, fh)
            os.replace(tmp, checkpoint)

    opts = {"t": t, "root_break": root_break, "include_full": include_full}
    pending = [i for i in range(len(prefixes)) if i not in done]
    _POOL_CTX.update(poly=poly, opts=opts, prefixes=prefixes)
    try:
        if jobs <= 1:
            for i in pending:
                done[i] = _run_prefix(i)[1]
                save()
        else:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(jobs) as pool:
                for i, found in pool.imap_unordered(_run_prefix, pending):
                    done[i] = found
                    save()
    finally:
        _POOL_CTX.clear()

    merged = sorted({pair for found in done.values() for pair in found},
                    key=lambda pr: (len(pr[0]), pr[0], pr[1]))
    return [GoodStructure(poly, t, p, l,
                          provenance={"construction": "search"})
            for p, l in merged]


# ---------------------------------------------------------------------
# classification into collineation-orbit classes


@dataclass
class SolutionClass:
    """One collineation-orbit class of solutions and its table row."""

    structure: GoodStructure
    subgraph_size: int
    stabilizer_order: int
    orbits_subgraph: tuple
    orbits_structure: tuple
    from_lift: bool
    class_size: int

    def row(self):
        return (self.subgraph_size, self.stabilizer_order,
                self.orbits_subgraph, self.orbits_structure, self.from_lift)


def _structure_mask(poly, struct):
    npts = poly.n_points
    return _to_mask(struct.point_ids) | _to_mask(npts + l for l in struct.line_ids)


def lift_signatures(w):
    """Masks of every planar-substructure lift based at point 0.

    Used to tag solution classes that the lift construction reaches:
    the group is point-transitive and the lift commutes with
    collineations, so a class contains a lift exactly when its full
    orbit meets this set.
    """
    plane = perp_plane(w, 0)
    q = w.order[0]
    structures = []
    for li in range(plane.n_lines):
        on = set(plane.line_points[li])
        for p in range(plane.n_points):
            kind = "point-on-line" if p in on else "point-off-line"
            structures.append(planar_one_good(plane, kind, point=p, line=li))
    rq = int(q ** 0.5)
    if rq * rq == q:
        for pts, lns in subfield_subplanes(plane):
            structures.append(GoodStructure(plane, 1, pts, lns,
                                            provenance={"construction": "baer"}))
    masks = set()
    for planar in structures:
        struct = lift_w3(w, 0, planar)
        masks.add(_structure_mask(w, struct))
    return masks


def _orbit_masks(mask, gens):
    orbit = {mask}
    frontier = [mask]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                img = g.apply_mask(m)
                if img not in orbit:
                    orbit.add(img)
                    nxt.append(img)
        frontier = nxt
    return orbit


def classify_solutions(solutions, group, lift_masks=None, fuse=()):
    """Group the solutions into orbit classes with table data.

    Orbits are walked breadth-first over set images, which both dedups
    the input and yields the exact class size; the stabilizer order
    then comes from orbit-stabilizer and is cross-checked against the
    assembled stabilizer subgroup.

    fuse takes extra permutations (a duality of the host, typically)
    that merge classes: membership and class sizes are taken under the
    extended generator set, while the stabilizer order and orbit
    multisets keep describing the plain group, which is how merged
    classes are conventionally tabulated.
    """
    if not solutions:
        return []
    poly = solutions[0].host
    npts = poly.n_points
    n = npts + poly.n_lines
    order = group.order()
    t = solutions[0].t
    extra = tuple(fuse)
    masks = sorted(_structure_mask(poly, s) for s in solutions)
    seen = set()
    classes = []
    for mask in masks:
        if mask in seen:
            continue
        orbit = _orbit_masks(mask, group.gens + extra)
        seen |= orbit
        best = min(map(_mask_indices, orbit))
        plain = _orbit_masks(_to_mask(best), group.gens) if extra else orbit
        stab_order, rem = divmod(order, len(plain))
        if rem:
            raise SearchError("orbit size does not divide the group order")
        stab = set_stabilizer(group, best)
        if stab.order() != stab_order:
            raise SearchError("stabilizer order mismatch")
        rep_pts = tuple(e for e in best if e < npts)
        rep_lns = tuple(e - npts for e in best if e >= npts)
        rep = GoodStructure(poly, t, rep_pts, rep_lns,
                            provenance={"construction": "class-representative"})
        struct_set = set(best)
        sub_idx = [e for e in range(n) if e not in struct_set]
        orbs_sub = tuple(sorted(len(o) for o in stab.orbits(sub_idx)))
        orbs_struct = tuple(sorted(len(o) for o in stab.orbits(best)))
        if sum(orbs_sub) != len(sub_idx) or sum(orbs_struct) != len(best):
            raise SearchError("orbit multisets do not partition the domain")
        classes.append(SolutionClass(
            structure=rep,
            subgraph_size=len(sub_idx),
            stabilizer_order=stab_order,
            orbits_subgraph=orbs_sub,
            orbits_structure=orbs_struct,
            from_lift=bool(lift_masks) and not orbit.isdisjoint(lift_masks),
            class_size=len(orbit),
        ))
    classes.sort(key=lambda c: (c.subgraph_size, c.stabilizer_order,
                                c.orbits_subgraph, c.orbits_structure,
                                c.structure.point_ids, c.structure.line_ids))
    return classes


def _multiset_text(sizes):
    from collections import Counter
    parts = []
    for size, mult in sorted(Counter(sizes).items()):
        parts.append(f"{size}^{mult}" if mult > 1 else f"{size}")
    return "{%s}" % ",".join(parts)


def class_table(classes):
    """Aligned text table, one row per class."""
    rows = [("Size", "Stab", "Orbits(subgraph)", "Orbits(structure)", "Lift")]
    for c in classes:
        rows.append((str(c.subgraph_size), str(c.stabilizer_order),
                     _multiset_text(c.orbits_subgraph),
                     _multiset_text(c.orbits_structure),
                     "*" if c.from_lift else ""))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    lines = []
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines)
