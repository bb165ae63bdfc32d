"""Collineation groups of the built polygons, as permutation groups.

Permutations act on the combined index domain of a polygon: points
first (0 .. P-1), then lines shifted by P.  Groups carry a lazily
built stabilizer chain (deterministic Schreier-Sims, no coin flips),
which gives exact orders, membership tests and element streams; on
top of that sit setwise stabilizers and lexicographically minimal
subset images, the workhorses of isomorph rejection.
"""

from math import prod


class GroupError(ValueError):
    pass


def _compose(a, b):
    # (a o b)(i) = a[b[i]]
    return tuple(a[x] for x in b)


def _inverse(a):
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


class Permutation(tuple):
    """An image tuple over the combined point+line domain."""

    __slots__ = ()

    def __mul__(self, other):
        return Permutation(self[x] for x in other)

    def inverse(self):
        return Permutation(_inverse(self))

    def apply_mask(self, mask):
        """Image of a subset given as an int bitmask."""
        out = 0
        while mask:
            low = mask & -mask
            out |= 1 << self[low.bit_length() - 1]
            mask ^= low
        return out

    def apply_set(self, s):
        return tuple(sorted(self[x] for x in s))

    def is_identity(self):
        return all(i == x for i, x in enumerate(self))

    @classmethod
    def identity(cls, degree):
        return cls(range(degree))


class _Level:
    __slots__ = ("base", "gens", "transversal", "done")

    def __init__(self, base):
        self.base = base
        self.gens = []
        self.transversal = {}
        self.done = set()  # (point, gen index) pairs already sifted


class PermGroup:
    """A permutation group with a lazy stabilizer chain."""

    def __init__(self, degree, gens=()):
        self.degree = degree
        ident = tuple(range(degree))
        seen = set()
        keep = []
        for g in gens:
            t = tuple(g)
            if len(t) != degree:
                raise GroupError("generator degree mismatch")
            if t != ident and t not in seen:
                seen.add(t)
                keep.append(Permutation(t))
        self.gens = tuple(keep)
        self._levels = None

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, gens={len(self.gens)})"

    # -- stabilizer chain ---------------------------------------------

    def _chain(self):
        if self._levels is None:
            self._levels = _schreier_sims(self.degree, self.gens)
        return self._levels

    def order(self):
        return prod(len(l.transversal) for l in self._chain()) or 1

    def __contains__(self, perm):
        h, _ = _strip(self._chain(), tuple(perm))
        return all(i == x for i, x in enumerate(h))

    def elements(self):
        """Every element, streamed off the chain (order() of them)."""
        levels = self._chain()
        ident = tuple(range(self.degree))
        if not levels:
            yield Permutation(ident)
            return
        stack = [(0, ident)]
        transversals = [sorted(l.transversal) for l in levels]
        while stack:
            i, acc = stack.pop()
            if i == len(levels):
                yield Permutation(acc)
                continue
            for pt in reversed(transversals[i]):
                stack.append((i + 1, _compose(acc, levels[i].transversal[pt])))

    # -- orbits ---------------------------------------------------------

    def orbit(self, x):
        seen = {x}
        frontier = [x]
        while frontier:
            nxt = []
            for pt in frontier:
                for g in self.gens:
                    img = g[pt]
                    if img not in seen:
                        seen.add(img)
                        nxt.append(img)
            frontier = nxt
        return tuple(sorted(seen))

    def orbits(self, domain=None):
        """Orbit partition of domain (default: everything), sorted."""
        left = set(range(self.degree) if domain is None else domain)
        out = []
        while left:
            o = self.orbit(min(left))
            out.append(tuple(x for x in o if x in left))
            left.difference_update(o)
        return tuple(sorted(out))


def _strip(levels, p):
    for i, level in enumerate(levels):
        u = level.transversal.get(p[level.base])
        if u is None:
            return p, i
        p = _compose(_inverse(u), p)
    return p, len(levels)


def _schreier_sims(degree, gens):
    """Deterministic incremental stabilizer chain construction.

    Level i keeps every strong generator that fixes the first i base
    points, so its orbit and transversal are taken under the whole
    stabilizer known so far; the closure loop keeps sifting Schreier
    generators until every level's all strip to the identity.
    """
    ident = tuple(range(degree))
    levels = []
    known = set()

    def recompute(i):
        # extend, never rebuild: kept entries keep their Schreier
        # generators valid, so the done sets survive additions
        level = levels[i]
        t = level.transversal
        if not t:
            t[level.base] = ident
        frontier = sorted(t)
        while frontier:
            nxt = []
            for pt in frontier:
                u = t[pt]
                for g in level.gens:
                    img = g[pt]
                    if img not in t:
                        t[img] = _compose(g, u)
                        nxt.append(img)
            frontier = nxt

    def sift(p, i):
        for lev in levels[i:]:
            u = lev.transversal.get(p[lev.base])
            if u is None:
                return p
            p = _compose(_inverse(u), p)
        return p

    def add(h):
        if h == ident or h in known:
            return False
        known.add(h)
        j = 0
        while j < len(levels) and h[levels[j].base] == levels[j].base:
            j += 1
        if j == len(levels):
            base = next(x for x in range(degree) if h[x] != x)
            levels.append(_Level(base))
        for i in range(j + 1):
            levels[i].gens.append(h)
            recompute(i)
        return True

    for g in gens:
        add(tuple(g))

    changed = True
    while changed:
        changed = False
        for i, level in enumerate(levels):
            for pt in sorted(level.transversal):
                u = level.transversal[pt]
                for gi in range(len(level.gens)):
                    if (pt, gi) in level.done:
                        continue
                    level.done.add((pt, gi))
                    g = level.gens[gi]
                    sg = _compose(_inverse(level.transversal[g[pt]]),
                                  _compose(g, u))
                    if add(sift(sg, i + 1)):
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return levels


# ---------------------------------------------------------------------
# subset actions


def _to_mask(s):
    mask = 0
    for x in s:
        mask |= 1 << x
    return mask


def _mask_indices(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def set_orbit_masks(gens, mask, limit=None):
    """BFS orbit of a subset bitmask, in discovery order."""
    seen = {mask}
    order = [mask]
    frontier = [mask]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                img = g.apply_mask(m)
                if img not in seen:
                    if limit is not None and len(seen) >= limit:
                        raise GroupError(f"subset orbit exceeds {limit}")
                    seen.add(img)
                    order.append(img)
                    nxt.append(img)
        frontier = nxt
    return order


def minimal_image(group, s, limit=10**7):
    """Lexicographically least image of the index set s under the group.

    Constant on orbits, so equal outputs mean same subset orbit.
    """
    best = tuple(sorted(s))
    for m in set_orbit_masks(group.gens, _to_mask(s), limit=limit):
        cand = _mask_indices(m)
        if cand < best:
            best = cand
    return best


def set_stabilizer(group, s, method="orbit", ceiling=10**7):
    """The subgroup fixing the index set s setwise.

    The default method walks the subset orbit and assembles Schreier
    generators until the orbit-stabilizer count is reached.  The
    "filter" method sieves every group element (only under the
    ceiling); it is the slow oracle the other route is tested against.
    """
    mask = _to_mask(s)
    if method == "filter":
        if group.order() > ceiling:
            raise GroupError("group too large for the element filter")
        keep = [g for g in group.elements() if g.apply_mask(mask) == mask]
        return PermGroup(group.degree, keep)
    if method != "orbit":
        raise GroupError(f"unknown method {method!r}")

    # parent pointers instead of stored permutations keep large subset
    # orbits affordable; coset representatives are composed on demand
    parent = {mask: None}
    order = [mask]
    frontier = [mask]
    while frontier:
        nxt = []
        for m in frontier:
            for gi, g in enumerate(group.gens):
                img = g.apply_mask(m)
                if img not in parent:
                    if len(parent) > ceiling:
                        raise GroupError(f"subset orbit exceeds {ceiling}")
                    parent[img] = (m, gi)
                    order.append(img)
                    nxt.append(img)
        frontier = nxt

    ident = Permutation.identity(group.degree)

    def coset_rep(m):
        word = []
        while parent[m] is not None:
            m, gi = parent[m]
            word.append(gi)
        u = ident
        for gi in reversed(word):
            u = group.gens[gi] * u
        return u

    target, rem = divmod(group.order(), len(parent))
    if rem:
        raise GroupError("orbit size does not divide the group order")
    stab_gens = []
    sub = PermGroup(group.degree)
    if sub.order() == target:
        return sub
    for m in order:
        u = coset_rep(m)
        for g in group.gens:
            sg = coset_rep(g.apply_mask(m)).inverse() * (g * u)
            if not sg.is_identity() and sg not in sub:
                stab_gens.append(sg)
                sub = PermGroup(group.degree, stab_gens)
                if sub.order() == target:
                    return sub
    raise GroupError("Schreier generators failed to fill the stabilizer")


# ---------------------------------------------------------------------
# collineations of the built polygons


def matrix_collineation(poly, rows=None, frob=0):
    """The permutation a semilinear map induces on a polygon.

    The map sends x to M(x^sigma) with sigma the frob-th Frobenius
    power; it must permute the polygon's points and lines and keep
    incidence, which is checked line by line.
    """
    sp = poly.space
    F = sp.field
    if rows is None:
        rows = tuple(tuple(1 if i == j else 0 for j in range(sp.n + 1))
                     for i in range(sp.n + 1))

    def move(v):
        if frob:
            v = tuple(F.frobenius(x, frob) for x in v)
        w = sp.canonicalize(sp.mat_vec(rows, v))
        if w is None:
            raise GroupError("map is singular")
        return w

    npts = len(poly.points)
    images = []
    for p in poly.points:
        w = move(p)
        idx = poly.point_id.get(w)
        if idx is None:
            raise GroupError(f"point image {w} leaves the polygon")
        images.append(idx)
    if len(set(images)) != npts:
        raise GroupError("point map is not a bijection")

    for li, line in enumerate(poly.lines):
        img = sp.span([move(r) for r in line.basis])
        idx = poly.line_id.get(img)
        if idx is None:
            raise GroupError(f"line {li} image leaves the polygon")
        want = tuple(sorted(images[p] for p in poly.line_points[li]))
        if want != poly.line_points[idx]:
            raise GroupError(f"line {li} image breaks incidence")
        images.append(npts + idx)
    return Permutation(images)


def _symplectic_generator_matrices(sp, gram):
    """Transvections and a similitude spanning the symplectic maps."""
    F = sp.field
    n = sp.n + 1
    w = F.omega
    centers = []
    for i in range(n):
        centers.append(tuple(1 if j == i else 0 for j in range(n)))
    centers.append((1, 0, 1, 0))
    centers.append((0, 1, 0, 1))
    mats = []
    for v in centers:
        jv = sp.mat_vec(gram, v)
        for k in range(F.e):
            lam = F.pow(w, k)
            mats.append(tuple(
                tuple(F.add(1 if i == j else 0, F.mul(lam, F.mul(v[i], jv[j])))
                      for j in range(n))
                for i in range(n)))
    mats.append(tuple(
        tuple((w if i % 2 == 0 else 1) if i == j else 0 for j in range(n))
        for i in range(n)))
    return mats


def _plane_generator_matrices(sp):
    """Elementary and diagonal matrices spanning the linear maps."""
    F = sp.field
    n = sp.n + 1
    w = F.omega
    mats = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for k in range(F.e):
                lam = F.pow(w, k)
                mats.append(tuple(
                    tuple(1 if a == b else (lam if (a, b) == (i, j) else 0)
                          for b in range(n))
                    for a in range(n)))
    mats.append(tuple(
        tuple((w if i == 0 else 1) if i == j else 0 for j in range(n))
        for i in range(n)))
    return mats


def collineation_generators(poly):
    """The collineation group of a plane or quadrangle as permutations.

    Generators are matrix maps plus the Frobenius for non-prime q.
    Dualities are never included, even when the polygon is self-dual.
    """
    sp = poly.space
    if poly.kind == "w3":
        mats = _symplectic_generator_matrices(sp, poly.form.gram)
    elif poly.kind in ("pg2", "plane"):
        if poly.kind == "plane":
            raise GroupError("embedded planes: build the abstract pg2 instead")
        mats = _plane_generator_matrices(sp)
    else:
        raise GroupError(f"no generator recipe for kind {poly.kind!r}")
    perms = [matrix_collineation(poly, m) for m in mats]
    if sp.field.e > 1:
        perms.append(matrix_collineation(poly, frob=1))
    return PermGroup(len(poly.points) + len(poly.lines), perms)


def quadrangle_duality(poly):
    """A point-line swap of the symplectic quadrangle, even q only.

    Lines map through their Grassmann coordinates: total isotropy pins
    the p01 and p23 coordinates together, the residual quadric picks up
    a nucleus in characteristic 2, and projecting the nucleus away
    lands back on the points of PG(3, q).  A point then maps to the
    span of the images of two lines of its pencil.  Returns a
    Permutation of the combined domain that swaps the two sides while
    preserving incidence; composing it with itself gives an ordinary
    collineation.
    """
    if poly.kind != "w3":
        raise GroupError("dualities are built for the quadrangle only")
    sp = poly.space
    if sp.field.p != 2:
        raise GroupError("the quadrangle is self-dual only for even q")
    npts = poly.n_points
    images = [None] * (npts + poly.n_lines)
    # plucker order: p01 p02 p03 p12 p13 p23; pairing (p02,p13),(p03,p12)
    # matches the standard symplectic coordinate pairing.
    for li, line in enumerate(poly.lines):
        pl = sp.plucker(line)
        if pl[0] != pl[5]:
            raise GroupError("line fails the isotropy constraint")
        pt = sp.canonicalize((pl[1], pl[4], pl[2], pl[3]))
        images[npts + li] = poly.point_id[pt]
    if len(set(images[npts:])) != poly.n_lines:
        raise GroupError("line images do not cover the point set")
    for pi in range(npts):
        l0, l1 = poly.point_lines[pi][:2]
        u = poly.points[images[npts + l0]]
        v = poly.points[images[npts + l1]]
        li = poly.line_id.get(sp.line_through(u, v))
        if li is None:
            raise GroupError("pencil image is not a quadrangle line")
        images[pi] = npts + li
    for pi in range(npts):
        for li in poly.point_lines[pi]:
            if images[npts + li] not in poly.line_points[images[pi] - npts]:
                raise GroupError("duality does not preserve incidence")
    return Permutation(images)


def symplectic_order(q):
    """Order of the 4-dimensional symplectic matrix group."""
    return q**4 * (q*q - 1) * (q**4 - 1)


def plane_collineation_order(q, e):
    """Order of the collineation group of the plane PG(2, q)."""
    gl = (q**3 - 1) * (q**3 - q) * (q**3 - q*q)
    return gl // (q - 1) * e


def quadrangle_collineation_order(q, e):
    """Order of the collineation group of the quadrangle W(3, q).

    For even q scalars are trivial and similitudes add nothing; for
    odd q the similitudes exactly restore the factor 2 the scalars
    {1, -1} removed.  Either way the count is the matrix group order
    times the Frobenius factor.
    """
    return symplectic_order(q) * e
