"""Projective geometry PG(n, q): points, subspaces, forms, quadrics.

Points are coordinate tuples normalized so the first nonzero entry is
1; the point list of a space is in lexicographic order of those
tuples, and a point's index in that list is its stable id.  Subspaces
are kept in reduced row echelon form, which makes them canonical and
hashable, so span/meet/perp results can be compared directly.

Quadratic forms are stored as upper-triangular coefficient matrices.
The associated bilinear form b(x, y) = Q(x+y) - Q(x) - Q(y) is used
for all perps; in characteristic 2 it is alternating and degenerate
(parabolic forms have a nucleus), which the rank computations here
simply inherit rather than special-case.
"""

from functools import lru_cache
from itertools import combinations, product

from .gf import field, FieldError


class GeometryError(ValueError):
    pass


class Subspace:
    """A projective subspace, canonically represented by an RREF basis."""

    __slots__ = ("basis",)

    def __init__(self, basis):
        self.basis = tuple(tuple(r) for r in basis)

    @property
    def dim(self):
        """Projective dimension; -1 for the empty subspace."""
        return len(self.basis) - 1

    def __bool__(self):
        return bool(self.basis)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, basis={self.basis})"


EMPTY = Subspace(())


class ProjectiveSpace:
    """PG(n, q) with a fixed, lexicographic point enumeration."""

    def __init__(self, n, q):
        self.n = n
        self.field = field(q)
        self.q = q
        pts = []
        for v in product(range(q), repeat=n + 1):
            c = self.canonicalize(v)
            if c is not None and c == v:
                pts.append(v)
        self.points = pts  # already lexicographically sorted by generation
        self.point_index = {v: i for i, v in enumerate(pts)}

    def __repr__(self):
        return f"PG({self.n},{self.q})"

    @property
    def n_points(self):
        return len(self.points)

    # -- vectors ------------------------------------------------------

    def canonicalize(self, v):
        """Scale v so its first nonzero coordinate is 1 (None for 0)."""
        F = self.field
        for x in v:
            if x:
                if x == 1:
                    return tuple(v)
                s = F.inv(x)
                return tuple(F.mul(s, y) for y in v)
        return None

    def dot(self, u, v):
        F = self.field
        acc = 0
        for a, b in zip(u, v):
            if a and b:
                acc = F.add(acc, F.mul(a, b))
        return acc

    def vec_add(self, u, v):
        F = self.field
        return tuple(F.add(a, b) for a, b in zip(u, v))

    def vec_scale(self, s, v):
        F = self.field
        return tuple(F.mul(s, a) for a in v)

    def mat_vec(self, rows, v):
        return tuple(self.dot(r, v) for r in rows)

    def vec_mat(self, v, rows):
        """Row vector times matrix given as rows."""
        F = self.field
        ncols = len(rows[0])
        out = [0] * ncols
        for a, r in zip(v, rows):
            if a:
                for j, x in enumerate(r):
                    if x:
                        out[j] = F.add(out[j], F.mul(a, x))
        return tuple(out)

    # -- subspaces ----------------------------------------------------

    def rref(self, rows):
        """Reduced row echelon form; returns the canonical Subspace."""
        F = self.field
        m = [list(r) for r in rows if any(r)]
        ncols = self.n + 1
        pivots = []
        r = 0
        for c in range(ncols):
            piv = None
            for i in range(r, len(m)):
                if m[i][c]:
                    piv = i
                    break
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = F.inv(m[r][c])
            m[r] = [F.mul(inv, x) for x in m[r]]
            for i in range(len(m)):
                if i != r and m[i][c]:
                    s = m[i][c]
                    m[i] = [F.sub(x, F.mul(s, y)) for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == len(m):
                break
        return Subspace(m[:r])

    def span(self, items):
        """Span of points (tuples) and/or subspaces."""
        rows = []
        for it in items:
            if isinstance(it, Subspace):
                rows.extend(it.basis)
            else:
                rows.append(tuple(it))
        return self.rref(rows)

    def kernel(self, rows):
        """Solutions x of rows·x = 0, as a Subspace."""
        F = self.field
        ncols = self.n + 1
        m = self.rref(rows).basis
        pivots = []
        for r in m:
            for c, x in enumerate(r):
                if x:
                    pivots.append(c)
                    break
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [0] * ncols
            v[fc] = 1
            for r, pc in zip(m, pivots):
                v[pc] = F.neg(r[fc])
            basis.append(tuple(v))
        return self.rref(basis)

    def meet(self, a, b):
        """Intersection of two subspaces (annihilator trick)."""
        ka = self.kernel(a.basis) if a.basis else None
        kb = self.kernel(b.basis) if b.basis else None
        if ka is None or kb is None:
            return EMPTY
        return self.kernel(ka.basis + kb.basis)

    def contains(self, S, v):
        """Is the vector/point v inside subspace S?"""
        F = self.field
        w = list(v)
        for r in S.basis:
            pc = next(c for c, x in enumerate(r) if x)
            if w[pc]:
                s = w[pc]
                w = [F.sub(x, F.mul(s, y)) for x, y in zip(w, r)]
        return not any(w)

    def subspace_le(self, A, B):
        return all(self.contains(B, r) for r in A.basis)

    def subspace_points(self, S):
        """All canonical points of S, in this space's enumeration order."""
        idx = self.subspace_point_indices(S)
        return [self.points[i] for i in idx]

    def subspace_point_indices(self, S):
        q = self.q
        out = set()
        k = len(S.basis)
        for cs in product(range(q), repeat=k):
            v = None
            for c, row in zip(cs, S.basis):
                if c:
                    w = self.vec_scale(c, row)
                    v = w if v is None else self.vec_add(v, w)
            if v is not None:
                out.add(self.point_index[self.canonicalize(v)])
        return tuple(sorted(out))

    def line_through(self, u, v):
        return self.rref([u, v])

    def subspaces(self, k):
        """All subspaces with k+1 basis rows (projective dim k), RREF order.

        Enumerates pivot-column patterns and free entries directly, so
        every matrix produced is already canonical.
        """
        q = self.field.q
        ncols = self.n + 1
        r = k + 1
        for pivots in combinations(range(ncols), r):
            free_cells = []
            for i in range(r):
                for c in range(pivots[i] + 1, ncols):
                    if c not in pivots:
                        free_cells.append((i, c))
            for vals in product(range(q), repeat=len(free_cells)):
                m = [[0] * ncols for _ in range(r)]
                for i in range(r):
                    m[i][pivots[i]] = 1
                for (i, c), x in zip(free_cells, vals):
                    m[i][c] = x
                yield Subspace(m)

    # -- Plücker / Grassmann coordinates --------------------------------

    def plucker(self, line):
        """Grassmann coordinates p_ij (i<j) of a line, scaled canonically."""
        if line.dim != 1:
            raise GeometryError("plucker needs a line")
        F = self.field
        u, v = line.basis
        out = []
        for i in range(self.n + 1):
            for j in range(i + 1, self.n + 1):
                out.append(F.sub(F.mul(u[i], v[j]), F.mul(u[j], v[i])))
        return self.canonicalize(out)


@lru_cache(maxsize=None)
def projective_space(n, q):
    return ProjectiveSpace(n, q)


def grassmann_index(n, i, j):
    """Position of p_ij (i<j) in the plucker tuple for PG(n, q)."""
    if not 0 <= i < j <= n:
        raise GeometryError("need 0 <= i < j <= n")
    return sum(n - k for k in range(i)) + (j - i - 1)


# ---------------------------------------------------------------------
# bilinear and quadratic forms
# ---------------------------------------------------------------------


class SymplecticForm:
    """Alternating bilinear form given by a Gram matrix."""

    def __init__(self, space, gram):
        self.space = space
        self.gram = tuple(tuple(r) for r in gram)

    def eval(self, u, v):
        sp = self.space
        return sp.dot(u, sp.mat_vec(self.gram, v))

    def perp(self, obj):
        """Perp of a point or subspace under the form."""
        sp = self.space
        rows = obj.basis if isinstance(obj, Subspace) else (obj,)
        eqs = [sp.vec_mat(r, self.gram) for r in rows]
        return sp.kernel(eqs)

    def is_isotropic_line(self, line):
        u, v = line.basis
        return self.eval(u, v) == 0


def standard_symplectic(space):
    """x0 y1 - x1 y0 + x2 y3 - x3 y2 on PG(3, q)."""
    if space.n != 3:
        raise GeometryError("standard symplectic form lives on PG(3, q)")
    F = space.field
    one, mone = 1, F.neg(1)
    gram = (
        (0, one, 0, 0),
        (mone, 0, 0, 0),
        (0, 0, 0, one),
        (0, 0, mone, 0),
    )
    return SymplecticForm(space, gram)


class QuadraticForm:
    """Quadratic form from an upper-triangular coefficient matrix."""

    def __init__(self, space, coeffs, kind=None):
        self.space = space
        self.coeffs = tuple(tuple(r) for r in coeffs)
        self.kind = kind
        F = space.field
        n1 = space.n + 1
        gram = [[0] * n1 for _ in range(n1)]
        for i in range(n1):
            for j in range(n1):
                gram[i][j] = F.add(self.coeffs[i][j], self.coeffs[j][i])
        self.gram = tuple(tuple(r) for r in gram)

    def eval(self, v):
        F = self.space.field
        acc = 0
        for i, vi in enumerate(v):
            if vi:
                row = self.coeffs[i]
                for j in range(i, len(v)):
                    if row[j] and v[j]:
                        acc = F.add(acc, F.mul(F.mul(vi, row[j]), v[j]))
        return acc

    def bilinear(self, u, v):
        sp = self.space
        return sp.dot(u, sp.mat_vec(self.gram, v))

    def perp(self, obj):
        sp = self.space
        rows = obj.basis if isinstance(obj, Subspace) else (obj,)
        eqs = [sp.vec_mat(r, self.gram) for r in rows]
        return sp.kernel(eqs)

    def is_singular(self, v):
        return self.eval(v) == 0

    def singular_point_indices(self):
        return tuple(i for i, p in enumerate(self.space.points) if self.eval(p) == 0)

    def is_singular_subspace(self, S):
        # Q(sum) vanishes iff it vanishes on basis vectors and b does on pairs
        rows = S.basis
        if any(self.eval(r) for r in rows):
            return False
        return all(
            self.bilinear(rows[i], rows[j]) == 0
            for i in range(len(rows))
            for j in range(i + 1, len(rows))
        )


def hexagon_quadric(space):
    """The fixed parabolic form x0x4 + x1x5 + x2x6 - x3^2 on PG(6, q)."""
    if space.n != 6:
        raise GeometryError("hexagon quadric lives on PG(6, q)")
    F = space.field
    c = [[0] * 7 for _ in range(7)]
    c[0][4] = 1
    c[1][5] = 1
    c[2][6] = 1
    c[3][3] = F.neg(1)
    return QuadraticForm(space, c, kind="parabolic")


def parabolic_form(space):
    """x0^2 + x1x2 + x3x4 + ... on PG(2m, q)."""
    if space.n % 2 != 0:
        raise GeometryError("parabolic forms live in even projective dimension")
    c = [[0] * (space.n + 1) for _ in range(space.n + 1)]
    c[0][0] = 1
    for i in range(1, space.n + 1, 2):
        c[i][i + 1] = 1
    return QuadraticForm(space, c, kind="parabolic")


def hyperbolic_form(space):
    """x0x1 + x2x3 + ... on PG(2m+1, q)."""
    if space.n % 2 != 1:
        raise GeometryError("hyperbolic forms live in odd projective dimension")
    c = [[0] * (space.n + 1) for _ in range(space.n + 1)]
    for i in range(0, space.n + 1, 2):
        c[i][i + 1] = 1
    return QuadraticForm(space, c, kind="hyperbolic")


def elliptic_form(space):
    """f(x0, x1) + x2x3 + ... with f irreducible, on PG(2m+1, q)."""
    if space.n % 2 != 1:
        raise GeometryError("elliptic forms live in odd projective dimension")
    F = space.field
    ab = None
    for a in range(F.q):
        for b in range(1, F.q):
            # t^2 + a t + b irreducible over GF(q)?
            if all(F.add(F.add(F.mul(t, t), F.mul(a, t)), b) != 0 for t in range(F.q)):
                ab = (a, b)
                break
        if ab:
            break
    a, b = ab
    c = [[0] * (space.n + 1) for _ in range(space.n + 1)]
    c[0][0] = 1
    c[0][1] = a
    c[1][1] = b
    for i in range(2, space.n + 1, 2):
        c[i][i + 1] = 1
    return QuadraticForm(space, c, kind="elliptic")


# ---------------------------------------------------------------------
# classification of 4-space sections of the hexagon quadric
# ---------------------------------------------------------------------


class SectionClass:
    """How a 4-space meets the ambient quadric."""

    __slots__ = ("tag", "vertex", "base", "point_count")

    def __init__(self, tag, vertex, base, point_count):
        self.tag = tag            # 'parabolic' | 'cone-point' | 'cone-line' | ...
        self.vertex = vertex      # Subspace (EMPTY when nondegenerate)
        self.base = base          # 'parabolic' | 'elliptic' | 'hyperbolic' | None
        self.point_count = point_count

    def __repr__(self):
        return (f"SectionClass({self.tag}, vertex_dim={self.vertex.dim}, "
                f"base={self.base}, points={self.point_count})")


def classify_section(quad, S):
    """Classify the quadric section of a 4-space S inside Q(6, q).

    The section type is read off the singular radical (the cone
    vertex) plus a Witt-index probe of the residual quadric; the
    possible outcomes for a 4-space are a nondegenerate parabolic
    section, a point-cone over an elliptic or hyperbolic 3-space
    quadric, or a line-cone over a conic.
    """
    sp = quad.space
    if S.dim != 4:
        raise GeometryError("classify_section expects a 4-space")
    rad = sp.meet(S, quad.perp(S))
    vertex_pts = [p for p in sp.subspace_points(rad) if quad.eval(p) == 0]
    vertex = sp.span(vertex_pts) if vertex_pts else EMPTY
    for p in sp.subspace_points(vertex):
        if quad.eval(p) != 0:  # pragma: no cover - singular radical is a subspace
            raise GeometryError("vertex is not totally singular")
    sing = [p for p in sp.subspace_points(S) if quad.eval(p) == 0]
    count = len(sing)
    if vertex.dim == -1:
        return SectionClass("parabolic", vertex, None, count)
    if vertex.dim == 0:
        P = vertex.basis[0]
        base = "elliptic"
        outside = [p for p in sing if not sp.contains(vertex, p)]
        for u, v in combinations(outside, 2):
            if quad.bilinear(u, v) == 0 and not sp.contains(sp.line_through(u, v), P):
                base = "hyperbolic"
                break
        return SectionClass("cone-point", vertex, base, count)
    if vertex.dim == 1:
        return SectionClass("cone-line", vertex, "parabolic", count)
    raise GeometryError(f"unexpected vertex dimension {vertex.dim} for a 4-space")
