"""Eigenvalue machinery and the expander-style bounds.

The bipartite incidence graph of a polygon with N points, L lines and
biadjacency matrix B has eigenvalues +/- sqrt(mu) for mu running over
the spectrum of B Bt, so the second eigenvalue is computed from the
smaller symmetric product rather than the full (N+L) x (N+L) matrix.

Eigenvalues come from a cyclic Jacobi sweep (deterministic, plain
rotations, off-diagonal norm target 1e-12); the tests cross-check it
against independently computed spectra.
"""

import math
from dataclasses import dataclass

import numpy as np

TOL = 1e-9


class SpectralError(ValueError):
    pass


def eigen_sym(mat, off_target=1e-12, max_sweeps=60):
    """Eigenvalues of a symmetric matrix via cyclic Jacobi rotations.

    Input must be exactly symmetric (intended for integer matrices).
    Returns eigenvalues sorted in descending order.
    """
    a = np.array(mat, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpectralError("eigen_sym needs a square matrix")
    if not np.array_equal(a, a.T):
        raise SpectralError("matrix is not symmetric")
    n = a.shape[0]
    # the stop target scales with the matrix so convergence is not
    # asked to beat floating-point resolution
    scale = max(1.0, math.sqrt((a * a).sum()))
    for _ in range(max_sweeps):
        strict = a - np.diag(np.diag(a))
        off = math.sqrt((strict * strict).sum())
        if off <= off_target * scale:
            break
        for p in range(n - 1):
            for q_ in range(p + 1, n):
                apq = a[p, q_]
                if apq == 0.0:
                    continue
                diff = a[q_, q_] - a[p, p]
                if abs(apq) < 1e-300 * max(1.0, abs(diff)):
                    a[p, q_] = a[q_, p] = 0.0  # below rotation resolution
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # asymptotic root, still kills the pivot
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q_, :].copy()
                a[p, :] = c * rp - s * rq
                a[q_, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q_].copy()
                a[:, p] = c * cp - s * cq
                a[:, q_] = s * cp + c * cq
    else:
        raise SpectralError("Jacobi sweep did not converge")
    return sorted(np.diag(a).tolist(), reverse=True)


def biadjacency(poly):
    b = np.zeros((poly.n_points, poly.n_lines), dtype=np.int64)
    for li, lp in enumerate(poly.line_points):
        for pi in lp:
            b[pi, li] = 1
    return b


def second_eigenvalue(poly):
    """(lambda1, lambda2) of the bipartite incidence graph."""
    b = biadjacency(poly)
    ev = eigen_sym(b @ b.T)
    lam1 = math.sqrt(max(ev[0], 0.0))
    lam2 = math.sqrt(max(ev[1], 0.0))
    return lam1, lam2


def mixing_bound(poly, S, T, lam2=None):
    """Edge-density deviation of (S, T) against the mixing-lemma bound.

    S is a set of point ids, T a set of line ids.  Returns a dict with
    both sides of |e(S,T)/|E| - alpha*beta| <= (lam2/lam1) *
    sqrt(alpha*beta*(1-alpha)(1-beta)).
    """
    S = set(S)
    T = set(T)
    d = poly.order[0] + 1
    n_edges = poly.n_lines * d
    e = sum(1 for li in T for pi in poly.line_points[li] if pi in S)
    alpha = len(S) / poly.n_points
    beta = len(T) / poly.n_lines
    if lam2 is None:
        lam1, lam2 = second_eigenvalue(poly)
    else:
        lam1 = float(d)
    lhs = abs(e / n_edges - alpha * beta)
    rhs = (lam2 / lam1) * math.sqrt(alpha * beta * (1 - alpha) * (1 - beta))
    return {"edges": e, "lhs": lhs, "rhs": rhs, "holds": lhs <= rhs + TOL}


@dataclass
class BoundReport:
    name: str
    params: dict
    value: float
    floor: int | None
    note: str = ""


def subgraph_ratio_bounds(d, k, lam):
    """Vertex-fraction window for a k-regular induced subgraph of a
    d-regular graph whose non-trivial eigenvalues are within +/- lam."""
    if d <= lam:
        raise SpectralError("bounds need d > lambda")
    lo = (k - lam) / (d - lam)
    hi = (k + lam) / (d + lam)
    return lo, hi


def polygon_second_eigenvalue_theory(gon, q):
    """The known second eigenvalue of the rank-2 incidence graphs."""
    return math.sqrt({3: 1, 4: 2, 6: 3}[gon] * q)


def polygon_size(gon, q):
    """Points (= lines) of the order-q polygon with 2*gon-gon girth."""
    if gon == 3:
        return q * q + q + 1
    if gon == 4:
        return (q + 1) * (q * q + 1)
    if gon == 6:
        return (q + 1) * (q ** 4 + q * q + 1)
    raise SpectralError(f"no generalized polygon of gonality {gon}")


def tgood_upper_bound(gon, q, t=1):
    """Upper bound on the size of a t-good structure, from the ratio window.

    gon=3: t(q + sqrt(q) + 1); gon=4: t(q+1)(q + sqrt(2q) + 1);
    gon=6: t(q+1)(q^2+1)(q + sqrt(3q) + 1).
    """
    rq = math.sqrt(q)
    if gon == 3:
        val = t * (q + rq + 1)
    elif gon == 4:
        val = t * (q + 1) * (q + math.sqrt(2 * q) + 1)
    elif gon == 6:
        val = t * (q + 1) * (q * q + 1) * (q + math.sqrt(3 * q) + 1)
    else:
        raise SpectralError(f"no generalized polygon of gonality {gon}")
    return BoundReport(
        name="tgood-upper",
        params={"gon": gon, "q": q, "t": t},
        value=val,
        floor=math.floor(val + TOL),
    )


def moore_bound(k, g):
    """Minimum vertices of a k-regular graph of girth g."""
    if k < 2 or g < 3:
        raise SpectralError("moore_bound needs k >= 2, g >= 3")
    if g % 2 == 0:
        r = (g - 2) // 2
        val = 2 * sum((k - 1) ** i for i in range(r + 1))
    else:
        r = (g - 3) // 2
        val = 1 + k * sum((k - 1) ** i for i in range(r + 1))
    return BoundReport(name="moore", params={"k": k, "g": g}, value=float(val),
                       floor=val)


def cage_bounds(q, g):
    """Upper bound on the (q+1, g)-cage order from removing a 1-good
    structure; g=8 needs square q (the structure uses a square-order
    subplane)."""
    if g == 8:
        rq = math.isqrt(q)
        if rq * rq != q:
            raise SpectralError("g=8 cage bound needs square q")
        val = 2 * (q ** 3 - q * rq - q)
    elif g == 12:
        val = 2 * (q ** 5 - 3 * q ** 3)
    else:
        raise SpectralError("cage bound available for g in {8, 12}")
    return BoundReport(name="cage-upper", params={"q": q, "g": g}, value=float(val),
                       floor=val, note=f"removing a 1-good structure from girth-{g} host")
