"""Batch report: CSV tables plus rendered figures.

Everything here is derived from library calls with fixed inputs, so
the CSV and JSON artifacts are byte-identical across runs; figures are
rendered with the Agg backend into PNGs next to them.
"""

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .polygons import build_polygon
from .search import class_table, classify_solutions, lift_signatures, \
    parallel_enumerate
from .permgroup import collineation_generators
from .spectral import (cage_bounds, moore_bound,
                       polygon_second_eigenvalue_theory, second_eigenvalue,
                       tgood_upper_bound)

SPECTRUM_CASES = (("pg2", 2), ("pg2", 3), ("pg2", 4), ("pg2", 5),
                  ("w3", 2), ("w3", 3), ("w3", 4))
CAGE_G8_QS = (4, 9, 16, 25)            # square prime powers
CAGE_G12_QS = (2, 3, 4, 5, 7, 8, 9)
TGOOD_CASES = ((3, 4, 1), (4, 3, 1), (4, 4, 1), (6, 2, 1), (6, 3, 1))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _fmt(v):
    return f"{v:.9f}"


def _cage_rows():
    rows = []
    for g, qs in ((8, CAGE_G8_QS), (12, CAGE_G12_QS)):
        for q in qs:
            upper = cage_bounds(q, g)
            lower = moore_bound(q + 1, g)
            rows.append((g, q, q + 1, lower.floor, upper.floor))
    return rows


def _cage_figure(path, rows):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, g in zip(axes, (8, 12)):
        qs = [r[1] for r in rows if r[0] == g]
        lo = [r[3] for r in rows if r[0] == g]
        hi = [r[4] for r in rows if r[0] == g]
        ax.plot(qs, lo, "o-", label="Moore lower bound")
        ax.plot(qs, hi, "s-", label="subgraph upper bound")
        ax.set_yscale("log")
        ax.set_xlabel("q (degree q+1)")
        ax.set_ylabel("vertices")
        ax.set_title(f"girth {g}")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": "polyforge"})
    plt.close(fig)


def _spectrum_rows():
    rows = []
    for kind, q in SPECTRUM_CASES:
        poly = build_polygon(kind, q)
        lam1, lam2 = second_eigenvalue(poly)
        theory = polygon_second_eigenvalue_theory(poly.gon, q)
        rows.append((kind, q, _fmt(lam1), _fmt(lam2), _fmt(theory),
                     _fmt(abs(lam2 - theory))))
    return rows


def _spectrum_figure(path, rows):
    fig, ax = plt.subplots(figsize=(5, 4.4))
    theory = [float(r[4]) for r in rows]
    computed = [float(r[3]) for r in rows]
    labels = [f"{r[0]} q={r[1]}" for r in rows]
    lim = (0, max(theory) * 1.15)
    ax.plot(lim, lim, "k--", linewidth=0.8, label="computed = theory")
    ax.plot(theory, computed, "o")
    for x, y, s in zip(theory, computed, labels):
        ax.annotate(s, (x, y), textcoords="offset points", xytext=(4, 4),
                    fontsize=7)
    ax.set_xlim(lim)
    ax.set_ylim(lim)
    ax.set_xlabel("second eigenvalue, closed form")
    ax.set_ylabel("second eigenvalue, computed")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": "polyforge"})
    plt.close(fig)


def _tgood_rows():
    rows = []
    for gon, q, t in TGOOD_CASES:
        rep = tgood_upper_bound(gon, q, t)
        rows.append((gon, q, t, _fmt(rep.value), rep.floor))
    return rows


def _class_rows(classes):
    return [(c.subgraph_size, c.stabilizer_order,
             " ".join(map(str, c.orbits_subgraph)),
             " ".join(map(str, c.orbits_structure)),
             int(c.from_lift), c.class_size) for c in classes]


def _class_figure(path, classes):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    sizes = sorted({c.subgraph_size for c in classes})
    counts = [sum(1 for c in classes if c.subgraph_size == s) for s in sizes]
    ax.bar([str(s) for s in sizes], counts)
    ax.set_xlabel("complement subgraph size")
    ax.set_ylabel("solution classes")
    ax.set_title("classes of 1-good structures, quadrangle of order 3")
    ax.set_yticks(range(0, max(counts) + 1))
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": "polyforge"})
    plt.close(fig)


def write_report(outdir, skip_search=False):
    """Render every report artifact into outdir; returns written paths.

    Nothing here samples, so there is no seed; outputs depend only on
    the library and the fixed case lists above.
    """
    os.makedirs(outdir, exist_ok=True)
    files = []

    def out(name):
        path = os.path.join(outdir, name)
        files.append(path)
        return path

    cage = _cage_rows()
    _write_csv(out("cage_bounds.csv"),
               ("girth", "q", "degree", "moore_lower", "subgraph_upper"),
               cage)
    _cage_figure(out("fig_cage_bounds.png"), cage)

    spectra = _spectrum_rows()
    _write_csv(out("spectra.csv"),
               ("kind", "q", "lambda1", "lambda2", "theory", "difference"),
               spectra)
    _spectrum_figure(out("fig_spectra.png"), spectra)

    _write_csv(out("tgood_bounds.csv"),
               ("gonality", "q", "t", "value", "floor"), _tgood_rows())

    if not skip_search:
        poly = build_polygon("w3", 3)
        solutions = parallel_enumerate(poly, jobs=1)
        group = collineation_generators(poly)
        classes = classify_solutions(solutions, group,
                                     lift_masks=lift_signatures(poly))
        _write_csv(out("classes_w3_q3.csv"),
                   ("subgraph_size", "stabilizer_order", "orbits_subgraph",
                    "orbits_structure", "from_lift", "class_size"),
                   _class_rows(classes))
        with open(out("classes_w3_q3.txt"), "w") as fh:
            fh.write(class_table(classes) + "\n")
        _class_figure(out("fig_classes_w3_q3.png"), classes)

    return files
