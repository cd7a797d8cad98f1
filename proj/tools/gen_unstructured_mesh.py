#!/usr/bin/env python3
"""Unstructured Delaunay triangulation of the unit square.

Writes the plain-text mesh format read by ccg::load_mesh. The output is
deterministic for a given seed.
"""
import argparse

import numpy as np
from scipy.spatial import Delaunay


def boundary_points(m):
    s = np.linspace(0.0, 1.0, m + 1)[:-1]
    sides = [
        np.column_stack([s, np.zeros_like(s)]),
        np.column_stack([np.ones_like(s), s]),
        np.column_stack([1.0 - s, np.ones_like(s)]),
        np.column_stack([np.zeros_like(s), 1.0 - s]),
    ]
    return np.vstack(sides)


def interior_points(count, spacing, rng):
    pts = []
    grid = {}
    cell = spacing
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError("could not place interior points; lower the spacing")
        p = rng.uniform(0.5 * spacing, 1.0 - 0.5 * spacing, size=2)
        key = (int(p[0] / cell), int(p[1] / cell))
        ok = True
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for q in grid.get((key[0] + dx, key[1] + dy), ()):
                    if (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 < spacing**2:
                        ok = False
                        break
        if ok:
            pts.append(p)
            grid.setdefault(key, []).append(p)
    return np.array(pts)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--boundary-segments", type=int, default=32, help="segments per side")
    ap.add_argument("--triangles", type=int, default=3424)
    ap.add_argument("--seed", type=int, default=20240607)
    ap.add_argument("--spacing", type=float, default=0.017)
    ap.add_argument("output")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    bnd = boundary_points(args.boundary_segments)
    # planar Delaunay: triangles = 2 n - b - 2
    n_total = (args.triangles + len(bnd) + 2) // 2
    inner = interior_points(n_total - len(bnd), args.spacing, rng)
    pts = np.vstack([bnd, inner])
    tri = Delaunay(pts, qhull_options="Qbb Qc Qz Q12")
    cells = tri.simplices
    area = 0.5 * np.abs(
        (pts[cells[:, 1], 0] - pts[cells[:, 0], 0]) * (pts[cells[:, 2], 1] - pts[cells[:, 0], 1])
        - (pts[cells[:, 2], 0] - pts[cells[:, 0], 0]) * (pts[cells[:, 1], 1] - pts[cells[:, 0], 1])
    )
    cells = cells[area > 1e-12]
    with open(args.output, "w") as f:
        f.write(f"# unstructured Delaunay mesh, seed {args.seed}\n")
        f.write(f"2 {len(pts)} {len(cells)}\n")
        for p in pts:
            f.write(f"{p[0]:.17g} {p[1]:.17g}\n")
        for c in cells:
            f.write(f"{c[0]} {c[1]} {c[2]}\n")
    print(f"{len(pts)} vertices, {len(cells)} triangles")


if __name__ == "__main__":
    main()
