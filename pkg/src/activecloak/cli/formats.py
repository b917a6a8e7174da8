"""On-disk formats: field grids, coefficient files, heatmaps and the manifest.

Field grid (text)
    Header line ``# x y re im`` then one record per sample, row-major with
    x varying fastest and y increasing, every number written with 17
    significant digits. Singular samples are written as ``nan nan``. A JSON
    sidecar ``<file>.json`` holds window, resolution and provenance.

Coefficient file (text)
    Comment lines ``# key value`` carry k, the boundary circle, the method
    and one ``# device j x y arc_start arc_end`` line per device, followed by
    ``j m re im`` records sorted by (j, m).

Heatmap (binary PPM, P6)
    Re(u) clipped to [-c, c] maps linearly onto blue (0, 0, 255) -> white
    (255, 255, 255) -> red (255, 0, 0); singular pixels are black. The top
    image row is the largest y.
"""

import hashlib
import json
import os

import numpy as np

from activecloak.fields import FieldGrid
from activecloak.geometry import circle_curve, device_layout
from activecloak.multipole_cloak import CloakSolution, MultipoleSource
from activecloak.specfun import WaveContext

GRID_HEADER = "# x y re im"


def _g(v):
    return format(float(v), ".17g")


def write_grid(path, grid, provenance=None):
    pts = grid.points().reshape(-1, 2)
    vals = grid.values.reshape(-1)
    lines = [GRID_HEADER]
    for (x, y), v in zip(pts, vals):
        lines.append(f"{_g(x)} {_g(y)} {_g(v.real)} {_g(v.imag)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = {
        "window": list(grid.window),
        "resolution": list(grid.resolution),
        "order": "row-major, x fastest, y increasing",
        "singular_count": int(np.count_nonzero(grid.singular)),
        "provenance": provenance or {},
    }
    with open(str(path) + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [str(path), str(path) + ".json"]


def read_grid(path):
    with open(str(path) + ".json") as fh:
        meta = json.load(fh)
    nx, ny = meta["resolution"]
    data = np.loadtxt(path, comments="#", ndmin=2)
    vals = (data[:, 2] + 1j * data[:, 3]).reshape(ny, nx)
    bad = ~np.isfinite(vals)
    return FieldGrid(tuple(meta["window"]), (nx, ny), vals, bad)


def write_coefficients(path, sol):
    layout = sol.layout
    curve = layout.curve
    radius = float(np.hypot(*(curve.points[0] - curve.centroid)))
    lines = [
        f"# k {_g(sol.ctx.k)}",
        f"# method {sol.method}",
        f"# circle {_g(curve.centroid[0])} {_g(curve.centroid[1])} {_g(radius)} {curve.n}",
    ]
    for j, (pos, (a, b)) in enumerate(zip(layout.positions, layout.arcs)):
        lines.append(f"# device {j} {_g(pos[0])} {_g(pos[1])} {_g(a)} {_g(b)}")
    lines.append("# j m re im")
    for j, src in enumerate(sol.sources):
        for m, c in zip(range(-src.M, src.M + 1), src.coeffs):
            lines.append(f"{j} {m} {_g(c.real)} {_g(c.imag)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return [str(path)]


def read_coefficients(path):
    """Rebuild the :class:`CloakSolution` written by :func:`write_coefficients`."""
    header = {}
    devices = []
    rows = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#":
                if len(parts) > 1 and parts[1] == "device":
                    devices.append([float(p) for p in parts[3:7]])
                elif len(parts) > 2:
                    header[parts[1]] = parts[2:]
                continue
            rows.append((int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])))
    ctx = WaveContext(float(header["k"][0]))
    cx, cy, radius = (float(v) for v in header["circle"][:3])
    curve = circle_curve(radius, (cx, cy), int(header["circle"][3]))
    dev = np.array(devices)
    layout = device_layout(dev[:, :2], dev[:, 2:4], curve)
    sources = []
    for j in range(len(dev)):
        recs = sorted((m, complex(re, im)) for jj, m, re, im in rows if jj == j)
        sources.append(MultipoleSource(dev[j, :2], np.array([c for _, c in recs])))
    return CloakSolution(ctx, layout, tuple(sources), header["method"][0])


def colormap(re, clip=1.0):
    """Blue-white-red RGB bytes for real values; NaN maps to black."""
    re = np.asarray(re, dtype=float)
    t = np.clip(np.nan_to_num(re, nan=0.0) / clip, -1.0, 1.0)
    rgb = np.empty(re.shape + (3,))
    neg = t < 0
    # toward blue: red and green fall; toward red: green and blue fall
    rgb[..., 0] = np.where(neg, 1.0 + t, 1.0)
    rgb[..., 1] = 1.0 - np.abs(t)
    rgb[..., 2] = np.where(neg, 1.0, 1.0 - t)
    out = np.rint(255 * rgb).astype(np.uint8)
    out[~np.isfinite(re)] = 0
    return out


def write_ppm(path, grid, clip=1.0):
    if not clip > 0:
        raise ValueError("clip must be positive")
    rgb = colormap(grid.values.real, clip)[::-1]
    ny, nx = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
    return [str(path)]


def read_ppm(path):
    with open(path, "rb") as fh:
        data = fh.read()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError(f"{path}: not an 8-bit P6 image")
    nx, ny = (int(v) for v in dims.split())
    return np.frombuffer(rest, dtype=np.uint8).reshape(ny, nx, 3)


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_dir, files):
    """List every produced file (relative to ``out_dir``) with its digest."""
    entries = []
    for f in sorted(set(files)):
        rel = os.path.relpath(f, out_dir)
        entries.append({"file": rel, "sha256": sha256(f), "bytes": os.path.getsize(f)})
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump({"files": entries}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
