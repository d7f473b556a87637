"""File formats: surface JSON, report JSON, node CSVs, and mesh export.

All floating-point output is formatted with 17 significant digits, which
round-trips IEEE doubles exactly and makes repeated runs byte-identical.
Report writers never include timing or host information for the same
reason.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import DataError
from .geometry import (CurvatureField, GraphSurface, stereographic_project)
from .polar import DualSamples
from .spectral import HarmonicCoeffs, build_grid, num_coeffs, synthesize_at


def format_float(x: float) -> str:
    """Fixed 17-significant-digit decimal form of a double."""
    return format(float(x), ".17g")


def dumps_canonical(obj, indent: int = 0) -> str:
    """Serialize dicts/lists/scalars to JSON with fixed float formatting.

    The standard library serializer hardwires shortest-round-trip float
    text; the deterministic-output contract here wants a fixed digit
    count instead, hence this small emitter.  Key order is preserved as
    given (all callers build dicts in a fixed order).
    """
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f'{inner}"{k}": {dumps_canonical(v, indent + 2).lstrip()}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating))
               and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(_scalar(v) for v in seq) + "]"
        parts = [inner + dumps_canonical(v, indent + 2).lstrip() for v in seq]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    return _scalar(obj)


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if np.isnan(x):
            return '"nan"'
        if np.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format_float(x)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError(f"cannot serialize {type(v).__name__}")


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(obj) + "\n")


# --------------------------------------------------------------- surface

def surface_to_dict(surface: GraphSurface) -> dict:
    radial = []
    for l in range(surface.L_max + 1):
        for m in range(-l, l + 1):
            value = surface.radial[l, m]
            if value != 0.0:
                radial.append({"l": l, "m": m, "value": float(value)})
    return {"n": surface.n,
            "pole": [float(v) for v in surface.pole],
            "L_max": surface.L_max,
            "gauge_tau0": float(surface.gauge_tau0),
            "radial": radial}


def surface_from_dict(doc: dict) -> GraphSurface:
    try:
        n = int(doc["n"])
        pole = np.asarray(doc["pole"], dtype=float)
        L_max = int(doc["L_max"])
        gauge_tau0 = float(doc["gauge_tau0"])
        entries = doc["radial"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed surface document: {exc}") from exc
    unknown = set(doc) - {"n", "pole", "L_max", "gauge_tau0", "radial"}
    if unknown:
        raise DataError(f"unknown surface keys: {sorted(unknown)}")
    if L_max < 0 or pole.shape != (4,):
        raise DataError("surface document has invalid L_max or pole")
    coeffs = HarmonicCoeffs.zeros(L_max)
    for entry in entries:
        try:
            l, m, value = int(entry["l"]), int(entry["m"]), float(entry["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed radial entry {entry!r}") from exc
        if not (0 <= l <= L_max and -l <= m <= l):
            raise DataError(f"radial entry (l={l}, m={m}) outside truncation "
                            f"L_max={L_max}")
        coeffs[l, m] = value
    return GraphSurface(n=n, pole=pole, radial=coeffs, gauge_tau0=gauge_tau0)


def write_surface(path, surface: GraphSurface) -> None:
    write_json(path, surface_to_dict(surface))


def read_surface(path) -> GraphSurface:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"invalid JSON in {path}: {exc}") from exc
    return surface_from_dict(doc)


# ------------------------------------------------------------------- csv

def _write_rows(path, header: list, columns: list) -> None:
    rows = np.stack([np.asarray(c, dtype=float) for c in columns], axis=1)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) for v in row])


def write_field_csv(path, theta, phi, values) -> None:
    """Scalar field at nodes; columns theta, phi, value."""
    _write_rows(path, ["theta", "phi", "value"], [theta, phi, values])


def write_nodes_csv(path, field: CurvatureField) -> None:
    """Full per-node geometry record of a curvature field."""
    header = ["theta", "phi", "r", "kappa1", "kappa2",
              "x0", "x1", "x2", "x3", "n0", "n1", "n2", "n3"]
    cols = [field.grid.theta, field.grid.phi, field.r,
            field.kappa[:, 0], field.kappa[:, 1]]
    cols += [field.x[:, i] for i in range(4)]
    cols += [field.normal[:, i] for i in range(4)]
    _write_rows(path, header, cols)


def write_dual_samples_csv(path, samples: DualSamples) -> None:
    """Dual-map samples: source chart angles to dual chart and curvatures."""
    header = ["theta", "phi", "eta_theta", "eta_phi", "r_star", "kt1", "kt2"]
    _write_rows(path, header,
                [samples.theta, samples.phi, samples.eta_theta,
                 samples.eta_phi, samples.r_star,
                 samples.kappa_dual[:, 0], samples.kappa_dual[:, 1]])


# -------------------------------------------------------------- obj mesh

def write_obj(path, surface: GraphSurface) -> None:
    """Triangle mesh of the stereographic image for external viewers.

    The lat-long quadrature grid provides the vertex rows; quads are
    split into triangles, the seam wraps in longitude, and the two polar
    gaps are closed with fans around explicit pole vertices.
    """
    grid = build_grid(surface.L_max)
    st = stereographic_project(surface, grid)
    nt, nphi = grid.n_theta, grid.n_phi
    y = st.y.reshape(nt, nphi, 3)

    from .geometry import rho_from_r
    pole_dirs = np.array([0.0, np.pi])
    r_poles = synthesize_at(surface.radial, pole_dirs, np.zeros(2))
    north = np.array([0.0, 0.0, rho_from_r(r_poles[0])])
    south = np.array([0.0, 0.0, -rho_from_r(r_poles[1])])

    lines = []
    for i in range(nt):
        for j in range(nphi):
            lines.append("v " + " ".join(format_float(v) for v in y[i, j]))
    lines.append("v " + " ".join(format_float(v) for v in north))
    lines.append("v " + " ".join(format_float(v) for v in south))

    def vid(i, j):
        return i * nphi + (j % nphi) + 1

    north_id = nt * nphi + 1
    south_id = nt * nphi + 2
    for i in range(nt - 1):
        for j in range(nphi):
            a, b = vid(i, j), vid(i, j + 1)
            c, d = vid(i + 1, j), vid(i + 1, j + 1)
            lines.append(f"f {a} {c} {b}")
            lines.append(f"f {b} {c} {d}")
    for j in range(nphi):
        lines.append(f"f {north_id} {vid(0, j)} {vid(0, j + 1)}")
        lines.append(f"f {south_id} {vid(nt - 1, j + 1)} {vid(nt - 1, j)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
