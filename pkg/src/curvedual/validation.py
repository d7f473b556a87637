"""Cross-check diagnostics for convex graph surfaces.

Every check here ties two independent computational paths together: the
Steiner point of the stereographic image against the symmetry of the
source, inscribed and circumscribed geodesic balls against polarity, and
the spherical curvature pipeline against the Euclidean curvature of the
projected surface through the conformal relation.  The aggregate report
is the standard health check run on solver output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (GraphSurface, curvature_field, rho_from_r,
                       stereographic_project)
from .polar import support_test
from .solver import PrescribedData
from .spectral import QuadratureGrid, build_grid


def steiner_point(surface: GraphSurface,
                  grid: QuadratureGrid | None = None) -> np.ndarray:
    """Curvature-weighted centroid of the stereographic image.

    The image of the surface under stereographic projection is weighted
    by its Euclidean Gauss curvature and averaged over the total measure
    of the parameter sphere:

        p = (1 / 4 pi) sum_q w_q y_q K_q J_q

    with J the area element of the image relative to the round measure.
    For a surface invariant under a fixed-point-free symmetry group the
    point vanishes; for an off-center surface it does not, which makes
    it the standard symmetry diagnostic.  Components are in the frame of
    the surface's pole.
    """
    if grid is None:
        grid = build_grid(surface.L_max)
    st = stereographic_project(surface, grid)
    density = grid.weights * st.gauss_curvature * st.area_jacobian
    return (st.y * density[:, None]).sum(axis=0) / (4.0 * np.pi)


def enclosing_balls(surface: GraphSurface,
                    grid: QuadratureGrid | None = None) -> tuple[float, float]:
    """Radii (r_in, r_out) of centered balls sandwiching the surface.

    Computed as the extreme radial node values of the graph, so the
    inner ball is inscribed and the outer ball circumscribed about the
    enclosed body.
    """
    if grid is None:
        grid = build_grid(surface.L_max)
    fld = curvature_field(surface, grid)
    return float(fld.r.min()), float(fld.r.max())


def stereographic_residual(surface: GraphSurface,
                           grid: QuadratureGrid | None = None) -> float:
    """Max node error of the conformal relation between curvature paths.

    The spherical shape operator scaled by the conformal factor must
    equal the Euclidean shape operator of the stereographic image plus
    the normal derivative of the conformal factor times the identity.
    The two sides come from fully independent differentiations, so this
    is a strong end-to-end consistency measure.
    """
    if grid is None:
        grid = build_grid(surface.L_max)
    fld = curvature_field(surface, grid)
    st = stereographic_project(surface, grid)
    e_psi = 1.0 / (1.0 + rho_from_r(fld.r) ** 2 / 4.0)
    lhs = e_psi[:, None, None] * fld.shape_operator
    eye = np.broadcast_to(np.eye(2), lhs.shape)
    rhs = st.shape_operator + st.conformal_term[:, None, None] * eye
    return float(np.max(np.abs(lhs - rhs)))


@dataclass
class DiagnosticsReport:
    """Aggregate health check of a surface, with optional residual stats.

    ``support_margin`` is the largest off-diagonal support inner product
    between the surface and its dual; strict convexity makes it
    negative.  ``stereographic_residual`` and ``support_margin`` are NaN
    for non-convex input, where neither check is defined.
    """

    steiner_point: np.ndarray
    steiner_magnitude: float
    ball_radii: tuple
    bound_check: tuple
    convex: bool
    stereographic_residual: float
    support_margin: float
    residual_stats: dict | None = None

    @property
    def curvature_within_brackets(self) -> bool:
        """Empirical solved-surface brackets: kappa in [1e-3, 1e3]."""
        kmin, kmax = self.bound_check
        return bool(self.convex and kmin >= 1e-3 and kmax <= 1e3)

    def as_dict(self) -> dict:
        out = {
            "steiner_point": [float(v) for v in self.steiner_point],
            "steiner_magnitude": self.steiner_magnitude,
            "ball_radii": [float(v) for v in self.ball_radii],
            "bound_check": [float(v) for v in self.bound_check],
            "convex": self.convex,
            "curvature_within_brackets": self.curvature_within_brackets,
            "stereographic_residual": self.stereographic_residual,
            "support_margin": self.support_margin,
        }
        if self.residual_stats is not None:
            out["residual_stats"] = self.residual_stats
        return out


def _residual_statistics(F, f, fld, grid) -> dict:
    values = F(fld.kappa)
    if isinstance(f, PrescribedData):
        target = f.values(fld.r, grid.theta, grid.phi)
    else:
        target = np.broadcast_to(np.asarray(f, dtype=float), values.shape)
    resid = values - target
    return {"max_abs": float(np.max(np.abs(resid))),
            "rms": float(np.sqrt(np.mean(resid**2)))}


def full_report(surface: GraphSurface, F=None, f=None,
                support_samples: int = 2000,
                seed: int = 0) -> DiagnosticsReport:
    """Run every diagnostic on one surface.

    Parameters
    ----------
    surface : GraphSurface
        Surface to examine; need not be convex.
    F, f : optional
        Curvature function and prescribed data (PrescribedData, scalar,
        or per-node array).  When both are given the report includes the
        statistics of the equation residual F(kappa) - f.
    support_samples : int
        Node pairs drawn for the polarity support check.
    seed : int
        Seed for the support pair sampling.
    """
    grid = build_grid(surface.L_max)
    fld = curvature_field(surface, grid)
    convex = bool(fld.kappa_min > 0.0)
    p = steiner_point(surface, grid)

    if convex:
        stereo = stereographic_residual(surface, grid)
        support = support_test(surface, sample_count=support_samples,
                               seed=seed)
        support_margin = support.max_off_diagonal
    else:
        stereo = float("nan")
        support_margin = float("nan")

    stats = None
    if F is not None and f is not None:
        stats = _residual_statistics(F, f, fld, grid)

    return DiagnosticsReport(
        steiner_point=p,
        steiner_magnitude=float(np.linalg.norm(p)),
        ball_radii=(float(fld.r.min()), float(fld.r.max())),
        bound_check=(fld.kappa_min, fld.kappa_max),
        convex=convex,
        stereographic_residual=stereo,
        support_margin=support_margin,
        residual_stats=stats)
