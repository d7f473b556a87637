"""Homotopy continuation for prescribed-curvature graphs over the sphere.

The equation solved is, per quadrature node,

    residual(u, t) = F(principal curvatures of graph u) - (t f + (1 - t) c)

with ``f`` the prescribed positive data and ``c`` a constant chosen below
its minimum.  At t = 0 the exact solution is a geodesic sphere; the path
is followed to t = 1 by damped Newton steps in the radial coefficient
vector, restricted to the subspace invariant under a fixed-point-free
symmetry group.  Restricting removes the three-dimensional kernel of the
linearization spanned by the degree-1 harmonics, which otherwise makes
the Newton system singular at every solution.

Jacobians are assembled column by column with central finite differences
of the spectrally accurate residual; all perturbed evaluations are
batched through the curvature kernels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels, spectral
from .curvature import CurvatureFunction, class_K_check
from .errors import (DataError, GroupError, NewtonError,
                     SingularJacobianError)
from .errors import DomainError
from .geometry import (HEMISPHERE_MARGIN, GraphSurface, curvature_field,
                       sphere_surface)
from .spectral import (HarmonicCoeffs, QuadratureGrid, build_grid,
                       lm_index, num_coeffs)

_MATCH_TOL = 1e-12
_SOLVE_RCOND = 1e-12
_KERNEL_RCOND = 1e-8


# ------------------------------------------------------------- symmetry

def rotate_angles(A: np.ndarray, theta: np.ndarray, phi: np.ndarray):
    """Chart angles of A xi for unit directions xi given by (theta, phi)."""
    st = np.sin(theta)
    xi = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)],
                  axis=-1)
    img = xi @ np.asarray(A, dtype=float).T
    theta2 = np.arctan2(np.hypot(img[..., 0], img[..., 1]), img[..., 2])
    phi2 = np.mod(np.arctan2(img[..., 1], img[..., 0]), 2.0 * np.pi)
    return theta2, phi2


@dataclass
class SymmetryGroup:
    """Finite group of orthogonal transformations of the parameter sphere.

    Elements are 3 x 3 orthogonal matrices.  ``validate`` checks the
    group axioms on the element list and that no element other than the
    identity fixes a direction, the condition that keeps degree-1
    harmonics out of the invariant subspace.
    """

    name: str
    elements: list

    def __post_init__(self):
        self.elements = [np.asarray(A, dtype=float) for A in self.elements]
        for A in self.elements:
            if A.shape != (3, 3):
                raise GroupError(f"group element has shape {A.shape}, "
                                 "expected (3, 3)")

    @classmethod
    def antipodal(cls) -> "SymmetryGroup":
        """The two-element group generated by xi -> -xi."""
        return cls(name="antipodal", elements=[np.eye(3), -np.eye(3)])

    @property
    def order(self) -> int:
        return len(self.elements)

    def _index_of(self, M: np.ndarray) -> int:
        for k, A in enumerate(self.elements):
            if np.max(np.abs(A - M)) <= _MATCH_TOL:
                return k
        return -1

    def validate(self) -> None:
        """Check orthogonality, the group axioms, and freeness.

        Raises
        ------
        GroupError
            With a diagnostic naming the failing element; for a fixed
            direction the offending unit vector is included.
        """
        for k, A in enumerate(self.elements):
            if np.max(np.abs(A.T @ A - np.eye(3))) > 1e-10:
                raise GroupError(f"element {k} is not orthogonal")
        if self._index_of(np.eye(3)) < 0:
            raise GroupError("identity element missing")
        for k, A in enumerate(self.elements):
            if self._index_of(A.T) < 0:
                raise GroupError(f"inverse of element {k} not in the group")
            for kk, B in enumerate(self.elements):
                if self._index_of(A @ B) < 0:
                    raise GroupError(
                        f"product of elements {k} and {kk} not in the group")
        for k, A in enumerate(self.elements):
            if np.max(np.abs(A - np.eye(3))) <= _MATCH_TOL:
                continue
            if abs(np.linalg.det(A - np.eye(3))) < 1e-12:
                vals, vecs = np.linalg.eig(A)
                j = int(np.argmin(np.abs(vals - 1.0)))
                v = np.real(vecs[:, j])
                v /= np.linalg.norm(v)
                raise GroupError(
                    f"element {k} fixes the direction {v.tolist()}; the "
                    "group must act freely on the parameter sphere")


@dataclass
class InvariantBasis:
    """Orthonormal basis of an invariant coefficient subspace.

    ``matrix`` has one column per basis vector; ``degrees`` labels each
    column with the spherical-harmonic degree it lives in, which the
    construction preserves.
    """

    L_max: int
    matrix: np.ndarray   # (num_coeffs, dim)
    degrees: np.ndarray  # (dim,)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def columns_of_degree(self, l: int) -> np.ndarray:
        return np.nonzero(self.degrees == l)[0]


def full_basis(L_max: int) -> InvariantBasis:
    """Identity basis of the whole coefficient space (no symmetry)."""
    K = num_coeffs(L_max)
    degrees = np.array([spectral.index_lm(i)[0] for i in range(K)])
    return InvariantBasis(L_max=L_max, matrix=np.eye(K), degrees=degrees)


@dataclass
class InvariantProjector:
    """Orthogonal projector onto the group-invariant coefficients."""

    group: SymmetryGroup
    L_max: int
    matrix: np.ndarray   # (num_coeffs, num_coeffs)
    basis: InvariantBasis


def invariant_projector(group: SymmetryGroup, L_max: int
                        ) -> InvariantProjector:
    """Build the orbit-average projector and its degree-labeled basis.

    The average of the coefficient-space actions of the group elements.
    Rotations preserve harmonic degree, so the projector is block
    diagonal per degree and the basis is extracted degree by degree from
    a symmetric eigendecomposition of each block.  For a free group the
    degree-1 block vanishes entirely.
    """
    group.validate()
    grid = build_grid(max(L_max, 4))
    K = num_coeffs(L_max)
    Yw = grid.ops.Y[:, :K].T * grid.weights
    P = np.zeros((K, K))
    for A in group.elements:
        th2, ph2 = rotate_angles(A, grid.theta, grid.phi)
        P += Yw @ spectral.basis_matrix(L_max, th2, ph2)
    P /= group.order

    cols = []
    degs = []
    for l in range(L_max + 1):
        sl = slice(l * l, (l + 1) * (l + 1))
        block = P[sl, sl]
        vals, vecs = np.linalg.eigh(0.5 * (block + block.T))
        for j in range(len(vals)):
            if vals[j] > 0.5:
                v = np.zeros(K)
                v[sl] = vecs[:, j]
                cols.append(v)
                degs.append(l)
    if cols:
        B = np.stack(cols, axis=1)
    else:
        B = np.zeros((K, 0))
    basis = InvariantBasis(L_max=L_max, matrix=B,
                           degrees=np.array(degs, dtype=int))
    return InvariantProjector(group=group, L_max=L_max, matrix=P,
                              basis=basis)


# ------------------------------------------------------------ input data

def _dense_angles(n_theta: int = 181, n_phi: int = 360):
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    T, Ph = np.meshgrid(theta, phi, indexing="ij")
    return T.ravel(), Ph.ravel()


@dataclass
class PrescribedData:
    """Prescribed positive data f and the homotopy base constant c.

    The data factorizes as f(r, xi) = exp(a(r)) * exp(b(xi)) with ``a``
    a polynomial in the radial coordinate (coefficients in ascending
    order) and ``b`` a band-limited field supported on group-invariant
    harmonics.  The exponential form keeps f positive by construction.
    """

    a_poly: np.ndarray
    b: HarmonicCoeffs
    c: float

    def __post_init__(self):
        self.a_poly = np.atleast_1d(np.asarray(self.a_poly, dtype=float))
        self.c = float(self.c)

    def radial_factor(self, r: np.ndarray) -> np.ndarray:
        return np.exp(npoly.polyval(np.asarray(r, dtype=float), self.a_poly))

    def angular_factor(self, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        return np.exp(spectral.synthesize_at(self.b, theta, phi))

    def values(self, r: np.ndarray, theta: np.ndarray,
               phi: np.ndarray) -> np.ndarray:
        """f evaluated at radius r and direction (theta, phi)."""
        return self.radial_factor(r) * self.angular_factor(theta, phi)

    def min_f(self) -> float:
        """Minimum of f over the open hemisphere annulus, by dense sampling."""
        r = np.linspace(HEMISPHERE_MARGIN, np.pi / 2 - HEMISPHERE_MARGIN,
                        4097)
        th, ph = _dense_angles()
        return float(self.radial_factor(r).min()
                     * self.angular_factor(th, ph).min())

    def validate(self, group: SymmetryGroup) -> None:
        """Check positivity of the margin to c and group invariance.

        Raises
        ------
        DataError
            If c is not strictly between 0 and the minimum of f, or if
            the angular factor is not invariant under every group
            element (orbit sampling, tolerance 1e-12).
        """
        if not np.all(np.isfinite(self.a_poly)):
            raise DataError("radial polynomial has non-finite coefficients")
        if self.c <= 0.0:
            raise DataError(
                f"homotopy base constant must be positive, got {self.c!r}")
        fmin = self.min_f()
        if self.c >= fmin:
            raise DataError(
                f"homotopy base constant c = {self.c:.6g} must be strictly "
                f"below the minimum of the prescribed data, min f = "
                f"{fmin:.6g}")
        th, ph = _dense_angles(61, 120)
        base = spectral.synthesize_at(self.b, th, ph)
        for k, A in enumerate(group.elements):
            th2, ph2 = rotate_angles(A, th, ph)
            rotated = spectral.synthesize_at(self.b, th2, ph2)
            err = float(np.max(np.abs(rotated - base)))
            if err > 1e-12:
                raise DataError(
                    f"prescribed data is not invariant under group element "
                    f"{k}: orbit sampling error {err:.3g}")


def default_base_constant(data_min: float) -> float:
    """Default homotopy constant: 90 percent of the data minimum."""
    return 0.9 * data_min


# ---------------------------------------------------------------- solver

@dataclass
class SolverOptions:
    """Tolerances and step-control constants for Newton and continuation."""

    L_max: int = 24
    tol: float = 1e-10
    kappa_floor: float = 1e-4
    kappa_ceil: float = 1e4
    dt0: float = 0.1
    dt_min: float = 1e-4
    dt_max: float = 0.25
    max_newton: int = 25
    max_halvings: int = 20
    jacobian_step: float = 1e-6


def initial_sphere(F: CurvatureFunction, c: float, L_max: int = 24,
                   pole: np.ndarray | None = None) -> GraphSurface:
    """Geodesic sphere solving F = c exactly.

    On a sphere of radius r every principal curvature is cot r, so by
    degree-one homogeneity F = cot r * F(1, ..., 1); the radius solving
    F = c follows from inverting the cotangent.
    """
    if c <= 0.0:
        raise DataError(f"base constant must be positive, got {c!r}")
    f_unit = float(F(np.ones(F.n)))
    radius = np.arctan2(f_unit, c)
    return sphere_surface(radius, L_max=L_max, pole=pole)


@dataclass
class _State:
    """Residual field and curvature bounds at one iterate."""

    lam: np.ndarray
    norm: float
    kappa_min: float
    kappa_max: float


class _Workspace:
    """Precomputed matrices for residual and Jacobian evaluation.

    Radial synthesis restricted to the invariant basis is six dense
    matrices, one per chart derivative; residual projection is one more.
    All Newton work is matrix products against these.
    """

    def __init__(self, grid: QuadratureGrid, basis: InvariantBasis,
                 data: PrescribedData, F: CurvatureFunction):
        if basis.L_max != grid.L_max:
            raise ValueError("basis truncation does not match grid")
        ops = grid.ops
        B = basis.matrix
        K = B.shape[0]
        if B.shape == (K, K) and np.array_equal(B, np.eye(K)):
            self.synth = [ops.Y, ops.Yt, ops.Yp, ops.Ytt, ops.Ytp, ops.Ypp]
            self.project = ops.Y.T * grid.weights
        else:
            self.synth = [ops.Y @ B, ops.Yt @ B, ops.Yp @ B,
                          ops.Ytt @ B, ops.Ytp @ B, ops.Ypp @ B]
            self.project = (B.T @ ops.Y.T) * grid.weights
        self.theta = grid.theta
        self.phi = grid.phi
        self.exp_b = np.exp(spectral.synthesize_at(
            data.b, grid.theta, grid.phi))
        self.data = data
        self.F = F
        self.lo = HEMISPHERE_MARGIN
        self.hi = np.pi / 2 - HEMISPHERE_MARGIN

    def lambda_batch(self, Z: np.ndarray, t: float):
        """Residual fields for coefficient columns Z, shape (N, nb).

        Also returns the per-column curvature extremes.  Raises
        DomainError if any column leaves the hemisphere annulus.
        """
        R, RT, RP, RTT, RTP, RPP = (S @ Z for S in self.synth)
        if R.min() <= self.lo or R.max() >= self.hi:
            raise DomainError(
                f"iterate radial range [{R.min():.6g}, {R.max():.6g}] "
                "leaves the open hemisphere annulus")
        K1, K2 = _kernels.kappa_batch(self.theta, self.phi,
                                      R, RT, RP, RTT, RTP, RPP)
        kappa = np.stack([K1, K2], axis=-1)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            Fv = self.F(kappa)
            fv = self.data.radial_factor(R) * self.exp_b[:, None]
            lam = Fv - (t * fv + (1.0 - t) * self.data.c)
        return lam, K1.min(axis=0), K2.max(axis=0)

    def state(self, z: np.ndarray, t: float) -> _State:
        lam, kmin, kmax = self.lambda_batch(z[:, None], t)
        lam = lam[:, 0]
        return _State(lam=lam, norm=float(np.max(np.abs(lam))),
                      kappa_min=float(kmin[0]), kappa_max=float(kmax[0]))

    def residual_vector(self, state: _State) -> np.ndarray:
        return self.project @ state.lam

    def jacobian(self, z: np.ndarray, t: float, step: float) -> np.ndarray:
        M = len(z)
        Z = np.repeat(z[:, None], 2 * M, axis=1)
        idx = np.arange(M)
        Z[idx, idx] += step
        Z[idx, M + idx] -= step
        lam, _, _ = self.lambda_batch(Z, t)
        res = self.project @ lam
        return (res[:, :M] - res[:, M:]) / (2.0 * step)


def _solve_newton_system(J: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve J x = rhs by SVD, rejecting numerically singular systems."""
    U, s, Vt = np.linalg.svd(J)
    if s[0] == 0.0 or s[-1] < _SOLVE_RCOND * s[0]:
        dim = int(np.sum(s < _KERNEL_RCOND * s[0])) if s[0] > 0 else len(s)
        raise SingularJacobianError(
            f"Newton system is numerically singular (smallest relative "
            f"singular value {s[-1] / max(s[0], 1e-300):.3g}); the "
            "symmetry restriction may be missing or misconfigured",
            null_dimension=dim)
    return Vt.T @ ((U.T @ rhs) / s)


def near_kernel(J: np.ndarray, rcond: float = _KERNEL_RCOND):
    """Dimension and directions of the near-null space of a Jacobian.

    Returns (dim, rows) where rows holds the right singular vectors with
    singular value below ``rcond`` times the largest.
    """
    _, s, Vt = np.linalg.svd(J)
    mask = s < rcond * s[0]
    return int(np.sum(mask)), Vt[mask]


def _surface_like(start: GraphSurface, coeffs: np.ndarray) -> GraphSurface:
    return GraphSurface(n=start.n, pole=start.pole.copy(),
                        radial=HarmonicCoeffs(start.L_max, coeffs),
                        gauge_tau0=start.gauge_tau0)


def residual_field(F: CurvatureFunction, data: PrescribedData, t: float,
                   surface: GraphSurface) -> np.ndarray:
    """Pointwise residual F(kappa) - (t f + (1 - t) c) at the grid nodes."""
    grid = build_grid(surface.L_max)
    ws = _Workspace(grid, full_basis(surface.L_max), data, F)
    lam, _, _ = ws.lambda_batch(surface.radial.values[:, None], t)
    return lam[:, 0]


def linear_system(F: CurvatureFunction, data: PrescribedData, t: float,
                  surface: GraphSurface, projector: InvariantProjector |
                  None = None, step: float = 1e-6):
    """Assembled Newton matrix and residual at a surface, for diagnostics.

    Returns (J, residual_vector, degrees) in the invariant basis, or in
    the full coefficient basis when no projector is given.
    """
    basis = projector.basis if projector is not None else \
        full_basis(surface.L_max)
    grid = build_grid(surface.L_max)
    ws = _Workspace(grid, basis, data, F)
    z = basis.matrix.T @ surface.radial.values
    state = ws.state(z, t)
    J = ws.jacobian(z, t, step)
    return J, ws.residual_vector(state), basis.degrees


def newton_solve(F: CurvatureFunction, data: PrescribedData, t: float,
                 start: GraphSurface,
                 projector: InvariantProjector | None = None,
                 opts: SolverOptions | None = None):
    """Damped Newton iteration at fixed homotopy parameter t.

    The unknown is the radial coefficient vector restricted to the
    invariant basis; the residual is collocated at the quadrature nodes
    and projected back onto that basis.  Convergence is measured by the
    infinity norm of the residual over the grid nodes.  A step is
    accepted only if the residual decreases and the iterate stays
    strictly convex, with halving up to ``opts.max_halvings``.

    Returns
    -------
    (GraphSurface, int, float)
        The solved surface, the number of Newton steps taken, and the
        final residual norm.

    Raises
    ------
    SingularJacobianError, NewtonError, DataError
    """
    opts = opts or SolverOptions()
    basis = projector.basis if projector is not None else \
        full_basis(start.L_max)
    if basis.L_max != start.L_max:
        raise ValueError(
            f"projector truncation L_max={basis.L_max} does not match the "
            f"start surface L_max={start.L_max}")
    grid = build_grid(start.L_max)
    ws = _Workspace(grid, basis, data, F)

    a_full = start.radial.values
    z = basis.matrix.T @ a_full
    stray = float(np.max(np.abs(a_full - basis.matrix @ z)))
    if stray > 1e-8:
        raise DataError(
            f"start surface has coefficient content {stray:.3g} outside "
            "the invariant subspace")

    state = ws.state(z, t)
    for iteration in range(opts.max_newton + 1):
        if state.norm <= opts.tol:
            return _surface_like(start, basis.matrix @ z), iteration, \
                state.norm
        if iteration == opts.max_newton:
            raise NewtonError(
                f"no convergence within {opts.max_newton} Newton steps; "
                f"residual {state.norm:.3e} at t = {t:g}")
        J = ws.jacobian(z, t, opts.jacobian_step)
        delta = _solve_newton_system(J, -ws.residual_vector(state))

        scale = 1.0
        accepted = None
        for _ in range(opts.max_halvings + 1):
            z_try = z + scale * delta
            try:
                trial = ws.state(z_try, t)
            except DomainError:
                trial = None
            if (trial is not None and trial.norm < state.norm
                    and trial.kappa_min >= opts.kappa_floor
                    and trial.kappa_max <= opts.kappa_ceil):
                accepted = (z_try, trial)
                break
            scale *= 0.5
        if accepted is None:
            raise NewtonError(
                f"line search failed after {opts.max_halvings} halvings "
                f"at t = {t:g}; residual {state.norm:.3e}")
        z, state = accepted


# ---------------------------------------------------------- continuation

@dataclass
class ContinuationStep:
    """Accepted homotopy step with its convergence and bound monitors."""

    t: float
    iterations: int
    residual: float
    kappa_min: float
    kappa_max: float
    r_min: float
    r_max: float

    def as_dict(self) -> dict:
        return {"t": self.t, "iterations": self.iterations,
                "residual": self.residual, "kappa_min": self.kappa_min,
                "kappa_max": self.kappa_max, "r_min": self.r_min,
                "r_max": self.r_max}


@dataclass
class ContinuationReport:
    """Outcome of a continuation run; ``status`` is converged or failed."""

    steps: list
    final_surface: GraphSurface
    status: str
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def as_dict(self) -> dict:
        return {"status": self.status, "message": self.message,
                "steps": [s.as_dict() for s in self.steps]}


def _step_record(t, iterations, residual, surface, grid) -> ContinuationStep:
    fld = curvature_field(surface, grid)
    return ContinuationStep(t=float(t), iterations=int(iterations),
                            residual=float(residual),
                            kappa_min=fld.kappa_min, kappa_max=fld.kappa_max,
                            r_min=float(fld.r.min()),
                            r_max=float(fld.r.max()))


def continuation(F: CurvatureFunction, data: PrescribedData,
                 opts: SolverOptions | None = None,
                 group: SymmetryGroup | None = None,
                 start: GraphSurface | None = None) -> ContinuationReport:
    """Follow the homotopy from the geodesic sphere to the full problem.

    Adaptive stepping in t: start with ``opts.dt0``; halve on Newton
    failure down to ``opts.dt_min``; grow by 1.5 up to ``opts.dt_max``
    after fast (at most 3 iteration) solves.  Every accepted step logs
    residual, curvature bounds and radial bounds.  The run either
    reaches t = 1 at full tolerance or reports the failure point with
    the last good surface.
    """
    opts = opts or SolverOptions()
    group = group or SymmetryGroup.antipodal()
    rep = class_K_check(F, n_samples=2000, seed=0)
    if not (rep.monotone and rep.weight_ordering):
        warnings.warn(
            f"curvature function {F.name!r} fails the admissibility "
            "checks (monotonicity or weight ordering); continuation may "
            "lose convexity", stacklevel=2)
    projector = invariant_projector(group, opts.L_max)
    data.validate(group)

    grid = build_grid(opts.L_max)
    surface = start if start is not None else \
        initial_sphere(F, data.c, L_max=opts.L_max)
    if surface.L_max != opts.L_max:
        raise ValueError(
            f"start surface L_max={surface.L_max} does not match "
            f"options L_max={opts.L_max}")

    steps: list[ContinuationStep] = []
    try:
        surface, iters, resid = newton_solve(F, data, 0.0, surface,
                                             projector, opts)
    except (NewtonError, SingularJacobianError, DomainError) as exc:
        return ContinuationReport(steps=steps, final_surface=surface,
                                  status="failed",
                                  message=f"t = 0 solve failed: {exc}")
    steps.append(_step_record(0.0, iters, resid, surface, grid))

    t = 0.0
    dt = opts.dt0
    while t < 1.0:
        t_try = min(1.0, t + dt)
        try:
            trial, iters, resid = newton_solve(F, data, t_try, surface,
                                               projector, opts)
        except (NewtonError, SingularJacobianError, DomainError) as exc:
            dt *= 0.5
            if dt < opts.dt_min:
                return ContinuationReport(
                    steps=steps, final_surface=surface, status="failed",
                    message=f"step size underflow at t = {t_try:g}: {exc}")
            continue
        surface = trial
        t = t_try
        steps.append(_step_record(t, iters, resid, surface, grid))
        if iters <= 3:
            dt = min(dt * 1.5, opts.dt_max)
    return ContinuationReport(steps=steps, final_surface=surface,
                              status="converged")


# -------------------------------------------------------------- barriers

@dataclass
class BarrierReport:
    """Pointwise barrier verification margins (nonnegative means valid).

    ``passed`` allows a rounding-level shortfall so that a surface can
    serve as its own barrier pair.
    """

    lower_margin: float
    upper_margin: float
    lower_worst_node: int
    upper_worst_node: int

    @property
    def passed(self) -> bool:
        slack = -1e-12
        return self.lower_margin >= slack and self.upper_margin >= slack

    def as_dict(self) -> dict:
        return {"lower_margin": self.lower_margin,
                "upper_margin": self.upper_margin,
                "lower_worst_node": self.lower_worst_node,
                "upper_worst_node": self.upper_worst_node,
                "passed": self.passed}


def _data_on_surface(f_values, r, theta, phi) -> np.ndarray:
    if isinstance(f_values, PrescribedData):
        return f_values.values(r, theta, phi)
    arr = np.asarray(f_values, dtype=float)
    if arr.ndim == 0:
        return np.full_like(r, float(arr))
    if arr.shape != r.shape:
        raise DataError(
            f"prescribed values shape {arr.shape} does not match the "
            f"{r.shape} grid")
    return arr


def check_barriers(F: CurvatureFunction, f_values, lower: GraphSurface,
                   upper: GraphSurface) -> BarrierReport:
    """Verify a barrier pair for the prescribed-curvature problem.

    The lower barrier must satisfy F <= f on its surface and the upper
    barrier F >= f; the upper barrier must be enclosed by the lower one.
    Smaller radius means larger curvature, so the enclosed surface is
    the one with the pointwise smaller radial function.

    ``f_values`` may be a PrescribedData, a scalar, or a per-node array.

    Raises
    ------
    DataError
        If the surfaces are not nested (pointwise r_upper <= r_lower).
    ConvexityError
        If either surface is not strictly convex.
    """
    L = max(lower.L_max, upper.L_max)
    grid = build_grid(L)
    low = curvature_field(lower.padded_to(L), grid, require_convex=True)
    up = curvature_field(upper.padded_to(L), grid, require_convex=True)

    gap = low.r - up.r
    if gap.min() < -1e-12:
        q = int(np.argmin(gap))
        raise DataError(
            f"barrier surfaces are not nested: r_upper > r_lower by "
            f"{-gap.min():.3g} at node {q} "
            f"(theta = {grid.theta[q]:.4f}, phi = {grid.phi[q]:.4f})")

    f_low = _data_on_surface(f_values, low.r, grid.theta, grid.phi)
    f_up = _data_on_surface(f_values, up.r, grid.theta, grid.phi)
    lower_gap = f_low - F(low.kappa)
    upper_gap = F(up.kappa) - f_up
    return BarrierReport(
        lower_margin=float(lower_gap.min()),
        upper_margin=float(upper_gap.min()),
        lower_worst_node=int(np.argmin(lower_gap)),
        upper_worst_node=int(np.argmin(upper_gap)))
