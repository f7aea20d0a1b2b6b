"""Kernel-collocation solver for the time-independent Schrodinger equation on a box.

The eigenfunctions are expanded over kernel sections centered at sampled
interior points. Applying the Hamiltonian to the first kernel argument gives
a generalized matrix eigenvalue problem; homogeneous Dirichlet conditions are
imposed as linear constraints on the expansion coefficients and removed by a
null-space projection before the eigensolve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import scipy.linalg

from .learn import GramMatrix, gram

CONSTRAINT_RANK_TOL = 1e-10
MASS_TRUNCATION_TOL = 1e-10
COMPLEX_SPILL_TOL = 1e-8


@dataclass(frozen=True)
class ProblemSpec:
    """A particles-in-a-box eigenproblem description.

    The kernel must expose ``eval`` and ``eval_d2`` (second derivative in a
    coordinate of its first argument); walls are enforced through boundary
    constraints, not through the potential. ``interaction`` switches on the
    pairwise Coulomb repulsion between coordinates.
    """

    kernel: Any
    hbar: float = 1.0
    mass: float = 1.0
    length: float = math.pi
    dim: int = 2
    potential: Callable | None = None
    interaction: bool = False

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"box length must be positive, got {self.length}")
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if self.hbar <= 0 or self.mass <= 0:
            raise ValueError("hbar and mass must be positive")


@dataclass
class EigenSolution:
    """Eigenvalues with coefficient vectors, ready for pointwise evaluation.

    ``residuals`` holds the relative residual of each pair measured inside
    the projected subspace where the pencil was solved.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    points: np.ndarray | None = None
    kernel: Any = None
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))


def assemble_G00(kernel, points) -> GramMatrix:
    """Plain kernel Gram matrix over the sample points, assembled entrywise."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m = points.shape[0]
    values = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            values[i, j] = kernel.eval(points[i], points[j])
            values[j, i] = values[i, j]
    return GramMatrix(values, row_points=points, col_points=points, kernel=kernel)


def coulomb_energy(x) -> float:
    """Pairwise repulsion sum over ordered coordinate pairs, 1/|x_a - x_b|."""
    x = np.asarray(x, dtype=float).ravel()
    total = 0.0
    for a in range(x.size):
        for b in range(x.size):
            if a == b:
                continue
            gap = abs(x[a] - x[b])
            if gap == 0.0:
                raise ValueError(
                    "interaction potential is singular: sample point has "
                    "coincident coordinates"
                )
            total += 1.0 / gap
    return total


def _effective_potential(problem: ProblemSpec, points: np.ndarray) -> np.ndarray:
    values = np.zeros(points.shape[0])
    if problem.potential is not None:
        values += np.array([float(problem.potential(x)) for x in points])
    if problem.interaction:
        values += np.array([coulomb_energy(x) for x in points])
    if not np.all(np.isfinite(values)):
        raise ValueError("potential is not finite at every sample point")
    return values


def assemble_G10(problem: ProblemSpec, points) -> np.ndarray:
    """Matrix of the Hamiltonian applied to the first kernel argument.

    Entry (i, j) is -hbar^2/(2 m) sum_l d2/dx_l2 k(x_i, x_j) plus
    V(x_i) k(x_i, x_j), with the interaction term folded into V.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    kernel = problem.kernel
    if not hasattr(kernel, "eval_d2"):
        raise ValueError("kernel does not support second derivatives")
    scale = -problem.hbar**2 / (2.0 * problem.mass)
    if hasattr(kernel, "d2_sum_gram"):
        lap = np.asarray(kernel.d2_sum_gram(points, points), dtype=float)
    else:
        m, d = points.shape
        lap = np.zeros((m, m))
        for i in range(m):
            for j in range(m):
                lap[i, j] = sum(kernel.eval_d2(points[i], points[j], l) for l in range(d))
    potential = _effective_potential(problem, points)
    if hasattr(kernel, "pairwise"):
        K = np.asarray(kernel.pairwise(points, points), dtype=float)
    else:
        K = gram(kernel, points).values
    return scale * lap + potential[:, None] * K


def boundary_constraints(kernel, points, boundary_points) -> np.ndarray:
    """Constraint rows forcing the expansion to vanish at the boundary points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    boundary_points = np.atleast_2d(np.asarray(boundary_points, dtype=float))
    if hasattr(kernel, "pairwise"):
        return np.asarray(kernel.pairwise(boundary_points, points), dtype=float)
    rows = np.empty((boundary_points.shape[0], points.shape[0]))
    for r, b in enumerate(boundary_points):
        for i, x in enumerate(points):
            rows[r, i] = kernel.eval(x, b)
    return rows


def solve_constrained_gevp(
    g10,
    g00,
    constraints,
    n_eigs: int,
    points=None,
    kernel=None,
) -> EigenSolution:
    """Solve G10 u = E G00 u subject to C u = 0.

    An orthonormal basis of the null space of C comes from an SVD with rank
    tolerance 1e-10 |C|; the pencil is projected onto it. Near-singular
    directions of the projected G00 are truncated below 1e-10 of its largest
    eigenvalue, the reduced standard eigenproblem is solved, and eigenpairs
    whose imaginary part exceeds 1e-8 of the real part are discarded. The
    ``n_eigs`` smallest real eigenvalues are returned.
    """
    A = np.asarray(g10, dtype=float) if not isinstance(g10, GramMatrix) else g10.values
    B = np.asarray(g00, dtype=float) if not isinstance(g00, GramMatrix) else g00.values
    m = A.shape[0]
    C = np.asarray(constraints, dtype=float).reshape(-1, m)
    if C.shape[0] == 0:
        Z = np.eye(m)
    else:
        singular_values = np.linalg.svd(C, compute_uv=False)
        tol = CONSTRAINT_RANK_TOL * singular_values[0] if singular_values.size else 0.0
        rank = int(np.sum(singular_values > tol))
        if rank >= m:
            raise ValueError("constraints leave an empty null space")
        _, _, vt = np.linalg.svd(C, full_matrices=True)
        Z = vt[rank:].T
    A_proj = Z.T @ A @ Z
    B_proj = Z.T @ B @ Z
    B_proj = 0.5 * (B_proj + B_proj.T)
    mass_eigs, mass_vecs = scipy.linalg.eigh(B_proj)
    peak = mass_eigs[-1]
    if peak <= 0:
        raise ValueError("projected mass matrix has no positive eigenvalues")
    keep = mass_eigs > MASS_TRUNCATION_TOL * peak
    basis = mass_vecs[:, keep]
    whitener = basis / np.sqrt(mass_eigs[keep])[None, :]
    reduced = whitener.T @ A_proj @ whitener
    values, vectors = scipy.linalg.eig(reduced)
    stable = np.abs(values.imag) <= COMPLEX_SPILL_TOL * np.abs(values.real)
    values = values[stable]
    vectors = vectors[:, stable]
    if values.size < n_eigs:
        raise ValueError(
            f"only {values.size} stable eigenpairs available, requested {n_eigs}"
        )
    order = np.argsort(values.real)[:n_eigs]
    eigenvalues = values.real[order]
    subspace = Z @ basis
    coefficient_vectors = np.empty((m, n_eigs))
    residuals = np.empty(n_eigs)
    for idx, col in enumerate(order):
        v = vectors[:, col]
        v = v / v[np.argmax(np.abs(v))]
        u = Z @ (whitener @ v.real)
        u /= np.linalg.norm(u)
        if u[np.argmax(np.abs(u))] < 0:
            u = -u
        coefficient_vectors[:, idx] = u
        lhs = subspace.T @ (A @ u)
        rhs = subspace.T @ (B @ u)
        residuals[idx] = np.linalg.norm(lhs - eigenvalues[idx] * rhs) / np.linalg.norm(lhs)
    return EigenSolution(
        eigenvalues=eigenvalues,
        vectors=coefficient_vectors,
        points=None if points is None else np.atleast_2d(np.asarray(points, dtype=float)),
        kernel=kernel,
        residuals=residuals,
    )


def eval_eigenfunction(solution: EigenSolution, index: int, x):
    """Evaluate the expanded eigenfunction sum_i u_i k(x_i, .) at x.

    Accepts a single point (returns a float) or a stack of points.
    """
    if solution.points is None or solution.kernel is None:
        raise ValueError("solution carries no sample points or kernel")
    if not 0 <= index < solution.vectors.shape[1]:
        raise ValueError(f"eigenfunction index {index} out of range")
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    cross = gram(solution.kernel, solution.points, np.atleast_2d(x)).values
    out = solution.vectors[:, index] @ cross
    return float(out[0]) if single else out


def box_analytic_eigenvalue(
    levels: Sequence[int],
    hbar: float = 1.0,
    mass: float = 1.0,
    length: float = math.pi,
    antisymmetric: bool = True,
) -> float:
    """Closed-form box energy hbar^2 pi^2 (sum of level^2) / (2 m L^2).

    In the antisymmetric sector repeated levels are rejected: those product
    states vanish under antisymmetrization.
    """
    levels = tuple(int(l) for l in levels)
    if any(l < 1 for l in levels):
        raise ValueError(f"levels must be positive integers, got {levels}")
    if antisymmetric and len(set(levels)) != len(levels):
        raise ValueError(
            f"duplicate levels {levels} are eliminated in the antisymmetric sector"
        )
    return hbar**2 * math.pi**2 * sum(l * l for l in levels) / (2.0 * mass * length**2)


def _boundary_lattice(dim: int, length: float, count: int) -> np.ndarray:
    if dim == 1:
        return np.array([[0.0], [length]])
    if dim == 2:
        step = 4.0 * length / count
        points = np.empty((count, 2))
        for k in range(count):
            t = k * step
            side, offset = divmod(t, length)
            if side == 0:
                points[k] = (offset, 0.0)
            elif side == 1:
                points[k] = (length, offset)
            elif side == 2:
                points[k] = (length - offset, length)
            else:
                points[k] = (0.0, length - offset)
        return points
    if dim == 3:
        per_face = max(count // 6, 1)
        side = max(int(round(math.sqrt(per_face))), 1)
        ticks = (np.arange(side) + 0.5) * length / side
        u, v = np.meshgrid(ticks, ticks, indexing="ij")
        face = np.column_stack([u.ravel(), v.ravel()])
        points = []
        for axis in range(3):
            for wall in (0.0, length):
                block = np.empty((face.shape[0], 3))
                block[:, axis] = wall
                block[:, [a for a in range(3) if a != axis]] = face
                points.append(block)
        return np.vstack(points)
    raise ValueError(f"boundary sampling supports dim <= 3, got {dim}")


def sample_problem(
    problem: ProblemSpec, m_interior: int, m_boundary: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Draw uniform interior samples and deterministic boundary collocation points.

    Interior points are i.i.d. uniform over the open box from a seeded
    generator; for d = 2 the boundary points walk the perimeter with equal
    spacing, for d = 3 each face carries a near-uniform midpoint lattice.
    When the Coulomb interaction is on, interior points with coincident
    coordinates are redrawn.
    """
    if m_interior < 1 or m_boundary < 1:
        raise ValueError("point counts must be positive")
    rng = np.random.default_rng(seed)
    L = problem.length
    d = problem.dim
    interior = rng.uniform(0.0, L, size=(m_interior, d))

    def bad_rows(pts: np.ndarray) -> np.ndarray:
        on_wall = np.any((pts <= 0.0) | (pts >= L), axis=1)
        if problem.interaction and d > 1:
            coincident = np.zeros(pts.shape[0], dtype=bool)
            for a in range(d):
                for b in range(a + 1, d):
                    coincident |= pts[:, a] == pts[:, b]
            return on_wall | coincident
        return on_wall

    mask = bad_rows(interior)
    while np.any(mask):
        interior[mask] = rng.uniform(0.0, L, size=(int(mask.sum()), d))
        mask = bad_rows(interior)
    return interior, _boundary_lattice(d, L, m_boundary)


def solve_box_problem(
    problem: ProblemSpec,
    m_interior: int,
    m_boundary: int,
    seed: int,
    n_eigs: int = 3,
) -> EigenSolution:
    """Sample, assemble, constrain, and solve the box eigenproblem end to end."""
    interior, boundary = sample_problem(problem, m_interior, m_boundary, seed)
    g00 = assemble_G00(problem.kernel, interior)
    g10 = assemble_G10(problem, interior)
    constraints = boundary_constraints(problem.kernel, interior, boundary)
    return solve_constrained_gevp(
        g10, g00.values, constraints, n_eigs, points=interior, kernel=problem.kernel
    )
