"""Outer reweighting loop and the inner preconditioned conjugate gradient.

The inner iteration periodically recomputes the true residual r = b - A x
(whenever the iteration counter is divisible by round(sqrt(n))) to purge
accumulated rounding drift; otherwise it uses the cheap recurrence r -= alpha*q.
"""

import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .assemble import LinearSystem, assemble_system, compute_weights, objective
from .errors import (
    FactorBreakdownError,
    InvalidInputError,
    InvalidParameterError,
    PcgBreakdownError,
)
from .grid import MapKind, PhaseMap, wrapped_gradients
from .precond import Preconditioner, PrecondKind, build
from .sparse import SparseMatrix, spmv


class InitKind(Enum):
    RANDOM_UNIFORM = "random"
    ZERO = "zero"


class ExitReason(Enum):
    TOL = "tol"
    KMAX = "kmax"
    BREAKDOWN = "breakdown"


@dataclass(frozen=True)
class SolverConfig:
    p: float = 0.0
    tau: float = 0.01
    k_max: int = 500
    tol: float = 1e-6
    l_max_factor: int = 2
    epsilon: float = 0.005
    precond_kind: PrecondKind = PrecondKind.ILU0
    omega: float = 1.0
    seed: int = 0
    init: InitKind = InitKind.RANDOM_UNIFORM
    demean: bool = False
    reuse_precond: bool = False

    def __post_init__(self):
        if self.p >= 2.0:
            raise InvalidParameterError(f"p must be < 2, got {self.p}")
        if self.tau <= 0.0:
            raise InvalidParameterError(f"tau must be > 0, got {self.tau}")
        if self.k_max < 1:
            raise InvalidParameterError("k_max must be >= 1")
        if self.tol <= 0.0:
            raise InvalidParameterError("tol must be > 0")
        if self.l_max_factor < 1:
            raise InvalidParameterError("l_max_factor must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidParameterError("epsilon must be in (0, 1)")


@dataclass
class SolveReport:
    outer_iters: int = 0
    inner_iters_total: int = 0
    inner_iters_per_outer: list[int] = field(default_factory=list)
    final_error: float = math.inf
    precond_build_time: float = 0.0
    pcg_time: float = 0.0
    assemble_time: float = 0.0
    total_time: float = 0.0
    objective_history: list[float] = field(default_factory=list)
    exit_reason: ExitReason = ExitReason.KMAX
    init: InitKind = InitKind.RANDOM_UNIFORM
    ic_shift: float = 0.0


def pcg_solve(
    A: SparseMatrix,
    b: np.ndarray,
    x0: np.ndarray,
    M: Preconditioner,
    l_max: int,
    epsilon: float,
    callback=None,
) -> tuple[np.ndarray, int]:
    """Preconditioned conjugate gradient with periodic residual recomputation.

    Iterates until the preconditioned residual norm delta = r.M^-1 r has dropped
    to epsilon^2 of its initial value or l_max iterations were spent. Returns
    the solution and the iteration count. Raises PcgBreakdownError when the
    operator pair loses positive definiteness (d.Ad <= 0 or delta < 0).

    ``callback(l, x)`` is invoked after each iteration with the running iterate.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.array(x0, dtype=np.float64)
    restart = max(1, int(round(math.sqrt(A.n))))
    r = b - spmv(A, x)
    d = M.apply(r)
    delta_new = float(r @ d)
    delta0 = delta_new
    if delta_new < 0.0:
        raise PcgBreakdownError(
            f"initial preconditioned residual norm is negative ({delta_new:g})", iteration=0
        )
    l = 0
    threshold = epsilon * epsilon * delta0
    while l < l_max and delta_new > threshold:
        q = spmv(A, d)
        dq = float(d @ q)
        if dq <= 0.0:
            raise PcgBreakdownError(
                f"loss of positive definiteness at inner iteration {l} (d.Ad = {dq:g})",
                iteration=l,
            )
        alpha = delta_new / dq
        x += alpha * d
        if l % restart == 0:
            r = b - spmv(A, x)
        else:
            r -= alpha * q
        s = M.apply(r)
        delta_old = delta_new
        delta_new = float(r @ s)
        if delta_new < 0.0:
            raise PcgBreakdownError(
                f"preconditioned residual norm turned negative at inner iteration {l}",
                iteration=l,
            )
        beta = delta_new / delta_old
        d = s + beta * d
        l += 1
        if callback is not None:
            callback(l, x)
    return x, l


def initial_phase(rows: int, cols: int, cfg: SolverConfig) -> np.ndarray:
    """Starting iterate: cellwise uniform draws from (-pi, pi], or zeros."""
    if cfg.init is InitKind.ZERO:
        return np.zeros(rows * cols)
    rng = np.random.default_rng(cfg.seed)
    # uniform(-pi, pi) covers [-pi, pi); negating yields the (-pi, pi] convention
    return -rng.uniform(-math.pi, math.pi, rows * cols)


def unwrap(psi: PhaseMap, cfg: SolverConfig) -> tuple[PhaseMap, SolveReport]:
    """Recover an unwrapped map from a wrapped one.

    Each outer iteration recomputes the edge weights from the current solution,
    reassembles the weighted system, rebuilds the preconditioner (unless
    ``cfg.reuse_precond``), and warm-starts the inner PCG from the current
    iterate. Stops when the relative change of the iterate falls to ``cfg.tol``
    or after ``cfg.k_max`` outer iterations.
    """
    if psi.kind is not MapKind.WRAPPED:
        raise InvalidInputError("unwrap expects a wrapped map")
    t_start = time.perf_counter()
    rows, cols = psi.rows, psi.cols
    n = rows * cols
    l_max = cfg.l_max_factor * n
    grads = wrapped_gradients(psi)
    phi = initial_phase(rows, cols, cfg)

    report = SolveReport(init=cfg.init)
    system: LinearSystem | None = None
    M: Preconditioner | None = None
    k = 0
    error = 1.0
    while k < cfg.k_max and error > cfg.tol:
        weights = compute_weights(phi, grads, cfg.p, cfg.tau)
        t0 = time.perf_counter()
        system = assemble_system(weights, grads, out=system)
        report.assemble_time += time.perf_counter() - t0

        if M is None or not cfg.reuse_precond:
            try:
                M = build(cfg.precond_kind, system.matrix, omega=cfg.omega)
            except FactorBreakdownError as exc:
                exc.outer_iteration = k
                raise
            report.precond_build_time += M.build_time
            report.ic_shift = max(report.ic_shift, M.ic_shift)

        phi_old = phi
        t0 = time.perf_counter()
        try:
            phi, inner = pcg_solve(system.matrix, system.rhs, phi, M, l_max, cfg.epsilon)
        except PcgBreakdownError as exc:
            exc.outer_iteration = k
            raise
        report.pcg_time += time.perf_counter() - t0
        if cfg.demean:
            phi -= phi.mean()

        denom = max(float(np.linalg.norm(phi_old)), 1e-30)
        error = float(np.linalg.norm(phi - phi_old)) / denom
        report.inner_iters_per_outer.append(inner)
        report.inner_iters_total += inner
        if cfg.p > 0.0:
            report.objective_history.append(objective(phi, grads, cfg.p))
        k += 1

    report.outer_iters = k
    report.final_error = error
    report.exit_reason = ExitReason.TOL if error <= cfg.tol else ExitReason.KMAX
    report.total_time = time.perf_counter() - t_start
    result = PhaseMap(phi.reshape(rows, cols), MapKind.UNWRAPPED)
    return result, report
