"""Scale-sweep benchmark: one wrapped map per scale, every preconditioner on it."""

import math
import time
from dataclasses import dataclass

import numpy as np

from .assemble import _stencil_structure, stencil_nnz
from .errors import FactorBreakdownError, InvalidParameterError, PcgBreakdownError
from .fileio import append_bench_csv
from .grid import wrap_map
from .metrics import q_error, q_error_mean_aligned
from .precond import PRECOND_ORDER, PrecondKind
from .solver import ExitReason, InitKind, SolverConfig, unwrap
from .synth import SynthShape, SynthSpec, generate, scaled_size


@dataclass
class BenchRecord:
    """One benchmark row; field order matches the CSV schema."""

    scale: float
    rows: int
    cols: int
    nnz: int
    density_pct: float
    preconditioner: str
    p: float
    outer_iters: int
    inner_iters_total: int
    precond_build_s: float
    precond_build_pct: float
    pcg_s: float
    total_s: float
    q_raw: float
    q_mean_aligned: float
    exit_reason: str
    seed: int

    def __post_init__(self):
        expected = stencil_nnz(self.rows, self.cols)
        if self.nnz != expected:
            raise InvalidParameterError(
                f"nnz {self.nnz} does not match 5MN - 2(M+N) = {expected}"
            )
        if self.total_s > 0.0:
            pct = 100.0 * self.precond_build_s / self.total_s
            if abs(pct - self.precond_build_pct) > 1e-6:
                raise InvalidParameterError("precond_build_pct is inconsistent")


def density_pct(rows: int, cols: int) -> float:
    n = rows * cols
    return 100.0 * stencil_nnz(rows, cols) / (float(n) * float(n))


def _canonical_precond_order(kinds) -> list[PrecondKind]:
    requested = {PrecondKind(k) for k in kinds}
    return [k for k in PRECOND_ORDER if k in requested]


def run_bench(
    scales=(0.25, 0.50, 0.75, 1.00, 1.25, 1.50, 1.75, 2.00),
    preconds=PRECOND_ORDER,
    p: float = 0.0,
    seed: int = 0,
    csv_path=None,
    repeat: int = 1,
    shape: SynthShape = SynthShape.GAUSSIAN_PEAKS,
    amplitude: float = 40.0,
    noise_sigma: float = 0.0,
    tau: float = 0.01,
    k_max: int = 500,
    tol: float = 1e-6,
    l_max_factor: int = 2,
    epsilon: float = 0.005,
    omega: float = 1.0,
    init: InitKind = InitKind.RANDOM_UNIFORM,
    log=print,
) -> list[BenchRecord]:
    """Run the sweep and return its records (also appended to ``csv_path``).

    Rows are ordered scale-ascending with preconditioners in listing order.
    A failed cell is recorded with exit reason 'breakdown' and the sweep
    continues.
    """
    if repeat < 1:
        raise InvalidParameterError("repeat must be >= 1")
    kinds = _canonical_precond_order(preconds)
    if not kinds:
        raise InvalidParameterError("no preconditioners selected")
    records = []
    for scale in sorted(scales):
        rows, cols = scaled_size(scale)
        spec = SynthSpec(shape, rows, cols, amplitude, seed=seed, noise_sigma=noise_sigma)
        truth = generate(spec)
        psi = wrap_map(truth)
        nnz = stencil_nnz(rows, cols)
        # structure self-check before any solve; a mismatch aborts the row
        if int(_stencil_structure(rows, cols)[1].shape[0]) != nnz:
            log(f"scale {scale:g}: stencil structure mismatch, row skipped")
            continue
        dens = density_pct(rows, cols)
        for kind in kinds:
            cfg = SolverConfig(
                p=p,
                tau=tau,
                k_max=k_max,
                tol=tol,
                l_max_factor=l_max_factor,
                epsilon=epsilon,
                precond_kind=kind,
                omega=omega,
                seed=seed,
                init=init,
            )
            for _ in range(repeat):
                record, ic_shift = _run_cell(scale, rows, cols, nnz, dens, cfg, truth, psi, seed)
                records.append(record)
                if csv_path is not None:
                    append_bench_csv(record, csv_path)
                shift = f" shift {ic_shift:g}" if ic_shift > 0 else ""
                log(
                    f"scale {scale:g} {kind.value:>8s}: outer {record.outer_iters:4d} "
                    f"inner {record.inner_iters_total:7d} total {record.total_s:9.3f}s "
                    f"build {record.precond_build_pct:6.2f}% q {record.q_mean_aligned:.4g} "
                    f"[{record.exit_reason}]{shift}"
                )
    if records:
        by_time = sorted(records, key=lambda r: r.total_s)
        log("--- cells by total time ---")
        for r in by_time:
            log(f"{r.total_s:9.3f}s  scale {r.scale:g}  {r.preconditioner}")
    return records


def _run_cell(scale, rows, cols, nnz, dens, cfg, truth, psi, seed) -> tuple[BenchRecord, float]:
    t0 = time.perf_counter()
    try:
        result, report = unwrap(psi, cfg)
    except (FactorBreakdownError, PcgBreakdownError):
        total = time.perf_counter() - t0
        record = BenchRecord(
            scale=scale,
            rows=rows,
            cols=cols,
            nnz=nnz,
            density_pct=dens,
            preconditioner=cfg.precond_kind.value,
            p=cfg.p,
            outer_iters=0,
            inner_iters_total=0,
            precond_build_s=0.0,
            precond_build_pct=0.0,
            pcg_s=0.0,
            total_s=total,
            q_raw=math.nan,
            q_mean_aligned=math.nan,
            exit_reason=ExitReason.BREAKDOWN.value,
            seed=seed,
        )
        return record, 0.0
    mu = truth.values.ravel()
    nu = result.values.ravel()
    total = report.total_time
    build_pct = 100.0 * report.precond_build_time / total if total > 0 else 0.0
    record = BenchRecord(
        scale=scale,
        rows=rows,
        cols=cols,
        nnz=nnz,
        density_pct=dens,
        preconditioner=cfg.precond_kind.value,
        p=cfg.p,
        outer_iters=report.outer_iters,
        inner_iters_total=report.inner_iters_total,
        precond_build_s=report.precond_build_time,
        precond_build_pct=build_pct,
        pcg_s=report.pcg_time,
        total_s=total,
        q_raw=q_error(mu, nu),
        q_mean_aligned=q_error_mean_aligned(mu, nu),
        exit_reason=report.exit_reason.value,
        seed=seed,
    )
    return record, report.ic_shift
