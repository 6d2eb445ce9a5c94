"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines alongside the pytest verdicts.
"""

import math
import time

import numpy as np
import pytest

from conftest import chain_matrix, stencil_matrix
from lpunwrap.assemble import _stencil_structure, stencil_nnz
from lpunwrap.bench import density_pct, run_bench
from lpunwrap.fileio import BENCH_CSV_COLUMNS
from lpunwrap.grid import wrap_map, wrapped_gradients
from lpunwrap.metrics import congruence_error, q_error, q_error_mean_aligned
from lpunwrap.precond import PrecondKind, apply, build
from lpunwrap.solver import SolverConfig, pcg_solve, unwrap
from lpunwrap.sparse import SparseMatrix, _diag_positions, spmv
from lpunwrap.synth import SynthShape, SynthSpec, generate, table1_sizes

TABLE1_VARIABLES = [95440, 382880, 862320, 1533760, 2397200, 3452640, 4700080, 6139520]
TABLE1_DENSITY = [0.0250, 0.0064, 0.0028, 0.0016, 0.0010, 0.0007, 0.0005, 0.0004]


def _pass(criterion: int, message: str) -> None:
    print(f"ACCEPTANCE PASS criterion {criterion}: {message}")


@pytest.fixture(scope="module")
def bench_quarter_scale(tmp_path_factory):
    """Full five-preconditioner sweep at scale 0.25 with a fixed seed; reused
    by the ordering and determinism criteria."""
    out = []
    for name in ("first.csv", "second.csv"):
        path = tmp_path_factory.mktemp("bench") / name
        records = run_bench(scales=[0.25], p=0.0, seed=0, csv_path=path, log=lambda _: None)
        out.append((records, path))
    return out


def test_criterion_1_size_sweep_structure():
    _stencil_structure.cache_clear()
    t0 = time.perf_counter()
    built_nnz = []
    for _, rows, cols in table1_sizes():
        offsets, indices, _ = _stencil_structure(rows, cols)
        built_nnz.append(int(indices.shape[0]))
        assert int(offsets[-1]) == indices.shape[0]
    elapsed = time.perf_counter() - t0

    assert built_nnz == TABLE1_VARIABLES
    for (scale, rows, cols), nnz in zip(table1_sizes(), TABLE1_VARIABLES):
        assert stencil_nnz(rows, cols) == nnz

    # printed densities match the formula within 0.001 percentage points for
    # scales 0.50-2.00; the 0.25 row is a known rounding anomaly in the
    # reference table (formula 0.0259 vs printed 0.0250) and the formula wins
    for (scale, rows, cols), printed in list(zip(table1_sizes(), TABLE1_DENSITY))[1:]:
        assert abs(density_pct(rows, cols) - printed) <= 0.001
    quarter = density_pct(120, 160)
    assert round(quarter, 4) == 0.0259
    assert round(quarter, 4) != TABLE1_DENSITY[0]

    assert elapsed < 1.0, f"structure assembly took {elapsed:.3f}s"
    _pass(1, f"eight-scale nnz and density reproduced, structures in {elapsed:.3f}s "
             "(0.25 density row flagged: formula 0.0259 vs printed 0.0250)")


def test_criterion_2_exact_recovery():
    t0 = time.perf_counter()
    spec = SynthSpec(SynthShape.GAUSSIAN_PEAKS, 120, 160, amplitude=20.0, seed=0)
    truth = generate(spec)
    diffs = max(np.abs(np.diff(truth.values, axis=0)).max(),
                np.abs(np.diff(truth.values, axis=1)).max())
    assert diffs < math.pi, "test data must be recoverable"
    psi = wrap_map(truth)
    cfg = SolverConfig(p=1.99, precond_kind=PrecondKind.ILU0, seed=1, tol=1e-8)
    result, report = unwrap(psi, cfg)
    q = q_error_mean_aligned(truth.values.ravel(), result.values.ravel())
    cong = congruence_error(result, psi)
    elapsed = time.perf_counter() - t0
    assert q < 1e-5
    assert cong < 1e-6
    assert elapsed < 30.0
    _pass(2, f"scale-0.25 recovery with ILU0/p=1.99: q_mean_aligned={q:.2e}, "
             f"congruence={cong:.2e}, {elapsed:.1f}s")


def test_criterion_3_preconditioner_oracles():
    rng = np.random.default_rng(33)
    checked = 0
    worst = 0.0

    def rel(a, b):
        return float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(b))))

    for trial in range(50):
        if trial % 2 == 0:
            n = int(rng.integers(5, 101))
            A = chain_matrix(rng, n, diag_shift=rng.uniform(0.2, 1.0)).matrix
            tridiagonal = True
        else:
            rows = int(rng.integers(2, 11))
            cols = int(rng.integers(2, 101 // rows + 1))
            A = stencil_matrix(rng, rows, cols, diag_shift=rng.uniform(0.2, 1.0)).matrix
            tridiagonal = False
        dense = A.to_dense()
        pattern = dense != 0.0
        r = rng.normal(size=A.n)

        out = apply(build(PrecondKind.IDENTITY, A), r)
        worst = max(worst, rel(out, r))

        out = apply(build(PrecondKind.JACOBI, A), r)
        worst = max(worst, rel(out, r / np.diag(dense)))

        omega = rng.uniform(0.5, 1.5)
        M = build(PrecondKind.SSOR, A, omega=omega)
        D = np.diag(np.diag(dense))
        ssor_dense = (omega / (2.0 - omega)) * (
            (D / omega + np.tril(dense, -1))
            @ np.linalg.inv(D)
            @ (D / omega + np.triu(dense, 1))
        )
        worst = max(worst, rel(apply(M, r), np.linalg.solve(ssor_dense, r)))

        M = build(PrecondKind.IC0, A)
        assert M.ic_shift == 0.0
        L = M.lower.to_dense()
        worst = max(worst, rel((L @ L.T)[pattern], dense[pattern]))
        if tridiagonal:
            worst = max(worst, rel(apply(M, r), np.linalg.solve(dense, r)))

        M = build(PrecondKind.ILU0, A)
        prod = M.lower.to_dense() @ M.upper.to_dense()
        worst = max(worst, rel(prod[pattern], dense[pattern]))
        if tridiagonal:
            worst = max(worst, rel(apply(M, r), np.linalg.solve(dense, r)))
        checked += 1

    assert checked == 50
    assert worst <= 1e-9
    _pass(3, f"50 stencil matrices vs dense oracles, worst relative error {worst:.2e}")


class _TargetReached(Exception):
    pass


def _iterations_to_tolerance(A, b, M, rel_target, l_max=5000):
    norm_b = np.linalg.norm(b)
    hit = {"l": None}

    def watch(l, x):
        if np.linalg.norm(b - spmv(A, x)) <= rel_target * norm_b:
            hit["l"] = l
            raise _TargetReached

    try:
        pcg_solve(A, b, np.zeros(A.n), M, l_max=l_max, epsilon=1e-300, callback=watch)
    except _TargetReached:
        pass
    return hit["l"]


def test_criterion_4_pcg_correctness():
    rng = np.random.default_rng(44)
    for _ in range(10):
        A = stencil_matrix(rng, 5, 6, diag_shift=rng.uniform(0.3, 1.0)).matrix
        b = rng.normal(size=30)
        x, iters = pcg_solve(A, b, np.zeros(30), build(PrecondKind.IDENTITY, A),
                             l_max=35, epsilon=1e-12)
        assert iters <= 35
        assert np.linalg.norm(b - spmv(A, x)) < 1e-10 * np.linalg.norm(b)

    wins = 0
    trials = 20
    for _ in range(trials):
        base = stencil_matrix(rng, 5, 6, diag_shift=rng.uniform(0.3, 0.8)).matrix
        scale = 10.0 ** rng.uniform(-1.5, 1.5, 30)
        dense = scale[:, None] * base.to_dense() * scale[None, :]
        B = SparseMatrix.from_dense(dense)
        b = rng.normal(size=30)
        ident = _iterations_to_tolerance(B, b, build(PrecondKind.IDENTITY, B), 1e-10)
        jac = _iterations_to_tolerance(B, b, build(PrecondKind.JACOBI, B), 1e-10)
        assert ident is not None and jac is not None
        if jac < ident:
            wins += 1
    assert wins >= 0.9 * trials
    _pass(4, f"identity PCG converged in <= 35 iterations; Jacobi beat identity on "
             f"{wins}/{trials} badly scaled systems")


def test_criterion_5_preconditioner_ordering(bench_quarter_scale):
    records, _ = bench_quarter_scale[0]
    inner = {r.preconditioner: r.inner_iters_total for r in records}
    ordering = sorted(inner, key=inner.get)
    assert inner["ilu0"] <= inner["ic0"] <= inner["jacobi"] <= inner["identity"]
    assert inner["ilu0"] < inner["identity"]
    _pass(5, "inner-iteration ordering ilu0 <= ic0 <= jacobi <= identity holds "
             f"(full ordering: {ordering}, counts: {inner})")


def test_criterion_6_build_time_accounting(bench_quarter_scale, tmp_path):
    records, path = bench_quarter_scale[0]
    header = path.read_text().splitlines()[0].split(",")
    assert "precond_build_pct" in header
    assert all(r.precond_build_pct >= 0.0 for r in records)

    half = run_bench(scales=[0.5], preconds=[PrecondKind.IDENTITY, PrecondKind.JACOBI],
                     p=0.0, seed=0, k_max=4, csv_path=tmp_path / "half.csv",
                     log=lambda _: None)
    pcts = {r.preconditioner: r.precond_build_pct for r in half}
    assert pcts["identity"] < 5.0
    assert pcts["jacobi"] < 5.0
    ic0_pct = next((r.precond_build_pct for r in records if r.preconditioner == "ic0"), None)
    _pass(6, f"build fraction emitted for every row; scale-0.5 identity "
             f"{pcts['identity']:.3f}%, jacobi {pcts['jacobi']:.3f}% (< 5%); "
             f"ic0 at scale 0.25 recorded: {ic0_pct:.2f}%")


def test_criterion_7_q_metric_properties():
    rng = np.random.default_rng(77)
    x = rng.normal(size=64)
    assert q_error(x, x) == 0.0
    assert q_error(x, -x) == 1.0
    for _ in range(1000):
        a = rng.normal(size=16)
        b = rng.normal(size=16)
        q = q_error(a, b)
        assert 0.0 <= q <= 1.0
    a = rng.normal(size=32)
    b = rng.normal(size=32)
    base = q_error(a, b)
    for c in (1e-6, 0.5, 7.0, 1e8):
        assert abs(q_error(c * a, c * b) - base) <= 1e-12
    _pass(7, "Q(x,x)=0, Q(x,-x)=1, range held on 1000 random pairs, "
             "scale invariance within 1e-12 (reference Q=0.17 is explicitly "
             "not reproducible: its reference data is unavailable)")


def test_criterion_8_bench_determinism(bench_quarter_scale):
    timing = {"precond_build_s", "precond_build_pct", "pcg_s", "total_s"}
    stripped = []
    for _, path in bench_quarter_scale:
        lines = path.read_text().splitlines()
        header = lines[0].split(",")
        keep = [i for i, name in enumerate(header) if name not in timing]
        stripped.append(
            "\n".join(",".join(line.split(",")[i] for i in keep) for line in lines)
        )
    assert stripped[0] == stripped[1]
    assert stripped[0].encode() == stripped[1].encode()
    _pass(8, "two scale-0.25 sweeps byte-identical after dropping timing columns")


def test_criterion_9_algorithm_fidelity():
    rng = np.random.default_rng(99)
    truth = generate(SynthSpec(SynthShape.GAUSSIAN_PEAKS, 10, 10, amplitude=8.0, seed=2))
    psi = wrap_map(truth)
    grads = wrapped_gradients(psi)
    from lpunwrap.assemble import assemble_system, compute_weights

    phi0 = rng.uniform(-math.pi, math.pi, 100)
    system = assemble_system(compute_weights(phi0, grads, 0.0, 0.01), grads)
    A, b = system.matrix, system.rhs

    ours = []
    pcg_solve(A, b, phi0, build(PrecondKind.IDENTITY, A), l_max=20, epsilon=1e-300,
              callback=lambda l, x: ours.append(x.copy()))

    # independent plain conjugate gradient with the same periodic residual
    # recomputation rule: recompute r = b - A x whenever l % round(sqrt(n)) == 0
    restart = round(math.sqrt(A.n))
    assert restart == 10
    x = phi0.copy()
    r = b - spmv(A, x)
    d = r.copy()
    delta = float(r @ r)
    reference = []
    for l in range(20):
        q = spmv(A, d)
        alpha = delta / float(d @ q)
        x += alpha * d
        r = (b - spmv(A, x)) if l % restart == 0 else (r - alpha * q)
        s = r.copy()
        delta_old = delta
        delta = float(r @ s)
        d = s + (delta / delta_old) * d
        reference.append(x.copy())

    assert len(ours) == 20
    worst = max(float(np.max(np.abs(a - b_))) for a, b_ in zip(ours, reference))
    assert worst <= 1e-12

    # the same reference without the periodic recomputation drifts away,
    # which shows the comparison is sensitive to the restart rule (recorded)
    x = phi0.copy()
    r = b - spmv(A, x)
    d = r.copy()
    delta = float(r @ r)
    drift = []
    for l in range(20):
        q = spmv(A, d)
        alpha = delta / float(d @ q)
        x += alpha * d
        r = r - alpha * q
        s = r.copy()
        delta_old = delta
        delta = float(r @ s)
        d = s + (delta / delta_old) * d
        drift.append(x.copy())
    no_restart = max(float(np.max(np.abs(a - b_))) for a, b_ in zip(ours, drift))
    _pass(9, f"20 identity-PCG iterates match plain CG within {worst:.2e}; "
             f"omitting the restart rule drifts to {no_restart:.2e} (recorded)")
