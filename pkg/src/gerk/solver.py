"""Randomized block Kaczmarz iterations with dual regularization.

One iteration, starting from x*_k (regularizer-dual iterate), x_k = grad
f*(x*_k), z*_k (misfit-dual iterate) and z_k = grad g*(z*_k):

    draw column block j            (skipped when the z-update is disabled)
    z*_{k+1} = z*_k - tz * A_j (A_j^H z_k),    tz = 1/(Lg* * ||A_j||^2)
    z_{k+1}  = grad g*(z*_{k+1})
    draw row block i
    w        = A_i x_k - b_i + z*_{k+1,i}      (the z* term only when enabled)
    x*_{k+1} = x*_k - tx * A_i^H w,            tx = 1/(Lf* * ||A_i||^2)
    x_{k+1}  = grad f*(x*_{k+1})

Block norms are spectral norms, so for one-index blocks tx and tz reduce to
inverse squared row/column norms.  Starting point: x*_0 = 0 and z*_0 = b.
With the z-update disabled the iteration is the sparse (elastic net) or plain
randomized Kaczmarz method; with everything quadratic it is the extended
randomized Kaczmarz method converging to the pseudoinverse solution.

Exactly one z-draw then one x-draw is consumed per iteration, in that order,
from RngStream(seed, stream), so runs with equal configs are bit-identical.
"""

import time
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blocks import BlockPartition, column_partition, row_partition
from .errors import DimensionMismatch, FieldMismatch, MissingParameter
from .linalg import as_matrix, as_vector
from .potentials import (
    ComplexElasticNet,
    ElasticNet,
    HuberQuadMisfit,
    Quadratic,
    QuadraticMisfit,
    real_inner,
)
from .rng import RngStream

PRESET_NAMES = ("rk", "srk", "rek", "gerk_ad", "gerk_bd")


@dataclass
class SolverConfig:
    f: object
    g: Optional[object]
    row_partition: BlockPartition
    col_partition: Optional[BlockPartition]
    z_update_enabled: bool
    max_iterations: int
    seed: int
    stream: int = 0
    z_stepsize_mode: str = "constant"
    checkpoint_interval: Optional[int] = None


@dataclass
class SolverState:
    k: int
    x: np.ndarray
    xstar: np.ndarray
    z: Optional[np.ndarray]
    zstar: Optional[np.ndarray]
    rng: RngStream


@dataclass
class SolverReport:
    state: SolverState
    iterations: int
    wall_time: float
    stop_reason: str


def validate_config(A, b, cfg):
    A = as_matrix(A)
    b = as_vector(b)
    m, n = A.shape
    if b.size != m:
        raise DimensionMismatch(f"A has {m} rows but b has length {b.size}")
    if np.iscomplexobj(A) != np.iscomplexobj(b):
        raise FieldMismatch("A and b must both be real or both be complex")
    cfg.f.check_field(np.iscomplexobj(A))
    if cfg.row_partition.kind != "row" or cfg.row_partition.axis_len != m:
        raise DimensionMismatch(f"row partition must cover {m} rows")
    if cfg.z_update_enabled:
        if cfg.g is None:
            raise MissingParameter("z-update needs a misfit g")
        if cfg.col_partition is None:
            raise DimensionMismatch("z-update needs a column partition")
        if cfg.col_partition.kind != "column" or cfg.col_partition.axis_len != n:
            raise DimensionMismatch(f"column partition must cover {n} columns")
    if cfg.z_stepsize_mode not in ("constant", "residual_adaptive"):
        raise ValueError(f"unknown z_stepsize_mode {cfg.z_stepsize_mode!r}")
    if cfg.max_iterations < 0:
        raise ValueError("max_iterations must be >= 0")
    if cfg.checkpoint_interval is not None and cfg.checkpoint_interval < 1:
        raise ValueError("checkpoint_interval must be >= 1")
    return A, b


def init_state(A, b, cfg):
    """Initial state: x*_0 = 0 (so x_0 = 0) and z*_0 = b when z is enabled."""
    A, b = validate_config(A, b, cfg)
    n = A.shape[1]
    dtype = np.complex128 if np.iscomplexobj(A) else np.float64
    is_complex = dtype == np.complex128
    xstar = np.zeros(n, dtype=dtype)
    f_upd = cfg.f.updater(n, is_complex)
    x = xstar if f_upd is None else np.zeros(n, dtype=dtype)
    if f_upd is not None:
        f_upd(xstar, x)
    if cfg.z_update_enabled:
        zstar = b.astype(dtype, copy=True)
        g_upd = cfg.g.updater(b.size, is_complex)
        z = zstar if g_upd is None else np.empty_like(zstar)
        if g_upd is not None:
            g_upd(zstar, z)
    else:
        zstar = None
        z = None
    return SolverState(
        k=0, x=x, xstar=xstar, z=z, zstar=zstar, rng=RngStream(cfg.seed, cfg.stream)
    )


def residual_adaptive_z_stepsize(z, A_block, grad_lipschitz, block_sq_norm=None):
    """Stepsize (1/L) * ||A_j^H z||^2 / ||A_j A_j^H z||^2 with underflow fallback.

    Falls back to the constant 1/(L * ||A_j||^2) when the denominator is
    <= 1e-300.  On one-column blocks this equals the constant stepsize up to
    roundoff (rank-one identity).
    """
    A_block = np.atleast_2d(np.asarray(A_block))
    s = A_block.conj().T @ z
    v = A_block @ s
    den = real_inner(v, v)
    if den <= 1e-300:
        if block_sq_norm is None:
            from .linalg import spectral_norm

            block_sq_norm = spectral_norm(A_block) ** 2
        return 1.0 / (grad_lipschitz * block_sq_norm)
    return real_inner(s, s) / (grad_lipschitz * den)


class _Caches:
    """Per-run working structures; everything the hot loop touches."""

    def __init__(self, A, b, cfg):
        is_complex = np.iscomplexobj(A)
        self.is_complex = is_complex
        self.A_rm = np.ascontiguousarray(A)
        self.A_rm_conj = np.conj(self.A_rm) if is_complex else self.A_rm
        self.b = b
        rp = cfg.row_partition
        self.row_cum = rp._cum.tolist()
        self.row_blocks = rp.blocks
        self.row_trivial = rp.trivial
        self.t_row = (1.0 / (cfg.f.conj_lipschitz * rp.block_sq_norms)).tolist()
        self.f_upd = cfg.f.updater(A.shape[1], is_complex)
        if cfg.z_update_enabled:
            self.A_cm = np.asfortranarray(A)
            cp = cfg.col_partition
            self.col_cum = cp._cum.tolist()
            self.col_blocks = cp.blocks
            self.col_trivial = cp.trivial
            self.t_col = (1.0 / (cfg.g.grad_lipschitz * cp.block_sq_norms)).tolist()
            self.g_upd = cfg.g.updater(A.shape[0], is_complex)
            self.g_lip = cfg.g.grad_lipschitz


def _advance(state, cfg, caches, steps):
    """Run `steps` iterations in place; the single implementation of the update."""
    x, xstar = state.x, state.xstar
    z, zstar = state.z, state.zstar
    rand = state.rng.random
    b = caches.b
    A_rm, A_rm_conj = caches.A_rm, caches.A_rm_conj
    row_cum, row_blocks = caches.row_cum, caches.row_blocks
    row_trivial, t_row = caches.row_trivial, caches.t_row
    f_upd = caches.f_upd
    z_on = cfg.z_update_enabled
    if z_on:
        A_cm = caches.A_cm
        col_cum, col_blocks = caches.col_cum, caches.col_blocks
        col_trivial, t_col = caches.col_trivial, caches.t_col
        g_upd, g_lip = caches.g_upd, caches.g_lip
        adaptive = cfg.z_stepsize_mode == "residual_adaptive"
        n_col = len(col_blocks)
        cdot = np.vdot if caches.is_complex else np.dot
    n_row = len(row_blocks)

    for _ in range(steps):
        if z_on:
            j = bisect_right(col_cum, rand())
            if j >= n_col:
                j = n_col - 1
            if col_trivial and not adaptive:
                col = A_cm[:, j]
                zstar -= (t_col[j] * cdot(col, z)) * col
            else:
                Aj = A_cm[:, col_blocks[j]]
                s = Aj.conj().T @ z
                v = Aj @ s
                if adaptive:
                    den = real_inner(v, v)
                    tz = real_inner(s, s) / (g_lip * den) if den > 1e-300 else t_col[j]
                else:
                    tz = t_col[j]
                zstar -= tz * v
            if g_upd is not None:
                g_upd(zstar, z)
        i = bisect_right(row_cum, rand())
        if i >= n_row:
            i = n_row - 1
        if row_trivial:
            row = A_rm[i]
            w = np.dot(row, x) - b[i]
            if z_on:
                w += zstar[i]
            xstar -= (t_row[i] * w) * A_rm_conj[i]
        else:
            blk = row_blocks[i]
            Ai = A_rm[blk]
            w = Ai @ x - b[blk]
            if z_on:
                w += zstar[blk]
            xstar -= t_row[i] * (Ai.conj().T @ w)
        if f_upd is not None:
            f_upd(xstar, x)
    state.k += steps
    return state


def gerk_step(state, A, b, cfg):
    """Advance the state by exactly one iteration (two index draws when z is on)."""
    A, b = validate_config(A, b, cfg)
    return _advance(state, cfg, _Caches(A, b, cfg), 1)


def run(A, b, cfg, hooks=()):
    """Run up to cfg.max_iterations iterations from the standard initial state.

    Hooks are called with the live state at iteration 0, after every
    checkpoint_interval iterations (default: one epoch, i.e. every m
    iterations), and at the final iterate.  A hook returning a truthy value
    stops the run with stop_reason "tolerance_met".  Hook callers must treat
    the state as read-only; arrays are live views, not copies.
    """
    t0 = time.perf_counter()
    A, b = validate_config(A, b, cfg)
    state = init_state(A, b, cfg)
    caches = _Caches(A, b, cfg)
    interval = cfg.checkpoint_interval or A.shape[0]
    stop_reason = "max_iterations"
    if any(hook(state) for hook in hooks):
        stop_reason = "tolerance_met"
    else:
        remaining = cfg.max_iterations
        while remaining > 0:
            chunk = min(interval, remaining)
            _advance(state, cfg, caches, chunk)
            remaining -= chunk
            if any(hook(state) for hook in hooks):
                stop_reason = "tolerance_met"
                break
    return SolverReport(
        state=state,
        iterations=state.k,
        wall_time=time.perf_counter() - t0,
        stop_reason=stop_reason,
    )


def _sparse_regularizer(lam, is_complex, name):
    if lam is None:
        raise MissingParameter(f"preset {name!r} needs lam")
    return ComplexElasticNet(lam) if is_complex else ElasticNet(lam)


def preset(
    name,
    A,
    *,
    lam=None,
    eps=None,
    tau=None,
    max_iterations,
    seed,
    stream=0,
    checkpoint_interval=None,
    z_stepsize_mode="constant",
    row_probabilities=None,
    col_probabilities=None,
):
    """Named solver configuration over single-index partitions of A.

    rk       minimum-norm Kaczmarz, no z-update
    srk      sparse (elastic net) Kaczmarz, no z-update; needs lam
    rek      extended Kaczmarz for least squares, quadratic everywhere
    gerk_ad  sparse regularizer + quadratic misfit with z-update; needs lam
    gerk_bd  sparse regularizer + huber/quadratic misfit; needs lam, eps, tau
    """
    A = as_matrix(A)
    is_complex = np.iscomplexobj(A)
    if name == "rk":
        f, g, z_on = Quadratic(), None, False
    elif name == "srk":
        f, g, z_on = _sparse_regularizer(lam, is_complex, name), None, False
    elif name == "rek":
        f, g, z_on = Quadratic(), QuadraticMisfit(), True
    elif name == "gerk_ad":
        f, g, z_on = _sparse_regularizer(lam, is_complex, name), QuadraticMisfit(), True
    elif name == "gerk_bd":
        if eps is None or tau is None:
            raise MissingParameter("preset 'gerk_bd' needs eps and tau")
        f = _sparse_regularizer(lam, is_complex, name)
        g, z_on = HuberQuadMisfit(eps, tau), True
    else:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return SolverConfig(
        f=f,
        g=g,
        row_partition=row_partition(A, probabilities=row_probabilities),
        col_partition=column_partition(A, probabilities=col_probabilities) if z_on else None,
        z_update_enabled=z_on,
        max_iterations=max_iterations,
        seed=seed,
        stream=stream,
        z_stepsize_mode=z_stepsize_mode,
        checkpoint_interval=checkpoint_interval,
    )
