"""Deterministic reference solutions the randomized solvers are tested against.

range_projection_quadratic is exact (SVD).  The other two are full-gradient
iterations: misfit_projection minimizes u -> g*(b - Au) with the constant
step 1/(grad_lipschitz * ||A||^2) plus Nesterov momentum with gradient
restarts (plain gradient descent cannot reach the default tolerance for the
huber misfit, whose grad_lipschitz is 1/eps + tau, in a workable iteration
count; the momentum variant is still a deterministic full-gradient method
with the same stepsize and stopping rule).  constrained_regularizer_min is
the deterministic analog of the sparse Kaczmarz iteration: a dual gradient
step followed by the conjugate gradient map.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotConverged
from .linalg import as_matrix, as_vector, range_projector_apply, spectral_norm


@dataclass
class OracleSolution:
    value: np.ndarray
    residual: float
    iterations: int
    converged: bool


def range_projection_quadratic(A, b):
    """Orthogonal projection of b onto range(A): the target of the z-iteration."""
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    y = range_projector_apply(A, b)
    return OracleSolution(value=y, residual=0.0, iterations=0, converged=True)


def misfit_projection(A, b, g, tol=1e-10, max_iter=10**6):
    """y_hat = A u_hat where u_hat minimizes g*(b - Au).

    Stops when ||A^H grad g*(b - Au)|| <= tol * ||b||.  Raises NotConverged
    (carrying the best iterate found) when max_iter is hit.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    bnorm = float(np.linalg.norm(b))
    step = 1.0 / (g.grad_lipschitz * spectral_norm(A) ** 2)
    Ah = A.conj().T
    u = np.zeros(A.shape[1], dtype=A.dtype)
    y = u
    momentum_k = 0
    best_u, best_res = u, np.inf
    for it in range(1, max_iter + 1):
        grad_u = -(Ah @ g.gradient(b - A @ u))
        res = float(np.linalg.norm(grad_u))
        if res < best_res:
            best_u, best_res = u, res
        if res <= tol * bnorm:
            return OracleSolution(value=A @ u, residual=res, iterations=it - 1, converged=True)
        grad_y = -(Ah @ g.gradient(b - A @ y))
        u_next = y - step * grad_y
        # gradient restart: drop momentum when it points uphill
        if np.real(np.vdot(grad_y, u_next - u)) > 0.0:
            momentum_k = 0
        momentum_k += 1
        y = u_next + (momentum_k - 1.0) / (momentum_k + 2.0) * (u_next - u)
        u = u_next
    raise NotConverged(
        f"misfit projection did not reach tol={tol} in {max_iter} iterations",
        best=A @ best_u,
        residual=best_res,
    )


def constrained_regularizer_min(A, y_hat, f, tol=1e-10, max_iter=10**6):
    """x_hat = argmin f(x) subject to A x = y_hat, for y_hat in range(A).

    Full-gradient dual iteration from xstar = 0:

        xstar <- xstar - (1/(conj_lipschitz * ||A||^2)) * A^H (A x - y_hat)
        x     <- grad f*(xstar)

    Stops when ||A x - y_hat|| <= tol * ||y_hat|| and the successive change
    ||x_{k+1} - x_k|| is <= tol.  Raises NotConverged with the best iterate.
    """
    A = as_matrix(A)
    y_hat = as_vector(y_hat, A.shape[0])
    ynorm = float(np.linalg.norm(y_hat))
    step = 1.0 / (f.conj_lipschitz * spectral_norm(A) ** 2)
    Ah = A.conj().T
    xstar = np.zeros(A.shape[1], dtype=A.dtype)
    x = f.conjugate_gradient(xstar)
    res = float(np.linalg.norm(A @ x - y_hat))
    if res <= tol * ynorm:
        return OracleSolution(value=x, residual=res, iterations=0, converged=True)
    best_x, best_res = x, res
    for it in range(1, max_iter + 1):
        xstar -= step * (Ah @ (A @ x - y_hat))
        x_next = f.conjugate_gradient(xstar)
        res = float(np.linalg.norm(A @ x_next - y_hat))
        delta = float(np.linalg.norm(x_next - x))
        x = x_next
        if res < best_res:
            best_x, best_res = x, res
        if res <= tol * ynorm and delta <= tol:
            return OracleSolution(value=x, residual=res, iterations=it, converged=True)
    raise NotConverged(
        f"constrained minimization did not reach tol={tol} in {max_iter} iterations",
        best=best_x,
        residual=best_res,
    )
