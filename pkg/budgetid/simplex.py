"""Maximin solver over the (restricted) probability simplex.

The solver maximizes ``f(omega) = min_j f_j(omega)`` where every piece
``f_j`` is concave and 1-homogeneous in ``omega``, e.g. a best response
``inf_lambda sum_k omega_k KL(lambda_k, mu_k)`` restricted to one
family of alternatives. A piece is evaluated together with its
minimizer ``lambda_j`` and its supergradient, the vector
``g_j = (KL(lambda_j,k, mu_k))_k``. Because ``f <= g_j . omega``
everywhere, every evaluation yields a cut, and any convex combination
``y`` of cuts certifies the upper bound

    max_omega f(omega) <= m sum_k v_k + (1 - K m) max_k v_k,
    v = sum_j y_j g_j,

on the simplex restricted to ``omega_k >= m``.

"""

import numpy as np
from scipy.optimize import linprog
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import OptimizerFailure
from budgetid.history import History


__all__ = ['MaximinSolver', 'relative_gap']

TINY = 1e-300


def relative_gap(lower, upper):
    """Relative distance between a lower and an upper bound."""
    if upper <= TINY:
        return 0.0 if upper >= lower else np.inf
    return max(upper - lower, 0.0) / upper


class MaximinSolver(BaseEstimator):
    """Maximize the minimum of concave pieces over the simplex.

    The solver runs three phases:

    1. entropic mirror ascent from the uniform weights, whose averaged
       iterate serves as warm start;
    2. an SLSQP polish of the epigraph problem
       ``max t s.t. f_j(omega) >= t``;
    3. a cutting-plane loop solving the linear model of the stored
       cuts with HiGHS. The duals of the model give the certified
       upper bound above; the loop stops once the relative duality gap
       is at most ``tol`` or has stopped shrinking.

    Parameters
    ----------
    pieces : callable
      ``pieces(omega) -> (values, lambdas, grads)`` with ``values`` of
      shape (P,), ``lambdas`` of shape (P, K) and ``grads`` of shape
      (P, K). The number of pieces must not depend on ``omega``.

    n_arms : int
      Dimension K of the simplex.

    min_weight : float (default=0.0)
      Lower bound on every coordinate of ``omega``.

    tol : float (default=1e-9)
      Target relative duality gap.

    max_iter : int (default=10**6)
      Cap on the total number of iterations over all phases.

    warm_start : int (default=100)
      Number of mirror ascent steps.

    lr : float (default=1.0)
      Initial mirror ascent step size; it decays as ``lr / sqrt(t)``.

    probe : float (default=1e-6)
      Size of the perturbations around the polished point whose cuts
      tighten the certificate.

    patience : int (default=50)
      The cutting-plane loop stops once the gap has not shrunk for this
      many consecutive iterations.

    gap_floor : float (default=1e-8)
      A stopped loop counts as converged if its gap is at most this
      value, the relative precision the cut values are known to.

    max_cuts : int (default=500)
      Once more cuts are stored, the ones without dual weight are
      dropped, except for the most recent half of this number.

    Attributes
    ----------
    omega_ : np.ndarray
      The best weights found.

    value_ : float
      ``f(omega_)``, a certified lower bound of the maximum.

    upper_ : float
      Certified upper bound of the maximum.

    gap_ : float
      Relative duality gap between ``value_`` and ``upper_``.

    lambda_ : np.ndarray
      Minimizer of the active piece at ``omega_``.

    history_ : History
      One row per iteration, with the keys ``phase``, ``value``,
      ``upper`` and ``gap``.

    """
    def __init__(
            self,
            pieces,
            n_arms,
            min_weight=0.0,
            tol=1e-9,
            max_iter=10**6,
            warm_start=100,
            lr=1.0,
            probe=1e-6,
            patience=50,
            gap_floor=1e-8,
            max_cuts=500,
    ):
        self.pieces = pieces
        self.n_arms = n_arms
        self.min_weight = min_weight
        self.tol = tol
        self.max_iter = max_iter
        self.warm_start = warm_start
        self.lr = lr
        self.probe = probe
        self.patience = patience
        self.gap_floor = gap_floor
        self.max_cuts = max_cuts

    def initialize(self):
        K, m = self.n_arms, self.min_weight
        if m < 0 or K * m > 1 + 1e-12:
            raise InvalidParameterError(
                "min_weight must lie in [0, 1/K], got {!r} for K={}.".format(
                    m, K))
        self.span_ = max(1.0 - K * m, 0.0)
        self.cuts_ = []
        self.history_ = History()
        self.omega_ = None
        self.lambda_ = None
        self.value_ = -np.inf
        self.upper_ = np.inf
        self.gap_ = np.inf
        self.n_iter_ = 0
        self.stalled_ = False
        self._cache = (None, None)
        return self

    def _project(self, omega):
        m, span = self.min_weight, self.span_
        p = np.maximum(np.asarray(omega, dtype=float) - m, 0.0)
        total = p.sum()
        if total <= 0:
            p = np.ones(self.n_arms)
            total = self.n_arms
        return m + span * p / total

    def _call_pieces(self, omega):
        key, cached = self._cache
        token = omega.tobytes()
        if key == token:
            return cached
        values, lambdas, grads = self.pieces(omega)
        result = (np.asarray(values, dtype=float),
                  np.atleast_2d(np.asarray(lambdas, dtype=float)),
                  np.atleast_2d(np.asarray(grads, dtype=float)))
        self._cache = (token, result)
        return result

    def evaluate(self, omega):
        """Evaluate ``f`` at the projection of ``omega``, store the cuts
        and keep track of the best point.

        Returns
        -------
        value : float

        grad : np.ndarray
          Supergradient of the active piece.

        """
        omega = self._project(omega)
        values, lambdas, grads = self._call_pieces(omega)
        j = int(np.argmin(values))
        value = values[j]

        near = values <= 2 * abs(value) + TINY
        for grad in grads[near]:
            if np.all(np.isfinite(grad)):
                self.cuts_.append(grad)

        if value > self.value_:
            self.value_ = value
            self.omega_ = omega
            self.lambda_ = lambdas[j]
        return value, grads[j]

    def _record(self, phase):
        self.history_.new_row(
            iteration=self.n_iter_,
            phase=phase,
            value=self.value_,
            upper=self.upper_,
            gap=self.gap_,
        )

    def _mirror_ascent(self):
        K, span = self.n_arms, self.span_
        p = np.ones(K) / K
        total = np.zeros(K)
        n_steps = min(self.warm_start, self.max_iter)
        for t in range(1, n_steps + 1):
            omega = self.min_weight + span * p
            _, grad = self.evaluate(omega)
            grad = span * grad
            scale = max(np.max(np.abs(grad)), TINY)
            step = self.lr / np.sqrt(t) * grad / scale
            p = p * np.exp(step - step.max())
            p = p / p.sum()
            total += omega
            self.n_iter_ += 1
        if n_steps:
            self.evaluate(total / n_steps)
        self._record('mirror_ascent')

    def _polish(self):
        K, m = self.n_arms, self.min_weight
        maxiter = max(min(200, self.max_iter - self.n_iter_), 1)

        def constraint(z):
            values, _, _ = self._call_pieces(self._project(z[:K]))
            return values - z[-1]

        def constraint_jac(z):
            _, _, grads = self._call_pieces(self._project(z[:K]))
            return np.hstack([grads, -np.ones((len(grads), 1))])

        z0 = np.append(self.omega_, self.value_)
        cons = [
            {'type': 'ineq', 'fun': constraint, 'jac': constraint_jac},
            {'type': 'eq',
             'fun': lambda z: np.sum(z[:K]) - 1.0,
             'jac': lambda z: np.append(np.ones(K), 0.0)},
        ]
        c = np.append(np.zeros(K), -1.0)
        try:
            res = minimize(
                lambda z: c @ z, z0, jac=lambda z: c, method='SLSQP',
                bounds=[(m, 1.0)] * K + [(None, None)], constraints=cons,
                options={'ftol': 1e-15, 'maxiter': maxiter})
            self.n_iter_ += int(res.nit)
            if np.all(np.isfinite(res.x)):
                self.evaluate(res.x[:K])
        except (ValueError, ArithmeticError):
            # the cutting planes do not need a polished start
            pass

        center = self.omega_
        for k in range(K):
            direction = np.eye(K)[k] - center
            for sign in (1.0, -1.0):
                self.evaluate(center + sign * self.probe * direction)
        self._record('polish')

    def _solve_model(self):
        K, m = self.n_arms, self.min_weight
        G = np.vstack(self.cuts_)
        res = linprog(
            c=np.append(np.zeros(K), -1.0),
            A_ub=np.hstack([-G, np.ones((len(G), 1))]),
            b_ub=np.zeros(len(G)),
            A_eq=np.append(np.ones(K), 0.0)[None, :],
            b_eq=[1.0],
            bounds=[(m, 1.0)] * K + [(None, None)],
            method='highs',
            options={'primal_feasibility_tolerance': 1e-10,
                     'dual_feasibility_tolerance': 1e-10},
        )
        if res.status != 0:
            return G, None, None
        y = np.clip(-np.asarray(res.ineqlin.marginals), 0.0, None)
        # any convex combination of cuts gives a valid bound
        y = y / y.sum() if y.sum() > 0 else np.ones(len(G)) / len(G)
        return G, res.x[:K], y

    def certified_upper(self, G, y):
        """Upper bound on the maximum implied by the convex combination
        ``y`` of the cuts ``G``.

        """
        v = y @ G
        return self.min_weight * v.sum() + self.span_ * v.max()

    def _free(self, omega):
        return omega > self.min_weight + 1e-10

    def _refine_dual(self, G, y, omega):
        active = np.flatnonzero(y > 1e-12 * y.max())
        free = np.flatnonzero(self._free(omega))
        if not len(active) or not len(free):
            return np.inf
        # (y G)_k equal to a common level on the free coordinates
        A = np.zeros((len(free) + 1, len(active) + 1))
        A[:-1, :-1] = G[np.ix_(active, free)].T
        A[:-1, -1] = -1.0
        A[-1, :-1] = 1.0
        b = np.zeros(len(free) + 1)
        b[-1] = 1.0
        sol = np.linalg.lstsq(A, b, rcond=None)[0]
        y_active = sol[:-1]
        if np.any(y_active < 0):
            return np.inf
        y_new = np.zeros_like(y)
        y_new[active] = y_active / y_active.sum()
        return self.certified_upper(G, y_new)

    def _refine_primal(self, G, y, omega):
        m = self.min_weight
        active = np.flatnonzero(y > 1e-12 * y.max())
        free = self._free(omega)
        idx = np.flatnonzero(free)
        if not len(active) or not len(idx):
            return None
        # active cuts equal to a common level t
        A = np.zeros((len(active) + 1, len(idx) + 1))
        A[:-1, :-1] = G[np.ix_(active, idx)]
        A[:-1, -1] = -1.0
        A[-1, :-1] = 1.0
        b = np.zeros(len(active) + 1)
        b[:-1] = -G[np.ix_(active, np.flatnonzero(~free))].sum(axis=1) * m
        b[-1] = 1.0 - m * np.sum(~free)
        sol = np.linalg.lstsq(A, b, rcond=None)[0]
        omega_new = np.full(self.n_arms, m)
        omega_new[idx] = sol[:-1]
        if np.any(omega_new < m - 1e-12) or not np.all(np.isfinite(omega_new)):
            return None
        return omega_new

    def _prune(self, n_model, y):
        """Drop the cuts of the last model that carry no dual weight,
        except for the most recent ones.

        """
        if len(self.cuts_) <= self.max_cuts:
            return
        recent = np.arange(n_model) >= n_model - self.max_cuts // 2
        keep = np.flatnonzero((y > 0) | recent)
        self.cuts_ = [self.cuts_[i] for i in keep] + self.cuts_[n_model:]

    def _cutting_planes(self):
        best_gap, stalled = np.inf, 0
        while self.n_iter_ < self.max_iter:
            self.n_iter_ += 1
            G, omega_lp, y = self._solve_model()
            if omega_lp is None:
                break

            upper = min(self.certified_upper(G, y),
                        self._refine_dual(G, y, omega_lp))
            self.upper_ = min(self.upper_, upper)

            self.evaluate(omega_lp)
            candidate = self._refine_primal(G, y, omega_lp)
            if candidate is not None:
                self.evaluate(candidate)

            self.gap_ = relative_gap(self.value_, self.upper_)
            self._record('cutting_plane')
            if self.gap_ <= self.tol:
                return True

            if self.gap_ < (1 - 1e-3) * best_gap:
                best_gap, stalled = self.gap_, 0
            else:
                stalled += 1
            if stalled >= self.patience:
                self.stalled_ = True
                return self.gap_ <= self.gap_floor
            self._prune(len(G), y)
        return False

    def fit(self):
        """Run the solver.

        Returns
        -------
        self

        Raises
        ------
        OptimizerFailure
          If the relative duality gap is still above ``tol`` once
          ``max_iter`` iterations are used up, or if the gap
          stopped shrinking above ``gap_floor``.

        """
        self.initialize()
        if self.span_ <= 1e-15:
            # min_weight = 1/K leaves a single feasible point
            value, _ = self.evaluate(np.ones(self.n_arms) / self.n_arms)
            self.upper_, self.gap_ = value, 0.0
            self._record('fixed')
            return self

        self._mirror_ascent()
        self._polish()
        if self._cutting_planes():
            return self

        reason = "stalled" if self.stalled_ else "stopped"
        raise OptimizerFailure(
            "Maximin solver {} with relative gap {:.3g} > {:.3g} after {} "
            "iterations.".format(reason, self.gap_, self.tol, self.n_iter_),
            diagnostics={
                'lower': self.value_,
                'upper': self.upper_,
                'gap': self.gap_,
                'n_iter': self.n_iter_,
                'stalled': self.stalled_,
                'omega': None if self.omega_ is None else self.omega_.tolist(),
            })
