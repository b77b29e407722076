"""Oracle difficulty of static proportions.

For a task and an instance ``mu``, the static proportions ``omega``
achieve the error exponent

    best_response(omega) = inf_{lambda in Alt(mu)} sum_k omega_k KL(lambda_k, mu_k)

and the oracle difficulty is ``H(mu) = 1 / max_omega best_response(omega)``.

The infimum splits into finitely many *pieces*, one per way of
reaching the alternative (a challenger arm for BAI, an arm crossing
the threshold, ...), each minimized in closed form. The maximum over
``omega`` is taken in closed form when one is known and by the
:class:`budgetid.simplex.MaximinSolver` otherwise.

"""

import itertools

import numpy as np
from scipy.optimize import minimize_scalar

from budgetid.exceptions import DegenerateInstanceError
from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import PreconditionError
from budgetid.exceptions import UnsupportedError
from budgetid.families import Bernoulli
from budgetid.families import Gaussian
from budgetid.simplex import MaximinSolver
from budgetid.tasks import BAI
from budgetid.tasks import HalfSpace
from budgetid.tasks import Positivity
from budgetid.tasks import Thresholding
from budgetid.tasks import correct_answer
from budgetid.utils import as_weights


__all__ = [
    'BallResult',
    'DifficultyResult',
    'alternative_pieces',
    'ball_restricted_difficulty',
    'best_response',
    'closed_form_bernoulli_bai',
    'closed_form_expfam_bai_2',
    'grid_oracle',
    'h_delta',
    'oracle_difficulty_sp',
    'sp_rate',
]


class DifficultyResult:
    """Oracle difficulty together with its optimizers.

    Attributes
    ----------
    H : float
      The difficulty, ``1 / inverse_rate``.

    inverse_rate : float
      ``max_omega inf_lambda sum_k omega_k KL(lambda_k, mu_k)``.

    omega_star : np.ndarray
      Maximizing weights.

    lambda_star : np.ndarray
      Worst-case alternative at ``omega_star``. It may lie on the
      boundary of the alternative set.

    method : str
      One of ``'closed_form'``, ``'optimizer'``, ``'grid_oracle'`` and
      ``'h_delta'``.

    details : dict
      Method specific values, e.g. ``x_star`` for the two-arm closed
      form or the duality gap of the optimizer.

    """
    def __init__(self, inverse_rate, omega_star, lambda_star, method,
                 details=None):
        self.inverse_rate = float(inverse_rate)
        self.H = 1.0 / self.inverse_rate if self.inverse_rate > 0 else np.inf
        self.omega_star = np.asarray(omega_star, dtype=float)
        self.lambda_star = np.asarray(lambda_star, dtype=float)
        self.method = method
        self.details = details or {}

    def __repr__(self):
        return 'DifficultyResult(H={!r}, omega_star={}, method={!r})'.format(
            self.H, np.array2string(self.omega_star, precision=6), self.method)


def _check_supported(task, instance):
    if isinstance(task, HalfSpace) and not instance.all_gaussian:
        raise UnsupportedError(
            "Half-space identification is only supported for Gaussian arms.")
    for family in instance.families:
        if not isinstance(family, (Gaussian, Bernoulli)):
            raise UnsupportedError(
                "Unsupported family {!r}.".format(family))


def _pair_minimizer(family_i, mu_i, w_i, family_a, mu_a, w_a):
    """Minimize ``w_i KL(x, mu_i) + w_a KL(x, mu_a)`` over the scalar x.

    The minimizer lies between both means. For a shared family it is
    ``phi'((w_i xi_i + w_a xi_a) / (w_i + w_a))``.

    """
    total = w_i + w_a
    if total <= 0:
        return 0.5 * (mu_i + mu_a)

    if isinstance(family_i, Gaussian) and isinstance(family_a, Gaussian):
        p_i = w_i / family_i.variance
        p_a = w_a / family_a.variance
        return (p_i * mu_i + p_a * mu_a) / (p_i + p_a)

    if family_i == family_a:
        xi = (w_i * family_i.natural_of_mean(mu_i)
              + w_a * family_i.natural_of_mean(mu_a)) / total
        return float(family_i.phi_prime(xi))

    # arms from different families
    res = minimize_scalar(
        lambda x: w_i * family_i.kl(x, mu_i) + w_a * family_a.kl(x, mu_a),
        bounds=(min(mu_i, mu_a), max(mu_i, mu_a)), method='bounded',
        options={'xatol': 1e-14})
    return float(res.x)


def _bai_pieces(task, instance, omega):
    mu = instance.means
    fams = instance.families
    best = task.answer(mu)
    values, lambdas, grads = [], [], []
    for a in range(instance.n_arms):
        if a == best:
            continue
        x = _pair_minimizer(fams[best], mu[best], omega[best],
                            fams[a], mu[a], omega[a])
        kl_best = fams[best].kl(x, mu[best])
        kl_a = fams[a].kl(x, mu[a])
        lam = mu.copy()
        lam[best] = lam[a] = x
        grad = np.zeros(instance.n_arms)
        grad[best], grad[a] = kl_best, kl_a
        values.append(omega[best] * kl_best + omega[a] * kl_a)
        lambdas.append(lam)
        grads.append(grad)
    return np.array(values), np.array(lambdas), np.array(grads)


def _threshold_costs(task, instance):
    """``KL(theta, mu_k)`` for every arm."""
    return np.array([
        family.kl(task.theta, mean)
        for family, mean in zip(instance.families, instance.means)])


def _single_arm_pieces(task, instance, omega):
    """One piece per arm: move that arm onto the threshold."""
    mu = instance.means
    costs = _threshold_costs(task, instance)
    lambdas = np.tile(mu, (len(mu), 1))
    np.fill_diagonal(lambdas, task.theta)
    return omega * costs, lambdas, np.diag(costs)


def _below_set_piece(task, instance, omega):
    """A single piece: move every arm below the threshold onto it."""
    mu = instance.means
    below = mu < task.theta
    costs = np.where(below, _threshold_costs(task, instance), 0.0)
    lam = np.where(below, task.theta, mu)
    return np.array([omega @ costs]), lam[None, :], costs[None, :]


def _halfspace_pieces(task, instance, omega):
    mu = instance.means
    var = instance.variances
    u = task.u_
    s = task.signed_margin(mu)
    K = instance.n_arms

    starved = (omega <= 0) & (u != 0)
    if np.any(starved):
        # the whole move goes through an arm with no weight
        k = int(np.flatnonzero(starved)[0])
        lam = mu.copy()
        lam[k] -= s / u[k]
        grad = np.zeros(K)
        grad[k] = s ** 2 / (2 * u[k] ** 2 * var[k])
        return np.zeros(1), lam[None, :], grad[None, :]

    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(u != 0, u * var / omega, 0.0)
    norm2 = np.sum(u * ratio)
    lam = mu - s / norm2 * ratio
    grad = np.square(s / norm2 * ratio) / (2 * var)
    return np.array([s ** 2 / (2 * norm2)]), lam[None, :], grad[None, :]


def alternative_pieces(task, instance, omega):
    """Evaluate all pieces of the best response at ``omega``.

    ``omega`` may lie on the boundary of the simplex; the pieces are
    continuous there.

    Returns
    -------
    values : np.ndarray of shape (P,)
      Minimum of ``sum_k omega_k KL(lambda_k, mu_k)`` over each piece
      of the alternative set.

    lambdas : np.ndarray of shape (P, K)
      The minimizers.

    grads : np.ndarray of shape (P, K)
      ``KL(lambda_k, mu_k)`` of the minimizers, the supergradients of
      the pieces.

    """
    if isinstance(task, BAI):
        return _bai_pieces(task, instance, omega)
    if isinstance(task, Thresholding):
        return _single_arm_pieces(task, instance, omega)
    if isinstance(task, Positivity):
        if task.answer(instance.means) == 'all_above':
            return _single_arm_pieces(task, instance, omega)
        return _below_set_piece(task, instance, omega)
    if isinstance(task, HalfSpace):
        return _halfspace_pieces(task, instance, omega)
    raise UnsupportedError("Unknown task {!r}.".format(task))


def best_response(task, instance, omega):
    """Exact infimum of ``sum_k omega_k KL(lambda_k, mu_k)`` over the
    alternatives ``lambda`` of ``instance``.

    Parameters
    ----------
    task : Task

    instance : BanditInstance

    omega : array-like of shape (K,)
      Sampling proportions in the interior of the simplex.

    Returns
    -------
    value : float

    lambda_star : np.ndarray
      A minimizer, possibly on the boundary of the alternative set.

    Raises
    ------
    InvalidWeightsError
      If ``omega`` is not an interior point of the simplex.

    UnsupportedError
      For half-space identification with non-Gaussian arms.

    """
    omega = as_weights(omega, n_arms=instance.n_arms, interior=True)
    _check_supported(task, instance)
    correct_answer(task, instance)
    values, lambdas, _ = alternative_pieces(task, instance, omega)
    j = int(np.argmin(values))
    return float(values[j]), lambdas[j]


def sp_rate(task, instance, omega):
    """Limit of ``T / log(1 / p_T)`` of the static proportions ``omega``,
    i.e. the reciprocal of :func:`best_response`.

    """
    value, _ = best_response(task, instance, omega)
    return 1.0 / value


def _two_arm_x_star(family, mu_1, mu_2):
    if isinstance(family, Bernoulli):
        num = np.log1p(-mu_2) - np.log1p(-mu_1)
        den = family.natural_of_mean(mu_1) - family.natural_of_mean(mu_2)
        return float(num / den)
    xi_1 = family.natural_of_mean(mu_1)
    xi_2 = family.natural_of_mean(mu_2)
    return float((family.phi(xi_1) - family.phi(xi_2)) / (xi_1 - xi_2))


def closed_form_expfam_bai_2(instance):
    """Two-arm BAI difficulty for arms of a shared exponential family.

    With natural parameters ``xi_1, xi_2`` the worst alternative moves
    both means to ``x* = (phi(xi_1) - phi(xi_2)) / (xi_1 - xi_2)``,
    ``1/H = KL(x*, mu_1) = KL(x*, mu_2)`` and the optimal weight of the
    first arm is ``(phi'^-1(x*) - xi_2) / (xi_1 - xi_2)``.

    Raises
    ------
    UnsupportedError
      If the instance does not have exactly two arms of one family.

    DegenerateInstanceError
      If both means are equal.

    """
    if instance.n_arms != 2:
        raise UnsupportedError(
            "The closed form needs K=2 arms, got K={}.".format(instance.n_arms))
    family = instance.family
    if family is None:
        raise UnsupportedError(
            "The closed form needs both arms in the same family.")
    correct_answer(BAI(), instance)

    mu_1, mu_2 = instance.means
    x_star = _two_arm_x_star(family, mu_1, mu_2)
    xi_1 = family.natural_of_mean(mu_1)
    xi_2 = family.natural_of_mean(mu_2)
    w_1 = float((family.phi_prime_inv(x_star) - xi_2) / (xi_1 - xi_2))
    kl_1 = float(family.kl(x_star, mu_1))
    kl_2 = float(family.kl(x_star, mu_2))
    return DifficultyResult(
        kl_1,
        omega_star=[w_1, 1.0 - w_1],
        lambda_star=[x_star, x_star],
        method='closed_form',
        details={'x_star': x_star, 'kl_first': kl_1, 'kl_second': kl_2},
    )


def closed_form_bernoulli_bai(instance):
    """Two-arm Bernoulli BAI difficulty:

        1/H = KL(log((1 - mu_2)/(1 - mu_1)) / log(mu_1 (1 - mu_2) / ((1 - mu_1) mu_2)), mu_1)

    The same value is obtained against ``mu_2``; both are returned in
    ``details`` as ``kl_first`` and ``kl_second``.

    """
    if instance.family != Bernoulli():
        raise UnsupportedError("Both arms must be Bernoulli.")
    return closed_form_expfam_bai_2(instance)


def _closed_form(task, instance, min_weight):
    """Closed form of the oracle difficulty, or None if there is none
    for this case.

    """
    mu = instance.means
    K = instance.n_arms

    if isinstance(task, BAI):
        if K != 2 or instance.family is None:
            return None
        result = closed_form_expfam_bai_2(instance)
        if result.omega_star.min() < min_weight:
            return None
        return result

    if isinstance(task, HalfSpace):
        sigma = np.sqrt(instance.variances)
        u = task.u_
        s = task.signed_margin(mu)
        weight = np.abs(u) * sigma
        omega = weight / weight.sum()
        if omega.min() < min_weight:
            return None
        _, lambdas, _ = _halfspace_pieces(task, instance, omega)
        return DifficultyResult(
            s ** 2 / (2 * weight.sum() ** 2), omega, lambdas[0], 'closed_form')

    costs = _threshold_costs(task, instance)
    if isinstance(task, Positivity) and task.answer(mu) == 'exists_below':
        below = mu < task.theta
        j = int(np.argmax(np.where(below, costs, -np.inf)))
        omega = np.full(K, min_weight)
        omega[j] += 1.0 - K * min_weight
        values, lambdas, _ = _below_set_piece(task, instance, omega)
        return DifficultyResult(values[0], omega, lambdas[0], 'closed_form')

    # every arm is a separate piece: equalize omega_k KL(theta, mu_k)
    inv = 1.0 / costs
    omega = inv / inv.sum()
    if omega.min() < min_weight:
        return None
    _, lambdas, _ = _single_arm_pieces(task, instance, omega)
    return DifficultyResult(1.0 / inv.sum(), omega, lambdas[0], 'closed_form')


def oracle_difficulty_sp(
        task,
        instance,
        min_weight=0.0,
        method='auto',
        tol=1e-9,
        max_iter=10**6,
):
    """Oracle difficulty of the static proportions class.

    Parameters
    ----------
    task : Task

    instance : BanditInstance

    min_weight : float (default=0.0)
      Restrict the proportions to ``omega_k >= min_weight``. With
      ``min_weight = 1/(nK)`` the result lies between ``(1 - 1/n)``
      times and once the unrestricted inverse rate. The floor
      scales with ``1/K`` on purpose: a floor of ``1/n`` on every arm
      only guarantees the factor ``1 - K/n``.

    method : str (default='auto')
      ``'closed_form'`` requires a closed form, ``'optimizer'`` always
      runs the maximin solver and ``'auto'`` uses a closed form when
      one is known and valid under ``min_weight``.

    tol : float (default=1e-9)
      Relative duality gap of the solver.

    max_iter : int (default=10**6)
      Iteration cap of the solver.

    Returns
    -------
    result : DifficultyResult

    Raises
    ------
    DegenerateInstanceError
      If the instance has no unique answer.

    UnsupportedError
      If ``method='closed_form'`` and no closed form applies.

    OptimizerFailure
      If the solver does not converge.

    """
    if method not in ('auto', 'closed_form', 'optimizer'):
        raise InvalidParameterError(
            "Unknown method {!r}, expected 'auto', 'closed_form' or "
            "'optimizer'.".format(method))
    if not 0 <= min_weight * instance.n_arms <= 1:
        raise InvalidParameterError(
            "min_weight must lie in [0, 1/K], got {!r}.".format(min_weight))
    _check_supported(task, instance)
    correct_answer(task, instance)

    if method != 'optimizer':
        result = _closed_form(task, instance, min_weight)
        if result is not None:
            return result
        if method == 'closed_form':
            raise UnsupportedError(
                "No closed form for {!r} on {!r} with min_weight={!r}.".format(
                    task, instance, min_weight))

    solver = MaximinSolver(
        pieces=lambda omega: alternative_pieces(task, instance, omega),
        n_arms=instance.n_arms,
        min_weight=min_weight,
        tol=tol,
        max_iter=max_iter,
    ).fit()
    return DifficultyResult(
        solver.value_,
        omega_star=solver.omega_,
        lambda_star=solver.lambda_,
        method='optimizer',
        details={
            'upper': solver.upper_,
            'gap': solver.gap_,
            'n_iter': solver.n_iter_,
        },
    )


def h_delta(instance):
    """Gap-based difficulty of unit-variance Gaussian BAI,

        H_Delta = 2 / min_k Delta_k^2 + sum_{k : Delta_k > 0} 2 / Delta_k^2

    with ``Delta_k = mu_best - mu_k``.

    Raises
    ------
    UnsupportedError
      If an arm is not a unit-variance Gaussian.

    """
    if not all(f == Gaussian(1.0) for f in instance.families):
        raise UnsupportedError(
            "H_Delta is defined for unit-variance Gaussian arms only.")
    best = correct_answer(BAI(), instance)
    gaps = instance.means[best] - np.delete(instance.means, best)
    return float(2.0 / np.min(gaps) ** 2 + np.sum(2.0 / gaps ** 2))


def _simplex_grid(n_arms, resolution):
    """All points of the simplex with coordinates in ``{i/resolution}``."""
    if n_arms == 2:
        i = np.arange(resolution + 1)
        return np.column_stack([i, resolution - i]) / resolution
    i, j = np.meshgrid(np.arange(resolution + 1), np.arange(resolution + 1),
                       indexing='ij')
    keep = i + j <= resolution
    i, j = i[keep], j[keep]
    return np.column_stack([i, j, resolution - i - j]) / resolution


def _mean_grid(task, instance, n_points):
    mu = instance.means
    if any(isinstance(f, Bernoulli) for f in instance.families):
        grid = np.linspace(1e-6, 1 - 1e-6, n_points)
    else:
        sigma = np.sqrt(instance.variances).max()
        grid = np.linspace(mu.min() - 8 * sigma, mu.max() + 8 * sigma, n_points)
    extra = list(mu)
    if hasattr(task, 'theta'):
        extra.append(task.theta)
    return np.unique(np.concatenate([grid, extra]))


def _grid_bai(instance, omegas, grid, chunk):
    mu = instance.means
    K = instance.n_arms
    best = int(np.argmax(mu))
    kls = np.array([f.kl(grid, m) for f, m in zip(instance.families, mu)])
    prefix = np.minimum.accumulate(kls, axis=1)

    values = np.full(len(omegas), np.inf)
    where = np.zeros((len(omegas), 2), dtype=int)
    for a in range(K):
        if a == best:
            continue
        # arm a is the largest of lambda, at grid value z; every other
        # arm takes its cheapest grid value below z
        Q = prefix.copy()
        Q[a] = kls[a]
        for start in range(0, len(omegas), chunk):
            block = omegas[start:start + chunk] @ Q
            cols = np.argmin(block, axis=1)
            vals = block[np.arange(len(block)), cols]
            rows = slice(start, start + len(block))
            better = vals < values[rows]
            values[rows] = np.where(better, vals, values[rows])
            where[rows] = np.where(
                better[:, None], np.column_stack([np.full(len(block), a), cols]),
                where[rows])

    i = int(np.argmax(values))
    a, c = where[i]
    lam = np.empty(K)
    for k in range(K):
        if k == a:
            lam[k] = grid[c]
        else:
            lam[k] = grid[int(np.argmin(kls[k, :c + 1]))]
    return values[i], omegas[i], lam


def _grid_sign_patterns(task, instance, omegas, grid):
    mu = instance.means
    theta = task.theta
    answer = task.answer(mu)
    kls = np.array([f.kl(grid, m) for f, m in zip(instance.families, mu)])
    above = grid >= theta
    below = grid <= theta
    cost = {
        '+': np.where(above, kls, np.inf).min(axis=1),
        '-': np.where(below, kls, np.inf).min(axis=1),
    }
    arg = {
        '+': grid[np.argmin(np.where(above, kls, np.inf), axis=1)],
        '-': grid[np.argmin(np.where(below, kls, np.inf), axis=1)],
    }

    patterns = []
    for signs in itertools.product('+-', repeat=instance.n_arms):
        representative = np.array([theta + 1 if s == '+' else theta - 1
                                   for s in signs])
        if task.answer(representative) != answer:
            patterns.append(signs)

    C = np.array([[cost[s][k] for k, s in enumerate(signs)]
                  for signs in patterns])
    values = omegas @ C.T
    cols = np.argmin(values, axis=1)
    vals = values[np.arange(len(values)), cols]
    i = int(np.argmax(vals))
    signs = patterns[cols[i]]
    lam = np.array([arg[s][k] for k, s in enumerate(signs)])
    return vals[i], omegas[i], lam


def grid_oracle(task, instance, resolution=100, chunk=1024):
    """Brute-force maximin value on grids, an independent check of the
    solver.

    The weights range over all points of the simplex with coordinates
    in ``{i/resolution}``. The alternatives range over the product of
    a common grid of ``4 * resolution + 1`` means (plus the arm means
    and the threshold), spanning 8 standard deviations around the means
    for Gaussian arms and ``[1e-6, 1 - 1e-6]`` for Bernoulli arms. The
    error of the returned value is ``O(1 / resolution)``.

    Raises
    ------
    UnsupportedError
      For more than three arms or half-space identification.

    DegenerateInstanceError
      If the instance has no unique answer.

    """
    if instance.n_arms > 3:
        raise UnsupportedError(
            "The grid oracle is limited to K <= 3 arms, got K={}.".format(
                instance.n_arms))
    if isinstance(task, HalfSpace):
        raise UnsupportedError("The grid oracle does not support half-spaces.")
    _check_supported(task, instance)
    correct_answer(task, instance)

    omegas = _simplex_grid(instance.n_arms, resolution)
    grid = _mean_grid(task, instance, 4 * resolution + 1)
    if isinstance(task, BAI):
        value, omega, lam = _grid_bai(instance, omegas, grid, chunk)
    else:
        value, omega, lam = _grid_sign_patterns(task, instance, omegas, grid)
    return DifficultyResult(
        value, omega, lam, 'grid_oracle', details={'resolution': resolution})


class BallResult:
    """Outcome of :func:`ball_restricted_difficulty`.

    Attributes
    ----------
    value : float
      ``((mu - eta)' u)^2`` for the normalized ``u``.

    witness : np.ndarray
      The point ``mu - ((mu - eta)' u) sign(u) sigma`` on the
      hyperplane.

    witness_in_ball : bool
      Whether the witness lies in the ball of radius ``r``.

    boundary_residual : float
      ``(witness - eta)' u``, zero up to rounding.

    """
    def __init__(self, value, witness, witness_in_ball, boundary_residual):
        self.value = value
        self.witness = witness
        self.witness_in_ball = witness_in_ball
        self.boundary_residual = boundary_residual


def ball_restricted_difficulty(instance, eta, u, r, offset=None):
    """Half-space difficulty restricted to a ball around a point of the
    hyperplane.

    For ``mu`` in the ``sigma^-2``-norm ball around ``eta`` of radius
    ``r / (sqrt(K) + 1)``, the value

        max_omega inf_{lambda in Alt(mu), |lambda - eta| < r} sum_k omega_k (lambda_k - mu_k)^2 / sigma_k^2

    equals the unrestricted one, ``((mu - eta)' u)^2`` with
    ``sum_k |u_k| sigma_k = 1``. The equality is witnessed by a point
    of the hyperplane inside the ball, which is checked.

    Parameters
    ----------
    instance : BanditInstance
      Gaussian instance with means ``mu``.

    eta : array-like of shape (K,)
      Point of the hyperplane, the center of the ball.

    u : array-like of shape (K,)
      Normal vector of the hyperplane; it is normalized internally.

    r : float
      Radius of the ball.

    offset : float or None (default=None)
      If given, it must equal ``eta' u``.

    Raises
    ------
    PreconditionError
      If ``mu`` is not in the shrunken ball or ``offset`` does not
      match ``eta``.

    DegenerateInstanceError
      If ``mu`` lies on the hyperplane.

    """
    if not instance.all_gaussian:
        raise UnsupportedError("The ball construction needs Gaussian arms.")
    eta = np.asarray(eta, dtype=float)
    sigma = np.sqrt(instance.variances)
    u = np.asarray(u, dtype=float)
    if offset is not None and not np.isclose(offset, eta @ u, rtol=0,
                                             atol=1e-12):
        raise PreconditionError(
            "The hyperplane must pass through eta: offset {!r} != eta'u "
            "{!r}.".format(offset, eta @ u))
    u = u / np.sum(np.abs(u) * sigma)
    mu = instance.means
    K = instance.n_arms

    def norm(v):
        return float(np.sqrt(np.sum(np.square(v / sigma))))

    radius = r / (np.sqrt(K) + 1)
    if not norm(mu - eta) < radius:
        raise PreconditionError(
            "mu must lie within {!r} of eta, it lies at {!r}.".format(
                radius, norm(mu - eta)))
    s = float((mu - eta) @ u)
    if s == 0:
        raise DegenerateInstanceError("mu lies on the hyperplane.")

    witness = mu - s * np.sign(u) * sigma
    return BallResult(
        value=s ** 2,
        witness=witness,
        witness_in_ball=norm(witness - eta) <= r,
        boundary_residual=float((witness - eta) @ u),
    )
