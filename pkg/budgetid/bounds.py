"""Lower bounds on the difficulty ratio and hard-instance constructions.

The difficulty ratio of an algorithm at ``mu`` compares its error
exponent with a reference difficulty ``H(mu)``. The bounds in here
show how large that ratio must be somewhere, for every algorithm:

* :func:`limsup_ratio_lb` for any finite set of alternatives;
* :func:`corner_lb` for alternatives that each perturb one coordinate;
* explicit constructions for Bernoulli and Gaussian BAI, positivity
  and half-space identification.

"""

import numpy as np
from mpmath import mp

from budgetid.difficulty import closed_form_bernoulli_bai
from budgetid.difficulty import h_delta
from budgetid.difficulty import oracle_difficulty_sp
from budgetid.exceptions import DegenerateInstanceError
from budgetid.exceptions import InvalidConstructionError
from budgetid.exceptions import InvalidInputError
from budgetid.exceptions import PreconditionError
from budgetid.families import Bernoulli
from budgetid.families import Gaussian
from budgetid.simplex import MaximinSolver
from budgetid.tasks import BAI
from budgetid.tasks import BanditInstance
from budgetid.tasks import Positivity
from budgetid.tasks import correct_answer
from budgetid.tasks import is_alternative


__all__ = [
    'CornerConstruction',
    'RatioResult',
    'bernoulli_limit_constants',
    'bernoulli_two_arm_bound',
    'corner_lb',
    'finite_T_check',
    'flat_boundary_witness',
    'gaussian_bai_bound',
    'gaussian_bai_construction',
    'gaussian_two_arm_corner_bound',
    'halfspace_boundary_sample',
    'halfspace_ratio_value',
    'limsup_ratio_lb',
    'positivity_bound',
    'positivity_construction',
    'positivity_ell_sweep',
]

# below this x the Bernoulli construction is evaluated with mpmath
EXTENDED_PRECISION_BELOW = 1e-8


class RatioResult:
    """A lower bound on the (asymptotic) difficulty ratio.

    Attributes
    ----------
    lower_bound : float

    omega : np.ndarray or None
      Equalizing or maximizing weights, when applicable.

    contributions : np.ndarray
      Per-term contributions; they sum to ``lower_bound`` for corner
      bounds.

    details : dict
      Additional reference values.

    """
    def __init__(self, lower_bound, omega=None, contributions=(),
                 details=None):
        self.lower_bound = float(lower_bound)
        self.omega = None if omega is None else np.asarray(omega, dtype=float)
        self.contributions = np.asarray(contributions, dtype=float)
        self.details = details or {}

    def __repr__(self):
        return 'RatioResult(lower_bound={!r})'.format(self.lower_bound)


class CornerConstruction:
    """A base instance together with one-coordinate perturbations.

    Parameters
    ----------
    instance : BanditInstance
      The base instance ``mu``.

    task : Task
      The identification task.

    perturbations : list of (int, array-like)
      Pairs ``(j, lambda_j)``: ``lambda_j`` differs from ``mu`` in
      coordinate ``j`` only and has a different correct answer.

    H : callable
      ``H(instance) -> float``, the reference difficulty of an
      alternative.

    """
    def __init__(self, instance, task, perturbations, H):
        self.instance = instance
        self.task = task
        self.perturbations = [(int(j), np.asarray(lam, dtype=float))
                              for j, lam in perturbations]
        self.H = H

    def check(self):
        """Raise an :class:`InvalidConstructionError` if an invariant
        is violated; return the difficulties of the alternatives.

        """
        if not self.perturbations:
            raise InvalidConstructionError("A construction needs alternatives.")
        coords = [j for j, _ in self.perturbations]
        if len(set(coords)) != len(coords):
            raise InvalidConstructionError(
                "Each coordinate may be perturbed only once, got {}.".format(
                    coords))

        mu = self.instance.means
        difficulties = []
        for j, lam in self.perturbations:
            changed = np.flatnonzero(lam != mu)
            if changed.tolist() != [j]:
                raise InvalidConstructionError(
                    "Alternative {} must differ from mu exactly in coordinate "
                    "{}, it differs in {}.".format(lam.tolist(), j,
                                                   changed.tolist()))
            try:
                alternative = self.instance.with_means(lam)
                if not is_alternative(self.task, self.instance, alternative):
                    raise InvalidConstructionError(
                        "{} has the same answer as mu.".format(lam.tolist()))
            except DegenerateInstanceError as exc:
                raise InvalidConstructionError(str(exc)) from exc
            H = float(self.H(alternative))
            if not 0 < H < np.inf:
                raise InvalidConstructionError(
                    "H must be positive and finite, got {!r}.".format(H))
            difficulties.append(H)
        return np.array(difficulties)

    def divergences(self):
        """``KL(mu_j, lambda_j)`` of every perturbed coordinate."""
        mu = self.instance.means
        fams = self.instance.families
        return np.array([float(fams[j].kl(mu[j], lam[j]))
                         for j, lam in self.perturbations])


def corner_lb(construction):
    """Corner lower bound

        sup_j R(lambda_j) >= sum_j 1 / (H(lambda_j) KL(mu_j, lambda_j,j)),

    attained by the weights ``omega_j`` proportional to the terms.

    Raises
    ------
    InvalidConstructionError
      If the construction violates an invariant.

    """
    difficulties = construction.check()
    terms = 1.0 / (difficulties * construction.divergences())
    omega = np.zeros(construction.instance.n_arms)
    for (j, _), term in zip(construction.perturbations, terms):
        omega[j] = term
    return RatioResult(
        terms.sum(), omega=omega / terms.sum(), contributions=terms,
        details={'H': difficulties})


def _one_coordinate_alternatives(mu, alternatives):
    """Perturbed coordinate of each alternative, or None unless every
    alternative perturbs exactly one coordinate, each a different one.

    """
    coords = []
    for lam in alternatives:
        changed = np.flatnonzero(lam != mu)
        if len(changed) != 1:
            return None
        coords.append(int(changed[0]))
    if len(set(coords)) != len(coords):
        return None
    return coords


def limsup_ratio_lb(instance, alternatives, H_values, task=None, tol=1e-10,
                    max_iter=10**6):
    """Asymptotic lower bound on the difficulty ratio from a finite set
    of alternatives ``D``:

        (max_omega min_{lambda in D} H(lambda) sum_k omega_k KL(mu_k, lambda_k))^-1

    Parameters
    ----------
    instance : BanditInstance

    alternatives : list of array-like
      The mean vectors of ``D``.

    H_values : array-like
      ``H(lambda)`` for every alternative, positive and finite.

    task : Task or None (default=None)
      If given, every element of ``D`` is checked to be an alternative.

    tol : float (default=1e-10)
      Relative duality gap of the solver.

    Raises
    ------
    InvalidInputError
      If ``D`` is empty or an ``H`` value is not positive and finite.

    """
    alternatives = [np.asarray(lam, dtype=float) for lam in alternatives]
    H_values = np.asarray(H_values, dtype=float)
    if not alternatives:
        raise InvalidInputError("The alternative set must not be empty.")
    if len(H_values) != len(alternatives):
        raise InvalidInputError(
            "Got {} H values for {} alternatives.".format(
                len(H_values), len(alternatives)))
    if np.any(~np.isfinite(H_values)) or np.any(H_values <= 0):
        raise InvalidInputError("H values must be positive and finite.")
    if task is not None:
        for lam in alternatives:
            if not is_alternative(task, instance, lam):
                raise InvalidInputError(
                    "{} is not an alternative of mu.".format(lam.tolist()))

    mu = instance.means
    A = np.array([H * instance.kl(mu, lam)
                  for H, lam in zip(H_values, alternatives)])

    coords = _one_coordinate_alternatives(mu, alternatives)
    if coords is not None:
        costs = A[np.arange(len(A)), coords]
        terms = 1.0 / costs
        omega = np.zeros(instance.n_arms)
        omega[coords] = terms / terms.sum()
        return RatioResult(terms.sum(), omega=omega, contributions=A @ omega,
                           details={'method': 'closed_form'})

    solver = MaximinSolver(
        pieces=lambda omega: (A @ omega, alternatives, A),
        n_arms=instance.n_arms, tol=tol, max_iter=max_iter).fit()
    return RatioResult(
        1.0 / solver.value_, omega=solver.omega_,
        contributions=A @ solver.omega_,
        details={'method': 'optimizer', 'gap': solver.gap_})


def finite_T_check(instance, lam, H_lam, T, pull_fractions, p_error, ratio,
                   task=None):
    """Finite-budget inequality between an instance and an alternative:

        ratio^-1 (1 - p_error) - log(2) / sqrt(T)
            <= H(lambda) sum_k E[N_k / T] KL(mu_k, lambda_k)

    Parameters
    ----------
    instance : BanditInstance
      The instance ``mu``.

    lam : array-like
      An alternative of ``mu``.

    H_lam : float
      Reference difficulty of ``lam``, at most ``sqrt(T)``.

    T : int
      The budget.

    pull_fractions : array-like
      Expected fraction of pulls of each arm under ``mu``.

    p_error : float
      Error probability at ``mu``.

    ratio : float
      Difficulty ratio of the algorithm at ``lam``, i.e. its rate at
      ``lam`` divided by ``H_lam``.

    task : Task or None (default=None)
      If given, ``lam`` is checked to be an alternative.

    Returns
    -------
    check : dict
      ``lhs``, ``rhs`` and ``satisfied``.

    Raises
    ------
    PreconditionError
      If ``H_lam > sqrt(T)`` or ``lam`` is not an alternative.

    """
    if H_lam > np.sqrt(T):
        raise PreconditionError(
            "The bound needs H(lambda) <= sqrt(T), got {!r} > {!r}.".format(
                H_lam, np.sqrt(T)))
    lam = np.asarray(lam, dtype=float)
    if task is not None and not is_alternative(task, instance, lam):
        raise PreconditionError("lambda must be an alternative of mu.")

    if p_error >= 1:
        first = 0.0
    elif ratio > 0:
        first = (1.0 - p_error) / ratio
    else:
        first = np.inf
    lhs = first - np.log(2) / np.sqrt(T)
    rhs = H_lam * float(np.dot(pull_fractions, instance.kl(instance.means, lam)))
    return {'lhs': lhs, 'rhs': rhs, 'satisfied': bool(lhs <= rhs)}


def _bernoulli_kl_mp(x, y):
    return x * mp.log(x / y) + (1 - x) * (mp.log1p(-x) - mp.log1p(-y))


def _bernoulli_inverse_rate_mp(mu_1, mu_2):
    num = mp.log1p(-mu_2) - mp.log1p(-mu_1)
    den = mp.log(mu_1 / (1 - mu_1)) - mp.log(mu_2 / (1 - mu_2))
    return _bernoulli_kl_mp(num / den, mu_1)


def _bernoulli_terms(x):
    if x >= EXTENDED_PRECISION_BELOW:
        fam = Bernoulli()
        mu_1 = x * (1 + x)
        inv_1 = closed_form_bernoulli_bai(
            BanditInstance([x / 2, x], fam)).inverse_rate
        inv_2 = closed_form_bernoulli_bai(
            BanditInstance([mu_1, 0.5], fam)).inverse_rate
        return (inv_1 / fam.kl(mu_1, x / 2), inv_2 / fam.kl(x, 0.5))

    with mp.workdps(60):
        x = mp.mpf(x)
        mu_1 = x * (1 + x)
        half = mp.mpf(1) / 2
        term_1 = _bernoulli_inverse_rate_mp(x / 2, x) / _bernoulli_kl_mp(
            mu_1, x / 2)
        term_2 = _bernoulli_inverse_rate_mp(mu_1, half) / _bernoulli_kl_mp(
            x, half)
        return float(term_1), float(term_2)


def bernoulli_two_arm_bound(x):
    """Corner bound for two-arm Bernoulli BAI with ``H = H_Csp``.

    The base instance is ``(x (1 + x), x)``; the alternatives are
    ``(x / 2, x)`` and ``(x (1 + x), 1 / 2)``. As ``x -> 0`` the bound
    grows towards :func:`bernoulli_limit_constants` ``['total']``,
    logarithmically slowly in ``1/x``. Values of ``x`` below ``1e-8``
    are evaluated with 60 significant digits.

    Raises
    ------
    InvalidInputError
      If ``x`` is not in ``[1e-300, 1/2)``.

    """
    if not 1e-300 <= x < 0.5:
        raise InvalidInputError(
            "x must lie in [1e-300, 1/2), got {!r}.".format(x))
    terms = np.array(_bernoulli_terms(x))
    return RatioResult(
        terms.sum(), omega=terms / terms.sum(), contributions=terms,
        details={'x': x})


def bernoulli_limit_constants():
    """Limits of the Bernoulli two-arm construction as ``x -> 0``.

    Returns
    -------
    constants : dict
      ``kl_limit = log 2`` and ``h_limit = 1 / log 2`` for the second
      alternative, whose term tends to 1; ``second_term`` (about 0.22)
      the limit of the term of the first alternative, and ``total``
      (about 1.22) the limit of the bound.

    """
    log2 = np.log(2)
    second = (1 - 1 / (2 * log2) - np.log(2 * log2) / (2 * log2)) / (log2 - 0.5)
    return {
        'kl_limit': log2,
        'h_limit': 1 / log2,
        'second_term': second,
        'total': 1 + second,
    }


def gaussian_bai_construction(K, delta=1.0):
    """Corner construction for unit-variance Gaussian BAI with
    ``H = H_Delta``: ``mu_k = -k delta`` for ``k >= 2`` and ``mu_1 = 0``;
    alternative ``j`` mirrors arm ``j`` to ``j delta``.

    """
    mu = np.array([0.0] + [-k * delta for k in range(2, K + 1)])
    instance = BanditInstance(mu, Gaussian(1.0))
    perturbations = []
    for j in range(1, K):
        lam = mu.copy()
        lam[j] = -mu[j]
        perturbations.append((j, lam))
    return CornerConstruction(instance, BAI(), perturbations, h_delta)


def gaussian_bai_bound(K, delta=1.0):
    """Corner bound of :func:`gaussian_bai_construction`, computed in
    ``O(K)``.

    The contribution of arm ``j`` is ``1 / (2 (4 + 2 j^2 S_j))`` with
    ``S_j = sum_{k=2..K, k != j} (j + k)^-2``; it does not depend on
    ``delta``.

    Returns
    -------
    result : RatioResult
      ``details`` holds the reference values ``floor`` =
      ``(log(K + 1) - log 2) / 8``, ``harmonic`` = ``sum_{j=2..K} 1/(8j)``,
      ``chain`` = ``3 log(K) / 40``, and their ``H_Csp`` counterparts
      ``csp_bound`` = bound / 2 and ``csp_chain`` = ``3 log(K) / 80``.

    Raises
    ------
    InvalidInputError
      If ``K < 2`` or ``delta <= 0``.

    """
    if K < 2 or not delta > 0:
        raise InvalidInputError(
            "Need K >= 2 and delta > 0, got K={!r}, delta={!r}.".format(
                K, delta))
    j = np.arange(2, K + 1, dtype=float)
    # prefix sums of 1/m^2 for m up to 2K
    inv_sq = np.concatenate([[0.0], 1.0 / np.arange(1, 2 * K + 1) ** 2])
    cumsum = np.cumsum(inv_sq)
    ji = j.astype(int)
    # sum over m = j+2 .. j+K of 1/m^2, minus the k = j term
    S = cumsum[ji + K] - cumsum[ji + 1] - 1.0 / (2 * j) ** 2

    gap_term = 1.0 / (j * delta) ** 2
    H = (4 * gap_term + 2 * S / delta ** 2)
    kl = 2 * (j * delta) ** 2
    terms = 1.0 / (H * kl)
    bound = terms.sum()
    omega = np.concatenate([[0.0], terms / bound])
    details = {
        'floor': (np.log(K + 1) - np.log(2)) / 8,
        'harmonic': np.sum(1.0 / j) / 8,
        'chain': 3 * np.log(K) / 40,
        'csp_bound': bound / 2,
        'csp_chain': 3 * np.log(K) / 80,
    }
    return RatioResult(bound, omega=omega, contributions=terms, details=details)


def _check_ordering(family, m, ell, theta):
    low, high = family.mean_domain
    if not low < ell < theta < m < high:
        raise InvalidInputError(
            "Need {} < ell < theta < m < {}, got ell={!r}, theta={!r}, "
            "m={!r}.".format(low, high, ell, theta, m))


def positivity_construction(K, m, ell, theta, family=None):
    """``K`` arms of mean ``m > theta``; alternative ``j`` moves arm
    ``j`` to ``ell < theta``. ``H`` is the static proportions oracle.

    """
    family = family or Bernoulli()
    _check_ordering(family, m, ell, theta)
    instance = BanditInstance(np.full(K, float(m)), family)
    task = Positivity(theta)
    perturbations = []
    for j in range(K):
        lam = instance.means.copy()
        lam[j] = ell
        perturbations.append((j, lam))
    return CornerConstruction(
        instance, task, perturbations,
        lambda alt: oracle_difficulty_sp(task, alt).H)


def positivity_bound(K, m, ell, theta, family=None):
    """Positivity corner bound ``K KL(theta, ell) / KL(m, ell)``.

    ``details['limit']`` is the value as ``ell`` approaches the lower
    end of the mean domain: ``K`` for Gaussian arms and
    ``K theta / m`` for Bernoulli arms.

    Raises
    ------
    InvalidInputError
      If ``ell < theta < m`` does not hold inside the mean domain.

    """
    family = family or Bernoulli()
    _check_ordering(family, m, ell, theta)
    ratio = float(family.kl(theta, ell) / family.kl(m, ell))
    limit = K * theta / m if isinstance(family, Bernoulli) else float(K)
    return RatioResult(
        K * ratio, omega=np.full(K, 1.0 / K), contributions=np.full(K, ratio),
        details={'ell': ell, 'limit': limit})


def positivity_ell_sweep(theta, family=None, n_points=6):
    """Values of ``ell`` moving towards the lower end of the mean
    domain: ``theta 10^-i`` for Bernoulli arms, ``theta - 10^i`` for
    Gaussian arms, ``i = 1..n_points``.

    """
    family = family or Bernoulli()
    i = np.arange(1, n_points + 1)
    if isinstance(family, Bernoulli):
        return theta * 10.0 ** -i
    return theta - 10.0 ** (i - 1)


def gaussian_two_arm_corner_bound(delta=1.0, spread=1e6):
    """Best corner bound for two-arm unit-variance Gaussian BAI with
    ``H = H_Csp``.

    Each alternative mirrors one arm ``spread * delta`` beyond the
    other; the two terms tend to 1/4 each as ``spread`` grows, so the
    bound stays below 1/2.

    """
    mu = np.array([delta / 2, -delta / 2])
    instance = BanditInstance(mu, Gaussian(1.0))
    lam_1 = np.array([mu[1] - spread * delta, mu[1]])
    lam_2 = np.array([mu[0], mu[0] + spread * delta])
    construction = CornerConstruction(
        instance, BAI(), [(0, lam_1), (1, lam_2)],
        lambda alt: oracle_difficulty_sp(BAI(), alt).H)
    return corner_lb(construction)


def halfspace_ratio_value(instance, task):
    """Value of the asymptotic maximin ratio of Gaussian half-space
    identification over the full alternative set.

    For depth ``a`` beyond the hyperplane the inner infimum equals
    ``(a + |s|)^2 / (a^2 N(omega))`` with
    ``N(omega) = sum_k u_k^2 sigma_k^2 / omega_k`` and ``s`` the signed
    margin of ``mu``; it decreases to ``1 / N(omega)``, whose maximum
    over the simplex is 1 for the normalized ``u``.

    """
    correct_answer(task, instance)
    task = task.normalized(instance)
    weights = np.abs(task.u_) * np.sqrt(instance.variances)
    omega = weights / weights.sum()
    with np.errstate(divide='ignore', invalid='ignore'):
        N = np.sum(np.where(omega > 0, task.u_ ** 2 * instance.variances / omega,
                            0.0))
    return float(1.0 / N)


def halfspace_boundary_sample(instance, task, n_points=65, low=1e-3, high=1e3):
    """Alternatives beyond the hyperplane of a Gaussian half-space task
    and their difficulties.

    The points move ``mu`` along ``-sign(s) sign(u) sigma`` by
    ``t = |s| (1 + g)`` for ``g`` geometrically spaced in
    ``[low, high]``, where ``s`` is the signed margin of ``mu``.
    Doubling ``n_points - 1`` refines the sample without dropping
    points.

    Returns
    -------
    alternatives : list of np.ndarray

    H_values : np.ndarray
      ``2 / (lambda' u - c)^2`` for the normalized hyperplane.

    Raises
    ------
    DegenerateInstanceError
      If ``mu`` lies on the hyperplane.

    """
    side = 1.0 if correct_answer(task, instance) == '+' else -1.0
    task = task.normalized(instance)
    mu = instance.means
    s = task.signed_margin(mu)
    direction = -side * np.sign(task.u_) * np.sqrt(instance.variances)
    steps = abs(s) * (1 + np.geomspace(low, high, n_points))
    alternatives = [mu + t * direction for t in steps]
    H_values = np.array([2.0 / task.signed_margin(lam) ** 2
                         for lam in alternatives])
    return alternatives, H_values


def flat_boundary_witness(instance, task, eta, r, eps, delta, omega):
    """Check the explicit alternative behind the ``(1 + eps)(1 + delta)^2``
    bound near a flat boundary.

    With ``r' = r / (sqrt(K) + 1)``, the smoothed weights
    ``omega_eps = (omega + eps) / (1 + eps)`` and the depth
    ``x = r' eps / (2 (1 + delta)(1 + eps))``, the alternative

        lambda_k = mu_k - (s + x) / N(omega_eps) * u_k sigma_k^2 / omega_eps_k

    lies ``x`` beyond the hyperplane and inside the ball of radius
    ``r'`` around ``eta``, and its ratio is at most
    ``(1 + eps)(1 + delta)^2``.

    Parameters
    ----------
    instance : BanditInstance
      Gaussian instance ``mu`` with ``0 < (mu - eta)' u`` and ``mu``
      within ``r' delta eps / (2 (1 + delta)(1 + eps))`` of ``eta``.

    task : HalfSpace
      The hyperplane; ``eta`` must lie on it.

    eta : array-like

    r, eps, delta : float
      Radius and slack parameters.

    omega : array-like
      Any point of the simplex.

    Returns
    -------
    check : dict
      ``witness``, ``depth``, ``in_ball``, ``ratio``, ``bound`` and
      ``satisfied``.

    Raises
    ------
    PreconditionError
      If ``mu`` is not close enough to ``eta`` or on the wrong side.

    DegenerateInstanceError
      If ``mu`` lies on the hyperplane.

    """
    correct_answer(task, instance)
    task = task.normalized(instance)
    eta = np.asarray(eta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    mu = instance.means
    var = instance.variances
    K = instance.n_arms
    u = task.u_

    def norm(v):
        return float(np.sqrt(np.sum(np.square(v) / var)))

    r_1 = r / (np.sqrt(K) + 1)
    x = r_1 * eps / (2 * (1 + delta) * (1 + eps))
    r_2 = delta * x
    s = float((mu - eta) @ u)
    if not abs(task.signed_margin(eta)) <= 1e-12:
        raise PreconditionError("eta must lie on the hyperplane.")
    if not (s > 0 and norm(mu - eta) < r_2):
        raise PreconditionError(
            "mu must lie on the positive side within {!r} of eta.".format(r_2))

    omega_eps = (omega + eps) / (1 + eps)
    ratio_k = u * var / omega_eps
    N = float(np.sum(u * ratio_k))
    witness = mu - (s + x) / N * ratio_k
    depth = float((witness - eta) @ u)
    spent = float(np.sum(omega * np.square(mu - witness) / var))
    ratio = spent / depth ** 2
    bound = (1 + eps) * (1 + delta) ** 2
    return {
        'witness': witness,
        'depth': depth,
        'depth_error': abs(depth + x),
        'in_ball': norm(witness - eta) <= r_1 * (1 + 1e-12),
        'ratio': ratio,
        'bound': bound,
        'satisfied': bool(ratio <= bound * (1 + 1e-12)),
    }
