"""Maximum-likelihood estimation of sum-of-exponentials Hawkes models.

The estimation is split into two nested problems:

* **inner** -- with the shared decays held fixed, the log-likelihood is
  jointly concave in (mu, alpha) (log of an affine function minus an affine
  function), so a projected quasi-Newton method (L-BFGS-B) with analytic
  gradients finds the global optimum.  The nonnegativity projection can
  land alpha entries exactly on 0, reproducing structural zeros.
* **outer** -- Nelder-Mead simplex search over the log-decays, each vertex
  scored by the maximized (profile) inner log-likelihood.

A homogeneous-Poisson baseline fit is provided for model comparison.
Fitting consumes no randomness: fixed data and config give identical
results.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .core import HawkesModel, _sumexp_event_states, kernel_norms
from .errors import DegenerateComponentWarning, FittingError, InvalidInputError
from .events import EventSequence
from .kernels import SumExpKernel

MU_FLOOR = 1e-10


@dataclass(frozen=True)
class FitConfig:
    """Estimation settings.

    ``decay_init`` seeds the outer decay search (canonically sorted
    ascending); ``constraint_mode`` names the constraint handling for the
    inner problem -- only ``"projection"`` (box bounds: mu >= 1e-10,
    alpha >= 0) is implemented.
    """

    num_decays: int = 3
    decay_init: tuple = (0.5, 5.0, 50.0)
    inner_max_iter: int = 500
    outer_max_iter: int = 150
    inner_tol: float = 1e-6
    outer_tol: float = 1e-2
    constraint_mode: str = "projection"

    def __post_init__(self):
        init = np.sort(np.asarray(self.decay_init, dtype=float))
        if init.ndim != 1 or init.size != self.num_decays:
            raise InvalidInputError(
                f"decay_init must hold num_decays={self.num_decays} values"
            )
        if np.any(init <= 0) or not np.all(np.isfinite(init)):
            raise InvalidInputError("decay_init must be strictly positive and finite")
        if np.any(np.diff(init) <= 0):
            raise InvalidInputError("decay_init values must be distinct")
        if self.inner_max_iter < 0 or self.outer_max_iter < 0:
            raise InvalidInputError("iteration budgets must be >= 0")
        if self.inner_tol <= 0 or self.outer_tol <= 0:
            raise InvalidInputError("tolerances must be > 0")
        if self.constraint_mode != "projection":
            raise InvalidInputError(
                f"unsupported constraint_mode {self.constraint_mode!r}; "
                "only 'projection' is implemented"
            )
        object.__setattr__(self, "decay_init", tuple(init))


@dataclass
class FitResult:
    """Fitted model plus optimizer diagnostics.

    ``optimizer_trace`` holds (iteration, objective) pairs: inner
    log-likelihood iterates for :func:`fit_given_decays`, best profile
    log-likelihood per simplex iteration for :func:`fit_full`.
    """

    model: HawkesModel
    log_lik: float
    kernel_norm_matrix: np.ndarray
    converged: bool
    inner_iterations: int
    outer_iterations: int
    optimizer_trace: list
    messages: tuple = ()


@dataclass(frozen=True)
class PoissonFit:
    """Homogeneous-Poisson MLE: rates N_i(T)/T per component."""

    rates: np.ndarray
    log_lik: float
    empty_components: tuple

    def to_hawkes_model(self, rate_floor: float = MU_FLOOR) -> HawkesModel:
        """Zero-kernel HawkesModel view, usable for residual analysis.

        Empty components get ``rate_floor`` since background rates must be
        strictly positive.
        """
        m = self.rates.size
        mu = np.maximum(self.rates, rate_floor)
        kernel = SumExpKernel(np.zeros((1, m, m)), np.array([1.0]))
        return HawkesModel(mu, kernel)


def fit_poisson(seq: EventSequence) -> PoissonFit:
    """Closed-form Poisson MLE with per-component log-likelihood.

    Components without events get rate 0 and are flagged in
    ``empty_components`` (their 0*ln(0) likelihood term is 0).
    """
    counts = seq.counts().astype(float)
    rates = counts / seq.horizon
    occupied = counts > 0
    log_lik = float(
        np.sum(counts[occupied] * np.log(rates[occupied])) - rates.sum() * seq.horizon
    )
    empty = tuple(int(i + 1) for i in np.nonzero(~occupied)[0])
    return PoissonFit(rates, log_lik, empty)


# ---------------------------------------------------------------------------
# Inner problem: concave likelihood in (mu, alpha) at fixed decays
# ---------------------------------------------------------------------------

def _design(seq: EventSequence, decays: np.ndarray):
    """Sufficient statistics of the inner problem.

    Returns per-component design matrices X[i] of shape (n_i, U*m) with the
    recursion states at component-i events, and the flattened compensator
    weights Mvec[u*m + j] = sum over component-j events of
    (1 - exp(-b_u (T - t_k))) / b_u.
    """
    S, _, _ = _sumexp_event_states(seq, decays)
    U, m = decays.size, seq.dim
    lags = seq.horizon - seq.times
    M = np.zeros((U, m))
    for u, b in enumerate(decays):
        w = (1.0 - np.exp(-b * lags)) / b
        M[u] = np.bincount(seq.marks - 1, weights=w, minlength=m)
    X = []
    for i in range(m):
        rows = S[seq.marks == i + 1]
        X.append(np.ascontiguousarray(rows.reshape(rows.shape[0], U * m)))
    return X, M.reshape(U * m)


def _neg_loglik_and_grad(theta, X, M, horizon, m, U):
    """Negative log-likelihood and gradient in packed coordinates.

    ``X`` holds one design matrix per component and ``M`` the matching
    compensator weight vector; both may be column-rescaled as long as they
    are rescaled together (the optimum is invariant).
    """
    mu = theta[:m]
    block_len = U * m
    ll = 0.0
    grad = np.zeros_like(theta)
    for i in range(m):
        lo = m + i * block_len
        block = theta[lo : lo + block_len]
        lam = mu[i] + X[i] @ block
        ll += np.log(lam).sum() - mu[i] * horizon - block @ M[i]
        inv = 1.0 / lam
        grad[i] = inv.sum() - horizon
        grad[lo : lo + block_len] = X[i].T @ inv - M[i]
    return -ll, -grad


def loglik_and_grad(seq: EventSequence, decays, mu, alpha):
    """Log-likelihood and its analytic gradient at fixed decays.

    ``alpha`` has shape (U, m, m).  Returns ``(l, dl_dmu, dl_dalpha)``; the
    gradient reuses the same recursion states as the recursive intensity
    evaluator, so it is exact up to accumulation error.
    """
    decays = np.asarray(decays, dtype=float)
    mu = np.asarray(mu, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    m, U = seq.dim, decays.size
    if mu.shape != (m,) or alpha.shape != (U, m, m):
        raise InvalidInputError("parameter shapes do not match the sequence/decays")
    X, Mvec = _design(seq, decays)
    theta = _pack(mu, alpha, m, U)
    neg_l, neg_g = _neg_loglik_and_grad(theta, X, [Mvec] * m, seq.horizon, m, U)
    dmu, dalpha = _unpack_grad(-neg_g, m, U)
    return -neg_l, dmu, dalpha


def _pack(mu, alpha, m, U):
    theta = np.empty(m + m * U * m)
    theta[:m] = mu
    for i in range(m):
        theta[m + i * U * m : m + (i + 1) * U * m] = alpha[:, i, :].ravel()
    return theta


def _unpack(theta, m, U):
    mu = theta[:m].copy()
    alpha = np.empty((U, m, m))
    for i in range(m):
        alpha[:, i, :] = theta[m + i * U * m : m + (i + 1) * U * m].reshape(U, m)
    return mu, alpha


def _unpack_grad(grad, m, U):
    return _unpack(grad, m, U)


def fit_given_decays(seq: EventSequence, decays, config: FitConfig | None = None) -> FitResult:
    """Maximize the log-likelihood over (mu, alpha) with decays held fixed.

    Components with zero events are pinned (mu at the 1e-10 floor, their
    alpha row at 0) with a :class:`DegenerateComponentWarning`; columns
    describing their influence stay at 0 since the data carry no signal
    about them.  Non-convergence within the iteration budget returns the
    best iterate with ``converged=False`` rather than raising.
    """
    decays = np.sort(np.asarray(decays, dtype=float))
    if decays.ndim != 1 or decays.size == 0:
        raise InvalidInputError("decays must be a nonempty vector")
    if np.any(decays <= 0) or not np.all(np.isfinite(decays)):
        raise InvalidInputError("decays must be strictly positive and finite")
    if np.any(np.diff(decays) <= 0):
        raise InvalidInputError("decays must be distinct")
    if config is None:
        config = FitConfig(num_decays=decays.size, decay_init=tuple(decays))
    if len(seq) == 0:
        raise FittingError("cannot fit an empty event sequence")

    m, U = seq.dim, decays.size
    horizon = seq.horizon
    counts = seq.counts()
    degenerate = np.nonzero(counts == 0)[0]
    messages = []
    if degenerate.size:
        labels = [int(i + 1) for i in degenerate]
        msg = f"components {labels} have no events; mu and alpha rows pinned to floors"
        messages.append(msg)
        warnings.warn(msg, DegenerateComponentWarning, stacklevel=2)

    X, Mvec = _design(seq, decays)

    # Column-normalize each component's design so the quasi-Newton solve is
    # well conditioned across decay scales; the solver works on
    # alpha * scale and the solution is mapped back afterwards.
    scales = [
        np.maximum(Xi.mean(axis=0), 1e-12) if Xi.shape[0] else np.ones(U * m)
        for Xi in X
    ]
    Xs = [Xi / s for Xi, s in zip(X, scales)]
    Ms = [Mvec / s for s in scales]

    mu0 = np.maximum(0.5 * counts / horizon, MU_FLOOR)
    alpha0 = np.zeros((U, m, m))
    theta0 = _pack(mu0, alpha0, m, U)

    bounds = [(MU_FLOOR, None)] * m + [(0.0, None)] * (m * U * m)
    for i in degenerate:
        bounds[i] = (MU_FLOOR, MU_FLOOR)
        for pos in range(m + i * U * m, m + (i + 1) * U * m):
            bounds[pos] = (0.0, 0.0)

    fun = lambda th: _neg_loglik_and_grad(th, Xs, Ms, horizon, m, U)
    last = {}

    def tracked(th):
        f, g = fun(th)
        last["x"] = th.copy()
        last["f"] = f
        return f, g

    trace = []
    iteration = [0]

    def callback(xk):
        iteration[0] += 1
        f = last["f"] if np.array_equal(last.get("x"), xk) else fun(xk)[0]
        trace.append((iteration[0], -f))

    # Stationarity target per the contract: projected-gradient infinity norm
    # <= inner_tol * (1 + |l|) in the ORIGINAL coordinates; |l| is estimated
    # at the start and the threshold mapped into scaled coordinates through
    # the largest column scale.  ftol=0 turns off the relative-reduction
    # stop so flat ridges are not mistaken for convergence.
    f0, _ = fun(theta0)
    max_scale = max(1.0, max(float(s.max()) for s in scales))
    res = optimize.minimize(
        tracked,
        theta0,
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        callback=callback,
        options={
            "maxiter": config.inner_max_iter,
            "ftol": 0.0,
            "gtol": config.inner_tol * (1.0 + abs(f0)) / max_scale,
            "maxls": 50,
        },
    )

    mu_hat, scaled_alpha = _unpack(res.x, m, U)
    alpha_hat = np.empty_like(scaled_alpha)
    for i in range(m):
        alpha_hat[:, i, :] = (scaled_alpha[:, i, :].reshape(-1) / scales[i]).reshape(U, m)

    # Convergence verdict on the unscaled problem.
    theta_hat = _pack(mu_hat, alpha_hat, m, U)
    f_opt, g_opt = _neg_loglik_and_grad(theta_hat, X, [Mvec] * m, horizon, m, U)
    lower = np.array([b[0] for b in bounds])
    at_lower = theta_hat <= lower + 1e-15
    projected = np.where(at_lower & (g_opt > 0), 0.0, g_opt)
    converged = bool(np.max(np.abs(projected)) <= config.inner_tol * (1.0 + abs(f_opt)))
    model = HawkesModel(mu_hat, SumExpKernel(alpha_hat, decays))
    return FitResult(
        model=model,
        log_lik=float(-f_opt),
        kernel_norm_matrix=kernel_norms(model),
        converged=converged,
        inner_iterations=int(res.nit),
        outer_iterations=0,
        optimizer_trace=trace,
        messages=tuple(messages),
    )


# ---------------------------------------------------------------------------
# Outer problem: Nelder-Mead over log-decays, profile likelihood objective
# ---------------------------------------------------------------------------

def fit_full(seq: EventSequence, config: FitConfig | None = None) -> FitResult:
    """Full fit: simplex search over shared decays on the profile likelihood.

    Each simplex vertex triggers an inner :func:`fit_given_decays`; decays
    stay positive through the log parameterization.  The search stops when
    the simplex diameter (in log-decay space) drops below ``outer_tol`` or
    after ``outer_max_iter`` iterations; ``outer_max_iter=0`` returns the
    inner fit at ``decay_init`` with ``converged=False``.
    """
    if config is None:
        config = FitConfig()
    decay0 = np.asarray(config.decay_init, dtype=float)

    if config.outer_max_iter == 0:
        inner = fit_given_decays(seq, decay0, config)
        inner.converged = False
        inner.optimizer_trace = [(0, inner.log_lik)]
        return inner

    cache = {}
    best = {"l": -np.inf, "result": None}
    failures = []

    def profile(x):
        decays = np.sort(np.exp(x))
        key = decays.tobytes()
        if key in cache:
            return cache[key]
        try:
            inner = fit_given_decays(seq, decays, config)
            value = -inner.log_lik
            if inner.log_lik > best["l"]:
                best["l"] = inner.log_lik
                best["result"] = inner
        except Exception as exc:  # vertex scored as -inf profile likelihood
            failures.append(f"decays {decays.round(6).tolist()}: {exc}")
            value = np.inf
        cache[key] = value
        return value

    x0 = np.log(decay0)
    simplex = np.vstack([x0] + [
        np.log(decay0 * (1.0 + 0.05 * (np.arange(decay0.size) == j)))
        for j in range(decay0.size)
    ])

    trace = []
    iteration = [0]

    def callback(xk):
        iteration[0] += 1
        trace.append((iteration[0], best["l"]))

    res = optimize.minimize(
        profile,
        x0,
        method="Nelder-Mead",
        callback=callback,
        options={
            "initial_simplex": simplex,
            "xatol": config.outer_tol,
            "fatol": np.inf,
            "maxiter": config.outer_max_iter,
            "maxfev": 100 * config.outer_max_iter + 100,
            "adaptive": False,
        },
    )

    if best["result"] is None:
        raise FittingError(
            "every simplex evaluation failed; first failure: "
            + (failures[0] if failures else "unknown")
        )

    final = best["result"]
    return FitResult(
        model=final.model,
        log_lik=final.log_lik,
        kernel_norm_matrix=final.kernel_norm_matrix,
        converged=bool(res.success) and final.converged,
        inner_iterations=final.inner_iterations,
        outer_iterations=int(res.nit),
        optimizer_trace=trace,
        messages=final.messages + tuple(failures),
    )


# ---------------------------------------------------------------------------
# JSON-friendly serialization (field names are part of the file contract)
# ---------------------------------------------------------------------------

def model_to_dict(model: HawkesModel) -> dict:
    """Serialize a sum-of-exponentials model as plain lists."""
    kernel = model.kernel
    if not isinstance(kernel, SumExpKernel):
        raise InvalidInputError("only sum-of-exponentials models serialize to JSON")
    return {
        "mu": model.mu.tolist(),
        "alpha": kernel.alpha.tolist(),
        "beta": kernel.decays.tolist(),
    }


def model_from_dict(data: dict) -> HawkesModel:
    """Inverse of :func:`model_to_dict`."""
    try:
        mu = np.asarray(data["mu"], dtype=float)
        alpha = np.asarray(data["alpha"], dtype=float)
        beta = np.asarray(data["beta"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"model document missing or malformed field: {exc}")
    return HawkesModel(mu, SumExpKernel(alpha, beta))


def fit_result_to_dict(result: FitResult) -> dict:
    doc = model_to_dict(result.model)
    doc.update(
        log_lik=result.log_lik,
        kernel_norms=result.kernel_norm_matrix.tolist(),
        converged=result.converged,
        iterations={"inner": result.inner_iterations, "outer": result.outer_iterations},
    )
    if result.messages:
        doc["messages"] = list(result.messages)
    return doc
