"""Risk of min-norm regression that sees only a subset of the features.

Data model: ``x ~ N(0, I_d)``, ``y = x^T w + noise_scale * eps`` with
``eps ~ N(0, 1)``.  The learner observes ``p`` of the ``d`` coordinates
(a SubsetSelection), fits minimum-norm least squares of ``y`` on the
sub-design, predicts with zeros on the discarded coordinates, and is
scored by squared prediction error on fresh draws.

For a fixed subset the exact expected risk splits into three regimes.
Writing ``a = ||w_kept||^2`` for the captured signal energy, ``b =
||w_discarded||^2`` for the missed energy, and ``s2`` for the noise
variance:

* ``p <= n - 2``      risk = (b + s2) * (1 + p / (n - p - 1))
* ``n-1 <= p <= n+1`` risk = +inf (the inverse-Wishart factor has no mean)
* ``p >= n + 2``      risk = a * (1 - n/p) + (b + s2) * (1 + n/(p - n - 1))

The expression is affine in ``(a, b)``, so averaging over a uniformly
random size-``p`` subset just substitutes ``a -> (p/d) ||w||^2`` and
``b -> (1 - p/d) ||w||^2``.  That averaged curve is the double-descent
curve: risk climbs toward the interpolation threshold ``p = n``, blows
up in the band around it, and descends again as ``p`` grows past ``n``.

The +inf band is represented by ``math.inf`` and serialized downstream
as the literal string ``inf``; it is a regime marker, not an overflow.
A Monte Carlo estimator (fresh data and fresh test points per trial,
each trial on its own derived substream) serves as an independent check
on both closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .linalg import LinearPredictor, min_norm_solve
from .seeding import derive_seed, substream


@dataclass(frozen=True)
class GaussianLinearProblem:
    """Ground truth for the sparsified-regression experiments."""

    w_true: np.ndarray
    noise_scale: float
    n: int

    def __post_init__(self):
        w = np.asarray(self.w_true, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidInput(f"w_true must be a nonempty vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InvalidInput("w_true contains NaN or Inf entries")
        object.__setattr__(self, "w_true", w)
        if not math.isfinite(self.noise_scale) or self.noise_scale < 0:
            raise InvalidInput(f"noise_scale must be >= 0, got {self.noise_scale}")
        if self.n < 1 or int(self.n) != self.n:
            raise InvalidInput(f"n must be a positive integer, got {self.n}")

    @property
    def d(self) -> int:
        return self.w_true.size

    @property
    def noise_var(self) -> float:
        return self.noise_scale**2

    @property
    def signal_norm_sq(self) -> float:
        return float(np.sum(self.w_true**2))


def sample_dataset(problem: GaussianLinearProblem, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(X, y)`` with i.i.d. standard normal rows and additive noise."""
    rng = substream(seed, "gaussian-linear-dataset")
    x = rng.standard_normal((problem.n, problem.d))
    y = x @ problem.w_true + problem.noise_scale * rng.standard_normal(problem.n)
    return x, y


@dataclass(frozen=True)
class SubsetSelection:
    """A size-``p`` set of kept feature indices out of ``d``."""

    kept: np.ndarray
    d: int

    def __post_init__(self):
        kept = np.sort(np.asarray(self.kept, dtype=int))
        if kept.ndim != 1:
            raise InvalidInput("kept must be a 1-d index array")
        if kept.size and (kept[0] < 0 or kept[-1] >= self.d):
            raise InvalidInput(f"kept indices out of range for d = {self.d}")
        if len(np.unique(kept)) != kept.size:
            raise InvalidInput("kept indices must be distinct")
        object.__setattr__(self, "kept", kept)

    @property
    def p(self) -> int:
        return int(self.kept.size)

    @property
    def discarded(self) -> np.ndarray:
        mask = np.ones(self.d, dtype=bool)
        mask[self.kept] = False
        return np.flatnonzero(mask)

    @classmethod
    def random(cls, d: int, p: int, rng: np.random.Generator) -> "SubsetSelection":
        """Uniformly random subset: shuffle all d indices, take the first p."""
        if not 0 <= p <= d:
            raise InvalidInput(f"p must lie in [0, {d}], got {p}")
        return cls(kept=rng.permutation(d)[:p], d=d)


def fit_subset_min_norm(x, y, sel: SubsetSelection) -> LinearPredictor:
    """Min-norm fit on the kept columns, zeros on the discarded ones.

    The returned coefficients live in the full d-dimensional space, so
    the predictor can be applied to complete feature vectors directly.
    An empty subset yields the zero predictor.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != sel.d:
        raise InvalidInput(f"x must have shape (n, {sel.d}), got {x.shape}")
    coef = np.zeros(sel.d)
    if sel.p > 0:
        coef[sel.kept] = min_norm_solve(x[:, sel.kept], y)
    return LinearPredictor(coef=coef, active=sel.kept)


def _three_case_risk(a: float, b: float, p: int, n: int, s2: float) -> float:
    if p <= n - 2:
        return (b + s2) * (1.0 + p / (n - p - 1.0))
    if p >= n + 2:
        return a * (1.0 - n / p) + (b + s2) * (1.0 + n / (p - n - 1.0))
    return math.inf


def analytic_risk_fixed_subset(w_true, sel: SubsetSelection, noise_scale: float, n: int) -> float:
    """Exact risk when the learner always regresses on ``sel.kept``.

    ``noise_scale`` is the standard deviation of the additive noise (its
    square enters the formula).  Returns ``math.inf`` inside the band
    ``n - 1 <= p <= n + 1``.
    """
    w = np.asarray(w_true, dtype=float)
    if w.ndim != 1 or w.size != sel.d:
        raise InvalidInput(f"w_true must be a vector of length {sel.d}")
    if noise_scale < 0:
        raise InvalidInput(f"noise_scale must be >= 0, got {noise_scale}")
    if n < 1 or int(n) != n:
        raise InvalidInput(f"n must be a positive integer, got {n}")
    a = float(np.sum(w[sel.kept] ** 2))
    b = float(np.sum(w**2)) - a
    return _three_case_risk(a, b, sel.p, n, noise_scale**2)


def analytic_risk_random_subset(
    w_norm_sq: float, noise_var: float, d: int, n: int, p: int
) -> float:
    """Risk averaged over a uniformly random size-``p`` subset of features.

    ``noise_var`` is the noise *variance*.  Only the total signal energy
    ``w_norm_sq = ||w||^2`` matters: each coordinate lands in the subset
    with probability ``p/d``, and the fixed-subset formula is affine in
    the split of the energy.
    """
    if w_norm_sq < 0 or noise_var < 0:
        raise InvalidInput("w_norm_sq and noise_var must be >= 0")
    if d < 1 or n < 1:
        raise InvalidInput("d and n must be positive integers")
    if not 0 <= p <= d or int(p) != p:
        raise InvalidInput(f"p must be an integer in [0, {d}], got {p}")
    frac = p / d
    return _three_case_risk(frac * w_norm_sq, (1.0 - frac) * w_norm_sq, p, n, noise_var)


@dataclass(frozen=True)
class MonteCarloRisk:
    """Summary of a Monte Carlo risk estimate over independent trials.

    Near the interpolation threshold the per-trial risks are extremely
    heavy tailed, so the median is reported next to the mean.
    """

    mean: float
    median: float
    stderr: float
    trials: int


def conditional_risk(problem: GaussianLinearProblem, predictor: LinearPredictor) -> float:
    """Exact risk of one fitted predictor under the Gaussian model.

    For isotropic features the expected squared error decomposes as
    ``||w - coef||^2 + noise_var`` with no sampling involved; useful as a
    zero-test-noise cross-check on the test-draw Monte Carlo estimate.
    """
    coef = np.asarray(predictor.coef, dtype=float)
    if coef.shape != problem.w_true.shape:
        raise InvalidInput("predictor dimension does not match the problem")
    return float(np.sum((problem.w_true - coef) ** 2)) + problem.noise_var


def monte_carlo_risk(
    problem: GaussianLinearProblem,
    p: int,
    trials: int,
    test_points: int,
    seed: int,
    subset: SubsetSelection | None = None,
) -> MonteCarloRisk:
    """Estimate the risk by training on fresh data and scoring fresh draws.

    Each trial uses its own substream derived from ``seed`` (training
    set, noise, test set, and, unless ``subset`` pins it, the feature
    subset), so the estimate is independent of trial ordering.
    """
    d, n = problem.d, problem.n
    if not 0 <= p <= d or int(p) != p:
        raise InvalidInput(f"p must be an integer in [0, {d}], got {p}")
    if trials < 1:
        raise InvalidInput(f"trials must be >= 1, got {trials}")
    if test_points < 1:
        raise InvalidInput(f"test_points must be >= 1, got {test_points}")
    if subset is not None and (subset.d != d or subset.p != p):
        raise InvalidInput("pinned subset does not match the requested (d, p)")

    w = problem.w_true
    sigma = problem.noise_scale
    risks = np.empty(trials)
    for i in range(trials):
        rng = substream(seed, "sparse-mc-trial", i)
        sel = subset if subset is not None else SubsetSelection.random(d, p, rng)
        x = rng.standard_normal((n, d))
        y = x @ w + sigma * rng.standard_normal(n)
        predictor = fit_subset_min_norm(x, y, sel)
        xt = rng.standard_normal((test_points, d))
        yt = xt @ w + sigma * rng.standard_normal(test_points)
        risks[i] = float(np.mean((yt - xt @ predictor.coef) ** 2))

    stderr = float(np.std(risks, ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf
    return MonteCarloRisk(
        mean=float(np.mean(risks)),
        median=float(np.median(risks)),
        stderr=stderr,
        trials=trials,
    )


@dataclass(frozen=True)
class RiskCurveRow:
    """One point of the risk-vs-p curve: closed form next to Monte Carlo."""

    p: int
    analytic_risk: float
    mc_risk: float
    mc_stderr: float
    trials: int


def risk_curve(
    problem: GaussianLinearProblem,
    p_grid,
    trials: int,
    seed: int,
    test_points: int = 100,
) -> list[RiskCurveRow]:
    """Evaluate analytic and Monte Carlo risk at every ``p`` in the grid.

    Each ``p`` gets its own substream family, so adding or reordering
    grid points does not perturb the other rows.
    """
    rows = []
    for p in p_grid:
        p = int(p)
        analytic = analytic_risk_random_subset(
            problem.signal_norm_sq, problem.noise_var, problem.d, problem.n, p
        )
        mc = monte_carlo_risk(
            problem, p, trials, test_points, substream_seed(seed, p)
        )
        rows.append(
            RiskCurveRow(
                p=p,
                analytic_risk=analytic,
                mc_risk=mc.mean,
                mc_stderr=mc.stderr,
                trials=mc.trials,
            )
        )
    return rows


def substream_seed(seed: int, p: int) -> int:
    """Sub-seed for the Monte Carlo column at one grid point."""
    return derive_seed(seed, "risk-curve-p", p)
