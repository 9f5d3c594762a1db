"""Step-size rules: Armijo backtracking, Lipschitz fixed step, divergent series."""
from dataclasses import dataclass

from .errors import ConfigError, LineSearchError

DEFAULT_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class ArmijoParams:
    beta: float = 0.5
    theta: float = 0.5
    max_backtracks: int = DEFAULT_MAX_BACKTRACKS

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ConfigError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0 < self.theta < 1:
            raise ConfigError(f"theta must lie in (0, 1), got {self.theta}")
        if self.max_backtracks < 1:
            raise ConfigError("max_backtracks must be at least 1")


@dataclass(frozen=True)
class Armijo:
    params: ArmijoParams = ArmijoParams()
    name = "armijo"


@dataclass(frozen=True)
class FixedLipschitz:
    """``lambda_k = min{(1 - beta) / (L B^2), eps_l} * delta_l``.

    ``L`` and ``B`` may be left as ``None`` and filled in by the solver from
    the objective and domain.
    """

    L: float = None
    B: float = None
    name = "fixed"

    def __post_init__(self):
        if self.L is not None and not self.L > 0:
            raise ConfigError(f"fixed step needs L > 0, got {self.L}")
        if self.B is not None and not self.B > 0:
            raise ConfigError(f"fixed step needs B > 0, got {self.B}")


@dataclass(frozen=True)
class Divergent:
    """``lambda_k = eps_l / (k + 1)`` with ``k`` the inner index of the stage."""

    name = "divergent"


STEP_RULES = ("armijo", "fixed", "divergent")


def step_rule_from_name(name, armijo=None):
    if name == "armijo":
        return Armijo(armijo or ArmijoParams())
    if name == "fixed":
        return FixedLipschitz()
    if name == "divergent":
        return Divergent()
    raise ConfigError(f"unknown step rule {name!r}; expected one of {STEP_RULES}")


def armijo(value, x, d, gamma, slope, params=ArmijoParams(), fx=None):
    """Backtrack from ``gamma`` until ``f(x + lam d) <= f(x) + beta lam slope``.

    Parameters
    ----------
    value : callable
        Objective value ``f``; every call is a trial evaluation.
    x, d : ndarray
        Current point and search direction.
    gamma : float
        Largest admissible step; trials are ``theta**m * gamma``.
    slope : float
        Directional derivative ``<f'(x), d>``, must be negative.
    params : ArmijoParams
    fx : float, optional
        ``f(x)`` if the caller already has it.

    Returns
    -------
    backtracks : int
        Smallest ``m >= 0`` that satisfied the test.
    step : float
        Accepted step ``theta**m * gamma``.
    f_new : float
        Objective value at the accepted point.

    Raises
    ------
    LineSearchError
        If ``max_backtracks`` reductions all fail.
    """
    if fx is None:
        fx = value(x)
    beta, theta = params.beta, params.theta
    lam = gamma
    f_new = fx
    for m in range(params.max_backtracks + 1):
        f_new = value(x + lam * d)
        if f_new <= fx + beta * lam * slope:
            return m, lam, f_new
        lam *= theta
    raise LineSearchError(
        f"Armijo test failed after {params.max_backtracks} backtracks "
        f"(slope={slope:.3e}); direction is not a descent direction",
        last_step=lam / theta,
        last_value=f_new,
    )


def fixed_step(L, B, beta, eps, delta):
    """``min{(1 - beta) / (L B^2), eps} * delta``."""
    if not (L > 0 and B > 0 and 0 < beta < 1 and eps > 0 and delta > 0):
        raise ConfigError("fixed_step needs L, B, eps, delta > 0 and beta in (0, 1)")
    return min((1.0 - beta) / (L * B * B), eps) * delta


def divergent_step(k, eps):
    if k < 0 or not eps > 0:
        raise ConfigError("divergent_step needs k >= 0 and eps > 0")
    return eps / (k + 1)
