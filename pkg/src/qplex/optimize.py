"""Derivative-free minimizers for sampled-energy losses.

Every call to the loss is recorded in the trace together with the iteration it
belongs to, and the best point is the best of *all* evaluated points (SPSA's
perturbed probes included). A run stops after ``max_iter`` iterations or once the
running best has improved by less than ``tol`` over ``patience`` iterations.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuits import AnsatzSpec, param_count
from .errors import OptimizationError

logger = logging.getLogger(__name__)

OPTIMIZERS = ("nelder-mead", "spsa", "adam", "cobyla")

DEFAULT_HYPERPARAMS = {
    "nelder-mead": {"reflect": 1.0, "expand": 2.0, "contract": 0.5, "shrink": 0.5, "step": 0.5},
    "spsa": {"a": 0.1, "c": 0.1, "A": None, "alpha": 0.602, "gamma": 0.101},
    "adam": {"lr": 0.05, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8, "c": 0.1, "gamma": 0.101},
}


@dataclass(frozen=True)
class OptimizerConfig:
    name: str = "nelder-mead"
    max_iter: int = 200
    tol: float = 1e-6
    patience: int = 10
    seed: int = 0
    hyperparams: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.name!r}; choose from {', '.join(OPTIMIZERS)}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")

    @property
    def method(self) -> str:
        return "nelder-mead" if self.name == "cobyla" else self.name

    def hp(self) -> dict:
        merged = dict(DEFAULT_HYPERPARAMS[self.method])
        merged.update(self.hyperparams)
        if self.method == "spsa" and merged["A"] is None:
            merged["A"] = self.max_iter / 10
        return merged


@dataclass
class EvalRecord:
    iteration: int
    params: tuple[float, ...]
    loss: float


@dataclass
class OptimizationTrace:
    records: list[EvalRecord] = field(default_factory=list)
    best_params: tuple[float, ...] = ()
    best_loss: float = math.inf
    termination_reason: str = ""
    iterations: int = 0

    @property
    def evaluations(self) -> int:
        return len(self.records)

    def running_best(self) -> list[float]:
        out, best = [], math.inf
        for r in self.records:
            best = min(best, r.loss)
            out.append(best)
        return out


class _Recorder:
    def __init__(self, loss: Callable[[np.ndarray], float]):
        self.loss = loss
        self.trace = OptimizationTrace()
        self.iteration = 0

    def __call__(self, x: np.ndarray) -> float:
        params = tuple(float(v) for v in x)
        value = float(self.loss(np.array(params)))
        if not math.isfinite(value):
            self.trace.termination_reason = "error"
            raise OptimizationError(f"loss returned {value} at iteration {self.iteration}", self.trace)
        self.trace.records.append(EvalRecord(self.iteration, params, value))
        if value < self.trace.best_loss:
            self.trace.best_loss = value
            self.trace.best_params = params
        return value


def spsa_gains(k: int, a: float = 0.1, c: float = 0.1, A: float = 20.0,
               alpha: float = 0.602, gamma: float = 0.101) -> tuple[float, float]:
    """Step size a_k and perturbation size c_k for 0-based iteration k."""
    return a / (A + k + 1) ** alpha, c / (k + 1) ** gamma


def minimize(loss: Callable[[np.ndarray], float], init: Sequence[float],
             config: OptimizerConfig | None = None) -> OptimizationTrace:
    config = config or OptimizerConfig()
    x0 = np.asarray(init, dtype=float)
    if x0.ndim != 1 or x0.size < 1:
        raise ValueError("init must be a nonempty 1-d vector")
    if not np.all(np.isfinite(x0)):
        raise ValueError("init must be finite")
    if config.name == "cobyla":
        logger.warning("optimizer 'cobyla' is served by the bundled Nelder-Mead implementation")

    rec = _Recorder(loss)
    step = {"nelder-mead": _nelder_mead, "spsa": _spsa, "adam": _adam}[config.method](rec, x0, config)
    next(step)  # initial evaluations, recorded as iteration 0

    history = [rec.trace.best_loss]
    reason = "max_iter"
    for k in range(1, config.max_iter + 1):
        rec.iteration = k
        next(step)
        rec.trace.iterations = k
        history.append(rec.trace.best_loss)
        if k >= config.patience and history[k - config.patience] - history[k] < config.tol:
            reason = "converged"
            break
    rec.trace.termination_reason = reason
    return rec.trace


def _nelder_mead(rec: _Recorder, x0: np.ndarray, config: OptimizerConfig):
    hp = config.hp()
    rho, chi, psi, sigma = hp["reflect"], hp["expand"], hp["contract"], hp["shrink"]
    n = x0.size
    simplex = [x0.copy()]
    for i in range(n):
        x = x0.copy()
        x[i] += hp["step"]
        simplex.append(x)
    fvals = [rec(x) for x in simplex]
    while True:
        yield
        order = np.argsort(fvals, kind="stable")
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + rho * (centroid - worst)
        fr = rec(xr)
        if fr < fvals[0]:
            xe = centroid + chi * (xr - centroid)
            fe = rec(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = centroid + psi * (xr - centroid)
            fc = rec(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xcc = centroid + psi * (worst - centroid)
            fcc = rec(xcc)
            if fcc < fvals[-1]:
                simplex[-1], fvals[-1] = xcc, fcc
                continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + sigma * (simplex[i] - best)
            fvals[i] = rec(simplex[i])


def _spsa(rec: _Recorder, x0: np.ndarray, config: OptimizerConfig):
    hp = config.hp()
    rng = np.random.default_rng(config.seed)
    theta = x0.copy()
    rec(theta)
    k = 0
    while True:
        yield
        ak, ck = spsa_gains(k, hp["a"], hp["c"], hp["A"], hp["alpha"], hp["gamma"])
        delta = rng.choice([-1.0, 1.0], size=theta.size)
        fp = rec(theta + ck * delta)
        fm = rec(theta - ck * delta)
        theta = theta - ak * (fp - fm) / (2.0 * ck) * delta
        k += 1


def _adam(rec: _Recorder, x0: np.ndarray, config: OptimizerConfig):
    hp = config.hp()
    rng = np.random.default_rng(config.seed)
    theta = x0.copy()
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    rec(theta)
    k = 0
    while True:
        yield
        ck = hp["c"] / (k + 1) ** hp["gamma"]
        delta = rng.choice([-1.0, 1.0], size=theta.size)
        fp = rec(theta + ck * delta)
        fm = rec(theta - ck * delta)
        grad = (fp - fm) / (2.0 * ck) * delta
        m = hp["beta1"] * m + (1 - hp["beta1"]) * grad
        v = hp["beta2"] * v + (1 - hp["beta2"]) * grad**2
        m_hat = m / (1 - hp["beta1"] ** (k + 1))
        v_hat = v / (1 - hp["beta2"] ** (k + 1))
        theta = theta - hp["lr"] * m_hat / (np.sqrt(v_hat) + hp["eps"])
        k += 1


def initial_params(spec: AnsatzSpec, seed: int = 0) -> np.ndarray:
    """Uniform draws from [0, 2*pi), one per ansatz parameter."""
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * math.pi, size=param_count(spec))
