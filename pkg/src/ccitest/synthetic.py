"""Post-nonlinear synthetic data with known conditional-independence truth.

Z has i.i.d. N(1, 1) coordinates, ``X = cos(a.Z + e1)`` and either
``Y = cos(b.Z + e2)`` (CI) or ``Y = cos(b.Z + c X + e2)`` (not CI), with
``e1, e2 ~ N(0, var_eta)`` and unit vectors ``a``, ``b`` fixed per dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset

CI = "CI"
NOT_CI = "NotCI"

DEFAULT_VAR_ETA = 0.25
MAX_COUPLING = 2.0


def sample_unit_vector(d: int, seed) -> np.ndarray:
    if d < 1:
        raise ValueError(f"dimension must be at least 1, got {d}")
    rng = np.random.default_rng(seed)
    while True:
        v = rng.standard_normal(d)
        norm = np.linalg.norm(v)
        if norm > 0.0:
            return v / norm


@dataclass(frozen=True, eq=False)
class PnlConfig:
    n: int
    d_z: int
    dependent: bool
    a: np.ndarray
    b: np.ndarray
    c: float
    seed: int
    var_eta: float = DEFAULT_VAR_ETA

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64).reshape(-1)
        b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.n < 0:
            raise ValueError(f"n must be nonnegative, got {self.n}")
        if self.d_z < 1:
            raise ValueError(f"d_z must be at least 1, got {self.d_z}")
        if a.shape != (self.d_z,) or b.shape != (self.d_z,):
            raise ValueError("a and b must have length d_z")
        for name, v in (("a", a), ("b", b)):
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"{name} must have unit norm")
        if not self.var_eta > 0.0:
            raise ValueError(f"var_eta must be positive, got {self.var_eta}")
        if not 0.0 <= self.c <= MAX_COUPLING:
            raise ValueError(f"c must lie in [0, {MAX_COUPLING}], got {self.c}")
        if self.dependent == (self.c == 0.0):
            raise ValueError("c must be 0 exactly when the data are not dependent")

    @classmethod
    def draw(cls, n: int, d_z: int, dependent: bool, seed: int,
             var_eta: float = DEFAULT_VAR_ETA, c: float | None = None) -> "PnlConfig":
        """Draw the per-dataset constants ``a``, ``b`` and ``c`` from ``seed``."""
        ss = np.random.SeedSequence([seed, 1])
        sa, sb, sc = ss.spawn(3)
        if c is None:
            c = float(np.random.default_rng(sc).uniform(0.0, MAX_COUPLING)) if dependent else 0.0
        return cls(
            n=n,
            d_z=d_z,
            dependent=dependent,
            a=sample_unit_vector(d_z, sa),
            b=sample_unit_vector(d_z, sb),
            c=c,
            seed=seed,
            var_eta=var_eta,
        )

    @property
    def ground_truth(self) -> str:
        return NOT_CI if self.dependent else CI

    def metadata(self) -> dict:
        return {
            "seed": self.seed,
            "n": self.n,
            "d_z": self.d_z,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "c": self.c,
            "var_eta": self.var_eta,
            "ground_truth": self.ground_truth,
        }


class PnlSamplers:
    """Conditional samplers for one :class:`PnlConfig`.

    ``sample_y_given_z`` draws from ``f(y|z)`` itself: in the dependent case
    it draws its own X from ``f(x|z)`` and feeds that into Y.
    """

    def __init__(self, config: PnlConfig, noise_sd: float | None = None):
        self.config = config
        self.sd = math.sqrt(config.var_eta) if noise_sd is None else noise_sd

    def _noise(self, n, rng):
        return self.sd * rng.standard_normal(n)

    def sample_z(self, n: int, rng) -> np.ndarray:
        return rng.normal(1.0, 1.0, size=(n, self.config.d_z))

    def sample_x_given_z(self, z, rng) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64).reshape(-1, self.config.d_z)
        return np.cos(z @ self.config.a + self._noise(len(z), rng))

    def y_from(self, z, x, rng) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64).reshape(-1, self.config.d_z)
        arg = z @ self.config.b + self._noise(len(z), rng)
        if self.config.dependent:
            arg = arg + self.config.c * np.asarray(x).reshape(-1)
        return np.cos(arg)

    def sample_y_given_z(self, z, rng) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64).reshape(-1, self.config.d_z)
        x_star = self.sample_x_given_z(z, rng) if self.config.dependent else None
        return self.y_from(z, x_star, rng)


def pnl_conditional_samplers(config: PnlConfig) -> PnlSamplers:
    return PnlSamplers(config)


def gen_pnl(config: PnlConfig, *, _noiseless: bool = False) -> tuple[Dataset, str]:
    """Generate one dataset; ``_noiseless`` zeroes the noise (test hook)."""
    samplers = PnlSamplers(config, noise_sd=0.0 if _noiseless else None)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 2]))
    z = samplers.sample_z(config.n, rng)
    x = samplers.sample_x_given_z(z, rng)
    y = samplers.y_from(z, x, rng)
    return Dataset.from_blocks(x, y, z), config.ground_truth
