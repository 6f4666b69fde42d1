"""Experiment configuration and its flat ``key = value`` file format.

Example file::

    # desk-scale run
    n = 200
    n_train = 160
    trials = 10
    j_values = 10, 50, 100
    m = 20
    l = 20
    seed = 7

Blank lines and ``#`` comments are ignored. Keys not listed in
:data:`CONFIG_KEYS` are rejected; omitted keys keep their defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from ..errors import InvalidConfig
from ..latent import ModelConfig

__all__ = ["ExperimentConfig", "CONFIG_KEYS", "parse_config", "load_config", "format_config"]

CONFIG_KEYS = (
    "n",
    "n_train",
    "trials",
    "j_values",
    "m",
    "l",
    "d_x",
    "lengthscale",
    "alpha",
    "noise_a0",
    "noise_b0",
    "outer_iters",
    "latent_step",
    "latent_iters",
    "restarts",
    "sigma_x",
    "sigma_w",
    "sigma_eps",
    "seed",
)

_MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of the J-sweep / leave-one-output-out protocol.

    Defaults are the desk-scale protocol; :meth:`full_scale` gives the
    full-size one (1000 rows, 50 trials, J in {10, 26, 50, 100, 200, 500},
    M = L = 100).
    """

    n: int = 200
    n_train: int = 160
    trials: int = 10
    j_values: tuple[int, ...] = (10, 50, 100)
    m: int = 20
    l: int = 20  # noqa: E741 - mirrors the file key
    d_x: int = 2
    lengthscale: float = 1.0
    alpha: float = 1.0
    noise_a0: float = 2.0
    noise_b0: float = 1.0
    outer_iters: int = 30
    latent_step: float = 0.05
    latent_iters: int = 25
    restarts: int = 5
    sigma_x: float = 1.0
    sigma_w: float = 1.0
    sigma_eps: float = 1.0
    seed: int = 0
    out_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "j_values", tuple(int(j) for j in self.j_values))
        if not self.j_values:
            raise InvalidConfig("j_values must not be empty")
        if any(j < 2 or j % 2 for j in self.j_values):
            raise InvalidConfig(f"j_values must be even integers >= 2, got {list(self.j_values)}")
        if len(set(self.j_values)) != len(self.j_values):
            raise InvalidConfig("j_values contains duplicates")
        if self.trials < 1:
            raise InvalidConfig("trials must be at least 1")
        if not 1 <= self.n_train < self.n:
            raise InvalidConfig(f"need 1 <= n_train < n, got n_train={self.n_train}, n={self.n}")
        if self.n_train < 2:
            raise InvalidConfig("training needs at least two rows")
        if not 0 <= self.seed <= _MAX_SEED:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")
        if not (self.sigma_x > 0 and self.sigma_w > 0 and self.sigma_eps >= 0):
            raise InvalidConfig("sigma_x and sigma_w must be positive, sigma_eps nonnegative")
        # Surface model-level errors at configuration time.
        self.model_config(self.j_values[0])

    @classmethod
    def full_scale(cls, **overrides) -> "ExperimentConfig":
        # 26 rather than 25: the interleaved cos/sin map needs an even feature count
        base = dict(n=1000, n_train=800, trials=50, j_values=(10, 26, 50, 100, 200, 500), m=100, l=100)
        base.update(overrides)
        return cls(**base)

    def model_config(self, J: int) -> ModelConfig:
        return ModelConfig(
            d_x=self.d_x,
            d_y=4,
            J=J,
            lengthscale=self.lengthscale,
            alpha=self.alpha,
            noise_prior=(self.noise_a0, self.noise_b0),
            outer_iters=self.outer_iters,
            latent_step=self.latent_step,
            latent_iters=self.latent_iters,
            restarts=self.restarts,
            M=self.m,
            L=self.l,
        )

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, seed=seed)


_INT_KEYS = {f.name for f in fields(ExperimentConfig) if f.type in ("int",)}


def _convert(key: str, raw: str):
    if key == "j_values":
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        try:
            return tuple(int(p) for p in parts)
        except ValueError:
            raise InvalidConfig(f"j_values must be comma-separated integers, got {raw!r}") from None
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise InvalidConfig(f"{key} must be {kind}, got {raw!r}") from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` format; unknown or repeated keys are errors."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise InvalidConfig(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise InvalidConfig(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, raw)
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def format_config(config: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config` (``out_dir`` is not part of the file format)."""
    lines = []
    for key in CONFIG_KEYS:
        value = getattr(config, key)
        if key == "j_values":
            value = ", ".join(str(j) for j in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
