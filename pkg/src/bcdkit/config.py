"""Run configuration: algorithm choice and every tunable threshold."""

from __future__ import annotations

from dataclasses import dataclass, field

ALGORITHMS = ("pure", "minpure", "maxpure", "lessinterfere", "mix")

# Window widths for the occurrence-ordered pure variants.
MIN_WINDOW_WIDE = 30_000
MIN_WINDOW_NARROW = 1_500
MIN_WINDOW_VAR_CUTOFF = 70_000
MAX_WINDOW_WIDE = 5_000
MAX_WINDOW_NARROW = 500
MAX_WINDOW_VAR_CUTOFF = 800_000

# Batch-size schedule for the interference-guided decomposer.
THETA_LARGE_APPLICATION = 200
THETA_SMALL_APPLICATION = 2_300
THETA_RANDOM = 400
THETA_SIZE_CUTOFF = 800_000
MIN_CANDIDATE_BATCH = 18

# Gates used by the mixed pipeline.
INTERFERE_MAX_CLAUSES = 5_000_000
INTERFERE_MAX_VARS = 1_000_000
SKIP_FINAL_MOVE_CLAUSES = 10_000_000


@dataclass
class Config:
    """Thresholds and switches; defaults match the built-in schedules."""

    algo: str = "mix"
    mode: str = "application"  # application | random, selects the theta schedule
    blockable: bool = False
    gamma_min: int | None = None  # window override for minpure
    gamma_max: int | None = None  # window override for maxpure
    theta: int | None = None
    touch_cap: int | None = None
    skip_final_move: str = "auto"  # auto | on | off
    timeout_s: float | None = None
    score_variant: str = "complement"  # complement | literal
    out_l: str | None = None
    out_r: str | None = None
    report: str | None = None

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if self.mode not in ("application", "random"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.skip_final_move not in ("auto", "on", "off"):
            raise ValueError(f"unknown skip_final_move {self.skip_final_move!r}")
        if self.score_variant not in ("complement", "literal"):
            raise ValueError(f"unknown score_variant {self.score_variant!r}")
        for name in ("gamma_min", "gamma_max", "theta", "touch_cap"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")

    def min_window(self, n_vars: int) -> int:
        if self.gamma_min is not None:
            return self.gamma_min
        return MIN_WINDOW_WIDE if n_vars < MIN_WINDOW_VAR_CUTOFF else MIN_WINDOW_NARROW

    def max_window(self, n_vars: int) -> int:
        if self.gamma_max is not None:
            return self.gamma_max
        return MAX_WINDOW_WIDE if n_vars < MAX_WINDOW_VAR_CUTOFF else MAX_WINDOW_NARROW

    def theta_for(self, n_alive: int) -> int:
        if self.theta is not None:
            return self.theta
        if self.mode == "random":
            return THETA_RANDOM
        if n_alive >= THETA_SIZE_CUTOFF:
            return THETA_LARGE_APPLICATION
        return THETA_SMALL_APPLICATION

    def batch_size(self, n_alive: int) -> int:
        return max(MIN_CANDIDATE_BATCH, n_alive // self.theta_for(n_alive))
