from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.utils.constants import (
    DEFAULT_BOUNDARY_Q,
    DEFAULT_MC_SAMPLES,
    DEFAULT_PV_EPSILONS,
    DEFAULT_SEED,
    DEFAULT_VOLUME_Q,
)

RULE_ALIASES = {"gauss": "gauss", "gauss_tensor": "gauss", "tensor": "gauss",
                "monte_carlo": "monte_carlo", "mc": "monte_carlo"}


class RuleSpec(BaseModel):
    rule: Literal["gauss", "monte_carlo"] = "gauss"
    q: int = DEFAULT_BOUNDARY_Q
    panels: int = 1
    samples: int = DEFAULT_MC_SAMPLES
    seed: Optional[int] = None

    @field_validator("rule", mode="before")
    @classmethod
    def normalize_rule(cls, value):
        key = str(value).lower()
        if key not in RULE_ALIASES:
            raise ValueError(f"unknown rule '{value}'")
        return RULE_ALIASES[key]

    @field_validator("q")
    @classmethod
    def check_order(cls, value):
        if value < 2:
            raise ValueError("Gauss order q must be >= 2")
        return value

    @field_validator("panels")
    @classmethod
    def check_panels(cls, value):
        if value < 1:
            raise ValueError("panels must be >= 1")
        return value

    @field_validator("samples")
    @classmethod
    def check_samples(cls, value):
        if value < 1000:
            raise ValueError("Monte Carlo needs at least 1000 samples")
        return value


class QuadratureConfig(BaseModel):
    boundary: RuleSpec = Field(default_factory=lambda: RuleSpec(q=DEFAULT_BOUNDARY_Q))
    volume: RuleSpec = Field(default_factory=lambda: RuleSpec(q=DEFAULT_VOLUME_Q))
    pv_epsilons: List[float] = Field(default_factory=lambda: list(DEFAULT_PV_EPSILONS))
    seed: int = DEFAULT_SEED
    threads: int = 1
    # singularity-adapted rules for targets on or near the boundary
    near_field: bool = True
    near_ratio: float = 0.5
    radial_panel: float = 1.5

    @field_validator("pv_epsilons")
    @classmethod
    def check_epsilons(cls, value):
        if any(eps <= 0 for eps in value):
            raise ValueError("pv_epsilons must be positive")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError("pv_epsilons must be strictly decreasing")
        return value

    @field_validator("threads")
    @classmethod
    def check_threads(cls, value):
        return max(1, value)

    @model_validator(mode="after")
    def fill_seeds(self):
        if self.boundary.seed is None:
            self.boundary.seed = self.seed
        if self.volume.seed is None:
            self.volume.seed = self.seed + 1
        return self

    def rung(self, key: str, value: int) -> "QuadratureConfig":
        """Copy with the ladder parameter applied to both rules."""
        field_name = "q" if key == "q" else "samples"
        return self.model_copy(update={
            "boundary": RuleSpec.model_validate({**self.boundary.model_dump(), field_name: value}),
            "volume": RuleSpec.model_validate({**self.volume.model_dump(), field_name: value}),
        })
