from typing import List, Literal, Optional

from pydantic import BaseModel, Field

__all__ = ["SimulationReport"]


class SimulationReport(BaseModel):
    """
    Measured statistics of a coding simulation next to the exact values the
    simulated code should reproduce. Rates are in K-ary code symbols per
    source symbol, distortions per source symbol.
    """

    criterion: Literal["va", "fa"]
    n: int = Field(ge=1)
    trials: int = Field(ge=1)
    k: int = Field(ge=2, description="code alphabet size")
    seed: int

    avg_len_per_symbol: float = Field(ge=0.0)
    avg_len_radius: float = Field(ge=0.0)
    empirical_distortion: float = Field(ge=0.0)
    distortion_radius: float = Field(ge=0.0)
    empirical_tv: float = Field(ge=0.0, le=1.0)
    tv_bias_bound: float = Field(ge=0.0)
    max_distortion_quantile: float = Field(
        ge=0.0, description="p-limsup estimate of the per-symbol distortion"
    )
    quantile_eps: float = Field(gt=0.0, lt=1.0)
    support_size: int = Field(ge=1, description="blocks of positive output probability")

    theory_rate: float = Field(ge=0.0, description="exact expected length per symbol")
    theory_entropy_rate: float = Field(ge=0.0, description="H_K(Y^n) / n")
    theory_distortion: float = Field(ge=0.0)
    theory_tv: float = Field(ge=0.0, le=1.0)

    codebook_size: Optional[int] = None
    best_support_tv: Optional[float] = None

    decoded_counts: List[int] = Field(
        default_factory=list, description="decoded frequency of every block index"
    )
