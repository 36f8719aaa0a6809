from typing import Literal, Optional

from pydantic import BaseModel, Field

__all__ = ["Criterion", "BoundType", "TradeoffPoint", "bound_type_for"]

Criterion = Literal["va", "vm", "fa"]
BoundType = Literal["exact", "upper_bound"]


class TradeoffPoint(BaseModel):
    """
    A rate, distortion, perception triple evaluated under one criterion.
    """

    R: float = Field(ge=0.0, description="rate in log-base units per symbol")
    D: float = Field(ge=0.0, description="distortion level per symbol")
    S: float = Field(ge=0.0, le=1.0, description="bound on the variational distance")
    criterion: Criterion
    base: float = Field(default=2.0, gt=1.0, description="logarithm base of R")
    method: str = "exact"
    bound_type: BoundType = "exact"
    ba_component: Optional[float] = Field(
        default=None, description="distortion term of the fixed-length rate"
    )
    spectrum_floor: Optional[float] = Field(
        default=None, description="perception floor of the fixed-length rate"
    )


def bound_type_for(method: str) -> BoundType:
    """
    :param method: solver method name
    :return: 'exact' for vertex enumeration, 'upper_bound' for approximate
        methods
    """
    return "exact" if method == "exact" else "upper_bound"
