import numpy

from rdplab.info_measures import entropy, joint_pmf, tv_distance
from rdplab.rdp_solvers import Channel
from rdplab.source_models import Pmf

__all__ = ["ORACLE_CHECK_TOL", "verify_oracle_point"]

ORACLE_CHECK_TOL = 1e-9


def verify_oracle_point(
    p_x: Pmf,
    channel: Channel,
    cost: numpy.ndarray,
    budget: float,
    S: float,
    value: float,
    base: float = 2.0,
):
    """
    Recompute cost, variational distance and output entropy of an oracle
    answer from the joint law and fail loudly on any disagreement

    :param value: the claimed output entropy in log-base units, before any
        per-symbol normalization
    :raises RuntimeError: if the channel breaks a constraint or its entropy
        differs from value
    """
    joint = joint_pmf(p_x, channel)
    spent = float((joint.probs * cost).sum())
    output = joint.marginal_y()
    distance = tv_distance(output, p_x)
    achieved = entropy(output, base)

    if spent > budget + ORACLE_CHECK_TOL:
        raise RuntimeError(
            f"oracle channel spends {spent:.12g} over the budget {budget:.12g}"
        )
    if distance > S + ORACLE_CHECK_TOL:
        raise RuntimeError(
            f"oracle channel sits at distance {distance:.12g} above S={S}"
        )
    if abs(achieved - value) > 1e-6:
        raise RuntimeError(
            f"oracle reported H={value:.12g}, the channel gives {achieved:.12g}"
        )
