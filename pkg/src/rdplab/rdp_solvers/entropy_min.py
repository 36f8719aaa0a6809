"""
Minimum output entropy under distortion and perception constraints.

The output entropy is concave in the output law, and the reachable output
laws form a polytope, so the minimum sits on one of its vertices. Small
alphabets are solved exactly by enumerating those vertices; larger ones by
successive linear programming from many starts, which only yields an upper
bound.
"""

import math
from typing import Literal, Optional, Tuple

import numpy
from loguru import logger
from scipy.optimize import linprog

from rdplab.info_measures import binary_entropy, entropy, tv_distance
from rdplab.rdp_solvers.channel import Channel, DistortionSpec
from rdplab.rdp_solvers.polytope import JointPolytope
from rdplab.source_models import Pmf
from rdplab.utils import AlphabetMismatchError, InfeasibleConstraintError, to_base

__all__ = [
    "EXACT_MAX_ALPHABET",
    "DEFAULT_MULTISTART_STARTS",
    "DEFAULT_MULTISTART_SEED",
    "SolverMethod",
    "resolve_method",
    "min_output_entropy",
    "min_output_entropy_excess",
    "mixture_upper_bound",
    "optimal_transport_distortion",
]

EXACT_MAX_ALPHABET = 4
DEFAULT_MULTISTART_STARTS = 64
DEFAULT_MULTISTART_SEED = 20_240_101
_MULTISTART_MAX_STEPS = 200

SolverMethod = Literal["exact", "grid", "multistart", "auto"]


def resolve_method(method: str, size: int) -> str:
    """
    :param method: requested method, 'auto' picks exact for alphabets of at
        most four symbols and multistart otherwise
    :param size: alphabet (or block) size of the problem
    :return: the concrete method name
    """
    if method == "auto":
        return "exact" if size <= EXACT_MAX_ALPHABET else "multistart"
    if method not in ("exact", "grid", "multistart"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exact" and size > EXACT_MAX_ALPHABET:
        raise ValueError(
            f"exact vertex enumeration supports at most {EXACT_MAX_ALPHABET} "
            f"symbols, given {size}"
        )
    return method


def _transport_plan(
    p: numpy.ndarray, q: numpy.ndarray, cost: numpy.ndarray
) -> Optional[Tuple[float, numpy.ndarray]]:
    size = p.shape[0]
    equal = numpy.vstack(
        [
            numpy.kron(numpy.eye(size), numpy.ones((1, size))),
            numpy.kron(numpy.ones((1, size)), numpy.eye(size)),
        ]
    )
    result = linprog(
        cost.ravel(),
        A_eq=equal,
        b_eq=numpy.concatenate([p, q]),
        bounds=(0, None),
        method="highs",
    )
    if result.status != 0:
        return None
    return float(result.fun), numpy.clip(result.x, 0.0, None).reshape(size, size)


def optimal_transport_distortion(
    p: Pmf, q: Pmf, delta: DistortionSpec
) -> Tuple[float, Channel]:
    """
    Smallest expected per-symbol distortion among channels that turn p into q

    :param p: input pmf
    :param q: required output pmf, on the same support as p
    :param delta: distortion measure
    :return: the minimum distortion and a channel attaining it
    """
    if p.support != q.support:
        raise AlphabetMismatchError(f"supports differ: {p.support} and {q.support}")
    plan = _transport_plan(p.probs, q.probs, delta.matrix)
    if plan is None:
        raise InfeasibleConstraintError("no coupling of the two pmfs was found")
    value, joint = plan
    polytope = JointPolytope(p=p.probs, cost=delta.matrix, budget=math.inf, S=0.0)
    rows = polytope.to_channel_rows(joint.ravel())
    return value / delta.block_length, Channel.from_rows(rows, p.support)


def _pinned_marginal(
    p_x: Pmf, cost: numpy.ndarray, budget: float
) -> Optional[Channel]:
    """
    :return: a channel keeping the output law equal to p_x within the cost
        budget, the identity when it qualifies, otherwise the cheapest coupling
    """
    if float(p_x.probs @ numpy.diag(cost)) <= budget:
        return Channel.identity(p_x.support)
    plan = _transport_plan(p_x.probs, p_x.probs, cost)
    if plan is None or plan[0] > budget + 1e-9:
        return None
    polytope = JointPolytope(p=p_x.probs, cost=cost, budget=budget, S=0.0)
    return Channel.from_rows(polytope.to_channel_rows(plan[1].ravel()), p_x.support)


def _multistart(
    polytope: JointPolytope, starts: int, seed: int
) -> Optional[Tuple[float, numpy.ndarray]]:
    """
    Successive linearization of the concave objective: each step moves to
    the vertex minimizing the tangent plane at the current point, which
    never increases the entropy.
    """
    best: Optional[Tuple[float, numpy.ndarray]] = None
    size = polytope.size
    columns = polytope.column_sum_operator()

    for start in range(starts):
        if start == 0:
            # tangent at the source law
            q = polytope.p.copy()
        else:
            rng = numpy.random.default_rng([seed, start])
            q = rng.dirichlet(numpy.ones(size))
        current = None
        value = math.inf

        for _ in range(_MULTISTART_MAX_STEPS):
            gradient = -(numpy.log(numpy.clip(q, 1e-12, None)) + 1.0)
            objective = numpy.tile(gradient, size)
            point = polytope.linear_minimum(objective)
            if point is None:
                return None
            updated = polytope.output_entropy_nats(point)
            if current is not None and updated >= value - 1e-12:
                break
            current, value = point, updated
            q = numpy.clip(columns @ point, 0.0, None)

        logger.debug(f"multistart start {start}: H={value:.6g} nats")
        if best is None or value < best[0] - 1e-12:
            best = (value, polytope.to_channel_rows(current))

    return best


def _minimize(
    p_x: Pmf,
    cost: numpy.ndarray,
    budget: float,
    S: float,
    method: str,
    block_length: int,
    base: float,
    starts: int,
    seed: int,
    resolution: Optional[float],
) -> Tuple[float, Channel]:
    if not 0.0 <= S <= 1.0:
        raise ValueError(f"S must be in [0, 1], given {S}")

    method = resolve_method(method, len(p_x))
    support = p_x.support

    if S == 0.0:
        channel = _pinned_marginal(p_x, cost, budget)
        if channel is None:
            raise InfeasibleConstraintError(
                "no channel keeps the output law equal to the source within the "
                "distortion budget"
            )
        return entropy(p_x, base) / block_length, channel

    if method == "grid":
        # imported here, the oracle builds on this package
        from rdplab.nletter_oracle import scan_channel_grid

        kwargs = {} if resolution is None else {"resolution": resolution}
        value, channel, _ = scan_channel_grid(p_x, cost, budget, S, base=base, **kwargs)
        return value / block_length, channel

    polytope = JointPolytope(p=p_x.probs, cost=cost, budget=budget, S=S)
    if method == "exact":
        found = polytope.minimize_entropy_over_vertices()
    else:
        found = _multistart(polytope, starts, seed)

    if found is None:
        raise InfeasibleConstraintError(
            f"no channel meets the distortion budget {budget:.6g} with S={S}"
        )
    value, rows = found
    return to_base(value, base) / block_length, Channel.from_rows(rows, support)


def min_output_entropy(
    p_x: Pmf,
    delta: DistortionSpec,
    D: float,
    S: float,
    method: SolverMethod = "exact",
    base: float = 2.0,
    starts: int = DEFAULT_MULTISTART_STARTS,
    seed: int = DEFAULT_MULTISTART_SEED,
    resolution: Optional[float] = None,
) -> Tuple[float, Channel]:
    """
    Minimize H(P_Y) over channels with expected per-symbol distortion at
    most D and variational distance between P_Y and P_X at most S.

    :param p_x: source pmf, a block pmf when delta is a block distortion
    :param delta: distortion measure
    :param D: distortion level, >= 0
    :param S: perception level in [0, 1]
    :param method: 'exact' (at most 4 symbols), 'grid' (simplex lattice scan),
        'multistart' (upper bound) or 'auto'
    :param base: logarithm base of the returned entropy
    :param starts: number of multistart starts
    :param seed: seed of the multistart schedule
    :param resolution: lattice spacing for the grid method
    :return: per-symbol entropy (divided by delta.block_length) and a channel
        attaining it
    :raises InfeasibleConstraintError: if no channel meets both constraints
    """
    if D < 0:
        raise ValueError(f"D must be >= 0, given {D}")
    if delta.size != len(p_x):
        raise AlphabetMismatchError(
            f"distortion matrix has size {delta.size}, pmf has {len(p_x)} labels"
        )
    cost = delta.matrix / delta.block_length
    return _minimize(
        p_x, cost, D, S, method, delta.block_length, base, starts, seed, resolution
    )


def min_output_entropy_excess(
    p_xn: Pmf,
    delta_n: DistortionSpec,
    D: float,
    eps: float,
    S: float,
    method: SolverMethod = "exact",
    base: float = 2.0,
    starts: int = DEFAULT_MULTISTART_STARTS,
    seed: int = DEFAULT_MULTISTART_SEED,
    resolution: Optional[float] = None,
) -> Tuple[float, Channel]:
    """
    Minimize the block output entropy when the probability that the
    per-symbol distortion exceeds D is at most eps, and the variational
    distance between the block laws is at most S.

    :param p_xn: block pmf
    :param delta_n: block distortion, per-symbol values are delta_n / block_length
    :param D: per-symbol distortion threshold
    :param eps: allowed excess probability in [0, 1], 1 makes the
        distortion constraint vacuous
    :param S: perception level in [0, 1]
    :return: per-symbol entropy and a channel attaining it
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], given {eps}")
    if delta_n.size != len(p_xn):
        raise AlphabetMismatchError(
            f"distortion matrix has size {delta_n.size}, pmf has {len(p_xn)} labels"
        )
    excess = (delta_n.matrix / delta_n.block_length > D + 1e-12).astype(numpy.float64)
    return _minimize(
        p_xn,
        excess,
        eps,
        S,
        method,
        delta_n.block_length,
        base,
        starts,
        seed,
        resolution,
    )


def mixture_upper_bound(p_xn: Pmf, q_yn: Pmf, S: float, base: float = 2.0) -> float:
    """
    Entropy of the mixture (1 - S) P + S Q, a reconstruction law within
    variational distance S of P

    :param p_xn: source law
    :param q_yn: law mixed in, on the same support
    :param S: mixing weight in [0, 1]
    :param base: logarithm base
    :return: entropy of the mixture
    """
    if not 0.0 <= S <= 1.0:
        raise ValueError(f"S must be in [0, 1], given {S}")
    if p_xn.support != q_yn.support:
        raise AlphabetMismatchError(
            f"supports differ: {p_xn.support} and {q_yn.support}"
        )
    mixture = Pmf(p_xn.support, (1.0 - S) * p_xn.probs + S * q_yn.probs)
    value = entropy(mixture, base)

    ceiling = (
        (1.0 - S) * entropy(p_xn, base)
        + S * entropy(q_yn, base)
        + binary_entropy(S, base)
    )
    if value > ceiling + 1e-9 or tv_distance(mixture, p_xn) > S + 1e-12:
        raise RuntimeError(
            f"mixture entropy {value} breaks the concavity bound {ceiling}"
        )
    return value
