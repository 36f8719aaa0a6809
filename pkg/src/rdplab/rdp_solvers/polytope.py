"""
The feasible set of reconstruction laws written over joint variables
pi(x, y) = p(x) W(y|x): fixed input marginal, one linear cost budget and a
variational distance bound on the output marginal.

The output entropy depends on the channel only through q(y) = sum_x pi(x, y),
so the exact solver works on the set of reachable output laws. That set is
cut out of the simplex by the variational distance rows and by one row per
vertex of the transport dual {u(x) + v(y) <= cost(x, y)}, since the cheapest
coupling of p and q costs the largest u . p + v . q over those vertices.
Among the optimal output laws the channel is fixed by a lexicographic
sequence of linear programs.
"""

import itertools
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy
from scipy import sparse
from scipy.optimize import linprog

from rdplab.source_models import entropy_nats

__all__ = ["JointPolytope", "VERTEX_FEASIBILITY_TOL"]

VERTEX_FEASIBILITY_TOL = 1e-9
_DET_TOL = 1e-10
_VERTEX_CHUNK = 20_000
_TIE_TOL = 1e-12
_LEX_TOL = 1e-12


def _active_set_vertices(
    equalities: numpy.ndarray,
    targets: numpy.ndarray,
    inequalities: numpy.ndarray,
    bounds: numpy.ndarray,
) -> Iterator[numpy.ndarray]:
    """
    Yield, chunk by chunk, the feasible points where the equalities and a
    nonsingular choice of inequalities hold with equality.

    :param equalities: (e, n) equality rows
    :param targets: (e,) right-hand side of the equalities
    :param inequalities: (m, n) rows of A z <= b
    :param bounds: (m,) right-hand side b
    :return: iterator of (k, n) arrays of vertices
    """
    needed = inequalities.shape[1] - equalities.shape[0]
    combos = itertools.combinations(range(inequalities.shape[0]), needed)
    while True:
        batch = list(itertools.islice(combos, _VERTEX_CHUNK))
        if not batch:
            break
        chunk = numpy.array(batch, dtype=numpy.intp).reshape(len(batch), needed)
        count = chunk.shape[0]
        systems = numpy.concatenate(
            [
                numpy.broadcast_to(equalities, (count,) + equalities.shape),
                inequalities[chunk],
            ],
            axis=1,
        )
        rhs = numpy.concatenate(
            [numpy.broadcast_to(targets, (count, targets.shape[0])), bounds[chunk]],
            axis=1,
        )
        regular = numpy.abs(numpy.linalg.det(systems)) > _DET_TOL
        if not numpy.any(regular):
            continue
        points = numpy.linalg.solve(systems[regular], rhs[regular][..., None])[..., 0]
        slack = inequalities @ points.T - bounds[:, None]
        feasible = numpy.all(slack <= VERTEX_FEASIBILITY_TOL, axis=0)
        if numpy.any(feasible):
            yield points[feasible]


def _normalized(
    rows: numpy.ndarray, bounds: numpy.ndarray
) -> Optional[Tuple[numpy.ndarray, numpy.ndarray]]:
    """
    Scale every row to unit max norm. All-zero rows are dropped, or make the
    whole system infeasible when their bound is negative.
    """
    scale = numpy.abs(rows).max(axis=1)
    keep = scale > 0
    if numpy.any(bounds[~keep] < -VERTEX_FEASIBILITY_TOL):
        return None
    return rows[keep] / scale[keep, None], bounds[keep] / scale[keep]


@dataclass(frozen=True, eq=False)
class JointPolytope:
    """
    {pi >= 0 : sum_y pi(x, y) = p(x), cost . pi <= budget,
    (1/2) sum_y |q(y) - p(y)| <= S} with q(y) = sum_x pi(x, y)

    :param p: input marginal
    :param cost: per-pair cost, shape (size, size)
    :param budget: bound on the expected cost, math.inf for none
    :param S: bound on the variational distance of q from p
    """

    p: numpy.ndarray
    cost: numpy.ndarray
    budget: float
    S: float
    size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "size", self.p.shape[0])

    @property
    def dims(self) -> int:
        return self.size * self.size

    def row_sum_operator(self) -> numpy.ndarray:
        return numpy.kron(numpy.eye(self.size), numpy.ones((1, self.size)))

    def column_sum_operator(self) -> numpy.ndarray:
        return numpy.kron(numpy.ones((1, self.size)), numpy.eye(self.size))

    def to_channel_rows(self, joint: numpy.ndarray) -> numpy.ndarray:
        """
        :param joint: flattened joint variables
        :return: row-stochastic channel, identity rows where p(x) = 0
        """
        joint = numpy.clip(joint.reshape(self.size, self.size), 0.0, None)
        rows = numpy.eye(self.size)
        mass = joint.sum(axis=1)
        positive = self.p > 0
        rows[positive] = joint[positive] / mass[positive, None]
        return rows

    def output_entropy_nats(self, joint: numpy.ndarray) -> float:
        q = numpy.clip(joint.reshape(self.size, self.size).sum(axis=0), 0.0, None)
        return entropy_nats(q / q.sum())

    def contains(
        self, joint: numpy.ndarray, tol: float = VERTEX_FEASIBILITY_TOL
    ) -> bool:
        joint = joint.reshape(self.size, self.size)
        q = joint.sum(axis=0)
        return bool(
            numpy.all(joint >= -tol)
            and numpy.allclose(joint.sum(axis=1), self.p, atol=tol, rtol=0.0)
            and float(numpy.sum(joint * self.cost)) <= self.budget + tol
            and 0.5 * float(numpy.abs(q - self.p).sum()) <= self.S + tol
        )

    # exact solver

    def transport_halfspaces(self) -> Tuple[numpy.ndarray, numpy.ndarray]:
        """
        Rows v and bounds budget - u . p, one per distinct v among the vertices
        (u, v) of the transport dual pinned by v(0) = 0. An output law q is
        reachable within the budget iff v . q <= bound for every row.

        :return: (k, size) rows and (k,) bounds
        """
        size = self.size
        pairs = numpy.arange(self.dims)
        rows = numpy.zeros((self.dims, 2 * size - 1))
        rows[pairs, pairs // size] = 1.0
        shifted = pairs[pairs % size > 0]
        rows[shifted, size + shifted % size - 1] = 1.0

        duals = numpy.concatenate(
            list(
                _active_set_vertices(
                    numpy.empty((0, 2 * size - 1)),
                    numpy.empty(0),
                    rows,
                    self.cost.ravel(),
                )
            )
        )
        u = duals[:, :size]
        v = numpy.hstack([numpy.zeros((duals.shape[0], 1)), duals[:, size:]])
        bounds = self.budget - u @ self.p

        # keep the tightest bound of every distinct row
        unique, inverse = numpy.unique(numpy.round(v, 9), axis=0, return_inverse=True)
        tightest = numpy.full(unique.shape[0], numpy.inf)
        numpy.minimum.at(tightest, inverse.ravel(), bounds)
        return unique, tightest

    def output_vertices(self) -> numpy.ndarray:
        """
        :return: (k, size) extreme points of the set of output laws reachable
            within both constraints, k = 0 when the polytope is empty
        """
        size = self.size
        signs = numpy.array(list(itertools.product((-1.0, 1.0), repeat=size)))
        rows = [-numpy.eye(size), 0.5 * signs]
        bounds = [numpy.zeros(size), self.S + 0.5 * (signs @ self.p)]
        if numpy.isfinite(self.budget):
            transport_rows, transport_bounds = self.transport_halfspaces()
            rows.append(transport_rows)
            bounds.append(transport_bounds)

        system = _normalized(numpy.vstack(rows), numpy.concatenate(bounds))
        if system is None:
            return numpy.empty((0, size))
        found = list(
            _active_set_vertices(
                numpy.ones((1, size)), numpy.array([self.p.sum()]), *system
            )
        )
        if not found:
            return numpy.empty((0, size))
        points = numpy.clip(numpy.concatenate(found), 0.0, None)
        points = points / points.sum(axis=1, keepdims=True)
        return numpy.unique(numpy.round(points, 12), axis=0)

    def lexicographic_channel(self, q: numpy.ndarray) -> Optional[numpy.ndarray]:
        """
        Fix the joint variables one at a time, in row-major order, at their
        smallest value over the channels with output law q within the budget.

        :param q: output law to reach
        :return: channel rows, or None if q is out of reach
        """
        equal = numpy.vstack([self.row_sum_operator(), self.column_sum_operator()])
        targets = numpy.concatenate([self.p, q])
        upper: List[numpy.ndarray] = []
        upper_bounds: List[float] = []
        if numpy.isfinite(self.budget):
            upper.append(self.cost.ravel())
            upper_bounds.append(self.budget + VERTEX_FEASIBILITY_TOL)

        joint = None
        for index in numpy.flatnonzero(numpy.repeat(self.p > 0, self.size)):
            objective = numpy.zeros(self.dims)
            objective[index] = 1.0
            result = linprog(
                objective,
                A_ub=numpy.array(upper) if upper else None,
                b_ub=numpy.array(upper_bounds) if upper else None,
                A_eq=equal,
                b_eq=targets,
                bounds=(0, None),
                method="highs",
            )
            if result.status != 0:
                break
            joint = result.x
            upper.append(objective)
            upper_bounds.append(float(result.fun) + _LEX_TOL)

        return None if joint is None else self.to_channel_rows(joint)

    def minimize_entropy_over_vertices(self) -> Optional[Tuple[float, numpy.ndarray]]:
        """
        :return: (H in nats, channel rows) for the output law of least
            entropy, ties broken by the lexicographically smallest channel,
            or None if the polytope is empty
        """
        q = self.output_vertices()
        if not q.shape[0]:
            return None
        with numpy.errstate(divide="ignore", invalid="ignore"):
            terms = numpy.where(q > 0, q * numpy.log(q), 0.0)
        values = -terms.sum(axis=1) + 0.0
        lowest = float(values.min())

        tied = numpy.flatnonzero(values <= lowest + _TIE_TOL)
        candidates = [self.lexicographic_channel(q[idx]) for idx in tied]
        rows = [channel for channel in candidates if channel is not None]
        if not rows:
            return None
        return lowest, _lexicographic_min(rows)

    # linear programs

    def _lp_matrices(self):
        dims, size = self.dims, self.size
        columns = sparse.csr_matrix(self.column_sum_operator())
        slack = sparse.identity(size, format="csr")
        cost_row = sparse.csr_matrix(self.cost.reshape(1, -1))
        slack_row = sparse.csr_matrix(numpy.ones((1, size)))
        upper = sparse.vstack(
            [
                sparse.hstack([cost_row, sparse.csr_matrix((1, size))]),
                sparse.hstack([columns, -slack]),
                sparse.hstack([-columns, -slack]),
                sparse.hstack([sparse.csr_matrix((1, dims)), slack_row]),
            ],
            format="csr",
        )
        upper_bounds = numpy.concatenate(
            [[self.budget], self.p, -self.p, [2.0 * self.S]]
        )
        rows = sparse.csr_matrix(self.row_sum_operator())
        equal = sparse.hstack([rows, sparse.csr_matrix((size, size))], format="csr")
        return upper, upper_bounds, equal

    def linear_minimum(self, objective: numpy.ndarray) -> Optional[numpy.ndarray]:
        """
        :param objective: linear cost over the flattened joint variables
        :return: a minimizing vertex, or None if the polytope is empty
        """
        upper, upper_bounds, equal = self._lp_matrices()
        result = linprog(
            numpy.concatenate([objective, numpy.zeros(self.size)]),
            A_ub=upper,
            b_ub=upper_bounds,
            A_eq=equal,
            b_eq=self.p,
            bounds=(0, None),
            method="highs",
        )
        if result.status != 0:
            return None
        return numpy.clip(result.x[: self.dims], 0.0, None)


def _lexicographic_min(rows_list) -> numpy.ndarray:
    keys = [tuple(numpy.round(rows, 12).ravel()) for rows in rows_list]
    return rows_list[min(range(len(keys)), key=keys.__getitem__)]
