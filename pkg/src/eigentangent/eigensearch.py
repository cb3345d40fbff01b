"""Search for rational Hecke eigen-systems in an exact symbol space.

Used to produce the shipped eigen-data: every system is certified by an
exact kernel computation, and a system is reported only when it cuts out
a one-dimensional eigenspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import ratlinalg


@dataclass
class Operator:
    label: str
    apply: Callable[[list], list]  # flattened symbol values -> flattened values
    candidates: Sequence[int]


def operator_matrix(basis: list[list[Fraction]], free: list[int], apply) -> list[list[Fraction]]:
    """Matrix of an operator in the coordinates given by the free columns."""
    cols = [[Fraction(x) for x in (apply(v)[f] for f in free)] for v in basis]
    n = len(basis)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def rational_eigensystems(basis, free, operators: list[Operator], max_dim: int = 1):
    """Joint rational eigen-systems of ``operators`` with eigenspace dimension at most ``max_dim``.

    Returns a list of ``(eigenvalues: dict label -> int, dimension)``.
    """
    n = len(basis)
    mats = [operator_matrix(basis, free, op.apply) for op in operators]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    found = [({}, ident)]  # W: n x r, columns span the joint eigenspace
    for op, A in zip(operators, mats):
        nxt = []
        for ev, W in found:
            AW = ratlinalg.matmul(A, W)
            r = len(W[0])
            for a in op.candidates:
                M = [[AW[i][j] - a * W[i][j] for j in range(r)] for i in range(n)]
                ker = ratlinalg.kernel(M, r)
                if ker:
                    X = [[ker[c][i] for c in range(len(ker))] for i in range(r)]
                    nxt.append((dict(ev, **{op.label: a}), ratlinalg.matmul(W, X)))
        found = nxt
    return [(ev, len(W[0])) for ev, W in found if len(W[0]) <= max_dim]
