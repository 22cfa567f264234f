"""Shared random generators for property-style tests.

Closed product-free terms are grown type-directedly: arrows introduce a
binder, atoms apply a variable from scope to recursively generated
arguments.  Types for the product machinery mix atoms, the terminal
type, arrows and products under a node budget.
"""

import random

import pytest

from betaeta import syntax as S
from betaeta.syntax import Term, Ty, TyArrow, TyAtom


def gen_closed_term(ty: Ty, rng: random.Random, fuel: int = 3) -> Term:
    """A random closed term of the given product-free type."""

    def go(ty, scope, fuel):
        if isinstance(ty, TyArrow):
            v = S.fresh_free("v", ty.dom)
            body = go(ty.cod, scope + [v], fuel)
            return S.lam(ty.dom, S.abstract(body, v))
        # atom: apply some variable in scope through all its arguments
        if fuel > 0:
            candidates = [v for v in scope]
        else:
            candidates = [v for v in scope if v.ty is ty]
        if not candidates:
            candidates = [v for v in scope if v.ty is ty]
        head = rng.choice(candidates)
        args, result = S.split_arrows(head.ty)
        assert result is ty
        out = head
        for aty in args:
            out = S.app(out, go(aty, scope, fuel - 1))
        return out

    return go(ty, [], fuel)


def random_mixed_type(rng: random.Random, max_nodes: int = 30) -> Ty:
    """A random type over atoms, the terminal type, arrows and products."""

    def go(budget):
        if budget <= 2 or rng.random() < 0.35:
            return S.TERMINAL if rng.random() < 0.2 else S.atom(rng.choice("pqr"))
        left_budget = rng.randint(1, budget - 2)
        left = go(left_budget)
        right = go(budget - 1 - left_budget)
        return S.arrow(left, right) if rng.random() < 0.55 else S.prod(left, right)

    return go(rng.randint(2, max_nodes))


@pytest.fixture
def rng():
    return random.Random(20240817)


P = S.atom("p")

PRODUCT_FREE_ROSTER = (
    S.arrows(P, P, P),
    S.arrows(S.arrow(P, P), P, P),
    S.arrows(S.arrow(P, P), S.arrow(P, P), P, P),
    S.arrows(P, S.arrow(P, P), P),
)
