"""Finite full type hierarchies over an initial segment {0, ..., h-1}
of the naturals, evaluation of product-free terms in them, a search for
a hierarchy separating two closed terms, and the construction of closed
terms that provably define any hierarchy element at a high enough
numeral level.

Elements are canonically encoded: an element of P is its own code, and
an element of A -> B is the base-|B| numeral whose digit at position
``code(x)`` is ``code(f(x))``, least significant digit first.  With that
encoding application is digit extraction, and whole tables only ever
get materialized on demand, so evaluation of a lambda stays lazy until
one of its values is used as an argument to a table.

The defining-term construction tells the branches of a function apart
by a product of primes raised to the function's outputs; the branch
enumeration order is part of the certificate format and is fixed here
as: constant functions first, ordered by their constant value's code,
then the remaining elements ordered by big-endian table code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import IllTyped, LevelTooSmall, Overflow, TypeMismatch, UnboundVariable
from . import numerals as N
from . import syntax as S
from .normalize import decide_eq
from .syntax import (
    App, Free, Lam, Term, Ty, TyArrow, TyAtom, Var,
    numeral_type, split_arrows, subst_type,
)

CARD_CAP = 1 << 63
ENUM_CAP = 1 << 20
TUPLE_CAP = 1 << 22

_PRIMES = [2, 3, 5, 7, 11, 13]


def nth_prime(n: int) -> int:
    """The n-th prime, 1-indexed."""
    while len(_PRIMES) < n:
        c = _PRIMES[-1] + 2
        while any(c % p == 0 for p in _PRIMES if p * p <= c):
            c += 2
        _PRIMES.append(c)
    return _PRIMES[n - 1]


class PModel:
    """The full type hierarchy over a base of ``base`` elements."""

    def __init__(self, base: int):
        if base < 2:
            raise ValueError("model base must be at least 2")
        self.base = base
        self._card: dict[int, int] = {}

    def card(self, ty: Ty) -> int:
        hit = self._card.get(ty.uid)
        if hit is not None:
            return hit
        if isinstance(ty, TyAtom):
            n = self.base
        elif isinstance(ty, TyArrow):
            cd = self.card(ty.cod)
            cc = self.card(ty.dom)
            if cc * (cd.bit_length() - 1) > 64 and cd > 1:
                raise Overflow(f"cardinality of {S.show_type(ty)} exceeds the cap")
            n = cd ** cc
            if n > CARD_CAP:
                raise Overflow(f"cardinality of {S.show_type(ty)} exceeds the cap")
        else:
            raise IllTyped("hierarchy types are built from atoms and arrows only")
        self._card[ty.uid] = n
        return n

    def functional(self, ty: Ty, code: int) -> "Functional":
        if not 0 <= code < self.card(ty):
            raise ValueError(f"code {code} out of range for {S.show_type(ty)}")
        return Functional(self, ty, code)

    def enum(self, ty: Ty):
        """All elements of the given hierarchy type in code order."""
        n = self.card(ty)
        if n > ENUM_CAP:
            raise Overflow(f"refusing to enumerate {n} elements of {S.show_type(ty)}")
        return (Functional(self, ty, c) for c in range(n))

    def __repr__(self):
        return f"PModel(base={self.base})"


class Functional:
    """A hierarchy element as its canonical code."""

    __slots__ = ("model", "ty", "code")

    def __init__(self, model: PModel, ty: Ty, code: int):
        self.model = model
        self.ty = ty
        self.code = code

    def table(self) -> list[int]:
        if not isinstance(self.ty, TyArrow):
            raise IllTyped("only a function element has a table")
        dom_n = self.model.card(self.ty.dom)
        cod_n = self.model.card(self.ty.cod)
        out = []
        c = self.code
        for _ in range(dom_n):
            out.append(c % cod_n)
            c //= cod_n
        return out

    def __call__(self, arg: "Functional | MClosure") -> "Functional":
        if not isinstance(self.ty, TyArrow):
            raise IllTyped("cannot apply a base element")
        arg = materialize(arg)
        if arg.ty is not self.ty.dom:
            raise TypeMismatch("argument type does not match the function's domain")
        cod_n = self.model.card(self.ty.cod)
        digit = (self.code // (cod_n ** arg.code)) % cod_n
        return Functional(self.model, self.ty.cod, digit)

    def __eq__(self, other):
        return (isinstance(other, Functional) and self.model.base == other.model.base
                and self.ty is other.ty and self.code == other.code)

    def __hash__(self):
        return hash((self.model.base, self.ty.uid, self.code))

    def __repr__(self):
        return f"Functional({S.show_type(self.ty)}, {self.code})"


def from_table(model: PModel, ty: TyArrow, digits: list[int]) -> Functional:
    cod_n = model.card(ty.cod)
    code = 0
    for d in reversed(digits):
        code = code * cod_n + d
    return Functional(model, ty, code)


class MClosure:
    """A lazy semantic function: applies without materializing a table."""

    __slots__ = ("model", "ty", "fn")

    def __init__(self, model, ty, fn):
        self.model = model
        self.ty = ty
        self.fn = fn

    def __call__(self, arg):
        return self.fn(arg)


def materialize(v) -> Functional:
    """Force a lazy value into its coded form (may enumerate the domain)."""
    if isinstance(v, Functional):
        return v
    dom = v.ty.dom
    digits = [materialize(v.fn(x)).code for x in v.model.enum(dom)]
    return from_table(v.model, v.ty, digits)


def m_apply(f, a):
    return f(a)


# ---------------------------------------------------------------------------
# Evaluation

Assignment = dict  # variable name -> Functional


def eval_term(a: Term, model: PModel, assignment: Assignment | None = None):
    """The unique compositional value of a product-free term: variables
    from the assignment, application pointwise, abstraction as the
    function sending each element to the value of the body under the
    extended assignment."""
    assignment = assignment or {}

    def go(t, env):
        cls = type(t)
        if cls is Var:
            return env[-1 - t.index]
        if cls is Free:
            val = assignment.get(t.name)
            if val is None:
                raise UnboundVariable(f"no assignment for '{t.name}'")
            if materialize(val).ty is not t.ty:
                raise TypeMismatch(f"assignment for '{t.name}' has the wrong type")
            return val
        if cls is Lam:
            return MClosure(model, t.ty, lambda arg, _t=t, _env=env: go(_t.body, (*_env, arg)))
        if cls is App:
            return m_apply(go(t.fun, env), go(t.arg, env))
        raise IllTyped("hierarchy evaluation is defined for product-free terms only")

    return go(a, ())


def eval_closed(a: Term, model: PModel) -> Functional:
    return materialize(eval_term(a, model))


# ---------------------------------------------------------------------------
# Distinguishing-model search

@dataclass
class Distinguished:
    base: int
    model: PModel
    args: list[Functional]
    relabeling: list[int]


def _relabel_perm(base: int, ra: int, rb: int) -> list[int]:
    """A permutation of {0..base-1} sending ra to 0 and rb to 1, identity
    beyond the swaps needed."""
    perm = list(range(base))

    def send(src, dst):
        cur = perm.index(dst)
        perm[src], perm[cur] = perm[cur], perm[src]

    send(ra, 0)
    send(rb, 1)
    return perm


def transport(phi: Functional, perm: list[int], inv: list[int]) -> Functional:
    """Rename the base elements of a hierarchy element along ``perm``."""
    model = phi.model
    if isinstance(phi.ty, TyAtom):
        return Functional(model, phi.ty, perm[phi.code])
    digits = []
    for x_new in model.enum(phi.ty.dom):
        x_old = transport(x_new, inv, perm)
        y_new = transport(phi(x_old), perm, inv)
        digits.append(y_new.code)
    return from_table(model, phi.ty, digits)


def distinguish(a: Term, b: Term, max_base: int,
                tuple_cap: int = TUPLE_CAP) -> Distinguished | None:
    """Search the hierarchies of base 2..max_base for argument elements
    on which the values of ``a`` and ``b`` differ.  The witness comes
    back relabeled so the two observed base values are 0 (for a) and 1
    (for b).  Returns None when every searched hierarchy agrees."""
    if a.ty is not b.ty:
        raise TypeMismatch("terms to distinguish must share a type")
    if S.free_vars(a) or S.free_vars(b):
        raise IllTyped("terms to distinguish must be closed")
    arg_tys, result = split_arrows(a.ty)
    if not isinstance(result, TyAtom):
        raise IllTyped("the result type must be an atom")

    for base in range(2, max_base + 1):
        model = PModel(base)
        total = 1
        for ty in arg_tys:
            total *= model.card(ty)
        if total > tuple_cap:
            raise Overflow(f"argument search space of {total} tuples exceeds the cap")
        va = eval_term(a, model)
        vb = eval_term(b, model)
        ranges = [range(model.card(ty)) for ty in arg_tys]
        for combo in itertools.product(*ranges):
            args = [model.functional(ty, c) for ty, c in zip(arg_tys, combo)]
            ra = va
            rb = vb
            for arg in args:
                ra = m_apply(ra, arg)
                rb = m_apply(rb, arg)
            ra = materialize(ra).code
            rb = materialize(rb).code
            if ra != rb:
                perm = _relabel_perm(base, ra, rb)
                inv = [0] * base
                for src, dst in enumerate(perm):
                    inv[dst] = src
                new_args = [transport(arg, perm, inv) for arg in args]
                _check_relabeled(a, b, model, new_args)
                return Distinguished(base, model, new_args, perm)
    return None


def _check_relabeled(a, b, model, args):
    for term, want in ((a, 0), (b, 1)):
        v = eval_term(term, model)
        for arg in args:
            v = m_apply(v, arg)
        if materialize(v).code != want:
            raise AssertionError("relabeled witness failed to re-evaluate")


# ---------------------------------------------------------------------------
# Branch enumeration and prime coding

def _is_constant(phi: Functional) -> int | None:
    """The common output code if ``phi`` ignores its argument, else None."""
    tab = phi.table()
    return tab[0] if all(d == tab[0] for d in tab) else None


def _big_endian(phi: Functional) -> int:
    cod_n = phi.model.card(phi.ty.cod)
    code = 0
    for d in phi.table():
        code = code * cod_n + d
    return code


def branch_order(model: PModel, ty: Ty) -> list[Functional]:
    """Domain enumeration used by the defining-term construction."""
    if isinstance(ty, TyAtom):
        return list(model.enum(ty))

    def key(phi):
        const = _is_constant(phi)
        if const is not None:
            return (0, const)
        return (1, _big_endian(phi))

    return sorted(model.enum(ty), key=key)


def branch_codes(phi: Functional) -> list[int]:
    """The prime-product codes, one per branch of the first argument, in
    branch order.  Injective: distinct branches get distinct codes."""
    if isinstance(phi.ty, TyAtom):
        raise IllTyped("base elements have no branches")
    model = phi.model
    b1 = phi.ty.dom
    if isinstance(b1, TyAtom):
        codes = [_pow_capped(2, psi.code) for psi in branch_order(model, b1)]
    else:
        gamma_tys, _ = split_arrows(b1)
        tuple_space = list(itertools.product(*(list(model.enum(t)) for t in gamma_tys)))
        codes = []
        for psi in branch_order(model, b1):
            n = 1
            for t_idx, gammas in enumerate(tuple_space, start=1):
                d = psi
                for g in gammas:
                    d = d(g)
                n = _mul_capped(n, _pow_capped(nth_prime(t_idx), d.code))
            codes.append(n)
    if len(set(codes)) != len(codes):
        raise AssertionError("branch codes must be pairwise distinct")
    return codes


def _pow_capped(base, e):
    out = base ** e
    if out > CARD_CAP:
        raise Overflow("branch code exceeds the cap")
    return out


def _mul_capped(a, b):
    out = a * b
    if out > CARD_CAP:
        raise Overflow("branch code exceeds the cap")
    return out


_KAPPA_MEMO: dict = {}


def kappa(phi: Functional) -> int:
    """The least numeral level at which the defining-term construction
    for ``phi`` is valid."""
    key = (phi.model.base, phi.ty.uid, phi.code)
    hit = _KAPPA_MEMO.get(key)
    if hit is not None:
        return hit
    if isinstance(phi.ty, TyAtom):
        _KAPPA_MEMO[key] = 0
        return 0
    model = phi.model
    b1 = phi.ty.dom
    level = 3 * max(branch_codes(phi)) + 1
    if not isinstance(b1, TyAtom):
        gamma_tys, _ = split_arrows(b1)
        for t in gamma_tys:
            for g in model.enum(t):
                level = max(level, kappa(g))
    for psi in branch_order(model, b1):
        level = max(level, kappa(phi(psi)))
    _KAPPA_MEMO[key] = level
    return level


# ---------------------------------------------------------------------------
# Defining terms

def _the_atom(ty: Ty) -> str:
    atoms = S.type_atoms(ty)
    if len(atoms) != 1:
        raise IllTyped("hierarchy types must be built over a single atom")
    return next(iter(atoms))


def instance_type(ty: Ty, i: int) -> Ty:
    """The type obtained by substituting the level-i numeral type for the
    hierarchy atom."""
    return subst_type(ty, {_the_atom(ty): numeral_type(i)})


def define_functional(phi: Functional, i: int) -> Term:
    """A closed term of the numeral-instantiated type that provably
    defines ``phi`` whenever ``i`` is at least kappa(phi).

    A base element is its numeral.  For a function, the first argument
    is probed by a product of prime powers whose exponents are the
    argument's outputs on every tuple over its own argument types; a
    chain of conditionals compares the probe against each branch code
    and returns the defining term of the corresponding output.
    """
    model = phi.model
    if isinstance(phi.ty, TyAtom):
        return N.church(phi.code, i)
    k_level = kappa(phi)
    if i < k_level:
        raise LevelTooSmall(f"level {i} is below kappa = {k_level}")

    arg_tys, _ = split_arrows(phi.ty)
    b1 = arg_tys[0]
    psis = branch_order(model, b1)
    xis = [phi(psi) for psi in psis]
    q = len(psis)

    xs = [S.fresh_free(f"x{t + 1}", instance_type(ty, i)) for t, ty in enumerate(arg_tys)]
    rest = xs[1:]

    def applied_definer(xi):
        return S.apps(define_functional(xi, i), *rest)

    if q == 1:
        return S.bind(applied_definer(xis[0]), *xs)

    codes = branch_codes(phi)

    # probe term: exponent product over all argument tuples of the first
    # argument's own argument types, one prime per tuple
    x1 = xs[0]
    if isinstance(b1, TyAtom):
        probe = S.apps(N.expo(i - 1), x1, N.church(2, i))
    else:
        gamma_tys, _ = split_arrows(b1)
        tuple_space = list(itertools.product(*(list(model.enum(t)) for t in gamma_tys)))
        factors = []
        for t_idx, gammas in enumerate(tuple_space, start=1):
            applied = S.apps(x1, *(define_functional(g, i) for g in gammas))
            factors.append(S.apps(N.expo(i - 1), applied, N.church(nth_prime(t_idx), i)))
        probe = factors[0]
        for f in factors[1:]:
            probe = S.apps(N.mul(i - 1), probe, f)

    body = applied_definer(xis[q - 1])
    for j in range(q - 2, -1, -1):
        test = S.app(N.raise_one(i), S.app(N.check(codes[j], i - 1), probe))
        body = S.apps(N.cond(i), test, applied_definer(xis[j]), body)
    return S.bind(body, *xs)


def i_defines_check(a: Term, phi: Functional, i: int, depth: int) -> bool:
    """Whether ``a`` provably defines ``phi`` at level ``i``: at the base
    it must equal the numeral for phi; at a function type, applying it to
    the defining term of each domain element must define the output, to
    the given recursion depth."""
    model = phi.model
    if isinstance(phi.ty, TyAtom):
        return decide_eq(a, N.church(phi.code, i))
    if depth <= 0:
        return True
    for psi in model.enum(phi.ty.dom):
        if i < kappa(psi):
            raise LevelTooSmall(
                f"level {i} is below kappa of a domain element ({kappa(psi)})")
        witness = define_functional(psi, i)
        if not i_defines_check(S.app(a, witness), phi(psi), i, depth - 1):
            return False
    return True


def min_check_level(phi: Functional) -> int:
    """A level high enough to run i_defines_check on ``phi`` with full
    recursion depth."""
    level = kappa(phi)
    if isinstance(phi.ty, TyArrow):
        for psi in phi.model.enum(phi.ty.dom):
            level = max(level, min_check_level(psi), min_check_level(phi(psi)))
    return level


def type_order(ty: Ty) -> int:
    """Arrow-nesting depth; bounds the recursion needed by the check."""
    if isinstance(ty, TyArrow):
        return max(type_order(ty.dom) + 1, type_order(ty.cod))
    return 0
