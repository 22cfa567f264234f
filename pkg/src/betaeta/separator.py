"""Separating contexts for unequal product-free terms.

Given provably unequal terms, the pipeline collapses all atoms to a
single one, closes over the shared free variables, searches the finite
hierarchies for distinguishing argument elements, replaces every atom by
a numeral type high enough to define those elements, applies the
defining terms, lowers the resulting numerals down to level zero two
levels at a time, and finally instantiates the remaining atom with the
target type so that the two closed contexts send the pair to any chosen
targets c and d.

The output is a replayable certificate: the type-instances, the bound
variables, the ordered head arguments, the model witness and the level.
Verification reconstructs both applied sides and decides the two target
equalities by normalization alone, independently of the search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EqualTerms, IllTyped, NotSeparable, TypeMismatch
from . import models as M
from . import numerals as N
from . import syntax as S
from .normalize import decide_eq
from .syntax import Context, Term, Ty, atom, numeral_type, subst_type


@dataclass
class SeparationCertificate:
    a_source: Term
    b_source: Term
    a_prime: Term
    b_prime: Term
    bound_vars: list[tuple[str, Ty]]
    head_args: list[Term]
    target_c: Term
    target_d: Term
    target_ctx: Context
    level: int
    base: int
    model_args: list[tuple[Ty, int]]
    relabeling: list[int]
    two_valued: bool = False
    kappa_values: list[int] = field(default_factory=list)

    def applied(self, side: str) -> Term:
        """The closed context of one side applied to all head arguments."""
        body = self.a_prime if side == "a" else self.b_prime
        frees = [S.free(name, ty) for name, ty in self.bound_vars]
        return S.apps(S.bind(body, *frees), *self.head_args)


def _ordered_free_union(a: Term, b: Term) -> list[tuple[str, Ty]]:
    out = list(S.free_vars(a).items())
    seen = {name for name, _ in out}
    for name, ty in S.free_vars(b).items():
        if name not in seen:
            out.append((name, ty))
    return out


def _even_at_least(n: int) -> int:
    return n if n % 2 == 0 else n + 1


def separate(a: Term, b: Term, c: Term, d: Term, max_base: int = 3,
             level_override: int | None = None,
             self_check: bool = True) -> SeparationCertificate:
    """Build a certificate witnessing contexts that send ``a`` to ``c``
    and ``b`` to ``d``.

    Raises EqualTerms when the pair is provably equal and NotSeparable
    when no hierarchy of base up to ``max_base`` tells the values apart.
    """
    if a.ty is not b.ty:
        raise TypeMismatch("the terms to separate must share a type")
    if c.ty is not d.ty:
        raise TypeMismatch("the two targets must share a type")
    if not (S.is_product_free(a.ty) and S.is_product_free(b.ty)):
        raise IllTyped("separation works on product-free terms")
    if decide_eq(a, b):
        raise EqualTerms("the terms are provably equal")

    p = atom("p")
    all_atoms = S.term_atoms(a) | S.term_atoms(b)
    collapse = {name: p for name in all_atoms}
    a1 = S.substitute_types(a, collapse)
    b1 = S.substitute_types(b, collapse)

    bound = _ordered_free_union(a1, b1)
    frees = [S.free(name, ty) for name, ty in bound]
    a2 = S.bind(a1, *frees)
    b2 = S.bind(b1, *frees)

    found = M.distinguish(a2, b2, max_base)
    if found is None:
        raise NotSeparable(max_base)

    kappas = [M.kappa(phi) for phi in found.args]
    level = _even_at_least(max(kappas, default=0))
    if level_override is not None:
        if level_override < level:
            raise ValueError(f"level override {level_override} is below the minimum {level}")
        level = level_override

    definers = [M.define_functional(phi, level) for phi in found.args]
    lowerings: list[Term] = []
    for j in range(level, 0, -2):
        lowerings.extend(N.lowering_pair(j))

    if self_check:
        ni = numeral_type(level)
        a2i = S.substitute_types(a2, {"p": ni})
        b2i = S.substitute_types(b2, {"p": ni})
        if not decide_eq(S.apps(a2i, *definers), N.church(0, level)):
            raise AssertionError("intermediate stage: a-side is not the zero numeral")
        if not decide_eq(S.apps(b2i, *definers), N.church(1, level)):
            raise AssertionError("intermediate stage: b-side is not the one numeral")

    target_ty = c.ty
    instance = subst_type(numeral_type(level), {"p": target_ty})
    final_sub = {name: instance for name in all_atoms}
    at_target = {"p": target_ty}

    a_prime = S.substitute_types(a, final_sub)
    b_prime = S.substitute_types(b, final_sub)
    # bound variable types are still at the collapsed base level, so they
    # take the composite substitution; the definers and lowerings are
    # already at numeral level and only trade their atom for the target
    bound_inst = [(name, subst_type(ty, {"p": instance})) for name, ty in bound]
    head_args = [S.substitute_types(h, at_target) for h in definers + lowerings]
    head_args.append(S.lam(target_ty, d))
    head_args.append(c)

    # just the variables the targets actually use; bound variables of the
    # sources may reuse names at their instantiated types
    target_ctx = Context({**S.free_vars(c), **S.free_vars(d)}.items())

    return SeparationCertificate(
        a_source=a, b_source=b,
        a_prime=a_prime, b_prime=b_prime,
        bound_vars=bound_inst,
        head_args=head_args,
        target_c=c, target_d=d,
        target_ctx=target_ctx,
        level=level,
        base=found.base,
        model_args=[(phi.ty, phi.code) for phi in found.args],
        relabeling=found.relabeling,
        kappa_values=kappas,
    )


def separate_two(a: Term, b: Term, max_base: int = 3,
                 level_override: int | None = None,
                 self_check: bool = True) -> SeparationCertificate:
    """Two-valued form: the context's head arguments are all closed and
    the applied sides are the two projections, so for any e and f of a
    common type the contexts send ``a`` to e and ``b`` to f."""
    p = atom("p")
    x = S.fresh_free("x", p)
    y = S.fresh_free("y", p)
    first = S.bind(x, x, y)
    second = S.bind(y, x, y)
    cert = separate(a, b, first, second, max_base=max_base,
                    level_override=level_override, self_check=self_check)
    cert.two_valued = True
    return cert


def verify(cert: SeparationCertificate) -> bool:
    """Replay a certificate using normalization only: both applied sides
    must equal their targets; a two-valued certificate must additionally
    project correctly on fresh slot variables."""
    try:
        lhs_a = cert.applied("a")
        lhs_b = cert.applied("b")
        if lhs_a.ty is not cert.target_c.ty:
            raise IllTyped("the applied context and the target differ in type")
        ok = decide_eq(lhs_a, cert.target_c) and decide_eq(lhs_b, cert.target_d)
        if not ok:
            return False
        if cert.two_valued:
            p = atom("p")
            e = S.free("e'", p)
            f = S.free("f'", p)
            if not decide_eq(S.apps(lhs_a, e, f), e):
                return False
            if not decide_eq(S.apps(lhs_b, e, f), f):
                return False
        return True
    except (TypeMismatch, S.UnboundVariable):
        raise IllTyped("malformed certificate")


def match_type_instance(general: Ty, instance: Ty, sub: dict[str, Ty]) -> bool:
    """Whether ``instance`` is obtained from ``general`` by a (consistent)
    substitution of types for atoms, extending ``sub`` in place."""
    if isinstance(general, S.TyAtom):
        bound = sub.get(general.name)
        if bound is None:
            sub[general.name] = instance
            return True
        return bound is instance
    if isinstance(general, S.TyTerminal):
        return general is instance
    if isinstance(general, S.TyArrow):
        return (isinstance(instance, S.TyArrow)
                and match_type_instance(general.dom, instance.dom, sub)
                and match_type_instance(general.cod, instance.cod, sub))
    return (isinstance(instance, S.TyProd)
            and match_type_instance(general.left, instance.left, sub)
            and match_type_instance(general.right, instance.right, sub))


def is_type_instance(general: Term, instance: Term, sub: dict[str, Ty] | None = None) -> bool:
    """Whether ``instance`` is a type-instance of ``general``: same term
    skeleton, types related by one atom substitution."""
    if sub is None:
        sub = {}

    def go(g, t):
        if type(g) is not type(t):
            return False
        if isinstance(g, S.Var):
            return g.index == t.index and match_type_instance(g.ty, t.ty, sub)
        if isinstance(g, S.Free):
            return g.name == t.name and match_type_instance(g.ty, t.ty, sub)
        if isinstance(g, S.Lam):
            return match_type_instance(g.binder, t.binder, sub) and go(g.body, t.body)
        if isinstance(g, S.App):
            return go(g.fun, t.fun) and go(g.arg, t.arg)
        if isinstance(g, S.Pair):
            return go(g.fst, t.fst) and go(g.snd, t.snd)
        if isinstance(g, (S.Proj1, S.Proj2)):
            return go(g.arg, t.arg)
        return True

    return go(general, instance)
