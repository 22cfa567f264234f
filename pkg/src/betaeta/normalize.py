"""Normalization and the decision procedure for beta-eta equality.

The engine evaluates terms into a semantic domain of closures and
neutrals and reads values back in eta-long form directed by the type.
Equality of two terms is decided by evaluating both and comparing the
values type-directedly, which walks the (small) shared beta-skeleton
instead of materializing eta-long trees that grow exponentially at
iterated arrow types.

Every value of terminal type reads back as the unit constant, so the
terminal equation holds definitionally.  A contracted normal form is
obtained from the long form by a maximal eta-contraction pass.  A plain
beta normal form (no eta in either direction) is available as a
diagnostic to exhibit equalities whose proofs genuinely need eta.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ResourceExhausted, TypeMismatch
from . import syntax as S
from .syntax import (
    App, Free, Lam, Pair, Proj1, Proj2, Term, Ty, TyArrow, TyProd,
    TyTerminal, UNIT, Var,
)

_WORK = [0]
_WORK_LIMIT = [500_000_000]


def set_work_budget(n: int | None):
    """Cap evaluation steps across normalization calls (None = unlimited)."""
    _WORK_LIMIT[0] = n
    _WORK[0] = 0


def _tick():
    _WORK[0] += 1
    limit = _WORK_LIMIT[0]
    if limit is not None and _WORK[0] > limit:
        _WORK[0] = 0
        raise ResourceExhausted(f"normalization exceeded {limit} steps")


# ---------------------------------------------------------------------------
# Semantic domain

class VClosure:
    __slots__ = ("env", "binder", "body", "lazy", "cache")

    def __init__(self, env, binder, body, lazy):
        self.env = env
        self.binder = binder
        self.body = body
        self.lazy = lazy
        # application results keyed by argument identity; the stored
        # argument reference keeps the id stable for the cache's lifetime
        self.cache = {}


class VPair:
    __slots__ = ("fst", "snd")

    def __init__(self, fst, snd):
        self.fst = fst
        self.snd = snd


class VUnit:
    __slots__ = ()


VUNIT = VUnit()


class VNe:
    __slots__ = ("ne", "ty")

    def __init__(self, ne, ty):
        self.ne = ne
        self.ty = ty


class VThunk:
    __slots__ = ("env", "term", "value")

    def __init__(self, env, term):
        self.env = env
        self.term = term
        self.value = None


class NVar:
    __slots__ = ("level", "ty")

    def __init__(self, level, ty):
        self.level = level
        self.ty = ty


class NFree:
    __slots__ = ("name", "ty")

    def __init__(self, name, ty):
        self.name = name
        self.ty = ty


class NApp:
    __slots__ = ("fn", "arg", "arg_ty")

    def __init__(self, fn, arg, arg_ty):
        self.fn = fn
        self.arg = arg
        self.arg_ty = arg_ty


class NProj:
    __slots__ = ("which", "arg")

    def __init__(self, which, arg):
        self.which = which
        self.arg = arg


def force(v):
    if type(v) is VThunk:
        if v.value is None:
            v.value = eval_term(v.term, v.env, lazy=True)
            v.env = v.term = None
        return v.value
    return v


def eval_term(t: Term, env: tuple, lazy: bool = False):
    _tick()
    cls = type(t)
    if cls is Var:
        return force(env[-1 - t.index])
    if cls is Free:
        return VNe(NFree(t.name, t.ty), t.ty)
    if cls is Lam:
        return VClosure(env, t.binder, t.body, lazy)
    if cls is App:
        f = eval_term(t.fun, env, lazy)
        a = VThunk(env, t.arg) if lazy else eval_term(t.arg, env, lazy)
        return apply_value(f, a)
    if cls is Pair:
        if lazy:
            return VPair(VThunk(env, t.fst), VThunk(env, t.snd))
        return VPair(eval_term(t.fst, env, lazy), eval_term(t.snd, env, lazy))
    if cls is Proj1:
        return do_proj(1, eval_term(t.arg, env, lazy))
    if cls is Proj2:
        return do_proj(2, eval_term(t.arg, env, lazy))
    return VUNIT


def apply_value(f, a):
    _tick()
    f = force(f)
    if type(f) is VClosure:
        key = id(a)
        hit = f.cache.get(key)
        if hit is not None:
            return hit[1]
        out = eval_term(f.body, f.env + (a,), f.lazy)
        f.cache[key] = (a, out)
        return out
    # neutral application: track the argument's type for later readback
    fty = f.ty
    return VNe(NApp(f.ne, a, fty.dom), fty.cod)


def do_proj(which, v):
    v = force(v)
    if type(v) is VPair:
        return force(v.fst if which == 1 else v.snd)
    ty = v.ty
    return VNe(NProj(which, v.ne), ty.left if which == 1 else ty.right)


# ---------------------------------------------------------------------------
# Readback

def _fresh(level, ty):
    return VNe(NVar(level, ty), ty)


def readback(v, ty: Ty, depth: int) -> Term:
    _tick()
    tcls = type(ty)
    if tcls is TyTerminal:
        return UNIT
    if tcls is TyArrow:
        body = readback(apply_value(v, _fresh(depth, ty.dom)), ty.cod, depth + 1)
        return S.lam(ty.dom, body)
    if tcls is TyProd:
        return S.pair(readback(do_proj(1, v), ty.left, depth),
                      readback(do_proj(2, v), ty.right, depth))
    return readback_ne(force(v).ne, depth)


def readback_ne(ne, depth: int) -> Term:
    cls = type(ne)
    if cls is NVar:
        return S.var(depth - 1 - ne.level, ne.ty)
    if cls is NFree:
        return S.free(ne.name, ne.ty)
    if cls is NApp:
        return S.app(readback_ne(ne.fn, depth), readback(ne.arg, ne.arg_ty, depth))
    inner = readback_ne(ne.arg, depth)
    return S.proj1(inner) if ne.which == 1 else S.proj2(inner)


def readback_beta(v, depth: int) -> Term:
    """Beta-normal readback: no eta-expansion and no terminal rule, so a
    lambda stays a lambda and nothing else grows one."""
    _tick()
    v = force(v)
    cls = type(v)
    if cls is VClosure:
        fresh = _fresh(depth, v.binder)
        return S.lam(v.binder, readback_beta(apply_value(v, fresh), depth + 1))
    if cls is VPair:
        return S.pair(readback_beta(force(v.fst), depth), readback_beta(force(v.snd), depth))
    if cls is VUnit:
        return UNIT
    ne = v.ne
    ncls = type(ne)
    if ncls is NVar:
        return S.var(depth - 1 - ne.level, ne.ty)
    if ncls is NFree:
        return S.free(ne.name, ne.ty)
    if ncls is NApp:
        return S.app(readback_beta(VNe(ne.fn, None), depth),
                     readback_beta(ne.arg, depth))
    inner = readback_beta(VNe(ne.arg, None), depth)
    return S.proj1(inner) if ne.which == 1 else S.proj2(inner)


# ---------------------------------------------------------------------------
# Type-directed value equality

def values_equal(u, v, ty: Ty, depth: int) -> bool:
    _tick()
    if u is v:
        # One value object denotes one element; this shortcut is what keeps
        # comparison linear when both sides get probed with the same fresh
        # neutral at iterated arrow types.
        return True
    tcls = type(ty)
    if tcls is TyTerminal:
        return True
    if tcls is TyArrow:
        fresh = _fresh(depth, ty.dom)
        return values_equal(apply_value(u, fresh), apply_value(v, fresh), ty.cod, depth + 1)
    if tcls is TyProd:
        return (values_equal(do_proj(1, u), do_proj(1, v), ty.left, depth)
                and values_equal(do_proj(2, u), do_proj(2, v), ty.right, depth))
    return _ne_equal(force(u).ne, force(v).ne, depth)


def _ne_equal(m, n, depth) -> bool:
    if m is n:
        return True
    cls = type(m)
    if cls is not type(n):
        return False
    if cls is NVar:
        return m.level == n.level and m.ty is n.ty
    if cls is NFree:
        return m.name == n.name and m.ty is n.ty
    if cls is NApp:
        if m.arg_ty is not n.arg_ty:
            return False
        return _ne_equal(m.fn, n.fn, depth) and values_equal(m.arg, n.arg, m.arg_ty, depth)
    return m.which == n.which and _ne_equal(m.arg, n.arg, depth)


# ---------------------------------------------------------------------------
# Eta contraction

def _occurs(t: Term, idx: int, _memo) -> bool:
    key = (t.uid, idx)
    hit = _memo.get(key)
    if hit is not None:
        return hit
    cls = type(t)
    if cls is Var:
        out = t.index == idx
    elif cls is Lam:
        out = _occurs(t.body, idx + 1, _memo)
    elif cls is App:
        out = _occurs(t.fun, idx, _memo) or _occurs(t.arg, idx, _memo)
    elif cls is Pair:
        out = _occurs(t.fst, idx, _memo) or _occurs(t.snd, idx, _memo)
    elif cls is Proj1 or cls is Proj2:
        out = _occurs(t.arg, idx, _memo)
    else:
        out = False
    _memo[key] = out
    return out


def eta_contract(t: Term) -> Term:
    """Maximal eta-contraction: drops trivial abstractions over
    applications and pairs of matching projections.  An abstraction at
    terminal type contracts whenever the bound slot is only fed a
    terminal-typed argument, since all such arguments are equal."""
    occ: dict = {}
    memo: dict = {}

    def go(u):
        hit = memo.get(u.uid)
        if hit is not None:
            return hit
        cls = type(u)
        if cls is Lam:
            out = S.lam(u.binder, go(u.body))
        elif cls is App:
            out = S.app(go(u.fun), go(u.arg))
        elif cls is Pair:
            out = S.pair(go(u.fst), go(u.snd))
        elif cls is Proj1:
            out = S.proj1(go(u.arg))
        elif cls is Proj2:
            out = S.proj2(go(u.arg))
        else:
            out = u
        while True:
            if type(out) is Lam and type(out.body) is App:
                fn, arg = out.body.fun, out.body.arg
                contractible = (
                    (type(arg) is Var and arg.index == 0)
                    or (type(out.binder) is TyTerminal and type(arg.ty) is TyTerminal)
                )
                if contractible and not _occurs(fn, 0, occ):
                    out = S.shift(fn, -1)
                    continue
            if (type(out) is Pair and type(out.fst) is Proj1
                    and type(out.snd) is Proj2 and out.fst.arg is out.snd.arg):
                out = out.fst.arg
                continue
            break
        memo[u.uid] = out
        return out

    prev = None
    while prev is not t:
        prev = t
        t = go(t)
        occ.clear()
        memo.clear()
    return t


# ---------------------------------------------------------------------------
# Entry points

@dataclass(frozen=True)
class NormalForm:
    term: Term
    kind: str  # "expanded" | "contracted" | "beta"


def long_nf(a: Term, strategy: str = "eager") -> NormalForm:
    """Unique eta-long beta normal form, alpha-canonical by construction."""
    if strategy not in ("eager", "byname"):
        raise ValueError(f"unknown strategy '{strategy}'")
    _WORK[0] = 0  # the step budget applies per entry call
    v = eval_term(a, (), lazy=(strategy == "byname"))
    return NormalForm(readback(v, a.ty, 0), "expanded")


def beta_eta_nf(a: Term, strategy: str = "eager") -> NormalForm:
    """Contracted normal form: the long form after maximal eta-contraction."""
    return NormalForm(eta_contract(long_nf(a, strategy).term), "contracted")


def beta_nf(a: Term, strategy: str = "eager") -> NormalForm:
    """Beta normal form without any eta steps (diagnostic mode)."""
    if strategy not in ("eager", "byname"):
        raise ValueError(f"unknown strategy '{strategy}'")
    _WORK[0] = 0
    v = eval_term(a, (), lazy=(strategy == "byname"))
    return NormalForm(readback_beta(v, 0), "beta")


def _check_common_context(a: Term, b: Term):
    fa = S.free_vars(a)
    fb = S.free_vars(b)
    for name, ty in fb.items():
        if name in fa and fa[name] is not ty:
            raise TypeMismatch(f"free variable '{name}' has different types in the two terms")


def decide_eq(a: Term, b: Term) -> bool:
    """Provable equality of two same-typed terms (beta, eta, product and
    terminal equations).  Decided by comparing evaluated values in
    eta-long style without materializing the long forms."""
    if a.ty is not b.ty:
        raise TypeMismatch(
            f"cannot compare {S.show_type(a.ty)} with {S.show_type(b.ty)}")
    if a is b:
        return True
    _check_common_context(a, b)
    _WORK[0] = 0
    u = eval_term(a, ())
    v = eval_term(b, ())
    return values_equal(u, v, a.ty, 0)
