"""Translation between the two signatures.

Negation is definable inside the self-adjoint language and the covariant
endofunctor inside the involutive language; extending these definitions over
whole terms gives a pair of functors witnessing that the two free categories
are isomorphic.  Both directions are plain structural recursion on the
defining clauses, with no simplification interleaved, so translated terms
are predictable and proofs over them replay.
"""

from __future__ import annotations

from .terms import Comp, Ell, Gamma, Id, Neg, Nl, Nr, Phi, Term


def neg_in_S(f: Term) -> Term:
    """Negation of a self-signature term, expressed in the self signature.

    Takes an arrow n -> m to an arrow m+1 -> n+1.
    """
    if isinstance(f, Id):
        return Id(f.obj + 1)
    if isinstance(f, Phi):
        return Ell(Gamma(f.obj))
    if isinstance(f, Gamma):
        return Ell(Phi(f.obj))
    if isinstance(f, Comp):
        return Comp(neg_in_S(f.g), neg_in_S(f.f))
    if isinstance(f, Ell):
        return Ell(neg_in_S(f.f))
    raise TypeError(f"not a self-signature term: {f!r}")


def l_in_A(f: Term) -> Term:
    """The covariant endofunctor on involutive terms, expressed with negation.

    Takes an arrow n -> m to an arrow n+1 -> m+1.
    """
    if isinstance(f, Id):
        return Id(f.obj + 1)
    if isinstance(f, Nr):
        return Neg(Nl(f.obj))
    if isinstance(f, Nl):
        return Neg(Nr(f.obj))
    if isinstance(f, Comp):
        return Comp(l_in_A(f.f), l_in_A(f.g))
    if isinstance(f, Neg):
        return Neg(l_in_A(f.f))
    raise TypeError(f"not an involutive-signature term: {f!r}")


def functor_FA(f: Term) -> Term:
    """Functor from the self-adjoint free category to the involutive one.

    Objects are mapped identically; generators go to their involutive
    counterparts and the covariant endofunctor to its defined version.
    Preserves arrow types.
    """
    if isinstance(f, Id):
        return f
    if isinstance(f, Phi):
        return Nr(f.obj)
    if isinstance(f, Gamma):
        return Nl(f.obj)
    if isinstance(f, Comp):
        return Comp(functor_FA(f.f), functor_FA(f.g))
    if isinstance(f, Ell):
        return l_in_A(functor_FA(f.f))
    raise TypeError(f"not a self-signature term: {f!r}")


def functor_FS(f: Term) -> Term:
    """Functor from the involutive free category to the self-adjoint one."""
    if isinstance(f, Id):
        return f
    if isinstance(f, Nr):
        return Phi(f.obj)
    if isinstance(f, Nl):
        return Gamma(f.obj)
    if isinstance(f, Comp):
        return Comp(functor_FS(f.f), functor_FS(f.g))
    if isinstance(f, Neg):
        return neg_in_S(functor_FS(f.f))
    raise TypeError(f"not an involutive-signature term: {f!r}")
