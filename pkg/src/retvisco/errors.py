"""Exception and warning types shared by all modules."""

from __future__ import annotations


class RetViscoError(Exception):
    """Base class for all errors raised by :mod:`retvisco`."""


class DomainError(RetViscoError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class SingularPointError(DomainError):
    """Evaluation at a point where the quantity is unbounded."""


class NonIntegrableError(DomainError):
    """The squared relaxation function is not integrable on the half line.

    Raised for ``alpha <= 1/2``, where the viscous energy is unbounded.
    """


class OutOfRangeError(DomainError):
    """A stress lies outside the admissible constitutive range."""


class ConvergenceError(RetViscoError, RuntimeError):
    """A numerical procedure failed to reach its tolerance."""


class DivergenceWarning(UserWarning):
    """Result is finite but sits close to a point where it diverges."""
