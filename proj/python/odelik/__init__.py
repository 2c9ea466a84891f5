"""Derivatives of Gaussian likelihoods constrained by ODE models.

Thin package wrapper around the compiled core: ODE models, observation
data, and gradient/Hessian methods (finite differences, forward
sensitivities, adjoint sweeps).
"""

from ._core import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
