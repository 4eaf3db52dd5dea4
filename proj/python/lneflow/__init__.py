"""Python bindings for the lneflow C++ core."""

from ._core import (  # noqa: F401
    ContractViolation,
    DegenerateMetric,
    NotPositiveDefinite,
    __version__,
    ball_radius,
    combine,
    decompose,
    divergence,
    hessian_fd,
    inverse_loss,
    is_strictly_diag_dominant,
    lne_metric,
    natural_grad_exact,
    natural_grad_weak,
    potential,
    run_fourier_flow,
    train_toy,
)
