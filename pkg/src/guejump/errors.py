"""Exception hierarchy with machine-readable tags.

Every numerical failure mode carries a short stable ``tag`` so the CLI and
the HTTP service can emit structured error records.
"""


class NumericalError(Exception):
    """Base class for numerical failures raised by guejump modules."""

    tag = "numerical-error"

    def record(self) -> dict:
        return {"error": self.tag, "message": str(self)}


class LossOfPositivityError(NumericalError):
    """Moment functional became numerically degenerate (beta_n^2 <= 0)."""

    tag = "loss-of-positivity"


class DegenerateJumpError(NumericalError):
    """Reconstruction coordinate a_k vanished (jump degenerates)."""

    tag = "degenerate-jump"


class PoleOrSignChangeError(NumericalError):
    """Trajectory left the pole-free regime (amplitude blow-up)."""

    tag = "pole-or-sign-change"


class RouteDisagreementError(NumericalError):
    """Two independent evaluation routes disagree beyond tolerance."""

    tag = "route-disagreement"


class InsufficientConditioningError(NumericalError):
    """Too few Monte-Carlo samples survived the conditioning event."""

    tag = "insufficient-conditioning"


class NonConvergenceError(NumericalError):
    """Discretization refinement did not stabilize the result."""

    tag = "non-convergence"
