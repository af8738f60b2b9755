"""
Exceptions for jm_uplink
"""


class JmUplinkError(Exception):
    code = "JmUplinkError"

    def as_dict(self):
        return {"error": self.code, "message": str(self)}


class NonConvergence(JmUplinkError):
    """
    A quadrature ran out of subdivisions or refinement before meeting its
    tolerance
    """

    code = "NonConvergence"


class NoRoot(JmUplinkError):
    code = "NoRoot"


class WindowTooSmall(JmUplinkError):
    code = "WindowTooSmall"


class RejectionBudgetExceeded(JmUplinkError):
    code = "RejectionBudgetExceeded"


class InvalidMoments(JmUplinkError):
    code = "InvalidMoments"


class InvalidShape(JmUplinkError):
    code = "InvalidShape"


class DivergentMoment(JmUplinkError):
    code = "DivergentMoment"


class NoInterferers(JmUplinkError):
    code = "NoInterferers"


class DomainError(JmUplinkError, ValueError):
    code = "DomainError"


class ScenarioError(JmUplinkError, ValueError):
    code = "ScenarioError"
