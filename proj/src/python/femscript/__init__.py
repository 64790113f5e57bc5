"""P1 finite elements on triangles with a FreeFem-style script interpreter."""

from ._femscript import (
    Error,
    Interpreter,
    IoError,
    Mesh,
    OutOfDomain,
    ParseError,
    ScriptError,
    circle_mesh,
    convergence_rates,
    heat_study,
    nonlinear_study,
    poisson_study,
)


def run(source, verbosity=0, stdin=""):
    """Run script text and return the finished interpreter."""
    interp = Interpreter(verbosity, stdin)
    interp.run(source)
    return interp


__all__ = [
    "Error",
    "Interpreter",
    "IoError",
    "Mesh",
    "OutOfDomain",
    "ParseError",
    "ScriptError",
    "circle_mesh",
    "convergence_rates",
    "heat_study",
    "nonlinear_study",
    "poisson_study",
    "run",
]
