"""
Closed-form expression strings for perturbed-flat charts.

A perturbation file is a plain ``key=value`` file::

    xx=0.3*exp(-r**2)
    xy=0.1*x*y/(1+r**2)**2
    tau=1
    mass=0

Components that are absent are zero; ``r`` is |x|.
"""
import logging
import re
from pathlib import Path
from tokenize import TokenError
from typing import Dict, Optional, Tuple

import sympy as sp
from dotenv import dotenv_values
from sympy.parsing.sympy_parser import auto_number, auto_symbol, parse_expr

from src.utils.errors import ArtifactError, ConfigurationError

logger = logging.getLogger(__name__)

X, Y, Z = sp.symbols('x y z', real=True)
COORDINATES = (X, Y, Z)
RADIUS = sp.sqrt(X ** 2 + Y ** 2 + Z ** 2)

ALLOWED_FUNCTIONS = {
    'exp': sp.exp,
    'log': sp.log,
    'sqrt': sp.sqrt,
    'sin': sp.sin,
    'cos': sp.cos,
    'tanh': sp.tanh,
    'atan': sp.atan,
}

# Names the sympy tokenizer emits for numbers and bare identifiers; nothing else is evaluable.
PARSER_GLOBALS = {
    '__builtins__': {},
    'Symbol': sp.Symbol,
    'Function': sp.Function,
    'Integer': sp.Integer,
    'Float': sp.Float,
    'Rational': sp.Rational,
}
TRANSFORMATIONS = (auto_symbol, auto_number)
NUMBER = re.compile(r'(?<![\w.])(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?')

COMPONENT_KEYS = {
    'xx': (0, 0), 'xy': (0, 1), 'xz': (0, 2),
    'yy': (1, 1), 'yz': (1, 2), 'zz': (2, 2),
}


def parse_expression(text: str) -> sp.Expr:
    """
    Parse an expression in x, y, z and r = |x|.

    Only the coordinates, ``r``, ``pi`` and ALLOWED_FUNCTIONS resolve;
    attribute access and dunder names are rejected before evaluation.

    Raises:
        ConfigurationError: unknown names or unparseable text
    """
    if '__' in text or '.' in NUMBER.sub('0', text):
        raise ConfigurationError(f"Expression '{text}' uses attribute access")
    local = {'x': X, 'y': Y, 'z': Z, 'r': RADIUS, 'pi': sp.pi, **ALLOWED_FUNCTIONS}
    try:
        expr = parse_expr(
            text, local_dict=local, global_dict=dict(PARSER_GLOBALS), transformations=TRANSFORMATIONS,
        )
    except (SyntaxError, TypeError, ValueError, NameError, AttributeError, TokenError, sp.SympifyError) as e:
        raise ConfigurationError(f"Cannot parse expression '{text}': {e}") from e
    if not isinstance(expr, sp.Expr):
        raise ConfigurationError(f"Expression '{text}' is not a scalar expression")

    unknown = expr.free_symbols - set(COORDINATES)
    if unknown:
        raise ConfigurationError(
            f"Expression '{text}' uses unknown names: {', '.join(sorted(map(str, unknown)))}"
        )
    allowed = set(ALLOWED_FUNCTIONS.values())
    for function in expr.atoms(sp.Function):
        if function.func not in allowed:
            raise ConfigurationError(f"Expression '{text}' uses unsupported function {function.func}")
    return expr


def load_perturbation(path) -> Tuple[sp.Matrix, float, Optional[float]]:
    """
    Read sigma_ij, the decay rate tau and an optional mass from a key=value file.

    Returns:
        (symmetric 3x3 sympy matrix, tau, mass or None)
    """
    path = Path(path)
    if not path.is_file():
        raise ArtifactError(f"Perturbation file not found: {path}")
    values: Dict[str, Optional[str]] = dotenv_values(path)

    unknown = set(values) - set(COMPONENT_KEYS) - {'tau', 'mass'}
    if unknown:
        raise ConfigurationError(f"{path}: unknown keys {', '.join(sorted(unknown))}")
    if not values.get('tau'):
        raise ConfigurationError(f"{path}: decay rate 'tau' is required")

    sigma = sp.zeros(3, 3)
    for key, (i, j) in COMPONENT_KEYS.items():
        if values.get(key):
            expr = parse_expression(values[key])
            sigma[i, j] = expr
            sigma[j, i] = expr

    try:
        tau = float(values['tau'])
        mass = float(values['mass']) if values.get('mass') else None
    except ValueError as e:
        raise ConfigurationError(f"{path}: tau and mass must be numeric ({e})") from e
    if tau <= 0.5:
        raise ConfigurationError(f"{path}: decay rate tau must exceed 1/2, got {tau}")

    logger.info(f"Loaded perturbation from {path} (tau={tau})")
    return sigma, tau, mass
