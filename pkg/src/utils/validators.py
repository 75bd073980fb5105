"""
Input validation utilities.

Descriptors use the mini-language ``kind:key=value,key=value`` (for example
``ellipsoid:a=1,c=1.2`` or ``schwarzschild:m=1``). Validators return a list
of human readable errors, empty when the input is valid.
"""
from typing import Dict, List, Tuple

import numpy as np

from src.utils.errors import ConfigurationError

# kind -> (required numeric keys, optional numeric keys, required text keys)
SHAPE_PARAMETERS = {
    'sphere': (('r',), (), ()),
    'ellipsoid': (('a', 'c'), ('b',), ()),
    'hyp-geodesic-sphere': (('r',), ('kappa',), ()),
    'hyp-ellipsoid': (('a', 'c'), ('kappa',), ()),
    'profile': ((), (), ('file',)),
}

CHART_PARAMETERS = {
    'euclidean': ((), (), ()),
    'schwarzschild': (('m',), (), ()),
    'spaceform': (('k',), (), ()),
    'perturbed': ((), (), ('file',)),
}

U0_PARAMETERS = {
    'const': 'positive constant initial data, e.g. const:1.25',
    'dirac': 'initial data H0/(2 lambda1) of the base surface',
}


def parse_descriptor(text: str) -> Tuple[str, Dict[str, str]]:
    """
    Split a descriptor into its kind and raw key/value parameters.

    Args:
        text: Descriptor such as ``sphere:r=1``

    Returns:
        Tuple of (kind, parameters)

    Raises:
        ConfigurationError: if the text is not of the form kind[:k=v,...]
    """
    if not isinstance(text, str) or not text.strip():
        raise ConfigurationError("Empty descriptor")
    kind, _, rest = text.strip().partition(':')
    params: Dict[str, str] = {}
    if rest:
        for item in rest.split(','):
            key, sep, value = item.partition('=')
            if not sep or not key.strip() or not value.strip():
                raise ConfigurationError(f"Malformed descriptor parameter '{item}' in '{text}'")
            params[key.strip()] = value.strip()
    return kind.strip(), params


def _validate_against(text: str, table: dict, what: str) -> List[str]:
    errors = []
    try:
        kind, params = parse_descriptor(text)
    except ConfigurationError as e:
        return [str(e)]

    if kind not in table:
        return [f"Unknown {what} kind '{kind}' (expected one of: {', '.join(sorted(table))})"]

    required, optional, text_keys = table[kind]
    allowed = set(required) | set(optional) | set(text_keys)
    for key in params:
        if key not in allowed:
            errors.append(f"Unexpected parameter '{key}' for {what} '{kind}'")
    for key in tuple(required) + tuple(text_keys):
        if key not in params:
            errors.append(f"Missing required parameter '{key}' for {what} '{kind}'")
    for key in tuple(required) + tuple(optional):
        if key in params:
            try:
                value = float(params[key])
            except ValueError:
                errors.append(f"Parameter '{key}' must be numeric, got '{params[key]}'")
                continue
            if not np.isfinite(value):
                errors.append(f"Parameter '{key}' must be finite")
            elif key in ('r', 'a', 'b', 'c', 'kappa') and value <= 0:
                errors.append(f"Parameter '{key}' must be positive")
            elif key == 'm' and value < 0:
                errors.append("Mass parameter 'm' must be nonnegative")
    return errors


def validate_shape_descriptor(text: str) -> List[str]:
    """Validate a surface descriptor; returns list of errors (empty if valid)."""
    errors = _validate_against(text, SHAPE_PARAMETERS, 'shape')
    if not errors:
        kind, params = parse_descriptor(text)
        if kind == 'ellipsoid' and 'b' in params and float(params['b']) != float(params['a']):
            errors.append("Only axisymmetric ellipsoids (b == a) are supported")
    return errors


def validate_chart_descriptor(text: str) -> List[str]:
    """Validate an ambient chart descriptor; returns list of errors (empty if valid)."""
    return _validate_against(text, CHART_PARAMETERS, 'chart')


def validate_u0_descriptor(text: str) -> List[str]:
    """Validate initial data for the quasi-spherical flow."""
    kind, _, value = text.partition(':')
    if kind not in U0_PARAMETERS:
        return [f"Unknown initial data '{text}' (expected const:<value> or dirac)"]
    if kind == 'const':
        try:
            if float(value) <= 0:
                return ["Constant initial data must be positive"]
        except ValueError:
            return [f"Constant initial data must be numeric, got '{value}'"]
    return []


def parse_float_list(text: str) -> List[float]:
    """
    Parse ``start:stop:count`` (inclusive, evenly spaced) or a comma list.

    Raises:
        ConfigurationError: on malformed input
    """
    try:
        if ':' in text:
            start, stop, count = text.split(':')
            count = int(count)
            if count < 1:
                raise ValueError("count must be positive")
            return [float(v) for v in np.linspace(float(start), float(stop), count)]
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Malformed number list '{text}': {e}") from e


def validate_radii(radii: List[float], minimum: int = 1) -> List[str]:
    """Radii must be positive, finite, strictly increasing."""
    errors = []
    if len(radii) < minimum:
        errors.append(f"At least {minimum} radii required, got {len(radii)}")
    if any(not np.isfinite(r) or r <= 0 for r in radii):
        errors.append("Radii must be positive and finite")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        errors.append("Radii must be strictly increasing")
    return errors
