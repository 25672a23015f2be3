"""JSON file formats.

Model file::

    {"dim": d, "rho": [[[re, im], ...], ...], "derivatives": [matrix, ...], "names": [...]}

Complex entries are ``[re, im]`` pairs (a bare number is read as real);
matrices are row-major. Weight file: ``{"g": [[...]]}``. Covariance file:
``{"V": [[...]]}``.
"""

import json

import numpy as np

from .errors import InvalidInputError
from .model import build_model


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InvalidInputError(f"no such file: {path}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InvalidInputError(f"{path}: malformed JSON ({exc})") from None


def complex_matrix(data, name="matrix"):
    try:
        rows = [[complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(float(z)) for z in row]
                for row in data]
        M = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise InvalidInputError(f"{name}: cannot read complex matrix ({exc})") from None
    if M.ndim != 2:
        raise InvalidInputError(f"{name}: expected a matrix")
    return M


def real_matrix(data, name="matrix"):
    try:
        M = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: cannot read real matrix ({exc})") from None
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise InvalidInputError(f"{name}: expected a matrix")
    return M


def complex_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def model_from_dict(data):
    if not isinstance(data, dict) or "rho" not in data or "derivatives" not in data:
        raise InvalidInputError("model file needs 'rho' and 'derivatives'")
    rho = complex_matrix(data["rho"], "rho")
    if "dim" in data and int(data["dim"]) != rho.shape[0]:
        raise InvalidInputError(f"dim = {data['dim']} but rho is {rho.shape[0]}x{rho.shape[1]}")
    derivs = [complex_matrix(D, f"derivative {i}") for i, D in enumerate(data["derivatives"])]
    return build_model(rho, derivs, names=data.get("names"))


def model_to_dict(model):
    return {
        "dim": model.dim,
        "rho": complex_to_json(model.rho),
        "derivatives": [complex_to_json(D) for D in model.derivs],
        "names": list(model.names),
    }


def load_model(path):
    return model_from_dict(_read_json(path))


def save_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1)


def load_weight(path):
    data = _read_json(path)
    if isinstance(data, dict):
        if "g" not in data:
            raise InvalidInputError("weight file needs 'g'")
        data = data["g"]
    return real_matrix(data, "g")


def load_covariance(path):
    data = _read_json(path)
    if isinstance(data, dict):
        if "V" not in data:
            raise InvalidInputError("covariance file needs 'V'")
        data = data["V"]
    return real_matrix(data, "V")
