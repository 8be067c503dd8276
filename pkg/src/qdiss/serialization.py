"""JSON forms of operators, states and models.

Matrices are ``{"re": [[...]], "im": [[...]]}``; density matrices add
``"dims"``. Operators may also be written as Pauli strings, e.g.
``{"pauli": "xz", "coeff": 0.5}`` is ``0.5 * sigma_x (x) sigma_z``, and a
list of operator objects denotes their sum.
"""

from __future__ import annotations

import numpy as np

from .density import DensityMatrix, from_pure
from .lindblad import DiagonalModel, GKSModel
from .linalg import kron_all
from .states import PAULI, basis_ket, heisenberg_3spin, named_state


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _complex_array(obj) -> np.ndarray:
    if isinstance(obj, dict):
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValueError("re and im parts have different shapes")
        return re + 1j * im
    return np.asarray(obj, dtype=complex)


def operator_from_json(obj, dim: int) -> np.ndarray:
    if isinstance(obj, list) and obj and isinstance(obj[0], (dict, str)):
        return sum(operator_from_json(o, dim) for o in obj)
    if isinstance(obj, str):
        if obj == "heisenberg_3spin":
            return heisenberg_3spin()
        if obj == "zero":
            return np.zeros((dim, dim), dtype=complex)
        return operator_from_json({"pauli": obj}, dim)
    if isinstance(obj, dict) and "pauli" in obj:
        word = obj["pauli"].lower()
        factors = []
        for ch in word:
            if ch not in PAULI:
                raise ValueError(f"bad Pauli letter {ch!r} in {word!r}")
            factors.append(PAULI[ch])
        op = obj.get("coeff", 1.0) * kron_all(factors)
        if op.shape != (dim, dim):
            raise ValueError(f"Pauli word {word!r} does not fit dimension {dim}")
        return op
    m = _complex_array(obj)
    if m.shape != (dim, dim):
        raise ValueError(f"operator shape {m.shape} does not match dimension {dim}")
    return m


def model_from_json(obj: dict):
    dims = tuple(int(d) for d in obj["dims"])
    dim = int(np.prod(dims))
    H = operator_from_json(obj.get("hamiltonian", "zero"), dim)
    ops = [operator_from_json(o, dim) for o in obj.get("ops", [])]
    form = obj.get("form", "diagonal")
    if form == "gks":
        coeff = _complex_array(obj.get("coeff", np.zeros((len(ops), len(ops)))))
        return GKSModel(H, tuple(ops), coeff, dims)
    if form == "diagonal":
        rates = [float(r) for r in obj.get("rates", [])]
        if len(rates) != len(ops):
            raise ValueError(f"{len(rates)} rates for {len(ops)} operators")
        return DiagonalModel(H, tuple(zip(rates, ops)), dims)
    raise ValueError(f"unknown model form {form!r}")


def model_to_json(model) -> dict:
    out = {"dims": list(model.dims), "hamiltonian": matrix_to_json(model.hamiltonian)}
    if isinstance(model, GKSModel):
        out.update(form="gks", ops=[matrix_to_json(L) for L in model.lindblad_ops],
                   coeff=matrix_to_json(model.coeff))
    else:
        out.update(form="diagonal", ops=[matrix_to_json(q) for _, q in model.channels],
                   rates=[r for r, _ in model.channels])
    return out


def vector_from_json(obj, dim: int | None = None) -> np.ndarray:
    if isinstance(obj, str):
        v = basis_ket(obj)
    else:
        v = _complex_array(obj).reshape(-1)
    if dim is not None and v.size != dim:
        raise ValueError(f"vector length {v.size} does not match dimension {dim}")
    return v


def state_from_json(obj, dims=None, rng: np.random.Generator | None = None) -> DensityMatrix:
    """Initial state from a name, an inline density matrix, a pure vector or
    a random draw (``{"random": {"rank": r}}``)."""
    if isinstance(obj, str):
        rho = named_state(obj)
    elif "vector" in obj:
        rho = from_pure(vector_from_json(obj["vector"]), obj.get("dims", dims))
    elif "random" in obj:
        from .sampling import random_density

        if dims is None:
            raise ValueError("random initial state needs model dims")
        rng = rng or np.random.default_rng(0)
        d = int(np.prod(dims))
        rho = DensityMatrix(random_density(rng, d, obj["random"].get("rank")), dims)
    else:
        rho = DensityMatrix.from_json(obj)
    if dims is not None and tuple(rho.dims) != tuple(dims):
        raise ValueError(f"initial state dims {rho.dims} do not match model dims {tuple(dims)}")
    return rho
