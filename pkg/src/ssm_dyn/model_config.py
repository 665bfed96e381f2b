"""Declarative text configuration: `key = value` files for scenarios and
custom generator models.

File syntax
-----------
One `key = value` per line; `#` starts a comment; keys may repeat (values
accumulate in order, used for lindblad/kraus term lists).

Operator expressions name built-in constructors on an N-site spin register:

    pauli:SITE:AXIS      single-site Pauli, 1-based site, axis x|y|z
    collective:AXIS      collective spin component (sum of sigma/2)
    identity             identity operator

Atoms multiply with `*` (or whitespace), terms combine with `+`/`-`, and a
leading real coefficient scales a term. A bare number is that multiple of
the identity. Example:

    hamiltonian = 1.5 * pauli:1:z * pauli:2:z + 1.5 * pauli:2:z * pauli:3:z + 1

Lindblad and Kraus lines pair a rate/weight with an expression:

    lindblad = 1.0 | collective:x
"""
from __future__ import annotations

import re

import numpy as np

from .liouville import LiouvillianModel
from .spin_ops import SpinRegister, collective_spin, site_pauli
from .tensor_core import Array

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<atom>[A-Za-z_][A-Za-z_0-9]*(?::[A-Za-z0-9]+)*)"
    r"|(?P<op>[+\-*])"
    r")")


class ConfigError(ValueError):
    pass


def tokenize_expr(expr: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m or m.end() == pos:
            rest = expr[pos:].strip()
            if not rest:
                break
            raise ConfigError(f"cannot parse operator expression at: {rest!r}")
        pos = m.end()
        for kind in ("number", "atom", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    return tokens


def _atom_operator(name: str, reg: SpinRegister) -> Array:
    parts = name.split(":")
    head = parts[0].lower()
    if head == "identity" and len(parts) == 1:
        return np.eye(reg.hilbert_dim, dtype=complex)
    if head == "pauli":
        if len(parts) != 3:
            raise ConfigError(f"pauli atom needs pauli:SITE:AXIS, got {name!r}")
        return site_pauli(reg, int(parts[1]), parts[2].lower())
    if head == "collective":
        if len(parts) != 2:
            raise ConfigError(f"collective atom needs collective:AXIS, got {name!r}")
        return collective_spin(reg, parts[1].lower())
    raise ConfigError(f"unknown operator constructor {name!r}")


def parse_operator_expr(expr: str, reg: SpinRegister) -> Array:
    """Evaluate an operator expression on the given register."""
    tokens = tokenize_expr(expr)
    if not tokens:
        raise ConfigError("empty operator expression")
    dim = reg.hilbert_dim
    result = np.zeros((dim, dim), dtype=complex)

    sign = 1.0
    coeff = 1.0
    term: Array | None = None
    have_content = False

    def flush():
        nonlocal sign, coeff, term, have_content, result
        if not have_content:
            raise ConfigError(f"trailing operator in expression {expr!r}")
        contrib = coeff * (term if term is not None else np.eye(dim, dtype=complex))
        result = result + sign * contrib
        sign, coeff, term, have_content = 1.0, 1.0, None, False

    for kind, value in tokens:
        if kind == "op" and value in "+-":
            if have_content:
                flush()
            sign *= 1.0 if value == "+" else -1.0
            continue
        if kind == "op" and value == "*":
            continue
        have_content = True
        if kind == "number":
            coeff *= float(value)
        else:
            a = _atom_operator(value, reg)
            term = a if term is None else term @ a
    flush()
    return result


def parse_config_text(text: str) -> dict[str, list[str]]:
    """Parse `key = value` lines into an ordered multi-map."""
    out: dict[str, list[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out.setdefault(key.strip().lower(), []).append(value.strip())
    return out


def load_config(path) -> dict[str, list[str]]:
    with open(path) as fh:
        return parse_config_text(fh.read())


def _single(cfg: dict[str, list[str]], key: str, default=None):
    values = cfg.get(key)
    if not values:
        return default
    if len(values) > 1:
        raise ConfigError(f"key {key!r} given {len(values)} times, expected once")
    return values[0]


def load_model(path_or_cfg) -> LiouvillianModel:
    """Build a LiouvillianModel from a model configuration file.

    Recognized keys: n_sites (required), hamiltonian, lindblad (repeatable,
    "rate | expression"), kraus (repeatable, "weight | expression"),
    perturbation, theta, scale.
    """
    cfg = path_or_cfg if isinstance(path_or_cfg, dict) else load_config(path_or_cfg)
    n_sites = _single(cfg, "n_sites")
    if n_sites is None:
        raise ConfigError("model file must set n_sites")
    reg = SpinRegister(int(n_sites))

    hamiltonian_terms = []
    ham = _single(cfg, "hamiltonian")
    if ham:
        hamiltonian_terms.append((parse_operator_expr(ham, reg), 1.0))

    def weighted_terms(key):
        terms = []
        for entry in cfg.get(key, []):
            if "|" not in entry:
                raise ConfigError(f"{key} entries need 'weight | expression', got {entry!r}")
            w, expr = entry.split("|", 1)
            terms.append((parse_operator_expr(expr.strip(), reg), float(w)))
        return terms

    lindblad_terms = weighted_terms("lindblad")
    kraus_terms = weighted_terms("kraus") or None

    pert = _single(cfg, "perturbation")
    perturbation = parse_operator_expr(pert, reg) if pert else None

    return LiouvillianModel(
        dim=reg.hilbert_dim,
        hamiltonian_terms=hamiltonian_terms,
        lindblad_terms=lindblad_terms,
        kraus_map_terms=kraus_terms,
        perturbation=perturbation,
        theta=float(_single(cfg, "theta", "1.0")),
        scale=float(_single(cfg, "scale", "1.0")),
    )
