"""Config file ingestion and canonical serialization.

Config files are JSON. Frequencies are plain MHz in the file (keys end in
_mhz) and become angular rad/us on ingest; times are us. Exactly one
command section may be present. Every result file embeds the resolved
config so a run can be reproduced from its own output.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from . import defaults
from .evolution import EvolutionConfig
from .model import TWO_PI, ChainSpec, default_cells
from .protocols import KINDS, PumpProtocol


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


COMMAND_SECTIONS = ("simulate", "sweep", "spectrum", "waveform", "readout", "stirap")


def pyify(obj: Any) -> Any:
    """Recursively convert numpy containers/scalars to plain Python."""
    if isinstance(obj, np.ndarray):
        return [pyify(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [pyify(x) for x in obj]
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, compact separators, plain types."""
    return json.dumps(pyify(obj), sort_keys=True, separators=(",", ":"))


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def config_hash(obj: Any) -> str:
    return sha256_hex(canonical_json(obj))


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return raw


def active_section(cfg: dict) -> str:
    present = [name for name in COMMAND_SECTIONS if name in cfg]
    if len(present) != 1:
        raise ConfigError(
            "config must contain exactly one command section "
            f"of {COMMAND_SECTIONS}, found {present or 'none'}"
        )
    return present[0]


def resolve_chain(cfg: dict) -> ChainSpec:
    section = dict(defaults.CHAIN)
    section.update(cfg.get("chain", {}))
    n_sites = int(section["n_sites"])
    cells = section.get("cells")
    if cells is None:
        cells = default_cells(n_sites)
    else:
        cells = tuple(tuple(int(s) for s in cell) for cell in cells)
    return ChainSpec(
        n_sites=n_sites, cells=cells, delta_parity=int(section.get("delta_parity", 1))
    )


def resolve_protocol(cfg: dict) -> PumpProtocol:
    section = cfg.get("protocol", {})
    kind = section.get("kind", defaults.PROTOCOL["kind"])
    if kind not in KINDS:
        raise ConfigError(f"unknown protocol kind {kind!r}, expected one of {KINDS}")
    try:
        return PumpProtocol(
            kind=kind,
            j_max=_freq(section, "j_max_mhz", defaults.PROTOCOL["j_max"]),
            delta0=_freq(section, "delta0_mhz", defaults.PROTOCOL["delta0"]),
            delta_offset=_freq(section, "delta_offset_mhz", defaults.PROTOCOL["delta_offset"]),
            period=float(section.get("period_us", defaults.PROTOCOL["period"])),
            n_cycles=int(section.get("n_cycles", defaults.PROTOCOL["n_cycles"])),
        )
    except ValueError as exc:
        raise ConfigError(f"bad protocol section: {exc}") from exc


def resolve_evolution(cfg: dict, dt_override: float | None = None) -> EvolutionConfig:
    section = cfg.get("evolution", {})
    dt = dt_override if dt_override is not None else section.get("dt_us")
    try:
        return EvolutionConfig(
            dt=None if dt is None else float(dt),
            adaptive_halving=bool(section.get("adaptive", False)),
            convergence_tol=float(section.get("convergence_tol", 1e-6)),
            store_states=bool(section.get("store_states", True)),
        )
    except ValueError as exc:
        raise ConfigError(f"bad evolution section: {exc}") from exc


def _freq(section: dict, key: str, fallback: float) -> float:
    if key in section:
        return TWO_PI * float(section[key])
    return float(fallback)


def protocol_to_dict(protocol: PumpProtocol) -> dict:
    """Echo a protocol in file units (MHz, us) for embedding in results."""
    return {
        "kind": protocol.kind,
        "j_max_mhz": protocol.j_max / TWO_PI,
        "delta0_mhz": protocol.delta0 / TWO_PI,
        "delta_offset_mhz": protocol.delta_offset / TWO_PI,
        "period_us": protocol.period,
        "n_cycles": protocol.n_cycles,
    }


def chain_to_dict(spec: ChainSpec) -> dict:
    return {
        "n_sites": spec.n_sites,
        "cells": [list(c) for c in spec.cells],
        "delta_parity": spec.delta_parity,
    }
