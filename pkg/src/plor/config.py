"""Configured constants behind every asserted O(.) bound.

All structural bounds in the package ("O(sqrt r) boundary nodes", "heap ops
<= C |V| lg^2 |V|", ...) are checked against the constants below, which makes
the asymptotic claims falsifiable at desk scale.  Every value can be
overridden through a JSON/YAML-ish config file (see `load`) or the
PLOR_CONFIG environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Constants:
    # division bounds: pieces <= c_pieces*n/r, |V_P| <= c_size*r,
    # |dP| <= c_boundary*sqrt(r), separator <= c_sep*sqrt(n), holes <= h_max,
    # hole walk length <= c_holewalk*sqrt(r)
    c_pieces: float = 8.0
    c_size: float = 8.0
    c_boundary: float = 8.0
    c_sep: float = 4.0
    h_max: int = 6
    c_holewalk: float = 16.0
    sep_floor: int = 12

    # FR-Dijkstra: heap ops <= c_frd * |V(H)| * lg^2 |V(H)|
    c_frd: float = 64.0

    # cycle MSSP: cycle length <= c_cycle*sqrt(n), query ops <= c_cq*c*lg^2(c)*lglg(c)
    c_cycle: float = 6.0
    c_cq: float = 256.0

    # scaled oracle: query ops <= c_scaled_q*min(l*lg^2(l)*lglg(l), sqrt(n)*lg^2(n))
    c_scaled_q: float = 512.0
    # leaf regions of the per-scale bisection hold <= c_scaled_leaf*4^i nodes
    c_scaled_leaf: float = 8.0
    # scales above this node budget fall through to the full-graph oracle
    scaled_scale_node_budget: int = 1 << 62

    # space accounting: words <= c_space_* (linear: *k*n, cmssp: *n*lglg c,
    # tradeoff: *S, scaled: *n*lg n*lglg n)
    c_space_linear: float = 64.0
    c_space_cmssp: float = 64.0
    c_space_tradeoff: float = 64.0
    c_space_scaled: float = 64.0

    # k-many distances: per-pair Dijkstra below c_kd*sqrt(n) pairs
    c_kd: float = 2.0

    # mssp backend for oracle builds: "per-source" | "klein"
    mssp_backend: str = "per-source"

    def with_overrides(self, **kw) -> "Constants":
        return replace(self, **kw)


DEFAULTS = Constants()

_ENV_VAR = "PLOR_CONFIG"


def load(path: str | None = None) -> Constants:
    """Load constants from a JSON file, falling back to defaults.

    `path=None` consults the PLOR_CONFIG environment variable.  Unknown keys
    are rejected so typos do not silently keep defaults.
    """
    if path is None:
        path = os.environ.get(_ENV_VAR)
    if not path:
        return DEFAULTS
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    known = {f.name for f in fields(Constants)}
    bad = set(raw) - known
    if bad:
        raise ValueError(f"unknown config keys: {sorted(bad)}")
    return Constants(**raw)
