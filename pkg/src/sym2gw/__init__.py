"""Exact genus-zero invariants of the orbifold symmetric square of the plane.

The package reconstructs invariants from a small set of initial values
through WDVV relations, converts them into counts of hyperelliptic plane
curves, and checks them against the Hilbert scheme of two points.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .chow_rings import (  # noqa: E402
    ALPHA, ALPHA2, ALPHA3, ALPHA4, BETA, GAMMA, GAMMA0, GAMMA1, GAMMA2, ONE, T1, T2,
    HilbClass, OrbClass, orb_integrate, orb_pairing, orb_product,
)
from .gw_core import InvariantKey, base_value, vanishing_reason  # noqa: E402
from .hyperelliptic import count_hyperelliptic  # noqa: E402
from .wdvv_engine import InvariantStore, WdvvEngine, compute_invariant  # noqa: E402

__all__ = [
    "__version__",
    "ONE", "ALPHA", "ALPHA2", "BETA", "ALPHA3", "ALPHA4", "GAMMA", "GAMMA0", "GAMMA1", "GAMMA2",
    "T1", "T2", "OrbClass", "HilbClass", "orb_product", "orb_pairing", "orb_integrate",
    "InvariantKey", "base_value", "vanishing_reason",
    "WdvvEngine", "InvariantStore", "compute_invariant",
    "count_hyperelliptic",
]
