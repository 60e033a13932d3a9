"""Backend selection for the matching kernel.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is imported.  Setting ``DYNPI_PURE_PYTHON=1`` forces the
fallback, which the test-suite uses to check that both agree.
"""

from __future__ import annotations

import os
from array import array

from . import _match_py

ONE_BIT = _match_py.ONE_BIT
MANY_BIT = _match_py.MANY_BIT

_compiled = None
if not os.environ.get("DYNPI_PURE_PYTHON"):
    try:
        from . import _match_ext as _compiled  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])


def search(n_h, n_g, h_adj, g_adj, order, cands, strict, backend=None):
    """Run the backtracking search; ``cands`` is a list of candidate lists."""
    cand = array("i")
    off = array("i", [0])
    for lst in cands:
        cand.extend(lst)
        off.append(len(cand))
    h = array("I", h_adj)
    g = array("I", g_adj)
    ordr = array("i", order)
    which = backend or BACKEND
    if which == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled matcher is not built")
        return _compiled.search(n_h, n_g, h, g, ordr, cand, off, strict)
    return _match_py.search(n_h, n_g, h, g, ordr, cand, off, strict)
