"""Selects the compiled scan core when available, else the interpreted one.

The two are the same source file (`_scan_core.py`, Cython pure-python
mode) and produce bit-identical doubles; selection only changes speed.
Set CRITICALLINE_KERNEL=python to force the interpreted fallback, or
=compiled to fail loudly if the extension is missing.
"""

from __future__ import annotations

import importlib.util
import os
import pathlib

_SOURCE = pathlib.Path(__file__).with_name("_scan_core.py")


def _load_interpreted():
    spec = importlib.util.spec_from_file_location(
        "criticalline.kernel._scan_core_interpreted", _SOURCE)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def _load_compiled():
    from . import _scan_core as mod

    if not getattr(mod, "__file__", "").endswith((".so", ".pyd")):
        raise ImportError("extension not built; _scan_core resolved to source")
    return mod


def load_core(prefer: str = "auto"):
    """Return (module, is_compiled) honouring the preference."""
    prefer = prefer or "auto"
    if prefer == "python":
        return _load_interpreted(), False
    if prefer == "compiled":
        return _load_compiled(), True
    try:
        return _load_compiled(), True
    except ImportError:
        return _load_interpreted(), False


_PREFER = os.environ.get("CRITICALLINE_KERNEL", "auto")
core, core_is_compiled = load_core(_PREFER)
