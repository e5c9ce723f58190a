#!/usr/bin/env python3
"""Fresnel Phase MCP - phase retrieval in the Fresnel domain with padding strategies."""

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("fresnel-phase-mcp")
except PackageNotFoundError:
    __version__ = "unknown"

__all__ = ["__version__"]
