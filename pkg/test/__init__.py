"""Tests for Fresnel Phase MCP."""
