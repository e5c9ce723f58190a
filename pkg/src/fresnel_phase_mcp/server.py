#!/usr/bin/env python3
"""Fresnel Phase MCP Server - phase retrieval tools for the Fresnel domain."""

import os
import json
from enum import Enum
from typing import Annotated, Optional
from pathlib import Path

import typer

from fresnel_phase_mcp import __version__
from fresnel_phase_mcp.tools import RetrievalTools
from fastmcp import FastMCP

from fresnel_phase_mcp.presets import (
    DEFAULT_ITERATIONS,
    DEFAULT_SWEEP_MAX,
    DEFAULT_SWEEP_MIN,
    DEFAULT_SWEEP_STEP,
    REFERENCE_DISTANCE,
    REFERENCE_IMAGE_SIDE,
    REFERENCE_PITCH,
    REFERENCE_WAVELENGTH,
)


class TransportType(str, Enum):
    STDIO = "stdio"
    STREAMABLE_HTTP = "streamable-http"
    SSE = "sse"

# Configuration
DEFAULT_HOST = os.getenv("MCP_HOST", "0.0.0.0")
DEFAULT_PORT = int(os.getenv("MCP_PORT", "3004"))
DEFAULT_TRANSPORT = os.getenv("MCP_TRANSPORT", "stdio")
DEFAULT_OUTPUT_DIR = os.getenv("FRESNEL_PHASE_OUTPUT_DIR")
DEFAULT_WORKERS = int(os.getenv("FRESNEL_PHASE_WORKERS", "1"))

STRATEGY_DESCRIPTIONS = {
    "zero": "Padding zone forced to zero amplitude at every constraint step; random start phase.",
    "constant": (
        "Padding zone forced to a fixed non-zero amplitude with the propagated phase; "
        "the amplitude is chosen by sweeping 0.1..1.0 in steps of 0.1 and keeping the best input correlation."
    ),
    "variable": (
        "Padding zone left as the propagation produced it, only the image region is replaced; "
        "zero start phase, start field equal to the input amplitude."
    ),
}


class FresnelPhaseMCP(FastMCP):
    """Fresnel Phase MCP Server with phase retrieval tools."""
    
    def __init__(
        self, 
        name: str = f"Fresnel Phase MCP Server v{__version__}",
        prefix: str = "fp_",
        transport_mode: str = "stdio",
        output_dir: Optional[str] = None,
        workers: int = DEFAULT_WORKERS,
        **kwargs
    ):
        """Initialize the retrieval tools with FastMCP functionality."""
        super().__init__(name=name, **kwargs)
        
        self.prefix = prefix
        self.transport_mode = transport_mode
        self.output_dir = Path(output_dir) if output_dir else Path.cwd() / "fresnel_phase_output"
        self.retrieval_tools = RetrievalTools(output_dir=self.output_dir, workers=workers)
        # Create output directory
        self.output_dir.mkdir(parents=True, exist_ok=True)
            
        self._register_tools()
    
    def _register_tools(self):
        """Register retrieval tools and resources."""
        self.tool(name=f"{self.prefix}compute_sampling")(self.retrieval_tools.compute_sampling)
        self.tool(name=f"{self.prefix}retrieve_phase")(self.retrieval_tools.retrieve_phase)
        self.tool(name=f"{self.prefix}compare_padding_strategies")(self.retrieval_tools.compare_padding_strategies)
        self.tool(name=f"{self.prefix}retrieve_synthetic_example")(self.retrieval_tools.retrieve_synthetic_example)

        self._register_resources()
    
    def _register_resources(self):
        """Register MCP resources for the reference parameters and padding strategies."""

        @self.resource("fresnel://parameters/reference")
        def reference_parameters() -> str:
            """Optical parameters of the reference simulations (micrometres, pixels)."""
            return json.dumps({
                "wavelength_um": REFERENCE_WAVELENGTH,
                "distance_um": REFERENCE_DISTANCE,
                "pitch_um": REFERENCE_PITCH,
                "image_side": REFERENCE_IMAGE_SIDE,
                "iterations": DEFAULT_ITERATIONS,
                "sweep": [DEFAULT_SWEEP_MIN, DEFAULT_SWEEP_MAX, DEFAULT_SWEEP_STEP],
            })

        @self.resource("fresnel://strategies")
        def padding_strategies() -> str:
            """Description of the zero, constant and variable padding strategies."""
            return json.dumps(STRATEGY_DESCRIPTIONS)


def create_app(transport_mode: str = "stdio", output_dir: Optional[str] = DEFAULT_OUTPUT_DIR):
    """Create and configure the FastMCP application."""
    return FresnelPhaseMCP(transport_mode=transport_mode, output_dir=output_dir)

# CLI application setup
cli_app = typer.Typer(help="Fresnel Phase MCP Server CLI")

@cli_app.command()
def server(
    host: Annotated[str, typer.Option(help="Host to run the server on.")] = DEFAULT_HOST,
    port: Annotated[int, typer.Option(help="Port to run the server on.")] = DEFAULT_PORT,
    transport: Annotated[str, typer.Option(help="Transport type: stdio, streamable-http, or sse")] = DEFAULT_TRANSPORT,
    output_dir: Annotated[Optional[str], typer.Option(help="Output directory for retrieval results")] = DEFAULT_OUTPUT_DIR,
):
    """Runs the Fresnel Phase MCP server."""
    if transport not in [t.value for t in TransportType]:
        typer.echo(f"Invalid transport: {transport}. Must be one of: stdio, streamable-http, sse")
        raise typer.Exit(1)
        
    app = create_app(transport_mode=transport, output_dir=output_dir)

    # Different transports need different arguments
    if transport == TransportType.STDIO.value:
        app.run(transport="stdio")
    else:
        app.run(transport=transport, host=host, port=port)

@cli_app.command(name="stdio")
def stdio():
    """Runs the Fresnel Phase MCP server in stdio mode (standard input/output)."""
    app = create_app(transport_mode="stdio")
    app.run(transport="stdio")

@cli_app.command(name="http")
def http(
    host: Annotated[str, typer.Option(help="Host to run the server on.")] = DEFAULT_HOST,
    port: Annotated[int, typer.Option(help="Port to run the server on.")] = DEFAULT_PORT,
    output_dir: Annotated[Optional[str], typer.Option(help="Output directory for retrieval results")] = DEFAULT_OUTPUT_DIR,
):
    """Runs the Fresnel Phase MCP server in streamable HTTP mode."""
    app = create_app(transport_mode="streamable-http", output_dir=output_dir)
    app.run(transport="streamable-http", host=host, port=port)

@cli_app.command(name="sse")
def sse(
    host: Annotated[str, typer.Option(help="Host to run the server on.")] = DEFAULT_HOST,
    port: Annotated[int, typer.Option(help="Port to run the server on.")] = DEFAULT_PORT,
    output_dir: Annotated[Optional[str], typer.Option(help="Output directory for retrieval results")] = DEFAULT_OUTPUT_DIR,
):
    """Runs the Fresnel Phase MCP server in Server-Sent Events (SSE) mode."""
    app = create_app(transport_mode="sse", output_dir=output_dir)
    app.run(transport="sse", host=host, port=port)

if __name__ == "__main__":
    cli_app()
