"""optbench: a workbench for building, inspecting, and fairly benchmarking
query optimizers over hybrid SQL+ML logical plans."""

__version__ = "0.1.0"
