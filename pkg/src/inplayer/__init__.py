"""Plot-graph narrative engine, profile-driven player agents, and a
trace-similarity evaluation pipeline."""

__version__ = "0.1.0"
