"""Utilities shared by the CLI and the library."""
