"""Pydantic models and enums describing a run."""
