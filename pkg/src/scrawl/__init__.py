"""Attention-based transcription of handwritten text lines."""
