"""The transcription network and its parameter store."""

from .model import Transcriber, Transcription
from .params import ModelParams, init_params

__all__ = ["ModelParams", "Transcriber", "Transcription", "init_params"]
