"""Configuration file loading, merging and canonical text form."""
