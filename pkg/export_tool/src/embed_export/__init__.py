"""Encoder export utility feeding labelrefine's file formats."""

from .encoders import HashEncoder, resolve_encoder
from .export import ExportJob, export

__all__ = ["ExportJob", "HashEncoder", "export", "resolve_encoder"]
