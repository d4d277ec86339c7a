"""Utilities shared by the laboratory toolkits."""

from .schema import ToolSchemaValidator

__all__ = ["ToolSchemaValidator"]
