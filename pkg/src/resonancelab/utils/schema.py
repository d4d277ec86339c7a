"""
Strict tool-schema checks.

Laboratory tools are called by agents with strict JSON schemas: every property is
required, and parameters are scalars or flat arrays of scalars so that numeric
inputs survive the round trip unchanged.
"""

from __future__ import annotations

import inspect
from typing import Any, Callable, Union, get_args, get_origin

JsonObject = dict[str, Any]
SCALAR_TYPES = ("number", "integer", "string", "boolean")


class ToolSchemaValidator:
    """Check generated tool schemas and the signatures they come from."""

    @staticmethod
    def validate_schema(schema: JsonObject) -> list[str]:
        """Return every strictness problem of a function schema (empty if clean)."""
        parameters = schema.get("parameters")
        if not isinstance(parameters, dict):
            return ["Missing or invalid 'parameters' field"]

        errors: list[str] = []
        required = parameters.get("required")
        if not isinstance(required, list):
            errors.append("'required' must be an array listing every property")
            required = []

        properties = parameters.get("properties")
        if not isinstance(properties, dict):
            errors.append("Missing or invalid 'properties' field in parameters")
            return errors

        for name, prop in properties.items():
            if name not in required:
                errors.append(f"Property '{name}' missing from required array")
            if not isinstance(prop, dict):
                continue
            if "anyOf" in prop:
                errors.append(f"Property '{name}' uses 'anyOf'")
            kind = prop.get("type")
            if isinstance(kind, list):
                errors.append(f"Property '{name}' declares several types")
            elif kind == "array":
                items = prop.get("items")
                if not isinstance(items, dict) or items.get("type") not in SCALAR_TYPES:
                    errors.append(f"Property '{name}' must be an array of scalars")
            elif kind is not None and kind not in SCALAR_TYPES:
                errors.append(f"Property '{name}' has unsupported type '{kind}'")
        return errors

    @staticmethod
    def analyze_function_signature(func: Callable[..., Any]) -> JsonObject:
        """Flag parameters whose annotations are likely to produce loose schemas."""
        analysis: JsonObject = {
            "function_name": getattr(func, "__name__", "<anonymous>"),
            "parameters": {},
            "recommendations": [],
        }
        for name, param in inspect.signature(func).parameters.items():
            if name == "self":
                continue
            annotation = param.annotation
            issues: list[str] = []
            if get_origin(annotation) is Union:
                issues.append("Union annotation produces an anyOf schema")
                analysis["recommendations"].append(
                    f"Give '{name}' a single type and validate at runtime"
                )
            if annotation is inspect.Parameter.empty:
                issues.append("missing annotation")
                analysis["recommendations"].append(f"Annotate '{name}'")
            elif get_origin(annotation) is list and not get_args(annotation):
                issues.append("bare list annotation")
                analysis["recommendations"].append(
                    f"Use list[float] or list[str] for '{name}'"
                )
            analysis["parameters"][name] = {
                "annotation": str(annotation),
                "has_default": param.default is not inspect.Parameter.empty,
                "issues": issues,
            }
        return analysis
