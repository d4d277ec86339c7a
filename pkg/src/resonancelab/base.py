"""
Strict toolkit base.

[`StrictToolkit`](src/resonancelab/base.py:18) wraps agno's `Toolkit` so that every
laboratory tool is registered with a strict JSON schema and checked by
[`ToolSchemaValidator`](src/resonancelab/utils/schema.py:18) at registration time.
"""

from typing import Any, Callable, Optional, Union

from agno.tools.function import Function
from agno.tools.toolkit import Toolkit
from agno.utils.log import log_debug, logger

from .utils.schema import ToolSchemaValidator


class StrictToolkit(Toolkit):
    """Toolkit whose callables are registered as strict agno `Function`s.

    Already-built `Function` objects (from the `@tool` decorator) go through the
    base `Toolkit.register()` and are schema-checked afterwards.
    """

    def register(
        self,
        function: Union[Callable[..., Any], Function],
        name: Optional[str] = None,
    ) -> None:
        """Register a callable or agno `Function` with a strict schema."""
        try:
            if isinstance(function, Function):
                tool_name = name or function.name
                super().register(function, name=name)
                registered = self.functions.get(tool_name)
                if registered is not None and registered.entrypoint is not None:
                    self._check_schema(registered, registered.entrypoint)
                return

            tool_name = name or function.__name__
            if self.include_tools is not None and tool_name not in self.include_tools:
                return
            if self.exclude_tools is not None and tool_name in self.exclude_tools:
                return

            f = Function.from_callable(function, name=tool_name, strict=True)
            self._check_schema(f, function)

            f.cache_results = self.cache_results
            f.cache_dir = self.cache_dir
            f.cache_ttl = self.cache_ttl
            f.requires_confirmation = tool_name in self.requires_confirmation_tools
            f.external_execution = tool_name in self.external_execution_required_tools
            f.stop_after_tool_call = tool_name in self.stop_after_tool_call_tools
            f.show_result = tool_name in self.show_result_tools

            self.functions[f.name] = f
            log_debug(f"Function: {f.name} registered with {self.name} (strict=True)")
        except Exception:
            func_name = (
                function.name if isinstance(function, Function) else function.__name__
            )
            logger.warning("Failed to create Function for: %s", func_name)
            raise

    def _check_schema(self, function_obj: Function, original_func: Callable) -> None:
        """Log strictness problems of a registered tool; registration still succeeds."""
        try:
            validator = ToolSchemaValidator()
            errors = validator.validate_schema(function_obj.to_dict())
            if not errors:
                log_debug(f"Function {function_obj.name} has a strict schema")
                return
            logger.warning("Schema issues found in %s:", function_obj.name)
            for error in errors:
                logger.warning("  - %s", error)
            analysis = validator.analyze_function_signature(original_func)
            for rec in analysis["recommendations"]:
                logger.warning("  - %s", rec)
        except (ValueError, TypeError, KeyError, AttributeError) as e:
            logger.warning("Failed to check schema of %s: %s", function_obj.name, e)
