from typing import List, Union

from resonancelab.utils.schema import ToolSchemaValidator

STRICT = {
    "name": "phase_value",
    "parameters": {
        "type": "object",
        "properties": {
            "xi": {"type": "number"},
            "preset": {"type": "string"},
            "q_values": {"type": "array", "items": {"type": "number"}},
        },
        "required": ["xi", "preset", "q_values"],
    },
}


def test_strict_schema_is_clean():
    assert ToolSchemaValidator.validate_schema(STRICT) == []


def test_loose_schema_reports_every_property():
    schema = {
        "parameters": {
            "properties": {
                "xi": {"anyOf": [{"type": "number"}, {"type": "null"}]},
                "grid": {"type": "object"},
                "rows": {"type": "array", "items": {"type": "object"}},
                "t": {"type": ["number", "null"]},
            },
            "required": ["grid", "rows", "t"],
        }
    }
    errors = ToolSchemaValidator.validate_schema(schema)
    assert "Property 'xi' missing from required array" in errors
    assert "Property 'xi' uses 'anyOf'" in errors
    assert "Property 'grid' has unsupported type 'object'" in errors
    assert "Property 'rows' must be an array of scalars" in errors
    assert "Property 't' declares several types" in errors


def test_missing_parameters():
    assert ToolSchemaValidator.validate_schema({}) == ["Missing or invalid 'parameters' field"]


def test_signature_analysis():
    def tool(self, x: Union[int, str], y, z: List, w: float = 1.0):
        return x

    analysis = ToolSchemaValidator.analyze_function_signature(tool)
    assert analysis["function_name"] == "tool"
    assert set(analysis["parameters"]) == {"x", "y", "z", "w"}
    assert analysis["parameters"]["x"]["issues"] == ["Union annotation produces an anyOf schema"]
    assert analysis["parameters"]["y"]["issues"] == ["missing annotation"]
    assert analysis["parameters"]["z"]["issues"] == ["bare list annotation"]
    assert analysis["parameters"]["w"] == {
        "annotation": "<class 'float'>",
        "has_default": True,
        "issues": [],
    }
    assert len(analysis["recommendations"]) == 3
