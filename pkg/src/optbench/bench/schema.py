"""JSON schema for benchmark report documents (`optbench-report/1`)."""

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["format", "environment", "runs", "equivalence"],
    "properties": {
        "format": {"const": "optbench-report/1"},
        "environment": {
            "type": "object",
            "required": ["seed", "scale", "repetitions", "timestamp"],
            "properties": {
                "seed": {"type": "integer"},
                "scale": {"type": "number", "exclusiveMinimum": 0},
                "repetitions": {"type": "integer", "minimum": 1},
                "timestamp": {"type": "string"},
                "kernel_backend": {"type": "string"},
            },
        },
        "runs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["query", "optimizer", "status"],
                "properties": {
                    "query": {"type": "string"},
                    "optimizer": {"type": "string"},
                    "status": {"enum": ["ok", "failed"]},
                    "latency_ms": {"type": "number", "minimum": 0},
                    "latencies_ms": {"type": "array", "items": {"type": "number"}},
                    "optimize_time_ms": {"type": "number", "minimum": 0},
                    "result_digest": {"type": "string"},
                    "matches_baseline": {"type": "boolean"},
                    "ml_call_invocations": {"type": "integer", "minimum": 0},
                    "rows": {"type": "integer", "minimum": 0},
                    "plan_hash": {"type": "string", "pattern": "^[0-9a-f]{16}$"},
                    "trace": {"type": "object"},
                    "error": {"type": "string"},
                },
                "allOf": [
                    {
                        "if": {"properties": {"status": {"const": "ok"}}},
                        "then": {
                            "required": [
                                "latency_ms", "optimize_time_ms", "result_digest",
                                "matches_baseline", "ml_call_invocations", "plan_hash",
                            ]
                        },
                    },
                    {
                        "if": {"properties": {"status": {"const": "failed"}}},
                        "then": {"required": ["error"]},
                    },
                ],
            },
        },
        "equivalence": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": {"type": "boolean"},
            },
        },
    },
}
