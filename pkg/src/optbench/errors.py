"""Exception hierarchy shared across the workbench."""


class OptBenchError(Exception):
    """Base class for all workbench errors."""


# --- plan IR ---

class UnresolvedColumn(OptBenchError):
    def __init__(self, name, available=()):
        super().__init__(f"column {name!r} not found (available: {sorted(available)})")
        self.name = name


class ArityMismatch(OptBenchError):
    def __init__(self, fn, expected, got):
        super().__init__(f"{fn}: expected {expected} args, got {got}")
        self.fn = fn


class ParseError(OptBenchError):
    def __init__(self, location, reason):
        super().__init__(f"parse error at {location}: {reason}")
        self.location = location
        self.reason = reason


class ValidationError(OptBenchError):
    pass


# --- kernels / models ---

class ShapeMismatch(OptBenchError):
    pass


class UnknownModel(OptBenchError):
    def __init__(self, model_id):
        super().__init__(f"unknown model {model_id!r}")
        self.model_id = model_id


class NonFiniteInput(OptBenchError):
    pass


class UnsupportedConvConfig(OptBenchError):
    pass


# --- statistics ---

class UnknownTable(OptBenchError):
    def __init__(self, name):
        super().__init__(f"unknown table {name!r}")
        self.name = name


class EmptySample(OptBenchError):
    pass


class NonNumericFeature(OptBenchError):
    pass


class MissingStats(OptBenchError):
    pass


# --- rewrite actions ---

class RewriteProducedInvalidPlan(OptBenchError):
    def __init__(self, action, cause):
        super().__init__(f"action {action!r} produced an invalid plan: {cause}")
        self.action = action
        self.cause = cause


class NotApplicable(OptBenchError):
    pass


# --- optimizers ---

class DuplicateName(OptBenchError):
    def __init__(self, name):
        super().__init__(f"name {name!r} already registered")
        self.name = name


class UnknownAction(OptBenchError):
    def __init__(self, name):
        super().__init__(f"unknown rewrite action {name!r}")
        self.name = name


class UnknownStatistic(OptBenchError):
    def __init__(self, name):
        super().__init__(f"unknown statistic {name!r}")
        self.name = name


# --- executor ---

class DataTypeError(OptBenchError):
    """Value does not conform to its column dtype."""

    def __init__(self, row, column, detail=""):
        super().__init__(f"type error at row {row}, column {column!r}: {detail}")
        self.row = row
        self.column = column


class DivergentSchema(OptBenchError):
    pass


class SchemaMismatch(OptBenchError):
    pass


# --- suite / bench ---

class UnknownQuery(OptBenchError):
    def __init__(self, query_id):
        super().__init__(f"unknown query {query_id!r}")
        self.query_id = query_id


class InvalidSpec(OptBenchError):
    pass


class OptimizerFailed(OptBenchError):
    def __init__(self, optimizer, query, cause):
        super().__init__(f"optimizer {optimizer!r} failed on {query!r}: {cause}")
        self.optimizer = optimizer
        self.query = query
        self.cause = cause
