"""Exception hierarchy shared across the lab."""


class RepairLabError(Exception):
    """Base class for every error raised by this package."""


class ParseError(RepairLabError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class TypeCheckError(RepairLabError):
    """Static violation (typing, scoping, structure) attributed to a node.

    `code` is a stable machine-readable tag, e.g. "ill-typed", "unresolved-var",
    "redeclared-var", "missing-return", "bad-domain", "duplicate-id".
    """

    def __init__(self, node_id: int, code: str, message: str):
        super().__init__(f"node {node_id}: {message}")
        self.node_id = node_id
        self.code = code


class DuplicateFunctionError(RepairLabError):
    def __init__(self, name: str):
        super().__init__(f"duplicate function: {name}")
        self.name = name


class UnknownFunctionError(RepairLabError):
    def __init__(self, name: str):
        super().__init__(f"unknown function: {name}")
        self.name = name


class ArityMismatchError(RepairLabError):
    def __init__(self, fn: str, expected: int, got: int):
        super().__init__(f"{fn} expects {expected} args, got {got}")
        self.fn = fn
        self.expected = expected
        self.got = got


class UnknownNodeError(RepairLabError):
    def __init__(self, node_id: int):
        super().__init__(f"no node with id {node_id}")
        self.node_id = node_id


class IllegalEditError(RepairLabError):
    pass


class NoFailingTestsError(RepairLabError):
    pass


class NoAngelicFixError(RepairLabError):
    pass


class SignatureMismatchError(RepairLabError):
    pass


class DomainTooLargeError(RepairLabError):
    def __init__(self, points: int, cap: int):
        super().__init__(f"input domain has {points} points, cap is {cap}")
        self.points = points
        self.cap = cap
