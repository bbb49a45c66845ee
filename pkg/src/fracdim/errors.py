"""Shared error type for contract violations."""


class DomainError(ValueError):
    """An input violates an operation's contract.

    Carries a stable machine-readable ``code`` (``"empty-grid"``,
    ``"bad-scale"``, ...) so callers and the CLI can match on it without
    parsing prose.
    """

    def __init__(self, code: str, detail: str = ""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)
