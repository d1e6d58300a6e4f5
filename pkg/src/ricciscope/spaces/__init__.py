"""Built-in example spaces."""

from . import ledger_obata, stiefel

__all__ = ["ledger_obata", "stiefel"]
