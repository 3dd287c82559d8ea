"""njexl: an embeddable interpreter for a declarative validation language.

Host programs use the embed API::

    from njexl import create_context, bind, evaluate

    ctx = create_context()
    bind(ctx, "l", [3, 1, 2])
    evaluate(ctx, "sorta(l)")   # -> [1, 2, 3]

The command-line runner lives in njexl.cli (installed as `njexl`).
"""

from .embed import (
    ConversionError,
    EngineContext,
    StructuredError,
    bind,
    create_context,
    evaluate,
    get,
)

__version__ = "0.1.0"

__all__ = [
    "ConversionError",
    "EngineContext",
    "StructuredError",
    "bind",
    "create_context",
    "evaluate",
    "get",
    "__version__",
]
