"""A runtime for the Con-Cat concatenative language, with trace and quiz tools."""

__version__ = "0.1.0"

from .errors import ConcatError  # noqa: E402
from .values import Str, Word, equal, render  # noqa: E402
from .engine import Machine  # noqa: E402

__all__ = ["ConcatError", "Machine", "Str", "Word", "equal", "render", "__version__"]
