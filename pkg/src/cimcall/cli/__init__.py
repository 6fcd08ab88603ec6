from __future__ import annotations

from cimcall.cli.main import (
    EXIT_FAILURE,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_SELF_CHECK,
    build_parser,
    load_config,
    main,
    run,
)

__all__ = [
    "EXIT_FAILURE",
    "EXIT_INPUT",
    "EXIT_OK",
    "EXIT_SELF_CHECK",
    "build_parser",
    "load_config",
    "main",
    "run",
]
