"""Helpers shared by the command handlers."""

import functools
import json
import logging
import sys
from typing import Any, Callable, Dict

from config.settings import EXIT_ERROR, MSG_ERROR, MSG_PARSE_ERROR
from utils.errors import FileFormatError

logger = logging.getLogger(__name__)

Handler = Callable[[Any], int]


def report_error(message: str) -> None:
    print(message, file=sys.stderr)


def guarded(handler: Handler) -> Handler:
    """
    Turn library errors into a ``❌`` message and exit code 1.

    Parse errors name the offending file; anything unexpected is logged with
    its traceback.
    """
    @functools.wraps(handler)
    def wrapper(args: Any) -> int:
        try:
            return handler(args)
        except FileFormatError as e:
            if e.path:
                report_error(MSG_PARSE_ERROR.format(path=e.path, error=e))
            else:
                report_error(MSG_ERROR.format(error=e))
            return EXIT_ERROR
        except (ValueError, OSError) as e:
            report_error(MSG_ERROR.format(error=e))
            return EXIT_ERROR
        except Exception as e:
            logger.error(f"Error in {handler.__name__}: {e}", exc_info=True)
            report_error(MSG_ERROR.format(error=e))
            return EXIT_ERROR

    return wrapper


def print_json(data: Dict[str, Any]) -> None:
    print(json.dumps(data, indent=2, ensure_ascii=False))
