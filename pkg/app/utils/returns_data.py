from typing import Any, Optional

import orjson
import typer

from app.models.BaseModel import to_plain

DUMP_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY


class returnsdata:
    """JSON envelopes written to stdout by the command-line controllers."""

    @staticmethod
    def success(data: Any, msg: str, status: str) -> bytes:
        return orjson.dumps({
            "data": to_plain(data),
            "msg": msg,
            "status": status,
            "status_code": 200
        }, option=DUMP_OPTIONS)

    @staticmethod
    def warning(data: Any, msg: str, status: str) -> bytes:
        return orjson.dumps({
            "data": to_plain(data),
            "msg": msg,
            "status": status,
            "status_code": 201
        }, option=DUMP_OPTIONS)

    @staticmethod
    def record(value: Any, est_error: Any, config_echo: dict, msg: str, status: str) -> bytes:
        """Single-evaluation record: coefficients, error estimate and the configuration used."""
        return returnsdata.success({
            "value_coeffs": to_plain(value),
            "est_error": to_plain(est_error),
            "config_echo": to_plain(config_echo),
        }, msg, status)

    @staticmethod
    def error_msg(msg: str, status: str, status_code: int = 500, data: Optional[Any] = None) -> bytes:
        content = {"msg": msg, "status": status, "status_code": status_code}
        if data is not None:
            content["data"] = to_plain(data)
        return orjson.dumps(content, option=DUMP_OPTIONS)

    @staticmethod
    def error() -> bytes:
        return orjson.dumps({
            "msg": "Something has happened. Check the logs and try again.",
            "status": "error",
            "status_code": 500
        }, option=DUMP_OPTIONS)

    @staticmethod
    def write(payload: bytes) -> None:
        typer.echo(payload.decode())
