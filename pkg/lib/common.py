"""Common utility functions for logging and local/S3 file access in the workbench.

This module provides shared utilities for handling logging configuration and file
operations that work seamlessly with both local files and S3 objects using smart_open.
"""

import atexit
import datetime
import logging
import math
import os
from typing import IO, Any, Dict, List, Optional, Tuple

import boto3
import smart_open

from .errors import PathError

log = logging.getLogger(__name__)

# Shared file handlers, keyed by log file path, so repeated setup does not
# truncate a log that is already being written.
_shared_file_handlers: Dict[str, logging.Handler] = {}

LOG_FORMAT = "%(asctime)-15s %(filename)s:%(lineno)d %(levelname)s: %(message)s"


def get_timestamp() -> str:
    """
    Generates a UTC timestamp for output headers.

    Returns:
        str: The generated timestamp.

    Example:
        >>> len(get_timestamp()) == 20
        True
    """
    timestamp = datetime.datetime.now(datetime.timezone.utc)
    return timestamp.strftime("%Y-%m-%dT%H:%M:%SZ")


def get_s3_client() -> Any:
    """Returns a boto3 S3 client configured from SE_* environment variables."""
    session = boto3.session.Session(
        aws_access_key_id=os.getenv("SE_ACCESS_KEY"),
        aws_secret_access_key=os.getenv("SE_SECRET_KEY"),
    )
    return session.client(
        "s3", endpoint_url=os.getenv("SE_HOST_URL", "https://os.zhdk.cloud.switch.ch/")
    )


def get_transport_params(filepath: str) -> Dict[str, Any]:
    """Get transport parameters for S3 or local file access.

    >>> get_transport_params("profile.csv")
    {}
    """
    if filepath.startswith("s3://"):
        return {"client": get_s3_client()}
    return {}


def parse_s3_path(s3_path: str) -> Tuple[str, str]:
    """
    Parses an S3 path into a bucket name and key.

    Args:
        s3_path (str): The S3 path to parse.

    Returns:
        Tuple[str, str]: The bucket name and key.

    Raises:
        ValueError: If the path does not start with "s3://" or has no key.

    >>> parse_s3_path("s3://runs/bps/profile.csv")
    ('runs', 'bps/profile.csv')

    >>> parse_s3_path("profile.csv")
    Traceback (most recent call last):
    ...
    ValueError: S3 path must start with s3://: profile.csv
    """
    if not s3_path.startswith("s3://"):
        raise ValueError(f"S3 path must start with s3://: {s3_path}")
    path_parts = s3_path[5:].split("/", 1)
    if len(path_parts) < 2 or not path_parts[1]:
        raise ValueError(f"S3 path must include both bucket name and key: {s3_path}")
    return path_parts[0], path_parts[1]


def open_path(path: str, mode: str = "r") -> IO:
    """Open a local path or S3 URI for text I/O through smart_open.

    Raises:
        PathError: If an ``s3://`` URI lacks a bucket or key.
    """
    if path.startswith("s3://"):
        try:
            bucket, key = parse_s3_path(path)
        except ValueError as e:
            raise PathError(str(e)) from e
        log.debug("Opening s3 object %s in bucket %s", key, bucket)
    return smart_open.open(
        path, mode, encoding="utf-8", transport_params=get_transport_params(path)
    )


def format_float(value: float) -> str:
    """Format a float with 17 significant digits so it round-trips exactly.

    >>> format_float(0.1)
    '0.10000000000000001'
    >>> format_float(2.0)
    '2'
    """
    if not math.isfinite(value):
        return str(value)
    return format(float(value), ".17g")


class _SmartFileHandler(logging.FileHandler):
    """File handler whose stream is opened with smart_open.

    ``baseFilename`` is kept verbatim so S3 URIs are not turned into local paths.
    """

    def __init__(self, path: str) -> None:
        super().__init__(path, mode="w", encoding="utf-8", delay=True)
        self.baseFilename = path

    def _open(self) -> IO:
        return open_path(self.baseFilename, "w")

    def close(self) -> None:
        if self.stream:
            try:
                self.flush()
                self.stream.close()
            except (OSError, ValueError):
                pass
            finally:
                object.__setattr__(self, "stream", None)
        super().close()


def _file_handler(log_file: str) -> logging.Handler:
    handler = _shared_file_handlers.get(log_file)
    if handler is None:
        handler = _SmartFileHandler(log_file)
        _shared_file_handlers[log_file] = handler
        log.debug("Opened log file %s", log_file)
    return handler


def setup_logging(log_level: str, log_file: Optional[str], force: bool = False) -> None:
    """Send root log records to the console and, optionally, to ``log_file``.

    ``log_file`` may be a local path or an S3 URI. Library modules only create
    loggers; the CLI calls this once per command with ``force=True`` so that
    handlers left by an earlier command are replaced.
    """
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(_file_handler(log_file))
    logging.basicConfig(
        level=log_level, format=LOG_FORMAT, handlers=handlers, force=force
    )


def clear_shared_handlers() -> None:
    """Close and forget every shared file handler."""
    for filename, handler in list(_shared_file_handlers.items()):
        try:
            handler.close()
        except Exception as e:
            print(f"Error cleaning up handler for {filename}: {e}")
    _shared_file_handlers.clear()


atexit.register(clear_shared_handlers)
