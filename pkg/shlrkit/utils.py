import argparse
import logging
import os
import sys

from shlrkit import config
from shlrkit.errors import ArgumentError

LOG_FORMAT = "%(asctime)s [%(levelname)s] - %(message)s"


def setup_logging(verbose: bool = False) -> None:
    """Send log records to stderr so that stdout carries only the report."""
    logging.basicConfig(
        level=logging.INFO,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    logging.getLogger().setLevel(logging.DEBUG if verbose else logging.INFO)


def valid_file(file_path: str) -> str:
    """Validate that the file exists.

    Args:
        file_path: The path to the file.

    Returns:
        The file path, if the file exists.

    Raises:
        argparse.ArgumentTypeError: If the file does not exist.
    """
    if not os.path.exists(file_path):
        raise argparse.ArgumentTypeError(f"The file {file_path} does not exist!")
    return file_path


def nonnegative_int(value: str) -> int:
    try:
        ivalue = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer.")
    if ivalue < 0:
        raise argparse.ArgumentTypeError("Value must be greater than or equal to 0.")
    return ivalue


def positive_int(value: str) -> int:
    ivalue = nonnegative_int(value)
    if ivalue == 0:
        raise argparse.ArgumentTypeError("Value must be greater than 0.")
    return ivalue


def degree_window(value: str):
    """Parse ``LO:HI`` for argparse."""
    try:
        return config.parse_window(value)
    except ArgumentError as e:
        raise argparse.ArgumentTypeError(str(e))


def write_report(text: str, filename: str) -> None:
    """Write a rendered report to a file.

    Args:
        text: The rendered report.
        filename: The name of the file to write to.
    """
    try:
        with open(filename, "w", encoding="utf-8", newline="\n") as outfile:
            outfile.write(text)
    except OSError as e:
        logging.error(f"Failed to write to output file {filename}. Error: {str(e)}")
        raise
